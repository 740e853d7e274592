//! Plain-text `key = value` study configuration.
//!
//! One entry per line, `#` starts a comment, nested settings use dotted keys
//! (`solver.max_iterations`). Values are resolved in the order default, file,
//! environment, command-line flag; later sources win.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fvvisc::mesh::{DEFAULT_PERTURBATION_1D, DEFAULT_PERTURBATION_3D};
use fvvisc::physics::FlowConfig;
use fvvisc::recon::ReconstructionStrategy;
use fvvisc::solver::SolverConfig;
use fvvisc::verify::{ErrorNorm, DEFAULT_SEED, GRIDS_1D, GRIDS_3D, OMEGAS};

use crate::CliError;

/// Prefix of environment variables that override config keys.
pub const ENV_PREFIX: &str = "FVVISC_";

/// Every accepted key, in emission order.
pub const KEYS: &[&str] = &[
    "problem",
    "grids",
    "regular",
    "strategies",
    "omegas",
    "perturbation",
    "seed",
    "error_norm",
    "output_dir",
    "flow.mach",
    "flow.reynolds",
    "flow.t_inf",
    "flow.sutherland",
    "flow.gamma",
    "flow.prandtl",
    "flow.alpha",
    "solver.target_drop",
    "solver.max_iterations",
    "solver.cfl_start",
    "solver.cfl_max",
    "solver.cfl_growth",
    "solver.linear_sweeps",
    "solver.absolute_tolerance",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Diffusion1D,
    NavierStokes3D,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Diffusion1D => "diffusion1d",
            Problem::NavierStokes3D => "ns3d",
        })
    }
}

impl FromStr for Problem {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "diffusion1d" => Ok(Problem::Diffusion1D),
            "ns3d" => Ok(Problem::NavierStokes3D),
            _ => Err(CliError::Config(format!(
                "unknown problem '{s}'; valid names: diffusion1d, ns3d"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub problem: Problem,
    pub grids: Vec<usize>,
    pub regular: bool,
    pub strategies: Vec<ReconstructionStrategy>,
    pub omegas: Vec<f64>,
    pub perturbation: f64,
    pub seed: u64,
    pub error_norm: ErrorNorm,
    pub output_dir: PathBuf,
    pub flow: FlowConfig,
    pub solver: SolverConfig,
}

impl StudyConfig {
    /// Defaults of the published setup for one problem.
    pub fn defaults(problem: Problem) -> Self {
        use ReconstructionStrategy::*;
        let (grids, strategies, perturbation) = match problem {
            Problem::Diffusion1D => (
                GRIDS_1D.to_vec(),
                vec![
                    LRAverage,
                    InverseDistance,
                    Arithmetic,
                    OneSidedLeft,
                    OneSidedRight,
                ],
                DEFAULT_PERTURBATION_1D,
            ),
            Problem::NavierStokes3D => (
                GRIDS_3D.to_vec(),
                vec![LRAverage, Arithmetic, InverseDistance],
                DEFAULT_PERTURBATION_3D,
            ),
        };
        Self {
            problem,
            grids,
            regular: false,
            strategies,
            omegas: OMEGAS.to_vec(),
            perturbation,
            seed: DEFAULT_SEED,
            error_norm: ErrorNorm::CellMean,
            output_dir: PathBuf::from("results"),
            flow: FlowConfig::default(),
            solver: SolverConfig::default(),
        }
    }

    /// Resolves a configuration from its layered sources.
    ///
    /// `problem` is the caller's default; a `problem` entry in any layer
    /// replaces it before the remaining defaults are chosen.
    pub fn resolve(
        problem: Problem,
        file: Option<&str>,
        env: &dyn Fn(&str) -> Option<String>,
        flags: &[(String, String)],
    ) -> Result<Self, CliError> {
        let file_entries = match file {
            Some(text) => parse_entries(text)?,
            None => Vec::new(),
        };
        let env_entries: Vec<(String, String)> = KEYS
            .iter()
            .filter_map(|k| env(&env_var(k)).map(|v| (k.to_string(), v)))
            .collect();
        let layers = [file_entries.as_slice(), env_entries.as_slice(), flags];

        let mut problem = problem;
        for (k, v) in layers.iter().flat_map(|l| l.iter()) {
            if k == "problem" {
                problem = v.trim().parse()?;
            }
        }
        let mut cfg = Self::defaults(problem);
        for (k, v) in layers.iter().flat_map(|l| l.iter()) {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses a complete config file over the defaults of its `problem`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        Self::resolve(Problem::Diffusion1D, Some(text), &|_| None, &[])
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "problem" => self.problem = v.parse()?,
            "grids" => self.grids = parse_list(key, v)?,
            "regular" => self.regular = parse_value(key, v)?,
            "strategies" => {
                self.strategies = split_list(v)
                    .map(|s| s.parse().map_err(config_error))
                    .collect::<Result<_, _>>()?
            }
            "omegas" => self.omegas = parse_list(key, v)?,
            "perturbation" => self.perturbation = parse_value(key, v)?,
            "seed" => self.seed = parse_value(key, v)?,
            "error_norm" => self.error_norm = v.parse().map_err(config_error)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            "flow.mach" => self.flow.mach = parse_value(key, v)?,
            "flow.reynolds" => self.flow.reynolds = parse_value(key, v)?,
            "flow.t_inf" => self.flow.t_inf = parse_value(key, v)?,
            "flow.sutherland" => self.flow.sutherland = parse_value(key, v)?,
            "flow.gamma" => self.flow.gamma = parse_value(key, v)?,
            "flow.prandtl" => self.flow.prandtl = parse_value(key, v)?,
            "flow.alpha" => self.flow.alpha = parse_value(key, v)?,
            "solver.target_drop" => self.solver.target_drop = parse_value(key, v)?,
            "solver.max_iterations" => self.solver.max_iterations = parse_value(key, v)?,
            "solver.cfl_start" => self.solver.cfl_start = parse_value(key, v)?,
            "solver.cfl_max" => self.solver.cfl_max = parse_value(key, v)?,
            "solver.cfl_growth" => self.solver.cfl_growth = parse_value(key, v)?,
            "solver.linear_sweeps" => self.solver.linear_sweeps = parse_value(key, v)?,
            "solver.absolute_tolerance" => self.solver.absolute_tolerance = parse_value(key, v)?,
            _ => {
                return Err(CliError::Config(format!(
                    "unknown key '{key}'; valid keys: {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.grids.is_empty() {
            return bad("grids must not be empty".into());
        }
        if self.strategies.is_empty() {
            return bad("strategies must not be empty".into());
        }
        if let Some(w) = self.omegas.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return bad(format!("omega {w} outside [0, 1]"));
        }
        if !(0.0..0.5).contains(&self.perturbation) {
            return bad(format!(
                "perturbation {} outside [0, 0.5)",
                self.perturbation
            ));
        }
        self.flow
            .validate()
            .and_then(|_| self.solver.validate())
            .map_err(config_error)
    }

    /// Value of `key` as it would appear in a config file.
    pub fn get(&self, key: &str) -> Option<String> {
        let join = |v: Vec<String>| v.join(",");
        Some(match key {
            "problem" => self.problem.to_string(),
            "grids" => join(self.grids.iter().map(|g| g.to_string()).collect()),
            "regular" => self.regular.to_string(),
            "strategies" => join(self.strategies.iter().map(|s| s.to_string()).collect()),
            "omegas" => join(self.omegas.iter().map(|&w| num(w)).collect()),
            "perturbation" => num(self.perturbation),
            "seed" => self.seed.to_string(),
            "error_norm" => self.error_norm.to_string(),
            "output_dir" => self.output_dir.display().to_string(),
            "flow.mach" => num(self.flow.mach),
            "flow.reynolds" => num(self.flow.reynolds),
            "flow.t_inf" => num(self.flow.t_inf),
            "flow.sutherland" => num(self.flow.sutherland),
            "flow.gamma" => num(self.flow.gamma),
            "flow.prandtl" => num(self.flow.prandtl),
            "flow.alpha" => num(self.flow.alpha),
            "solver.target_drop" => num(self.solver.target_drop),
            "solver.max_iterations" => self.solver.max_iterations.to_string(),
            "solver.cfl_start" => num(self.solver.cfl_start),
            "solver.cfl_max" => num(self.solver.cfl_max),
            "solver.cfl_growth" => num(self.solver.cfl_growth),
            "solver.linear_sweeps" => self.solver.linear_sweeps.to_string(),
            "solver.absolute_tolerance" => num(self.solver.absolute_tolerance),
            _ => return None,
        })
    }

    /// The effective configuration as a config file. Floats are written in
    /// shortest round-trip form, so [`StudyConfig::parse`] restores it exactly.
    pub fn to_config_string(&self) -> String {
        let mut s = String::from("# effective fvvisc configuration\n");
        for k in KEYS {
            s.push_str(&format!("{k} = {}\n", self.get(k).unwrap_or_default()));
        }
        s
    }
}

/// Environment variable overriding `key`: `solver.max_iterations` is read
/// from `FVVISC_SOLVER_MAX_ITERATIONS`.
pub fn env_var(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.replace('.', "_").to_uppercase())
}

/// Splits config text into `(key, value)` pairs, in file order.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "line {}: expected `key = value`, got '{line}'",
                i + 1
            ))
        })?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(CliError::Config(format!(
                "line {}: unknown key '{k}'; valid keys: {}",
                i + 1,
                KEYS.join(", ")
            )));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Library errors raised while reading a value, as config errors.
pub fn config_error(e: fvvisc::Error) -> CliError {
    match e {
        fvvisc::Error::Config(m) => CliError::Config(m),
        other => CliError::Config(other.to_string()),
    }
}

// Debug formatting of f64 is shortest round-trip and keeps exponents short.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("invalid value '{v}' for {key}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError> {
    split_list(v).map(|s| parse_value(key, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env(_: &str) -> Option<String> {
        None
    }

    #[test]
    fn defaults_match_published_setup() {
        let c = StudyConfig::defaults(Problem::NavierStokes3D);
        assert_eq!(c.grids, vec![7, 11, 15]);
        assert_eq!(c.flow.mach, 0.1);
        assert_eq!(c.flow.reynolds, 0.1);
        assert_eq!(c.flow.t_inf, 300.0);
        assert_eq!(c.flow.sutherland, 110.5);
        let d = StudyConfig::defaults(Problem::Diffusion1D);
        assert_eq!(d.grids, GRIDS_1D.to_vec());
        assert_eq!(d.strategies.len(), 5);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let e = parse_entries("# header\n\nseed = 4  # trailing\n grids=7, 11\n").unwrap();
        assert_eq!(
            e,
            vec![
                ("seed".into(), "4".into()),
                ("grids".into(), "7, 11".into())
            ]
        );
    }

    #[test]
    fn malformed_lines_are_errors() {
        assert!(matches!(parse_entries("seed 4"), Err(CliError::Config(_))));
        let err = parse_entries("solver.bogus = 1").unwrap_err().to_string();
        assert!(err.contains("solver.max_iterations"), "{err}");
    }

    #[test]
    fn unknown_strategy_lists_valid_names() {
        let err = StudyConfig::parse("strategies = arithmetic, harmonic")
            .unwrap_err()
            .to_string();
        for name in ReconstructionStrategy::NAMES {
            assert!(err.contains(name), "{err}");
        }
    }

    #[test]
    fn round_trip_of_effective_config() {
        let mut c = StudyConfig::defaults(Problem::NavierStokes3D);
        c.omegas = vec![0.1 + 0.2, 1.0 / 3.0];
        c.strategies.push(ReconstructionStrategy::Weighted(0.6));
        c.flow.alpha = 4.0 / 3.0;
        c.solver.absolute_tolerance = 1e-300;
        c.error_norm = ErrorNorm::VolumeWeighted;
        c.output_dir = PathBuf::from("out dir/x");
        let back = StudyConfig::parse(&c.to_config_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn problem_entry_selects_defaults() {
        let c = StudyConfig::parse("problem = ns3d").unwrap();
        assert_eq!(c.perturbation, DEFAULT_PERTURBATION_3D);
        assert_eq!(c.strategies.len(), 3);
    }

    #[test]
    fn precedence_flag_env_file_default() {
        let file = "seed = 5\ngrids = 7,11\nsolver.max_iterations = 10\n";
        let env = |k: &str| match k {
            "FVVISC_SEED" => Some("6".to_string()),
            "FVVISC_OUTPUT_DIR" => Some("from_env".to_string()),
            _ => None,
        };
        let flags = vec![("seed".to_string(), "7".to_string())];
        let c = StudyConfig::resolve(Problem::Diffusion1D, Some(file), &env, &flags).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.output_dir, PathBuf::from("from_env"));
        assert_eq!(c.grids, vec![7, 11]);
        assert_eq!(c.solver.max_iterations, 10);
        assert_eq!(c.solver.cfl_start, SolverConfig::default().cfl_start);

        let c = StudyConfig::resolve(Problem::Diffusion1D, Some(file), &env, &[]).unwrap();
        assert_eq!(c.seed, 6);
        let c = StudyConfig::resolve(Problem::Diffusion1D, Some(file), &no_env, &[]).unwrap();
        assert_eq!(c.seed, 5);
        let c = StudyConfig::resolve(Problem::Diffusion1D, None, &no_env, &[]).unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
    }

    #[test]
    fn env_names() {
        assert_eq!(env_var("output_dir"), "FVVISC_OUTPUT_DIR");
        assert_eq!(
            env_var("solver.max_iterations"),
            "FVVISC_SOLVER_MAX_ITERATIONS"
        );
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in [
            "grids =",
            "seed = -1",
            "omegas = 1.5",
            "flow.mach = 0",
            "solver.cfl_growth = 0.5",
            "regular = maybe",
            "problem = euler",
        ] {
            assert!(
                matches!(StudyConfig::parse(text), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }
}
