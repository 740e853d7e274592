//! Command-line driver: binds a layered configuration to the convergence
//! studies, single solves, mesh export and the invariant self-test.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use fvvisc::diffusion1d::Diffusion1DProblem;
use fvvisc::mesh::{generate_grid_1d, generate_tet_mesh, vtk::write_vtk};
use fvvisc::ns3d::{manufactured_solution, NS3DProblem, VARIABLE_NAMES};
use fvvisc::recon::ReconstructionStrategy;
use fvvisc::solver::{solve_defect_correction, write_history_csv, Solution};
use fvvisc::verify::{
    band_violations, format_order_table, l1_error, l1_error_weighted, run_convergence_study,
    write_study_files, ConvergenceRecord, ErrorNorm, ProblemFamily, GRIDS_3D_FULL,
};

pub mod config;
pub mod selftest;

use config::{Problem, StudyConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("observed orders outside the accepted band:\n{0}")]
    BandViolation(String),

    #[error("self-test failed: {0}")]
    SelfTest(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Library(#[from] fvvisc::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Library(fvvisc::Error::Config(_)) => 2,
            CliError::NonConvergence(_)
            | CliError::Library(fvvisc::Error::NonConvergence { .. })
            | CliError::Library(fvvisc::Error::SolverDivergence { .. }) => 3,
            CliError::BandViolation(_) => 4,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fvvisc",
    version,
    about = "Grid-convergence studies of cell-centered finite-volume viscous discretizations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Config file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Directory for CSV, VTK and effective-config output.
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,

    /// Seed of the grid perturbation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Override any config key, e.g. `--set solver.max_iterations=200`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    /// Worker threads for concurrent runs.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Exit with code 4 when an observed order leaves its accepted band.
    #[arg(long, global = true)]
    pub check_orders: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Comma-separated grid sizes.
    #[arg(long, value_name = "LIST")]
    pub grids: Option<String>,

    /// Node perturbation as a fraction of the local spacing.
    #[arg(long)]
    pub perturbation: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// 1D nonlinear diffusion, one convergence record per strategy.
    #[command(name = "study-1d")]
    Study1d {
        #[command(flatten)]
        grid: GridArgs,
        /// Comma-separated strategy names.
        #[arg(long, value_name = "LIST")]
        strategies: Option<String>,
        /// Use uniform grids.
        #[arg(long)]
        regular: bool,
    },
    /// 1D weighted-average study over a list of weights.
    #[command(name = "study-1d-omega")]
    Study1dOmega {
        #[command(flatten)]
        grid: GridArgs,
        /// Comma-separated weights in [0, 1].
        #[arg(long, value_name = "LIST")]
        omegas: Option<String>,
        /// Use uniform grids (the default for this study).
        #[arg(long, conflicts_with = "irregular")]
        regular: bool,
        /// Use perturbed grids.
        #[arg(long)]
        irregular: bool,
    },
    /// 3D manufactured-solution Navier-Stokes study.
    #[command(name = "study-3d")]
    Study3d {
        #[command(flatten)]
        grid: GridArgs,
        /// Comma-separated strategy names.
        #[arg(long, value_name = "LIST")]
        strategies: Option<String>,
        /// Use the extended grid family.
        #[arg(long, conflicts_with = "grids")]
        full: bool,
    },
    /// One solve with its full iteration history.
    Solve {
        /// diffusion1d or ns3d.
        #[arg(long)]
        problem: Option<String>,
        /// Grid size (default: first configured grid).
        #[arg(long)]
        grid: Option<usize>,
        /// Strategy name (default: first configured strategy).
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        perturbation: Option<f64>,
        /// Use a uniform 1D grid.
        #[arg(long)]
        regular: bool,
    },
    /// Writes a perturbed tetrahedral mesh as legacy VTK.
    #[command(name = "mesh-export")]
    MeshExport {
        /// Cubes per edge (default: first configured grid).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        perturbation: Option<f64>,
    },
    /// Runs the solver-free invariant checks.
    Selftest,
}

/// `(key, value)` config entries in application order.
type Entries = Vec<(String, String)>;

fn push(flags: &mut Entries, key: &str, value: Option<impl ToString>) {
    if let Some(v) = value {
        flags.push((key.to_string(), v.to_string()));
    }
}

impl Cli {
    /// Problem default, subcommand defaults and flag overrides.
    fn layers(&self) -> Result<(Problem, Entries, Entries), CliError> {
        let mut base = Vec::new();
        let mut flags = Vec::new();
        let problem = match &self.command {
            Command::Study1d {
                grid,
                strategies,
                regular,
            } => {
                push(&mut flags, "grids", grid.grids.as_ref());
                push(&mut flags, "perturbation", grid.perturbation);
                push(&mut flags, "strategies", strategies.as_ref());
                push(&mut flags, "regular", regular.then_some(true));
                Problem::Diffusion1D
            }
            Command::Study1dOmega {
                grid,
                omegas,
                regular,
                irregular,
            } => {
                base.push(("regular".to_string(), "true".to_string()));
                push(&mut flags, "grids", grid.grids.as_ref());
                push(&mut flags, "perturbation", grid.perturbation);
                push(&mut flags, "omegas", omegas.as_ref());
                push(&mut flags, "regular", regular.then_some(true));
                push(&mut flags, "regular", irregular.then_some(false));
                Problem::Diffusion1D
            }
            Command::Study3d {
                grid,
                strategies,
                full,
            } => {
                let full_grids = GRIDS_3D_FULL.map(|g| g.to_string()).join(",");
                push(
                    &mut flags,
                    "grids",
                    grid.grids.clone().or(full.then_some(full_grids)),
                );
                push(&mut flags, "perturbation", grid.perturbation);
                push(&mut flags, "strategies", strategies.as_ref());
                Problem::NavierStokes3D
            }
            Command::Solve {
                problem,
                grid,
                strategy,
                perturbation,
                regular,
            } => {
                push(&mut flags, "problem", problem.as_ref());
                push(&mut flags, "grids", *grid);
                push(&mut flags, "strategies", strategy.as_ref());
                push(&mut flags, "perturbation", *perturbation);
                push(&mut flags, "regular", regular.then_some(true));
                Problem::Diffusion1D
            }
            Command::MeshExport { grid, perturbation } => {
                push(&mut flags, "grids", *grid);
                push(&mut flags, "perturbation", *perturbation);
                Problem::NavierStokes3D
            }
            Command::Selftest => Problem::NavierStokes3D,
        };
        push(
            &mut flags,
            "output_dir",
            self.output_dir.as_ref().map(|p| p.display()),
        );
        push(&mut flags, "seed", self.seed);
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
            flags.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok((problem, base, flags))
    }

    /// Effective configuration of this invocation.
    pub fn resolve_config(
        &self,
        env: &dyn Fn(&str) -> Option<String>,
    ) -> Result<StudyConfig, CliError> {
        let (problem, base, flags) = self.layers()?;
        let text = match &self.config {
            Some(p) => Some(fs::read_to_string(p).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", p.display()))
            })?),
            None => None,
        };
        // subcommand defaults sit below the file, so they are prepended to it
        let mut file = String::new();
        for (k, v) in &base {
            file.push_str(&format!("{k} = {v}\n"));
        }
        file.push_str(text.as_deref().unwrap_or(""));
        let mut cfg = StudyConfig::resolve(problem, Some(&file), env, &flags)?;
        // these subcommands only make sense for one problem
        match self.command {
            Command::Study1d { .. } | Command::Study1dOmega { .. } => {
                cfg.problem = Problem::Diffusion1D
            }
            Command::Study3d { .. } | Command::MeshExport { .. } => {
                cfg.problem = Problem::NavierStokes3D
            }
            _ => {}
        }
        Ok(cfg)
    }
}

/// Runs one invocation, reading overrides from the process environment.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    run_with_env(cli, &|k| std::env::var(k).ok())
}

pub fn run_with_env(cli: &Cli, env: &dyn Fn(&str) -> Option<String>) -> Result<(), CliError> {
    let cfg = cli.resolve_config(env)?;
    match cli.jobs {
        Some(0) => Err(CliError::Config("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))?
            .install(|| dispatch(cli, &cfg)),
        None => dispatch(cli, &cfg),
    }
}

fn dispatch(cli: &Cli, cfg: &StudyConfig) -> Result<(), CliError> {
    match cli.command {
        Command::Study1d { .. } => study(cfg, "study_1d", &cfg.strategies, cli.check_orders),
        Command::Study1dOmega { .. } => {
            let strategies = cfg
                .omegas
                .iter()
                .map(|&w| ReconstructionStrategy::weighted(w))
                .collect::<Result<Vec<_>, _>>()
                .map_err(config::config_error)?;
            study(cfg, "study_1d_omega", &strategies, cli.check_orders)
        }
        Command::Study3d { .. } => study(cfg, "study_3d", &cfg.strategies, cli.check_orders),
        Command::Solve { .. } => solve(cfg),
        Command::MeshExport { .. } => mesh_export(cfg),
        Command::Selftest => {
            let checks = selftest::run(cfg)?;
            let mut failed = Vec::new();
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
                if !c.pass {
                    failed.push(c.name);
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::SelfTest(failed.join(", ")))
            }
        }
    }
}

fn prepare_output(cfg: &StudyConfig, name: &str) -> Result<(), CliError> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(format!("{name}.config"));
    fs::write(&path, cfg.to_config_string()).map_err(io_err(&path))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn family(cfg: &StudyConfig) -> ProblemFamily {
    match cfg.problem {
        Problem::Diffusion1D => ProblemFamily::Diffusion1D {
            regular: cfg.regular,
            perturbation: cfg.perturbation,
            seed: cfg.seed,
        },
        Problem::NavierStokes3D => ProblemFamily::NavierStokes3D {
            perturbation: cfg.perturbation,
            seed: cfg.seed,
            flow: cfg.flow,
        },
    }
}

fn study_title(cfg: &StudyConfig, name: &str) -> String {
    let grids = match (cfg.problem, cfg.regular) {
        (Problem::Diffusion1D, true) => "uniform grids".to_string(),
        _ => format!("perturbation {} seed {}", cfg.perturbation, cfg.seed),
    };
    format!(
        "{name}: {} on {grids}, {} error",
        cfg.problem, cfg.error_norm
    )
}

fn study(
    cfg: &StudyConfig,
    name: &str,
    strategies: &[ReconstructionStrategy],
    check_orders: bool,
) -> Result<(), CliError> {
    prepare_output(cfg, name)?;
    let family = family(cfg);
    let records =
        run_convergence_study(&family, strategies, &cfg.grids, &cfg.solver, cfg.error_norm)?;
    let title = study_title(cfg, name);
    for path in write_study_files(&cfg.output_dir, name, &records)? {
        println!("wrote {}", path.display());
    }
    println!("{title}");
    print!("{}", format_order_table(&records));
    study_outcome(&records, family.variables()[0].as_str(), check_orders)
}

/// Exit status of a finished study. Failed runs take precedence over band
/// violations, since orders from an incomplete record are not meaningful.
pub fn study_outcome(
    records: &[ConvergenceRecord],
    var: &str,
    check_orders: bool,
) -> Result<(), CliError> {
    let failed: Vec<String> = records
        .iter()
        .flat_map(|r| {
            r.rows()
                .iter()
                .filter(|row| row.is_failed())
                .map(move |row| format!("{} {}", r.strategy, row.grid_label))
        })
        .collect();
    if !failed.is_empty() {
        return Err(CliError::NonConvergence(failed.join(", ")));
    }
    if check_orders {
        let v = band_violations(records, var);
        if !v.is_empty() {
            return Err(CliError::BandViolation(v.join("\n")));
        }
    }
    Ok(())
}

fn l1<const N: usize>(
    norm: ErrorNorm,
    u: &[[f64; N]],
    exact: &[[f64; N]],
    vol: &[f64],
) -> fvvisc::Result<[f64; N]> {
    match norm {
        ErrorNorm::CellMean => l1_error(u, exact),
        ErrorNorm::VolumeWeighted => l1_error_weighted(u, exact, vol),
    }
}

fn write_solution_csv(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = String>,
) -> Result<(), CliError> {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    fs::write(path, s).map_err(io_err(path))
}

fn write_history(
    path: &Path,
    vars: &[&str],
    history: &[fvvisc::error::IterationRecord],
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_history_csv(&mut buf, vars, history).map_err(io_err(path))?;
    fs::write(path, buf).map_err(io_err(path))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Keeps the history of a run that stopped early, so it is still written.
fn split_history<const B: usize>(
    result: fvvisc::Result<Solution<B>>,
) -> (
    Option<Solution<B>>,
    Vec<fvvisc::error::IterationRecord>,
    Option<fvvisc::Error>,
) {
    match result {
        Ok(sol) => {
            let h = sol.history.clone();
            (Some(sol), h, None)
        }
        Err(fvvisc::Error::NonConvergence {
            iterations,
            drop,
            history,
        }) => (
            None,
            history.clone(),
            Some(fvvisc::Error::NonConvergence {
                iterations,
                drop,
                history,
            }),
        ),
        Err(e) => (None, Vec::new(), Some(e)),
    }
}

fn solve(cfg: &StudyConfig) -> Result<(), CliError> {
    let size = cfg.grids[0];
    let strategy = cfg.strategies[0];
    let stem = format!(
        "solve_{}_n{size}_{}",
        cfg.problem,
        strategy.to_string().replace(':', "_")
    );
    prepare_output(cfg, &stem)?;
    let dir = &cfg.output_dir;
    match cfg.problem {
        Problem::Diffusion1D => {
            let grid = generate_grid_1d(size, cfg.regular, cfg.perturbation, cfg.seed)?;
            let problem = Diffusion1DProblem::new(grid, strategy);
            let init = problem.initial_state().into_iter().map(|u| [u]).collect();
            let (sol, history, err) =
                split_history(solve_defect_correction(&problem, init, &cfg.solver));
            write_history(&dir.join(format!("{stem}_history.csv")), &["u"], &history)?;
            if let Some(e) = err {
                return Err(e.into());
            }
            let sol = sol.expect("solution present without error");
            let exact: Vec<[f64; 1]> = problem.exact_state().into_iter().map(|u| [u]).collect();
            let grid = problem.grid();
            let e = l1(cfg.error_norm, &sol.state, &exact, grid.volumes())?;
            let path = dir.join(format!("{stem}_solution.csv"));
            write_solution_csv(
                &path,
                "cell,x,u,u_exact",
                (0..grid.num_cells()).map(|j| {
                    format!(
                        "{j},{:e},{:e},{:e}",
                        grid.centers()[j],
                        sol.state[j][0],
                        exact[j][0]
                    )
                }),
            )?;
            println!("wrote {}", path.display());
            println!("{} iterations, l1 error u={:.6e}", sol.iterations(), e[0]);
        }
        Problem::NavierStokes3D => {
            let mesh = generate_tet_mesh(size, cfg.perturbation, cfg.seed)?;
            let problem = NS3DProblem::new(mesh, strategy, cfg.flow)?;
            let (sol, history, err) = split_history(solve_defect_correction(
                &problem,
                problem.initial_state(),
                &cfg.solver,
            ));
            write_history(
                &dir.join(format!("{stem}_history.csv")),
                &VARIABLE_NAMES,
                &history,
            )?;
            if let Some(e) = err {
                return Err(e.into());
            }
            let sol = sol.expect("solution present without error");
            let exact = problem.exact_state();
            let mesh = problem.mesh();
            let e = l1(cfg.error_norm, &sol.state, &exact, mesh.volumes())?;
            let path = dir.join(format!("{stem}_solution.csv"));
            let mut header = "cell,x,y,z".to_string();
            for v in VARIABLE_NAMES {
                header.push_str(&format!(",{v},{v}_exact"));
            }
            write_solution_csv(
                &path,
                &header,
                (0..mesh.num_cells()).map(|c| {
                    let p = mesh.centroids()[c];
                    let mut row = format!("{c},{:e},{:e},{:e}", p.x, p.y, p.z);
                    for (s, e) in sol.state[c].iter().zip(&exact[c]) {
                        row.push_str(&format!(",{s:e},{e:e}"));
                    }
                    row
                }),
            )?;
            println!("wrote {}", path.display());
            let errs: Vec<String> = VARIABLE_NAMES
                .iter()
                .zip(e)
                .map(|(v, e)| format!("{v}={e:.6e}"))
                .collect();
            println!(
                "{} iterations, l1 error {}",
                sol.iterations(),
                errs.join(" ")
            );
        }
    }
    Ok(())
}

fn mesh_export(cfg: &StudyConfig) -> Result<(), CliError> {
    let size = cfg.grids[0];
    let stem = format!("mesh_n{size}");
    prepare_output(cfg, &stem)?;
    let mesh = generate_tet_mesh(size, cfg.perturbation, cfg.seed)?;
    let exact: Vec<[f64; 5]> = mesh
        .centroids()
        .iter()
        .map(|p| manufactured_solution(p).to_array())
        .collect();
    let columns: Vec<(String, Vec<f64>)> = VARIABLE_NAMES
        .iter()
        .enumerate()
        .map(|(v, name)| {
            (
                format!("{name}_exact"),
                exact.iter().map(|s| s[v]).collect(),
            )
        })
        .collect();
    let scalars: Vec<(&str, &[f64])> = columns
        .iter()
        .map(|(n, v)| (n.as_str(), v.as_slice()))
        .collect();
    let path = cfg.output_dir.join(format!("{stem}.vtk"));
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    let title = format!(
        "fvvisc tetrahedral mesh n={size} perturbation={} seed={}",
        cfg.perturbation, cfg.seed
    );
    write_vtk(std::io::BufWriter::new(file), &mesh, &title, &scalars).map_err(io_err(&path))?;
    println!("wrote {} ({} cells)", path.display(), mesh.num_cells());
    Ok(())
}
