//! Discretization-error norms, observed order of accuracy and grid
//! convergence studies.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::diffusion1d::Diffusion1DProblem;
use crate::error::{Error, Result};
use crate::mesh::{generate_grid_1d, generate_tet_mesh};
use crate::ns3d::{NS3DProblem, VARIABLE_NAMES};
use crate::physics::FlowConfig;
use crate::recon::ReconstructionStrategy;
use crate::solver::{solve_defect_correction, SolverConfig};

/// Grid sizes of the 1D study.
pub const GRIDS_1D: [usize; 8] = [7, 11, 15, 19, 23, 31, 47, 63];
/// Default 3D grid family (cubes per edge).
pub const GRIDS_3D: [usize; 3] = [7, 11, 15];
/// Extended 3D grid family.
pub const GRIDS_3D_FULL: [usize; 5] = [7, 11, 15, 23, 31];
/// Weights of the regular-grid weighted-average study.
pub const OMEGAS: [f64; 4] = [0.5, 0.6, 0.75, 1.0];
pub const DEFAULT_SEED: u64 = 1;

/// How cell errors are averaged into one L1 number.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ErrorNorm {
    /// `(1/N) sum_j |e_j|`.
    #[default]
    CellMean,
    /// `sum_j |e_j| V_j / sum_j V_j`.
    VolumeWeighted,
}

impl std::fmt::Display for ErrorNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ErrorNorm::CellMean => "cell-mean",
            ErrorNorm::VolumeWeighted => "volume-weighted",
        })
    }
}

impl std::str::FromStr for ErrorNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cell-mean" => Ok(ErrorNorm::CellMean),
            "volume-weighted" => Ok(ErrorNorm::VolumeWeighted),
            _ => Err(Error::Config(format!(
                "unknown error norm `{s}`, expected cell-mean or volume-weighted"
            ))),
        }
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidArgument(format!(
            "solution has {a} cells, exact solution has {b}"
        )));
    }
    if a == 0 {
        return Err(Error::InvalidArgument("empty solution".into()));
    }
    Ok(())
}

/// Unweighted L1 error per variable.
pub fn l1_error<const N: usize>(solution: &[[f64; N]], exact: &[[f64; N]]) -> Result<[f64; N]> {
    check_lengths(solution.len(), exact.len())?;
    let mut sum = [0.0; N];
    for (s, e) in solution.iter().zip(exact) {
        for v in 0..N {
            sum[v] += (s[v] - e[v]).abs();
        }
    }
    Ok(sum.map(|x| x / solution.len() as f64))
}

/// Volume-weighted L1 error per variable.
pub fn l1_error_weighted<const N: usize>(
    solution: &[[f64; N]],
    exact: &[[f64; N]],
    volumes: &[f64],
) -> Result<[f64; N]> {
    check_lengths(solution.len(), exact.len())?;
    check_lengths(solution.len(), volumes.len())?;
    let mut sum = [0.0; N];
    for ((s, e), vol) in solution.iter().zip(exact).zip(volumes) {
        for v in 0..N {
            sum[v] += (s[v] - e[v]).abs() * vol;
        }
    }
    let total: f64 = volumes.iter().sum();
    Ok(sum.map(|x| x / total))
}

fn l1_with_norm<const N: usize>(
    norm: ErrorNorm,
    solution: &[[f64; N]],
    exact: &[[f64; N]],
    volumes: &[f64],
) -> Result<[f64; N]> {
    match norm {
        ErrorNorm::CellMean => l1_error(solution, exact),
        ErrorNorm::VolumeWeighted => l1_error_weighted(solution, exact, volumes),
    }
}

/// Effective mesh spacing `N^(-1/d)`.
pub fn effective_spacing(cells: usize, dimension: usize) -> f64 {
    (cells as f64).powf(-1.0 / dimension as f64)
}

/// Order between a coarse and a fine measurement.
pub fn pair_order(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

/// Least-squares slope of `log e` against `log h`.
pub fn least_squares_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub grid_label: String,
    /// Grid size parameter (cells in 1D, cubes per edge in 3D).
    pub size: usize,
    pub cells: usize,
    pub h_eff: f64,
    /// L1 error per variable; NaN when the run failed.
    pub errors: Vec<f64>,
    pub iterations: usize,
    /// Failure message of a run that did not produce a solution.
    pub failed: Option<String>,
    pub nonconvergence: bool,
}

impl ConvergenceRow {
    pub fn is_failed(&self) -> bool {
        self.failed.is_some()
    }
}

/// Orders derived from a convergence record for one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSummary {
    /// Order between each successful row and the previous successful one;
    /// `None` for the first.
    pub pair_orders: Vec<Option<f64>>,
    /// Least-squares slope over the finest half of the successful rows.
    pub global: f64,
}

impl OrderSummary {
    /// Order of the finest grid pair.
    pub fn finest_pair(&self) -> Option<f64> {
        self.pair_orders.iter().rev().find_map(|o| *o)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub strategy: ReconstructionStrategy,
    pub dimension: usize,
    pub variables: Vec<String>,
    rows: Vec<ConvergenceRow>,
}

impl ConvergenceRecord {
    pub fn new(
        strategy: ReconstructionStrategy,
        dimension: usize,
        variables: Vec<String>,
        mut rows: Vec<ConvergenceRow>,
    ) -> Self {
        rows.sort_by(|a, b| b.h_eff.total_cmp(&a.h_eff));
        Self {
            strategy,
            dimension,
            variables,
            rows,
        }
    }

    /// Rows sorted by decreasing `h_eff`.
    pub fn rows(&self) -> &[ConvergenceRow] {
        &self.rows
    }

    pub fn variable_index(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidArgument(format!("no variable `{name}` in record")))
    }

    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(ConvergenceRow::is_failed)
    }

    /// Pairwise and global observed orders of variable `var`.
    ///
    /// Failed rows are skipped. A zero error means the discretization hit the
    /// exact solution and no order can be measured.
    pub fn observed_order(&self, var: usize) -> Result<OrderSummary> {
        let ok: Vec<(usize, &ConvergenceRow)> = self
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_failed())
            .collect();
        if ok.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "observed order needs two successful rows, have {}",
                ok.len()
            )));
        }
        if let Some((i, _)) = ok.iter().find(|(_, r)| r.errors[var] == 0.0) {
            return Err(Error::DegenerateOrder { row: *i });
        }
        let mut pair_orders = vec![None; self.rows.len()];
        for w in ok.windows(2) {
            let (c, f) = (w[0].1, w[1].1);
            pair_orders[w[1].0] = Some(pair_order(c.errors[var], f.errors[var], c.h_eff, f.h_eff));
        }
        let half = ok.len().div_ceil(2).max(2);
        let finest = &ok[ok.len() - half..];
        let h: Vec<f64> = finest.iter().map(|(_, r)| r.h_eff).collect();
        let e: Vec<f64> = finest.iter().map(|(_, r)| r.errors[var]).collect();
        Ok(OrderSummary {
            pair_orders,
            global: least_squares_slope(&h, &e),
        })
    }

    /// Writes `strategy,grid_label,N,h_eff,var,l1_error,pair_order` rows.
    pub fn write_csv_rows<W: Write>(&self, out: &mut W) -> Result<()> {
        for (vi, var) in self.variables.iter().enumerate() {
            let orders = self.observed_order(vi).ok();
            for (ri, row) in self.rows.iter().enumerate() {
                let order = orders
                    .as_ref()
                    .and_then(|o| o.pair_orders[ri])
                    .map_or(String::new(), |o| format!("{o:.6}"));
                writeln!(
                    out,
                    "{},{},{},{:e},{},{:e},{}",
                    self.strategy, row.grid_label, row.cells, row.h_eff, var, row.errors[vi], order
                )?;
            }
        }
        Ok(())
    }
}

pub const CSV_HEADER: &str = "strategy,grid_label,N,h_eff,var,l1_error,pair_order";

/// Writes one study table, with `#` comment lines describing it and any
/// failed runs.
pub fn write_study_csv<W: Write>(
    out: &mut W,
    title: &str,
    records: &[ConvergenceRecord],
) -> Result<()> {
    writeln!(out, "# {title}")?;
    for rec in records {
        for row in rec.rows().iter().filter(|r| r.is_failed()) {
            writeln!(
                out,
                "# failed: {} {}: {}",
                rec.strategy,
                row.grid_label,
                row.failed.as_deref().unwrap_or_default()
            )?;
        }
    }
    writeln!(out, "{CSV_HEADER}")?;
    for rec in records {
        rec.write_csv_rows(out)?;
    }
    Ok(())
}

/// Writes `strategy,var,global_order,finest_pair_order` for every record.
pub fn write_summary_csv<W: Write>(
    out: &mut W,
    title: &str,
    records: &[ConvergenceRecord],
) -> Result<()> {
    writeln!(out, "# {title}")?;
    writeln!(
        out,
        "# global order: least-squares slope over the finest half of the grids"
    )?;
    writeln!(out, "strategy,var,global_order,finest_pair_order")?;
    for rec in records {
        for (vi, var) in rec.variables.iter().enumerate() {
            let (global, finest) = match rec.observed_order(vi) {
                Ok(o) => (
                    format!("{:.6}", o.global),
                    o.finest_pair().map_or(String::new(), |p| format!("{p:.6}")),
                ),
                Err(_) => ("nan".to_string(), String::new()),
            };
            writeln!(out, "{},{},{},{}", rec.strategy, var, global, finest)?;
        }
    }
    Ok(())
}

/// Writes `<name>.csv`, `<name>_summary.csv` and one `<name>_<strategy>.csv`
/// per record into `dir`, returning the paths written.
pub fn write_study_files(
    dir: &Path,
    name: &str,
    records: &[ConvergenceRecord],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut emit = |file: String, body: &dyn Fn(&mut Vec<u8>) -> Result<()>| -> Result<()> {
        let mut buf = Vec::new();
        body(&mut buf)?;
        let path = dir.join(file);
        std::fs::write(&path, buf)?;
        written.push(path);
        Ok(())
    };
    emit(format!("{name}.csv"), &|b| {
        write_study_csv(b, name, records)
    })?;
    emit(format!("{name}_summary.csv"), &|b| {
        write_summary_csv(b, name, records)
    })?;
    for rec in records {
        let tag = rec.strategy.to_string().replace(':', "_");
        emit(format!("{name}_{tag}.csv"), &|b| {
            write_study_csv(
                b,
                &format!("{name} {}", rec.strategy),
                std::slice::from_ref(rec),
            )
        })?;
    }
    Ok(written)
}

/// Problem family of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemFamily {
    Diffusion1D {
        regular: bool,
        perturbation: f64,
        seed: u64,
    },
    NavierStokes3D {
        perturbation: f64,
        seed: u64,
        flow: FlowConfig,
    },
}

impl ProblemFamily {
    pub fn dimension(&self) -> usize {
        match self {
            ProblemFamily::Diffusion1D { .. } => 1,
            ProblemFamily::NavierStokes3D { .. } => 3,
        }
    }

    pub fn variables(&self) -> Vec<String> {
        match self {
            ProblemFamily::Diffusion1D { .. } => vec!["u".to_string()],
            ProblemFamily::NavierStokes3D { .. } => {
                VARIABLE_NAMES.iter().map(|s| s.to_string()).collect()
            }
        }
    }
}

struct RunOutcome {
    cells: usize,
    result: Result<(Vec<f64>, usize)>,
}

fn run_one(
    family: &ProblemFamily,
    strategy: ReconstructionStrategy,
    size: usize,
    solver: &SolverConfig,
    norm: ErrorNorm,
) -> Result<RunOutcome> {
    match family {
        ProblemFamily::Diffusion1D {
            regular,
            perturbation,
            seed,
        } => {
            let grid = generate_grid_1d(size, *regular, *perturbation, *seed)?;
            let volumes = grid.volumes().to_vec();
            let problem = Diffusion1DProblem::new(grid, strategy);
            let init: Vec<[f64; 1]> = problem.initial_state().into_iter().map(|u| [u]).collect();
            let exact: Vec<[f64; 1]> = problem.exact_state().into_iter().map(|u| [u]).collect();
            let result = solve_defect_correction(&problem, init, solver).and_then(|sol| {
                let e = l1_with_norm(norm, &sol.state, &exact, &volumes)?;
                Ok((e.to_vec(), sol.iterations()))
            });
            Ok(RunOutcome {
                cells: size,
                result,
            })
        }
        ProblemFamily::NavierStokes3D {
            perturbation,
            seed,
            flow,
        } => {
            let mesh = generate_tet_mesh(size, *perturbation, *seed)?;
            let cells = mesh.num_cells();
            let volumes = mesh.volumes().to_vec();
            let problem = NS3DProblem::new(mesh, strategy, *flow)?;
            let exact = problem.exact_state();
            let result = solve_defect_correction(&problem, problem.initial_state(), solver)
                .and_then(|sol| {
                    let e = l1_with_norm(norm, &sol.state, &exact, &volumes)?;
                    Ok((e.to_vec(), sol.iterations()))
                });
            Ok(RunOutcome { cells, result })
        }
    }
}

/// Runs every (strategy, grid) pair of a study.
///
/// Runs execute in parallel and are collected in study order. A run whose
/// solver fails becomes a failed row; invalid grids or configurations abort
/// the study.
pub fn run_convergence_study(
    family: &ProblemFamily,
    strategies: &[ReconstructionStrategy],
    grids: &[usize],
    solver: &SolverConfig,
    norm: ErrorNorm,
) -> Result<Vec<ConvergenceRecord>> {
    solver.validate()?;
    if strategies.is_empty() || grids.is_empty() {
        return Err(Error::InvalidArgument("empty strategy or grid list".into()));
    }
    let dim = family.dimension();
    let nvars = family.variables().len();
    let jobs: Vec<(usize, usize)> = (0..strategies.len())
        .flat_map(|s| (0..grids.len()).map(move |g| (s, g)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(s, g)| run_one(family, strategies[s], grids[g], solver, norm))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::with_capacity(strategies.len());
    for (s, strategy) in strategies.iter().enumerate() {
        let rows = outcomes[s * grids.len()..(s + 1) * grids.len()]
            .iter()
            .zip(grids)
            .map(|(o, &size)| {
                let (errors, iterations, failed, nonconvergence) = match &o.result {
                    Ok((e, it)) => (e.clone(), *it, None, false),
                    Err(err) => {
                        log::warn!("{strategy} n={size}: {err}");
                        let nc = matches!(
                            err,
                            Error::NonConvergence { .. } | Error::SolverDivergence { .. }
                        );
                        (vec![f64::NAN; nvars], 0, Some(err.to_string()), nc)
                    }
                };
                ConvergenceRow {
                    grid_label: format!("n={size}"),
                    size,
                    cells: o.cells,
                    h_eff: effective_spacing(o.cells, dim),
                    errors,
                    iterations,
                    failed,
                    nonconvergence,
                }
            })
            .collect();
        records.push(ConvergenceRecord::new(
            *strategy,
            dim,
            family.variables(),
            rows,
        ));
    }
    Ok(records)
}

/// Half-width of the accepted order band for 1D studies.
pub const ORDER_BAND_1D: f64 = 0.2;
/// Half-width of the accepted order band for 3D studies.
pub const ORDER_BAND_3D: f64 = 0.3;

/// Expected order of a strategy: 2 when it is exact for linear fields on
/// uniform grids, 1 otherwise.
pub fn nominal_order(strategy: ReconstructionStrategy) -> f64 {
    if strategy.is_centered() {
        2.0
    } else {
        1.0
    }
}

/// Accepted `[lo, hi]` global order for a strategy in a study of `dimension`.
pub fn order_band(dimension: usize, strategy: ReconstructionStrategy) -> (f64, f64) {
    let half = if dimension == 1 {
        ORDER_BAND_1D
    } else {
        ORDER_BAND_3D
    };
    let p = nominal_order(strategy);
    (p - half, p + half)
}

/// Records whose global order of `var` falls outside [`order_band`], one
/// message each. An order that cannot be measured counts as a violation.
pub fn band_violations(records: &[ConvergenceRecord], var: &str) -> Vec<String> {
    let mut out = Vec::new();
    for rec in records {
        let (lo, hi) = order_band(rec.dimension, rec.strategy);
        let order = rec
            .variable_index(var)
            .and_then(|vi| rec.observed_order(vi));
        match order {
            Ok(o) if (lo..=hi).contains(&o.global) => {}
            Ok(o) => out.push(format!(
                "{}: {var} order {:.3} outside [{lo}, {hi}]",
                rec.strategy, o.global
            )),
            Err(e) => out.push(format!("{}: {var} order unavailable ({e})", rec.strategy)),
        }
    }
    out
}

/// One-line human-readable summary of each record's global orders.
pub fn format_order_table(records: &[ConvergenceRecord]) -> String {
    let mut s = String::new();
    for rec in records {
        let _ = write!(s, "{:<18}", rec.strategy.to_string());
        for (vi, var) in rec.variables.iter().enumerate() {
            match rec.observed_order(vi) {
                Ok(o) => {
                    let _ = write!(s, " {var}={:.3}", o.global);
                }
                Err(_) => {
                    let _ = write!(s, " {var}=n/a");
                }
            }
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use ReconstructionStrategy::*;

    #[test]
    fn bands_follow_strategy_and_dimension() {
        assert_eq!(order_band(1, Arithmetic), (1.8, 2.2));
        assert_eq!(order_band(1, OneSidedLeft), (0.8, 1.2));
        assert_eq!(order_band(3, LRAverage), (1.7, 2.3));
        assert_eq!(nominal_order(Weighted(0.5)), 2.0);
        assert_eq!(nominal_order(Weighted(0.75)), 1.0);
    }

    #[test]
    fn band_violations_reports_off_band_orders() {
        let second = |s| {
            let rows = [0.1, 0.05, 0.025].iter().map(|&h| row(h, h * h)).collect();
            ConvergenceRecord::new(s, 1, vec!["u".into()], rows)
        };
        let records = [second(Arithmetic), second(OneSidedRight)];
        let v = band_violations(&records, "u");
        assert_eq!(v.len(), 1);
        assert!(v[0].starts_with("one-sided-right"), "{v:?}");
        assert_eq!(band_violations(&records, "rho").len(), 2);
    }

    fn row(h: f64, e: f64) -> ConvergenceRow {
        ConvergenceRow {
            grid_label: format!("h={h}"),
            size: 0,
            cells: (1.0 / h).round() as usize,
            h_eff: h,
            errors: vec![e],
            iterations: 1,
            failed: None,
            nonconvergence: false,
        }
    }

    fn record(rows: Vec<ConvergenceRow>) -> ConvergenceRecord {
        ConvergenceRecord::new(Arithmetic, 1, vec!["u".into()], rows)
    }

    #[test]
    fn l1_error_examples() {
        let a = [[1.0], [2.0]];
        assert_eq!(l1_error(&a, &a).unwrap(), [0.0]);
        let shifted = [[1.5], [2.5]];
        assert_eq!(l1_error(&shifted, &a).unwrap(), [0.5]);
        let e = l1_error(&[[0.0], [2e-3]], &[[0.0], [0.0]]).unwrap();
        assert!((e[0] - 1e-3).abs() < 1e-18);
        assert!(matches!(
            l1_error(&a, &[[1.0]]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn weighted_norm_uses_volumes() {
        let e = l1_error_weighted(&[[1.0], [0.0]], &[[0.0], [0.0]], &[3.0, 1.0]).unwrap();
        assert!((e[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn pair_order_examples() {
        assert!((pair_order(4e-4, 1e-4, 2.0, 1.0) - 2.0).abs() < 1e-12);
        assert!((pair_order(4e-4, 2e-4, 2.0, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn global_slope_of_exact_power_law() {
        for p in [1.0, 2.0, 2.7] {
            let rows = [0.1, 0.05, 0.03, 0.01]
                .iter()
                .map(|&h: &f64| row(h, 3.0 * h.powf(p)))
                .collect();
            let o = record(rows).observed_order(0).unwrap();
            assert!((o.global - p).abs() < 1e-12);
            for q in o.pair_orders.iter().flatten() {
                assert!((q - p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rows_are_sorted_coarse_to_fine() {
        let r = record(vec![row(0.01, 1e-4), row(0.1, 1e-2), row(0.05, 2.5e-3)]);
        let h: Vec<f64> = r.rows().iter().map(|r| r.h_eff).collect();
        assert_eq!(h, vec![0.1, 0.05, 0.01]);
        assert!(r.observed_order(0).unwrap().pair_orders[0].is_none());
    }

    #[test]
    fn zero_error_is_degenerate() {
        let r = record(vec![row(0.1, 1e-2), row(0.05, 0.0)]);
        assert!(matches!(
            r.observed_order(0),
            Err(Error::DegenerateOrder { row: 1 })
        ));
    }

    #[test]
    fn failed_rows_are_skipped() {
        let mut bad = row(0.05, f64::NAN);
        bad.failed = Some("diverged".into());
        let r = record(vec![row(0.1, 1e-2), bad, row(0.025, 6.25e-4)]);
        let o = r.observed_order(0).unwrap();
        assert!(o.pair_orders[1].is_none());
        assert!((o.pair_orders[2].unwrap() - 2.0).abs() < 1e-12);
        assert!(r.has_failures());
    }

    #[test]
    fn effective_spacing_examples() {
        assert_eq!(effective_spacing(8, 1), 0.125);
        assert!((effective_spacing(2058, 3) - 2058f64.powf(-1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let r = record(vec![row(0.1, 1e-2), row(0.05, 2.5e-3)]);
        let mut buf = Vec::new();
        write_study_csv(&mut buf, "test", &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# test");
        assert_eq!(lines[1], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("arithmetic,h=0.1,10,"));
        assert!(lines[2].ends_with(','));
        assert!(lines[3].ends_with("2.000000"));
    }

    #[test]
    fn small_1d_study_has_expected_shape() {
        let family = ProblemFamily::Diffusion1D {
            regular: false,
            perturbation: 0.3,
            seed: 1,
        };
        let strategies = [Arithmetic, OneSidedRight];
        let recs = run_convergence_study(
            &family,
            &strategies,
            &[7, 11, 15],
            &SolverConfig::default(),
            ErrorNorm::CellMean,
        )
        .unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs
            .iter()
            .all(|r| r.rows().len() == 3 && !r.has_failures()));
        let again = run_convergence_study(
            &family,
            &strategies,
            &[7, 11, 15],
            &SolverConfig::default(),
            ErrorNorm::CellMean,
        )
        .unwrap();
        assert_eq!(recs, again);
    }
}
