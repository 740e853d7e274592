//! Implicit defect-correction iteration for steady discrete equations.
//!
//! Each nonlinear step solves `(D / cfl + J) du = -R(u)` approximately, where
//! `R` is the full (high-order) residual, `J` a low-order approximate
//! Jacobian supplied by the problem and `D / cfl` a pseudo-time term. The
//! linear system is relaxed with a fixed number of symmetric block
//! Gauss-Seidel sweeps. Because the update is driven by the true residual, the
//! converged state does not depend on the Jacobian approximation.

use std::io::Write;

use log::{debug, warn};

pub use crate::error::IterationRecord;
use crate::error::{Error, Result};

/// A dense `B x B` block.
pub type Block<const B: usize> = [[f64; B]; B];

/// Block sparse matrix in compressed-row form.
#[derive(Debug, Clone)]
pub struct BlockCsr<const B: usize> {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    blocks: Vec<Block<B>>,
    diag: Vec<usize>,
}

impl<const B: usize> BlockCsr<B> {
    /// Builds a zero matrix with the given sparsity; every row must list itself.
    pub fn from_pattern(pattern: &[Vec<usize>]) -> Self {
        let mut row_ptr = Vec::with_capacity(pattern.len() + 1);
        let mut cols = Vec::new();
        let mut diag = Vec::with_capacity(pattern.len());
        row_ptr.push(0);
        for (i, row) in pattern.iter().enumerate() {
            let mut row = row.clone();
            row.sort_unstable();
            row.dedup();
            let d = row
                .binary_search(&i)
                .expect("sparsity pattern must include the diagonal");
            diag.push(cols.len() + d);
            cols.extend(row);
            row_ptr.push(cols.len());
        }
        let blocks = vec![[[0.0; B]; B]; cols.len()];
        Self {
            row_ptr,
            cols,
            blocks,
            diag,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.diag.len()
    }

    fn position(&self, row: usize, col: usize) -> usize {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        let offset = self.cols[range.clone()]
            .binary_search(&col)
            .unwrap_or_else(|_| panic!("({row}, {col}) is outside the sparsity pattern"));
        range.start + offset
    }

    /// Adds `scale * block` to entry `(row, col)`.
    pub fn add(&mut self, row: usize, col: usize, scale: f64, block: &Block<B>) {
        let p = self.position(row, col);
        for (dst, src) in self.blocks[p].iter_mut().zip(block) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
    }

    pub fn get(&self, row: usize, col: usize) -> &Block<B> {
        &self.blocks[self.position(row, col)]
    }

    pub fn diagonal(&self, row: usize) -> &Block<B> {
        &self.blocks[self.diag[row]]
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[[f64; B]]) -> Vec<[f64; B]> {
        (0..self.num_rows())
            .map(|i| {
                let mut y = [0.0; B];
                for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                    mat_vec_add(&mut y, &self.blocks[p], &x[self.cols[p]], 1.0);
                }
                y
            })
            .collect()
    }
}

fn mat_vec_add<const B: usize>(y: &mut [f64; B], a: &Block<B>, x: &[f64; B], scale: f64) {
    for (yi, row) in y.iter_mut().zip(a) {
        *yi += scale * row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>();
    }
}

/// Inverts a small dense block by Gauss-Jordan elimination with partial pivoting.
pub fn invert_block<const B: usize>(a: &Block<B>) -> Option<Block<B>> {
    let mut m = *a;
    let mut inv = [[0.0; B]; B];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    for col in 0..B {
        let pivot = (col..B)
            .max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs()))
            .unwrap();
        if !(m[pivot][col].abs() > 1e-14 * scale) {
            return None;
        }
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let d = 1.0 / m[col][col];
        for k in 0..B {
            m[col][k] *= d;
            inv[col][k] *= d;
        }
        for r in 0..B {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for k in 0..B {
                        m[r][k] -= f * m[col][k];
                        inv[r][k] -= f * inv[col][k];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// A steady discrete problem driven by defect correction.
///
/// Unknowns are `B`-component blocks, one per cell. Pinned cells keep their
/// initial values.
pub trait SteadyProblem<const B: usize> {
    fn num_cells(&self) -> usize;

    fn is_pinned(&self, cell: usize) -> bool;

    /// Full discrete residual. Pinned cells must report zero.
    fn residual(&self, state: &[[f64; B]]) -> Result<Vec<[f64; B]>>;

    /// Approximate Jacobian of the residual plus the pseudo-time term for `cfl`.
    fn jacobian(&self, state: &[[f64; B]], cfl: f64) -> Result<BlockCsr<B>>;

    /// Rejects states outside the problem's admissible set. The solver
    /// treats a rejected update like a diverging one and cuts the CFL.
    fn check_state(&self, _state: &[[f64; B]]) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Required reduction of the L1 residual, in orders of magnitude.
    pub target_drop: f64,
    pub max_iterations: usize,
    pub cfl_start: f64,
    pub cfl_max: f64,
    /// Geometric CFL growth per nonlinear iteration.
    pub cfl_growth: f64,
    /// Symmetric Gauss-Seidel sweeps per nonlinear iteration.
    pub linear_sweeps: usize,
    /// Residual level treated as already converged.
    pub absolute_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            target_drop: 8.0,
            max_iterations: 5000,
            cfl_start: 10.0,
            cfl_max: 1e6,
            cfl_growth: 1.5,
            linear_sweeps: 15,
            absolute_tolerance: 1e-15,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_drop > 0.0) {
            return Err(Error::InvalidArgument(
                "target_drop must be positive".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument(
                "max_iterations must be positive".into(),
            ));
        }
        if !(self.cfl_start > 0.0 && self.cfl_max >= self.cfl_start && self.cfl_growth >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "invalid CFL schedule {} -> {} (x{})",
                self.cfl_start, self.cfl_max, self.cfl_growth
            )));
        }
        if self.linear_sweeps == 0 {
            return Err(Error::InvalidArgument(
                "linear_sweeps must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Result of a converged solve.
#[derive(Debug, Clone)]
pub struct Solution<const B: usize> {
    pub state: Vec<[f64; B]>,
    pub history: Vec<IterationRecord>,
}

impl<const B: usize> Solution<B> {
    /// Number of nonlinear updates taken.
    pub fn iterations(&self) -> usize {
        self.history.last().map_or(0, |r| r.iteration)
    }
}

/// Mean absolute residual over unpinned cells, per equation.
pub fn l1_residual<const B: usize, P: SteadyProblem<B> + ?Sized>(
    problem: &P,
    res: &[[f64; B]],
) -> Vec<f64> {
    let mut sum = [0.0; B];
    let mut count = 0usize;
    for (c, r) in res.iter().enumerate() {
        if !problem.is_pinned(c) {
            count += 1;
            for (s, v) in sum.iter_mut().zip(r) {
                *s += v.abs();
            }
        }
    }
    sum.iter().map(|s| s / count.max(1) as f64).collect()
}

fn norm(per_eq: &[f64]) -> f64 {
    per_eq.iter().cloned().fold(0.0, f64::max)
}

/// Symmetric block Gauss-Seidel on `A x = b`, starting from zero; pinned rows stay zero.
pub fn relax<const B: usize>(
    a: &BlockCsr<B>,
    b: &[[f64; B]],
    pinned: &dyn Fn(usize) -> bool,
    sweeps: usize,
) -> Result<Vec<[f64; B]>> {
    let n = a.num_rows();
    let inv: Vec<Option<Block<B>>> = (0..n)
        .map(|i| {
            if pinned(i) {
                None
            } else {
                invert_block(a.diagonal(i))
            }
        })
        .collect();
    for (i, d) in inv.iter().enumerate() {
        if d.is_none() && !pinned(i) {
            return Err(Error::InvalidState(format!(
                "singular diagonal block in row {i}"
            )));
        }
    }
    let mut x = vec![[0.0; B]; n];
    let update = |i: usize, x: &mut [[f64; B]]| {
        if let Some(d) = &inv[i] {
            let mut r = b[i];
            for p in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.cols[p];
                if j != i {
                    mat_vec_add(&mut r, &a.blocks[p], &x[j], -1.0);
                }
            }
            let mut xi = [0.0; B];
            mat_vec_add(&mut xi, d, &r, 1.0);
            x[i] = xi;
        }
    };
    for _ in 0..sweeps {
        for i in 0..n {
            update(i, &mut x);
        }
        for i in (0..n).rev() {
            update(i, &mut x);
        }
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::SolverDivergence { iteration: 0 });
    }
    let ax = a.apply(&x);
    let (mut rb, mut rr) = (0.0f64, 0.0f64);
    for i in (0..n).filter(|&i| !pinned(i)) {
        for k in 0..B {
            rb = rb.max(b[i][k].abs());
            rr = rr.max((b[i][k] - ax[i][k]).abs());
        }
    }
    if rr > 1e3 * rb {
        return Err(Error::SolverDivergence { iteration: 0 });
    }
    Ok(x)
}

// CFL cuts allowed within one nonlinear iteration before giving up.
const MAX_CFL_CUTS: usize = 8;
// An update that multiplies the residual by more than this is rejected.
const MAX_GROWTH: f64 = 10.0;

/// Drives `problem` from `initial` until the L1 residual has dropped by
/// `cfg.target_drop` orders of magnitude.
pub fn solve_defect_correction<const B: usize, P: SteadyProblem<B> + ?Sized>(
    problem: &P,
    initial: Vec<[f64; B]>,
    cfg: &SolverConfig,
) -> Result<Solution<B>> {
    cfg.validate()?;
    let n = problem.num_cells();
    if initial.len() != n {
        return Err(Error::InvalidArgument(format!(
            "initial state has {} cells, problem has {n}",
            initial.len()
        )));
    }
    let pinned = |i: usize| problem.is_pinned(i);
    let mut state = initial;
    let mut res = problem.residual(&state)?;
    let r0 = l1_residual(problem, &res);
    let r0_norm = norm(&r0);
    let mut cfl = cfg.cfl_start;
    let mut history = vec![IterationRecord {
        iteration: 0,
        residual: r0,
        cfl,
    }];
    if r0_norm <= cfg.absolute_tolerance {
        return Ok(Solution { state, history });
    }
    let target = 10f64.powf(-cfg.target_drop);
    let mut best = r0_norm;

    for it in 1..=cfg.max_iterations {
        let rhs: Vec<[f64; B]> = res
            .iter()
            .enumerate()
            .map(|(i, r)| if pinned(i) { [0.0; B] } else { r.map(|v| -v) })
            .collect();

        let current = norm(&history.last().unwrap().residual);
        let mut cuts = 0;
        let (trial, trial_res) = loop {
            let jac = problem.jacobian(&state, cfl)?;
            let outcome = match relax(&jac, &rhs, &pinned, cfg.linear_sweeps) {
                Ok(delta) => {
                    let trial: Vec<[f64; B]> = state
                        .iter()
                        .zip(&delta)
                        .map(|(s, d)| std::array::from_fn(|k| s[k] + d[k]))
                        .collect();
                    problem
                        .check_state(&trial)
                        .and_then(|_| problem.residual(&trial))
                        .map(|r| (trial, r))
                }
                Err(Error::SolverDivergence { .. }) => {
                    Err(Error::SolverDivergence { iteration: it })
                }
                Err(e) => return Err(e),
            };
            match outcome {
                Ok((trial, r))
                    if r.iter().flatten().all(|v| v.is_finite())
                        && norm(&l1_residual(problem, &r)) <= MAX_GROWTH * current =>
                {
                    break (trial, r)
                }
                outcome => {
                    cuts += 1;
                    if cuts > MAX_CFL_CUTS {
                        return Err(match outcome {
                            Err(e) => e,
                            Ok(_) => Error::SolverDivergence { iteration: it },
                        });
                    }
                    debug!("iteration {it}: rejected update, cutting CFL {cfl:e}");
                    cfl = (cfl / 10.0).max(1e-3);
                }
            }
        };
        state = trial;
        res = trial_res;
        let r = l1_residual(problem, &res);
        let r_norm = norm(&r);
        history.push(IterationRecord {
            iteration: it,
            residual: r,
            cfl,
        });
        if !r_norm.is_finite() {
            return Err(Error::SolverDivergence { iteration: it });
        }
        if r_norm <= target * r0_norm || r_norm <= cfg.absolute_tolerance {
            return Ok(Solution { state, history });
        }
        if it > 10 && r_norm > 2.0 * best {
            warn!("iteration {it}: residual {r_norm:e} rose above best {best:e}");
        }
        best = best.min(r_norm);
        cfl = (cfl * cfg.cfl_growth).min(cfg.cfl_max);
    }
    let last = norm(&history.last().unwrap().residual);
    Err(Error::NonConvergence {
        iterations: cfg.max_iterations,
        drop: last / r0_norm,
        history,
    })
}

/// Writes an iteration history as CSV: iteration, one column per equation, CFL.
pub fn write_history_csv<W: Write>(
    mut out: W,
    equations: &[&str],
    history: &[IterationRecord],
) -> std::io::Result<()> {
    write!(out, "iteration")?;
    for e in equations {
        write!(out, ",l1_{e}")?;
    }
    writeln!(out, ",cfl")?;
    for rec in history {
        write!(out, "{}", rec.iteration)?;
        for v in &rec.residual {
            write!(out, ",{v:e}")?;
        }
        writeln!(out, ",{:e}", rec.cfl)?;
    }
    Ok(())
}
