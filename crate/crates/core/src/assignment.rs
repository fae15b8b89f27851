//! Fitting a matrix to prescribed principal minors.
//!
//! The residual is the vector `(A[α] − p_α)` over every nonempty `α`. The
//! derivative of `A[α]` with respect to `a_ij` is the signed cofactor of
//! `(i, j)` inside `A(α)` when both indices lie in `α`, and zero otherwise.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::classes::hadamard_fischer_check;
use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::matrix::{det_in_place, Matrix};
use crate::minors::{principal_minor_table, MinorMode, MinorTable, RawTable};
use crate::report::ClassReport;
use crate::rng::{normal, stream};
use crate::tolerance::Tolerances;

/// Largest order accepted by [`fit_matrix_to_minors`].
pub const MAX_FIT_ORDER: usize = 6;

/// Target values `p_α` for every nonempty `α`, with `p_∅ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMinorTable {
    table: MinorTable,
}

impl TargetMinorTable {
    /// Targets indexed by mask; entry 0 is ignored and set to 1.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        Ok(TargetMinorTable {
            table: MinorTable::from_values(n, values)?,
        })
    }

    /// Targets given as `(α, p_α)` pairs covering every nonempty subset once.
    pub fn from_pairs(n: usize, pairs: &[(IndexSet, f64)]) -> Result<Self> {
        let size = 1usize.checked_shl(n as u32).unwrap_or(0);
        let mut values = vec![f64::NAN; size.max(1)];
        for (alpha, v) in pairs {
            if alpha.order() != n || alpha.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "target set {alpha} does not index a nonempty minor of order {n}"
                )));
            }
            values[alpha.mask() as usize] = *v;
        }
        values[0] = 1.0;
        if let Some(mask) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::InvalidArgument(format!("missing target for mask {mask}")));
        }
        Self::from_values(n, values)
    }

    pub fn from_table(table: MinorTable) -> Self {
        TargetMinorTable { table }
    }

    /// Reads the table file format; the key "0" may be omitted.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawTable = serde_json::from_str(s)?;
        Ok(TargetMinorTable {
            table: raw.into_table(false)?,
        })
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn get(&self, alpha: &IndexSet) -> f64 {
        self.table.get(alpha)
    }

    pub fn values(&self) -> &[f64] {
        self.table.values()
    }

    pub fn as_table(&self) -> &MinorTable {
        &self.table
    }

    /// `10^-8 (1 + max|p_α|)`.
    pub fn tol_fit(&self) -> f64 {
        let m = self.values()[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        1e-8 * (1.0 + m)
    }
}

impl Serialize for TargetMinorTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.table.serialize(s)
    }
}

/// Hadamard–Fischer inequalities evaluated on the targets themselves.
///
/// A failure rules out every GKK matrix with these minors. Nonpositive
/// targets are noted, since they already rule out P-matrices.
pub fn hf_feasibility(t: &TargetMinorTable, tol: &Tolerances) -> Result<ClassReport> {
    let report = hadamard_fischer_check(&t.table, tol)?;
    let n = t.order();
    match (1..t.values().len()).find(|&m| t.values()[m] <= 0.0) {
        Some(mask) => {
            let set = IndexSet::from_mask_unchecked(n, mask as u64);
            Ok(report.with_note(format!(
                "target for {set} is not positive, so no P-matrix attains these minors"
            )))
        }
        None => Ok(report),
    }
}

fn check_order(a: &Matrix, t: &TargetMinorTable) -> Result<()> {
    if a.order() != t.order() {
        return Err(Error::OrderMismatch {
            expected: t.order(),
            found: a.order(),
        });
    }
    Ok(())
}

/// Root-sum-square of `A[α] − p_α` over every nonempty `α`.
pub fn assignment_residual(a: &Matrix, t: &TargetMinorTable) -> Result<f64> {
    check_order(a, t)?;
    let table = principal_minor_table(a, MinorMode::Float)?;
    Ok(table.values()[1..]
        .iter()
        .zip(&t.values()[1..])
        .map(|(x, p)| (x - p).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Residual vector and its Jacobian with respect to the row-major entries.
fn residual_and_jacobian(a: &[f64], n: usize, targets: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = targets.len() - 1;
    let cols = n * n;
    let mut r = vec![0.0; m];
    let mut jac = vec![0.0; m * cols];
    let mut buf = Vec::with_capacity(n * n);
    for mask in 1..=m as u64 {
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let k = idx.len();
        buf.clear();
        for &i in &idx {
            for &j in &idx {
                buf.push(a[i * n + j]);
            }
        }
        let row = mask as usize - 1;
        r[row] = det_in_place(&mut buf.clone(), k) - targets[mask as usize];
        for (p, &i) in idx.iter().enumerate() {
            for (q, &j) in idx.iter().enumerate() {
                let mut sub = Vec::with_capacity((k - 1) * (k - 1));
                for (pp, &ii) in idx.iter().enumerate() {
                    if pp == p {
                        continue;
                    }
                    for (qq, &jj) in idx.iter().enumerate() {
                        if qq != q {
                            sub.push(a[ii * n + jj]);
                        }
                    }
                }
                let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                jac[row * cols + i * n + j] = sign * det_in_place(&mut sub, k - 1);
            }
        }
    }
    (r, jac)
}

/// Gradient of `½ Σ (A[α] − p_α)²`, laid out like the matrix.
pub fn residual_gradient(a: &Matrix, t: &TargetMinorTable) -> Result<Matrix> {
    check_order(a, t)?;
    let n = a.order();
    let (r, jac) = residual_and_jacobian(a.as_slice(), n, t.values());
    let cols = n * n;
    let g: Vec<f64> = (0..cols)
        .map(|c| r.iter().enumerate().map(|(row, ri)| ri * jac[row * cols + c]).sum())
        .collect();
    Matrix::new(n, g)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitConfig {
    pub starts: usize,
    pub seed: u64,
    /// Levenberg–Marquardt iterations per start.
    pub max_iterations: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            starts: 16,
            seed: 0,
            max_iterations: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssignmentResult {
    pub matrix: Matrix,
    pub residual: f64,
    pub converged: bool,
    /// Starts run up to and including the first converged one.
    pub starts_used: usize,
    pub tol_fit: f64,
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Damped least squares from one start; returns the final entries and residual.
fn levenberg_marquardt(
    start: Vec<f64>,
    n: usize,
    targets: &[f64],
    tol_fit: f64,
    max_iterations: usize,
) -> (Vec<f64>, f64) {
    let cols = n * n;
    let mut x = start;
    let (mut r, mut jac) = residual_and_jacobian(&x, n, targets);
    let mut cost = sum_sq(&r);
    let mut lambda = 1e-3;
    for _ in 0..max_iterations {
        if cost.sqrt() <= tol_fit {
            break;
        }
        let j = DMatrix::from_row_slice(r.len(), cols, &jac);
        let jtj = j.transpose() * &j;
        let g = j.transpose() * DVector::from_column_slice(&r);
        let mut improved = false;
        while lambda < 1e12 {
            let mut damped = jtj.clone();
            for c in 0..cols {
                damped[(c, c)] += lambda * (1.0 + jtj[(c, c)]);
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&g);
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, s)| xi - s).collect();
            if trial.iter().any(|v| !v.is_finite()) {
                lambda *= 10.0;
                continue;
            }
            let (tr, tj) = residual_and_jacobian(&trial, n, targets);
            let tc = sum_sq(&tr);
            if tc < cost {
                x = trial;
                r = tr;
                jac = tj;
                cost = tc;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (x, cost.sqrt())
}

fn start_point(t: &TargetMinorTable, index: usize, seed: u64) -> Vec<f64> {
    let n = t.order();
    let mut rng = stream(seed, index as u64);
    let singles: Vec<f64> = (0..n).map(|i| t.values()[1 << i]).collect();
    let scale = singles.iter().map(|v| v.abs()).sum::<f64>() / n as f64 + 1e-3;
    let spread = if index == 0 { 0.1 } else { 0.5 };
    let mut x = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let base = if i == j { singles[i] } else { 0.0 };
            x[i * n + j] = base + spread * scale * normal(&mut rng);
        }
    }
    x
}

/// Multi-start Levenberg–Marquardt fit of all `n²` entries to the targets.
///
/// Starts are perturbed diagonal matrices carrying the singleton targets.
/// The result comes from the lowest-indexed start that converges, or from
/// the best start when none does, independently of the thread count.
pub fn fit_matrix_to_minors(t: &TargetMinorTable, cfg: &FitConfig) -> Result<AssignmentResult> {
    let n = t.order();
    if n > MAX_FIT_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            cap: MAX_FIT_ORDER,
        });
    }
    if cfg.starts == 0 {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let tol_fit = t.tol_fit();
    let chunk = rayon::current_num_threads().max(1);
    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    for first in (0..cfg.starts).step_by(chunk) {
        let last = (first + chunk).min(cfg.starts);
        let runs: Vec<(usize, Vec<f64>, f64)> = (first..last)
            .into_par_iter()
            .map(|i| {
                let (x, res) = levenberg_marquardt(
                    start_point(t, i, cfg.seed),
                    n,
                    t.values(),
                    tol_fit,
                    cfg.max_iterations,
                );
                (i, x, res)
            })
            .collect();
        if let Some((i, x, res)) = runs.iter().find(|r| r.2 <= tol_fit) {
            return finish(n, x.clone(), *res, true, i + 1, tol_fit);
        }
        for run in runs {
            if best.as_ref().is_none_or(|b| run.2 < b.2) {
                best = Some(run);
            }
        }
    }
    let (_, x, res) = best.expect("at least one start ran");
    finish(n, x, res, false, cfg.starts, tol_fit)
}

fn finish(
    n: usize,
    x: Vec<f64>,
    residual: f64,
    converged: bool,
    starts_used: usize,
    tol_fit: f64,
) -> Result<AssignmentResult> {
    Ok(AssignmentResult {
        matrix: Matrix::new(n, x)?,
        residual,
        converged,
        starts_used,
        tol_fit,
    })
}
