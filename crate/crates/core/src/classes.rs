//! Certifiers for the matrix classes and inequalities.
//!
//! Each certifier returns a [`ClassReport`] whose margin is the raw slack of
//! the binding condition; see [`crate::report`] for how verdicts are decided.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_set::{count_pairs, pairs_in_range, IndexSet};
use crate::matrix::{det_in_place, Matrix};
use crate::minors::MinorTable;
use crate::report::{ClassReport, Strictness, Tightest, Verdict, Witness};
use crate::spectrum::{eigenvalues, min_real_eigenvalue, ExtendedReal, Spectrum};
use crate::tolerance::Tolerances;

/// Upper bound on the number of minor pairs a single check may enumerate.
pub const PAIR_LIMIT: f64 = 1e8;
/// Largest order for which `l` is computed on every principal submatrix.
pub const MAX_OMEGA_ORDER: usize = 16;

/// P-matrix test: every nonempty principal minor exceeds `tol_zero`.
pub fn p_matrix_check(t: &MinorTable, tol: &Tolerances) -> ClassReport {
    let n = t.order();
    let mut tight = Tightest::new();
    for alpha in IndexSet::all(n).skip(1) {
        tight.offer(t.get(&alpha), 1.0, || alpha);
    }
    tight.finish(tol, Strictness::Positive)
}

/// Evaluates `A[α,β]·A[β,α]` over every unordered pair with dispersal in
/// `1..=d`.
///
/// With `d = 1` this is weak sign symmetry (the GKK product condition); with
/// `d = n` it is full sign symmetry. In strict mode every product must be
/// positive beyond the zero band, which is how strict GKK is certified. A
/// size-`k` product is compared on the scale `(1 + max|a_ij|)^(2k)`.
pub fn dispersal_sign_check(
    a: &Matrix,
    d: usize,
    strict: bool,
    tol: &Tolerances,
) -> Result<ClassReport> {
    let n = a.order();
    if d < 1 || d > n {
        return Err(Error::InvalidArgument(format!(
            "dispersal bound {d} outside 1..={n}"
        )));
    }
    let estimated = count_pairs(n, 1, d);
    if estimated > PAIR_LIMIT {
        return Err(Error::InfeasibleEnumeration {
            estimated,
            limit: PAIR_LIMIT,
        });
    }
    let base = 1.0 + a.max_abs();
    let mut tight = Tightest::new();
    let mut buf = Vec::with_capacity(n * n);
    for pair in pairs_in_range(n, 1, d) {
        let k = pair.alpha.len();
        let product = minor_into(a, &pair.alpha, &pair.beta, &mut buf)
            * minor_into(a, &pair.beta, &pair.alpha, &mut buf);
        tight.offer(product, base.powi(2 * k as i32), || pair);
    }
    let mode = if strict {
        Strictness::Positive
    } else {
        Strictness::NonNegative
    };
    Ok(tight.finish(tol, mode))
}

pub(crate) fn minor_into(a: &Matrix, rows: &IndexSet, cols: &IndexSet, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    for i in rows.positions() {
        for j in cols.positions() {
            buf.push(a.get(i, j));
        }
    }
    det_in_place(buf, rows.len())
}

/// `l` on every principal submatrix, with the ω and τ verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaProfile {
    /// `l(A(α))` indexed by mask; entry 0 (the empty set) is `+∞` and unused.
    pub l_values: Vec<ExtendedReal>,
    pub omega: ClassReport,
    pub tau: ClassReport,
}

impl OmegaProfile {
    pub fn l(&self, alpha: &IndexSet) -> ExtendedReal {
        self.l_values[alpha.mask() as usize]
    }
}

/// Eigenvalue monotonicity (ω) and its nonnegative variant (τ).
///
/// ω requires `l` to be finite on every nonempty principal submatrix and
/// `l(α) ≤ l(α∖{i})` for every covering pair; τ adds `l(A) ≥ 0`.
pub fn omega_tau_check(a: &Matrix, tol: &Tolerances) -> Result<OmegaProfile> {
    let n = a.order();
    if n > MAX_OMEGA_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            cap: MAX_OMEGA_ORDER,
        });
    }
    let mut l_values: Vec<ExtendedReal> = (1..1u64 << n)
        .into_par_iter()
        .map(|mask| {
            let alpha = IndexSet::from_mask_unchecked(n, mask);
            let sub = a.principal(&alpha).expect("nonempty");
            eigenvalues(&sub, tol).map(|s| min_real_eigenvalue(&s, tol))
        })
        .collect::<Result<_>>()?;
    l_values.insert(0, ExtendedReal::PosInfinity);
    let scale = 1.0 + a.max_abs();
    let (omega, tau) = omega_tau_from_l(n, &l_values, scale, tol);
    Ok(OmegaProfile {
        l_values,
        omega,
        tau,
    })
}

pub(crate) fn omega_tau_from_l(
    n: usize,
    l: &[ExtendedReal],
    scale: f64,
    tol: &Tolerances,
) -> (ClassReport, ClassReport) {
    if let Some(mask) = (1..l.len()).find(|&m| !l[m].is_finite()) {
        let set = IndexSet::from_mask_unchecked(n, mask as u64);
        let r = ClassReport {
            verdict: Verdict::Fail,
            margin: f64::NEG_INFINITY,
            witness: Some(Witness::Subset { set }),
            checked_count: mask,
            marginal: false,
            note: Some(format!("no real eigenvalue on {set}")),
        };
        return (r.clone(), r);
    }
    let mut tight = Tightest::new();
    for mask in 1..l.len() as u64 {
        if mask.count_ones() < 2 {
            continue;
        }
        let larger = IndexSet::from_mask_unchecked(n, mask);
        let l_big = l[mask as usize].to_f64();
        for p in larger.positions() {
            let smaller = larger.without(p);
            let slack = l[smaller.mask() as usize].to_f64() - l_big;
            tight.offer(slack, scale, || Witness::Chain { larger, smaller });
        }
    }
    let omega = tight.finish(tol, Strictness::NonNegative);
    if !omega.passed() {
        return (omega.clone(), omega);
    }
    let full = IndexSet::full(n);
    let mut nonneg = Tightest::new();
    nonneg.offer(l[full.mask() as usize].to_f64(), scale, || Witness::Subset { set: full });
    let tau = omega.clone().and(nonneg.finish(tol, Strictness::NonNegative));
    (omega, tau)
}

/// Positive stability: every eigenvalue has real part beyond the zero band.
pub fn stability_check(s: &Spectrum, tol: &Tolerances) -> ClassReport {
    let scale = s.radius().max(1.0);
    let mut tight = Tightest::new();
    for z in s.values() {
        tight.offer(z.re, scale, || *z);
    }
    tight.finish(tol, Strictness::Positive)
}

/// The cone condition `|arg(λ − l)| ≤ π/2 − π/n` for every eigenvalue.
///
/// Undefined when `l = +∞`. An eigenvalue equal to `l` lies inside the cone.
/// The margin is the smallest angular slack in radians.
pub fn varga_cone_check(s: &Spectrum, l: ExtendedReal, n: usize, tol: &Tolerances) -> ClassReport {
    let Some(l) = l.finite() else {
        return ClassReport::undefined("no real eigenvalue, the cone has no apex");
    };
    if n == 0 {
        return ClassReport::undefined("order must be positive");
    }
    let bound = PI / 2.0 - PI / n as f64;
    let scale = s.radius().max(1.0);
    let mut tight = Tightest::new();
    let mut at_apex = 0;
    for z in s.values() {
        let shifted = *z - l;
        if tol.sign(shifted.norm(), scale) == crate::tolerance::Sign::Zero {
            at_apex += 1;
            continue;
        }
        tight.offer(bound - shifted.arg().abs(), 1.0, || *z);
    }
    let mut r = tight.finish(tol, Strictness::NonNegative);
    r.checked_count += at_apex;
    r
}

/// Generalized Hadamard–Fischer: `A[α]A[β] ≥ A[α∪β]A[α∩β]` over all
/// incomparable pairs (nested pairs hold with equality and are skipped).
pub fn hadamard_fischer_check(t: &MinorTable, tol: &Tolerances) -> Result<ClassReport> {
    let n = t.order();
    let size = 1u64 << n;
    let estimated = (size as f64).powi(2) / 2.0;
    if estimated > PAIR_LIMIT {
        return Err(Error::InfeasibleEnumeration {
            estimated,
            limit: PAIR_LIMIT,
        });
    }
    let v = t.values();
    let mut tight = Tightest::new();
    for a in 1..size {
        for b in a + 1..size {
            let meet = a & b;
            if meet == a || meet == b {
                continue;
            }
            let lhs = v[a as usize] * v[b as usize];
            let rhs = v[(a | b) as usize] * v[meet as usize];
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            tight.offer(lhs - rhs, scale, || Witness::SetPair {
                alpha: IndexSet::from_mask_unchecked(n, a),
                beta: IndexSet::from_mask_unchecked(n, b),
            });
        }
    }
    Ok(tight.finish(tol, Strictness::NonNegative))
}

/// Newton's inequalities `c_j² ≥ c_{j−1} c_{j+1}` for `j = 1..n−1`.
pub fn newton_check(c: &[f64], tol: &Tolerances) -> ClassReport {
    if c.first().is_none_or(|c0| (c0 - 1.0).abs() > tol.tol_rel) {
        return ClassReport::undefined("the sequence must start with c_0 = 1");
    }
    let mut tight = Tightest::new();
    for j in 1..c.len().saturating_sub(1) {
        let sq = c[j] * c[j];
        let cross = c[j - 1] * c[j + 1];
        let scale = sq.max(cross.abs()).max(1.0);
        tight.offer(sq - cross, scale, || Witness::Index { j });
    }
    tight.finish(tol, Strictness::NonNegative)
}

/// Nonsingular M-matrix: nonpositive off-diagonal entries and a P-matrix.
pub fn m_matrix_check(a: &Matrix, t: &MinorTable, tol: &Tolerances) -> ClassReport {
    let n = a.order();
    let mut tight = Tightest::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                tight.offer(-a.get(i, j), 1.0, || Witness::Entry {
                    row: i + 1,
                    col: j + 1,
                });
            }
        }
    }
    tight
        .finish(tol, Strictness::NonNegative)
        .and(p_matrix_check(t, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minors::{principal_minor_table, MinorMode};
    use num_complex::Complex64;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn table(a: &Matrix) -> MinorTable {
        principal_minor_table(a, MinorMode::Float).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn set(n: usize, idx: &[usize]) -> IndexSet {
        IndexSet::from_indices(n, idx).unwrap()
    }

    fn spectrum(vals: &[(f64, f64)]) -> Spectrum {
        Spectrum::from_values(vals.iter().map(|&(r, i)| Complex64::new(r, i)).collect(), &tol())
    }

    #[test]
    fn p_matrix_examples() {
        let r = p_matrix_check(&table(&m(&[&[2.0, 1.0], &[1.0, 2.0]])), &tol());
        assert!(r.passed());
        assert_eq!(r.margin, 2.0);
        let r = p_matrix_check(&table(&Matrix::identity(3)), &tol());
        assert!(r.passed() && r.margin == 1.0);
        let r = p_matrix_check(&table(&m(&[&[0.0, 1.0], &[0.0, 0.0]])), &tol());
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witness, Some(Witness::Subset { set: set(2, &[1]) }));
    }

    #[test]
    fn dispersal_sign_examples() {
        let r = dispersal_sign_check(&m(&[&[2.0, 1.0], &[1.0, 2.0]]), 1, false, &tol()).unwrap();
        assert!(r.passed());
        assert_eq!(r.margin, 1.0);
        assert_eq!(
            r.witness,
            Some(Witness::Pair { alpha: set(2, &[1]), beta: set(2, &[2]), d: 1 })
        );
        let r = dispersal_sign_check(&m(&[&[1.0, -2.0], &[2.0, 1.0]]), 1, false, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.margin, -4.0);
        assert_eq!(
            r.witness,
            Some(Witness::Pair { alpha: set(2, &[1]), beta: set(2, &[2]), d: 1 })
        );
        let r = dispersal_sign_check(&Matrix::identity(3), 1, true, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.margin, 0.0);
        assert!(dispersal_sign_check(&Matrix::identity(3), 0, false, &tol()).is_err());
        assert!(dispersal_sign_check(&Matrix::identity(3), 4, false, &tol()).is_err());
    }

    #[test]
    fn dispersal_guard_trips() {
        let big = Matrix::identity(20);
        assert!(matches!(
            dispersal_sign_check(&big, 20, false, &tol()),
            Err(Error::InfeasibleEnumeration { .. })
        ));
    }

    #[test]
    fn omega_tau_examples() {
        let p = omega_tau_check(&m(&[&[2.0, 1.0], &[1.0, 2.0]]), &tol()).unwrap();
        assert!(p.omega.passed() && p.tau.passed());
        assert_eq!(p.l(&set(2, &[1])), ExtendedReal::Finite(2.0));
        assert_eq!(p.l(&set(2, &[2])), ExtendedReal::Finite(2.0));
        let l12 = p.l(&set(2, &[1, 2])).finite().unwrap();
        assert!((l12 - 1.0).abs() < 1e-14);

        let p = omega_tau_check(&m(&[&[1.0, -2.0], &[2.0, 1.0]]), &tol()).unwrap();
        assert_eq!(p.omega.verdict, Verdict::Fail);
        assert_eq!(p.l(&set(2, &[1, 2])), ExtendedReal::PosInfinity);
        assert_eq!(p.omega.witness, Some(Witness::Subset { set: set(2, &[1, 2]) }));

        let p = omega_tau_check(&Matrix::identity(4), &tol()).unwrap();
        assert!(p.omega.passed() && p.tau.passed());
        assert!(p.l_values[1..].iter().all(|l| *l == ExtendedReal::Finite(1.0)));
    }

    #[test]
    fn tau_needs_nonnegative_l() {
        let p = omega_tau_check(&m(&[&[2.0, 3.0], &[3.0, 2.0]]), &tol()).unwrap();
        assert!(p.omega.passed());
        assert_eq!(p.tau.verdict, Verdict::Fail);
        assert!(p.tau.margin < 0.0);
        assert!(omega_tau_check(&Matrix::identity(17), &tol()).is_err());
    }

    #[test]
    fn stability_examples() {
        let r = stability_check(&spectrum(&[(1.0, 0.0), (3.0, 0.0)]), &tol());
        assert!(r.passed() && r.margin == 1.0);
        let r = stability_check(&spectrum(&[(0.0, 1.0), (0.0, -1.0)]), &tol());
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.margin, 0.0);
        let r = stability_check(&spectrum(&[(1.0, 0.0); 3]), &tol());
        assert!(r.passed() && r.margin == 1.0);
    }

    #[test]
    fn varga_examples() {
        let s = spectrum(&[(1.0, 0.0), (3.0, 0.0)]);
        let r = varga_cone_check(&s, ExtendedReal::Finite(1.0), 2, &tol());
        assert!(r.passed());
        assert_eq!(r.margin, 0.0);
        let s = spectrum(&[(0.0, 1.0), (0.0, -1.0)]);
        let r = varga_cone_check(&s, ExtendedReal::PosInfinity, 2, &tol());
        assert_eq!(r.verdict, Verdict::Undefined);
        // n = 3: cone half-angle π/6; 1 ± 0.5i around l = 0.5 sits at π/4
        let s = spectrum(&[(0.5, 0.0), (1.0, 0.5), (1.0, -0.5)]);
        let r = varga_cone_check(&s, ExtendedReal::Finite(0.5), 3, &tol());
        assert_eq!(r.verdict, Verdict::Fail);
        assert!((r.margin - (PI / 6.0 - PI / 4.0)).abs() < 1e-14);
    }

    #[test]
    fn hadamard_fischer_examples() {
        let r = hadamard_fischer_check(&table(&m(&[&[2.0, 1.0], &[1.0, 2.0]])), &tol()).unwrap();
        assert!(r.passed() && r.margin == 1.0);
        let r = hadamard_fischer_check(&table(&m(&[&[1.0, -3.0], &[1.0, 1.0]])), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.margin, -3.0);
        let r = hadamard_fischer_check(&table(&Matrix::identity(3)), &tol()).unwrap();
        assert!(r.passed() && r.margin == 0.0);
    }

    #[test]
    fn newton_examples() {
        let r = newton_check(&[1.0; 5], &tol());
        assert!(r.passed() && r.margin == 0.0);
        let r = newton_check(&[1.0, 2.0, 3.0], &tol());
        assert!(r.passed() && r.margin == 1.0);
        assert_eq!(r.witness, Some(Witness::Index { j: 1 }));
        let r = newton_check(&[1.0, 1.0, 2.0], &tol());
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(newton_check(&[2.0, 1.0], &tol()).verdict, Verdict::Undefined);
    }

    #[test]
    fn m_matrix_examples() {
        let a = m(&[&[2.0, -1.0], &[-1.0, 2.0]]);
        assert!(m_matrix_check(&a, &table(&a), &tol()).passed());
        let b = m(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let r = m_matrix_check(&b, &table(&b), &tol());
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witness, Some(Witness::Entry { row: 1, col: 2 }));
        let i = Matrix::identity(3);
        assert!(m_matrix_check(&i, &table(&i), &tol()).passed());
    }
}
