//! Root interlacing of a degree-`m` polynomial `p` and a degree-`(m−1)`
//! polynomial `q`, decided three ways.
//!
//! 1. Directly from the roots of both polynomials.
//! 2. By the Hermite–Biehler criterion: `p` and `q` have real, strictly
//!    interlacing roots exactly when every root of `p + iq` lies strictly on
//!    one side of the real axis.
//! 3. By a Hurwitz test tied to `w(z) = p(iz) + i q(iz)`: a real matrix whose
//!    rows are the coefficient arrays of `p` and `q`, decided by the signs of
//!    its even-order leading principal minors.
//!
//! Interlacing is strict: shared or repeated roots, and roots whose realness
//! cannot be told apart from rounding, give [`Verdict::Undefined`].

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::minors::{char_poly_from_table, exact_principal_minor, MinorTable};
use crate::polynomial::{complex_roots, RealPolynomial};
use crate::report::Verdict;
use crate::tolerance::Tolerances;

/// Width of the ambiguity band, in units of `tol_real`, for root realness
/// and root separation.
pub const AMBIGUITY_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterlaceMethod {
    RootsDirect,
    HermiteBiehler,
    Hurwitz,
}

impl InterlaceMethod {
    pub const ALL: [InterlaceMethod; 3] = [
        InterlaceMethod::RootsDirect,
        InterlaceMethod::HermiteBiehler,
        InterlaceMethod::Hurwitz,
    ];
}

/// Half-plane holding the roots of `p + iq`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InterlaceDetails {
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub p_roots: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub q_roots: Vec<[f64; 2]>,
    /// Roots of `p + iq`.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub combined_roots: Vec<[f64; 2]>,
    /// Signs (+1, −1, 0 for degenerate) of the Hurwitz leading minors, for
    /// the lower then the upper half-plane test, up to the first decisive one.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub minor_signs: Vec<i8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterlaceReport {
    pub verdict: Verdict,
    pub method: InterlaceMethod,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub side: Option<Side>,
    pub details: InterlaceDetails,
}

fn check_degrees(p: &RealPolynomial, q: &RealPolynomial) -> Result<()> {
    if p.degree() == 0 || q.degree() + 1 != p.degree() {
        return Err(Error::DegreeMismatch {
            p: p.degree(),
            q: q.degree(),
        });
    }
    Ok(())
}

fn pairs(z: &[Complex64]) -> Vec<[f64; 2]> {
    z.iter().map(|z| [z.re, z.im]).collect()
}

/// Realness class of one root.
#[derive(PartialEq)]
enum Realness {
    Real,
    Ambiguous,
    NonReal,
}

fn realness(z: &Complex64, tol: &Tolerances) -> Realness {
    let s = 1.0 + z.norm();
    if z.im.abs() <= tol.tol_real * s {
        Realness::Real
    } else if z.im.abs() <= AMBIGUITY_FACTOR * tol.tol_real * s {
        Realness::Ambiguous
    } else {
        Realness::NonReal
    }
}

/// Realness of every root of one polynomial. A `k`-fold root is computed
/// with an error near `eps^(1/k)`, so a non-real root inside a tight cluster
/// of that size is reported as ambiguous.
fn realness_all(roots: &[Complex64], tol: &Tolerances) -> Vec<Realness> {
    let scale = 1.0 + roots.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    roots
        .iter()
        .map(|z| match realness(z, tol) {
            Realness::NonReal => {
                let reach = 4.0 * z.im.abs();
                let k = roots.iter().filter(|w| (*w - z).norm() <= reach).count();
                let spread = 10.0 * scale * (1e2 * f64::EPSILON).powf(1.0 / k as f64);
                if k >= 2 && z.im.abs() <= spread {
                    Realness::Ambiguous
                } else {
                    Realness::NonReal
                }
            }
            r => r,
        })
        .collect()
}

/// Interlacing decided from the roots of `p` and `q`.
pub fn interlace_check_roots(
    p: &RealPolynomial,
    q: &RealPolynomial,
    tol: &Tolerances,
) -> Result<InterlaceReport> {
    check_degrees(p, q)?;
    let pr = p.roots()?;
    let qr = q.roots()?;
    let mut details = InterlaceDetails {
        p_roots: pairs(&pr),
        q_roots: pairs(&qr),
        ..Default::default()
    };
    let report = |verdict, details| InterlaceReport {
        verdict,
        method: InterlaceMethod::RootsDirect,
        side: None,
        details,
    };
    let mut classes = realness_all(&pr, tol);
    classes.extend(realness_all(&qr, tol));
    if classes.contains(&Realness::NonReal) {
        details.note = Some("a root is not real".into());
        return Ok(report(Verdict::Fail, details));
    }
    if classes.contains(&Realness::Ambiguous) {
        details.note = Some("a root is too close to the real axis to classify".into());
        return Ok(report(Verdict::Undefined, details));
    }
    let mut x: Vec<f64> = pr.iter().map(|z| z.re).collect();
    let mut y: Vec<f64> = qr.iter().map(|z| z.re).collect();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let scale = 1.0 + x.iter().chain(&y).fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = AMBIGUITY_FACTOR * tol.tol_real * scale;
    // x_1 < y_1 < x_2 < ... < y_{m-1} < x_m
    let mut merged = Vec::with_capacity(x.len() + y.len());
    for (i, xi) in x.iter().enumerate() {
        merged.push(*xi);
        if let Some(yi) = y.get(i) {
            merged.push(*yi);
        }
    }
    let mut degenerate = false;
    for w in merged.windows(2) {
        let diff = w[1] - w[0];
        if diff < -gap {
            details.note = Some("roots do not alternate".into());
            return Ok(report(Verdict::Fail, details));
        }
        if diff <= gap {
            degenerate = true;
        }
    }
    if degenerate {
        details.note = Some("shared or repeated root: interlacing is not strict".into());
        return Ok(report(Verdict::Undefined, details));
    }
    Ok(report(Verdict::Pass, details))
}

/// Coefficients of `p + iq`, highest degree first.
fn combined(p: &RealPolynomial, q: &RealPolynomial) -> Vec<Complex64> {
    let m = p.degree();
    let mut c: Vec<Complex64> = p.coeffs().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for (k, &v) in q.coeffs().iter().enumerate() {
        c[k + m - q.degree()] += Complex64::new(0.0, v);
    }
    c
}

/// Hermite–Biehler: all roots of `p + iq` strictly on one side of the axis.
pub fn hermite_biehler_same_side(
    p: &RealPolynomial,
    q: &RealPolynomial,
    tol: &Tolerances,
) -> Result<InterlaceReport> {
    check_degrees(p, q)?;
    let roots = complex_roots(&combined(p, q))?;
    let mut details = InterlaceDetails {
        combined_roots: pairs(&roots),
        ..Default::default()
    };
    let (mut upper, mut lower, mut on_axis) = (false, false, false);
    for z in &roots {
        if realness(z, tol) != Realness::NonReal {
            on_axis = true;
        } else if z.im > 0.0 {
            upper = true;
        } else {
            lower = true;
        }
    }
    let (verdict, side) = match (upper, lower, on_axis) {
        (true, true, _) => (Verdict::Fail, Some(Side::Mixed)),
        (_, _, true) => {
            details.note = Some("a root of p + iq lies on the real axis".into());
            (Verdict::Undefined, None)
        }
        (true, false, false) => (Verdict::Pass, Some(Side::Upper)),
        (false, true, false) => (Verdict::Pass, Some(Side::Lower)),
        (false, false, false) => unreachable!("degree is at least one"),
    };
    Ok(InterlaceReport {
        verdict,
        method: InterlaceMethod::HermiteBiehler,
        side,
        details,
    })
}

/// Coefficients of `w(z) = p(iz) + i q(iz)`, highest degree first.
pub fn hurwitz_polynomial(p: &RealPolynomial, q: &RealPolynomial) -> Vec<Complex64> {
    let i_pow = |k: usize| match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    combined(p, q)
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let power = p.degree() - k;
            // the p part carries i^power, the q part i^(power+1)
            let pr = Complex64::new(c.re, 0.0) * i_pow(power);
            let qr = Complex64::new(c.im, 0.0) * i_pow(power + 1);
            pr + qr
        })
        .collect()
}

/// Real `2m × 2m` Hurwitz-type matrix of the pair. Row `2k` holds the
/// coefficients of `p` and row `2k+1` those of `q` (padded to `m + 1` with a
/// leading zero), both starting at column `k`. Up to signs fixed by the
/// parity of the power of `i`, these rows are the real and imaginary parts
/// of the coefficient array of `w`.
pub fn hurwitz_matrix(p: &[f64], q: &[f64]) -> Vec<f64> {
    let m = p.len() - 1;
    let size = 2 * m;
    let mut padded = vec![0.0; m + 1 - q.len()];
    padded.extend_from_slice(q);
    let mut h = vec![0.0; size * size];
    for k in 0..m {
        for (j, (&a, &b)) in p.iter().zip(&padded).enumerate() {
            if k + j < size {
                h[2 * k * size + k + j] = a;
                h[(2 * k + 1) * size + k + j] = b;
            }
        }
    }
    h
}

/// Interlacing decided from the signs of the even-order leading principal
/// minors of the Hurwitz-type matrix built from `p` and `q`: all positive
/// exactly when the roots are real, simple and strictly interlacing, in which
/// case every root of `p + iq` lies below the real axis. The minors are
/// evaluated exactly from the binary coefficients, so only an exactly
/// vanishing minor is degenerate.
pub fn hurwitz_interlace(
    p: &RealPolynomial,
    q: &RealPolynomial,
    _tol: &Tolerances,
) -> Result<InterlaceReport> {
    check_degrees(p, q)?;
    let h = hurwitz_matrix(p.coeffs(), q.coeffs());
    let size = 2 * p.degree();
    let exact: Vec<BigRational> = h
        .iter()
        .map(|&v| BigRational::from_float(v).expect("coefficients are finite"))
        .collect();
    let mut details = InterlaceDetails::default();
    let mut verdict = Verdict::Pass;
    for k in (2..=size).step_by(2) {
        let d = exact_principal_minor(&exact, size, &IndexSet::leading(size, k));
        if d.is_zero() {
            details.minor_signs.push(0);
            details.note = Some("a Hurwitz leading minor vanishes".into());
            verdict = Verdict::Undefined;
            break;
        }
        if d.is_negative() {
            details.minor_signs.push(-1);
            verdict = Verdict::Fail;
            break;
        }
        details.minor_signs.push(1);
    }
    let side = match verdict {
        Verdict::Pass => Some(Side::Lower),
        Verdict::Fail => Some(Side::Mixed),
        Verdict::Undefined => None,
    };
    Ok(InterlaceReport {
        verdict,
        method: InterlaceMethod::Hurwitz,
        side,
        details,
    })
}

pub fn interlace(
    p: &RealPolynomial,
    q: &RealPolynomial,
    method: InterlaceMethod,
    tol: &Tolerances,
) -> Result<InterlaceReport> {
    match method {
        InterlaceMethod::RootsDirect => interlace_check_roots(p, q, tol),
        InterlaceMethod::HermiteBiehler => hermite_biehler_same_side(p, q, tol),
        InterlaceMethod::Hurwitz => hurwitz_interlace(p, q, tol),
    }
}

/// For `j = 1..n−1`, whether the eigenvalues of the leading `j × j` block
/// interlace those of the leading `(j+1) × (j+1)` block, with both
/// characteristic polynomials assembled from the minor table.
pub fn leading_submatrix_interlacing(
    t: &MinorTable,
    tol: &Tolerances,
) -> Result<Vec<InterlaceReport>> {
    let n = t.order();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "leading-block interlacing needs order at least 2".into(),
        ));
    }
    (1..n)
        .map(|j| {
            let q = RealPolynomial::new(char_poly_from_table(t, &IndexSet::leading(n, j))?)?;
            let p = RealPolynomial::new(char_poly_from_table(t, &IndexSet::leading(n, j + 1))?)?;
            interlace_check_roots(&p, &q, tol)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::minors::{principal_minor_table, MinorMode};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn poly(roots: &[f64]) -> RealPolynomial {
        RealPolynomial::from_roots(roots)
    }

    fn all_methods(p: &RealPolynomial, q: &RealPolynomial) -> Vec<Verdict> {
        InterlaceMethod::ALL
            .iter()
            .map(|&m| interlace(p, q, m, &tol()).unwrap().verdict)
            .collect()
    }

    #[test]
    fn interlacing_pair() {
        let (p, q) = (poly(&[1.0, 3.0]), poly(&[2.0]));
        assert_eq!(all_methods(&p, &q), vec![Verdict::Pass; 3]);
        let hb = hermite_biehler_same_side(&p, &q, &tol()).unwrap();
        let hw = hurwitz_interlace(&p, &q, &tol()).unwrap();
        assert_eq!(hb.side, hw.side);
    }

    #[test]
    fn non_interlacing_pair() {
        let (p, q) = (poly(&[1.0, 2.0]), poly(&[5.0]));
        assert_eq!(all_methods(&p, &q), vec![Verdict::Fail; 3]);
        assert_eq!(
            hermite_biehler_same_side(&p, &q, &tol()).unwrap().side,
            Some(Side::Mixed)
        );
    }

    #[test]
    fn complex_roots_fail() {
        let p = RealPolynomial::new(vec![1.0, 0.0, 1.0]).unwrap();
        let q = RealPolynomial::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(interlace_check_roots(&p, &q, &tol()).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            RealPolynomial::new(vec![0.0]),
            Err(Error::ZeroPolynomial)
        ));
        let p = poly(&[1.0, 2.0]);
        assert!(matches!(
            interlace_check_roots(&p, &poly(&[1.0, 2.0]), &tol()),
            Err(Error::DegreeMismatch { .. })
        ));
        // repeated root with a partner sitting on it
        let p = poly(&[2.0, 2.0]);
        let q = poly(&[2.0]);
        assert_eq!(all_methods(&p, &q), vec![Verdict::Undefined; 3]);
        // shared simple root
        let p = poly(&[1.0, 3.0]);
        let q = poly(&[1.0]);
        assert_eq!(all_methods(&p, &q), vec![Verdict::Undefined; 3]);
    }

    #[test]
    fn scaling_never_changes_verdicts() {
        let p = RealPolynomial::new(vec![3.0, -12.0, 9.0]).unwrap();
        let q = RealPolynomial::new(vec![0.5, -1.0]).unwrap();
        assert_eq!(all_methods(&p, &q), vec![Verdict::Pass; 3]);
    }

    #[test]
    fn hurwitz_matrix_layout() {
        let h = hurwitz_matrix(&[1.0, 2.0, 3.0], &[4.0, 5.0]);
        #[rustfmt::skip]
        let expected = vec![
            1.0, 2.0, 3.0, 0.0,
            0.0, 4.0, 5.0, 0.0,
            0.0, 1.0, 2.0, 3.0,
            0.0, 0.0, 4.0, 5.0,
        ];
        assert_eq!(h, expected);
    }

    #[test]
    fn hurwitz_polynomial_maps_roots() {
        let (p, q) = (poly(&[1.0, 3.0]), poly(&[2.0]));
        let w = hurwitz_polynomial(&p, &q);
        let f_roots = complex_roots(&combined(&p, &q)).unwrap();
        for x in f_roots {
            let z = Complex64::new(0.0, -1.0) * x;
            let v = w.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn leading_blocks() {
        let t = principal_minor_table(
            &Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap(),
            MinorMode::Float,
        )
        .unwrap();
        let r = leading_submatrix_interlacing(&t, &tol()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].verdict, Verdict::Pass);

        let t = principal_minor_table(&Matrix::identity(3), MinorMode::Float).unwrap();
        let r = leading_submatrix_interlacing(&t, &tol()).unwrap();
        assert!(r.iter().all(|r| r.verdict == Verdict::Undefined));

        let t = principal_minor_table(&Matrix::diagonal(&[1.0, 2.0, 3.0]), MinorMode::Float).unwrap();
        let r = leading_submatrix_interlacing(&t, &tol()).unwrap();
        assert!(r.iter().all(|r| r.verdict == Verdict::Undefined));
    }
}
