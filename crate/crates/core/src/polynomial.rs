//! Real polynomials and companion-matrix root finding.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::balance;

const ROOT_ITERATIONS_PER_DEGREE: usize = 1000;

/// A nonzero real polynomial, highest degree first, normalized monic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

/// File form: `{"coeffs": [highest, ..., lowest]}`.
#[derive(Serialize, Deserialize)]
struct PolyRepr {
    coeffs: Vec<f64>,
}

impl TryFrom<PolyRepr> for RealPolynomial {
    type Error = Error;

    fn try_from(r: PolyRepr) -> Result<Self> {
        RealPolynomial::new(r.coeffs)
    }
}

impl From<RealPolynomial> for PolyRepr {
    fn from(p: RealPolynomial) -> Self {
        PolyRepr { coeffs: p.coeffs }
    }
}

impl RealPolynomial {
    /// Strips leading zeros and divides by the leading coefficient.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        let start = coeffs.iter().position(|&c| c != 0.0).ok_or(Error::ZeroPolynomial)?;
        let lead = coeffs[start];
        Ok(RealPolynomial {
            coeffs: coeffs[start..].iter().map(|c| c / lead).collect(),
        })
    }

    /// `Π (x − r)`.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = c.clone();
            next.push(0.0);
            for (k, v) in c.iter().enumerate() {
                next[k + 1] -= r * v;
            }
            c = next;
        }
        RealPolynomial { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        crate::spectrum::eval_poly(&self.coeffs, z)
    }

    /// All complex roots, from the eigenvalues of the balanced companion matrix.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let c: Vec<Complex64> = self.coeffs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        complex_roots(&c)
    }
}

/// Roots of a complex polynomial given highest degree first with a nonzero
/// leading coefficient.
pub fn complex_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let start = coeffs
        .iter()
        .position(|c| *c != Complex64::new(0.0, 0.0))
        .ok_or(Error::ZeroPolynomial)?;
    let c = &coeffs[start..];
    let deg = c.len() - 1;
    match deg {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-c[1] / c[0]]),
        _ => {}
    }
    let lead = c[0];
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    for j in 0..deg {
        m[(0, j)] = -c[j + 1] / lead;
    }
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let all_real = c.iter().all(|z| z.im == 0.0);
    let max_iter = ROOT_ITERATIONS_PER_DEGREE * deg;
    if all_real {
        let real = balance(m.map(|z| z.re));
        let s = Schur::try_new(real, f64::EPSILON, max_iter)
            .ok_or(Error::ConvergenceFailure { iterations: max_iter })?;
        Ok(s.complex_eigenvalues().iter().copied().collect())
    } else {
        let s = Schur::try_new(balance(m), f64::EPSILON, max_iter)
            .ok_or(Error::ConvergenceFailure { iterations: max_iter })?;
        let ev = s
            .eigenvalues()
            .ok_or(Error::ConvergenceFailure { iterations: max_iter })?;
        Ok(ev.iter().copied().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_on_ingestion() {
        let p = RealPolynomial::new(vec![0.0, 2.0, -4.0, 6.0]).unwrap();
        assert_eq!(p.coeffs(), &[1.0, -2.0, 3.0]);
        assert_eq!(p.degree(), 2);
        assert!(matches!(RealPolynomial::new(vec![0.0, 0.0]), Err(Error::ZeroPolynomial)));
        assert!(RealPolynomial::new(vec![]).is_err());
    }

    #[test]
    fn roots_of_products() {
        let p = RealPolynomial::from_roots(&[1.0, 3.0, -2.0]);
        assert_eq!(p.coeffs(), &[1.0, -2.0, -5.0, 6.0]);
        let mut r: Vec<f64> = p.roots().unwrap().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (a, b) in r.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_coefficient_roots() {
        // z^2 + (-4 + i) z + (3 - 2i) = (z - 1)(z - 3) + i (z - 2)
        let c = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-4.0, 1.0),
            Complex64::new(3.0, -2.0),
        ];
        let roots = complex_roots(&c).unwrap();
        for z in &roots {
            let v = (z * z) + c[1] * z + c[2];
            assert!(v.norm() < 1e-12);
            assert!(z.im < 0.0);
        }
    }

    #[test]
    fn json_round_trip() {
        let p: RealPolynomial = serde_json::from_str(r#"{"coeffs":[2,-2]}"#).unwrap();
        assert_eq!(p.coeffs(), &[1.0, -1.0]);
        assert!(serde_json::from_str::<RealPolynomial>(r#"{"coeffs":[0]}"#).is_err());
    }
}
