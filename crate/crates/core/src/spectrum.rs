//! Eigenvalues, the minimum real eigenvalue `l(A)`, and characteristic polynomials.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tolerance::Tolerances;

/// Iteration budget per unit of order handed to the QR iteration.
const QR_ITERATIONS_PER_ORDER: usize = 1000;

/// The eigenvalues of a real matrix, sorted by real part then imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<Complex64>,
}

impl Spectrum {
    /// Wraps raw eigenvalues, snapping near-real values onto the axis and
    /// pairing the rest into exact conjugates.
    pub fn from_values(raw: Vec<Complex64>, tol: &Tolerances) -> Spectrum {
        let mut real = Vec::new();
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for z in raw {
            if tol.is_real(z.re, z.im) {
                real.push(Complex64::new(z.re, 0.0));
            } else if z.im > 0.0 {
                upper.push(z);
            } else {
                lower.push(z);
            }
        }
        let mut values = real;
        // pair each upper value with the nearest unmatched conjugate
        let mut used = vec![false; lower.len()];
        for z in upper {
            let best = lower
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .min_by(|a, b| (a.1.conj() - z).norm().total_cmp(&(b.1.conj() - z).norm()));
            match best {
                Some((k, w)) => {
                    used[k] = true;
                    let re = 0.5 * (z.re + w.re);
                    let im = 0.5 * (z.im - w.im);
                    values.push(Complex64::new(re, im));
                    values.push(Complex64::new(re, -im));
                }
                None => values.push(z),
            }
        }
        values.extend(lower.iter().zip(&used).filter(|(_, u)| !**u).map(|(z, _)| *z));
        values.sort_by(cmp_complex);
        Spectrum { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest eigenvalue modulus.
    pub fn radius(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// A real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            ExtendedReal::PosInfinity => None,
        }
    }

    /// As an `f64`, mapping `+∞` to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInfinity => write!(f, "+inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::io::ext_f64::serialize(&self.to_f64(), s)
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = crate::io::ext_f64::deserialize(d)?;
        if v == f64::INFINITY {
            Ok(ExtendedReal::PosInfinity)
        } else if v.is_finite() {
            Ok(ExtendedReal::Finite(v))
        } else {
            Err(serde::de::Error::custom("expected a finite value or +inf"))
        }
    }
}

/// Eigenvalues of `A`.
///
/// Symmetric input goes through the symmetric QR solver; everything else is
/// balanced and reduced to real Schur form.
pub fn eigenvalues(a: &Matrix, tol: &Tolerances) -> Result<Spectrum> {
    let n = a.order();
    let raw = match n {
        1 => vec![Complex64::new(a.get(0, 0), 0.0)],
        2 => eig2(a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1)).to_vec(),
        _ => {
            let max_iter = QR_ITERATIONS_PER_ORDER * n;
            let m = DMatrix::from_row_slice(n, n, a.as_slice());
            if a.is_symmetric() {
                let e = SymmetricEigen::try_new(m, f64::EPSILON, max_iter)
                    .ok_or(Error::ConvergenceFailure { iterations: max_iter })?;
                e.eigenvalues.iter().map(|&v| Complex64::new(v, 0.0)).collect()
            } else {
                let m = balance(m);
                let s = Schur::try_new(m, f64::EPSILON, max_iter)
                    .ok_or(Error::ConvergenceFailure { iterations: max_iter })?;
                s.complex_eigenvalues().iter().copied().collect()
            }
        }
    };
    Ok(Spectrum::from_values(raw, tol))
}

/// Eigenvalues of `[[a, b], [c, d]]` without cancellation in the discriminant.
fn eig2(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 2] {
    let half_tr = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let disc = half_diff * half_diff + b * c;
    if disc >= 0.0 {
        let r = disc.sqrt();
        let big = if half_tr >= 0.0 { half_tr + r } else { half_tr - r };
        let det = a * d - b * c;
        let small = if big != 0.0 { det / big } else { half_tr - r };
        [Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    } else {
        let r = (-disc).sqrt();
        [Complex64::new(half_tr, r), Complex64::new(half_tr, -r)]
    }
}

/// Parlett–Reinsch balancing by powers of two; an exact similarity.
pub(crate) fn balance<T>(mut m: DMatrix<T>) -> DMatrix<T>
where
    T: nalgebra::ComplexField<RealField = f64> + Copy,
{
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].modulus();
                    r += m[(i, j)].modulus();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            let g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                let g = T::from_real(1.0 / f);
                let ff = T::from_real(f);
                for j in 0..n {
                    m[(i, j)] *= g;
                }
                for j in 0..n {
                    m[(j, i)] *= ff;
                }
            }
        }
    }
    m
}

/// `l(A)`: the smallest real eigenvalue, or `+∞` when none is real.
pub fn min_real_eigenvalue(s: &Spectrum, tol: &Tolerances) -> ExtendedReal {
    s.values()
        .iter()
        .filter(|z| tol.is_real(z.re, z.im))
        .map(|z| z.re)
        .min_by(f64::total_cmp)
        .map_or(ExtendedReal::PosInfinity, ExtendedReal::Finite)
}

/// Coefficients of `det(λI − A)`, highest degree first (leading 1).
///
/// Householder reduction to upper Hessenberg form followed by the
/// three-term expansion along the last column.
pub fn char_poly(a: &Matrix) -> Vec<f64> {
    let n = a.order();
    let h = hessenberg(a);
    let at = |i: usize, j: usize| h[i * n + j];
    // polys[k] holds p_k, lowest degree first
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
    for k in 1..=n {
        let prev = &polys[k - 1];
        let mut p = vec![0.0; k + 1];
        for (d, c) in prev.iter().enumerate() {
            p[d + 1] += c;
            p[d] -= at(k - 1, k - 1) * c;
        }
        let mut prod = 1.0;
        for i in (1..k).rev() {
            prod *= at(i, i - 1);
            let coef = at(i - 1, k - 1) * prod;
            if coef != 0.0 {
                for (d, c) in polys[i - 1].iter().enumerate() {
                    p[d] -= coef * c;
                }
            }
        }
        polys.push(p);
    }
    let mut out = polys.pop().unwrap();
    out.reverse();
    out
}

/// Upper Hessenberg form of `A` by Householder reflections, row-major.
fn hessenberg(a: &Matrix) -> Vec<f64> {
    let n = a.order();
    let mut h = a.as_slice().to_vec();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| h[i * n + k].powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if h[(k + 1) * n + k] > 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n];
        for i in k + 1..n {
            v[i] = h[i * n + k];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H <- P H P with P = I - 2 v v^T / (v^T v)
        for j in 0..n {
            let dot: f64 = (k + 1..n).map(|i| v[i] * h[i * n + j]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k + 1..n {
                h[i * n + j] -= f * v[i];
            }
        }
        for i in 0..n {
            let dot: f64 = (k + 1..n).map(|j| h[i * n + j] * v[j]).sum();
            let f = 2.0 * dot / vnorm2;
            for j in k + 1..n {
                h[i * n + j] -= f * v[j];
            }
        }
        for i in k + 2..n {
            h[i * n + k] = 0.0;
        }
    }
    h
}

/// Evaluates a highest-first real polynomial at a complex point.
pub fn eval_poly(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}
