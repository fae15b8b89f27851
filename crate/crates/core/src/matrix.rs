//! Dense real square matrices and elimination-based kernels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_set::IndexSet;

/// A dense real `n × n` matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

/// On-disk form: `{"n": 2, "rows": [[2, 1], [1, 2]]}`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<MatrixRepr> for Matrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        if r.rows.len() != r.n {
            return Err(Error::InvalidMatrix(format!(
                "declared order {} but found {} rows",
                r.n,
                r.rows.len()
            )));
        }
        Matrix::from_rows(&r.rows)
    }
}

impl From<Matrix> for MatrixRepr {
    fn from(m: Matrix) -> Self {
        MatrixRepr {
            n: m.n,
            rows: m.rows(),
        }
    }
}

impl Matrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMatrix("order must be at least 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "order {n} needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) is not finite",
                pos / n + 1,
                pos % n + 1
            )));
        }
        Ok(Matrix { n, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Matrix::new(n, data)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in d.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Matrix { n, data }
    }

    pub(crate) fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self.get(j, i))
    }

    /// `A + t I`.
    pub fn shifted(&self, t: f64) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] += t;
        }
        m
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.n != other.n {
            return Err(Error::OrderMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(Matrix { n, data: out })
    }

    /// Largest entrywise difference, the max-entry distance.
    pub fn max_entry_distance(&self, other: &Matrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::OrderMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// The submatrix `A(rows, cols)` as a row-major buffer.
    pub fn submatrix_data(&self, rows: &IndexSet, cols: &IndexSet) -> Vec<f64> {
        let mut buf = Vec::with_capacity(rows.len() * cols.len());
        for i in rows.positions() {
            for j in cols.positions() {
                buf.push(self.get(i, j));
            }
        }
        buf
    }

    /// The principal submatrix `A(alpha)`; `None` for the empty set.
    pub fn principal(&self, alpha: &IndexSet) -> Option<Matrix> {
        if alpha.is_empty() {
            return None;
        }
        Some(Matrix {
            n: alpha.len(),
            data: self.submatrix_data(alpha, alpha),
        })
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.n;
        let mut lu = self.data.clone();
        let perm = lu_factor(&mut lu, n)
            .ok_or_else(|| Error::InvalidMatrix("matrix is singular".into()))?;
        let mut inv = vec![0.0; n * n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            col.iter_mut().for_each(|v| *v = 0.0);
            col[j] = 1.0;
            lu_solve(&lu, n, &perm, &mut col);
            for i in 0..n {
                inv[i * n + j] = col[i];
            }
        }
        Matrix::new(n, inv)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.data.chunks(self.n) {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:>12.6}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Determinant of a row-major `k × k` buffer, overwriting it.
///
/// Gaussian elimination with partial pivoting; the empty matrix has determinant 1.
pub fn det_in_place(a: &mut [f64], k: usize) -> f64 {
    match k {
        0 => return 1.0,
        1 => return a[0],
        2 => return a[0] * a[3] - a[1] * a[2],
        _ => {}
    }
    let mut det = 1.0;
    for c in 0..k {
        let mut p = c;
        let mut best = a[c * k + c].abs();
        for r in c + 1..k {
            let v = a[r * k + c].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in c..k {
                a.swap(c * k + j, p * k + j);
            }
            det = -det;
        }
        let piv = a[c * k + c];
        det *= piv;
        for r in c + 1..k {
            let f = a[r * k + c] / piv;
            if f != 0.0 {
                for j in c + 1..k {
                    a[r * k + j] -= f * a[c * k + j];
                }
            }
        }
    }
    det
}

/// `det(A)` by pivoted elimination.
pub fn determinant(a: &Matrix) -> f64 {
    let mut buf = a.data.clone();
    det_in_place(&mut buf, a.n)
}

/// LU factorization with partial pivoting; returns the row permutation or
/// `None` when an exactly zero pivot column is met.
pub(crate) fn lu_factor(a: &mut [f64], n: usize) -> Option<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x * n + c].abs().total_cmp(&a[y * n + c].abs()))
            .unwrap();
        if a[p * n + c] == 0.0 {
            return None;
        }
        if p != c {
            for j in 0..n {
                a.swap(c * n + j, p * n + j);
            }
            perm.swap(c, p);
        }
        let piv = a[c * n + c];
        for r in c + 1..n {
            let f = a[r * n + c] / piv;
            a[r * n + c] = f;
            for j in c + 1..n {
                a[r * n + j] -= f * a[c * n + j];
            }
        }
    }
    Some(perm)
}

pub(crate) fn lu_solve(lu: &[f64], n: usize, perm: &[usize], b: &mut [f64]) {
    let pb: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    b.copy_from_slice(&pb);
    for i in 0..n {
        let mut s = b[i];
        for j in 0..i {
            s -= lu[i * n + j] * b[j];
        }
        b[i] = s;
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= lu[i * n + j] * b[j];
        }
        b[i] = s / lu[i * n + i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&Matrix::identity(3)), 1.0);
        assert_eq!(determinant(&m(&[&[2.0, 1.0], &[1.0, 2.0]])), 3.0);
        assert_eq!(determinant(&m(&[&[1.0, 1.0], &[1.0, 1.0]])), 0.0);
    }

    #[test]
    fn determinant_against_cofactor_expansion() {
        fn cofactor(a: &[f64], k: usize) -> f64 {
            if k == 1 {
                return a[0];
            }
            (0..k)
                .map(|j| {
                    let minor: Vec<f64> = (1..k)
                        .flat_map(|r| (0..k).filter(move |&c| c != j).map(move |c| (r, c)))
                        .map(|(r, c)| a[r * k + c])
                        .collect();
                    let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                    s * a[j] * cofactor(&minor, k - 1)
                })
                .sum()
        }
        let a = m(&[
            &[1.0, -2.0, 3.5, 0.25],
            &[4.0, 0.5, -1.0, 2.0],
            &[-3.0, 1.5, 2.0, -0.75],
            &[0.5, 2.5, -1.25, 1.0],
        ]);
        let d = determinant(&a);
        let c = cofactor(a.as_slice(), 4);
        assert!((d - c).abs() < 1e-12 * c.abs().max(1.0));
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[4.0, 1.0, -2.0], &[0.5, 3.0, 1.0], &[-1.0, 2.0, 5.0]]);
        let p = a.mul(&a.inverse().unwrap()).unwrap();
        assert!(p.max_entry_distance(&Matrix::identity(3)).unwrap() < 1e-14);
        assert!(m(&[&[1.0, 2.0], &[2.0, 4.0]]).inverse().is_err());
    }

    #[test]
    fn rejects_malformed() {
        assert!(Matrix::new(0, vec![]).is_err());
        assert!(Matrix::new(2, vec![1.0; 3]).is_err());
        assert!(Matrix::new(1, vec![f64::NAN]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn json_shape() {
        let a = m(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"n":2,"rows":[[2.0,1.0],[1.0,2.0]]}"#);
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Matrix>(r#"{"n":3,"rows":[[1]]}"#).is_err());
    }
}
