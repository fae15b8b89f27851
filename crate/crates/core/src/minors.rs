//! Principal-minor tables, general minors, and the averaged minor sums `c_j`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::index_set::IndexSet;
use crate::io::{ext_f64, JsonNumber};
use crate::matrix::{det_in_place, Matrix};

/// Largest order for which a full table of `2^n` minors is built.
pub const MAX_TABLE_ORDER: usize = 20;
/// Orders above this log a warning about table size.
pub const WARN_TABLE_ORDER: usize = 16;

/// How principal minors are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinorMode {
    /// Pivoted elimination in `f64`.
    #[default]
    Float,
    /// Exact rational elimination on the binary values of the entries,
    /// rounded to `f64` on output.
    Exact,
}

/// Every principal minor `A[α]`, keyed by mask, with `A[∅] = 1`, plus the
/// averaged sums `c_0, ..., c_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorTable {
    n: usize,
    values: Vec<f64>,
    c: Vec<f64>,
}

impl MinorTable {
    /// Builds a table from values indexed by mask; entry 0 is forced to 1.
    pub fn from_values(n: usize, mut values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_ORDER {
            return Err(Error::OrderTooLarge {
                order: n,
                cap: MAX_TABLE_ORDER,
            });
        }
        if values.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "an order-{n} table needs {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("minor values must be finite".into()));
        }
        values[0] = 1.0;
        let c = sums_by_size(n, &values);
        Ok(MinorTable { n, values, c })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `A[α]`.
    pub fn get(&self, alpha: &IndexSet) -> f64 {
        self.values[alpha.mask() as usize]
    }

    /// Values indexed by mask.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The stored aggregates `c_0, ..., c_n`.
    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Compact JSON in the table file format, keys in ascending mask order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawTable = serde_json::from_str(s)?;
        let table = raw.into_table(true)?;
        Ok(table)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn sums_by_size(n: usize, values: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; n + 1];
    for (mask, v) in values.iter().enumerate() {
        sums[mask.count_ones() as usize] += v;
    }
    sums.iter()
        .enumerate()
        .map(|(j, s)| s / binomial(n, j))
        .collect()
}

/// `c_j = (Σ_{#α=j} A[α]) / C(n, j)` for `j = 0..=n`.
pub fn mean_minor_sums(t: &MinorTable) -> Vec<f64> {
    sums_by_size(t.n, &t.values)
}

/// All `2^n` principal minors of `A`.
pub fn principal_minor_table(a: &Matrix, mode: MinorMode) -> Result<MinorTable> {
    let n = a.order();
    if n > MAX_TABLE_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            cap: MAX_TABLE_ORDER,
        });
    }
    if n > WARN_TABLE_ORDER {
        log::warn!("building a principal-minor table with 2^{n} entries");
    }
    let values: Vec<f64> = match mode {
        MinorMode::Float => (0..1u64 << n)
            .into_par_iter()
            .map_init(Vec::new, |buf, mask| {
                let alpha = IndexSet::from_mask_unchecked(n, mask);
                principal_minor_with(a, &alpha, buf)
            })
            .collect(),
        MinorMode::Exact => {
            let entries: Vec<BigRational> = a
                .as_slice()
                .iter()
                .map(|&v| BigRational::from_float(v).expect("entries are finite"))
                .collect();
            (0..1u64 << n)
                .into_par_iter()
                .map(|mask| {
                    let alpha = IndexSet::from_mask_unchecked(n, mask);
                    exact_principal_minor(&entries, n, &alpha)
                        .to_f64()
                        .unwrap_or(f64::NAN)
                })
                .collect()
        }
    };
    let c = sums_by_size(n, &values);
    Ok(MinorTable { n, values, c })
}

fn principal_minor_with(a: &Matrix, alpha: &IndexSet, buf: &mut Vec<f64>) -> f64 {
    let k = alpha.len();
    buf.clear();
    for i in alpha.positions() {
        for j in alpha.positions() {
            buf.push(a.get(i, j));
        }
    }
    det_in_place(buf, k)
}

/// Exact determinant of `A(α)` by rational Gaussian elimination.
pub(crate) fn exact_principal_minor(entries: &[BigRational], n: usize, alpha: &IndexSet) -> BigRational {
    let idx: Vec<usize> = alpha.positions().collect();
    let k = idx.len();
    let mut m: Vec<BigRational> = idx
        .iter()
        .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
        .map(|(i, j)| entries[i * n + j].clone())
        .collect();
    let mut det = BigRational::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !m[r * k + c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            for j in 0..k {
                m.swap(c * k + j, p * k + j);
            }
            det = -det;
        }
        let piv = m[c * k + c].clone();
        det *= &piv;
        for r in c + 1..k {
            if m[r * k + c].is_zero() {
                continue;
            }
            let f = &m[r * k + c] / &piv;
            for j in c + 1..k {
                let t = &f * &m[c * k + j];
                m[r * k + j] -= t;
            }
        }
    }
    det
}

/// The minor `A[α, β] = det A(α, β)`.
pub fn minor(a: &Matrix, alpha: &IndexSet, beta: &IndexSet) -> Result<f64> {
    let n = a.order();
    for s in [alpha, beta] {
        if s.order() != n {
            return Err(Error::OrderMismatch {
                expected: n,
                found: s.order(),
            });
        }
    }
    if alpha.len() != beta.len() {
        return Err(Error::SizeMismatch {
            left: alpha.len(),
            right: beta.len(),
        });
    }
    let mut buf = a.submatrix_data(alpha, beta);
    Ok(det_in_place(&mut buf, alpha.len()))
}

/// Characteristic polynomial of `A(γ)` from its principal minors, highest
/// degree first: the coefficient of `λ^(k−j)` is `(−1)^j Σ_{β⊆γ, #β=j} A[β]`.
pub fn char_poly_from_table(t: &MinorTable, gamma: &IndexSet) -> Result<Vec<f64>> {
    if gamma.order() != t.n {
        return Err(Error::OrderMismatch {
            expected: t.n,
            found: gamma.order(),
        });
    }
    if gamma.is_empty() {
        return Err(Error::InvalidArgument("gamma must be nonempty".into()));
    }
    let k = gamma.len();
    let mut sums = vec![0.0; k + 1];
    for beta in gamma.subsets() {
        sums[beta.len()] += t.get(&beta);
    }
    Ok(sums
        .iter()
        .enumerate()
        .map(|(j, s)| if j % 2 == 0 { *s } else { -*s })
        .collect())
}

impl Serialize for MinorTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Minors<'a>(&'a [f64]);
        impl Serialize for Minors<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (mask, v) in self.0.iter().enumerate() {
                    map.serialize_entry(&mask.to_string(), &JsonNumber(*v))?;
                }
                map.end()
            }
        }
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("n", &self.n)?;
        map.serialize_entry("minors", &Minors(&self.values))?;
        let c: Vec<JsonNumber> = self.c.iter().map(|v| JsonNumber(*v)).collect();
        map.serialize_entry("c", &c)?;
        map.end()
    }
}

/// Loosely typed table as read from disk.
#[derive(Deserialize)]
pub(crate) struct RawTable {
    n: usize,
    minors: BTreeMap<String, ext_f64::Value>,
    #[serde(default)]
    c: Option<Vec<ext_f64::Value>>,
}

impl RawTable {
    /// Validates keys; with `require_empty` the key "0" must be present and equal 1.
    pub(crate) fn into_table(self, require_empty: bool) -> Result<MinorTable> {
        let n = self.n;
        if n == 0 || n > MAX_TABLE_ORDER {
            return Err(Error::OrderTooLarge {
                order: n,
                cap: MAX_TABLE_ORDER,
            });
        }
        let size = 1usize << n;
        let mut values = vec![f64::NAN; size];
        for (key, v) in &self.minors {
            let mask: usize = key.parse().map_err(|_| {
                Error::InvalidArgument(format!("minor key '{key}' is not a decimal mask"))
            })?;
            if mask >= size {
                return Err(Error::InvalidArgument(format!(
                    "mask {mask} is out of range for order {n}"
                )));
            }
            values[mask] = v.0;
        }
        if require_empty && values[0] != 1.0 {
            return Err(Error::InvalidArgument(
                "the empty minor (key \"0\") must be present and equal to 1".into(),
            ));
        }
        values[0] = 1.0;
        if let Some(mask) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::InvalidArgument(format!("missing minor for mask {mask}")));
        }
        let table = MinorTable::from_values(n, values)?;
        if let Some(c) = self.c {
            let ok = c.len() == n + 1
                && c.iter().zip(table.c()).all(|(a, b)| {
                    (a.0 - b).abs() <= 1e-8 * (1.0 + b.abs())
                });
            if !ok {
                return Err(Error::InvalidArgument(
                    "stored aggregates c disagree with the minors".into(),
                ));
            }
        }
        Ok(table)
    }
}

/// Exact principal minor of a small integer matrix, for cross-checks.
pub fn exact_minor_of_integers(rows: &[Vec<i64>], alpha: &IndexSet) -> BigRational {
    let n = rows.len();
    let entries: Vec<BigRational> = rows
        .iter()
        .flatten()
        .map(|&v| BigRational::from_integer(BigInt::from(v)))
        .collect();
    exact_principal_minor(&entries, n, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn set(n: usize, idx: &[usize]) -> IndexSet {
        IndexSet::from_indices(n, idx).unwrap()
    }

    #[test]
    fn table_examples() {
        let t = principal_minor_table(&Matrix::identity(3), MinorMode::Float).unwrap();
        assert_eq!(t.values().len(), 8);
        assert!(t.values().iter().all(|&v| v == 1.0));

        let t = principal_minor_table(&m(&[&[2.0, 1.0], &[1.0, 2.0]]), MinorMode::Float).unwrap();
        assert_eq!(t.values(), &[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(t.c(), &[1.0, 2.0, 3.0]);

        for n in 1..=6 {
            let t = principal_minor_table(&Matrix::identity(n), MinorMode::Float).unwrap();
            assert_eq!(t.values().len(), 1 << n);
        }
    }

    #[test]
    fn order_cap() {
        let big = Matrix::identity(MAX_TABLE_ORDER + 1);
        assert!(matches!(
            principal_minor_table(&big, MinorMode::Float),
            Err(Error::OrderTooLarge { order: 21, cap: 20 })
        ));
    }

    #[test]
    fn minor_examples() {
        let a = m(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert_eq!(minor(&a, &set(2, &[1]), &set(2, &[2])).unwrap(), 1.0);
        let i3 = Matrix::identity(3);
        assert_eq!(minor(&i3, &set(3, &[1, 2]), &set(3, &[2, 3])).unwrap(), 0.0);
        let b = m(&[&[1.0, 2.0, 0.5], &[-1.0, 3.0, 2.0], &[4.0, 0.0, 1.0]]);
        let full = IndexSet::full(3);
        assert_eq!(minor(&b, &full, &full).unwrap(), crate::matrix::determinant(&b));
        assert!(matches!(
            minor(&b, &set(3, &[1]), &set(3, &[1, 2])),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn mean_sums_of_diagonal_are_elementary_symmetric() {
        let d = [1.5, -2.0, 3.0, 0.5];
        let t = principal_minor_table(&Matrix::diagonal(&d), MinorMode::Float).unwrap();
        // e_j by the product expansion of Π (1 + d_i x)
        let mut e = vec![1.0];
        for &v in &d {
            let mut next = vec![0.0; e.len() + 1];
            for (j, c) in e.iter().enumerate() {
                next[j] += c;
                next[j + 1] += c * v;
            }
            e = next;
        }
        let c = mean_minor_sums(&t);
        for j in 0..=4 {
            assert!((c[j] - e[j] / binomial(4, j)).abs() < 1e-12);
        }
        assert_eq!(c, t.c());
        let id = principal_minor_table(&Matrix::identity(5), MinorMode::Float).unwrap();
        assert!(mean_minor_sums(&id).iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn char_poly_from_table_examples() {
        let t = principal_minor_table(&m(&[&[2.0, 1.0], &[1.0, 2.0]]), MinorMode::Float).unwrap();
        assert_eq!(char_poly_from_table(&t, &IndexSet::full(2)).unwrap(), vec![1.0, -4.0, 3.0]);
        assert_eq!(char_poly_from_table(&t, &set(2, &[1])).unwrap(), vec![1.0, -2.0]);
        let t = principal_minor_table(&Matrix::identity(3), MinorMode::Float).unwrap();
        assert_eq!(
            char_poly_from_table(&t, &IndexSet::full(3)).unwrap(),
            vec![1.0, -3.0, 3.0, -1.0]
        );
        assert!(char_poly_from_table(&t, &IndexSet::empty(3)).is_err());
    }

    #[test]
    fn exact_mode_agrees_on_integers() {
        let rows = vec![vec![3, -1, 2, 0], vec![1, 4, -2, 1], vec![0, 2, 5, -3], vec![2, -1, 1, 6]];
        let a = Matrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&v| v as f64).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let float = principal_minor_table(&a, MinorMode::Float).unwrap();
        let exact = principal_minor_table(&a, MinorMode::Exact).unwrap();
        for alpha in IndexSet::all(4) {
            let e = exact_minor_of_integers(&rows, &alpha);
            assert!(e.is_integer());
            let ev = e.to_f64().unwrap();
            assert_eq!(exact.get(&alpha), ev);
            assert!((float.get(&alpha) - ev).abs() <= 1e-8 * (1.0 + ev.abs()));
        }
    }

    #[test]
    fn json_format() {
        let t = principal_minor_table(&Matrix::identity(2), MinorMode::Float).unwrap();
        assert_eq!(
            t.to_json(),
            r#"{"n":2,"minors":{"0":1,"1":1,"2":1,"3":1},"c":[1,1,1]}"#
        );
        let a = m(&[&[0.5, 1.25, 3.0], &[-1.0, 2.0, 0.1], &[0.3, 0.7, -4.0]]);
        let t = principal_minor_table(&a, MinorMode::Float).unwrap();
        let back = MinorTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back.values(), t.values());
        assert!(MinorTable::from_json(r#"{"n":1,"minors":{"1":2}}"#).is_err());
        assert!(MinorTable::from_json(r#"{"n":1,"minors":{"0":1}}"#).is_err());
        assert!(MinorTable::from_json(r#"{"n":1,"minors":{"0":1,"1":2},"c":[1,3]}"#).is_err());
    }
}
