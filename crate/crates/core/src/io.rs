//! Matrix and polynomial file readers, plus JSON helpers for non-finite values.

use std::fs;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Matrix file flavours accepted by [`load_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixFormat {
    /// JSON when the first non-blank character is `{`, text otherwise.
    #[default]
    Auto,
    /// `{"n": 2, "rows": [[2, 1], [1, 2]]}`.
    Json,
    /// Whitespace-separated: the order `n`, then `n²` entries row-major.
    Text,
}

pub fn load_matrix(path: impl AsRef<Path>, format: MatrixFormat) -> Result<Matrix> {
    let s = fs::read_to_string(path)?;
    parse_matrix(&s, format)
}

pub fn parse_matrix(s: &str, format: MatrixFormat) -> Result<Matrix> {
    let format = match format {
        MatrixFormat::Auto if s.trim_start().starts_with('{') => MatrixFormat::Json,
        MatrixFormat::Auto => MatrixFormat::Text,
        f => f,
    };
    match format {
        MatrixFormat::Json => serde_json::from_str::<Matrix>(s).map_err(|e| {
            if e.is_data() {
                Error::InvalidMatrix(e.to_string())
            } else {
                Error::Parse {
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                }
            }
        }),
        _ => parse_text_matrix(s),
    }
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokens(s: &str) -> impl Iterator<Item = Token<'_>> {
    s.lines().enumerate().flat_map(|(li, line)| {
        let mut out = Vec::new();
        let mut start = None;
        for (ci, ch) in line.char_indices() {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(ci),
                (true, Some(s0)) => {
                    out.push((s0, ci));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s0) = start {
            out.push((s0, line.len()));
        }
        out.into_iter().map(move |(a, b)| Token {
            text: &line[a..b],
            line: li + 1,
            column: a + 1,
        })
    })
}

fn parse_text_matrix(s: &str) -> Result<Matrix> {
    let mut toks = tokens(s);
    let first = toks.next().ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty input".into(),
    })?;
    let n: usize = first.text.parse().map_err(|_| Error::Parse {
        line: first.line,
        column: first.column,
        message: format!("expected the matrix order, found '{}'", first.text),
    })?;
    let mut data = Vec::with_capacity(n * n);
    for t in toks {
        let v: f64 = t.text.parse().map_err(|_| Error::Parse {
            line: t.line,
            column: t.column,
            message: format!("expected a number, found '{}'", t.text),
        })?;
        data.push(v);
    }
    if data.len() != n * n {
        return Err(Error::InvalidMatrix(format!(
            "order {n} needs {} entries, found {}",
            n * n,
            data.len()
        )));
    }
    Matrix::new(n, data)
}

/// A float that serializes as an integer literal when it is integral and
/// exactly representable, and as a string for non-finite values.
#[derive(Debug, Clone, Copy)]
pub(crate) struct JsonNumber(pub f64);

const EXACT_INT: f64 = 9_007_199_254_740_992.0;

impl Serialize for JsonNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() && v.fract() == 0.0 && v.abs() < EXACT_INT && !(v == 0.0 && v.is_sign_negative()) {
            s.serialize_i64(v as i64)
        } else {
            ext_f64::serialize(&v, s)
        }
    }
}

/// Serde adapter for `f64` that writes `"inf"`, `"-inf"` and `"nan"` as strings.
pub mod ext_f64 {
    use serde::de::{self, Visitor};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    "nan" => Ok(f64::NAN),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }

    /// Owned wrapper for use inside collections.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Value(pub f64);

    impl<'de> Deserialize<'de> for Value {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            deserialize(d).map(Value)
        }
    }

    impl serde::Serialize for Value {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize(&self.0, s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_examples() {
        let a = parse_matrix("2  2 1  1 2", MatrixFormat::Auto).unwrap();
        assert_eq!(a.rows(), vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let b = parse_matrix(r#"{"n":1,"rows":[[5]]}"#, MatrixFormat::Auto).unwrap();
        assert_eq!(b.rows(), vec![vec![5.0]]);
        assert!(matches!(
            parse_matrix("2\n1 2 3", MatrixFormat::Text),
            Err(Error::InvalidMatrix(_))
        ));
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_matrix("2\n1 2\n3 x", MatrixFormat::Text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_matrix("{\"n\": 1, ", MatrixFormat::Json),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_matrix("", MatrixFormat::Text), Err(Error::Parse { .. })));
        assert!(parse_matrix("1 inf", MatrixFormat::Text).is_err());
    }

    #[test]
    fn json_numbers() {
        let s = serde_json::to_string(&[JsonNumber(1.0), JsonNumber(-2.5), JsonNumber(f64::INFINITY)]).unwrap();
        assert_eq!(s, r#"[1,-2.5,"inf"]"#);
    }
}
