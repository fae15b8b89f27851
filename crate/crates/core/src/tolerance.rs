//! Tolerances and the single comparison helper every certifier goes through.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by all certifiers.
///
/// All three values are dimensionless; callers pass a scale reflecting the
/// magnitude of the quantity being compared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Band around zero inside which a computed value counts as zero.
    pub tol_zero: f64,
    /// Threshold on `|Im λ| / (1 + |λ|)` below which an eigenvalue is real.
    pub tol_real: f64,
    /// Relative slack for comparing two computed quantities.
    pub tol_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_zero: 1e-12,
            tol_real: 1e-9,
            tol_rel: 1e-8,
        }
    }
}

/// Three-way sign of a value relative to a tolerance band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Factor applied to `tol_zero` to decide whether a verdict is marginal.
pub const MARGINAL_FACTOR: f64 = 10.0;

impl Tolerances {
    pub fn new(tol_zero: f64, tol_real: f64, tol_rel: f64) -> Result<Self> {
        let t = Tolerances {
            tol_zero,
            tol_real,
            tol_rel,
        };
        t.validate()?;
        Ok(t)
    }

    /// Named profiles: `default`, `loose` and `tight`.
    pub fn profile(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(Self::default()),
            "loose" => Self::new(1e-9, 1e-7, 1e-6),
            "tight" => Self::new(1e-14, 1e-11, 1e-10),
            other => Err(Error::InvalidArgument(format!(
                "unknown tolerance profile '{other}' (expected default, loose or tight)"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.tol_zero) && ok(self.tol_real) && ok(self.tol_rel)) {
            return Err(Error::InvalidArgument(
                "tolerances must be finite and strictly positive".into(),
            ));
        }
        if self.tol_rel >= 1.0 {
            return Err(Error::InvalidArgument("tol_rel must be below 1".into()));
        }
        Ok(())
    }

    /// Sign of `value` with a zero band of half-width `tol_zero * scale`.
    pub fn sign(&self, value: f64, scale: f64) -> Sign {
        let band = self.tol_zero * scale.abs().max(f64::MIN_POSITIVE);
        if value > band {
            Sign::Positive
        } else if value < -band {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    /// `value >= 0` up to the zero band.
    pub fn nonnegative(&self, value: f64, scale: f64) -> bool {
        self.sign(value, scale) != Sign::Negative
    }

    /// `value > 0` beyond the zero band.
    pub fn positive(&self, value: f64, scale: f64) -> bool {
        self.sign(value, scale) == Sign::Positive
    }

    /// Whether `value` lies within `MARGINAL_FACTOR` zero bands of zero.
    pub fn marginal(&self, value: f64, scale: f64) -> bool {
        value.abs() <= MARGINAL_FACTOR * self.tol_zero * scale.abs()
    }

    /// Relative agreement of two computed quantities.
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.tol_rel * (1.0 + a.abs().max(b.abs()))
    }

    /// Whether an eigenvalue with the given parts counts as real.
    pub fn is_real(&self, re: f64, im: f64) -> bool {
        im.abs() <= self.tol_real * (1.0 + re.hypot(im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let t = Tolerances::default();
        assert_eq!(t.tol_zero, 1e-12);
        assert_eq!(t.tol_real, 1e-9);
        assert_eq!(t.tol_rel, 1e-8);
        t.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Tolerances::new(0.0, 1e-9, 1e-8).is_err());
        assert!(Tolerances::new(1e-12, -1.0, 1e-8).is_err());
        assert!(Tolerances::new(1e-12, 1e-9, 1.0).is_err());
        assert!(Tolerances::new(f64::NAN, 1e-9, 1e-8).is_err());
        assert!(Tolerances::profile("bogus").is_err());
    }

    #[test]
    fn sign_band_scales() {
        let t = Tolerances::default();
        assert_eq!(t.sign(5e-13, 1.0), Sign::Zero);
        assert_eq!(t.sign(5e-12, 1.0), Sign::Positive);
        assert_eq!(t.sign(5e-12, 10.0), Sign::Zero);
        assert_eq!(t.sign(-2e-12, 1.0), Sign::Negative);
        assert!(t.nonnegative(0.0, 1.0));
        assert!(!t.positive(0.0, 1.0));
    }

    #[test]
    fn realness_is_scale_aware() {
        let t = Tolerances::default();
        assert!(t.is_real(1e6, 1e-4));
        assert!(!t.is_real(1.0, 1e-4));
    }
}
