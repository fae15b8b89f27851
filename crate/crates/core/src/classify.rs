//! The composite classification of one matrix.

use serde::{Deserialize, Serialize};

use crate::classes::{
    dispersal_sign_check, hadamard_fischer_check, m_matrix_check, newton_check, omega_tau_check,
    p_matrix_check, stability_check, varga_cone_check, OmegaProfile,
};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::minors::{principal_minor_table, MinorMode, MinorTable};
use crate::report::{ClassReport, Verdict};
use crate::spectrum::{eigenvalues, min_real_eigenvalue, ExtendedReal, Spectrum};
use crate::tolerance::Tolerances;

pub const CLASSIFY_SCHEMA: &str = "gkk-tau/classify/v1";

/// How strict GKK slack is normalized; echoed in every report.
pub const STRICT_GKK_NORMALIZATION: &str =
    "size-k almost-principal product must exceed tol_zero * (1 + max|a_ij|)^(2k)";

/// One report per certifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reports {
    pub p: ClassReport,
    /// Weak sign symmetry on a P-matrix.
    pub gkk: ClassReport,
    pub strict_gkk: ClassReport,
    /// The product condition at every dispersal (P not required).
    pub sign_symmetric: ClassReport,
    pub omega: ClassReport,
    pub tau: ClassReport,
    pub gkk_tau: ClassReport,
    pub m: ClassReport,
    pub stable: ClassReport,
    pub varga: ClassReport,
    pub hf: ClassReport,
    pub newton: ClassReport,
}

/// Verdict summary, one field per class or inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    pub p: Verdict,
    pub gkk: Verdict,
    pub strict_gkk: Verdict,
    pub sign_symmetric: Verdict,
    pub omega: Verdict,
    pub tau: Verdict,
    pub gkk_tau: Verdict,
    pub m: Verdict,
    pub stable: Verdict,
    pub varga: Verdict,
    pub hf: Verdict,
    pub newton: Verdict,
}

impl Labels {
    /// `(name, verdict)` pairs in a fixed order.
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, Verdict)> {
        [
            ("p", self.p),
            ("gkk", self.gkk),
            ("strict_gkk", self.strict_gkk),
            ("sign_symmetric", self.sign_symmetric),
            ("omega", self.omega),
            ("tau", self.tau),
            ("gkk_tau", self.gkk_tau),
            ("m", self.m),
            ("stable", self.stable),
            ("varga", self.varga),
            ("hf", self.hf),
            ("newton", self.newton),
        ]
        .into_iter()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub schema: &'static str,
    pub n: usize,
    pub matrix: Matrix,
    pub spectrum: Spectrum,
    pub l: ExtendedReal,
    pub table: MinorTable,
    pub omega_profile: OmegaProfile,
    pub labels: Labels,
    pub reports: Reports,
    pub strict_gkk_normalization: &'static str,
}

/// Runs every certifier on `a`.
pub fn classify(a: &Matrix, tol: &Tolerances) -> Result<Classification> {
    let n = a.order();
    let table = principal_minor_table(a, MinorMode::Float)?;
    let spectrum = eigenvalues(a, tol)?;
    let l = min_real_eigenvalue(&spectrum, tol);
    let omega_profile = omega_tau_check(a, tol)?;

    let p = p_matrix_check(&table, tol);
    let d1 = dispersal_sign_check(a, 1, false, tol)?;
    let d1_strict = dispersal_sign_check(a, 1, true, tol)?;
    let sign_symmetric = dispersal_sign_check(a, n, false, tol)?;
    let gkk = p.clone().and(d1);
    let strict_gkk = p.clone().and(d1_strict);
    let omega = omega_profile.omega.clone();
    let tau = omega_profile.tau.clone();
    let gkk_tau = gkk.clone().and(tau.clone());
    let reports = Reports {
        m: m_matrix_check(a, &table, tol),
        stable: stability_check(&spectrum, tol),
        varga: varga_cone_check(&spectrum, l, n, tol),
        hf: hadamard_fischer_check(&table, tol)?,
        newton: newton_check(table.c(), tol),
        p,
        gkk,
        strict_gkk,
        sign_symmetric,
        omega,
        tau,
        gkk_tau,
    };
    let labels = Labels {
        p: reports.p.verdict,
        gkk: reports.gkk.verdict,
        strict_gkk: reports.strict_gkk.verdict,
        sign_symmetric: reports.sign_symmetric.verdict,
        omega: reports.omega.verdict,
        tau: reports.tau.verdict,
        gkk_tau: reports.gkk_tau.verdict,
        m: reports.m.verdict,
        stable: reports.stable.verdict,
        varga: reports.varga.verdict,
        hf: reports.hf.verdict,
        newton: reports.newton.verdict,
    };
    Ok(Classification {
        schema: CLASSIFY_SCHEMA,
        n,
        matrix: a.clone(),
        spectrum,
        l,
        table,
        omega_profile,
        labels,
        reports,
        strict_gkk_normalization: STRICT_GKK_NORMALIZATION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Verdict::{Fail, Pass};

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn positive_symmetric_two_by_two() {
        let c = classify(&m(&[&[2.0, 1.0], &[1.0, 2.0]]), &Tolerances::default()).unwrap();
        let l = c.labels;
        for v in [l.p, l.gkk, l.strict_gkk, l.sign_symmetric, l.omega, l.tau, l.gkk_tau, l.stable, l.varga, l.hf, l.newton] {
            assert_eq!(v, Pass);
        }
        assert_eq!(l.m, Fail);
    }

    #[test]
    fn m_matrix_passes_everything() {
        let c = classify(&m(&[&[2.0, -1.0], &[-1.0, 2.0]]), &Tolerances::default()).unwrap();
        assert!(c.labels.iter().all(|(_, v)| v == Pass), "{:?}", c.labels);
    }

    #[test]
    fn rotation_like_matrix() {
        let c = classify(&m(&[&[1.0, -2.0], &[2.0, 1.0]]), &Tolerances::default()).unwrap();
        assert_eq!(c.labels.p, Pass);
        assert_eq!(c.labels.gkk, Fail);
        assert_eq!(c.labels.omega, Fail);
        assert_eq!(c.labels.stable, Pass);
        assert_eq!(c.labels.varga, Verdict::Undefined);
    }

    #[test]
    fn report_serializes_deterministically() {
        let a = m(&[&[3.0, 1.0, -0.5], &[0.5, 2.0, 1.0], &[-0.25, 1.0, 4.0]]);
        let tol = Tolerances::default();
        let s1 = serde_json::to_string(&classify(&a, &tol).unwrap()).unwrap();
        let s2 = serde_json::to_string(&classify(&a, &tol).unwrap()).unwrap();
        assert_eq!(s1, s2);
        let v: serde_json::Value = serde_json::from_str(&s1).unwrap();
        assert_eq!(v["schema"], CLASSIFY_SCHEMA);
        assert!(v["reports"]["gkk"]["verdict"].is_string());
    }
}
