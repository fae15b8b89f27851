//! Certifiers and randomized searches for the P, GKK, ω and τ matrix classes.
//!
//! The crate decides membership of a real square matrix in the P,
//! (strict) GKK, sign-symmetric, ω, τ and M classes, evaluates positive
//! stability, the Varga cone condition, the generalized Hadamard–Fischer
//! inequalities and Newton's inequalities on the averaged principal-minor
//! sums, checks root interlacing three independent ways, fits matrices to
//! prescribed principal minors, and runs seeded extremal searches inside the
//! classes.
//!
//! ```
//! use gkk_tau::{classify, Matrix, Tolerances, Verdict};
//!
//! let a = Matrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap();
//! let report = classify(&a, &Tolerances::default()).unwrap();
//! assert_eq!(report.labels.tau, Verdict::Pass);
//! assert_eq!(report.labels.m, Verdict::Pass);
//! ```

pub mod assignment;
pub mod classes;
pub mod classify;
pub mod error;
pub mod index_set;
pub mod interlacing;
pub mod io;
pub mod matrix;
pub mod minors;
pub mod polynomial;
pub mod report;
pub mod rng;
pub mod search;
pub mod spectrum;
pub mod tolerance;

pub use assignment::{
    assignment_residual, fit_matrix_to_minors, hf_feasibility, residual_gradient,
    AssignmentResult, FitConfig, TargetMinorTable,
};
pub use classes::{
    dispersal_sign_check, hadamard_fischer_check, m_matrix_check, newton_check, omega_tau_check,
    p_matrix_check, stability_check, varga_cone_check, OmegaProfile,
};
pub use classify::{classify, Classification, Labels};
pub use error::{Error, Result};
pub use index_set::{dispersal, pairs_with_dispersal, DispersalMode, DispersalPair, IndexSet};
pub use interlacing::{
    hermite_biehler_same_side, hurwitz_interlace, interlace, interlace_check_roots,
    leading_submatrix_interlacing, InterlaceMethod, InterlaceReport, Side,
};
pub use io::{load_matrix, parse_matrix, MatrixFormat};
pub use matrix::{determinant, Matrix};
pub use minors::{
    char_poly_from_table, mean_minor_sums, minor, principal_minor_table, MinorMode, MinorTable,
};
pub use polynomial::RealPolynomial;
pub use report::{ClassReport, Verdict, Witness};
pub use search::{
    approximate_by_strict_gkk, dispersal_profile, extremal_search, random_matrix_in_class,
    MatrixClass, Objective, SearchConfig, SearchResult,
};
pub use spectrum::{char_poly, eigenvalues, min_real_eigenvalue, ExtendedReal, Spectrum};
pub use tolerance::Tolerances;

/// The guide chapters, compiled as doc-tests so their snippets stay current.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/minors.md")]
    mod minors {}
    #[doc = include_str!("../../../book/src/classes.md")]
    mod classes {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/newton.md")]
    mod newton {}
    #[doc = include_str!("../../../book/src/interlacing.md")]
    mod interlacing {}
    #[doc = include_str!("../../../book/src/assignment.md")]
    mod assignment {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
}
