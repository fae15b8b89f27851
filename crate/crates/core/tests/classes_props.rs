mod common;

use gkk_tau::{
    classify, dispersal_sign_check, eigenvalues, hadamard_fischer_check, leading_submatrix_interlacing,
    min_real_eigenvalue, newton_check, omega_tau_check, p_matrix_check, principal_minor_table,
    stability_check, varga_cone_check, ExtendedReal, Matrix, MinorMode, Tolerances, Verdict,
};
use proptest::prelude::*;

/// A random matrix made diagonally dominant on a random subset of rows, so a
/// fair share are P-matrices and off-diagonal signs vary freely.
fn mostly_p() -> impl Strategy<Value = Matrix> {
    (2usize..=7)
        .prop_flat_map(|n| (common::matrix(n, -1.0, 1.0), proptest::collection::vec(0.0f64..1.5, n)))
        .prop_map(|(a, extra)| {
            let n = a.order();
            let mut v = a.as_slice().to_vec();
            for i in 0..n {
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| a.get(i, j).abs()).sum();
                v[i * n + i] = off * extra[i] + 0.05;
            }
            Matrix::new(n, v).unwrap()
        })
}

fn near_zero(m: f64, tol: &Tolerances) -> bool {
    m.abs() < 10.0 * tol.tol_zero
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn weak_sign_symmetry_matches_hadamard_fischer_on_p_matrices(a in mostly_p()) {
        let tol = Tolerances::default();
        let t = principal_minor_table(&a, MinorMode::Float).unwrap();
        let p = p_matrix_check(&t, &tol);
        prop_assume!(p.verdict == Verdict::Pass && !p.marginal);
        let d1 = dispersal_sign_check(&a, 1, false, &tol).unwrap();
        let hf = hadamard_fischer_check(&t, &tol).unwrap();
        prop_assume!(!near_zero(d1.margin, &tol) && !near_zero(hf.margin, &tol));
        prop_assert_eq!(d1.verdict, hf.verdict, "{} {:?} {:?}", a, d1, hf);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dispersal_verdicts_are_monotone(a in common::any_matrix(6)) {
        let tol = Tolerances::default();
        let n = a.order();
        let v: Vec<Verdict> = (1..=n).map(|d| dispersal_sign_check(&a, d, false, &tol).unwrap().verdict).collect();
        for d in 0..n {
            if v[d] == Verdict::Pass {
                prop_assert!(v[..d].iter().all(|&x| x == Verdict::Pass), "{v:?}");
            }
        }
    }

    #[test]
    fn positive_definite_matrices_pass_the_core_classes(a in common::positive_definite(6)) {
        let l = classify(&a, &Tolerances::default()).unwrap().labels;
        for (name, v) in [("p", l.p), ("gkk", l.gkk), ("omega", l.omega), ("tau", l.tau), ("stable", l.stable), ("hf", l.hf)] {
            prop_assert_eq!(v, Verdict::Pass, "{} on {}", name, a);
        }
    }

    #[test]
    fn m_matrices_pass_gkk_tau_and_stability(a in common::m_matrix(6)) {
        let l = classify(&a, &Tolerances::default()).unwrap().labels;
        prop_assert_eq!(l.m, Verdict::Pass);
        prop_assert_eq!(l.gkk, Verdict::Pass);
        prop_assert_eq!(l.tau, Verdict::Pass);
        prop_assert_eq!(l.stable, Verdict::Pass);
    }

    #[test]
    fn symmetric_matrices_satisfy_newton(a in common::symmetric(7)) {
        let t = principal_minor_table(&a, MinorMode::Float).unwrap();
        prop_assert_eq!(newton_check(t.c(), &Tolerances::default()).verdict, Verdict::Pass);
    }

    #[test]
    fn varga_with_positive_l_implies_stability(a in common::any_matrix(6), t in 0.0f64..4.0) {
        let tol = Tolerances::default();
        let b = a.shifted(t);
        let s = eigenvalues(&b, &tol).unwrap();
        let l = min_real_eigenvalue(&s, &tol);
        prop_assume!(b.order() >= 2 && matches!(l, ExtendedReal::Finite(x) if x > 0.0));
        if varga_cone_check(&s, l, b.order(), &tol).verdict == Verdict::Pass {
            prop_assert_eq!(stability_check(&s, &tol).verdict, Verdict::Pass);
        }
    }

    #[test]
    fn tau_survives_nonnegative_shifts(a in common::m_matrix(5), b in common::any_matrix(5), t in 0.0f64..3.0) {
        let tol = Tolerances::default();
        for m in [a, b] {
            if omega_tau_check(&m, &tol).unwrap().tau.verdict == Verdict::Pass {
                prop_assert_eq!(omega_tau_check(&m.shifted(t), &tol).unwrap().tau.verdict, Verdict::Pass);
            }
        }
    }

    #[test]
    fn leading_blocks_of_symmetric_matrices_interlace(a in common::symmetric(6)) {
        prop_assume!(a.order() >= 2);
        let tol = Tolerances::default();
        let s = eigenvalues(&a, &tol).unwrap();
        let mut re: Vec<f64> = s.values().iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        prop_assume!(re.windows(2).all(|w| w[1] - w[0] > 1e-3));
        let t = principal_minor_table(&a, MinorMode::Float).unwrap();
        for r in leading_submatrix_interlacing(&t, &tol).unwrap() {
            // generic instances interlace strictly; ties with a leading block are undefined
            prop_assert_ne!(r.verdict, Verdict::Fail);
        }
    }
}

#[test]
fn cross_check_sample_covers_both_verdicts() {
    let tol = Tolerances::default();
    let (mut pass, mut fail, mut skipped) = (0, 0, 0);
    for k in 0..1000u64 {
        let mut rng = gkk_tau::rng::stream(2024, k);
        let n = 2 + (k % 6) as usize;
        let mut v: Vec<f64> = (0..n * n).map(|_| gkk_tau::rng::uniform(&mut rng, -1.0, 1.0)).collect();
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| v[i * n + j].abs()).sum();
            v[i * n + i] = off * gkk_tau::rng::uniform(&mut rng, 0.5, 1.5) + 0.05;
        }
        let a = Matrix::new(n, v).unwrap();
        let t = principal_minor_table(&a, MinorMode::Float).unwrap();
        let p = p_matrix_check(&t, &tol);
        let d1 = dispersal_sign_check(&a, 1, false, &tol).unwrap();
        let hf = hadamard_fischer_check(&t, &tol).unwrap();
        if p.verdict != Verdict::Pass || near_zero(d1.margin, &tol) || near_zero(hf.margin, &tol) {
            skipped += 1;
            continue;
        }
        assert_eq!(d1.verdict, hf.verdict, "{a}");
        match d1.verdict {
            Verdict::Pass => pass += 1,
            _ => fail += 1,
        }
    }
    assert!(pass + fail >= 900, "{pass} {fail} {skipped}");
    assert!(pass >= 50 && fail >= 50, "{pass} {fail} {skipped}");
}
