use gkk_tau::{
    classify, extremal_search, newton_check, principal_minor_table, MatrixClass, MinorMode,
    Objective, SearchConfig, Tolerances, Verdict,
};
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = (MatrixClass, Objective)> {
    prop_oneof![
        Just((MatrixClass::Tau, Objective::MinVargaMargin)),
        Just((MatrixClass::Gkk, Objective::MinStabilityMargin)),
        Just((MatrixClass::SignSymmetric, Objective::MinStabilityMargin)),
        Just((MatrixClass::P, Objective::MinStrictGkkMargin)),
        Just((MatrixClass::MMatrix, Objective::MinHfMargin)),
        Just((MatrixClass::RealSpectrum, Objective::MinNewtonMargin)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn search_is_reproducible_sound_and_monotone((class, objective) in pair(), n in 2usize..=4, seed in any::<u64>()) {
        let tol = Tolerances::default();
        let cfg = SearchConfig::new(n, seed, 200).with_restarts(2);
        let r = extremal_search(class, objective, &cfg, &tol).unwrap();
        let again = extremal_search(class, objective, &cfg, &tol).unwrap();
        prop_assert_eq!(r.to_json(), again.to_json());

        prop_assert!(class.contains(&r.best, &tol).unwrap());
        let audit = classify(&r.best, &tol).unwrap();
        prop_assert_eq!(serde_json::to_string(&audit).unwrap(), serde_json::to_string(&r.membership_audit).unwrap());

        prop_assert!(r.trace.windows(2).all(|w| w[1].objective <= w[0].objective));
        prop_assert!(r.trace.last().unwrap().objective >= r.best_objective);

        if class == MatrixClass::RealSpectrum {
            prop_assert_eq!(r.oracle_violations, 0);
            let t = principal_minor_table(&r.best, MinorMode::Float).unwrap();
            prop_assert_eq!(newton_check(t.c(), &tol).verdict, Verdict::Pass);
        }
    }
}
