mod common;

use std::collections::BTreeSet;

use gkk_tau::minors::exact_minor_of_integers;
use gkk_tau::{
    char_poly, char_poly_from_table, dispersal, mean_minor_sums, pairs_with_dispersal,
    principal_minor_table, DispersalMode, IndexSet, Matrix, MinorMode, Tolerances,
};
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn table_agrees_with_char_poly(a in common::any_matrix(10)) {
        let tol = Tolerances::default();
        let t = principal_minor_table(&a, MinorMode::Float).unwrap();
        prop_assert_eq!(t.values().len(), 1 << a.order());
        prop_assert_eq!(t.values()[0], 1.0);
        let from_table = char_poly_from_table(&t, &IndexSet::full(a.order())).unwrap();
        let direct = char_poly(&a);
        for (x, y) in from_table.iter().zip(&direct) {
            prop_assert!((x - y).abs() <= tol.tol_rel * (1.0 + y.abs()), "{x} {y}");
        }
    }

    #[test]
    fn averaged_sums_match_table(a in common::any_matrix(8)) {
        let n = a.order();
        let t = principal_minor_table(&a, MinorMode::Float).unwrap();
        let c = mean_minor_sums(&t);
        prop_assert_eq!(c[0], 1.0);
        for j in 0..=n {
            let s: f64 = IndexSet::all(n).filter(|s| s.len() == j).map(|s| t.get(&s)).sum();
            prop_assert!((c[j] * binomial(n, j) - s).abs() <= 1e-8 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn averaged_sums_are_similarity_invariant(
        (a, s) in (2usize..=6).prop_flat_map(|n| (common::matrix(n, -2.0, 2.0), common::invertible(n)))
    ) {
        let tol = Tolerances::default();
        let b = s.mul(&a).unwrap().mul(&s.inverse().unwrap()).unwrap();
        let ca = principal_minor_table(&a, MinorMode::Float).unwrap().c().to_vec();
        let cb = principal_minor_table(&b, MinorMode::Float).unwrap().c().to_vec();
        for (x, y) in ca.iter().zip(&cb) {
            prop_assert!((x - y).abs() <= tol.tol_rel * (1.0 + x.abs()), "{x} {y}");
        }
    }

    #[test]
    fn float_minors_match_exact_on_integers(
        rows in (1usize..=6).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(-5i64..=5, n), n))
    ) {
        let n = rows.len();
        let flat: Vec<f64> = rows.iter().flatten().map(|&v| v as f64).collect();
        let t = principal_minor_table(&Matrix::new(n, flat).unwrap(), MinorMode::Float).unwrap();
        for s in IndexSet::all(n) {
            let exact = exact_minor_of_integers(&rows, &s).to_f64().unwrap();
            prop_assert!((t.get(&s) - exact).abs() <= 1e-8 * (1.0 + exact.abs()), "{s}: {} vs {exact}", t.get(&s));
        }
    }

    #[test]
    fn dispersal_is_symmetric(n in 1usize..=10, a in any::<u64>(), b in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let (x, y) = (IndexSet::new(n, a & mask).unwrap(), IndexSet::new(n, b & mask).unwrap());
        match (dispersal(&x, &y), dispersal(&y, &x)) {
            (Ok(p), Ok(q)) => prop_assert_eq!(p, q),
            (Err(_), Err(_)) => prop_assert_ne!(x.len(), y.len()),
            _ => prop_assert!(false),
        }
    }
}

#[test]
fn at_most_stream_is_union_of_exact_streams() {
    for n in 1..=7 {
        for d in 0..=n {
            let at_most: Vec<_> = pairs_with_dispersal(n, d, DispersalMode::AtMost).collect();
            let set: BTreeSet<_> = at_most.iter().copied().collect();
            assert_eq!(set.len(), at_most.len(), "duplicates at n={n} d={d}");
            let union: BTreeSet<_> = (0..=d)
                .flat_map(|k| pairs_with_dispersal(n, k, DispersalMode::Exact))
                .collect();
            assert_eq!(set, union, "n={n} d={d}");
        }
    }
}
