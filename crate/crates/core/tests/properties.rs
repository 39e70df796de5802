//! Property-based checks of invariants that hold for every input.

mod support;

use carpetlab::constructions::{partial_sums, q_slits, r_slits};
use carpetlab::gluing::{comparison_check, glue};
use carpetlab::harness::{fmt_f64, judge, merge_reports, parse_f64, ConstructionSpec, Expected, Mode, Report, Row};
use carpetlab::metric::distances;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn row(construction: String, check: String, seed: u64, value: f64) -> Row {
    Row {
        construction,
        check,
        seed,
        value,
        expected: "1".into(),
        mode: "ratio".into(),
        samples: 1,
        r_min: 0.0,
        r_max: 0.0,
        paper_ref: String::new(),
        provenance: String::new(),
        pass: "pass".into(),
        note: String::new(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn slit_registry_sizes(n in 0u32..7) {
        prop_assert_eq!(q_slits(n).len() as u64, (4u64.pow(n) - 1) / 3);
        // The accumulating registry contains the first-generation slit of
        // every corner copy, so it grows with n.
        prop_assert!(r_slits(n + 1).len() > r_slits(n).len());
    }

    #[test]
    fn partial_sums_are_monotone(counts in prop::collection::vec(0u64..50, 1..10), q in 0.5f64..3.0) {
        let s = partial_sums(&counts, q);
        prop_assert_eq!(s.len(), counts.len());
        prop_assert!(s.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn float_text_round_trips(v in prop::num::f64::ANY) {
        let back = parse_f64(&fmt_f64(v)).unwrap();
        prop_assert!(back == v || (back.is_nan() && v.is_nan()));
    }

    #[test]
    fn expected_value_always_passes(e in -1e6f64..1e6, tol in 0.0f64..1.0) {
        for mode in [Mode::Ratio, Mode::Absolute] {
            prop_assert!(judge(&Expected::Value(e), mode, tol, e, true));
        }
    }

    #[test]
    fn slit_specs_round_trip(n in 0u32..8, m in 2u32..12, fam in 0usize..4) {
        let name = ["Q", "carpet", "Qinf", "R"][fam];
        let text = format!("{name}({n},{m})");
        let spec: ConstructionSpec = text.parse().unwrap();
        prop_assert_eq!(spec.to_string(), text);
    }

    #[test]
    fn merge_is_order_insensitive_and_idempotent(
        keys in prop::collection::btree_set((0u8..4, 0u8..4, 0u64..4), 0..12),
    ) {
        let rows: Vec<Row> = keys
            .iter()
            .map(|&(c, k, s)| row(format!("c{c}"), format!("k{k}"), s, (c as f64) + (k as f64) / 8.0))
            .collect();
        let half = rows.len() / 2;
        let a = Report { rows: rows[..half].to_vec(), series: Vec::new() };
        let b = Report { rows: rows[half..].to_vec(), series: Vec::new() };
        let ab = merge_reports(&[a.clone(), b.clone()]).unwrap();
        let ba = merge_reports(&[b.clone(), a.clone(), b]).unwrap();
        prop_assert_eq!(&ab, &ba);
        prop_assert_eq!(ab.rows.len(), rows.len());
        prop_assert_eq!(merge_reports(&[ab.clone(), ab.clone()]).unwrap(), ab);
    }

    #[test]
    fn piece_metrics_are_metrics(seed in 0u64..1000, n in 3usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = support::random_piece(&mut rng, n, "piece");
        let fw = support::floyd_warshall(&space);
        for u in 0..n {
            let d = distances(&space, u as u32);
            prop_assert_eq!(&d, &fw[u]);
        }
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(fw[u][v], fw[v][u]);
                for w in 0..n {
                    prop_assert!(fw[u][w] <= fw[u][v] + fw[v][w]);
                }
            }
        }
    }

    #[test]
    fn gluing_is_comparable_and_exact(seed in 0u64..500, patches in 1usize..4) {
        let instance = support::random_instance(seed, patches, 90);
        let glued = glue(&instance).unwrap();
        let rep = comparison_check(&glued, None);
        prop_assert!(rep.pass, "{:?}", rep);
        let (bad, _) = support::oracle_mismatches(&instance, 0.0);
        prop_assert_eq!(bad, 0);
    }
}
