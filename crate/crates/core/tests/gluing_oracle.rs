//! Glued-graph shortest paths against the admissible-sequence oracle.

mod support;

use carpetlab::harness::{two_squares, two_squares_instance};
use support::{oracle_mismatches, random_instance};

#[test]
fn random_instances_match_the_oracle_exactly() {
    for seed in 0..10u64 {
        let patches = 1 + (seed % 3) as usize;
        let instance = random_instance(seed, patches, 200);
        let total = instance.base.len() + instance.patches.iter().map(|p| p.space.len()).sum::<usize>();
        assert!(total <= 200);
        let (bad, pairs) = oracle_mismatches(&instance, 0.0);
        assert_eq!(bad, 0, "seed {seed}: {bad} of {pairs} pairs differ");
    }
}

#[test]
fn two_squares_match_the_oracle() {
    // Diagonal lengths h·√2 are summed in different orders, hence 1e-12.
    let (bad, pairs) = oracle_mismatches(&two_squares_instance(2.0, 2.0).unwrap(), 1e-12);
    assert_eq!(bad, 0, "{bad} of {pairs}");
    // Identified points are at distance zero: base (1/2, 0) ~ patch (1, 0).
    let g = two_squares(2.0).unwrap();
    let a = g.space.nearest(0.5, 0.0, carpetlab::Side::None);
    let b = g.glued_id(1, g.pieces()[1].nearest(1.0, 0.0, carpetlab::Side::None));
    assert_eq!(carpetlab::metric::distances(&g.space, a)[b as usize], 0.0);
}

#[test]
fn misdeclared_constant_is_rejected() {
    assert!(two_squares_instance(2.0, 1.0).is_err());
    assert!(two_squares_instance(2.0, 2.0).is_ok());
}
