//! Closed-form constants and combination formulas, including their
//! property-based invariants.

use proptest::prelude::*;

use yamabe_core::invariants::{
    disjoint_union_yamabe, hebey_vaugon_bound, kobayashi_interval, lambda_n, section4_examples,
    sphere_volume, sphere_volume_recursive, surgery_lower_bound, OrbitBound,
};

#[test]
fn sphere_volumes_match_recursion() {
    for n in 0..=10 {
        let direct = sphere_volume(n);
        let rec = sphere_volume_recursive(n);
        assert!(
            (direct - rec).abs() / rec < 1e-12,
            "vol(S^{n}): {direct} vs recursive {rec}"
        );
    }
    assert!((sphere_volume(2) - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!((sphere_volume(3) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-11);
}

#[test]
fn lambda_values() {
    // lambda_3 = 6 (2 pi^2)^{2/3}, lambda_4 = 12 (8 pi^2 / 3)^{1/2}.
    let lam3 = lambda_n(3).unwrap();
    let want3 = 6.0 * (2.0 * std::f64::consts::PI.powi(2)).powf(2.0 / 3.0);
    assert!((lam3 - want3).abs() / want3 < 1e-12);
    assert!((lam3 - 43.8232).abs() < 1e-3);

    let lam4 = lambda_n(4).unwrap();
    let want4 = 12.0 * (8.0 * std::f64::consts::PI.powi(2) / 3.0).sqrt();
    assert!((lam4 - want4).abs() / want4 < 1e-12);
    assert!((lam4 - 61.5624).abs() < 1e-3);
}

#[test]
fn lambda_is_increasing_in_n() {
    let mut prev = lambda_n(2).unwrap();
    for n in 3..=10 {
        let next = lambda_n(n).unwrap();
        assert!(next > prev, "lambda_{n} = {next} not above lambda_{} = {prev}", n - 1);
        prev = next;
    }
}

#[test]
fn orbit_bound_cases() {
    let lam4 = lambda_n(4).unwrap();
    let b1 = hebey_vaugon_bound(4, OrbitBound::Finite(1)).unwrap();
    assert!((b1.value - lam4).abs() < 1e-12);
    let b2 = hebey_vaugon_bound(4, OrbitBound::Finite(2)).unwrap();
    assert!((b2.value - lam4 * 2.0f64.sqrt()).abs() < 1e-10);
    let binf = hebey_vaugon_bound(4, OrbitBound::Infinite).unwrap();
    assert!(binf.value.is_infinite());
    assert!(hebey_vaugon_bound(4, OrbitBound::Finite(0)).is_err());
}

#[test]
fn interval_formula_cases() {
    let (lo, hi) = kobayashi_interval(-2.0, -2.0, 1.0, 4).unwrap();
    assert_eq!((lo, hi), (-2.0, -2.0));
    let (lo, hi) = kobayashi_interval(0.0, 0.0, 7.3, 3).unwrap();
    assert_eq!((lo, hi), (0.0, 0.0));
    let (lo, hi) = kobayashi_interval(-3.0, -1.0, 2.0, 3).unwrap();
    let f = 2.0f64.powf(2.0 / 3.0);
    assert!((lo + 3.0 * f).abs() < 1e-12 && (hi + f).abs() < 1e-12);
    assert!(kobayashi_interval(-1.0, -2.0, 1.0, 3).is_err());
    assert!(kobayashi_interval(-1.0, 1.0, 0.0, 3).is_err());
}

#[test]
fn disjoint_union_pinned_values() {
    assert_eq!(disjoint_union_yamabe(0.0, 0.0, 4).unwrap(), 0.0);
    let v = disjoint_union_yamabe(-1.0, -1.0, 4).unwrap();
    assert!((v + 2.0f64.sqrt()).abs() < 1e-12);
    assert_eq!(disjoint_union_yamabe(5.0, -2.0, 4).unwrap(), -2.0);
    assert_eq!(disjoint_union_yamabe(3.0, 5.0, 4).unwrap(), 3.0);
}

#[test]
fn surgery_bound_flags() {
    let ok = surgery_lower_bound(7.5, 3, 5);
    assert!(ok.valid && ok.value == 7.5);
    let codim_low = surgery_lower_bound(7.5, 2, 5);
    assert!(!codim_low.valid);
    let codim_high = surgery_lower_bound(7.5, 6, 5);
    assert!(!codim_high.valid);
    let q_equals_n = surgery_lower_bound(7.5, 5, 5);
    assert!(q_equals_n.valid, "codimension-n surgery is covered");
}

#[test]
fn derivation_chain_reproduces_lambda() {
    for n in 3..=8 {
        for q in 3..=n {
            let chain = section4_examples(n, q, 0, 0).unwrap();
            let lam = lambda_n(n).unwrap();
            assert!(chain.all_valid, "n={n} q={q}");
            assert_eq!(chain.value, lam, "n={n} q={q}");
        }
    }
    let chain = section4_examples(5, 3, 2, 1).unwrap();
    assert!(chain.all_valid);
    assert_eq!(chain.value, lambda_n(5).unwrap());
    assert_eq!(chain.steps.len(), 4 + 3, "4 base steps + l + m connected sums");
    // Composition coherence over connected-sum counts.
    for n in 3..=8 {
        for q in 3..=n {
            for (l, m) in [(1, 0), (0, 2), (2, 1)] {
                let chain = section4_examples(n, q, l, m).unwrap();
                assert!(chain.all_valid);
                assert_eq!(chain.value, lambda_n(n).unwrap(), "n={n} q={q} l={l} m={m}");
            }
        }
    }
    let flagged = section4_examples(5, 2, 0, 0).unwrap();
    assert!(!flagged.all_valid, "q = 2 must be flagged invalid");
}

proptest! {
    #[test]
    fn disjoint_union_is_commutative(y1 in -50.0f64..50.0, y2 in -50.0f64..50.0, n in 3usize..9) {
        let a = disjoint_union_yamabe(y1, y2, n).unwrap();
        let b = disjoint_union_yamabe(y2, y1, n).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn disjoint_union_below_min(y1 in -50.0f64..50.0, y2 in -50.0f64..50.0, n in 3usize..9) {
        let v = disjoint_union_yamabe(y1, y2, n).unwrap();
        prop_assert!(v <= y1.min(y2) + 1e-12);
        if y1.max(y2) >= 0.0 {
            prop_assert!((v - y1.min(y2)).abs() <= 1e-12 * y1.min(y2).abs().max(1.0));
        }
    }

    #[test]
    fn disjoint_union_negative_pair(y in -50.0f64..-1e-3, n in 3usize..9) {
        // Equal negative inputs: strictly below y, equal to -2^{2/n} |y|.
        let v = disjoint_union_yamabe(y, y, n).unwrap();
        let want = -(2.0f64.powf(2.0 / n as f64)) * y.abs();
        prop_assert!((v - want).abs() <= 1e-12 * want.abs());
        prop_assert!(v < y);
    }

    #[test]
    fn disjoint_union_continuous_at_origin(e1 in 0.0f64..1e-8, e2 in 0.0f64..1e-8) {
        let v = disjoint_union_yamabe(-e1, -e2, 4).unwrap();
        prop_assert!(v.abs() < 1e-7);
        let w = disjoint_union_yamabe(e1, -e2, 4).unwrap();
        prop_assert!(w.abs() < 1e-7);
    }

    #[test]
    fn kobayashi_contains_constant_case(s in -30.0f64..30.0, vol in 1e-3f64..100.0, n in 3usize..9) {
        let (lo, hi) = kobayashi_interval(s, s, vol, n).unwrap();
        let v = s * vol.powf(2.0 / n as f64);
        prop_assert!(lo <= v + 1e-12 && v <= hi + 1e-12);
        prop_assert!((lo - hi).abs() <= 1e-12 * v.abs().max(1.0));
    }
}
