use ansatz_lab::circuit::{build_ansatz, AnsatzSpec, Circuit, Family};
use ansatz_lab::qsim::{circuit_unitary, phase_distance};
use ansatz_lab::rank::{expressive_rank, random_theta, RankOptions};
use ansatz_lab::reduce::*;
use proptest::prelude::*;

fn build(f: Family, n: usize, l: usize) -> Circuit {
    build_ansatz(&AnsatzSpec::new(f, n, l)).unwrap()
}

#[test]
fn rxcx_counts_match_periodic_rule_and_bound() {
    for n in 2..=6 {
        for l in 0..=10 {
            let rep = combine_parameters(&build(Family::RxCxL, n, l)).unwrap();
            assert_eq!(rep.effective_count, periodic_count_rxcx(n, l + 1), "n={n} l={l}");
            assert!(rep.effective_count <= effective_upper_bound_rxcx(n).max(n * (l + 1)));
        }
    }
}

#[test]
fn certificates_pass_for_every_family() {
    for f in Family::all(4) {
        let c = build(f.clone(), 4, 3);
        let rep = combine_parameters(&c).unwrap();
        let shift = shift_certificate(&c, &rep.map, 4, 9);
        let euler = euler_certificate(&rep, 4, 9);
        assert!(shift.passed(), "{f}: {shift:?}");
        assert!(euler.passed(), "{f}: {euler:?}");
    }
}

#[test]
fn count_bounds_rank_from_above() {
    for f in Family::all(3) {
        for l in 1..=4 {
            let c = build(f.clone(), 3, l);
            let count = combine_parameters(&c).unwrap().effective_count;
            let r = expressive_rank(&c, &RankOptions::default()).unwrap().rank;
            assert!(r <= count, "{f} l={l}: rank {r} > count {count}");
        }
    }
}

#[test]
fn alternating_rewrite_preserves_unitary() {
    for (n, l) in [(3, 4), (4, 8), (5, 6), (4, 6), (5, 2)] {
        let c = build(Family::RxCxA, n, l);
        let (lin, map) = reduce_alternating_to_linear(&c).unwrap();
        assert_eq!(lin.resources().layers, l / 2, "{:?}", lin.resources());
        for s in 0..5 {
            let th = random_theta(c.param_count(), s);
            let u = circuit_unitary(&c, &th).unwrap();
            let v = circuit_unitary(&lin, &apply_param_map(&map, &th)).unwrap();
            let d = phase_distance(&u, &v).unwrap();
            assert!(d < 1e-10, "n={n} l={l} d={d}");
        }
    }
}

#[test]
fn alternating_rewrite_rejects_other_circuits() {
    assert!(reduce_alternating_to_linear(&build(Family::RxRzCxA, 3, 2)).is_err());
    assert!(reduce_alternating_to_linear(&build(Family::RxCxA, 3, 3)).is_err());
}

#[test]
fn period_values() {
    let got: Vec<usize> = (0..8).map(period).collect();
    assert_eq!(got, [1, 2, 4, 4, 8, 8, 8, 8]);
    assert_eq!(effective_upper_bound_rxcx(4), 12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn effective_count_never_exceeds_params(n in 2usize..6, l in 0usize..6, k in 0usize..7) {
        let f = Family::all(n).swap_remove(k);
        let c = build(f, n, l);
        let rep = combine_parameters(&c).unwrap();
        prop_assert!(rep.effective_count <= c.param_count());
        prop_assert_eq!(rep.per_qubit_counts().iter().sum::<usize>(), rep.effective_count);
    }
}
