use ansatz_lab::entangle::*;
use ansatz_lab::qsim::{gates_unitary, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> GF2Matrix {
    loop {
        let rows = (0..n).map(|_| rng.gen_range(0..1u64 << n)).collect();
        let m = GF2Matrix::from_rows(n, rows).unwrap();
        if m.is_invertible() {
            return m;
        }
    }
}

#[test]
fn random_permutations_get_valid_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut nonlinear = 0;
    while nonlinear < 100 {
        let n = rng.gen_range(3..=5);
        let mut images: Vec<u64> = (0..1u64 << n).collect();
        images.shuffle(&mut rng);
        let p = BasisPermutation::new(n, images).unwrap();
        match is_linear(&p) {
            Ok(m) => {
                for x in 0..1u64 << n {
                    assert_eq!(m.apply(x), p.apply(x));
                }
            }
            Err(w) => {
                assert_eq!(p.apply(w.x ^ w.y), w.image_of_xor);
                assert_eq!(p.apply(w.x) ^ p.apply(w.y), w.xor_of_images);
                assert_ne!(w.image_of_xor, w.xor_of_images);
                nonlinear += 1;
            }
        }
    }
}

#[test]
fn linear_permutations_are_recognized() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let n = rng.gen_range(2..=6);
        let m = random_invertible(n, &mut rng);
        let p = BasisPermutation::from_matrix(&m).unwrap();
        assert_eq!(is_linear(&p).unwrap(), m);
    }
}

#[test]
fn swap_of_columns_4_and_5_is_not_linear() {
    let p = BasisPermutation::transposition(3, 3, 4).unwrap();
    assert!(is_linear(&p).is_err());
}

#[test]
fn linear_chain_orders() {
    for n in 2..=9 {
        let layer = CxLayer::linear_chain(n);
        let k = order(&layer_to_gf2(&layer, n).unwrap(), DEFAULT_ORDER_CAP).unwrap();
        assert!(layer_power_is_identity(&layer, n, k).unwrap(), "n={n}");
        for d in 1..k {
            if k % d == 0 {
                assert!(!layer_power_is_identity(&layer, n, d).unwrap(), "n={n} d={d}");
            }
        }
    }
}

#[test]
fn singular_layer_has_no_order() {
    let m = GF2Matrix::from_rows(2, vec![0b11, 0b11]).unwrap();
    assert!(matches!(order(&m, DEFAULT_ORDER_CAP), Err(EntangleError::NotInvertible)));
}

#[test]
fn column_moves_random_and_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for k in 0..200 {
        let n = rng.gen_range(2..=8);
        let dim = 1u64 << n;
        let (i, j) = (rng.gen_range(2..=dim), rng.gen_range(2..=dim));
        let layer = synthesize_column_move(n, i, j).unwrap();
        assert_eq!(layer_to_gf2(&layer, n).unwrap().apply(j - 1), i - 1);
        if k < 20 && n <= 5 {
            let d = dim as usize;
            let u = DMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).qr().q();
            let moved = &u * gates_unitary(n, &layer.gates()).0;
            for r in 0..d {
                assert!((moved[(r, j as usize - 1)] - u[(r, i as usize - 1)]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn first_column_cannot_move() {
    assert!(synthesize_column_move(3, 1, 2).is_err());
    assert!(synthesize_column_move(3, 2, 9).is_err());
}

#[test]
fn text_formats_round_trip() {
    let layer: CxLayer = "# chain\n1 0\n2 1\n".parse().unwrap();
    assert_eq!(layer, CxLayer::linear_chain(3));
    assert!("1 0 3".parse::<CxLayer>().is_err());
    let m: GF2Matrix = "110\n010\n001".parse().unwrap();
    assert_eq!(m.to_string().parse::<GF2Matrix>().unwrap(), m);
    assert!(CxLayer::new(vec![(0, 3)]).validate(3).is_err());
}

proptest! {
    #[test]
    fn gauss_decomposition_reproduces_matrix(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_invertible(n, &mut rng);
        let layer = gauss_decompose(&m).unwrap();
        prop_assert!(layer.len() <= n * n);
        prop_assert_eq!(layer_to_gf2(&layer, n).unwrap(), m);
    }
}
