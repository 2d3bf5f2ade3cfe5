//! Symmetries of the matrix-free chain Hamiltonians.

use mana_core::chain::{
    apply_phase_rotation_layer, ground_state, Boundary, ChainModel, ExtendedPottsParams, Hamiltonian,
    PottsParams, T_GATE_THETA,
};
use mana_core::wigner::{full_table, RegionSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model() -> impl Strategy<Value = ChainModel> {
    let potts = (3usize..=6, -2.0f64..2.0, 0.0f64..3.0)
        .prop_map(|(n, j, h)| ChainModel::from(PottsParams::periodic(n, j, h)));
    let extended = (3usize..=6, -2.0f64..2.0, 0.0f64..1.0)
        .prop_map(|(n, j, p)| ChainModel::from(ExtendedPottsParams::periodic(n, j, p)));
    prop_oneof![potts, extended]
}

fn digits(index: usize, n: usize) -> Vec<usize> {
    (0..n).map(|s| (index / 3usize.pow((n - 1 - s) as u32)) % 3).collect()
}

fn index(digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &x| acc * 3 + x)
}

fn permuted(v: &[f64], n: usize, f: impl Fn(&[usize]) -> Vec<usize>) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (i, x) in v.iter().enumerate() {
        out[index(&f(&digits(i, n)))] = *x;
    }
    out
}

fn random_vec(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random::<f64>() - 0.5).collect()
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hermitian(m in model(), seed in any::<u64>()) {
        let ham = Hamiltonian::new(&m).unwrap();
        let x = random_vec(ham.len(), seed);
        let y = random_vec(ham.len(), seed ^ 1);
        let hx = ham.apply(&x);
        let hy = ham.apply(&y);
        let a: f64 = x.iter().zip(&hy).map(|(p, q)| p * q).sum();
        let b: f64 = hx.iter().zip(&y).map(|(p, q)| p * q).sum();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn commutes_with_negation_translation_and_charge(m in model(), seed in any::<u64>()) {
        let n = m.n_sites();
        let ham = Hamiltonian::new(&m).unwrap();
        let x = random_vec(ham.len(), seed);
        let hx = ham.apply(&x);
        let neg = |s: &[usize]| s.iter().map(|&v| (3 - v) % 3).collect::<Vec<_>>();
        let trans = |s: &[usize]| (0..s.len()).map(|i| s[(i + 1) % s.len()]).collect::<Vec<_>>();
        prop_assert!(close(&ham.apply(&permuted(&x, n, neg)), &permuted(&hx, n, neg)));
        prop_assert!(close(&ham.apply(&permuted(&x, n, trans)), &permuted(&hx, n, trans)));
        // prod Z is diagonal: H must not connect different total charges
        for (i, row) in (0..ham.len()).map(|i| (i, ham.apply(&unit(ham.len(), i)))).take(20) {
            let q: usize = digits(i, n).iter().sum::<usize>() % 3;
            for (j, v) in row.iter().enumerate() {
                if *v != 0.0 {
                    prop_assert_eq!(digits(j, n).iter().sum::<usize>() % 3, q);
                }
            }
        }
    }
}

fn unit(len: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[i] = 1.0;
    v
}

#[test]
fn open_boundary_drops_wrap_bond() {
    let periodic = Hamiltonian::new(&PottsParams::periodic(4, 1.0, 0.0).into()).unwrap();
    let open = Hamiltonian::new(
        &PottsParams {
            boundary: Boundary::Open,
            ..PottsParams::periodic(4, 1.0, 0.0)
        }
        .into(),
    )
    .unwrap();
    // the uniform superposition gains -(d - 1) per bond
    let len = periodic.len();
    let plus = vec![1.0 / (len as f64).sqrt(); len];
    let e = |h: &Hamiltonian| h.apply(&plus).iter().zip(&plus).map(|(a, b)| a * b).sum::<f64>();
    assert!((e(&periodic) + 8.0).abs() < 1e-10);
    assert!((e(&open) + 6.0).abs() < 1e-10);
}

#[test]
fn ground_states_are_charge_neutral_and_even() {
    for h in [0.5, 1.0, 2.0] {
        let gs = ground_state(&PottsParams::periodic(5, 1.0, h).into(), 1e-10, 5000).unwrap();
        assert!((gs.negation_expectation - 1.0).abs() < 1e-9);
        let weight_off: f64 = gs
            .psi
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| digits(*i, 5).iter().sum::<usize>() % 3 != 0)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        assert!(weight_off < 1e-18);
    }
}

#[test]
fn rotation_layer_keeps_purity_and_adds_magic() {
    let gs = ground_state(&PottsParams::periodic(4, 1.0, 1.0).into(), 1e-10, 5000).unwrap();
    let rotated = apply_phase_rotation_layer(&gs.psi, T_GATE_THETA).unwrap();
    assert!((rotated.norm() - 1.0).abs() < 1e-12);
    let region = RegionSpec::full(4).unwrap();
    let before = full_table(&gs.psi, &region).unwrap();
    let after = full_table(&rotated, &region).unwrap();
    assert!((after.sum_squares() - 81.0).abs() < 1e-8);
    let l1 = |t: &mana_core::wigner::WignerTable| t.values.iter().map(|v| v.abs()).sum::<f64>();
    assert!(l1(&after) > l1(&before));
    // theta = 0 is the identity
    let same = apply_phase_rotation_layer(&gs.psi, 0.0).unwrap();
    assert_eq!(same.amplitudes(), gs.psi.amplitudes());
}
