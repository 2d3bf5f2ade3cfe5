//! Algebraic identities of the Pauli strings and point operators, checked
//! on exact phase integers and on random states.

mod common;

use common::*;
use mana_core::qudit::{
    apply_pauli_string, apply_phase_point, pauli_on_basis, phase_point_on_basis, symplectic_phase,
    BasisState, PhaseExponent,
};
use mana_core::{Complex64, PhasePoint, PrimeDim, StateVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dims() -> impl Strategy<Value = u32> {
    prop_oneof![Just(3u32), Just(5u32), Just(7u32)]
}

/// A dimension, a site count, two points and a basis state.
fn setup() -> impl Strategy<Value = (u32, Vec<(i64, i64)>, Vec<(i64, i64)>, Vec<i64>)> {
    (dims(), 1usize..=3).prop_flat_map(|(d, n)| {
        let pair = (0..d as i64, 0..d as i64);
        (
            Just(d),
            prop::collection::vec(pair.clone(), n),
            prop::collection::vec(pair, n),
            prop::collection::vec(0..d as i64, n),
        )
    })
}

fn basis(dim: PrimeDim, s: &[i64]) -> BasisState {
    let d = dim.du();
    let index = s.iter().fold(0usize, |acc, &x| acc * d + x as usize);
    BasisState::from_index(dim, s.len(), index)
}

/// Composes two exact basis actions: `second(first(sigma))`.
fn compose(
    dim: PrimeDim,
    first: (PhaseExponent, BasisState),
    second: impl Fn(&BasisState) -> (PhaseExponent, BasisState),
) -> (PhaseExponent, BasisState) {
    let (k2, out) = second(&first.1);
    (PhaseExponent::new(dim, first.0.k as i64 + k2.k as i64), out)
}

fn cross(dim: PrimeDim, a: &PhasePoint, b: &PhasePoint) -> PhaseExponent {
    // 2 (b . a' - b' . a)
    let k: i64 = b
        .pairs()
        .zip(a.pairs())
        .map(|((bj, bpj), (aj, apj))| 2 * (bj as i64 * apj as i64 - bpj as i64 * aj as i64))
        .sum();
    PhaseExponent::new(dim, k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn point_product_is_pauli((d, a, b, s) in setup()) {
        let dim = PrimeDim::new(d).unwrap();
        let (a, b) = (PhasePoint::from_pairs(dim, &a), PhasePoint::from_pairs(dim, &b));
        let sigma = basis(dim, &s);
        let ab = a.add(&b).unwrap();
        let lhs = compose(dim, phase_point_on_basis(&b, &sigma).unwrap(), |x| {
            phase_point_on_basis(&ab, x).unwrap()
        });
        let (kt, out) = pauli_on_basis(&a.scale(2), &sigma).unwrap();
        let rhs = (PhaseExponent::new(dim, kt.k as i64 + cross(dim, &a, &b).k as i64), out);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn point_times_origin_is_pauli((d, a, _b, s) in setup()) {
        let dim = PrimeDim::new(d).unwrap();
        let a = PhasePoint::from_pairs(dim, &a);
        let zero = PhasePoint::zero(dim, a.len());
        let sigma = basis(dim, &s);
        let lhs = compose(dim, phase_point_on_basis(&zero, &sigma).unwrap(), |x| {
            phase_point_on_basis(&a, x).unwrap()
        });
        prop_assert_eq!(lhs, pauli_on_basis(&a.scale(2), &sigma).unwrap());
    }

    #[test]
    fn paulis_commute_up_to_symplectic_phase((d, u, v, s) in setup()) {
        let dim = PrimeDim::new(d).unwrap();
        let (u, v) = (PhasePoint::from_pairs(dim, &u), PhasePoint::from_pairs(dim, &v));
        let sigma = basis(dim, &s);
        let uv = compose(dim, pauli_on_basis(&v, &sigma).unwrap(), |x| pauli_on_basis(&u, x).unwrap());
        let vu = compose(dim, pauli_on_basis(&u, &sigma).unwrap(), |x| pauli_on_basis(&v, x).unwrap());
        let k = symplectic_phase(&u, &v).unwrap();
        prop_assert_eq!(uv.1, vu.1.clone());
        prop_assert_eq!(uv.0, PhaseExponent::new(dim, vu.0.k as i64 + k.k as i64));
    }

    #[test]
    fn point_operators_are_involutions((d, u, _v, s) in setup()) {
        let dim = PrimeDim::new(d).unwrap();
        let u = PhasePoint::from_pairs(dim, &u);
        let sigma = basis(dim, &s);
        let twice = compose(dim, phase_point_on_basis(&u, &sigma).unwrap(), |x| {
            phase_point_on_basis(&u, x).unwrap()
        });
        prop_assert_eq!(twice, (PhaseExponent::new(dim, 0), sigma));
    }

    #[test]
    fn point_identity_on_states((d, a, b, _s) in setup(), seed in any::<u64>()) {
        let dim = PrimeDim::new(d).unwrap();
        let (a, b) = (PhasePoint::from_pairs(dim, &a), PhasePoint::from_pairs(dim, &b));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = StateVector::random(dim, a.len(), &mut rng).unwrap();
        let lhs = apply_phase_point(&apply_phase_point(&psi, &b).unwrap(), &a.add(&b).unwrap()).unwrap();
        let phase = cross(dim, &a, &b).to_complex(dim);
        let rhs = apply_pauli_string(&psi, &a.scale(2)).unwrap();
        for (l, r) in lhs.amplitudes().iter().zip(rhs.amplitudes()) {
            prop_assert!((l - r * phase).norm() < 1e-12);
        }
    }
}

#[test]
fn basis_actions_match_dense_operators() {
    // exact rules against matrices built from clock and shift
    for d in [3usize, 5] {
        let dim = PrimeDim::new(d as u32).unwrap();
        for a in 0..d {
            for ap in 0..d {
                let u = PhasePoint::from_pairs(dim, &[(a as i64, ap as i64)]);
                let t = pauli_site(d, a, ap);
                let p = point_site(d, a, ap);
                for s in 0..d {
                    let sigma = BasisState::from_index(dim, 1, s);
                    let (k, out) = pauli_on_basis(&u, &sigma).unwrap();
                    let col = out.index(dim);
                    assert!((t[(col, s)] - k.to_complex(dim)).norm() < 1e-12);
                    let (k, out) = phase_point_on_basis(&u, &sigma).unwrap();
                    let col = out.index(dim);
                    assert!((p[(col, s)] - k.to_complex(dim)).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn point_operators_are_hermitian_and_unitary() {
    for d in [3usize, 5, 7] {
        for a in 0..d {
            for ap in 0..d {
                let p = point_site(d, a, ap);
                assert!((&p - p.adjoint()).norm() < 1e-12);
                assert!((&p * &p - CMat::identity(d, d)).norm() < 1e-12);
                assert!((p.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn point_operators_are_orthogonal() {
    // Tr(A_u A_v) = d delta_uv
    let d = 3;
    let ops: Vec<CMat> = (0..9).map(|i| point_site(d, i / 3, i % 3)).collect();
    for (i, p) in ops.iter().enumerate() {
        for (j, q) in ops.iter().enumerate() {
            let want = if i == j { d as f64 } else { 0.0 };
            assert!(((p * q).trace() - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }
}
