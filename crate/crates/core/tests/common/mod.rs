//! Dense reference implementations built from textbook definitions with
//! nalgebra matrices. Everything here is deliberately naive.

#![allow(dead_code)]

use mana_core::qudit::PrimeDim;
use mana_core::{Complex64, StateVector};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

pub type CMat = DMatrix<Complex64>;

pub fn omega(d: usize, k: i64) -> Complex64 {
    let k = k.rem_euclid(d as i64);
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)
}

/// Clock `Z|s> = w^s |s>`.
pub fn clock(d: usize) -> CMat {
    CMat::from_fn(d, d, |i, j| if i == j { omega(d, i as i64) } else { Complex64::new(0.0, 0.0) })
}

/// Shift `X|s> = |s+1>`.
pub fn shift(d: usize) -> CMat {
    CMat::from_fn(d, d, |i, j| if i == (j + 1) % d { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

pub fn mat_pow(m: &CMat, k: usize) -> CMat {
    let mut out = CMat::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

pub fn kron_all(factors: &[CMat]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Single-site `T_(a,a') = w^(-a a' / 2) Z^a X^a'`.
pub fn pauli_site(d: usize, a: usize, ap: usize) -> CMat {
    let half = (d as i64 + 1) / 2;
    let phase = omega(d, -half * (a * ap) as i64);
    (mat_pow(&clock(d), a) * mat_pow(&shift(d), ap)) * phase
}

/// Single-site point operator from its definition
/// `A_u = T_u A_0 T_u^dagger` with `A_0 = (1/d) sum_v T_v`.
pub fn point_site(d: usize, a: usize, ap: usize) -> CMat {
    let mut a0 = CMat::zeros(d, d);
    for b in 0..d {
        for bp in 0..d {
            a0 += pauli_site(d, b, bp);
        }
    }
    a0 /= Complex64::new(d as f64, 0.0);
    let t = pauli_site(d, a, ap);
    &t * a0 * t.adjoint()
}

pub fn pauli_string(d: usize, pairs: &[(usize, usize)]) -> CMat {
    kron_all(&pairs.iter().map(|&(a, ap)| pauli_site(d, a, ap)).collect::<Vec<_>>())
}

pub fn point_string(d: usize, pairs: &[(usize, usize)]) -> CMat {
    kron_all(&pairs.iter().map(|&(a, ap)| point_site(d, a, ap)).collect::<Vec<_>>())
}

/// Pairs of a row-major point index over `n` sites (site 0 most significant).
pub fn pairs_of(d: usize, n: usize, mut index: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0); n];
    for p in out.iter_mut().rev() {
        let c = index % (d * d);
        *p = (c / d, c % d);
        index /= d * d;
    }
    out
}

pub fn ket(psi: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(psi.amplitudes())
}

/// Reduced density matrix on `sites` (sorted), basis ordered with the first
/// listed site most significant.
pub fn reduced_density(psi: &StateVector, sites: &[usize]) -> CMat {
    let d = psi.dim().du();
    let n = psi.n_sites();
    let digit = |idx: usize, site: usize| (idx / d.pow((n - 1 - site) as u32)) % d;
    let env: Vec<usize> = (0..n).filter(|s| !sites.contains(s)).collect();
    let key = |idx: usize, list: &[usize]| list.iter().fold(0usize, |acc, &s| acc * d + digit(idx, s));
    let dr = d.pow(sites.len() as u32);
    let mut rho = CMat::zeros(dr, dr);
    let amps = psi.amplitudes();
    for i in 0..amps.len() {
        for j in 0..amps.len() {
            if key(i, &env) == key(j, &env) {
                rho[(key(i, sites), key(j, sites))] += amps[i] * amps[j].conj();
            }
        }
    }
    rho
}

/// `Tr(A_u rho)` for every point of the region, row-major.
pub fn dense_wigner(psi: &StateVector, sites: &[usize]) -> Vec<f64> {
    let d = psi.dim().du();
    let rho = reduced_density(psi, sites);
    let l = sites.len();
    (0..(d * d).pow(l as u32))
        .map(|i| (point_string(d, &pairs_of(d, l, i)) * &rho).trace().re)
        .collect()
}

/// `<psi|T_u|psi>` for every Pauli string, row-major.
pub fn dense_pauli(psi: &StateVector) -> Vec<Complex64> {
    let d = psi.dim().du();
    let n = psi.n_sites();
    let v = ket(psi);
    (0..(d * d).pow(n as u32))
        .map(|i| (v.adjoint() * pauli_string(d, &pairs_of(d, n, i)) * &v)[(0, 0)])
        .collect()
}

pub fn site_op(d: usize, n: usize, site: usize, op: &CMat) -> CMat {
    kron_all(
        &(0..n)
            .map(|s| if s == site { op.clone() } else { CMat::identity(d, d) })
            .collect::<Vec<_>>(),
    )
}

/// `sum_k O_i^k O_j^(d-k)` as a dense matrix.
fn pair_sum(d: usize, n: usize, i: usize, j: usize, op: &CMat) -> CMat {
    let mut out = CMat::zeros(d.pow(n as u32), d.pow(n as u32));
    for k in 1..d {
        out += site_op(d, n, i, &mat_pow(op, k)) * site_op(d, n, j, &mat_pow(op, d - k));
    }
    out
}

fn field_sum(d: usize, n: usize, i: usize, op: &CMat) -> CMat {
    let mut out = CMat::zeros(d.pow(n as u32), d.pow(n as u32));
    for k in 1..d {
        out += site_op(d, n, i, &mat_pow(op, k));
    }
    out
}

/// Periodic Potts chain from Kronecker products.
pub fn dense_potts(d: usize, n: usize, j: f64, h: f64) -> CMat {
    let (x, z) = (shift(d), clock(d));
    let mut hm = CMat::zeros(d.pow(n as u32), d.pow(n as u32));
    for i in 0..n {
        hm -= pair_sum(d, n, i, (i + 1) % n, &x) * Complex64::new(j, 0.0);
        hm -= field_sum(d, n, i, &z) * Complex64::new(h, 0.0);
    }
    hm
}

/// Periodic self-dual extension with next-nearest-neighbour X couplings and
/// nearest-neighbour Z couplings.
pub fn dense_extended(d: usize, n: usize, j: f64, p: f64) -> CMat {
    let (x, z) = (shift(d), clock(d));
    let mut hm = CMat::zeros(d.pow(n as u32), d.pow(n as u32));
    for i in 0..n {
        hm -= pair_sum(d, n, i, (i + 1) % n, &x) * Complex64::new(j, 0.0);
        hm -= pair_sum(d, n, i, (i + 2) % n, &x) * Complex64::new(j * p, 0.0);
        hm -= field_sum(d, n, i, &z);
        hm -= pair_sum(d, n, i, (i + 1) % n, &z) * Complex64::new(p, 0.0);
    }
    hm
}

/// Lowest eigenvalue of a Hermitian matrix.
pub fn lowest_eigenvalue(m: &CMat) -> f64 {
    let re = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re);
    assert!(m.iter().all(|z| z.im.abs() < 1e-12), "expected a real matrix");
    re.symmetric_eigen().eigenvalues.min()
}

pub fn qutrit() -> PrimeDim {
    PrimeDim::qutrit()
}

/// `(|1> - |2>) / sqrt 2`.
pub fn strange() -> StateVector {
    let s = 0.5f64.sqrt();
    StateVector::product(
        qutrit(),
        &[vec![Complex64::new(0.0, 0.0), Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]],
    )
    .unwrap()
}
