//! Quantum Potts chains: matrix-free Hamiltonians and ground states.
//!
//! ```text
//! H_Potts    = -J sum_<ij> sum_k X_i^k X_j^(d-k) - h sum_i sum_k Z_i^k
//! H_Potts(p) = -J sum_<ij> sum_k X_i^k X_j^(d-k) - sum_i sum_k Z_i^k
//!              - J p sum_<<ij>> sum_k X_i^k X_j^(d-k) - p sum_<ij> sum_k Z_i^k Z_j^(d-k)
//! ```
//!
//! with `k = 1..d-1`. Every term is real in the computational basis, so the
//! solver works on real vectors and converts to a complex [`StateVector`] at
//! the end.

mod lanczos;

use alloc::format;
use alloc::vec::Vec;
use core::ops::{AddAssign, Mul};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::par;
use crate::qudit::PrimeDim;
use crate::state::{checked_len, StateVector};

pub use lanczos::{ground_state, ground_state_with, GroundStateResult, LanczosOptions, Sector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

/// The `d`-state quantum Potts chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PottsParams {
    pub n_sites: usize,
    pub dim: PrimeDim,
    pub j: f64,
    pub h: f64,
    pub boundary: Boundary,
}

/// The self-dual extension with next-nearest-neighbour X couplings and
/// nearest-neighbour ZZ couplings of strength `p`; the field is fixed at 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedPottsParams {
    pub n_sites: usize,
    pub dim: PrimeDim,
    pub p: f64,
    /// Sign (or strength) applied to both X-coupling sums.
    pub j: f64,
    pub boundary: Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChainModel {
    Potts(PottsParams),
    Extended(ExtendedPottsParams),
}

impl From<PottsParams> for ChainModel {
    fn from(p: PottsParams) -> Self {
        ChainModel::Potts(p)
    }
}

impl From<ExtendedPottsParams> for ChainModel {
    fn from(p: ExtendedPottsParams) -> Self {
        ChainModel::Extended(p)
    }
}

impl PottsParams {
    pub fn periodic(n_sites: usize, j: f64, h: f64) -> Self {
        PottsParams {
            n_sites,
            dim: PrimeDim::qutrit(),
            j,
            h,
            boundary: Boundary::Periodic,
        }
    }
}

impl ExtendedPottsParams {
    pub fn periodic(n_sites: usize, j: f64, p: f64) -> Self {
        ExtendedPottsParams {
            n_sites,
            dim: PrimeDim::qutrit(),
            p,
            j,
            boundary: Boundary::Periodic,
        }
    }
}

impl ChainModel {
    pub fn n_sites(&self) -> usize {
        match self {
            ChainModel::Potts(p) => p.n_sites,
            ChainModel::Extended(p) => p.n_sites,
        }
    }

    pub fn dim(&self) -> PrimeDim {
        match self {
            ChainModel::Potts(p) => p.dim,
            ChainModel::Extended(p) => p.dim,
        }
    }

    pub fn boundary(&self) -> Boundary {
        match self {
            ChainModel::Potts(p) => p.boundary,
            ChainModel::Extended(p) => p.boundary,
        }
    }

    /// `(J, h, p)` as stored in state files; the extended model reports
    /// `h = 1`.
    pub fn couplings(&self) -> (f64, f64, f64) {
        match *self {
            ChainModel::Potts(p) => (p.j, p.h, 0.0),
            ChainModel::Extended(p) => (p.j, 1.0, p.p),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_sites();
        match self.boundary() {
            Boundary::Periodic if n < 3 => Err(Error::InvalidParameter(format!(
                "periodic chains need at least 3 sites, got {n}"
            ))),
            Boundary::Open if n < 2 => Err(Error::InvalidParameter(format!(
                "open chains need at least 2 sites, got {n}"
            ))),
            _ => Ok(()),
        }
    }
}

/// One two-site coupling `coeff * sum_k X_i^k X_j^(d-k)`.
#[derive(Clone, Copy, Debug)]
struct Hop {
    stride_i: usize,
    stride_j: usize,
    coeff: f64,
}

/// The Hamiltonian as a diagonal plus a list of X-type couplings.
pub struct Hamiltonian {
    dim: PrimeDim,
    n_sites: usize,
    diag: Vec<f64>,
    hops: Vec<Hop>,
}

fn bonds(n: usize, range: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    match boundary {
        Boundary::Periodic => (0..n).map(|i| (i, (i + range) % n)).collect(),
        Boundary::Open => (0..n.saturating_sub(range)).map(|i| (i, i + range)).collect(),
    }
}

impl Hamiltonian {
    pub fn new(model: &ChainModel) -> Result<Self> {
        model.validate()?;
        let dim = model.dim();
        let n = model.n_sites();
        let len = checked_len(dim, n)?;
        let d = dim.du();
        let stride = |site: usize| d.pow((n - 1 - site) as u32);

        let (x_nn, x_nnn, field, zz) = match *model {
            ChainModel::Potts(p) => (-p.j, 0.0, -p.h, 0.0),
            ChainModel::Extended(p) => (-p.j, -p.j * p.p, -1.0, -p.p),
        };

        let nn = bonds(n, 1, model.boundary());
        let mut hops: Vec<Hop> = nn
            .iter()
            .map(|&(i, j)| Hop {
                stride_i: stride(i),
                stride_j: stride(j),
                coeff: x_nn,
            })
            .collect();
        if x_nnn != 0.0 {
            hops.extend(bonds(n, 2, model.boundary()).into_iter().map(|(i, j)| Hop {
                stride_i: stride(i),
                stride_j: stride(j),
                coeff: x_nnn,
            }));
        }

        // sum_k Z^k = d delta(s, 0) - 1; sum_k Z_i^k Z_j^-k = d delta(s_i, s_j) - 1
        let df = d as f64;
        let mut diag = alloc::vec![0.0; len];
        let mut digits = alloc::vec![0usize; n];
        for (idx, v) in diag.iter_mut().enumerate() {
            let mut rest = idx;
            for s in digits.iter_mut().rev() {
                *s = rest % d;
                rest /= d;
            }
            let mut e = 0.0;
            if field != 0.0 {
                for &s in &digits {
                    e += field * if s == 0 { df - 1.0 } else { -1.0 };
                }
            }
            if zz != 0.0 {
                for &(i, j) in &nn {
                    e += zz * if digits[i] == digits[j] { df - 1.0 } else { -1.0 };
                }
            }
            *v = e;
        }
        Ok(Hamiltonian {
            dim,
            n_sites: n,
            diag,
            hops,
        })
    }

    pub fn dim(&self) -> PrimeDim {
        self.dim
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `out = H psi` for real or complex amplitudes.
    pub fn apply_into<T: Amplitude>(&self, psi: &[T], out: &mut [T]) {
        debug_assert_eq!(psi.len(), self.len());
        debug_assert_eq!(out.len(), self.len());
        let d = self.dim.du();
        par::fill_chunks(out, par::CHUNK, |offset, chunk| {
            for (k, o) in chunk.iter_mut().enumerate() {
                let idx = offset + k;
                let mut acc = psi[idx] * self.diag[idx];
                for hop in &self.hops {
                    let si = (idx / hop.stride_i) % d;
                    let sj = (idx / hop.stride_j) % d;
                    let base = idx - si * hop.stride_i - sj * hop.stride_j;
                    let mut sum = T::zero();
                    for shift in 1..d {
                        let ti = (si + shift) % d;
                        let tj = (sj + d - shift) % d;
                        sum += psi[base + ti * hop.stride_i + tj * hop.stride_j];
                    }
                    acc += sum * hop.coeff;
                }
                *o = acc;
            }
        });
    }

    pub fn apply<T: Amplitude>(&self, psi: &[T]) -> Vec<T> {
        let mut out = alloc::vec![T::zero(); psi.len()];
        self.apply_into(psi, &mut out);
        out
    }

    /// Dense matrix, row-major. Only sensible for small chains.
    pub fn to_dense(&self) -> Vec<f64> {
        let len = self.len();
        let mut m = alloc::vec![0.0; len * len];
        let mut e = alloc::vec![0.0; len];
        for col in 0..len {
            e[col] = 1.0;
            let h = self.apply(&e);
            for (row, v) in h.into_iter().enumerate() {
                m[row * len + col] = v;
            }
            e[col] = 0.0;
        }
        m
    }
}

/// Scalar types the Hamiltonian can act on.
pub trait Amplitude: Copy + Send + Sync + Zero + AddAssign + Mul<f64, Output = Self> {}

impl Amplitude for f64 {}
impl Amplitude for Complex64 {}

/// `H |psi>` without materializing `H`.
pub fn apply_hamiltonian(model: &ChainModel, psi: &StateVector) -> Result<StateVector> {
    if psi.dim() != model.dim() || psi.n_sites() != model.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "state over {} sites (d = {}), model over {} sites (d = {})",
            psi.n_sites(),
            psi.dim().d(),
            model.n_sites(),
            model.dim().d()
        )));
    }
    let h = Hamiltonian::new(model)?;
    StateVector::new(psi.dim(), psi.n_sites(), h.apply(psi.amplitudes()))
}

/// Phase assigned by `T_theta = diag(1, e^(i theta), e^(-i theta))` to each
/// local level.
const ROTATION_CHARGE: [f64; 3] = [0.0, 1.0, -1.0];

/// `theta` of the canonical qutrit T gate `diag(1, e^(2 pi i/9), e^(-2 pi i/9))`.
pub const T_GATE_THETA: f64 = 2.0 * core::f64::consts::PI / 9.0;

/// Applies `T_theta` to every site of a qutrit chain.
pub fn apply_phase_rotation_layer(psi: &StateVector, theta: f64) -> Result<StateVector> {
    if psi.dim().d() != 3 {
        return Err(Error::InvalidParameter(format!(
            "the T_theta layer is defined for qutrits, got d = {}",
            psi.dim().d()
        )));
    }
    let n = psi.n_sites();
    let amps = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(idx, &c)| {
            let mut rest = idx;
            let mut charge = 0.0;
            for _ in 0..n {
                charge += ROTATION_CHARGE[rest % 3];
                rest /= 3;
            }
            if charge == 0.0 {
                c
            } else {
                let phi = theta * charge;
                c * Complex64::new(phi.cos(), phi.sin())
            }
        })
        .collect();
    StateVector::new(psi.dim(), n, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::fourier_matrix;

    fn x_plus_product(n: usize) -> StateVector {
        let dim = PrimeDim::qutrit();
        let s = 1.0 / 3f64.sqrt();
        let plus = alloc::vec![Complex64::new(s, 0.0); 3];
        StateVector::product(dim, &alloc::vec![plus; n]).unwrap()
    }

    #[test]
    fn aligned_x_eigenstates() {
        let model = ChainModel::Potts(PottsParams::periodic(3, 1.0, 0.0));
        let psi = x_plus_product(3);
        let out = apply_hamiltonian(&model, &psi).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b * -6.0).norm() < 1e-12);
        }
    }

    #[test]
    fn field_only_on_all_zero() {
        let model = ChainModel::Potts(PottsParams::periodic(3, 0.0, 1.0));
        let psi = StateVector::basis(PrimeDim::qutrit(), 3, 0).unwrap();
        let out = apply_hamiltonian(&model, &psi).unwrap();
        assert!((out.amplitudes()[0].re + 6.0).abs() < 1e-12);
        assert!(out.amplitudes()[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn periodic_needs_three_sites() {
        let model = ChainModel::Potts(PottsParams::periodic(2, 1.0, 1.0));
        assert!(Hamiltonian::new(&model).is_err());
    }

    #[test]
    fn extended_at_zero_p_is_potts_at_unit_field() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let psi = StateVector::random(PrimeDim::qutrit(), 5, &mut rng).unwrap();
        let a = apply_hamiltonian(&ExtendedPottsParams::periodic(5, 1.0, 0.0).into(), &psi).unwrap();
        let b = apply_hamiltonian(&PottsParams::periodic(5, 1.0, 1.0).into(), &psi).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_layer() {
        let dim = PrimeDim::qutrit();
        let mut psi = StateVector::basis(dim, 1, 0).unwrap();
        psi.apply_site_matrix(0, &fourier_matrix(dim)).unwrap();
        let theta = 0.37;
        let out = apply_phase_rotation_layer(&psi, theta).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let expect = [
            Complex64::new(s, 0.0),
            Complex64::new(theta.cos() * s, theta.sin() * s),
            Complex64::new(theta.cos() * s, -theta.sin() * s),
        ];
        for (a, b) in out.amplitudes().iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
        let same = apply_phase_rotation_layer(&psi, 0.0).unwrap();
        assert_eq!(same, psi);
        let zero = StateVector::basis(dim, 4, 0).unwrap();
        assert_eq!(apply_phase_rotation_layer(&zero, T_GATE_THETA).unwrap(), zero);
        let d5 = StateVector::basis(PrimeDim::new(5).unwrap(), 1, 0).unwrap();
        assert!(apply_phase_rotation_layer(&d5, 0.1).is_err());
    }
}
