//! Dense pure states of a chain of qudits.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qudit::PrimeDim;

/// Hard ceiling on the number of amplitudes held by one state (2^24).
pub const MAX_AMPLITUDES: u64 = 1 << 24;

/// Amplitudes `c_sigma = <sigma|psi>` over the computational basis, site 0
/// being the most significant base-`d` digit of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dim: PrimeDim,
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(dim: PrimeDim, n_sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        let len = checked_len(dim, n_sites)?;
        if amps.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} sites of dimension {} (expected {len})",
                amps.len(),
                n_sites,
                dim.d()
            )));
        }
        Ok(StateVector { dim, n_sites, amps })
    }

    /// The basis state `|index>`.
    pub fn basis(dim: PrimeDim, n_sites: usize, index: usize) -> Result<Self> {
        let len = checked_len(dim, n_sites)?;
        if index >= len {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range {len}"
            )));
        }
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { dim, n_sites, amps })
    }

    /// Tensor product of single-site states (each of length `d`, site 0 first).
    pub fn product(dim: PrimeDim, sites: &[Vec<Complex64>]) -> Result<Self> {
        let mut out = StateVector {
            dim,
            n_sites: 0,
            amps: alloc::vec![Complex64::new(1.0, 0.0)],
        };
        for s in sites {
            let site = StateVector::new(dim, 1, s.clone())?;
            out = out.tensor(&site)?;
        }
        Ok(out)
    }

    /// A Haar-random normalized state.
    pub fn random<R: Rng + ?Sized>(dim: PrimeDim, n_sites: usize, rng: &mut R) -> Result<Self> {
        let len = checked_len(dim, n_sites)?;
        let amps = (0..len)
            .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
            .collect();
        let mut psi = StateVector { dim, n_sites, amps };
        psi.normalize();
        Ok(psi)
    }

    #[inline]
    pub fn dim(&self) -> PrimeDim {
        self.dim
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm; a zero vector is left untouched.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|c| *c *= inv);
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|self> (x) |other>`, the sites of `self` first.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "tensor of d = {} and d = {}",
                self.dim.d(),
                other.dim.d()
            )));
        }
        let n_sites = self.n_sites + other.n_sites;
        checked_len(self.dim, n_sites)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(StateVector {
            dim: self.dim,
            n_sites,
            amps,
        })
    }

    /// Applies a `d x d` matrix (row-major) to one site.
    pub fn apply_site_matrix(&mut self, site: usize, matrix: &[Complex64]) -> Result<()> {
        let d = self.dim.du();
        if site >= self.n_sites || matrix.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "site {site} / matrix of {} entries on {} sites",
                matrix.len(),
                self.n_sites
            )));
        }
        let stride = d.pow((self.n_sites - 1 - site) as u32);
        let block = stride * d;
        let mut local = alloc::vec![Complex64::new(0.0, 0.0); d];
        for base in (0..self.amps.len()).step_by(block) {
            for off in 0..stride {
                for (s, l) in local.iter_mut().enumerate() {
                    *l = self.amps[base + off + s * stride];
                }
                for r in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (s, l) in local.iter().enumerate() {
                        acc += matrix[r * d + s] * l;
                    }
                    self.amps[base + off + r * stride] = acc;
                }
            }
        }
        Ok(())
    }

    /// `<psi| A_0^(x)N |psi>`, the expectation of site-wise negation
    /// `|sigma> -> |-sigma>`.
    pub fn negation_expectation(&self) -> f64 {
        let neg = negation_permutation(self.dim, self.n_sites);
        self.amps
            .iter()
            .enumerate()
            .map(|(i, c)| self.amps[neg[i]].conj() * c)
            .sum::<Complex64>()
            .re
    }

    /// Projects onto the `+1` eigenspace of `A_0^(x)N` and renormalizes.
    /// Returns the norm of the projection before renormalization.
    pub fn symmetrize_negation(&mut self) -> f64 {
        let neg = negation_permutation(self.dim, self.n_sites);
        let src = self.amps.clone();
        for (i, c) in self.amps.iter_mut().enumerate() {
            *c = (src[i] + src[neg[i]]) * 0.5;
        }
        let n = self.norm();
        self.normalize();
        n
    }

    fn check_compatible(&self, other: &StateVector) -> Result<()> {
        if self.dim != other.dim || self.n_sites != other.n_sites {
            return Err(Error::DimensionMismatch(format!(
                "states over {} sites (d = {}) and {} sites (d = {})",
                self.n_sites,
                self.dim.d(),
                other.n_sites,
                other.dim.d()
            )));
        }
        Ok(())
    }
}

/// `d^n` with the global amplitude guard.
pub fn checked_len(dim: PrimeDim, n_sites: usize) -> Result<usize> {
    let len = dim.pow(n_sites).filter(|&l| l as u64 <= MAX_AMPLITUDES);
    len.ok_or(Error::Guard {
        what: "state amplitudes",
        requested: (dim.d() as f64).powi(n_sites as i32).min(u64::MAX as f64) as u64,
        limit: MAX_AMPLITUDES,
    })
}

/// Index map `sigma -> -sigma (mod d)` site-wise.
pub(crate) fn negation_permutation(dim: PrimeDim, n_sites: usize) -> Vec<usize> {
    let d = dim.du();
    let len = d.pow(n_sites as u32);
    let mut out = alloc::vec![0usize; len];
    for (i, o) in out.iter_mut().enumerate() {
        let mut rest = i;
        let mut stride = 1;
        let mut j = 0;
        for _ in 0..n_sites {
            let s = rest % d;
            rest /= d;
            j += ((d - s) % d) * stride;
            stride *= d;
        }
        *o = j;
    }
    out
}

/// The `d x d` discrete Fourier matrix `F[j][k] = w^(jk) / sqrt(d)`, a
/// Clifford gate.
pub fn fourier_matrix(dim: PrimeDim) -> Vec<Complex64> {
    let d = dim.du();
    let s = 1.0 / (d as f64).sqrt();
    let mut m = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            m.push(dim.omega(((j * k) % d) as u32) * s);
        }
    }
    m
}

pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
}
