//! Modular arithmetic and operator actions for generalized Pauli strings and
//! phase-space point operators on odd-prime qudits.
//!
//! Conventions:
//!
//! * `X|k> = |k+1>`, `Z|k> = w^k |k>` with `w = exp(2 pi i / d)`,
//! * `T_(a,a') = w^(-a a' / 2) Z^a X^a'`, so
//!   `T_u |s> = w^(a.(a'/2 + s)) |a' + s>`,
//! * `A_u = T_u A_0 T_u^dagger` with `A_0|s> = |-s>`, so
//!   `A_u |s> = w^(2a.(a' - s)) |2a' - s>`.
//!
//! Site 0 is the most significant base-`d` digit of an amplitude index.
//! Exponents stay in `Z_d` until an action is applied to amplitudes.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// An odd prime local dimension, `d` in `{3, 5, 7}`.
#[derive(Clone, Copy)]
pub struct PrimeDim {
    d: u32,
    roots: [Complex64; 7],
}

impl PrimeDim {
    pub fn new(d: u32) -> Result<Self> {
        if !matches!(d, 3 | 5 | 7) {
            return Err(Error::UnsupportedDimension(d));
        }
        let mut roots = [Complex64::new(0.0, 0.0); 7];
        for (k, r) in roots.iter_mut().enumerate().take(d as usize) {
            let angle = 2.0 * core::f64::consts::PI * k as f64 / d as f64;
            *r = Complex64::new(angle.cos(), angle.sin());
        }
        // exact values where they are representable
        roots[0] = Complex64::new(1.0, 0.0);
        Ok(PrimeDim { d, roots })
    }

    /// The qutrit, `d = 3`.
    pub fn qutrit() -> Self {
        Self::new(3).expect("3 is supported")
    }

    #[inline]
    pub fn d(&self) -> u32 {
        self.d
    }

    #[inline]
    pub fn du(&self) -> usize {
        self.d as usize
    }

    /// `2^-1` in `Z_d`, equal to `(d + 1) / 2`.
    #[inline]
    pub fn half_inv(&self) -> u32 {
        (self.d + 1) / 2
    }

    /// Reduces any integer into `[0, d)`.
    #[inline]
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.d as i64) as u32
    }

    /// `w^k`.
    #[inline]
    pub fn omega(&self, k: u32) -> Complex64 {
        self.roots[(k % self.d) as usize]
    }

    /// `d^n`, or `None` on overflow.
    pub fn pow(&self, n: usize) -> Option<usize> {
        (self.d as usize).checked_pow(n as u32)
    }
}

impl PartialEq for PrimeDim {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d
    }
}

impl Eq for PrimeDim {}

impl core::hash::Hash for PrimeDim {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.d.hash(state);
    }
}

impl fmt::Debug for PrimeDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeDim({})", self.d)
    }
}

/// The scalar `w^k`, kept as the integer `k mod d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseExponent {
    pub k: u32,
}

impl PhaseExponent {
    pub fn new(dim: PrimeDim, k: i64) -> Self {
        PhaseExponent { k: dim.reduce(k) }
    }

    pub fn to_complex(self, dim: PrimeDim) -> Complex64 {
        dim.omega(self.k)
    }
}

/// A computational basis configuration `sigma`, one value in `Z_d` per site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub sigma: Vec<u32>,
}

impl BasisState {
    pub fn from_index(dim: PrimeDim, n_sites: usize, mut index: usize) -> Self {
        let d = dim.du();
        let mut sigma = alloc::vec![0u32; n_sites];
        for s in sigma.iter_mut().rev() {
            *s = (index % d) as u32;
            index /= d;
        }
        BasisState { sigma }
    }

    pub fn index(&self, dim: PrimeDim) -> usize {
        self.sigma
            .iter()
            .fold(0usize, |acc, &s| acc * dim.du() + s as usize)
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }
}

/// A point `u = (a_1, a_1', ..., a_N, a_N')` of the discrete phase space
/// `Z_d^(2N)`.
///
/// Labels both the Pauli string `T_u` and the point operator `A_u`. Each site
/// is stored as the code `a * d + a'`, which is also the site's digit in the
/// row-major table order used by [`crate::wigner::WignerTable`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PhasePoint {
    dim: PrimeDim,
    codes: Vec<u32>,
}

impl fmt::Debug for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.len()).map(|i| self.pair(i)))
            .finish()
    }
}

impl PhasePoint {
    pub fn zero(dim: PrimeDim, n_sites: usize) -> Self {
        PhasePoint {
            dim,
            codes: alloc::vec![0; n_sites],
        }
    }

    /// Builds a point from `(a_i, a_i')` pairs; entries are reduced mod `d`.
    pub fn from_pairs(dim: PrimeDim, pairs: &[(i64, i64)]) -> Self {
        let codes = pairs
            .iter()
            .map(|&(a, ap)| dim.reduce(a) * dim.d() + dim.reduce(ap))
            .collect();
        PhasePoint { dim, codes }
    }

    /// Builds a point from per-site codes `a * d + a'`.
    pub fn from_codes(dim: PrimeDim, codes: Vec<u32>) -> Result<Self> {
        let d2 = dim.d() * dim.d();
        if let Some(c) = codes.iter().find(|&&c| c >= d2) {
            return Err(Error::InvalidParameter(format!(
                "site code {c} out of range for d = {}",
                dim.d()
            )));
        }
        Ok(PhasePoint { dim, codes })
    }

    /// The point with row-major table index `index` over `n_sites` sites.
    pub fn from_index(dim: PrimeDim, n_sites: usize, mut index: u64) -> Self {
        let d2 = (dim.d() * dim.d()) as u64;
        let mut codes = alloc::vec![0u32; n_sites];
        for c in codes.iter_mut().rev() {
            *c = (index % d2) as u32;
            index /= d2;
        }
        PhasePoint { dim, codes }
    }

    /// Row-major table index, site 0 most significant.
    pub fn index(&self) -> u64 {
        let d2 = (self.dim.d() * self.dim.d()) as u64;
        self.codes.iter().fold(0u64, |acc, &c| acc * d2 + c as u64)
    }

    #[inline]
    pub fn dim(&self) -> PrimeDim {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    #[inline]
    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    #[inline]
    pub fn set_code(&mut self, site: usize, code: u32) {
        debug_assert!(code < self.dim.d() * self.dim.d());
        self.codes[site] = code;
    }

    /// `(a_i, a_i')` for site `i`.
    #[inline]
    pub fn pair(&self, i: usize) -> (u32, u32) {
        let d = self.dim.d();
        (self.codes[i] / d, self.codes[i] % d)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.len()).map(move |i| self.pair(i))
    }

    pub fn is_zero(&self) -> bool {
        self.codes.iter().all(|&c| c == 0)
    }

    /// `u (+) v`: the point over the union of two disjoint regions, `self`
    /// first.
    pub fn concat(&self, other: &PhasePoint) -> Result<PhasePoint> {
        self.check_dim(other)?;
        let mut codes = self.codes.clone();
        codes.extend_from_slice(&other.codes);
        Ok(PhasePoint {
            dim: self.dim,
            codes,
        })
    }

    /// Component-wise `u + v`.
    pub fn add(&self, other: &PhasePoint) -> Result<PhasePoint> {
        self.check_same_region(other)?;
        let pairs: Vec<(i64, i64)> = self
            .pairs()
            .zip(other.pairs())
            .map(|((a, ap), (b, bp))| ((a + b) as i64, (ap + bp) as i64))
            .collect();
        Ok(PhasePoint::from_pairs(self.dim, &pairs))
    }

    /// Component-wise `k * u`.
    pub fn scale(&self, k: i64) -> PhasePoint {
        let pairs: Vec<(i64, i64)> = self
            .pairs()
            .map(|(a, ap)| (k * a as i64, k * ap as i64))
            .collect();
        PhasePoint::from_pairs(self.dim, &pairs)
    }

    fn check_dim(&self, other: &PhasePoint) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "phase points over d = {} and d = {}",
                self.dim.d(),
                other.dim.d()
            )));
        }
        Ok(())
    }

    fn check_same_region(&self, other: &PhasePoint) -> Result<()> {
        self.check_dim(other)?;
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "phase points over {} and {} sites",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }
}

/// `(a.b' - a'.b) mod d`, the exponent in `T_u T_v = w^k T_v T_u`.
pub fn symplectic_phase(u: &PhasePoint, v: &PhasePoint) -> Result<PhaseExponent> {
    u.check_same_region(v)?;
    let k: i64 = u
        .pairs()
        .zip(v.pairs())
        .map(|((a, ap), (b, bp))| a as i64 * bp as i64 - ap as i64 * b as i64)
        .sum();
    Ok(PhaseExponent::new(u.dim, k))
}

/// Exact action of `T_u` on a basis state: `T_u|s> = w^k |s'>`.
pub fn pauli_on_basis(u: &PhasePoint, sigma: &BasisState) -> Result<(PhaseExponent, BasisState)> {
    check_basis(u, sigma)?;
    let dim = u.dim;
    let h = dim.half_inv() as i64;
    let mut k = 0i64;
    let mut out = Vec::with_capacity(sigma.len());
    for ((a, ap), &s) in u.pairs().zip(&sigma.sigma) {
        k += a as i64 * (h * ap as i64 + s as i64);
        out.push(dim.reduce(ap as i64 + s as i64));
    }
    Ok((PhaseExponent::new(dim, k), BasisState { sigma: out }))
}

/// Exact action of `A_u` on a basis state: `A_u|s> = w^k |s'>`.
pub fn phase_point_on_basis(
    u: &PhasePoint,
    sigma: &BasisState,
) -> Result<(PhaseExponent, BasisState)> {
    check_basis(u, sigma)?;
    let dim = u.dim;
    let mut k = 0i64;
    let mut out = Vec::with_capacity(sigma.len());
    for ((a, ap), &s) in u.pairs().zip(&sigma.sigma) {
        k += 2 * a as i64 * (ap as i64 - s as i64);
        out.push(dim.reduce(2 * ap as i64 - s as i64));
    }
    Ok((PhaseExponent::new(dim, k), BasisState { sigma: out }))
}

fn check_basis(u: &PhasePoint, sigma: &BasisState) -> Result<()> {
    if u.len() != sigma.len() {
        return Err(Error::DimensionMismatch(format!(
            "phase point over {} sites, basis state over {}",
            u.len(),
            sigma.len()
        )));
    }
    if sigma.sigma.iter().any(|&s| s >= u.dim.d()) {
        return Err(Error::InvalidParameter(format!(
            "basis state entries must lie in [0, {})",
            u.dim.d()
        )));
    }
    Ok(())
}

/// Per-site lookup tables for a point operator restricted to a set of
/// sites: for every local value `s` the index shift and phase exponent.
pub(crate) struct LocalAction {
    /// `strides[j]` is the amplitude stride of the j-th acted-on site.
    pub strides: Vec<usize>,
    /// `shift[j][s]` is `(s' - s) * stride`.
    pub shift: Vec<Vec<isize>>,
    /// `phase[j][s]` is the exponent contributed by site `j` in state `s`.
    pub phase: Vec<Vec<u32>>,
}

impl LocalAction {
    fn build(
        dim: PrimeDim,
        n_sites: usize,
        sites: &[usize],
        u: &PhasePoint,
        f: impl Fn(u32, u32, u32) -> (i64, i64),
    ) -> Self {
        let d = dim.du();
        let mut strides = Vec::with_capacity(sites.len());
        let mut shift = Vec::with_capacity(sites.len());
        let mut phase = Vec::with_capacity(sites.len());
        for (j, &site) in sites.iter().enumerate() {
            let stride = d.pow((n_sites - 1 - site) as u32);
            let (a, ap) = u.pair(j);
            let mut sh = Vec::with_capacity(d);
            let mut ph = Vec::with_capacity(d);
            for s in 0..d as u32 {
                let (target, k) = f(a, ap, s);
                let target = dim.reduce(target);
                sh.push((target as isize - s as isize) * stride as isize);
                ph.push(dim.reduce(k));
            }
            strides.push(stride);
            shift.push(sh);
            phase.push(ph);
        }
        LocalAction {
            strides,
            shift,
            phase,
        }
    }

    pub fn phase_point(dim: PrimeDim, n_sites: usize, sites: &[usize], u: &PhasePoint) -> Self {
        Self::build(dim, n_sites, sites, u, |a, ap, s| {
            (
                2 * ap as i64 - s as i64,
                2 * a as i64 * (ap as i64 - s as i64),
            )
        })
    }

    pub fn pauli(dim: PrimeDim, n_sites: usize, sites: &[usize], u: &PhasePoint) -> Self {
        let h = dim.half_inv() as i64;
        Self::build(dim, n_sites, sites, u, move |a, ap, s| {
            (
                ap as i64 + s as i64,
                a as i64 * (h * ap as i64 + s as i64),
            )
        })
    }

    /// Applies the action to every amplitude: `out[target(i)] = w^k psi[i]`.
    pub fn apply(&self, dim: PrimeDim, amps: &[Complex64]) -> Vec<Complex64> {
        let d = dim.du();
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); amps.len()];
        for (i, &c) in amps.iter().enumerate() {
            let mut k = 0u32;
            let mut t = i as isize;
            for j in 0..self.strides.len() {
                let s = (i / self.strides[j]) % d;
                k += self.phase[j][s];
                t += self.shift[j][s];
            }
            out[t as usize] = dim.omega(k % dim.d()) * c;
        }
        out
    }
}

fn check_state(psi: &StateVector, u: &PhasePoint, n_sites: usize) -> Result<()> {
    if psi.dim() != u.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state over d = {}, phase point over d = {}",
            psi.dim().d(),
            u.dim().d()
        )));
    }
    if n_sites != u.len() {
        return Err(Error::DimensionMismatch(format!(
            "operator acts on {} sites, phase point has {}",
            n_sites,
            u.len()
        )));
    }
    Ok(())
}

pub(crate) fn check_sites(n_sites: usize, sites: &[usize]) -> Result<()> {
    for (j, &s) in sites.iter().enumerate() {
        if s >= n_sites {
            return Err(Error::InvalidRegion(format!(
                "site {s} outside a chain of {n_sites} sites"
            )));
        }
        if sites[..j].contains(&s) {
            return Err(Error::InvalidRegion(format!("site {s} listed twice")));
        }
    }
    Ok(())
}

/// `T_u |psi>` for a Pauli string over the whole chain.
pub fn apply_pauli_string(psi: &StateVector, u: &PhasePoint) -> Result<StateVector> {
    check_state(psi, u, psi.n_sites())?;
    let sites: Vec<usize> = (0..psi.n_sites()).collect();
    let act = LocalAction::pauli(psi.dim(), psi.n_sites(), &sites, u);
    StateVector::new(psi.dim(), psi.n_sites(), act.apply(psi.dim(), psi.amplitudes()))
}

/// `A_u |psi>` for a point operator over the whole chain.
pub fn apply_phase_point(psi: &StateVector, u: &PhasePoint) -> Result<StateVector> {
    let sites: Vec<usize> = (0..psi.n_sites()).collect();
    apply_phase_point_on(psi, &sites, u)
}

/// `(A_u (x) 1) |psi>` with `A_u` acting on the listed sites (0-based, in the
/// order matching `u`) and the identity elsewhere.
pub fn apply_phase_point_on(
    psi: &StateVector,
    sites: &[usize],
    u: &PhasePoint,
) -> Result<StateVector> {
    check_state(psi, u, sites.len())?;
    check_sites(psi.n_sites(), sites)?;
    let act = LocalAction::phase_point(psi.dim(), psi.n_sites(), sites, u);
    StateVector::new(psi.dim(), psi.n_sites(), act.apply(psi.dim(), psi.amplitudes()))
}

/// `(T_u (x) 1) |psi>` with `T_u` acting on the listed sites.
pub fn apply_pauli_string_on(
    psi: &StateVector,
    sites: &[usize],
    u: &PhasePoint,
) -> Result<StateVector> {
    check_state(psi, u, sites.len())?;
    check_sites(psi.n_sites(), sites)?;
    let act = LocalAction::pauli(psi.dim(), psi.n_sites(), sites, u);
    StateVector::new(psi.dim(), psi.n_sites(), act.apply(psi.dim(), psi.amplitudes()))
}
