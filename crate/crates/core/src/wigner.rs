//! Discrete Wigner values of a pure state and of its reduced states.
//!
//! All values here are the unnormalized `W~(u) = Tr(A_u rho_R) = <psi|A_u (x) 1|psi>`;
//! the normalized Wigner function is `W~ / d^l` for a region of `l` sites.
//! Reduced density matrices are never built: every value is a full-chain
//! expectation costing `O(d^L)`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::par;
use crate::qudit::{apply_phase_point_on, check_sites, PhasePoint, PrimeDim};
use crate::state::StateVector;

/// Imaginary parts above this are reported as errors.
pub const IMAG_HARD_LIMIT: f64 = 1e-6;
/// Imaginary parts expected from round-off stay below this.
pub const IMAG_TOLERANCE: f64 = 1e-10;

/// Largest table built by [`full_table`]: `3^14` entries (7 qutrits).
pub const FULL_TABLE_LIMIT: u64 = 4_782_969;
/// Largest `d^(2l) * d^L` work accepted by [`naive_table`].
pub const NAIVE_TABLE_LIMIT: u64 = 1 << 30;

/// A set of sites of a chain of `n_sites` sites. Sites are 0-based, sorted
/// and distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionSpec {
    sites: Vec<usize>,
    n_sites: usize,
}

impl RegionSpec {
    pub fn new(mut sites: Vec<usize>, n_sites: usize) -> Result<Self> {
        sites.sort_unstable();
        if sites.is_empty() {
            return Err(Error::InvalidRegion("empty region".into()));
        }
        check_sites(n_sites, &sites)?;
        Ok(RegionSpec { sites, n_sites })
    }

    /// Region from 1-based site labels `1..=L`.
    pub fn from_one_based(labels: &[usize], n_sites: usize) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::InvalidRegion("site labels start at 1".into()));
        }
        Self::new(labels.iter().map(|s| s - 1).collect(), n_sites)
    }

    /// Sites `[start, end)`.
    pub fn range(start: usize, end: usize, n_sites: usize) -> Result<Self> {
        Self::new((start..end).collect(), n_sites)
    }

    pub fn full(n_sites: usize) -> Result<Self> {
        Self::range(0, n_sites, n_sites)
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn chain_len(&self) -> usize {
        self.n_sites
    }

    pub fn is_full(&self) -> bool {
        self.sites.len() == self.n_sites
    }

    /// Sites of the chain not in this region (possibly empty).
    pub fn complement(&self) -> Vec<usize> {
        (0..self.n_sites).filter(|s| !self.sites.contains(s)).collect()
    }

    fn check_state(&self, psi: &StateVector) -> Result<()> {
        if psi.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch(format!(
                "region over a chain of {} sites, state has {}",
                self.n_sites,
                psi.n_sites()
            )));
        }
        Ok(())
    }

    fn check_point(&self, psi: &StateVector, u: &PhasePoint) -> Result<()> {
        self.check_state(psi)?;
        if u.len() != self.len() || u.dim() != psi.dim() {
            return Err(Error::DimensionMismatch(format!(
                "phase point over {} sites for a region of {}",
                u.len(),
                self.len()
            )));
        }
        Ok(())
    }
}

/// All `d^(2l)` values `W~(u)` of a region, in row-major order: site codes
/// `a_i * d + a_i'` with the first region site most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerTable {
    pub region: RegionSpec,
    pub dim: PrimeDim,
    pub values: Vec<f64>,
}

impl WignerTable {
    pub fn n_sites(&self) -> usize {
        self.region.len()
    }

    pub fn value(&self, u: &PhasePoint) -> f64 {
        self.values[u.index() as usize]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn sum_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `d^l`, the normalization turning `W~` into `W`.
    pub fn scale(&self) -> f64 {
        (self.dim.d() as f64).powi(self.n_sites() as i32)
    }
}

/// Evaluates `W~(u)` for many points of one region of one state.
///
/// Precomputes the region index of every amplitude; each evaluation is one
/// pass over the amplitudes.
pub struct WignerEvaluator<'a> {
    psi: &'a StateVector,
    region: RegionSpec,
    strides: Vec<usize>,
    region_index: Vec<u32>,
}

impl<'a> WignerEvaluator<'a> {
    pub fn new(psi: &'a StateVector, region: &RegionSpec) -> Result<Self> {
        region.check_state(psi)?;
        let d = psi.dim().du();
        let n = psi.n_sites();
        let strides: Vec<usize> = region
            .sites()
            .iter()
            .map(|&s| d.pow((n - 1 - s) as u32))
            .collect();
        let region_index = (0..psi.len())
            .map(|i| {
                strides
                    .iter()
                    .fold(0u32, |acc, &st| acc * d as u32 + ((i / st) % d) as u32)
            })
            .collect();
        Ok(WignerEvaluator {
            psi,
            region: region.clone(),
            strides,
            region_index,
        })
    }

    pub fn region(&self) -> &RegionSpec {
        &self.region
    }

    pub fn state(&self) -> &StateVector {
        self.psi
    }

    /// Index shift `(t - s) . stride` for every region configuration `s`,
    /// where `t_j = 2 a'_j - s_j`.
    fn shifts(&self, a_prime: &[u32]) -> Vec<isize> {
        let dim = self.psi.dim();
        let d = dim.du();
        let mut out = alloc::vec![0isize];
        for (j, &stride) in self.strides.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * d);
            for &base in &out {
                for s in 0..d as i64 {
                    let t = dim.reduce(2 * a_prime[j] as i64 - s) as i64;
                    next.push(base + ((t - s) * stride as i64) as isize);
                }
            }
            out = next;
        }
        out
    }

    /// Target-index offsets and phase exponents of `A_u (x) 1` for every
    /// configuration of the chain sites `sites`, first site most significant.
    fn half_tables(&self, u: &PhasePoint, sites: core::ops::Range<usize>) -> (Vec<isize>, Vec<u8>) {
        let dim = u.dim();
        let d = dim.du();
        let n = self.psi.n_sites();
        let mut offsets = alloc::vec![0isize];
        let mut exps = alloc::vec![0u8];
        for site in sites {
            let stride = d.pow((n - 1 - site) as u32) as isize;
            let slot = self.region.sites().binary_search(&site).ok();
            let mut next_off = Vec::with_capacity(offsets.len() * d);
            let mut next_exp = Vec::with_capacity(offsets.len() * d);
            for (&off, &e) in offsets.iter().zip(&exps) {
                for s in 0..d as i64 {
                    let (t, k) = match slot {
                        Some(j) => {
                            let (a, ap) = u.pair(j);
                            let t = dim.reduce(2 * ap as i64 - s) as i64;
                            (t, dim.reduce(e as i64 + 2 * a as i64 * (ap as i64 - s)))
                        }
                        None => (s, e as u32),
                    };
                    next_off.push(off + (t - s) as isize * stride);
                    next_exp.push(k as u8);
                }
            }
            offsets = next_off;
            exps = next_exp;
        }
        (offsets, exps)
    }

    /// `W~(u)` as a complex number (its imaginary part is round-off).
    ///
    /// The chain is split into a high and a low half; the action of `A_u` on
    /// each half is tabulated once, so one evaluation costs a single pass
    /// over the amplitudes plus `O(d^(L/2))` set-up.
    pub fn evaluate_complex(&self, u: &PhasePoint) -> Result<Complex64> {
        self.region.check_point(self.psi, u)?;
        let dim = self.psi.dim();
        let d = dim.du();
        let n = self.psi.n_sites();
        let split = n - n / 2;
        let (high_off, high_exp) = self.half_tables(u, 0..split);
        let (low_off, low_exp) = self.half_tables(u, split..n);
        let n_low = low_off.len();
        let amps = self.psi.amplitudes();
        let per_chunk = (par::CHUNK / n_low).max(1);
        let partial = par::map_chunks(high_off.len(), per_chunk, |range| {
            let mut acc = [Complex64::new(0.0, 0.0); 7];
            for h in range {
                let base = h * n_low;
                let shift = base as isize + high_off[h];
                let mut local = [Complex64::new(0.0, 0.0); 7];
                for (l, (&off, &e)) in low_off.iter().zip(&low_exp).enumerate() {
                    let t = (shift + off + l as isize) as usize;
                    local[e as usize] += amps[t].conj() * amps[base + l];
                }
                let eh = high_exp[h] as usize;
                for (j, v) in local.iter().enumerate().take(d) {
                    acc[(eh + j) % d] += v;
                }
            }
            acc
        });
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..d {
            let s: Complex64 = partial.iter().map(|p| p[k]).sum();
            total += dim.omega(k as u32) * s;
        }
        Ok(total)
    }

    /// `W~(u) = <psi|A_u (x) 1|psi>`.
    pub fn evaluate(&self, u: &PhasePoint) -> Result<f64> {
        real_part(self.evaluate_complex(u)?)
    }

    /// The correlation `f(s) = sum_c conj(psi[t(s), c]) psi[s, c]` for one
    /// `a'` block, indexed by region configuration.
    fn correlation(&self, a_prime: &[u32]) -> Vec<Complex64> {
        let shifts = self.shifts(a_prime);
        let amps = self.psi.amplitudes();
        let mut f = alloc::vec![Complex64::new(0.0, 0.0); shifts.len()];
        for (i, &r) in self.region_index.iter().enumerate() {
            let r = r as usize;
            let t = (i as isize + shifts[r]) as usize;
            f[r] += amps[t].conj() * amps[i];
        }
        f
    }
}

pub(crate) fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_HARD_LIMIT {
        return Err(Error::NonHermitian(z.im));
    }
    Ok(z.re)
}

/// `W~(u) = Tr(A_u rho_region)` for one point.
pub fn wigner_value(psi: &StateVector, region: &RegionSpec, u: &PhasePoint) -> Result<f64> {
    region.check_point(psi, u)?;
    WignerEvaluator::new(psi, region)?.evaluate(u)
}

/// In-place multi-dimensional DFT `F(k) = sum_s w^(-k.s) f(s)` over `n`
/// base-`d` digits.
pub(crate) fn dft_in_place(dim: PrimeDim, n: usize, f: &mut [Complex64], sign: i64) {
    let d = dim.du();
    let mut local = [Complex64::new(0.0, 0.0); 7];
    for j in 0..n {
        let stride = d.pow((n - 1 - j) as u32);
        let block = stride * d;
        for base in (0..f.len()).step_by(block) {
            for off in 0..stride {
                for (s, l) in local.iter_mut().enumerate().take(d) {
                    *l = f[base + off + s * stride];
                }
                for k in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (s, l) in local.iter().enumerate().take(d) {
                        acc += dim.omega(dim.reduce(sign * (k * s) as i64)) * l;
                    }
                    f[base + off + k * stride] = acc;
                }
            }
        }
    }
}

fn table_guard(dim: PrimeDim, ell: usize) -> Result<u64> {
    let entries = (dim.d() as u64).checked_pow(2 * ell as u32).unwrap_or(u64::MAX);
    if entries > FULL_TABLE_LIMIT {
        return Err(Error::Guard {
            what: "Wigner table entries",
            requested: entries,
            limit: FULL_TABLE_LIMIT,
        });
    }
    Ok(entries)
}

/// Every `W~(u)` of a region.
///
/// For each `a'` block the correlation `f(s)` is Fourier transformed once,
/// giving all `a` at the same time: `W~(a, a') = w^(2a.a') F(2a)`.
pub fn full_table(psi: &StateVector, region: &RegionSpec) -> Result<WignerTable> {
    let dim = psi.dim();
    let d = dim.du();
    let ell = region.len();
    table_guard(dim, ell)?;
    let eval = WignerEvaluator::new(psi, region)?;
    let block = d.pow(ell as u32);

    let blocks: Vec<Result<Vec<f64>>> = par::map_jobs(block, |ap_index| {
        let a_prime = digits(ap_index, d, ell);
        let mut f = eval.correlation(&a_prime);
        dft_in_place(dim, ell, &mut f, -1);
        // values indexed by a
        let mut out = alloc::vec![0.0; block];
        for (a_index, o) in out.iter_mut().enumerate() {
            let a = digits(a_index, d, ell);
            let mut k_index = 0usize;
            let mut phase = 0i64;
            for (&aj, &apj) in a.iter().zip(&a_prime) {
                k_index = k_index * d + dim.reduce(2 * aj as i64) as usize;
                phase += 2 * aj as i64 * apj as i64;
            }
            *o = real_part(dim.omega(dim.reduce(phase)) * f[k_index])?;
        }
        Ok(out)
    });

    let mut values = alloc::vec![0.0; block * block];
    for (ap_index, col) in blocks.into_iter().enumerate() {
        let col = col?;
        let a_prime = digits(ap_index, d, ell);
        for (a_index, v) in col.into_iter().enumerate() {
            let a = digits(a_index, d, ell);
            let idx = a
                .iter()
                .zip(&a_prime)
                .fold(0usize, |acc, (&x, &y)| acc * d * d + x as usize * d + y as usize);
            values[idx] = v;
        }
    }
    Ok(WignerTable {
        region: region.clone(),
        dim,
        values,
    })
}

/// Reference table: applies `A_u (x) 1` for every `u` and takes the overlap.
/// Costs `O(d^(2l) d^L)`.
pub fn naive_table(psi: &StateVector, region: &RegionSpec) -> Result<WignerTable> {
    region.check_state(psi)?;
    let dim = psi.dim();
    let entries = table_guard(dim, region.len())?;
    let work = entries.saturating_mul(psi.len() as u64);
    if work > NAIVE_TABLE_LIMIT {
        return Err(Error::Guard {
            what: "naive Wigner table work",
            requested: work,
            limit: NAIVE_TABLE_LIMIT,
        });
    }
    let mut values = Vec::with_capacity(entries as usize);
    for idx in 0..entries {
        let u = PhasePoint::from_index(dim, region.len(), idx);
        let moved = apply_phase_point_on(psi, region.sites(), &u)?;
        values.push(real_part(psi.inner(&moved)?)?);
    }
    Ok(WignerTable {
        region: region.clone(),
        dim,
        values,
    })
}

/// Second Rényi entropy of the reduced state from the purity sum rule,
/// `S_2 = -log(sum_u W~(u)^2 / d^l)`.
pub fn renyi2_entropy(psi: &StateVector, region: &RegionSpec) -> Result<f64> {
    let table = full_table(psi, region)?;
    Ok(-(table.sum_squares() / table.scale()).ln())
}

pub(crate) fn digits(mut index: usize, d: usize, n: usize) -> Vec<u32> {
    let mut out = alloc::vec![0u32; n];
    for o in out.iter_mut().rev() {
        *o = (index % d) as u32;
        index /= d;
    }
    out
}
