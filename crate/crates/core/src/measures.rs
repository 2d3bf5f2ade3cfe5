//! Exact non-stabilizerness measures.
//!
//! All logarithms are natural.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par;
use crate::qudit::{apply_phase_point, PhasePoint, PrimeDim};
use crate::state::{fourier_matrix, StateVector};
use crate::wigner::{digits, dft_in_place, RegionSpec, WignerEvaluator, WignerTable};

/// Largest chain for which all `d^(2N)` Pauli expectations are enumerated
/// (7 qutrits).
pub const PAULI_TABLE_LIMIT: u64 = 4_782_969;
/// Largest chain accepted by [`stabilizer_nullity`].
pub const NULLITY_MAX_SITES: usize = 5;
/// Largest chain accepted by [`min_relative_entropy`].
pub const DMIN_MAX_SITES: usize = 2;
/// `|<T_u>|` within this of one counts as a stabilizer.
pub const STABILIZER_TOL: f64 = 1e-8;

/// Probabilities below this contribute nothing to Shannon sums.
const SHANNON_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureKind {
    Mana,
    ManaEntropy(f64),
    StabilizerEntropy(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureValue {
    pub kind: MeasureKind,
    pub value: f64,
}

/// `M = log(sum_u |W(u)|)` with `W = W~ / d^l`.
pub fn mana(table: &WignerTable) -> f64 {
    let l1: f64 = table.values.iter().map(|v| v.abs()).sum();
    (l1 / table.scale()).ln()
}

/// Rényi-`n` entropy of `|x_u|^2 / d^N` shifted by `-N log d`:
/// `1/(1-n) log sum_u |x_u|^(2n) / d^N`, Shannon limit at `n = 1`.
fn shifted_renyi(abs_values: impl Iterator<Item = f64> + Clone, n: f64, n_sites: usize, d: u32) -> f64 {
    let log_dn = n_sites as f64 * (d as f64).ln();
    let dn = (d as f64).powi(n_sites as i32);
    if (n - 1.0).abs() < 1e-12 {
        let h: f64 = abs_values
            .map(|x| x * x / dn)
            .filter(|&p| p > SHANNON_FLOOR)
            .map(|p| -p * p.ln())
            .sum();
        h - log_dn
    } else if n == 0.0 {
        let support = abs_values.filter(|&x| x > 1e-12).count() as f64;
        (support / dn).ln()
    } else {
        let s: f64 = abs_values.map(|x| x.powf(2.0 * n)).sum();
        (s / dn).ln() / (1.0 - n)
    }
}

fn check_index(n: f64) -> Result<()> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(Error::InvalidParameter(format!("Rényi index must be >= 0, got {n}")));
    }
    Ok(())
}

/// Mana entropy `M_n` of a pure-state table; `M_(1/2) = 2 M`.
pub fn mana_entropy(table: &WignerTable, n: f64) -> Result<f64> {
    check_index(n)?;
    Ok(shifted_renyi(
        table.values.iter().map(|v| v.abs()),
        n,
        table.n_sites(),
        table.dim.d(),
    ))
}

/// `<psi|T_u|psi>` for a Pauli string over the whole chain.
pub fn pauli_expectation(psi: &StateVector, u: &PhasePoint) -> Result<Complex64> {
    if u.len() != psi.n_sites() || u.dim() != psi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Pauli string over {} sites for a state of {}",
            u.len(),
            psi.n_sites()
        )));
    }
    let dim = psi.dim();
    let d = dim.du();
    let h = dim.half_inv() as i64;
    let pairs: Vec<(u32, u32)> = u.pairs().collect();
    let amps = psi.amplitudes();
    let base_phase: i64 = pairs.iter().map(|&(a, ap)| h * a as i64 * ap as i64).sum();
    let parts = par::map_chunks(amps.len(), par::CHUNK, |range| {
        let mut acc = [Complex64::new(0.0, 0.0); 7];
        for i in range {
            let mut rest = i;
            let mut k = base_phase;
            let mut t = 0usize;
            let mut stride = 1usize;
            for &(a, ap) in pairs.iter().rev() {
                let s = rest % d;
                rest /= d;
                k += a as i64 * s as i64;
                t += ((s + ap as usize) % d) * stride;
                stride *= d;
            }
            acc[dim.reduce(k) as usize] += amps[t].conj() * amps[i];
        }
        acc
    });
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..d {
        total += dim.omega(k as u32) * parts.iter().map(|p| p[k]).sum::<Complex64>();
    }
    Ok(total)
}

fn pauli_guard(dim: PrimeDim, n_sites: usize) -> Result<()> {
    let entries = (dim.d() as u64).checked_pow(2 * n_sites as u32).unwrap_or(u64::MAX);
    if entries > PAULI_TABLE_LIMIT {
        return Err(Error::Guard {
            what: "Pauli strings",
            requested: entries,
            limit: PAULI_TABLE_LIMIT,
        });
    }
    Ok(())
}

/// All `<psi|T_u|psi>` over the full chain, in the same row-major order as a
/// Wigner table.
pub fn pauli_table(psi: &StateVector) -> Result<Vec<Complex64>> {
    let dim = psi.dim();
    let n = psi.n_sites();
    pauli_guard(dim, n)?;
    let d = dim.du();
    let block = d.pow(n as u32);
    let h = dim.half_inv() as i64;
    let amps = psi.amplitudes();

    let cols: Vec<Vec<Complex64>> = par::map_jobs(block, |ap_index| {
        let a_prime = digits(ap_index, d, n);
        // g(s) = conj(c[s + a']) c[s]
        let mut g: Vec<Complex64> = (0..block)
            .map(|i| {
                let s = digits(i, d, n);
                let t = s
                    .iter()
                    .zip(&a_prime)
                    .fold(0usize, |acc, (&x, &y)| acc * d + ((x + y) as usize % d));
                amps[t].conj() * amps[i]
            })
            .collect();
        dft_in_place(dim, n, &mut g, 1);
        (0..block)
            .map(|a_index| {
                let a = digits(a_index, d, n);
                let phase: i64 = a.iter().zip(&a_prime).map(|(&x, &y)| h * x as i64 * y as i64).sum();
                dim.omega(dim.reduce(phase)) * g[a_index]
            })
            .collect()
    });

    let mut out = alloc::vec![Complex64::new(0.0, 0.0); block * block];
    for (ap_index, col) in cols.into_iter().enumerate() {
        let a_prime = digits(ap_index, d, n);
        for (a_index, v) in col.into_iter().enumerate() {
            let a = digits(a_index, d, n);
            let idx = a
                .iter()
                .zip(&a_prime)
                .fold(0usize, |acc, (&x, &y)| acc * d * d + x as usize * d + y as usize);
            out[idx] = v;
        }
    }
    Ok(out)
}

/// Stabilizer entropy `M_n = 1/(1-n) log sum_u |<T_u>|^(2n) / d^N`.
pub fn stabilizer_entropy(psi: &StateVector, n: f64) -> Result<f64> {
    check_index(n)?;
    let table = pauli_table(psi)?;
    Ok(stabilizer_entropy_from_table(&table, n, psi.n_sites(), psi.dim()))
}

pub fn stabilizer_entropy_from_table(table: &[Complex64], n: f64, n_sites: usize, dim: PrimeDim) -> f64 {
    shifted_renyi(table.iter().map(|z| z.norm()), n, n_sites, dim.d())
}

/// How the `a` points of a proposition check are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointSampling {
    Exhaustive,
    Random { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropositionReport {
    /// Eigenvalue of `A_b`, `+1` or `-1`.
    pub lambda: f64,
    /// `||A_b psi - lambda psi||`.
    pub eigen_residual: f64,
    /// `max_a |lambda <A_(a+b)> - <T_(2a)> w^(2(b.a' - b'.a))|`.
    pub max_deviation: f64,
    pub points_checked: usize,
    pub passed: bool,
}

/// Checks `lambda <A_(a+b)> = <T_(2a)> w^(2(b.a' - b'.a))` for a state with
/// `A_b psi = lambda psi`.
///
/// Fails with [`Error::NotAnEigenstate`] when the precondition does not hold
/// to `tol`.
pub fn proposition_check(
    psi: &StateVector,
    b: &PhasePoint,
    tol: f64,
    sampling: PointSampling,
) -> Result<PropositionReport> {
    let moved = apply_phase_point(psi, b)?;
    let overlap = psi.inner(&moved)?.re;
    let lambda = if overlap >= 0.0 { 1.0 } else { -1.0 };
    let eigen_residual = moved
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(m, c)| (m - c * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if !(eigen_residual <= tol) {
        return Err(Error::NotAnEigenstate {
            residual: eigen_residual,
        });
    }

    let dim = psi.dim();
    let n = psi.n_sites();
    let region = RegionSpec::full(n)?;
    let eval = WignerEvaluator::new(psi, &region)?;
    let total = (dim.d() as u64).pow(2 * n as u32);
    let points: Vec<PhasePoint> = match sampling {
        PointSampling::Exhaustive => (0..total).map(|i| PhasePoint::from_index(dim, n, i)).collect(),
        PointSampling::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| PhasePoint::from_index(dim, n, rng.random_range(0..total)))
                .collect()
        }
    };

    let mut max_deviation: f64 = 0.0;
    for a in &points {
        let lhs = eval.evaluate_complex(&a.add(b)?)? * lambda;
        let pauli = pauli_expectation(psi, &a.scale(2))?;
        let k: i64 = b
            .pairs()
            .zip(a.pairs())
            .map(|((bj, bpj), (aj, apj))| 2 * (bj as i64 * apj as i64 - bpj as i64 * aj as i64))
            .sum();
        let rhs = pauli * dim.omega(dim.reduce(k));
        max_deviation = max_deviation.max((lhs - rhs).norm());
    }
    Ok(PropositionReport {
        lambda,
        eigen_residual,
        max_deviation,
        points_checked: points.len(),
        passed: max_deviation < tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NullityResult {
    pub nu: usize,
    /// Number of `u` with `|<T_u>| = 1`.
    pub stabilizer_count: u64,
}

/// Stabilizer nullity `nu = N - log_d #{u : |<T_u>| = 1}`.
pub fn stabilizer_nullity(psi: &StateVector) -> Result<NullityResult> {
    let n = psi.n_sites();
    if n > NULLITY_MAX_SITES {
        return Err(Error::Guard {
            what: "sites for stabilizer nullity",
            requested: n as u64,
            limit: NULLITY_MAX_SITES as u64,
        });
    }
    let table = pauli_table(psi)?;
    let count = table.iter().filter(|z| z.norm() >= 1.0 - STABILIZER_TOL).count() as u64;
    let d = psi.dim().d() as u64;
    let mut k = 0usize;
    let mut p = 1u64;
    while p < count {
        p *= d;
        k += 1;
    }
    if p != count || k > n {
        return Err(Error::NotPowerOfDim {
            count,
            d: psi.dim().d(),
        });
    }
    Ok(NullityResult {
        nu: n - k,
        stabilizer_count: count,
    })
}

/// All pure stabilizer states of `n_sites` qudits, up to global phase.
///
/// Built as the orbit of `|0...0>` under per-site Fourier, phase and shift
/// gates and the two-site sum gates.
pub fn stabilizer_states(dim: PrimeDim, n_sites: usize) -> Result<Vec<StateVector>> {
    if n_sites == 0 || n_sites > DMIN_MAX_SITES {
        return Err(Error::Guard {
            what: "sites for stabilizer enumeration",
            requested: n_sites as u64,
            limit: DMIN_MAX_SITES as u64,
        });
    }
    let d = dim.du();
    let fourier = fourier_matrix(dim);
    let mut phase = alloc::vec![Complex64::new(0.0, 0.0); d * d];
    let mut shift = alloc::vec![Complex64::new(0.0, 0.0); d * d];
    for j in 0..d {
        // diag(w^(j(j-1)/2)) is Clifford for odd d
        phase[j * d + j] = dim.omega(((j * j.saturating_sub(1) / 2) % d) as u32);
        shift[((j + 1) % d) * d + j] = Complex64::new(1.0, 0.0);
    }
    let local = [fourier, phase, shift];

    // d^n prod_k (d^k + 1)
    let expected: usize = (1..=n_sites as u32).fold(d.pow(n_sites as u32), |acc, k| acc * (d.pow(k) + 1));
    let start = StateVector::basis(dim, n_sites, 0)?;
    let mut seen = BTreeSet::new();
    seen.insert(fingerprint(&start));
    let mut queue = VecDeque::from([start.clone()]);
    let mut out = alloc::vec![start];
    while let Some(psi) = queue.pop_front() {
        let mut next = Vec::new();
        for site in 0..n_sites {
            for m in &local {
                let mut phi = psi.clone();
                phi.apply_site_matrix(site, m)?;
                next.push(phi);
            }
        }
        if n_sites == 2 {
            for (control, target) in [(0usize, 1usize), (1, 0)] {
                next.push(sum_gate(&psi, control, target));
            }
        }
        for phi in next {
            if seen.insert(fingerprint(&phi)) {
                assert!(out.len() < expected, "stabilizer orbit exceeds {expected} states");
                out.push(phi.clone());
                queue.push_back(phi);
            }
        }
    }
    Ok(out)
}

/// `|x_c, x_t> -> |x_c, x_t + x_c>` on a two-site state.
fn sum_gate(psi: &StateVector, control: usize, target: usize) -> StateVector {
    let d = psi.dim().du();
    let src = psi.amplitudes();
    let mut amps = alloc::vec![Complex64::new(0.0, 0.0); src.len()];
    for (i, &c) in src.iter().enumerate() {
        let mut s = [i / d, i % d];
        s[target] = (s[target] + s[control]) % d;
        amps[s[0] * d + s[1]] = c;
    }
    StateVector::new(psi.dim(), 2, amps).expect("same shape")
}

/// Amplitudes with the global phase fixed by the first non-negligible entry,
/// rounded to `1e-7`.
fn fingerprint(psi: &StateVector) -> Vec<(i64, i64)> {
    let amps = psi.amplitudes();
    let pivot = amps.iter().find(|c| c.norm() > 1e-6).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let fix = pivot.conj() / pivot.norm();
    amps.iter()
        .map(|c| {
            let z = c * fix;
            ((z.re * 1e7).round() as i64, (z.im * 1e7).round() as i64)
        })
        .collect()
}

/// `D_min = -log max_phi |<phi|psi>|^2` over pure stabilizer states.
pub fn min_relative_entropy(psi: &StateVector) -> Result<f64> {
    let stab = stabilizer_states(psi.dim(), psi.n_sites())?;
    let mut best: f64 = 0.0;
    for phi in &stab {
        best = best.max(phi.inner(psi)?.norm_sqr());
    }
    Ok(-best.ln())
}
