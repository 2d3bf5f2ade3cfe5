//! Restarted Lanczos with full reorthogonalization for the lowest eigenpair.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ChainModel, Hamiltonian};
use crate::error::{Error, Result};
use crate::par;
use crate::state::{negation_permutation, standard_normal, StateVector};

/// Which invariant subspace the Krylov iteration is confined to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    /// The `+1` eigenspace of site-wise negation `A_0^(x)L`.
    NegationEven,
    /// No restriction.
    Full,
}

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Target for `||H psi - E psi||`.
    pub tol: f64,
    /// Maximum number of Hamiltonian applications.
    pub max_iter: usize,
    /// Krylov dimension before a restart.
    pub krylov_dim: usize,
    /// Caps the memory spent on Krylov vectors; `krylov_dim` shrinks to fit.
    pub memory_budget_bytes: usize,
    pub seed: u64,
    pub sector: Sector,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-10,
            max_iter: 5000,
            krylov_dim: 64,
            memory_budget_bytes: 1 << 30,
            seed: 0x5eed,
            sector: Sector::NegationEven,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundStateResult {
    pub psi: StateVector,
    pub energy: f64,
    pub residual_norm: f64,
    /// Hamiltonian applications used.
    pub iterations: usize,
    /// `<psi|A_0^(x)L|psi>` of the returned state.
    pub negation_expectation: f64,
}

/// Lowest eigenpair with the default options and the given tolerance.
pub fn ground_state(model: &ChainModel, tol: f64, max_iter: usize) -> Result<GroundStateResult> {
    ground_state_with(
        model,
        &LanczosOptions {
            tol,
            max_iter,
            ..LanczosOptions::default()
        },
    )
}

pub fn ground_state_with(model: &ChainModel, opts: &LanczosOptions) -> Result<GroundStateResult> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "tol must be positive and max_iter non-zero (tol = {}, max_iter = {})",
            opts.tol,
            opts.max_iter
        )));
    }
    let ham = Hamiltonian::new(model)?;
    let len = ham.len();
    let neg = match opts.sector {
        Sector::NegationEven => Some(negation_permutation(ham.dim(), ham.n_sites())),
        Sector::Full => None,
    };
    let project = |v: &mut [f64]| {
        if let Some(neg) = &neg {
            for i in 0..v.len() {
                let j = neg[i];
                if j > i {
                    let m = 0.5 * (v[i] + v[j]);
                    v[i] = m;
                    v[j] = m;
                }
            }
        }
    };

    let by_memory = (opts.memory_budget_bytes / (8 * len).max(1)).max(4);
    let kdim = opts.krylov_dim.min(by_memory).min(len).max(2);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..len).map(|_| standard_normal(&mut rng)).collect();
    project(&mut start);
    normalize(&mut start);

    let mut matvecs = 0usize;
    let mut best = f64::INFINITY;
    let mut hv = alloc::vec![0.0; len];
    loop {
        let (ritz, _) = lanczos_cycle(&ham, &start, kdim, opts, &mut matvecs, &project);
        let mut ritz = ritz;
        project(&mut ritz);
        normalize(&mut ritz);
        ham.apply_into(&ritz, &mut hv);
        matvecs += 1;
        let energy = dot(&ritz, &hv);
        let residual = residual_norm(&hv, &ritz, energy);
        best = best.min(residual);
        if residual <= opts.tol {
            return finish(ritz, energy, residual, matvecs, &ham);
        }
        if matvecs >= opts.max_iter {
            return Err(Error::NoConvergence {
                iterations: matvecs,
                residual: best,
            });
        }
        start = ritz;
    }
}

fn finish(
    ritz: Vec<f64>,
    energy: f64,
    residual: f64,
    matvecs: usize,
    ham: &Hamiltonian,
) -> Result<GroundStateResult> {
    let amps: Vec<Complex64> = ritz.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    let mut psi = StateVector::new(ham.dim(), ham.n_sites(), amps)?;
    let mut energy = energy;
    let mut residual = residual;
    let mut neg = psi.negation_expectation();
    if neg.abs() < 1.0 - 1e-6 {
        // degenerate pair: keep the symmetric combination
        psi.symmetrize_negation();
        let hpsi = ham.apply(psi.amplitudes());
        energy = psi
            .amplitudes()
            .iter()
            .zip(&hpsi)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        residual = hpsi
            .iter()
            .zip(psi.amplitudes())
            .map(|(h, c)| (h - c * energy).norm_sqr())
            .sum::<f64>()
            .sqrt();
        neg = psi.negation_expectation();
    }
    Ok(GroundStateResult {
        psi,
        energy,
        residual_norm: residual,
        iterations: matvecs,
        negation_expectation: neg,
    })
}

/// One Lanczos cycle from `start`; returns the lowest Ritz vector and value.
fn lanczos_cycle(
    ham: &Hamiltonian,
    start: &[f64],
    kdim: usize,
    opts: &LanczosOptions,
    matvecs: &mut usize,
    project: &dyn Fn(&mut [f64]),
) -> (Vec<f64>, f64) {
    let len = start.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(kdim);
    basis.push(start.to_vec());
    let mut alphas: Vec<f64> = Vec::with_capacity(kdim);
    let mut betas: Vec<f64> = Vec::with_capacity(kdim);
    let mut w = alloc::vec![0.0; len];
    let mut lowest;

    loop {
        let m = basis.len() - 1;
        ham.apply_into(&basis[m], &mut w);
        *matvecs += 1;
        let alpha = dot(&basis[m], &w);
        alphas.push(alpha);
        axpy(-alpha, &basis[m], &mut w);
        if m > 0 {
            axpy(-betas[m - 1], &basis[m - 1], &mut w);
        }
        // classical Gram-Schmidt, twice
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
        }
        project(&mut w);
        let beta = norm(&w);

        let (theta, y) = lowest_tridiagonal(&alphas, &betas);
        lowest = (theta, y);
        let estimate = beta * lowest.1[m].abs();
        let breakdown = beta < 1e-13 * (1.0 + alpha.abs());
        if estimate <= 0.1 * opts.tol
            || breakdown
            || basis.len() == kdim
            || *matvecs >= opts.max_iter
        {
            break;
        }
        betas.push(beta);
        let inv = 1.0 / beta;
        basis.push(w.iter().map(|x| x * inv).collect());
    }

    let (theta, y) = lowest;
    let mut ritz = alloc::vec![0.0; len];
    for (coef, v) in y.iter().zip(&basis) {
        axpy(*coef, v, &mut ritz);
    }
    (ritz, theta)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    par::map_chunks(a.len(), par::CHUNK, |r| {
        a[r.clone()].iter().zip(&b[r]).map(|(x, y)| x * y).sum::<f64>()
    })
    .into_iter()
    .sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    par::fill_chunks(y, par::CHUNK, |offset, chunk| {
        for (k, v) in chunk.iter_mut().enumerate() {
            *v += alpha * x[offset + k];
        }
    });
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) {
    let n = norm(a);
    if n > 0.0 {
        let inv = 1.0 / n;
        a.iter_mut().for_each(|x| *x *= inv);
    }
}

fn residual_norm(hv: &[f64], v: &[f64], energy: f64) -> f64 {
    hv.iter()
        .zip(v)
        .map(|(h, x)| (h - energy * x) * (h - energy * x))
        .sum::<f64>()
        .sqrt()
}

/// Lowest eigenpair of the symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `off` (`off.len() + 1 == diag.len()`, extra entries
/// ignored).
pub(crate) fn lowest_tridiagonal(diag: &[f64], off: &[f64]) -> (f64, Vec<f64>) {
    let (vals, vecs) = tridiagonal_eigen(diag, &off[..diag.len() - 1]);
    let n = diag.len();
    let mut best = 0;
    for i in 1..n {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    (vals[best], (0..n).map(|k| vecs[k * n + best]).collect())
}

/// Implicit QL with Wilkinson-style shifts. Returns eigenvalues and the
/// row-major eigenvector matrix whose column `i` belongs to eigenvalue `i`.
pub(crate) fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = alloc::vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    let mut z = alloc::vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    (d, z)
}
