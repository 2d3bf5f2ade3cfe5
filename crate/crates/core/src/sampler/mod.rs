//! Monte Carlo estimators for mana built on Metropolis sampling of phase
//! space with weight `|W~(u)|^beta`.

pub mod metropolis;
pub mod stats;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cell::RefCell;

#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par;
use crate::qudit::PhasePoint;
use crate::state::StateVector;
use crate::wigner::{RegionSpec, WignerEvaluator};

use metropolis::{Step, Walker};
pub use stats::Estimate;

/// Floor applied before taking logarithms of sampled weights.
pub const LOG_FLOOR: f64 = 1e-300;

/// Largest number of cached Wigner values per chain.
pub const CACHE_CAPACITY: usize = 1 << 18;

/// Where a chain starts.
#[derive(Clone, Debug, PartialEq)]
pub enum StartPoint {
    /// `u = 0` if `|W~(0)|` is (numerically) 1, otherwise [`StartPoint::Greedy`].
    Auto,
    Origin,
    /// Coordinate ascent on `|W~|` starting from the origin.
    Greedy,
    Given(PhasePoint),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub beta: f64,
    pub n_samples: usize,
    pub burn_in: usize,
    /// Steps between recorded samples.
    pub thin: usize,
    pub seed: u64,
    /// Largest number of sites changed by one proposal, 1 or 2; each
    /// proposal draws its width uniformly up to this (and the region size).
    pub move_width: usize,
    pub start: StartPoint,
    /// Chains accepting fewer proposals than this during burn-in fail.
    pub min_acceptance: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            beta: 1.0,
            n_samples: 20_000,
            burn_in: 1_000,
            thin: 1,
            seed: 0x5eed,
            move_width: 2,
            start: StartPoint::Auto,
            min_acceptance: 0.01,
        }
    }
}

impl ChainConfig {
    pub fn with_beta(&self, beta: f64) -> Self {
        ChainConfig {
            beta,
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ChainConfig {
            seed,
            ..self.clone()
        }
    }

    fn validate(&self, n_sites: usize) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be positive".into()));
        }
        if self.thin == 0 {
            return Err(Error::InvalidParameter("thin must be positive".into()));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta = {} must be positive", self.beta)));
        }
        if !(1..=2).contains(&self.move_width) {
            return Err(Error::InvalidParameter(format!(
                "move width {} must be 1 or 2",
                self.move_width
            )));
        }
        if n_sites == 0 {
            return Err(Error::InvalidRegion("empty region".into()));
        }
        Ok(())
    }
}

/// One recorded sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub point: PhasePoint,
    /// Signed `W~(point)`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainRun {
    pub samples: Vec<Sample>,
    /// Fraction of accepted proposals after burn-in.
    pub acceptance: f64,
    /// Fraction of accepted proposals during burn-in.
    pub burn_in_acceptance: f64,
}

impl ChainRun {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.value)
    }
}

/// `W~` on one region with a bounded memo table keyed by point index.
struct CachedWigner<'a> {
    eval: WignerEvaluator<'a>,
    cache: RefCell<BTreeMap<u64, f64>>,
}

impl<'a> CachedWigner<'a> {
    fn new(psi: &'a StateVector, region: &RegionSpec) -> Result<Self> {
        Ok(CachedWigner {
            eval: WignerEvaluator::new(psi, region)?,
            cache: RefCell::new(BTreeMap::new()),
        })
    }

    fn value(&self, codes: &[u32]) -> Result<f64> {
        let dim = self.eval.state().dim();
        let d2 = (dim.d() * dim.d()) as u64;
        let key = codes.iter().fold(0u64, |acc, &c| acc * d2 + c as u64);
        if let Some(&v) = self.cache.borrow().get(&key) {
            return Ok(v);
        }
        let u = PhasePoint::from_codes(dim, codes.to_vec())?;
        let v = self.eval.evaluate(&u)?;
        let mut cache = self.cache.borrow_mut();
        if cache.len() < CACHE_CAPACITY {
            cache.insert(key, v);
        }
        Ok(v)
    }
}

/// Coordinate ascent on `|W~|`, started from the per-site maximizers of the
/// single-site Wigner functions (exact for product states).
fn greedy_start(w: &CachedWigner<'_>, n: usize, levels: u32) -> Result<(Vec<u32>, f64)> {
    let psi = w.eval.state();
    let dim = psi.dim();
    let mut codes = Vec::with_capacity(n);
    for &site in w.eval.region().sites() {
        let single = WignerEvaluator::new(psi, &RegionSpec::new(alloc::vec![site], psi.n_sites())?)?;
        let mut best = (0u32, -1.0f64);
        for c in 0..levels {
            let v = single.evaluate(&PhasePoint::from_codes(dim, alloc::vec![c])?)?.abs();
            if v > best.1 * (1.0 + 1e-12) {
                best = (c, v);
            }
        }
        codes.push(best.0);
    }
    let mut best = w.value(&codes)?;
    for _sweep in 0..4 {
        let mut improved = false;
        for site in 0..n {
            let keep = codes[site];
            let mut best_code = keep;
            for c in 0..levels {
                if c == keep {
                    continue;
                }
                codes[site] = c;
                let v = w.value(&codes)?;
                if v.abs() > best.abs() * (1.0 + 1e-12) {
                    best = v;
                    best_code = c;
                    improved = true;
                }
            }
            codes[site] = best_code;
        }
        if !improved {
            break;
        }
    }
    Ok((codes, best))
}

fn start_point(w: &CachedWigner<'_>, cfg: &ChainConfig, n: usize, levels: u32) -> Result<(Vec<u32>, f64)> {
    let (codes, value) = match &cfg.start {
        StartPoint::Origin => {
            let codes = alloc::vec![0u32; n];
            let v = w.value(&codes)?;
            (codes, v)
        }
        StartPoint::Greedy => greedy_start(w, n, levels)?,
        StartPoint::Auto => {
            let codes = alloc::vec![0u32; n];
            let v = w.value(&codes)?;
            if v.abs() >= 1.0 - 1e-9 {
                (codes, v)
            } else {
                greedy_start(w, n, levels)?
            }
        }
        StartPoint::Given(u) => {
            if u.len() != n || u.dim() != w.eval.state().dim() {
                return Err(Error::DimensionMismatch(format!(
                    "start point over {} sites for a region of {n}",
                    u.len()
                )));
            }
            let codes = u.codes().to_vec();
            let v = w.value(&codes)?;
            (codes, v)
        }
    };
    if !(value.abs() > 0.0) {
        return Err(Error::ZeroWeightStart(value));
    }
    Ok((codes, value))
}

fn run_chain(w: &CachedWigner<'_>, cfg: &ChainConfig) -> Result<ChainRun> {
    let region = w.eval.region();
    let n = region.len();
    cfg.validate(n)?;
    let dim = w.eval.state().dim();
    let levels = dim.d() * dim.d();
    let (codes, value) = start_point(w, cfg, n, levels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut walker = Walker::new(codes, value, levels, cfg.move_width.min(n), cfg.beta);

    let mut accepted = 0usize;
    for _ in 0..cfg.burn_in {
        if walker.step(&mut rng, |x| w.value(x))? == Step::Accepted {
            accepted += 1;
        }
    }
    let burn_in_acceptance = if cfg.burn_in > 0 {
        accepted as f64 / cfg.burn_in as f64
    } else {
        f64::NAN
    };

    let mut samples = Vec::with_capacity(cfg.n_samples);
    let mut accepted = 0usize;
    let total = cfg.n_samples * cfg.thin;
    for step in 0..total {
        if walker.step(&mut rng, |x| w.value(x))? == Step::Accepted {
            accepted += 1;
        }
        if (step + 1) % cfg.thin == 0 {
            samples.push(Sample {
                point: PhasePoint::from_codes(dim, walker.state().to_vec())?,
                value: walker.value(),
            });
        }
    }
    let acceptance = accepted as f64 / total as f64;
    let checked = if cfg.burn_in > 0 { burn_in_acceptance } else { acceptance };
    if checked < cfg.min_acceptance {
        return Err(Error::StuckChain {
            acceptance: checked,
            threshold: cfg.min_acceptance,
        });
    }
    Ok(ChainRun {
        samples,
        acceptance,
        burn_in_acceptance,
    })
}

/// Samples phase-space points of `region` with probability proportional to
/// `|W~(u)|^beta`, where `beta` overrides `config.beta`.
pub fn metropolis_chain(
    psi: &StateVector,
    region: &RegionSpec,
    beta: f64,
    config: &ChainConfig,
) -> Result<ChainRun> {
    let w = CachedWigner::new(psi, region)?;
    run_chain(&w, &config.with_beta(beta))
}

/// Grid of inverse temperatures on `[1, 2]` with one chain configuration per
/// point.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaSchedule {
    grid: Vec<f64>,
    configs: Vec<ChainConfig>,
    /// Halve the spacing once if the coarse and full trapezoid estimates
    /// differ by more than the statistical error.
    pub auto_refine: bool,
}

/// Seed of chain `i` derived from a base seed.
pub fn derive_seed(base: u64, i: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base.wrapping_add(i.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl BetaSchedule {
    /// `points` equally spaced values from 1 to 2, each chain seeded from
    /// `base.seed`.
    pub fn uniform(points: usize, base: &ChainConfig) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidParameter(format!(
                "beta grid needs at least 2 points, got {points}"
            )));
        }
        let grid: Vec<f64> = (0..points)
            .map(|i| {
                if i + 1 == points {
                    2.0
                } else {
                    1.0 + i as f64 / (points - 1) as f64
                }
            })
            .collect();
        Self::from_grid(grid, base)
    }

    pub fn from_grid(grid: Vec<f64>, base: &ChainConfig) -> Result<Self> {
        if grid.len() < 2 || grid[0] != 1.0 || grid[grid.len() - 1] != 2.0 {
            return Err(Error::InvalidParameter(
                "beta grid must start at 1, end at 2 and have at least 2 points".into(),
            ));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("beta grid must be strictly ascending".into()));
        }
        let configs = grid
            .iter()
            .map(|&b| base.with_beta(b).with_seed(derive_seed(base.seed, b.to_bits())))
            .collect();
        Ok(BetaSchedule {
            grid,
            configs,
            auto_refine: true,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn configs(&self) -> &[ChainConfig] {
        &self.configs
    }

    /// The schedule with every interval halved.
    pub fn refined(&self) -> Self {
        let base = &self.configs[0];
        let mut grid = Vec::with_capacity(2 * self.grid.len() - 1);
        let mut configs = Vec::with_capacity(2 * self.grid.len() - 1);
        for i in 0..self.grid.len() {
            if i > 0 {
                let mid = 0.5 * (self.grid[i - 1] + self.grid[i]);
                grid.push(mid);
                let seed = derive_seed(base.seed, mid.to_bits());
                configs.push(self.configs[i].with_beta(mid).with_seed(seed));
            }
            grid.push(self.grid[i]);
            configs.push(self.configs[i].clone());
        }
        BetaSchedule {
            grid,
            configs,
            auto_refine: self.auto_refine,
        }
    }
}

impl Default for BetaSchedule {
    fn default() -> Self {
        BetaSchedule::uniform(11, &ChainConfig::default()).expect("valid default grid")
    }
}

/// Thermodynamic-integration result with the sampled integrand.
#[derive(Clone, Debug, PartialEq)]
pub struct Integration {
    pub mana: Estimate,
    /// Grid actually used (after any refinement).
    pub grid: Vec<f64>,
    /// `<ln |W~|>_beta` at each grid point.
    pub integrand: Vec<Estimate>,
    /// Statistical part of the error.
    pub statistical_error: f64,
    /// Discretization part of the error.
    pub discretization_error: f64,
}

fn trapezoid(grid: &[f64], f: &[f64]) -> f64 {
    grid.windows(2)
        .zip(f.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

fn trapezoid_error(grid: &[f64], err: &[f64]) -> f64 {
    let n = grid.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { grid[i] - grid[i - 1] } else { 0.0 };
            let right = if i + 1 < n { grid[i + 1] - grid[i] } else { 0.0 };
            let w = 0.5 * (left + right);
            w * w * err[i] * err[i]
        })
        .sum::<f64>()
        .sqrt()
}

fn check_pure_full(psi: &StateVector) -> Result<RegionSpec> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "state must be normalized, norm = {norm}"
        )));
    }
    RegionSpec::full(psi.n_sites())
}

fn log_weight(v: f64) -> f64 {
    v.abs().max(LOG_FLOOR).ln()
}

/// `<ln |W~|>_beta` for every config, chains run in parallel.
fn integrand(w: &CachedWigner<'_>, configs: &[ChainConfig]) -> Result<Vec<Estimate>> {
    let psi = w.eval.state();
    let region = w.eval.region().clone();
    par::map_jobs(configs.len(), |i| {
        let local = CachedWigner::new(psi, &region)?;
        let run = run_chain(&local, &configs[i])?;
        let logs: Vec<f64> = run.values().map(log_weight).collect();
        Ok(stats::mean_estimate(&logs))
    })
    .into_iter()
    .collect()
}

/// Mana of a normalized pure state over the whole chain by thermodynamic
/// integration, `M = -int_1^2 <ln |W~|>_beta dbeta`.
///
/// The reported error adds the statistical error of the trapezoid sum and a
/// discretization error `|I_fine - I_coarse| / 3` in quadrature.
pub fn thermo_integrate_mana(psi: &StateVector, schedule: &BetaSchedule) -> Result<Integration> {
    let region = check_pure_full(psi)?;
    let w = CachedWigner::new(psi, &region)?;
    let mut grid = schedule.grid.clone();
    let mut ints = integrand(&w, &schedule.configs)?;

    let value = |grid: &[f64], ints: &[Estimate]| {
        let means: Vec<f64> = ints.iter().map(|e| e.mean).collect();
        let errs: Vec<f64> = ints.iter().map(|e| e.std_error).collect();
        // 0 - x keeps an empty integral at +0
        (0.0 - trapezoid(grid, &means), trapezoid_error(grid, &errs))
    };
    let coarse = |grid: &[f64], ints: &[Estimate]| -> Option<f64> {
        if grid.len() < 3 || grid.len() % 2 == 0 {
            return None;
        }
        let g: Vec<f64> = grid.iter().step_by(2).copied().collect();
        let e: Vec<Estimate> = ints.iter().step_by(2).copied().collect();
        Some(value(&g, &e).0)
    };

    let (mut mana, mut stat) = value(&grid, &ints);
    let mut disc = 0.0;
    if let Some(c) = coarse(&grid, &ints) {
        disc = (mana - c).abs() / 3.0;
        if schedule.auto_refine && (mana - c).abs() > stat {
            let fine = schedule.refined();
            let extra: Vec<ChainConfig> = fine.configs.iter().skip(1).step_by(2).cloned().collect();
            let new = integrand(&w, &extra)?;
            let mut merged = Vec::with_capacity(fine.grid.len());
            for (i, e) in ints.iter().enumerate() {
                if i > 0 {
                    merged.push(new[i - 1]);
                }
                merged.push(*e);
            }
            let (m, s) = value(&fine.grid, &merged);
            disc = (m - mana).abs() / 3.0;
            mana = m;
            stat = s;
            grid = fine.grid;
            ints = merged;
        }
    }
    let n_eff = ints.iter().map(|e| e.n_eff).fold(f64::INFINITY, f64::min);
    let tau = ints.iter().map(|e| e.tau).fold(0.0, f64::max);
    Ok(Integration {
        mana: Estimate {
            mean: mana,
            std_error: (stat * stat + disc * disc).sqrt(),
            n_eff,
            tau,
        },
        grid,
        integrand: ints,
        statistical_error: stat,
        discretization_error: disc,
    })
}

fn beta_two_chain(psi: &StateVector, config: &ChainConfig) -> Result<ChainRun> {
    let region = check_pure_full(psi)?;
    let w = CachedWigner::new(psi, &region)?;
    run_chain(&w, &config.with_beta(2.0))
}

/// `M_1 = <-ln W~^2>` over a chain at `beta = 2` on the whole chain.
pub fn m1_direct(psi: &StateVector, config: &ChainConfig) -> Result<Estimate> {
    let run = beta_two_chain(psi, config)?;
    let xs: Vec<f64> = run.values().map(|v| -2.0 * log_weight(v)).collect();
    Ok(stats::mean_estimate(&xs))
}

/// `M_n = ln <|W~|^(2(n-1))> / (1 - n)` over a chain at `beta = 2`.
///
/// The variance grows exponentially with the number of sites; meant for
/// validation on small systems.
pub fn mn_direct(psi: &StateVector, n: u32, config: &ChainConfig) -> Result<Estimate> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("mn_direct needs n >= 2, got {n}")));
    }
    let run = beta_two_chain(psi, config)?;
    let power = 2.0 * (n as f64 - 1.0);
    let xs: Vec<f64> = run.values().map(|v| v.abs().powf(power)).collect();
    let inv = 1.0 / (1.0 - n as f64);
    Ok(stats::jackknife_estimate(&xs, |m| inv * m.max(LOG_FLOOR).ln()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MutualManaResult {
    pub value: f64,
    pub std_error: f64,
    pub ell: usize,
    /// Chain length.
    pub chain_len: usize,
}

/// Mutual mana between sites `0..ell` and `ell..L` of a pure state.
///
/// Two independent chains at `beta = 1` sample `u` on the left and `v` on the
/// right block; the estimate is the log of the mean of
/// `|W~_AB(u + v)| / (|W~_A(u)| |W~_B(v)|)` with a jackknife bias correction.
pub fn mutual_mana(
    psi: &StateVector,
    ell: usize,
    config_a: &ChainConfig,
    config_b: &ChainConfig,
) -> Result<MutualManaResult> {
    let n = psi.n_sites();
    if ell == 0 || ell >= n {
        return Err(Error::InvalidRegion(format!(
            "cut after site {ell} is not inside a chain of {n}"
        )));
    }
    if config_a.n_samples != config_b.n_samples {
        return Err(Error::InvalidParameter(
            "both chains must record the same number of samples".into(),
        ));
    }
    let full = check_pure_full(psi)?;
    let a = RegionSpec::range(0, ell, n)?;
    let b = RegionSpec::range(ell, n, n)?;
    let runs = par::map_jobs(2, |i| {
        let (region, cfg) = if i == 0 { (&a, config_a) } else { (&b, config_b) };
        let w = CachedWigner::new(psi, region)?;
        run_chain(&w, &cfg.with_beta(1.0))
    });
    let mut runs = runs.into_iter();
    let run_a = runs.next().expect("two chains")?;
    let run_b = runs.next().expect("two chains")?;

    let joint = CachedWigner::new(psi, &full)?;
    let ratios: Vec<Result<f64>> = par::map_jobs(run_a.samples.len(), |i| {
        let (sa, sb) = (&run_a.samples[i], &run_b.samples[i]);
        let den = sa.value.abs() * sb.value.abs();
        if !(den > 0.0) {
            return Err(Error::ZeroDenominator);
        }
        let mut codes = sa.point.codes().to_vec();
        codes.extend_from_slice(sb.point.codes());
        // parallel jobs bypass the memo table
        let u = PhasePoint::from_codes(sa.point.dim(), codes)?;
        Ok(joint.eval.evaluate(&u)?.abs() / den)
    });
    let ratios: Vec<f64> = ratios.into_iter().collect::<Result<_>>()?;
    let est = stats::jackknife_estimate(&ratios, |m| m.max(LOG_FLOOR).ln());
    Ok(MutualManaResult {
        value: est.mean,
        std_error: est.std_error,
        ell,
        chain_len: n,
    })
}
