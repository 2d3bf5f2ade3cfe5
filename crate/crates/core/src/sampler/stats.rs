//! Error analysis for correlated Monte Carlo series: binning, jackknife and
//! the integrated autocorrelation time.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Number of bins used for every binned estimate.
pub const DEFAULT_BINS: usize = 32;

/// Window factor for the self-consistent autocorrelation window.
const WINDOW_C: f64 = 5.0;

/// A Monte Carlo result.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    /// Effective number of independent samples, `n / (2 tau)`.
    pub n_eff: f64,
    /// Integrated autocorrelation time (`1/2` for uncorrelated data).
    pub tau: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            mean: value,
            std_error: 0.0,
            n_eff: f64::INFINITY,
            tau: 0.5,
        }
    }

    /// `|mean - reference| / std_error`, infinite when the error is zero and
    /// the values differ.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = (self.mean - reference).abs();
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Means of `n_bins` consecutive equal-size bins. Trailing samples that do
/// not fill a bin are dropped; with fewer samples than bins each sample is
/// its own bin.
pub fn bin_means(samples: &[f64], n_bins: usize) -> Vec<f64> {
    let n_bins = n_bins.min(samples.len()).max(1);
    let size = samples.len() / n_bins;
    if size == 0 {
        return alloc::vec![mean(samples)];
    }
    samples
        .chunks_exact(size)
        .take(n_bins)
        .map(mean)
        .collect()
}

/// Integrated autocorrelation time with Sokal's self-consistent window
/// `M >= c tau(M)`.
pub fn integrated_autocorrelation(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.5;
    }
    let m = mean(samples);
    let var = samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
    if !(var > 0.0) {
        return 0.5;
    }
    let mut tau = 0.5;
    for t in 1..n / 2 {
        let c = samples[..n - t]
            .iter()
            .zip(&samples[t..])
            .map(|(a, b)| (a - m) * (b - m))
            .sum::<f64>()
            / ((n - t) as f64 * var);
        tau += c;
        if t as f64 >= WINDOW_C * tau {
            break;
        }
    }
    tau.max(0.5)
}

/// Mean with a binning error bar.
pub fn mean_estimate(samples: &[f64]) -> Estimate {
    let bins = bin_means(samples, DEFAULT_BINS);
    let n = samples.len() as f64;
    let tau = integrated_autocorrelation(samples);
    Estimate {
        mean: mean(samples),
        std_error: standard_error_of_bins(&bins),
        n_eff: (n / (2.0 * tau)).min(n),
        tau,
    }
}

fn standard_error_of_bins(bins: &[f64]) -> f64 {
    let k = bins.len();
    if k < 2 {
        return 0.0;
    }
    let m = mean(bins);
    let var = bins.iter().map(|b| (b - m) * (b - m)).sum::<f64>() / (k - 1) as f64;
    (var / k as f64).sqrt()
}

/// Jackknife over bin means for a function of the mean.
///
/// Returns the bias-corrected value `k f(all) - (k-1) mean_i f(leave-one-out)`
/// and its standard error.
pub fn jackknife(bins: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let k = bins.len();
    let total: f64 = bins.iter().sum();
    let full = f(total / k as f64);
    if k < 2 {
        return (full, 0.0);
    }
    let kf = k as f64;
    let loo: Vec<f64> = bins.iter().map(|b| f((total - b) / (kf - 1.0))).collect();
    let loo_mean = mean(&loo);
    let var = loo.iter().map(|x| (x - loo_mean) * (x - loo_mean)).sum::<f64>() * (kf - 1.0) / kf;
    (kf * full - (kf - 1.0) * loo_mean, var.sqrt())
}

/// `f(<x>)` with a jackknife error over [`DEFAULT_BINS`] bins.
pub fn jackknife_estimate(samples: &[f64], f: impl Fn(f64) -> f64) -> Estimate {
    let bins = bin_means(samples, DEFAULT_BINS);
    let (value, err) = jackknife(&bins, f);
    let n = samples.len() as f64;
    let tau = integrated_autocorrelation(samples);
    Estimate {
        mean: value,
        std_error: err,
        n_eff: (n / (2.0 * tau)).min(n),
        tau,
    }
}

/// Pearson goodness of fit of observed counts against model probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
}

impl ChiSquare {
    /// Normal approximation `(chi2 - k) / sqrt(2k)`.
    pub fn z(&self) -> f64 {
        let k = self.dof as f64;
        (self.statistic - k) / (2.0 * k).sqrt()
    }
}

/// Bins whose expected count falls below `min_expected` are pooled into one
/// extra bin. `probs` need not be normalized.
pub fn chi_square(counts: &[u64], probs: &[f64], min_expected: f64) -> ChiSquare {
    assert_eq!(counts.len(), probs.len());
    let n: u64 = counts.iter().sum();
    let z: f64 = probs.iter().sum();
    let mut statistic = 0.0;
    let mut bins = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0u64, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        let e = n as f64 * p / z;
        if e < min_expected {
            pooled_obs += c;
            pooled_exp += e;
        } else {
            statistic += (c as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    if pooled_exp > 0.0 {
        statistic += (pooled_obs as f64 - pooled_exp).powi(2) / pooled_exp;
        bins += 1;
    } else if pooled_obs > 0 {
        statistic = f64::INFINITY;
    }
    ChiSquare {
        statistic,
        dof: bins.saturating_sub(1).max(1),
    }
}
