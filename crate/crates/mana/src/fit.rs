//! Straight-line fits of mutual mana against the chord coordinate.

use std::f64::consts::PI;

/// `log[(L/pi) sin(pi l / L)]`.
///
/// The sine argument is folded onto `l <= L/2` so that `l` and `L - l` give
/// the same bits.
pub fn chord_x(ell: usize, chain_len: usize) -> f64 {
    let folded = ell.min(chain_len - ell);
    let l = chain_len as f64;
    ((l / PI) * (PI * folded as f64 / l).sin()).ln()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    /// Standard error of `y`; zero when `y` is exact.
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChordFit {
    pub slope: f64,
    pub slope_err: f64,
    pub gamma: f64,
    pub gamma_err: f64,
    pub r_squared: f64,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FitError {
    TooFewPoints(usize),
    /// All abscissae coincide.
    Degenerate,
}

impl std::fmt::Display for FitError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FitError::TooFewPoints(n) => write!(f, "need at least 3 points to fit, got {n}"),
            FitError::Degenerate => write!(f, "all x values are equal"),
        }
    }
}

impl std::error::Error for FitError {}

/// Least squares line `y = slope x + gamma`.
///
/// With every `sigma > 0` the points carry weights `1/sigma^2` and the
/// errors follow from those sigmas. Otherwise the fit is unweighted and the
/// errors come from the residual scatter.
pub fn fit_line(points: &[Point]) -> Result<ChordFit, FitError> {
    let points: Vec<Point> = points
        .iter()
        .copied()
        .filter(|p| p.x.is_finite() && p.y.is_finite() && p.sigma.is_finite())
        .collect();
    let n = points.len();
    if n < 3 {
        return Err(FitError::TooFewPoints(n));
    }
    let weighted = points.iter().all(|p| p.sigma > 0.0);
    let w = |p: &Point| if weighted { 1.0 / (p.sigma * p.sigma) } else { 1.0 };
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in &points {
        let wi = w(p);
        s += wi;
        sx += wi * p.x;
        sy += wi * p.y;
        sxx += wi * p.x * p.x;
        sxy += wi * p.x * p.y;
    }
    let delta = s * sxx - sx * sx;
    if !(delta > 1e-14 * s * sxx.max(1e-300)) {
        return Err(FitError::Degenerate);
    }
    let slope = (s * sxy - sx * sy) / delta;
    let gamma = (sxx * sy - sx * sxy) / delta;

    let mean_y = sy / s;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for p in &points {
        let wi = w(p);
        ss_res += wi * (p.y - slope * p.x - gamma).powi(2);
        ss_tot += wi * (p.y - mean_y).powi(2);
    }
    let scale = if weighted { 1.0 } else { ss_res / (n - 2) as f64 };
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok(ChordFit {
        slope,
        slope_err: (scale * s / delta).sqrt(),
        gamma,
        gamma_err: (scale * sxx / delta).sqrt(),
        r_squared,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chord_is_symmetric() {
        for l in [5usize, 8, 12, 13, 64] {
            for ell in 1..l {
                assert_eq!(chord_x(ell, l).to_bits(), chord_x(l - ell, l).to_bits());
            }
        }
        let want = ((12.0 / PI) * (PI / 4.0).sin()).ln();
        assert!((chord_x(3, 12) - want).abs() < 1e-15);
    }

    #[test]
    fn recovers_noisy_line() {
        // deterministic +-1e-3 noise
        let pts: Vec<Point> = (1..12)
            .map(|ell| {
                let x = chord_x(ell, 24);
                let noise = if ell % 2 == 0 { 1e-3 } else { -1e-3 };
                Point {
                    x,
                    y: 0.25 * x + 0.1 + noise,
                    sigma: 1e-3,
                }
            })
            .collect();
        let f = fit_line(&pts).unwrap();
        assert!((f.slope - 0.25).abs() < 0.01 && f.slope_err < 0.01, "{f:?}");
        assert!((f.gamma - 0.1).abs() < 0.01);
        assert!(f.r_squared > 0.99);
    }

    #[test]
    fn exact_points_use_residual_errors() {
        let pts: Vec<Point> = [0.0, 1.0, 2.0, 3.0]
            .iter()
            .map(|&x| Point { x, y: 2.0 * x - 1.0, sigma: 0.0 })
            .collect();
        let f = fit_line(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && f.slope_err < 1e-12);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn weighted_errors_follow_sigma() {
        let pts: Vec<Point> = [-1.0, 0.0, 1.0]
            .iter()
            .map(|&x| Point { x, y: 0.0, sigma: 0.5 })
            .collect();
        let f = fit_line(&pts).unwrap();
        // var(slope) = sigma^2 / sum (x - xbar)^2
        assert!((f.slope_err - 0.5 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let p = Point { x: 1.0, y: 1.0, sigma: 0.1 };
        assert_eq!(fit_line(&[p, p]), Err(FitError::TooFewPoints(2)));
        assert_eq!(fit_line(&[p, p, p]), Err(FitError::Degenerate));
        let nan = Point { y: f64::NAN, ..p };
        assert_eq!(fit_line(&[p, nan, Point { x: 2.0, ..p }]), Err(FitError::TooFewPoints(2)));
    }
}
