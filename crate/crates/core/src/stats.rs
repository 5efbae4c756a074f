//! Small statistics helpers. Sums run in slice order so results do not
//! depend on how work was split across threads.

/// Mean and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(v: f64) -> Self {
        Estimate {
            mean: v,
            stderr: 0.0,
        }
    }

    pub fn scaled(self, s: f64) -> Self {
        Estimate {
            mean: self.mean * s,
            stderr: self.stderr * s.abs(),
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn estimate(xs: &[f64]) -> Estimate {
    let n = xs.len();
    if n == 0 {
        return Estimate {
            mean: 0.0,
            stderr: 0.0,
        };
    }
    let m = mean(xs);
    if n == 1 {
        return Estimate {
            mean: m,
            stderr: 0.0,
        };
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    Estimate {
        mean: m,
        stderr: (var / n as f64).sqrt(),
    }
}

/// Weighted mean and a standard error using the effective sample size
/// `(sum w)^2 / sum w^2`.
pub fn weighted_estimate(xs: &[f64], ws: &[f64]) -> Estimate {
    let sw: f64 = ws.iter().sum();
    if xs.is_empty() || sw == 0.0 {
        return Estimate {
            mean: 0.0,
            stderr: 0.0,
        };
    }
    let m = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let var = xs
        .iter()
        .zip(ws)
        .map(|(x, w)| w * (x - m) * (x - m))
        .sum::<f64>()
        / sw;
    let sw2: f64 = ws.iter().map(|w| w * w).sum();
    let n_eff = sw * sw / sw2;
    let stderr = if n_eff > 1.0 {
        (var / (n_eff - 1.0)).sqrt()
    } else {
        0.0
    };
    Estimate { mean: m, stderr }
}

/// Ordinary least squares `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the residuals.
    pub rms: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum::<f64>()
        / n as f64)
        .sqrt();
    Some(LineFit {
        slope,
        intercept,
        rms,
    })
}

/// Kolmogorov–Smirnov statistic of a sample against a continuous CDF.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 0.25 * x).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope + 0.25).abs() < 1e-15 && (f.intercept - 1.5).abs() < 1e-15);
        assert!(f.rms < 1e-15);
    }

    #[test]
    fn ks_of_grid_sample_is_half_spacing() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_statistic(&xs, |x| x) - 0.005).abs() < 1e-12);
    }
}
