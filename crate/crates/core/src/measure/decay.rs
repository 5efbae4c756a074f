use crate::stats::fit_line;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayPoint {
    pub n: usize,
    pub value: f64,
    pub stderr: f64,
}

/// A sequence `n -> v_n >= 0` with an exponential fit `v_n ~ A c^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecaySeries {
    pub values: Vec<DecayPoint>,
    /// `c`, fitted only over points above the noise floor; `None` with fewer
    /// than two such points.
    pub fitted_rate: Option<f64>,
    /// RMS residual of the log-linear fit (zero when there is no fit).
    pub fit_residual: f64,
    /// Number of points used in the fit.
    pub fitted_points: usize,
}

/// Points count as signal when `v_n > noise_sigmas * stderr`.
pub const NOISE_SIGMAS: f64 = 3.0;

impl DecaySeries {
    pub fn new(values: Vec<DecayPoint>) -> Self {
        let used: Vec<&DecayPoint> = values
            .iter()
            .filter(|p| p.value > 0.0 && p.value > NOISE_SIGMAS * p.stderr)
            .collect();
        let xs: Vec<f64> = used.iter().map(|p| p.n as f64).collect();
        let ys: Vec<f64> = used.iter().map(|p| p.value.ln()).collect();
        let fit = fit_line(&xs, &ys);
        DecaySeries {
            fitted_rate: fit.map(|f| f.slope.exp()),
            fit_residual: fit.map_or(0.0, |f| f.rms),
            fitted_points: used.len(),
            values,
        }
    }

    pub fn value(&self, n: usize) -> Option<&DecayPoint> {
        self.values.iter().find(|p| p.n == n)
    }
}

pub fn write_decay_csv<W: std::io::Write>(s: &DecaySeries, mut out: W) -> crate::error::Result<()> {
    writeln!(out, "n,value,stderr")?;
    for p in &s.values {
        writeln!(out, "{},{:.16e},{:.16e}", p.n, p.value, p.stderr)?;
    }
    Ok(())
}
