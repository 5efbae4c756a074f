//! Potential theory in dimension one: the Green function by escape rate,
//! the expansion constant, a Hölder test for the equilibrium measure and
//! its Hausdorff dimension.

mod holder;

pub use holder::{holder_check, HolderCenters, HolderReport, HOLDER_SLACK};

use crate::error::{Error, Result};
use crate::maps::{Family, MapSpec};
use crate::measure::WeightedCloud;
use crate::point::C64;
use crate::poly::Poly;
use crate::rng::par_indexed;
use crate::stats::weighted_estimate;
use serde::Serialize;
use std::io::Write;

/// Default horizon for declaring an orbit bounded.
pub const DEFAULT_N_MAX: usize = 200;
/// Slack of the monotonicity check on `M_n`.
pub const MONOTONE_TOL: f64 = 1e-6;
const OVERFLOW: f64 = 1e150;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GreenEval {
    pub z: C64,
    pub value: f64,
    pub iterations_used: usize,
    /// False only when `n_max` ran out while the orbit was escaping.
    pub converged: bool,
}

pub(crate) fn poly_of(map: &MapSpec) -> Result<&Poly> {
    match map.family() {
        Family::Poly1D { p } => Ok(p),
        f => Err(Error::Unsupported(format!(
            "{} is not a one-dimensional map",
            f.tag()
        ))),
    }
}

/// `G(z) = lim d^{-n} log|p^n(z)| `, evaluated as
/// `d^{-n} (log|w_n| + log|a_d| / (d - 1))` once `w_n` is past the escape
/// radius; the neglected term is below `d^{-n} 2S / |w_n|` with
/// `S = sum_{i<d} |a_i| / |a_d|`.
pub fn green(map: &MapSpec, z: C64, n_max: usize, tol: f64) -> Result<GreenEval> {
    let p = poly_of(map)?;
    let d = p.degree() as f64;
    let lead = p.leading().norm();
    let shift = lead.ln() / (d - 1.0);
    let s: f64 = p.coeffs[..p.degree()].iter().map(|c| c.norm()).sum::<f64>() / lead;
    let r_esc = p.escape_radius();
    let mut w = z;
    let mut scale = 1.0;
    for n in 0..=n_max {
        let r = w.norm();
        if !r.is_finite() {
            return Err(Error::SolveInconsistency(format!(
                "green: orbit of {z} overflowed"
            )));
        }
        if r > r_esc && (scale * 2.0 * s / r < tol || r > OVERFLOW) {
            return Ok(GreenEval {
                z,
                value: scale * (r.ln() + shift),
                iterations_used: n,
                converged: true,
            });
        }
        if n < n_max {
            w = p.eval(w);
            scale /= d;
        }
    }
    if w.norm() > r_esc {
        let value = scale * (w.norm().ln() + shift);
        return Ok(GreenEval {
            z,
            value,
            iterations_used: n_max,
            converged: false,
        });
    }
    Ok(GreenEval {
        z,
        value: 0.0,
        iterations_used: n_max,
        converged: true,
    })
}

pub fn green_many(map: &MapSpec, zs: &[C64], n_max: usize, tol: f64) -> Result<Vec<GreenEval>> {
    par_indexed(zs.len(), |i| green(map, zs[i], n_max, tol))
        .into_iter()
        .collect()
}

/// `re,im,green_value,converged`.
pub fn write_green_csv<W: Write>(evals: &[GreenEval], mut out: W) -> Result<()> {
    writeln!(out, "re,im,green_value,converged")?;
    for g in evals {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{}",
            g.z.re, g.z.im, g.value, g.converged
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    /// `M_j` for `j = 1..=n`.
    pub values: Vec<f64>,
    pub nonincreasing: bool,
    /// The supremum runs over the cloud (the support of mu), which can
    /// undershoot the supremum over K when K has interior.
    pub cloud_sup_only: bool,
}

impl ExpansionReport {
    pub fn value(&self) -> f64 {
        *self.values.last().expect("n >= 1")
    }
}

/// `M_j = (max over the cloud of |(p^j)'|)^{1/j}` for `j = 1..=n`.
pub fn expansion_constant(
    map: &MapSpec,
    cloud: &WeightedCloud,
    n: usize,
) -> Result<ExpansionReport> {
    let p = poly_of(map)?;
    if n == 0 || cloud.is_empty() {
        return Err(Error::InvalidInput(
            "expansion constant needs n >= 1 and a nonempty cloud".into(),
        ));
    }
    let per_point: Vec<Result<Vec<f64>>> = par_indexed(cloud.len(), |i| {
        let mut w = cloud.points[i][0];
        let mut log_d = 0.0;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let (v, dv) = p.eval_with_derivative(w);
            log_d += dv.norm().ln();
            w = v;
            if !map.domain().contains(&crate::point::Point::new1(w)) {
                return Err(Error::Escaped(format!(
                    "orbit of {:?} left V",
                    cloud.points[i][0]
                )));
            }
            out.push(log_d);
        }
        Ok(out)
    });
    let mut best = vec![f64::NEG_INFINITY; n];
    for r in per_point {
        for (b, v) in best.iter_mut().zip(r?) {
            *b = b.max(v);
        }
    }
    let values: Vec<f64> = best
        .iter()
        .enumerate()
        .map(|(j, l)| (l / (j + 1) as f64).exp())
        .collect();
    let nonincreasing = values.windows(2).all(|w| w[1] <= w[0] + MONOTONE_TOL);
    Ok(ExpansionReport {
        values,
        nonincreasing,
        cloud_sup_only: true,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HausdorffReport {
    pub dimension: f64,
    pub stderr: f64,
    /// `int log|p'| d mu` and its error.
    pub lyapunov: f64,
    pub lyapunov_stderr: f64,
    /// The exponent from the spectrum module, when supplied.
    pub spectrum_exponent: Option<f64>,
}

/// `HD(mu) = log d_t / int log|p'| d mu`.
pub fn hausdorff_dimension(
    map: &MapSpec,
    cloud: &WeightedCloud,
    spectrum_exponent: Option<f64>,
) -> Result<HausdorffReport> {
    let p = poly_of(map)?;
    let dp = p.derivative();
    let logs: Vec<f64> = cloud
        .points
        .iter()
        .map(|z| dp.eval(z[0]).norm().ln())
        .collect();
    let l = weighted_estimate(&logs, &cloud.weights);
    if !(l.mean > 0.0) {
        return Err(Error::Corrupted(format!(
            "int log|f'| d mu = {} is not positive",
            l.mean
        )));
    }
    let ld = (map.topological_degree() as f64).ln();
    Ok(HausdorffReport {
        dimension: ld / l.mean,
        stderr: ld * l.stderr / (l.mean * l.mean),
        lyapunov: l.mean,
        lyapunov_stderr: l.stderr,
        spectrum_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_green_values() {
        let m = MapSpec::poly1d(&[0.0, 0.0, 1.0]).unwrap();
        let g = green(&m, C64::new(2.0, 0.0), DEFAULT_N_MAX, 1e-12).unwrap();
        assert!((g.value - 2f64.ln()).abs() < 1e-15);
        let g = green(&m, C64::new(0.5, 0.0), DEFAULT_N_MAX, 1e-12).unwrap();
        assert_eq!(g.value, 0.0);
        assert!(g.converged);
    }

    #[test]
    fn scaled_monomial_shift() {
        let m = MapSpec::poly1d(&[0.0, 0.0, 2.0]).unwrap();
        // K is the disc of radius 1/2
        let g = green(&m, C64::new(1.0, 0.0), DEFAULT_N_MAX, 1e-12).unwrap();
        assert!((g.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn green_rejects_two_dimensional_maps() {
        let m = crate::reference::reference_map("skew").unwrap();
        assert!(matches!(
            green(&m, C64::new(1.0, 0.0), 10, 1e-9),
            Err(Error::Unsupported(_))
        ));
    }
}
