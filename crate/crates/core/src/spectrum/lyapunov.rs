use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::measure::{backward_step, WeightedCloud};
use crate::point::{Point, C64, ZERO};
use crate::rng::{par_indexed, Seed};
use crate::stats::{estimate, weighted_estimate};
use rand::Rng;
use serde::Serialize;

/// Fraction of discarded orbits above which a run is rejected.
pub const MAX_DISCARDED: f64 = 0.1;

/// Lyapunov exponents of the complex differential, in nats per iteration
/// (`z^d` has exponent `log d`). The real-Jacobian convention doubles the sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyapSpectrum {
    /// Sorted, largest first.
    pub exponents: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub orbit_length: usize,
    pub sample_count: usize,
    pub discarded: usize,
    pub sum: f64,
    pub sum_stderr: f64,
    /// `int log |det Df| dmu`, i.e. half of `int log J dmu`.
    pub jacobian_integral: f64,
    pub jacobian_stderr: f64,
}

impl LyapSpectrum {
    pub fn min(&self) -> f64 {
        *self.exponents.last().expect("at least one exponent")
    }

    /// `h = int log J dmu = 2 sum lambda_i` in the real-Jacobian convention.
    pub fn real_jacobian_sum(&self) -> (f64, f64) {
        (2.0 * self.sum, 2.0 * self.sum_stderr)
    }

    /// The identity `sum lambda_i = int log |det Df| dmu` within `sigmas`
    /// combined standard errors.
    pub fn sum_matches_jacobian(&self, sigmas: f64) -> bool {
        let s = self.sum_stderr.hypot(self.jacobian_stderr);
        (self.sum - self.jacobian_integral).abs() <= sigmas * s + 1e-12
    }
}

fn dot(a: [C64; 2], b: [C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

fn norm(a: [C64; 2]) -> f64 {
    a[0].norm().hypot(a[1].norm())
}

fn scale(a: [C64; 2], s: f64) -> [C64; 2] {
    [a[0] * s, a[1] * s]
}

fn random_frame<R: Rng + ?Sized>(rng: &mut R) -> [[C64; 2]; 2] {
    let mut g = || C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    let a = [g(), g()];
    let q1 = scale(a, 1.0 / norm(a));
    let q2 = [-q1[1].conj(), q1[0].conj()];
    [q1, q2]
}

/// Log-stretching sums along the forward orbit `chain[L] -> ... -> chain[1]`
/// of a reversed backward chain, re-orthonormalised at every step.
fn orbit_exponents<R: Rng + ?Sized>(
    map: &MapSpec,
    chain: &[Point],
    rng: &mut R,
) -> Option<Vec<f64>> {
    let len = chain.len() - 1;
    let k = map.dimension();
    let mut sums = vec![0.0; k];
    let mut q = random_frame(rng);
    for y in chain[1..].iter().rev() {
        let j = map.jacobian(y);
        if k == 1 {
            sums[0] += j.m[0][0].norm().ln();
            continue;
        }
        let c1 = j.apply(q[0]);
        let c2 = j.apply(q[1]);
        let r11 = norm(c1);
        if !(r11 > 0.0) {
            return None;
        }
        let q1 = scale(c1, 1.0 / r11);
        let p = dot(q1, c2);
        let v = [c2[0] - q1[0] * p, c2[1] - q1[1] * p];
        let r22 = norm(v);
        if !(r22 > 0.0) {
            return None;
        }
        sums[0] += r11.ln();
        sums[1] += r22.ln();
        q = [q1, scale(v, 1.0 / r22)];
    }
    if sums.iter().any(|s| !s.is_finite()) {
        return None;
    }
    Some(sums.into_iter().map(|s| s / len as f64).collect())
}

/// Lyapunov exponents from `samples` orbit segments of length `orbit_length`.
///
/// Forward iteration is unstable on a repeller, so each segment is built
/// backwards: a random backward chain of length `orbit_length` from a cloud
/// point, read in reverse, is an exact forward orbit ending at that point and
/// starting at a `mu`-distributed point. Segments whose chain fails are
/// discarded and counted.
pub fn lyapunov(
    map: &MapSpec,
    cloud: &WeightedCloud,
    orbit_length: usize,
    samples: usize,
    seed: Seed,
) -> Result<LyapSpectrum> {
    if orbit_length < 50 {
        return Err(Error::InvalidInput(format!(
            "orbit_length {orbit_length} < 50"
        )));
    }
    if samples == 0 || cloud.is_empty() {
        return Err(Error::InvalidInput(
            "lyapunov needs a nonempty cloud and samples >= 1".into(),
        ));
    }
    let n = cloud.len();
    let per: Vec<Option<Vec<f64>>> = par_indexed(samples, |i| {
        let mut rng = seed.stream(i as u64);
        let start = cloud.points[if samples >= n { i % n } else { i * n / samples }];
        let mut chain = Vec::with_capacity(orbit_length + 1);
        chain.push(start);
        for _ in 0..orbit_length {
            let next = backward_step(map, chain.last().unwrap(), &mut rng).ok()?;
            chain.push(next);
        }
        orbit_exponents(map, &chain, &mut rng)
    });
    let kept: Vec<Vec<f64>> = per.iter().flatten().cloned().collect();
    let discarded = samples - kept.len();
    if discarded as f64 > MAX_DISCARDED * samples as f64 || kept.is_empty() {
        return Err(Error::TooManyFailures {
            what: "orbits",
            failed: discarded,
            total: samples,
            allowed: MAX_DISCARDED,
        });
    }
    let k = map.dimension();
    let mut pairs: Vec<(f64, f64)> = (0..k)
        .map(|j| {
            let col: Vec<f64> = kept.iter().map(|e| e[j]).collect();
            let e = estimate(&col);
            (e.mean, e.stderr)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let sums: Vec<f64> = kept.iter().map(|e| e.iter().sum()).collect();
    let sum = estimate(&sums);

    let (vals, ws): (Vec<f64>, Vec<f64>) = cloud
        .points
        .iter()
        .zip(&cloud.weights)
        .map(|(p, w)| (map.jacobian(p).det(), *w))
        .filter(|(d, _)| *d != ZERO)
        .map(|(d, w)| (d.norm().ln(), w))
        .unzip();
    let jac = weighted_estimate(&vals, &ws);

    Ok(LyapSpectrum {
        exponents: pairs.iter().map(|p| p.0).collect(),
        standard_errors: pairs.iter().map(|p| p.1).collect(),
        orbit_length,
        sample_count: kept.len(),
        discarded,
        sum: sum.mean,
        sum_stderr: sum.stderr,
        jacobian_integral: jac.mean,
        jacobian_stderr: jac.stderr,
    })
}

/// `int log J dmu` for the real Jacobian `J = |det Df|^2`, with its standard error.
pub fn log_jacobian_integral(map: &MapSpec, cloud: &WeightedCloud) -> (f64, f64) {
    let vals: Vec<f64> = cloud
        .points
        .iter()
        .map(|p| 2.0 * map.log_abs_det(p))
        .collect();
    let e = weighted_estimate(&vals, &cloud.weights);
    (e.mean, e.stderr)
}

/// Rows `quantity,value,stderr`: one per exponent, then the sum and
/// `int log |det Df| dmu`.
pub fn write_lyapunov_csv<W: std::io::Write>(s: &LyapSpectrum, mut out: W) -> Result<()> {
    writeln!(out, "quantity,value,stderr")?;
    for (j, (e, se)) in s.exponents.iter().zip(&s.standard_errors).enumerate() {
        writeln!(out, "lambda{},{e:.16e},{se:.16e}", j + 1)?;
    }
    writeln!(out, "sum,{:.16e},{:.16e}", s.sum, s.sum_stderr)?;
    writeln!(
        out,
        "log_abs_det,{:.16e},{:.16e}",
        s.jacobian_integral, s.jacobian_stderr
    )?;
    Ok(())
}
