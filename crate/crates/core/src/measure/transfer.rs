use super::{DecayPoint, DecaySeries, WeightedCloud};
use crate::error::Result;
use crate::maps::MapSpec;
use crate::observables::Observable;
use crate::point::Point;
use crate::preimage::{fiber, fiber_size, iterated_fiber, DEFAULT_TOL};
use crate::rng::{par_indexed, Seed};
use crate::stats::{estimate, weighted_estimate, Estimate};
use rand::Rng;
use serde::Serialize;

use super::walk::backward_step;

/// `(Lambda phi)(z) = d_t^{-1} sum_{f(y) = z} n(y) phi(y)`, exactly.
pub fn transfer_apply(map: &MapSpec, phi: &Observable, z: &Point) -> Result<f64> {
    if let Some(c) = phi.constant_value() {
        return Ok(c);
    }
    Ok(fiber(map, z, DEFAULT_TOL)?.average(|w| phi.eval(w)))
}

/// `(Lambda^n phi)(z)`: exact over the full fiber when `d_t^n <= budget`,
/// otherwise the mean of `phi` over `budget` random backward chains of
/// length `n`, which is unbiased.
pub fn transfer_iterate<R: Rng + ?Sized>(
    map: &MapSpec,
    phi: &Observable,
    n: usize,
    z: &Point,
    budget: u64,
    rng: &mut R,
) -> Result<Estimate> {
    if let Some(c) = phi.constant_value() {
        return Ok(Estimate::exact(c));
    }
    if n == 0 {
        return Ok(Estimate::exact(phi.eval(z)));
    }
    match fiber_size(map, n) {
        Some(s) if s <= budget as u128 => {
            let f = iterated_fiber(map, z, n, budget)?;
            Ok(Estimate::exact(f.average(|w| phi.eval(w))))
        }
        _ => {
            let mut vals = Vec::with_capacity(budget as usize);
            for _ in 0..budget.max(1) {
                let mut w = *z;
                for _ in 0..n {
                    w = backward_step(map, &w, rng)?;
                }
                vals.push(phi.eval(&w));
            }
            Ok(estimate(&vals))
        }
    }
}

/// Absolute residual always accepted: the accuracy to which backward-walk
/// points approach the support. Functions that are invariant on the support
/// leave only this much rounding and burn-in error.
pub const RESIDUAL_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceRow {
    pub function: String,
    /// `|int phi o f dmu - int phi dmu|`.
    pub push_residual: f64,
    pub push_stderr: f64,
    /// `|int Lambda phi dmu - int phi dmu|`.
    pub pull_residual: f64,
    pub pull_stderr: f64,
}

impl InvarianceRow {
    /// Both residuals within `sigmas` standard errors plus [`RESIDUAL_FLOOR`].
    pub fn passes(&self, sigmas: f64) -> bool {
        let ok = |r: f64, s: f64| r <= sigmas * s + RESIDUAL_FLOOR;
        ok(self.push_residual, self.push_stderr) && ok(self.pull_residual, self.pull_stderr)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub samples: usize,
    pub rows: Vec<InvarianceRow>,
}

impl InvarianceReport {
    pub fn all_pass(&self, sigmas: f64) -> bool {
        self.rows.iter().all(|r| r.passes(sigmas))
    }
}

/// Pushforward (`f_* mu = mu`) and pullback (`f^* mu = d_t mu`) residuals of
/// the cloud for each test function, with Monte-Carlo standard errors.
pub fn invariance_report(
    map: &MapSpec,
    cloud: &WeightedCloud,
    fns: &[Observable],
) -> Result<InvarianceReport> {
    let per_point: Vec<Result<(Vec<f64>, Vec<f64>)>> = par_indexed(cloud.len(), |i| {
        let x = cloud.points[i];
        let fx = map.eval(&x);
        let fib = fiber(map, &x, DEFAULT_TOL)?;
        let push = fns.iter().map(|phi| phi.eval(&fx) - phi.eval(&x)).collect();
        let pull = fns
            .iter()
            .map(|phi| fib.average(|w| phi.eval(w)) - phi.eval(&x))
            .collect();
        Ok((push, pull))
    });
    let per_point: Vec<(Vec<f64>, Vec<f64>)> = per_point.into_iter().collect::<Result<_>>()?;
    let rows = fns
        .iter()
        .enumerate()
        .map(|(j, phi)| {
            if phi.constant_value().is_some() {
                return InvarianceRow {
                    function: phi.name().to_string(),
                    push_residual: 0.0,
                    push_stderr: 0.0,
                    pull_residual: 0.0,
                    pull_stderr: 0.0,
                };
            }
            let push: Vec<f64> = per_point.iter().map(|(p, _)| p[j]).collect();
            let pull: Vec<f64> = per_point.iter().map(|(_, q)| q[j]).collect();
            let a = weighted_estimate(&push, &cloud.weights);
            let b = weighted_estimate(&pull, &cloud.weights);
            InvarianceRow {
                function: phi.name().to_string(),
                push_residual: a.mean.abs(),
                push_stderr: a.stderr,
                pull_residual: b.mean.abs(),
                pull_stderr: b.stderr,
            }
        })
        .collect();
    Ok(InvarianceReport {
        samples: cloud.len(),
        rows,
    })
}

/// `v_n = ||Lambda^n phi - c_phi||_{L^2(mu)}` estimated on the cloud, with
/// `c_phi` the cloud average of `phi`. Point `i` draws its Monte-Carlo
/// chains from stream `i` of `seed`.
pub fn l2_convergence(
    map: &MapSpec,
    cloud: &WeightedCloud,
    phi: &Observable,
    n_max: usize,
    budget: u64,
    seed: Seed,
) -> Result<DecaySeries> {
    if phi.constant_value().is_some() {
        return Ok(DecaySeries::new(
            (0..=n_max)
                .map(|n| DecayPoint {
                    n,
                    value: 0.0,
                    stderr: 0.0,
                })
                .collect(),
        ));
    }
    let c = super::integrate(cloud, phi) / cloud.total_mass();
    let sq: Vec<Result<Vec<f64>>> = par_indexed(cloud.len(), |i| {
        let mut rng = seed.stream(i as u64);
        (0..=n_max)
            .map(|n| {
                let v = transfer_iterate(map, phi, n, &cloud.points[i], budget, &mut rng)?.mean - c;
                Ok(v * v)
            })
            .collect()
    });
    let sq: Vec<Vec<f64>> = sq.into_iter().collect::<Result<_>>()?;
    let values = (0..=n_max)
        .map(|n| {
            let col: Vec<f64> = sq.iter().map(|r| r[n]).collect();
            let m = weighted_estimate(&col, &cloud.weights);
            let value = m.mean.max(0.0).sqrt();
            let stderr = if value > 0.0 {
                m.stderr / (2.0 * value)
            } else {
                m.stderr.sqrt()
            };
            DecayPoint { n, value, stderr }
        })
        .collect();
    Ok(DecaySeries::new(values))
}

pub fn write_invariance_csv<W: std::io::Write>(r: &InvarianceReport, mut out: W) -> Result<()> {
    writeln!(
        out,
        "function,push_residual,push_stderr,pull_residual,pull_stderr"
    )?;
    for row in &r.rows {
        writeln!(
            out,
            "\"{}\",{:.16e},{:.16e},{:.16e},{:.16e}",
            row.function, row.push_residual, row.push_stderr, row.pull_residual, row.pull_stderr
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{Domain, Family};
    use crate::measure::{sample_equilibrium, SampleConfig};
    use crate::point::C64;
    use crate::poly::Poly;

    fn square() -> MapSpec {
        MapSpec::new(
            Family::Poly1D {
                p: Poly::from_real(&[0.0, 0.0, 1.0]),
            },
            Domain::ball(1, 4.0),
        )
        .unwrap()
    }

    #[test]
    fn transfer_examples() {
        let m = square();
        assert_eq!(
            transfer_apply(&m, &Observable::constant(1.0), &Point::real1(0.3)).unwrap(),
            1.0
        );
        assert_eq!(
            transfer_apply(&m, &Observable::re(0), &Point::real1(1.0)).unwrap(),
            0.0
        );
        // preimages of 4 are +-2, so the fiber average of |w|^2 is 4 and of |w| is 2
        let v = transfer_apply(&m, &Observable::abs_sqr(0), &Point::real1(4.0)).unwrap();
        assert!((v - 4.0).abs() < 1e-14, "{v}");
        let abs = Observable::new("|w|", |p| p[0].norm());
        assert!((transfer_apply(&m, &abs, &Point::real1(4.0)).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn iterate_examples() {
        let m = square();
        let mut rng = Seed(0).stream(0);
        let z = Point::new1(C64::new(0.7, -0.2));
        let e = transfer_iterate(&m, &Observable::re(0), 0, &z, 16, &mut rng).unwrap();
        assert_eq!(e, Estimate::exact(0.7));
        let e =
            transfer_iterate(&m, &Observable::re(0), 3, &Point::real1(1.0), 16, &mut rng).unwrap();
        assert!(e.mean.abs() < 1e-14 && e.stderr == 0.0);
        let log_abs = Observable::new("log|z|", |p| p[0].norm().ln());
        let e = transfer_iterate(&m, &log_abs, 8, &Point::real1(3.0), 1024, &mut rng).unwrap();
        // Lambda^n log|z| at z = 3 is 2^{-n} log 3
        assert!((e.mean - 3f64.ln() / 256.0).abs() < 1e-12);
        let mc = transfer_iterate(&m, &log_abs, 8, &Point::real1(3.0), 64, &mut rng).unwrap();
        assert!((mc.mean - 3f64.ln() / 256.0).abs() < 1e-12);
    }

    #[test]
    fn l2_constant_and_fourier_modes() {
        let m = square();
        let cloud = sample_equilibrium(&m, &SampleConfig::iid(400), Seed(5)).unwrap();
        let s = l2_convergence(&m, &cloud, &Observable::constant(2.0), 4, 64, Seed(1)).unwrap();
        assert!(s.values.iter().all(|p| p.value == 0.0));

        let c_re = crate::measure::integrate(&cloud, &Observable::re(0)).abs();
        let s = l2_convergence(&m, &cloud, &Observable::re(0), 4, 64, Seed(1)).unwrap();
        for p in &s.values[1..] {
            assert!((p.value - c_re).abs() < 1e-12, "{p:?}");
        }

        let mixed = Observable::new("re(w^2)+re(w)", |p| (p[0] * p[0]).re + p[0].re);
        let s = l2_convergence(&m, &cloud, &mixed, 3, 64, Seed(1)).unwrap();
        assert!(s.values[1].value > 0.5);
        assert!(s.values[2].value < 0.1 && s.values[3].value < 0.1);
    }

    #[test]
    fn invariance_on_circle() {
        let m = square();
        let cloud = sample_equilibrium(&m, &SampleConfig::iid(2000), Seed(8)).unwrap();
        let r =
            invariance_report(&m, &cloud, &[Observable::constant(1.0), Observable::re(0)]).unwrap();
        assert_eq!(r.rows[0].push_residual, 0.0);
        assert_eq!(r.rows[0].pull_residual, 0.0);
        assert!(r.all_pass(3.0), "{r:?}");
    }
}
