use super::lyapunov::MAX_DISCARDED;
use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::measure::{DecayPoint, DecaySeries, WeightedCloud};
use crate::observables::Observable;
use crate::rng::par_indexed;
use crate::stats::weighted_estimate;

/// `v_n = |cov_mu(phi o f^n, psi)|` for `n = 0..=n_max`, from forward orbits
/// of the cloud points. A constant `phi` or `psi` gives exact zeros. Points
/// whose orbit leaves V within `n_max` steps are dropped.
pub fn mixing_decay(
    map: &MapSpec,
    cloud: &WeightedCloud,
    phi: &Observable,
    psi: &Observable,
    n_max: usize,
) -> Result<DecaySeries> {
    if phi.constant_value().is_some() || psi.constant_value().is_some() {
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
    let rows: Vec<Option<(Vec<f64>, f64, f64)>> = par_indexed(cloud.len(), |i| {
        let x = cloud.points[i];
        let mut y = x;
        let mut a = Vec::with_capacity(n_max + 1);
        for j in 0..=n_max {
            if j > 0 {
                y = map.eval(&y);
                if !map.domain().contains(&y) {
                    return None;
                }
            }
            a.push(phi.eval(&y));
        }
        Some((a, psi.eval(&x), cloud.weights[i]))
    });
    let kept: Vec<(Vec<f64>, f64, f64)> = rows.into_iter().flatten().collect();
    let dropped = cloud.len() - kept.len();
    if dropped as f64 > MAX_DISCARDED * cloud.len() as f64 || kept.len() < 2 {
        return Err(Error::TooManyFailures {
            what: "forward orbits",
            failed: dropped,
            total: cloud.len(),
            allowed: MAX_DISCARDED,
        });
    }
    let ws: Vec<f64> = kept.iter().map(|r| r.2).collect();
    let bs: Vec<f64> = kept.iter().map(|r| r.1).collect();
    let b_mean = weighted_estimate(&bs, &ws).mean;
    let values = (0..=n_max)
        .map(|n| {
            let a: Vec<f64> = kept.iter().map(|r| r.0[n]).collect();
            let a_mean = weighted_estimate(&a, &ws).mean;
            let c: Vec<f64> = a
                .iter()
                .zip(&bs)
                .map(|(x, y)| (x - a_mean) * (y - b_mean))
                .collect();
            let e = weighted_estimate(&c, &ws);
            DecayPoint {
                n,
                value: e.mean.abs(),
                stderr: e.stderr,
            }
        })
        .collect();
    Ok(DecaySeries::new(values))
}
