use crate::error::Result;
use crate::maps::MapSpec;
use crate::measure::WeightedCloud;
use crate::point::Point;
use crate::rng::par_indexed;
use crate::spatial::GridIndex;
use crate::stats::fit_line;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonRow {
    pub epsilon: f64,
    /// `(n, #F)` for the greedy `(n, epsilon)`-separated sets.
    pub counts: Vec<(usize, usize)>,
    /// Slope of `log #F` against `n` over the unsaturated counts.
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// Median of the slopes over epsilon; a lower-bound device for the
    /// topological entropy.
    pub estimate: f64,
    pub rows: Vec<EpsilonRow>,
    pub points_used: usize,
}

/// Counts at or above this fraction of the cloud are treated as saturated.
const SATURATION: f64 = 0.1;

/// `epsilon` values at 5%, 10% and 20% of the RMS spread of the cloud.
pub fn default_epsilons(cloud: &WeightedCloud) -> Vec<f64> {
    let n = cloud.len().max(1) as f64;
    let mut c = Point::default();
    for p in &cloud.points {
        c = c + *p * (1.0 / n);
    }
    let spread = (cloud.points.iter().map(|p| p.dist(&c).powi(2)).sum::<f64>() / n).sqrt();
    let s = if spread > 0.0 { spread } else { 1.0 };
    vec![0.05 * s, 0.1 * s, 0.2 * s]
}

fn separated_count(traj: &[Vec<Point>], k: usize, n: usize, eps: f64, stop_above: usize) -> usize {
    let mut grid = GridIndex::new(eps, k);
    let mut count = 0usize;
    for (i, t) in traj.iter().enumerate() {
        let close = grid.any_near(&t[0], |j| {
            traj[j as usize][..n]
                .iter()
                .zip(&t[..n])
                .all(|(a, b)| a.dist(b) <= eps)
        });
        if !close {
            grid.insert(i as u32, &t[0]);
            count += 1;
            if count > stop_above {
                break;
            }
        }
    }
    count
}

/// Growth rate of greedy `(n, epsilon)`-separated subsets of the cloud in
/// the Bowen metric `d_n(x, y) = max_{i < n} |f^i x - f^i y|`.
pub fn entropy_estimate(
    map: &MapSpec,
    cloud: &WeightedCloud,
    epsilons: &[f64],
    n_max: usize,
) -> Result<EntropyEstimate> {
    let traj: Vec<Vec<Point>> = par_indexed(cloud.len(), |i| {
        let mut t = Vec::with_capacity(n_max);
        let mut y = cloud.points[i];
        for j in 0..n_max {
            if j > 0 {
                y = map.eval(&y);
                if !map.domain().contains(&y) {
                    return None;
                }
            }
            t.push(y);
        }
        Some(t)
    })
    .into_iter()
    .flatten()
    .collect();
    let m = traj.len();
    let cap = ((SATURATION * m as f64).floor() as usize).max(1);
    let jobs: Vec<(usize, usize)> = (0..epsilons.len())
        .flat_map(|e| (1..=n_max).map(move |n| (e, n)))
        .collect();
    let counts = par_indexed(jobs.len(), |j| {
        let (e, n) = jobs[j];
        separated_count(&traj, map.dimension(), n, epsilons[e], cap)
    });
    let rows: Vec<EpsilonRow> = epsilons
        .iter()
        .enumerate()
        .map(|(e, &eps)| {
            let c: Vec<(usize, usize)> = (1..=n_max)
                .map(|n| (n, counts[e * n_max + n - 1]))
                .collect();
            let used: Vec<&(usize, usize)> =
                c.iter().filter(|(_, k)| *k >= 1 && *k <= cap).collect();
            let xs: Vec<f64> = used.iter().map(|(n, _)| *n as f64).collect();
            let ys: Vec<f64> = used.iter().map(|(_, k)| (*k as f64).ln()).collect();
            EpsilonRow {
                epsilon: eps,
                counts: c,
                slope: fit_line(&xs, &ys).map(|f| f.slope),
            }
        })
        .collect();
    let mut slopes: Vec<f64> = rows.iter().filter_map(|r| r.slope).collect();
    slopes.sort_by(f64::total_cmp);
    let estimate = match slopes.len() {
        0 => 0.0,
        l if l % 2 == 1 => slopes[l / 2],
        l => 0.5 * (slopes[l / 2 - 1] + slopes[l / 2]),
    };
    Ok(EntropyEstimate {
        estimate,
        rows,
        points_used: m,
    })
}

pub fn write_entropy_csv<W: std::io::Write>(e: &EntropyEstimate, mut out: W) -> Result<()> {
    writeln!(out, "epsilon,n,count")?;
    for r in &e.rows {
        for (n, c) in &r.counts {
            writeln!(out, "{:.16e},{n},{c}", r.epsilon)?;
        }
    }
    Ok(())
}
