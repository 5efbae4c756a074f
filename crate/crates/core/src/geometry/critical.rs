use super::degrees::{random_root, tail_slope, triangular};
use super::sampling::accumulate;
use crate::error::{Error, Result};
use crate::maps::{AxisLine, MapSpec};
use crate::point::CMat;
use crate::rng::Seed;
use serde::Serialize;
use std::io::Write;

/// Rates `|slope| < SERIES_BAND` leave the series undecided.
pub const SERIES_BAND: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeriesVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LineMethod {
    /// The line misses V.
    Empty,
    /// Exact pullback along the fibers of a triangular map.
    FiberPullback,
    /// Rejection over the slice of V.
    Forward,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineContribution {
    pub fixed: usize,
    pub value: [f64; 2],
    pub method: LineMethod,
    /// Unnormalised `(f^n)^* omega` mass per level.
    pub mass: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaRow {
    pub n: usize,
    pub delta: f64,
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalVolume {
    pub rows: Vec<DeltaRow>,
    pub lines: Vec<LineContribution>,
    /// Tail slope of `log delta_n`.
    pub slope: Option<f64>,
    pub verdict: SeriesVerdict,
}

/// `delta_n = d_t^{-n} int_{C cap U_{-n-1}} (f^n)^* omega`, summed over the
/// critical lines, for `n = 0..=n_max`.
pub fn critical_volume(
    map: &MapSpec,
    n_max: usize,
    samples: usize,
    seed: Seed,
) -> Result<CriticalVolume> {
    if map.dimension() != 2 {
        return Err(Error::InvalidInput(
            "critical volume is defined for maps of C^2".into(),
        ));
    }
    let dt = map.topological_degree() as f64;
    let levels = n_max + 1;
    let mut total = vec![(0.0f64, 0.0f64); levels];
    let mut lines = Vec::new();
    for (i, line) in map.critical_set()?.lines.into_iter().enumerate() {
        let (method, est) = line_mass(map, &line, levels, samples, seed.derive(i as u64))?;
        for (t, e) in total.iter_mut().zip(&est) {
            t.0 += e.0;
            t.1 += e.1 * e.1;
        }
        lines.push(LineContribution {
            fixed: line.fixed,
            value: [line.value.re, line.value.im],
            method,
            mass: est.iter().map(|e| e.0).collect(),
        });
    }
    let rows: Vec<DeltaRow> = total
        .iter()
        .enumerate()
        .map(|(n, (m, v))| {
            let s = dt.powi(-(n as i32));
            DeltaRow {
                n,
                delta: m * s,
                stderr: v.sqrt() * s,
                samples,
            }
        })
        .collect();
    let slope = tail_slope(rows.iter().map(|r| (r.n, r.delta)));
    let verdict = if rows.iter().all(|r| r.delta == 0.0) {
        SeriesVerdict::Convergent
    } else {
        match slope {
            Some(s) if s <= -SERIES_BAND => SeriesVerdict::Convergent,
            Some(s) if s >= SERIES_BAND => SeriesVerdict::Divergent,
            _ => SeriesVerdict::Inconclusive,
        }
    };
    Ok(CriticalVolume {
        rows,
        lines,
        slope,
        verdict,
    })
}

type Levels = Vec<(f64, f64)>;

fn line_mass(
    map: &MapSpec,
    line: &AxisLine,
    levels: usize,
    samples: usize,
    seed: Seed,
) -> Result<(LineMethod, Levels)> {
    let dom = map.domain();
    let Some(slice) = dom.line_slice(line.fixed, line.value) else {
        return Ok((LineMethod::Empty, vec![(0.0, 0.0); levels]));
    };
    let area = slice.area();
    if let (Some((a, p, q)), 1, Some(d1), Some(d2)) = (
        triangular(map.family()),
        line.fixed,
        dom.slice(0),
        dom.slice(1),
    ) {
        // the line {z2 = c} maps to {z2 = Q(c)}, and f^n restricted to it is
        // a composition of fiber maps
        let mut base = vec![line.value];
        while base.len() < levels + 1 {
            let next = q.eval(*base.last().unwrap());
            if !d2.contains(next) {
                break;
            }
            base.push(next);
        }
        let da = a.degree() as f64;
        let da_prime = a.derivative();
        let stats = accumulate(samples, levels, seed, |rng, v| {
            for (n, slot) in v.iter_mut().enumerate() {
                if base.len() < n + 2 {
                    break;
                }
                let mut z = d1.sample(rng);
                let mut last = None;
                let mut inside = true;
                for j in (0..=n).rev() {
                    z = random_root(&a, z - p.eval(base[j]), rng)?;
                    if !d1.contains(z) {
                        inside = false;
                        break;
                    }
                    last.get_or_insert(z);
                }
                if inside {
                    let top = da_prime.eval(last.expect("loop ran")).norm_sqr();
                    *slot = Some(da.powi(n as i32 + 1) / top);
                }
            }
            Ok(())
        })?;
        let vol = d1.area();
        return Ok((
            LineMethod::FiberPullback,
            stats
                .estimates
                .iter()
                .map(|e| (e.mean * vol, e.stderr * vol))
                .collect(),
        ));
    }

    let free = line.free();
    let stats = accumulate(samples, levels, seed, |rng, v| {
        let mut w = line.point(slice.sample(rng));
        let mut m = CMat::identity(2);
        for slot in v.iter_mut() {
            let e = m.apply(if free == 0 {
                [1.0.into(), 0.0.into()]
            } else {
                [0.0.into(), 1.0.into()]
            });
            let g = e[0].norm_sqr() + e[1].norm_sqr();
            m = map.jacobian(&w) * m;
            w = map.eval(&w);
            if !dom.contains(&w) {
                break;
            }
            *slot = Some(g);
        }
        Ok(())
    })?;
    stats.require_acceptance("critical line slice")?;
    Ok((
        LineMethod::Forward,
        stats
            .estimates
            .iter()
            .map(|e| (e.mean * area, e.stderr * area))
            .collect(),
    ))
}

/// `n,delta,stderr,samples`.
pub fn write_delta_csv<W: Write>(cv: &CriticalVolume, mut out: W) -> Result<()> {
    writeln!(out, "n,delta,stderr,samples")?;
    for r in &cv.rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{}",
            r.n, r.delta, r.stderr, r.samples
        )?;
    }
    Ok(())
}
