use super::sampling::{accumulate, LevelStats};
use crate::error::{Error, Result};
use crate::maps::{Family, MapSpec, PowerVariant, Slice};
use crate::point::{CMat, Point, C64};
use crate::poly::Poly;
use crate::preimage::random_preimage;
use crate::rng::{Seed, StreamRng};
use crate::roots::poly_roots;
use crate::stats::{fit_line, Estimate};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMethod {
    /// Fibered for triangular maps on product domains, pushforward for the
    /// diagonal power map, forward rejection otherwise.
    Auto,
    /// Uniform points of V kept when their orbit stays in V for `n + 1` steps.
    Forward,
    /// Uniform points of U pulled back along random preimage chains.
    Pushforward,
    /// Base coordinate forward, fiber coordinate pulled back.
    Fibered,
    /// `l = k`: `d_t^n vol(U)`.
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeRow {
    pub n: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeTable {
    pub l: usize,
    pub method: DegreeMethod,
    pub rows: Vec<DegreeRow>,
    /// Slope of `log d_{l,n}` over the last `ceil(n_max / 2)` rows.
    pub growth_rate: Option<f64>,
}

impl DegreeTable {
    pub fn row(&self, n: usize) -> Option<&DegreeRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// `(A, P, Q)` of a map `(A(z1) + P(z2), Q(z2))`.
pub(crate) fn triangular(family: &Family) -> Option<(Poly, &Poly, &Poly)> {
    match family {
        Family::Skew2D { lambda, p, q } => {
            Some((Poly::new(vec![C64::new(0.0, 0.0), *lambda]), p, q))
        }
        Family::Poly2DTriangularizable { a, p, q } => Some((a.clone(), p, q)),
        _ => None,
    }
}

/// A uniformly chosen solution of `a(z) = v`.
pub(crate) fn random_root(a: &Poly, v: C64, rng: &mut StreamRng) -> Result<C64> {
    if a.degree() == 1 {
        return Ok((v - a.coeffs[0]) / a.coeffs[1]);
    }
    let r = poly_roots(&a.shifted(v))?;
    Ok(r[rng.gen_range(0..r.len())])
}

fn resolve(map: &MapSpec, l: usize, method: DegreeMethod) -> Result<DegreeMethod> {
    let k = map.dimension();
    if l == 0 || l > k {
        return Err(Error::InvalidInput(format!(
            "degree order l = {l} outside 1..={k}"
        )));
    }
    if l == k {
        return Ok(DegreeMethod::Analytic);
    }
    let product = map.domain().slice(0).is_some();
    Ok(match method {
        DegreeMethod::Auto => match map.family() {
            _ if triangular(map.family()).is_some() && product => DegreeMethod::Fibered,
            Family::ProductPower2D {
                variant: PowerVariant::Diagonal,
                ..
            } => DegreeMethod::Pushforward,
            _ => DegreeMethod::Forward,
        },
        DegreeMethod::Fibered if triangular(map.family()).is_none() || !product => {
            return Err(Error::Unsupported(
                "the fibered estimator needs a triangular map on a product domain".into(),
            ))
        }
        DegreeMethod::Analytic => {
            return Err(Error::InvalidInput(
                "the analytic formula only applies to l = k".into(),
            ))
        }
        m => m,
    })
}

/// `d_{l,n}` for `n = 0..=n_max` from one sample set.
pub fn degree_table(
    map: &MapSpec,
    l: usize,
    n_max: usize,
    samples: usize,
    seed: Seed,
    method: DegreeMethod,
) -> Result<DegreeTable> {
    if samples < 2 {
        return Err(Error::InvalidInput(
            "degree estimates need at least two samples".into(),
        ));
    }
    let method = resolve(map, l, method)?;
    let levels = n_max + 1;
    let vol = map.domain().volume();
    let rows: Vec<DegreeRow> = match method {
        DegreeMethod::Analytic => {
            let u = volume_of_u(map, samples, seed)?;
            let dt = map.topological_degree() as f64;
            (0..levels)
                .map(|n| {
                    let s = dt.powi(n as i32);
                    DegreeRow {
                        n,
                        estimate: s * u.mean,
                        stderr: s * u.stderr,
                        samples,
                    }
                })
                .collect()
        }
        _ => {
            let stats = match method {
                DegreeMethod::Forward => forward(map, levels, samples, seed)?,
                DegreeMethod::Pushforward => pushforward(map, levels, samples, seed)?,
                _ => fibered(map, levels, samples, seed)?,
            };
            stats.require_acceptance(&format!("{method:?} estimate of d_1,n"))?;
            stats
                .estimates
                .iter()
                .enumerate()
                .map(|(n, e)| DegreeRow {
                    n,
                    estimate: e.mean * vol,
                    stderr: e.stderr * vol,
                    samples,
                })
                .collect()
        }
    };
    let growth_rate = tail_slope(rows.iter().map(|r| (r.n, r.estimate)));
    Ok(DegreeTable {
        l,
        method,
        rows,
        growth_rate,
    })
}

/// One entry of [`degree_table`] with the automatic method.
pub fn degree_estimate(
    map: &MapSpec,
    l: usize,
    n: usize,
    samples: usize,
    seed: Seed,
) -> Result<Estimate> {
    let t = degree_table(map, l, n, samples, seed, DegreeMethod::Auto)?;
    let r = t.rows[n];
    Ok(Estimate {
        mean: r.estimate,
        stderr: r.stderr,
    })
}

/// Least-squares slope of `log v_n` over the last `ceil(n_max / 2)` points
/// with `v_n > 0`.
pub(crate) fn tail_slope(points: impl Iterator<Item = (usize, f64)>) -> Option<f64> {
    let pts: Vec<(usize, f64)> = points.collect();
    let n_max = pts.iter().map(|p| p.0).max()?;
    let from = n_max + 1 - n_max.div_ceil(2).max(2).min(n_max + 1);
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts
        .iter()
        .filter(|(n, v)| *n >= from && *v > 0.0)
        .map(|(n, v)| (*n as f64, v.ln()))
        .unzip();
    fit_line(&xs, &ys).map(|f| f.slope)
}

/// `vol(U)` with `U = f^{-1}(V)` by uniform sampling of V.
pub fn volume_of_u(map: &MapSpec, samples: usize, seed: Seed) -> Result<Estimate> {
    let dom = map.domain();
    let s = accumulate(samples, 1, seed, |rng, v| {
        let x = dom.sample_uniform(rng);
        if dom.contains(&map.eval(&x)) {
            v[0] = Some(1.0);
        }
        Ok(())
    })?;
    Ok(s.estimates[0].scaled(dom.volume()))
}

fn forward(map: &MapSpec, levels: usize, samples: usize, seed: Seed) -> Result<LevelStats> {
    let dom = map.domain();
    accumulate(samples, levels, seed, |rng, v| {
        let mut w = dom.sample_uniform(rng);
        let mut m = CMat::identity(map.dimension());
        for slot in v.iter_mut() {
            let fro = m.frobenius_sqr();
            m = map.jacobian(&w) * m;
            w = map.eval(&w);
            if !dom.contains(&w) {
                break;
            }
            *slot = Some(fro);
        }
        Ok(())
    })
}

fn pushforward(map: &MapSpec, levels: usize, samples: usize, seed: Seed) -> Result<LevelStats> {
    let dom = map.domain();
    let dt = map.topological_degree() as f64;
    accumulate(samples, levels, seed, |rng, v| {
        let y = dom.sample_uniform(rng);
        if !dom.contains(&map.eval(&y)) {
            return Ok(());
        }
        let mut x = y;
        let mut b = CMat::identity(map.dimension());
        let mut scale = 1.0;
        for (n, slot) in v.iter_mut().enumerate() {
            if n > 0 {
                x = random_preimage(map, &x, rng)?;
                if !dom.contains(&x) {
                    break;
                }
                let j = map.jacobian(&x);
                let det = j.det();
                if det.norm() == 0.0 {
                    break;
                }
                b = j.adjugate() * b;
                scale *= dt / det.norm_sqr();
            }
            *slot = Some(scale * b.frobenius_sqr());
        }
        Ok(())
    })
}

fn fibered(map: &MapSpec, levels: usize, samples: usize, seed: Seed) -> Result<LevelStats> {
    let dom = map.domain();
    let (a, p, q) = triangular(map.family()).expect("resolved to a triangular family");
    let (d1, d2): (Slice, Slice) = (dom.slice(0).unwrap(), dom.slice(1).unwrap());
    let da = a.degree() as f64;
    let da_prime = a.derivative();
    accumulate(samples, levels, seed, |rng, v| {
        let x2 = d2.sample(rng);
        let mut base = vec![x2];
        for _ in 0..levels {
            let next = q.eval(*base.last().unwrap());
            if !d2.contains(next) {
                break;
            }
            base.push(next);
        }
        // base[j] = Q^j(x2) for j < base.len(); level n needs j <= n + 1
        for (n, slot) in v.iter_mut().enumerate() {
            if base.len() < n + 2 {
                break;
            }
            let mut z = d1.sample(rng);
            let mut log_dfib = 0.0;
            let mut inside = true;
            for j in (0..=n).rev() {
                z = random_root(&a, z - p.eval(base[j]), rng)?;
                if !d1.contains(z) {
                    inside = false;
                    break;
                }
                log_dfib += da_prime.eval(z).norm().ln();
            }
            if !inside {
                continue;
            }
            let weight = ((n + 1) as f64 * da.ln() - 2.0 * log_dfib).exp();
            let (_, m) = map.iterate_with_derivative(&Point::new2(z, x2), n);
            *slot = Some(weight * m.frobenius_sqr());
        }
        Ok(())
    })
}

/// `l,n,estimate,stderr,samples`.
pub fn write_degree_csv<W: Write>(table: &DegreeTable, mut out: W) -> Result<()> {
    writeln!(out, "l,n,estimate,stderr,samples")?;
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{}",
            table.l, r.n, r.estimate, r.stderr, r.samples
        )?;
    }
    Ok(())
}
