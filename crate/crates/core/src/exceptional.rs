//! Fiber counts inside an analytic set X: `N^n_X(z)`, the ratio
//! `tau_X = lim N^n_X / d_t^n` and the total-invariance verdict.

use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::point::{Point, C64};
use crate::preimage::{fiber, fiber_size, DEFAULT_CAP, DEFAULT_TOL};
use crate::rng::{par_indexed, Seed};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::Write;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    /// `{a z1 + b z2 = c}` in C^2.
    Line {
        a: C64,
        b: C64,
        c: C64,
    },
    Point(Point),
}

impl Component {
    pub fn axis(fixed: usize, value: C64) -> Self {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let (a, b) = if fixed == 0 { (one, zero) } else { (zero, one) };
        Component::Line { a, b, c: value }
    }

    /// Largest defining-polynomial residual at `p` relative to `1 + |p|`.
    fn defect(&self, p: &Point, k: usize) -> f64 {
        let scale = 1.0 + p.norm();
        match self {
            Component::Line { a, b, c } => {
                let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
                (*a * p[0] + *b * p[1] - *c).norm() / norm / scale
            }
            Component::Point(q) => (0..k).map(|j| (p[j] - q[j]).norm()).fold(0.0, f64::max) / scale,
        }
    }
}

/// A finite union of complex lines and points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicSet {
    pub k: usize,
    pub components: Vec<Component>,
}

impl AlgebraicSet {
    pub fn new(k: usize, components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("X needs at least one component".into()));
        }
        for c in &components {
            match c {
                Component::Line { a, b, .. } if k != 2 || a.norm() + b.norm() == 0.0 => {
                    return Err(Error::InvalidInput(
                        "lines need k = 2 and a nonzero normal".into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(AlgebraicSet { k, components })
    }

    /// `{z1 z2 = 0}`.
    pub fn axes() -> Self {
        let zero = C64::new(0.0, 0.0);
        AlgebraicSet {
            k: 2,
            components: vec![Component::axis(0, zero), Component::axis(1, zero)],
        }
    }

    pub fn point(p: Point, k: usize) -> Self {
        AlgebraicSet {
            k,
            components: vec![Component::Point(p)],
        }
    }

    pub fn distance(&self, p: &Point) -> f64 {
        self.components
            .iter()
            .map(|c| c.defect(p, self.k))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        self.distance(p) <= tol
    }

    /// A point of component `i` with free parameter `t`.
    fn parametrize(&self, i: usize, t: C64) -> Point {
        match &self.components[i] {
            Component::Point(p) => *p,
            Component::Line { a, b, c } => {
                if b.norm() >= a.norm() {
                    Point::new2(t, (*c - *a * t) / *b)
                } else {
                    Point::new2((*c - *b * t) / *a, t)
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FiberLevel {
    pub n: usize,
    pub count: u64,
    /// `count / d_t^n`.
    pub ratio: f64,
    /// Closest rejected preimage, by defining-polynomial residual.
    pub min_rejected_distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberCountSeries {
    pub z: Point,
    pub topological_degree: u64,
    pub levels: Vec<FiberLevel>,
    pub tau: f64,
}

impl FiberCountSeries {
    /// `N^{n+1} <= d_t N^n` in integers.
    pub fn ratios_nonincreasing(&self) -> bool {
        self.levels
            .windows(2)
            .all(|w| w[1].count as u128 <= self.topological_degree as u128 * w[0].count as u128)
    }

    /// First `n` with `N^n < d_t^n`.
    pub fn drop_at(&self) -> Option<usize> {
        self.levels
            .iter()
            .find(|l| (l.count as u128) < (self.topological_degree as u128).pow(l.n as u32))
            .map(|l| l.n)
    }
}

/// `N^n_X(z) = #{w in f^{-n}(z) : f^i(w) in X, i = 0..n}` with multiplicity,
/// by the recursion `F^n = f^{-1}(F^{n-1}) cap X`.
pub fn fiber_count_in_x(
    map: &MapSpec,
    x: &AlgebraicSet,
    z: &Point,
    n_max: usize,
    tol: f64,
) -> Result<FiberCountSeries> {
    if x.k != map.dimension() {
        return Err(Error::InvalidInput(format!(
            "X lives in C^{} but the map acts on C^{}",
            x.k,
            map.dimension()
        )));
    }
    match fiber_size(map, n_max) {
        Some(s) if s <= DEFAULT_CAP as u128 => {}
        s => {
            return Err(Error::CapExceeded {
                size: s.unwrap_or(u128::MAX),
                cap: DEFAULT_CAP,
            })
        }
    }
    let dt = map.topological_degree();
    let mut level: Vec<(Point, u64)> = if x.contains(z, tol) {
        vec![(*z, 1)]
    } else {
        vec![]
    };
    let mut levels = Vec::with_capacity(n_max + 1);
    levels.push(FiberLevel {
        n: 0,
        count: level.len() as u64,
        ratio: level.len() as f64,
        min_rejected_distance: None,
    });
    for n in 1..=n_max {
        let mut next = Vec::new();
        let mut min_rej: Option<f64> = None;
        for (w, m) in &level {
            for (v, mv) in fiber(map, w, DEFAULT_TOL)?.points {
                let d = x.distance(&v);
                if d <= tol {
                    next.push((v, m * mv));
                } else {
                    min_rej = Some(min_rej.map_or(d, |r| r.min(d)));
                }
            }
        }
        level = next;
        let count: u64 = level.iter().map(|(_, m)| m).sum();
        levels.push(FiberLevel {
            n,
            count,
            ratio: count as f64 / (dt as f64).powi(n as i32),
            min_rejected_distance: min_rej,
        });
    }
    let tau = levels.last().expect("level 0 exists").ratio;
    Ok(FiberCountSeries {
        z: *z,
        topological_degree: dt,
        levels,
        tau,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// `N^n = d_t^n` for every `n <= n_max`.
    Member,
    NonMember {
        drop_at: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    pub probe: Point,
    pub component: usize,
    pub series: FiberCountSeries,
    pub verdict: Verdict,
}

const PROBE_TRIES: usize = 1000;

/// Probes spread round-robin over the components of X, with line
/// parameters uniform in the disc of V's outer radius and points outside V
/// redrawn.
pub fn invariance_verdict(
    map: &MapSpec,
    x: &AlgebraicSet,
    probes: usize,
    n_max: usize,
    tol: f64,
    seed: Seed,
) -> Result<Vec<ProbeResult>> {
    let dom = map.domain();
    let r = dom.outer_radius();
    let results = par_indexed(probes, |i| {
        let comp = i % x.components.len();
        let mut rng = seed.stream(i as u64);
        let mut probe = None;
        for _ in 0..PROBE_TRIES {
            let t = dom.center[0]
                + C64::from_polar(r * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
            let p = x.parametrize(comp, t);
            if dom.contains(&p) {
                probe = Some(p);
                break;
            }
            if matches!(x.components[comp], Component::Point(_)) {
                break;
            }
        }
        let probe = probe
            .ok_or_else(|| Error::InvalidInput(format!("component {comp} of X does not meet V")))?;
        let series = fiber_count_in_x(map, x, &probe, n_max, tol)?;
        let verdict = match series.drop_at() {
            None => Verdict::Member,
            Some(n) => Verdict::NonMember { drop_at: n },
        };
        Ok(ProbeResult {
            probe,
            component: comp,
            series,
            verdict,
        })
    });
    results.into_iter().collect()
}

/// `re1,im1[,re2,im2],n,count,ratio,verdict`, one row per probe and level.
pub fn write_exceptional_csv<W: Write>(
    k: usize,
    results: &[ProbeResult],
    mut out: W,
) -> Result<()> {
    let cols: Vec<String> = (1..=k)
        .flat_map(|j| [format!("probe_re{j}"), format!("probe_im{j}")])
        .collect();
    writeln!(out, "{},n,count,ratio,verdict", cols.join(","))?;
    for r in results {
        let coords: Vec<String> = (0..k)
            .flat_map(|j| {
                [
                    format!("{:.16e}", r.probe[j].re),
                    format!("{:.16e}", r.probe[j].im),
                ]
            })
            .collect();
        let verdict = match r.verdict {
            Verdict::Member => "MEMBER".to_string(),
            Verdict::NonMember { drop_at } => format!("NONMEMBER:{drop_at}"),
        };
        for l in &r.series.levels {
            writeln!(
                out,
                "{},{},{},{:.16e},{}",
                coords.join(","),
                l.n,
                l.count,
                l.ratio,
                verdict
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn swap_axes_are_totally_invariant() {
        let m = crate::reference::reference_map("wd2z").unwrap();
        let s = fiber_count_in_x(
            &m,
            &AlgebraicSet::axes(),
            &Point::new2(c(1.0), c(0.0)),
            3,
            1e-9,
        )
        .unwrap();
        let counts: Vec<u64> = s.levels.iter().map(|l| l.count).collect();
        assert_eq!(counts, vec![1, 3, 9, 27]);
        assert_eq!(s.tau, 1.0);
    }

    #[test]
    fn origin_of_square() {
        let m = MapSpec::poly1d(&[0.0, 0.0, 1.0]).unwrap();
        let s = fiber_count_in_x(
            &m,
            &AlgebraicSet::point(Point::real1(0.0), 1),
            &Point::real1(0.0),
            5,
            1e-9,
        )
        .unwrap();
        assert_eq!(
            s.levels.iter().map(|l| l.count).collect::<Vec<_>>(),
            vec![1, 2, 4, 8, 16, 32]
        );
        assert_eq!(s.tau, 1.0);
    }

    #[test]
    fn basilica_origin_is_not_exceptional() {
        let m = MapSpec::poly1d(&[-1.0, 0.0, 1.0]).unwrap();
        let s = fiber_count_in_x(
            &m,
            &AlgebraicSet::point(Point::real1(0.0), 1),
            &Point::real1(0.0),
            3,
            1e-9,
        )
        .unwrap();
        assert_eq!(s.levels[1].count, 0);
        assert_eq!(s.tau, 0.0);
        assert!(s.ratios_nonincreasing());
        assert_eq!(s.drop_at(), Some(1));
    }

    #[test]
    fn point_outside_x_has_zero_tau() {
        let m = MapSpec::poly1d(&[0.0, 0.0, 1.0]).unwrap();
        let s = fiber_count_in_x(
            &m,
            &AlgebraicSet::point(Point::real1(0.0), 1),
            &Point::real1(0.5),
            3,
            1e-9,
        )
        .unwrap();
        assert!(s.levels.iter().all(|l| l.count == 0));
    }
}
