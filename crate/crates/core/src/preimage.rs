//! Fibers `f^{-n}(z)` counted with multiplicity.

use crate::error::{Error, Result};
use crate::maps::{Family, MapSpec, PowerVariant};
use crate::point::{Point, C64};
use crate::poly::Poly;
use crate::roots::{cluster, nth_roots, poly_roots};
use rand::Rng;

/// Residual tolerance used when callers have no reason to pick another.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default bound on `d_t^n` for exhaustive fibers.
pub const DEFAULT_CAP: u64 = 1_000_000;

/// Relative distance under which roots are treated as one multiple root.
const CLUSTER_REL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct PreimageSet {
    pub base: Point,
    pub order: usize,
    pub points: Vec<(Point, u64)>,
    pub total: u64,
}

impl PreimageSet {
    pub fn iter(&self) -> impl Iterator<Item = &(Point, u64)> {
        self.points.iter()
    }

    /// `sum m(w) phi(w) / total`.
    pub fn average(&self, phi: impl Fn(&Point) -> f64) -> f64 {
        let s: f64 = self.points.iter().map(|(w, m)| *m as f64 * phi(w)).sum();
        s / self.total as f64
    }
}

fn clustered_roots(p: &Poly, scale: f64) -> Result<Vec<(C64, u64)>> {
    let roots = poly_roots(p)?;
    let tol = CLUSTER_REL * (1.0 + scale);
    Ok(cluster(
        roots.into_iter().map(|r| (Point::new1(r), 1)).collect(),
        tol,
    )
    .into_iter()
    .map(|(p, m)| (p[0], m))
    .collect())
}

fn clustered_nth_roots(z: C64, d: u32) -> Vec<(C64, u64)> {
    if z == C64::new(0.0, 0.0) {
        return vec![(z, d as u64)];
    }
    let tol = CLUSTER_REL * (1.0 + z.norm());
    cluster(
        nth_roots(z, d)
            .into_iter()
            .map(|r| (Point::new1(r), 1))
            .collect(),
        tol,
    )
    .into_iter()
    .map(|(p, m)| (p[0], m))
    .collect()
}

/// The order-one fiber `f^{-1}(z)` with multiplicities summing to `d_t`.
pub fn fiber(map: &MapSpec, z: &Point, tol: f64) -> Result<PreimageSet> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(
            "fiber tolerance must be positive".into(),
        ));
    }
    let points: Vec<(Point, u64)> = match map.family() {
        Family::Poly1D { p } => clustered_roots(&p.shifted(z[0]), z.norm())?
            .into_iter()
            .map(|(w, m)| (Point::new1(w), m))
            .collect(),
        Family::Skew2D { lambda, p, q } => clustered_roots(&q.shifted(z[1]), z[1].norm())?
            .into_iter()
            .map(|(w2, m)| (Point::new2((z[0] - p.eval(w2)) / *lambda, w2), m))
            .collect(),
        Family::ProductPower2D { degree, variant } => match variant {
            PowerVariant::Diagonal => {
                let a = clustered_nth_roots(z[0], *degree);
                let b = clustered_nth_roots(z[1], *degree);
                a.iter()
                    .flat_map(|&(w1, m1)| {
                        b.iter()
                            .map(move |&(w2, m2)| (Point::new2(w1, w2), m1 * m2))
                    })
                    .collect()
            }
            PowerVariant::Swap => clustered_nth_roots(z[0], *degree)
                .into_iter()
                .map(|(w2, m)| (Point::new2(z[1] * 0.5, w2), m))
                .collect(),
        },
        Family::Poly2DTriangularizable { a, p, q } => {
            let mut out = Vec::new();
            for (w2, m2) in clustered_roots(&q.shifted(z[1]), z[1].norm())? {
                let target = z[0] - p.eval(w2);
                for (w1, m1) in clustered_roots(&a.shifted(target), target.norm())? {
                    out.push((Point::new2(w1, w2), m1 * m2));
                }
            }
            out
        }
    };

    let total: u64 = points.iter().map(|(_, m)| m).sum();
    if total != map.topological_degree() {
        return Err(Error::SolveInconsistency(format!(
            "fiber over {:?} has total multiplicity {total}, expected {}",
            z,
            map.topological_degree()
        )));
    }
    let bound = tol * (1.0 + z.norm());
    for (w, _) in &points {
        let r = map.eval(w).dist(z);
        if !(r <= bound) {
            return Err(Error::SolveInconsistency(format!(
                "fiber residual {r:.3e} exceeds {bound:.3e}"
            )));
        }
    }
    Ok(PreimageSet {
        base: *z,
        order: 1,
        points,
        total,
    })
}

/// `d_t^n`, or `None` on overflow.
pub fn fiber_size(map: &MapSpec, n: usize) -> Option<u128> {
    (map.topological_degree() as u128).checked_pow(n as u32)
}

fn check_cap(map: &MapSpec, n: usize, cap: u64) -> Result<u64> {
    match fiber_size(map, n) {
        Some(s) if s <= cap as u128 => Ok(s as u64),
        s => Err(Error::CapExceeded {
            size: s.unwrap_or(u128::MAX),
            cap,
        }),
    }
}

/// The full fiber of `f^n` by breadth-first expansion; multiplicities multiply
/// along preimage chains.
pub fn iterated_fiber(map: &MapSpec, z: &Point, n: usize, cap: u64) -> Result<PreimageSet> {
    let expected = check_cap(map, n, cap)?;
    let mut level = vec![(*z, 1u64)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * map.topological_degree() as usize);
        for (w, m) in &level {
            for (v, mv) in fiber(map, w, DEFAULT_TOL)?.points {
                next.push((v, m * mv));
            }
        }
        level = next;
    }
    let total: u64 = level.iter().map(|(_, m)| m).sum();
    if total != expected {
        return Err(Error::SolveInconsistency(format!(
            "iterated fiber total {total} != {expected}"
        )));
    }
    Ok(PreimageSet {
        base: *z,
        order: n,
        points: level,
        total,
    })
}

/// Draws `w` from `f^{-1}(z)` with probability `m(w) / d_t`.
pub fn random_preimage<R: Rng + ?Sized>(map: &MapSpec, z: &Point, rng: &mut R) -> Result<Point> {
    let f = fiber(map, z, DEFAULT_TOL)?;
    Ok(pick_weighted(&f, rng))
}

pub(crate) fn pick_weighted<R: Rng + ?Sized>(f: &PreimageSet, rng: &mut R) -> Point {
    let mut u = rng.gen_range(0..f.total);
    for (w, m) in &f.points {
        if u < *m {
            return *w;
        }
        u -= m;
    }
    unreachable!("multiplicities sum to total")
}
