//! Periodic points of period dividing `n`, their classification, the
//! periodic-point measures `nu_n` and a moment discrepancy against a cloud.

mod chain;
mod closed;

use crate::error::{Error, Result};
use crate::maps::{Family, MapSpec, PowerVariant, Shape};
use crate::measure::{integrate, Provenance, WeightedCloud};
use crate::observables::Observable;
use crate::point::{Point, C64};
use crate::poly::Poly;
use crate::rng::{par_indexed, Seed};
use chain::{check_total, exact_fixed_points, generic_start, sampled_fixed_points, Chain};
use serde::Serialize;
use std::io::Write;

/// Neutrality band around modulus one.
pub const TOL_CLASS: f64 = 1e-6;
/// Largest fixed-point problem solved exhaustively.
pub const EXACT_CAP: u64 = 4096;
/// Largest closed-form set that is materialised.
pub const MAX_POINTS: u64 = 1 << 22;
/// Newton starts per expected point in the sampled regime.
const STARTS_PER_POINT: usize = 4;
const MAX_STARTS: usize = 1 << 18;
const SAMPLED_SEED: Seed = Seed(0x9e71_0d1c);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointClass {
    Repelling,
    Attracting,
    Saddle,
    Neutral,
}

impl PointClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PointClass::Repelling => "repelling",
            PointClass::Attracting => "attracting",
            PointClass::Saddle => "saddle",
            PointClass::Neutral => "neutral",
        }
    }
}

/// Any modulus inside `[1 - tol, 1 + tol]` makes the point neutral.
pub fn classify(moduli: &[f64], tol_class: f64) -> PointClass {
    if moduli.iter().any(|m| (m - 1.0).abs() <= tol_class) {
        PointClass::Neutral
    } else if moduli.iter().all(|&m| m > 1.0) {
        PointClass::Repelling
    } else if moduli.iter().all(|&m| m < 1.0) {
        PointClass::Attracting
    } else {
        PointClass::Saddle
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Completeness {
    /// Every root of `f^n = id` was found.
    Exact,
    /// Newton from sampled starts; `count` is only a lower bound.
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicPoint {
    pub point: Point,
    pub multiplicity: u64,
    /// Eigenvalues of `D(f^n)`, largest modulus first.
    pub multipliers: Vec<C64>,
    pub moduli: Vec<f64>,
    pub class: PointClass,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicPointSet {
    pub period: usize,
    pub k: usize,
    pub topological_degree: u64,
    /// `d_t^n`.
    pub expected_count: u128,
    /// Points found in V, counted with multiplicity.
    pub count: u64,
    pub completeness: Completeness,
    pub points: Vec<PeriodicPoint>,
}

impl PeriodicPointSet {
    pub fn count_of(&self, class: PointClass) -> u64 {
        self.points
            .iter()
            .filter(|p| p.class == class)
            .map(|p| p.multiplicity)
            .sum()
    }

    pub fn is_lower_bound(&self) -> bool {
        self.completeness == Completeness::LowerBound
    }
}

pub fn periodic_points(map: &MapSpec, n: usize, tol: f64) -> Result<PeriodicPointSet> {
    periodic_points_with(map, n, tol, TOL_CLASS)
}

/// Periodic points for several periods, solved in parallel.
pub fn periodic_points_range(
    map: &MapSpec,
    periods: &[usize],
    tol: f64,
) -> Vec<Result<PeriodicPointSet>> {
    par_indexed(periods.len(), |i| periodic_points(map, periods[i], tol))
}

/// Solves `f^n(x) = x`, keeps the solutions in V and classifies them.
///
/// The count with multiplicity must equal `d_t^n` when the solve is exact,
/// except on annulus domains, which exclude the periodic points on the axes.
pub fn periodic_points_with(
    map: &MapSpec,
    n: usize,
    tol: f64,
    tol_class: f64,
) -> Result<PeriodicPointSet> {
    if n == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let dt = map.topological_degree();
    let expected = (dt as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let dom = map.domain();
    let (raw, completeness) = match map.family() {
        Family::Poly1D { p } => {
            let (pts, c) = poly_periodic(p, n, dom.center[0], dom.radii[0], tol)?;
            (
                pts.into_iter()
                    .map(|(z, m)| (Point::new1(z), m))
                    .collect::<Vec<_>>(),
                c,
            )
        }
        Family::Skew2D { lambda, p, q } => {
            let ln = lambda.powu(n as u32);
            if (C64::new(1.0, 0.0) - ln).norm() < 1e-12 {
                return Err(Error::Unsupported(format!(
                    "lambda^{n} = 1: the first coordinate has no isolated fixed points"
                )));
            }
            let (base, c) = poly_periodic(q, n, dom.center[1], dom.radii[1], tol)?;
            let lifted = base
                .into_iter()
                .map(|(z2, m)| {
                    let mut s = C64::new(0.0, 0.0);
                    let mut w = z2;
                    for _ in 0..n {
                        s = s * *lambda + p.eval(w);
                        w = q.eval(w);
                    }
                    (Point::new2(s / (C64::new(1.0, 0.0) - ln), z2), m)
                })
                .collect();
            (lifted, c)
        }
        Family::Poly2DTriangularizable { a, p, q } => {
            if expected > EXACT_CAP as u128 {
                return Err(Error::CapExceeded {
                    size: expected,
                    cap: EXACT_CAP,
                });
            }
            let (base, _) = poly_periodic(q, n, dom.center[1], dom.radii[1], tol)?;
            let mut out = Vec::new();
            for (z2, m2) in base {
                let mut w = z2;
                let mut steps = Vec::with_capacity(n);
                for _ in 0..n {
                    steps.push(a.shifted(-p.eval(w)));
                    w = q.eval(w);
                }
                let chain = Chain {
                    steps: steps.iter().collect(),
                };
                let fiber =
                    exact_fixed_points(&chain, dom.center[0] + generic_start(dom.radii[0]), tol)?;
                check_total(&fiber, a.degree().pow(n as u32))?;
                out.extend(
                    fiber
                        .into_iter()
                        .map(|(z1, m1)| (Point::new2(z1, z2), m1 * m2)),
                );
            }
            (out, Completeness::Exact)
        }
        Family::ProductPower2D { degree, variant } => {
            if expected > MAX_POINTS as u128 {
                return Err(Error::CapExceeded {
                    size: expected,
                    cap: MAX_POINTS,
                });
            }
            let pts = match variant {
                PowerVariant::Diagonal => closed::diagonal(*degree, n),
                PowerVariant::Swap => closed::swap(*degree, n),
            };
            (
                pts.into_iter().map(|p| (p, 1)).collect(),
                Completeness::Exact,
            )
        }
    };

    let kept: Vec<(Point, u64)> = raw.into_iter().filter(|(p, _)| dom.contains(p)).collect();
    let count: u64 = kept.iter().map(|(_, m)| m).sum();
    if completeness == Completeness::Exact
        && dom.shape != Shape::Annulus2D
        && count as u128 != expected
    {
        return Err(Error::SolveInconsistency(format!(
            "found {count} periodic points of period {n} in V, expected d_t^n = {expected}"
        )));
    }
    let points = par_indexed(kept.len(), |i| {
        let (point, multiplicity) = kept[i];
        let (_, m) = map.iterate_with_derivative(&point, n);
        let mut multipliers = m.eigenvalues();
        multipliers.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        let moduli: Vec<f64> = multipliers.iter().map(|c| c.norm()).collect();
        let class = classify(&moduli, tol_class);
        PeriodicPoint {
            point,
            multiplicity,
            multipliers,
            moduli,
            class,
        }
    });
    Ok(PeriodicPointSet {
        period: n,
        k: map.dimension(),
        topological_degree: dt,
        expected_count: expected,
        count,
        completeness,
        points,
    })
}

fn poly_periodic(
    p: &Poly,
    n: usize,
    center: C64,
    radius: f64,
    tol: f64,
) -> Result<(Vec<(C64, u64)>, Completeness)> {
    let chain = Chain { steps: vec![p; n] };
    let start = center + generic_start(radius);
    match chain.total_degree() {
        Some(d) if d as u64 <= EXACT_CAP => {
            let pts = exact_fixed_points(&chain, start, tol)?;
            check_total(&pts, d)?;
            Ok((pts, Completeness::Exact))
        }
        d => {
            let starts = d.map_or(MAX_STARTS, |d| {
                d.saturating_mul(STARTS_PER_POINT).min(MAX_STARTS)
            });
            let pts =
                sampled_fixed_points(&chain, start, starts, tol, SAMPLED_SEED.derive(n as u64));
            Ok((
                pts.into_iter().map(|z| (z, 1)).collect(),
                Completeness::LowerBound,
            ))
        }
    }
}

/// `nu_n = d_t^{-n} sum delta_a`, not renormalised: the total mass is
/// `#selected / d_t^n`.
pub fn periodic_measure(set: &PeriodicPointSet, repelling_only: bool) -> WeightedCloud {
    let w = (set.expected_count as f64).recip();
    let chosen: Vec<&PeriodicPoint> = set
        .points
        .iter()
        .filter(|p| !repelling_only || p.class == PointClass::Repelling)
        .collect();
    let mut cloud = WeightedCloud::equal_weights(
        set.k,
        chosen.iter().map(|p| p.point).collect(),
        Provenance::PeriodicPoints,
    )
    .with_param("period", set.period)
    .with_param("repelling_only", repelling_only)
    .with_param("completeness", format!("{:?}", set.completeness));
    cloud.weights = chosen.iter().map(|p| w * p.multiplicity as f64).collect();
    cloud
}

/// `max_phi |int phi dA - int phi dB|` over `family`.
pub fn discrepancy(a: &WeightedCloud, b: &WeightedCloud, family: &[Observable]) -> Result<f64> {
    if a.k != b.k {
        return Err(Error::InvalidInput(format!(
            "clouds live in C^{} and C^{}",
            a.k, b.k
        )));
    }
    Ok(family
        .iter()
        .map(|phi| (integrate(a, phi) - integrate(b, phi)).abs())
        .fold(0.0, f64::max))
}

/// One row per point and unit of multiplicity:
/// `period,re1,im1[,re2,im2],mult1[,mult2],class` where `mult` are the
/// multiplier moduli.
pub fn write_periodic_csv<W: Write>(set: &PeriodicPointSet, mut out: W) -> Result<()> {
    let mut head = vec!["period".to_string()];
    for j in 1..=set.k {
        head.push(format!("re{j}"));
        head.push(format!("im{j}"));
    }
    for j in 1..=set.k {
        head.push(format!("mult{j}"));
    }
    head.push("class".into());
    writeln!(out, "{}", head.join(","))?;
    for p in &set.points {
        let mut row = vec![set.period.to_string()];
        for j in 0..set.k {
            row.push(format!("{:.16e}", p.point[j].re));
            row.push(format!("{:.16e}", p.point[j].im));
        }
        row.extend(p.moduli.iter().map(|m| format!("{m:.16e}")));
        row.push(p.class.as_str().into());
        let line = row.join(",");
        for _ in 0..p.multiplicity {
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Domain;

    fn square() -> MapSpec {
        MapSpec::poly1d(&[0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn square_period_one() {
        let s = periodic_points(&square(), 1, 1e-8).unwrap();
        assert_eq!(s.count, 2);
        let mut pts = s.points.clone();
        pts.sort_by(|a, b| a.point[0].re.total_cmp(&b.point[0].re));
        assert!(pts[0].point[0].norm() < 1e-12);
        assert_eq!(pts[0].class, PointClass::Attracting);
        assert!(pts[0].moduli[0] < 1e-12);
        assert!((pts[1].point[0] - 1.0).norm() < 1e-12);
        assert_eq!(pts[1].class, PointClass::Repelling);
        assert!((pts[1].moduli[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn square_period_three() {
        let s = periodic_points(&square(), 3, 1e-8).unwrap();
        assert_eq!(s.count, 8);
        assert_eq!(s.count_of(PointClass::Repelling), 7);
        for p in s.points.iter().filter(|p| p.class == PointClass::Repelling) {
            assert!((p.point[0].powu(7) - 1.0).norm() < 1e-10);
            assert!((p.moduli[0] - 8.0).abs() < 1e-9);
        }
        let nu = periodic_measure(&s, true);
        assert!((nu.total_mass() - 7.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn empty_selection_has_no_mass() {
        let set = PeriodicPointSet {
            period: 1,
            k: 1,
            topological_degree: 2,
            expected_count: 2,
            count: 0,
            completeness: Completeness::Exact,
            points: vec![],
        };
        let nu = periodic_measure(&set, true);
        assert!(nu.is_empty());
        assert_eq!(nu.total_mass(), 0.0);
    }

    #[test]
    fn classification_bands() {
        assert_eq!(classify(&[2.0, 0.5], TOL_CLASS), PointClass::Saddle);
        assert_eq!(classify(&[1.0 + 1e-7], TOL_CLASS), PointClass::Neutral);
        assert_eq!(classify(&[0.9, 0.1], TOL_CLASS), PointClass::Attracting);
        assert_eq!(classify(&[3.0, 1.5], TOL_CLASS), PointClass::Repelling);
    }

    #[test]
    fn torus_annulus_reports_actual_count() {
        let m = MapSpec::new(
            Family::ProductPower2D {
                degree: 2,
                variant: PowerVariant::Diagonal,
            },
            Domain::annulus(0.5, 2.0),
        )
        .unwrap();
        let s = periodic_points(&m, 2, 1e-8).unwrap();
        assert_eq!(s.expected_count, 16);
        assert_eq!(s.count, 9);
    }

    #[test]
    fn point_mass_against_circle() {
        let zero =
            WeightedCloud::equal_weights(1, vec![Point::real1(0.0)], Provenance::PeriodicPoints);
        let circle: Vec<Point> = (0..64)
            .map(|j| Point::new1(C64::from_polar(1.0, j as f64 * 0.1)))
            .collect();
        let circle = WeightedCloud::equal_weights(1, circle, Provenance::BackwardWalk);
        let d = discrepancy(&zero, &circle, &[Observable::abs_sqr(0)]).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert_eq!(
            discrepancy(&circle, &circle, &crate::observables::moment_family(1, 4)).unwrap(),
            0.0
        );
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let s = periodic_points(&square(), 2, 1e-8).unwrap();
        let mut buf = Vec::new();
        write_periodic_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "period,re1,im1,mult1,class");
        assert_eq!(lines.len(), 5);
    }
}
