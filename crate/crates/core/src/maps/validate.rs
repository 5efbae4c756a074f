use super::{eval_family, Domain, Family, MapSpec, PowerVariant};
use crate::error::{Error, Result};
use crate::preimage::{fiber, DEFAULT_TOL};
use crate::stats::fit_line;
use serde::Serialize;

/// Required gap, as a fraction of the gauge, between `f^{-1}(∂V)` and `∂V`.
pub const DEFAULT_MARGIN: f64 = 0.02;

const LOJASIEWICZ_DIRECTIONS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub is_polynomial_like: bool,
    /// Largest gauge of a preimage of a sampled boundary point, scaled by
    /// the outer radius of V.
    pub max_preimage_radius: f64,
    /// Same quantity before scaling; below one means inside V.
    pub max_gauge: f64,
    /// `(1 - max_gauge) * outer radius`, a distance proxy from
    /// `f^{-1}(∂V)` to `∂V`.
    pub margin: f64,
    pub required_margin: f64,
    /// `(lambda, l)` with `|f(z)| >= lambda |z|^l` fitted at large radii.
    pub lojasiewicz_estimate: (f64, f64),
    pub boundary_samples: usize,
}

/// Solves fibers over `boundary_samples` points of `∂V` and checks they all
/// land strictly inside V with the default margin.
pub fn validate_polynomial_like(
    map: &MapSpec,
    v: &Domain,
    boundary_samples: usize,
) -> Result<ValidationReport> {
    validate_with_margin(map.family(), v, boundary_samples, DEFAULT_MARGIN)
}

pub(super) fn validate_with_margin(
    family: &Family,
    v: &Domain,
    boundary_samples: usize,
    required_margin: f64,
) -> Result<ValidationReport> {
    if boundary_samples < 16 {
        return Err(Error::InvalidInput(format!(
            "boundary_samples = {boundary_samples} < 16"
        )));
    }
    if v.k != family.dimension() {
        return Err(Error::InvalidInput("domain dimension mismatch".into()));
    }
    // fibers do not depend on V; borrow a map on V itself
    let probe = MapSpec {
        family: family.clone(),
        domain: v.clone(),
    };
    let mut max_gauge: f64 = 0.0;
    for i in 0..boundary_samples {
        let b = v.boundary_point(i, boundary_samples);
        for (w, _) in fiber(&probe, &b, DEFAULT_TOL)?.points {
            max_gauge = max_gauge.max(v.gauge(&w));
        }
    }
    let outer = v.outer_radius();
    Ok(ValidationReport {
        is_polynomial_like: max_gauge < 1.0 - required_margin,
        max_preimage_radius: max_gauge * outer,
        max_gauge,
        margin: (1.0 - max_gauge) * outer,
        required_margin,
        lojasiewicz_estimate: lojasiewicz(family, outer),
        boundary_samples,
    })
}

fn lojasiewicz(family: &Family, base_radius: f64) -> (f64, f64) {
    let k = family.dimension();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 1..=6 {
        let r = base_radius * 2f64.powi(i);
        let sphere = Domain::ball(k, r);
        let m = (0..LOJASIEWICZ_DIRECTIONS)
            .map(|j| eval_family(family, &sphere.boundary_point(j, LOJASIEWICZ_DIRECTIONS)).norm())
            .fold(f64::INFINITY, f64::min);
        if m > 0.0 && m.is_finite() {
            xs.push(r.ln());
            ys.push(m.ln());
        }
    }
    match fit_line(&xs, &ys) {
        Some(f) => (f.intercept.exp(), f.slope),
        None => (f64::NAN, f64::NAN),
    }
}

/// Default V for a family: the annulus `1/2 < |z|, |w| < 2` for the diagonal
/// power map, otherwise the smallest ball (k = 1) or polydisc (k = 2) of
/// radius `2^j`, `j = 1..10`, that validates.
pub fn auto_domain(family: &Family) -> Result<Domain> {
    let k = family.dimension();
    let candidates: Vec<Domain> = match family {
        Family::ProductPower2D {
            variant: PowerVariant::Diagonal,
            ..
        } => vec![Domain::annulus(0.5, 2.0)],
        _ => (1..=10)
            .map(|j| {
                let r = 2f64.powi(j);
                if k == 1 {
                    Domain::ball(1, r)
                } else {
                    Domain::polydisc(2, r)
                }
            })
            .collect(),
    };
    for d in candidates {
        if validate_with_margin(family, &d, 64, DEFAULT_MARGIN)?.is_polynomial_like {
            return Ok(d);
        }
    }
    Err(Error::NotPolynomialLike(format!(
        "{} on every default domain",
        family.tag()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::C64;
    use crate::poly::Poly;

    fn poly(c: &[f64]) -> Family {
        Family::Poly1D {
            p: Poly::from_real(c),
        }
    }

    #[test]
    fn square_on_disc_four_is_polynomial_like() {
        let m = MapSpec::new(poly(&[0.0, 0.0, 1.0]), Domain::ball(1, 4.0)).unwrap();
        let r = validate_polynomial_like(&m, m.domain(), 64).unwrap();
        assert!(r.is_polynomial_like);
        // sqrt of radius 4 is radius 2
        assert!((r.max_preimage_radius - 2.0).abs() < 1e-12);
        assert!((r.lojasiewicz_estimate.1 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn shifted_square_on_small_disc_is_not() {
        let m = MapSpec::new(poly(&[10.0, 0.0, 1.0]), Domain::ball(1, 2.0)).unwrap();
        let r = validate_polynomial_like(&m, m.domain(), 32).unwrap();
        assert!(!r.is_polynomial_like);
        assert!(r.max_preimage_radius > 2.0);
    }

    #[test]
    fn torus_square_on_polydisc() {
        let f = Family::ProductPower2D {
            degree: 2,
            variant: PowerVariant::Diagonal,
        };
        let m = MapSpec::new(f, Domain::polydisc(2, 4.0)).unwrap();
        let r = validate_polynomial_like(&m, m.domain(), 64).unwrap();
        assert!(r.is_polynomial_like);
        assert!(
            (r.lojasiewicz_estimate.1 - 2.0).abs() < 0.05,
            "{:?}",
            r.lojasiewicz_estimate
        );
    }

    #[test]
    fn skew_product_with_expanding_lambda_validates() {
        let f = Family::Skew2D {
            lambda: C64::new(4.0, 0.0),
            p: Poly::from_real(&[0.0, 0.0, 1.0]),
            q: Poly::from_real(&[0.0, 0.0, 1.0]),
        };
        let m = MapSpec::new(f, Domain::polydisc(2, 16.0)).unwrap();
        assert!(
            validate_polynomial_like(&m, m.domain(), 128)
                .unwrap()
                .is_polynomial_like
        );
    }

    #[test]
    fn auto_domain_scan() {
        assert_eq!(
            auto_domain(&poly(&[0.0, 0.0, 1.0])).unwrap(),
            Domain::ball(1, 2.0)
        );
        // z^2 - 2 touches the boundary of the radius-2 disc, so the scan moves on
        assert_eq!(auto_domain(&poly(&[-2.0, 0.0, 1.0])).unwrap().radii[0], 4.0);
        assert!(matches!(
            auto_domain(&poly(&[1.0e7, 0.0, 1.0])),
            Err(Error::NotPolynomialLike(_))
        ));
    }

    #[test]
    fn boundary_sample_minimum() {
        let m = MapSpec::new(poly(&[0.0, 0.0, 1.0]), Domain::ball(1, 4.0)).unwrap();
        assert!(validate_polynomial_like(&m, m.domain(), 8).is_err());
    }
}
