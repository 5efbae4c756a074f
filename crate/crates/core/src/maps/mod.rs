//! Supported polynomial-like map families: evaluation, Jacobians, critical
//! sets, the map-spec text format and the polynomial-like validation.

mod domain;
mod graph;
mod schema;
mod validate;

pub use domain::{Domain, Shape, Slice};
pub use graph::{analytic_graph, default_graph_truncation, GraphValue};
pub use schema::{parse_map_spec, serialize_map_spec};
pub use validate::{auto_domain, validate_polynomial_like, ValidationReport, DEFAULT_MARGIN};

use crate::error::{Error, Result};
use crate::point::{CMat, Point, C64, ZERO};
use crate::poly::Poly;
use crate::roots::{cluster, poly_roots};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerVariant {
    /// `(z^d, w^d)`, topological degree `d^2`.
    Diagonal,
    /// `(w^d, 2z)`, topological degree `d`.
    Swap,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Poly1D {
        p: Poly,
    },
    /// `(lambda z1 + P(z2), Q(z2))`
    Skew2D {
        lambda: C64,
        p: Poly,
        q: Poly,
    },
    ProductPower2D {
        degree: u32,
        variant: PowerVariant,
    },
    /// `(A(z1) + P(z2), Q(z2))`
    Poly2DTriangularizable {
        a: Poly,
        p: Poly,
        q: Poly,
    },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Poly1D { .. } => "Poly1D",
            Family::Skew2D { .. } => "Skew2D",
            Family::ProductPower2D { .. } => "ProductPower2D",
            Family::Poly2DTriangularizable { .. } => "Poly2DTriangularizable",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Family::Poly1D { .. } => 1,
            _ => 2,
        }
    }

    pub fn topological_degree(&self) -> u64 {
        match self {
            Family::Poly1D { p } => p.degree() as u64,
            Family::Skew2D { q, .. } => q.degree() as u64,
            Family::ProductPower2D {
                degree,
                variant: PowerVariant::Diagonal,
            } => (*degree as u64).pow(2),
            Family::ProductPower2D {
                degree,
                variant: PowerVariant::Swap,
            } => *degree as u64,
            Family::Poly2DTriangularizable { a, q, .. } => (a.degree() * q.degree()) as u64,
        }
    }

    /// Algebraic degree of the polynomial map on C^k.
    pub fn algebraic_degree(&self) -> u64 {
        let deg = |p: &Poly| if p.is_zero() { 0 } else { p.degree() as u64 };
        match self {
            Family::Poly1D { p } => deg(p),
            Family::Skew2D { p, q, .. } => 1.max(deg(p)).max(deg(q)),
            Family::ProductPower2D { degree, .. } => *degree as u64,
            Family::Poly2DTriangularizable { a, p, q } => deg(a).max(deg(p)).max(deg(q)),
        }
    }

    fn check(&self) -> Result<()> {
        let lead = |p: &Poly, name: &'static str| {
            if p.coeffs.is_empty() || !p.has_nonzero_leading() {
                Err(Error::ZeroLeadingCoefficient(name))
            } else {
                Ok(())
            }
        };
        match self {
            Family::Poly1D { p } => lead(p, "coeffs")?,
            Family::Skew2D { lambda, p, q } => {
                lead(q, "Q")?;
                if p.coeffs.is_empty() {
                    return Err(Error::Schema("P must have at least one coefficient".into()));
                }
                if *lambda == ZERO {
                    return Err(Error::Schema("lambda must be nonzero".into()));
                }
            }
            Family::ProductPower2D { degree, .. } => {
                if *degree < 1 {
                    return Err(Error::Schema("power degree must be at least 1".into()));
                }
            }
            Family::Poly2DTriangularizable { a, p, q } => {
                lead(a, "A")?;
                lead(q, "Q")?;
                if p.coeffs.is_empty() {
                    return Err(Error::Schema("P must have at least one coefficient".into()));
                }
                if a.degree() < 1 {
                    return Err(Error::Schema("A must have degree at least 1".into()));
                }
            }
        }
        if self.topological_degree() < 2 {
            return Err(Error::InvalidInput(format!(
                "topological degree {} < 2; experiments need d_t >= 2",
                self.topological_degree()
            )));
        }
        Ok(())
    }
}

/// A validated polynomial-like map `f: U -> V` with `U = f^{-1}(V)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    family: Family,
    domain: Domain,
}

impl MapSpec {
    /// Builds a map after checking coefficient invariants. The domain is
    /// taken as given; use [`MapSpec::with_auto_domain`] to search one.
    pub fn new(family: Family, domain: Domain) -> Result<Self> {
        family.check()?;
        domain.check()?;
        if domain.k != family.dimension() {
            return Err(Error::Schema(format!(
                "domain dimension {} does not match family dimension {}",
                domain.k,
                family.dimension()
            )));
        }
        Ok(MapSpec { family, domain })
    }

    /// Builds a map on the default domain for its family.
    pub fn with_auto_domain(family: Family) -> Result<Self> {
        family.check()?;
        let domain = auto_domain(&family)?;
        MapSpec::new(family, domain)
    }

    pub fn poly1d(coeffs: &[f64]) -> Result<Self> {
        MapSpec::with_auto_domain(Family::Poly1D {
            p: Poly::from_real(coeffs),
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn with_domain(&self, domain: Domain) -> Result<Self> {
        MapSpec::new(self.family.clone(), domain)
    }

    pub fn dimension(&self) -> usize {
        self.family.dimension()
    }

    pub fn topological_degree(&self) -> u64 {
        self.family.topological_degree()
    }

    pub fn algebraic_degree(&self) -> u64 {
        self.family.algebraic_degree()
    }

    pub fn eval(&self, z: &Point) -> Point {
        eval_family(&self.family, z)
    }

    /// Complex derivative matrix `Df(z)`. The real Jacobian is `|det Df|^2`.
    pub fn jacobian(&self, z: &Point) -> CMat {
        match &self.family {
            Family::Poly1D { p } => CMat::scalar(p.eval_with_derivative(z[0]).1),
            Family::Skew2D { lambda, p, q } => CMat::new2(
                *lambda,
                p.eval_with_derivative(z[1]).1,
                ZERO,
                q.eval_with_derivative(z[1]).1,
            ),
            Family::ProductPower2D { degree, variant } => {
                let d = *degree;
                let dz = |c: C64| {
                    if d == 1 {
                        C64::new(1.0, 0.0)
                    } else {
                        c.powu(d - 1) * d as f64
                    }
                };
                match variant {
                    PowerVariant::Diagonal => CMat::new2(dz(z[0]), ZERO, ZERO, dz(z[1])),
                    PowerVariant::Swap => CMat::new2(ZERO, dz(z[1]), C64::new(2.0, 0.0), ZERO),
                }
            }
            Family::Poly2DTriangularizable { a, p, q } => CMat::new2(
                a.eval_with_derivative(z[0]).1,
                p.eval_with_derivative(z[1]).1,
                ZERO,
                q.eval_with_derivative(z[1]).1,
            ),
        }
    }

    /// `log |det Df(z)|`, i.e. half the log of the real Jacobian.
    pub fn log_abs_det(&self, z: &Point) -> f64 {
        self.jacobian(z).det().norm().ln()
    }

    /// `f^n(z)`.
    pub fn iterate(&self, z: &Point, n: usize) -> Point {
        (0..n).fold(*z, |w, _| self.eval(&w))
    }

    /// Number of forward steps (up to `n`) whose image stays in V.
    pub fn steps_in_domain(&self, z: &Point, n: usize) -> usize {
        let mut w = *z;
        for j in 0..n {
            w = self.eval(&w);
            if !self.domain.contains(&w) {
                return j;
            }
        }
        n
    }

    /// `f^n(z)` together with `D(f^n)(z)` by the chain rule.
    pub fn iterate_with_derivative(&self, z: &Point, n: usize) -> (Point, CMat) {
        let mut w = *z;
        let mut m = CMat::identity(self.dimension());
        for _ in 0..n {
            m = self.jacobian(&w) * m;
            w = self.eval(&w);
        }
        (w, m)
    }

    /// The critical set `{det Df = 0}` in parametric form.
    pub fn critical_set(&self) -> Result<CriticalSet> {
        let roots_of = |p: &Poly| -> Result<Vec<C64>> {
            let dp = p.derivative();
            if dp.degree() == 0 || dp.is_zero() {
                return Ok(Vec::new());
            }
            let r = poly_roots(&dp)?;
            Ok(
                cluster(r.into_iter().map(|c| (Point::new1(c), 1)).collect(), 1e-7)
                    .into_iter()
                    .map(|(p, _)| p[0])
                    .collect(),
            )
        };
        let mut set = CriticalSet::default();
        match &self.family {
            Family::Poly1D { p } => set.points = roots_of(p)?,
            Family::Skew2D { q, .. } => {
                set.lines = roots_of(q)?
                    .into_iter()
                    .map(|c| AxisLine { fixed: 1, value: c })
                    .collect()
            }
            Family::ProductPower2D { degree, variant } => {
                if *degree >= 2 {
                    if *variant == PowerVariant::Diagonal {
                        set.lines.push(AxisLine {
                            fixed: 0,
                            value: ZERO,
                        });
                    }
                    set.lines.push(AxisLine {
                        fixed: 1,
                        value: ZERO,
                    });
                }
            }
            Family::Poly2DTriangularizable { a, q, .. } => {
                set.lines.extend(
                    roots_of(a)?
                        .into_iter()
                        .map(|c| AxisLine { fixed: 0, value: c }),
                );
                set.lines.extend(
                    roots_of(q)?
                        .into_iter()
                        .map(|c| AxisLine { fixed: 1, value: c }),
                );
            }
        }
        Ok(set)
    }
}

pub(crate) fn eval_family(family: &Family, z: &Point) -> Point {
    match family {
        Family::Poly1D { p } => Point::new1(p.eval(z[0])),
        Family::Skew2D { lambda, p, q } => Point::new2(*lambda * z[0] + p.eval(z[1]), q.eval(z[1])),
        Family::ProductPower2D { degree, variant } => match variant {
            PowerVariant::Diagonal => Point::new2(z[0].powu(*degree), z[1].powu(*degree)),
            PowerVariant::Swap => Point::new2(z[1].powu(*degree), z[0] * 2.0),
        },
        Family::Poly2DTriangularizable { a, p, q } => {
            Point::new2(a.eval(z[0]) + p.eval(z[1]), q.eval(z[1]))
        }
    }
}

/// A complex line `{z_fixed = value}` in C^2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisLine {
    pub fixed: usize,
    pub value: C64,
}

impl AxisLine {
    /// Index of the coordinate that varies along the line.
    pub fn free(&self) -> usize {
        1 - self.fixed
    }

    pub fn point(&self, t: C64) -> Point {
        let mut p = Point::default();
        p[self.fixed] = self.value;
        p[self.free()] = t;
        p
    }
}

/// Zero locus of `det Df`: finitely many points in dimension one,
/// finitely many coordinate-aligned lines in dimension two.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CriticalSet {
    pub points: Vec<C64>,
    pub lines: Vec<AxisLine>,
}
