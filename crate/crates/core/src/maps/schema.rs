//! The map-spec text format (JSON).
//!
//! ```json
//! {"family": "Skew2D", "dimension": 2, "lambda": [4.0, 0.0],
//!  "P": [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], "Q": [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
//!  "domain": {"shape": "Polydisc", "center": [[0.0, 0.0], [0.0, 0.0]], "radii": [2.0, 2.0]}}
//! ```
//!
//! Coefficients are `[re, im]` pairs by ascending degree. `ProductPower2D`
//! takes `degree` and `variant` (`"diagonal"` for `(z^d, w^d)`, `"swap"` for
//! `(w^d, 2z)`); `Poly2DTriangularizable` takes `A`, `P`, `Q` for
//! `(A(z1) + P(z2), Q(z2))`. Annuli add `inner` radii. Without `domain` the
//! family default is searched.

use super::{Domain, Family, MapSpec, PowerVariant, Shape};
use crate::error::{Error, Result};
use crate::point::{Point, C64};
use crate::poly::Poly;
use serde::{Deserialize, Serialize};

type Pair = [f64; 2];

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawSpec {
    family: String,
    dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeffs: Option<Vec<Pair>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<Pair>>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    p: Option<Vec<Pair>>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    q: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<RawDomain>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    shape: Shape,
    center: Vec<Pair>,
    radii: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner: Option<Vec<f64>>,
}

fn to_poly(v: &[Pair]) -> Poly {
    Poly::new(v.iter().map(|[re, im]| C64::new(*re, *im)).collect())
}

fn from_poly(p: &Poly) -> Vec<Pair> {
    p.coeffs.iter().map(|c| [c.re, c.im]).collect()
}

fn require<T>(v: Option<T>, field: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| Error::Schema(format!("family {family} requires field `{field}`")))
}

fn forbid<T>(v: &Option<T>, field: &str, family: &str) -> Result<()> {
    match v {
        Some(_) => Err(Error::Schema(format!(
            "field `{field}` is not allowed for family {family}"
        ))),
        None => Ok(()),
    }
}

impl RawSpec {
    fn into_family(self) -> Result<(Family, Option<RawDomain>)> {
        let fam = self.family.as_str();
        let family = match fam {
            "Poly1D" => {
                forbid(&self.lambda, "lambda", fam)?;
                forbid(&self.a, "A", fam)?;
                forbid(&self.p, "P", fam)?;
                forbid(&self.q, "Q", fam)?;
                forbid(&self.degree, "degree", fam)?;
                forbid(&self.variant, "variant", fam)?;
                Family::Poly1D {
                    p: to_poly(&require(self.coeffs, "coeffs", fam)?),
                }
            }
            "Skew2D" => {
                forbid(&self.coeffs, "coeffs", fam)?;
                forbid(&self.a, "A", fam)?;
                forbid(&self.degree, "degree", fam)?;
                forbid(&self.variant, "variant", fam)?;
                let [re, im] = require(self.lambda, "lambda", fam)?;
                Family::Skew2D {
                    lambda: C64::new(re, im),
                    p: to_poly(&require(self.p, "P", fam)?),
                    q: to_poly(&require(self.q, "Q", fam)?),
                }
            }
            "ProductPower2D" => {
                forbid(&self.lambda, "lambda", fam)?;
                forbid(&self.coeffs, "coeffs", fam)?;
                forbid(&self.a, "A", fam)?;
                forbid(&self.p, "P", fam)?;
                forbid(&self.q, "Q", fam)?;
                let variant = match require(self.variant, "variant", fam)?.as_str() {
                    "diagonal" => PowerVariant::Diagonal,
                    "swap" => PowerVariant::Swap,
                    other => {
                        return Err(Error::Schema(format!(
                            "unknown ProductPower2D variant `{other}`"
                        )))
                    }
                };
                Family::ProductPower2D {
                    degree: require(self.degree, "degree", fam)?,
                    variant,
                }
            }
            "Poly2DTriangularizable" => {
                forbid(&self.lambda, "lambda", fam)?;
                forbid(&self.coeffs, "coeffs", fam)?;
                forbid(&self.degree, "degree", fam)?;
                forbid(&self.variant, "variant", fam)?;
                Family::Poly2DTriangularizable {
                    a: to_poly(&require(self.a, "A", fam)?),
                    p: to_poly(&require(self.p, "P", fam)?),
                    q: to_poly(&require(self.q, "Q", fam)?),
                }
            }
            other => return Err(Error::Unsupported(format!("map family `{other}`"))),
        };
        if self.dimension != family.dimension() {
            return Err(Error::Schema(format!(
                "dimension {} does not match family {} (dimension {})",
                self.dimension,
                fam,
                family.dimension()
            )));
        }
        Ok((family, self.domain))
    }
}

impl RawDomain {
    fn into_domain(self) -> Result<Domain> {
        let k = self.center.len();
        if !(1..=2).contains(&k) || self.radii.len() != k {
            return Err(Error::Schema(
                "domain center and radii must have one entry per coordinate".into(),
            ));
        }
        let mut center = Point::default();
        for (j, [re, im]) in self.center.iter().enumerate() {
            center[j] = C64::new(*re, *im);
        }
        let mut radii = [self.radii[0]; 2];
        radii[..k].copy_from_slice(&self.radii);
        let mut inner = [0.0; 2];
        match (self.shape, self.inner) {
            (Shape::Annulus2D, Some(v)) if v.len() == k => inner[..k].copy_from_slice(&v),
            (Shape::Annulus2D, _) => {
                return Err(Error::Schema(
                    "Annulus2D needs `inner` radii per coordinate".into(),
                ))
            }
            (_, Some(_)) => {
                return Err(Error::Schema(
                    "`inner` is only allowed for Annulus2D".into(),
                ))
            }
            (_, None) => {}
        }
        if self.shape == Shape::Ball && k == 2 && self.radii[0] != self.radii[1] {
            return Err(Error::Schema("a ball has a single radius".into()));
        }
        let d = Domain {
            shape: self.shape,
            k,
            center,
            radii,
            inner,
        };
        d.check()?;
        Ok(d)
    }

    fn from_domain(d: &Domain) -> Self {
        RawDomain {
            shape: d.shape,
            center: (0..d.k).map(|j| [d.center[j].re, d.center[j].im]).collect(),
            radii: d.radii[..d.k].to_vec(),
            inner: (d.shape == Shape::Annulus2D).then(|| d.inner[..d.k].to_vec()),
        }
    }
}

/// Parses and validates a map spec. Missing domains are filled in by the
/// family's default search.
pub fn parse_map_spec(text: &str) -> Result<MapSpec> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    from_raw(raw)
}

pub(crate) fn from_raw(raw: RawSpec) -> Result<MapSpec> {
    let (family, domain) = raw.into_family()?;
    match domain {
        Some(d) => MapSpec::new(family, d.into_domain()?),
        None => MapSpec::with_auto_domain(family),
    }
}

pub(crate) fn to_raw(map: &MapSpec) -> RawSpec {
    let mut raw = RawSpec {
        family: map.family().tag().to_string(),
        dimension: map.dimension(),
        lambda: None,
        coeffs: None,
        a: None,
        p: None,
        q: None,
        degree: None,
        variant: None,
        domain: Some(RawDomain::from_domain(map.domain())),
    };
    match map.family() {
        Family::Poly1D { p } => raw.coeffs = Some(from_poly(p)),
        Family::Skew2D { lambda, p, q } => {
            raw.lambda = Some([lambda.re, lambda.im]);
            raw.p = Some(from_poly(p));
            raw.q = Some(from_poly(q));
        }
        Family::ProductPower2D { degree, variant } => {
            raw.degree = Some(*degree);
            raw.variant = Some(match variant {
                PowerVariant::Diagonal => "diagonal".into(),
                PowerVariant::Swap => "swap".into(),
            });
        }
        Family::Poly2DTriangularizable { a, p, q } => {
            raw.a = Some(from_poly(a));
            raw.p = Some(from_poly(p));
            raw.q = Some(from_poly(q));
        }
    }
    raw
}

/// Canonical text form; `parse_map_spec(&serialize_map_spec(m)) == m`.
pub fn serialize_map_spec(map: &MapSpec) -> String {
    serde_json::to_string_pretty(&to_raw(map)).expect("map spec serialises")
}

impl Serialize for MapSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_raw(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MapSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpec::deserialize(d)?;
        from_raw(raw).map_err(serde::de::Error::custom)
    }
}
