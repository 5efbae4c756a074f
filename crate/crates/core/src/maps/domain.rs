use crate::error::{Error, Result};
use crate::point::{Point, C64};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const PLASTIC: f64 = 0.754_877_666_246_692_8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    Ball,
    Polydisc,
    Annulus2D,
}

/// The target open set V: a ball, a polydisc, or a product of annuli in C^k.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub shape: Shape,
    pub k: usize,
    pub center: Point,
    /// Outer radius per coordinate (a ball uses `radii[0]`).
    pub radii: [f64; 2],
    /// Inner radius per coordinate, zero unless the shape is an annulus.
    pub inner: [f64; 2],
}

impl Domain {
    pub fn ball(k: usize, radius: f64) -> Self {
        Domain {
            shape: Shape::Ball,
            k,
            center: Point::default(),
            radii: [radius, radius],
            inner: [0.0; 2],
        }
    }

    pub fn polydisc(k: usize, radius: f64) -> Self {
        Domain {
            shape: Shape::Polydisc,
            k,
            center: Point::default(),
            radii: [radius, radius],
            inner: [0.0; 2],
        }
    }

    pub fn annulus(inner: f64, outer: f64) -> Self {
        Domain {
            shape: Shape::Annulus2D,
            k: 2,
            center: Point::default(),
            radii: [outer; 2],
            inner: [inner; 2],
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(1..=2).contains(&self.k) {
            return Err(Error::Schema(format!(
                "domain dimension {} not in {{1, 2}}",
                self.k
            )));
        }
        for j in 0..self.k {
            if !(self.radii[j] > 0.0 && self.radii[j].is_finite()) {
                return Err(Error::Schema(
                    "domain radii must be positive and finite".into(),
                ));
            }
            if self.shape == Shape::Annulus2D
                && !(self.inner[j] > 0.0 && self.inner[j] < self.radii[j])
            {
                return Err(Error::Schema(
                    "annulus needs 0 < inner < outer radius".into(),
                ));
            }
        }
        Ok(())
    }

    /// Normalised gauge: below one exactly on the open domain.
    pub fn gauge(&self, p: &Point) -> f64 {
        let q = *p - self.center;
        match self.shape {
            Shape::Ball => q.norm() / self.radii[0],
            Shape::Polydisc => (0..self.k)
                .map(|j| q[j].norm() / self.radii[j])
                .fold(0.0, f64::max),
            Shape::Annulus2D => (0..self.k)
                .map(|j| {
                    let r = q[j].norm();
                    (r / self.radii[j]).max(if r == 0.0 {
                        f64::INFINITY
                    } else {
                        self.inner[j] / r
                    })
                })
                .fold(0.0, f64::max),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.is_finite() && self.gauge(p) < 1.0
    }

    pub fn outer_radius(&self) -> f64 {
        self.radii[..self.k].iter().copied().fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        match self.shape {
            Shape::Ball => 2.0 * self.radii[0],
            _ => {
                2.0 * self.radii[..self.k]
                    .iter()
                    .map(|r| r * r)
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }

    /// Euclidean volume (area for k = 1).
    pub fn volume(&self) -> f64 {
        match self.shape {
            Shape::Ball if self.k == 1 => PI * self.radii[0].powi(2),
            Shape::Ball => PI * PI * self.radii[0].powi(4) / 2.0,
            Shape::Polydisc => (0..self.k).map(|j| PI * self.radii[j].powi(2)).product(),
            Shape::Annulus2D => (0..self.k)
                .map(|j| PI * (self.radii[j].powi(2) - self.inner[j].powi(2)))
                .product(),
        }
    }

    /// Uniform sample from the domain.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let mut p = Point::default();
        match self.shape {
            Shape::Ball if self.k == 1 => p[0] = disc_sample(rng, 0.0, self.radii[0]),
            Shape::Ball => loop {
                let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                if v.iter().map(|x| x * x).sum::<f64>() < 1.0 {
                    let r = self.radii[0];
                    p = Point::new2(C64::new(v[0] * r, v[1] * r), C64::new(v[2] * r, v[3] * r));
                    break;
                }
            },
            Shape::Polydisc | Shape::Annulus2D => {
                for j in 0..self.k {
                    p[j] = disc_sample(rng, self.inner[j], self.radii[j]);
                }
            }
        }
        p + self.center
    }

    /// Deterministic low-discrepancy point number `i` of `n` on the boundary.
    pub fn boundary_point(&self, i: usize, n: usize) -> Point {
        let u = (i as f64 + 0.5) / n as f64;
        let a = TAU * (i as f64 * GOLDEN).fract();
        let b = TAU * (i as f64 * PLASTIC).fract();
        let mut p = Point::default();
        match (self.shape, self.k) {
            (_, 1) => {
                let r = if self.shape == Shape::Annulus2D && i % 2 == 1 {
                    self.inner[0]
                } else {
                    self.radii[0]
                };
                p[0] = C64::from_polar(r, TAU * u);
            }
            (Shape::Ball, _) => {
                let r = self.radii[0];
                p[0] = C64::from_polar(r * u.sqrt(), a);
                p[1] = C64::from_polar(r * (1.0 - u).sqrt(), b);
            }
            (Shape::Polydisc, _) => {
                let (on, free) = if i.is_multiple_of(2) { (0, 1) } else { (1, 0) };
                p[on] = C64::from_polar(self.radii[on], a);
                p[free] = C64::from_polar(self.radii[free] * u.sqrt(), b);
            }
            (Shape::Annulus2D, _) => {
                let on = i % 2;
                let free = 1 - on;
                let r_on = if (i / 2).is_multiple_of(2) {
                    self.radii[on]
                } else {
                    self.inner[on]
                };
                p[on] = C64::from_polar(r_on, a);
                let (lo, hi) = (self.inner[free], self.radii[free]);
                p[free] = C64::from_polar((lo * lo + u * (hi * hi - lo * lo)).sqrt(), b);
            }
        }
        p + self.center
    }
}

/// A disc or annulus `{inner < |z - center| < outer}` in one coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slice {
    pub center: C64,
    pub inner: f64,
    pub outer: f64,
}

impl Slice {
    pub fn area(&self) -> f64 {
        PI * (self.outer * self.outer - self.inner * self.inner)
    }

    pub fn contains(&self, z: C64) -> bool {
        let r = (z - self.center).norm();
        r.is_finite() && r < self.outer && (self.inner == 0.0 || r > self.inner)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> C64 {
        self.center + disc_sample(rng, self.inner, self.outer)
    }
}

impl Domain {
    /// Coordinate `j` of a product domain; `None` for a ball in C^2.
    pub fn slice(&self, j: usize) -> Option<Slice> {
        if self.shape == Shape::Ball && self.k == 2 {
            return None;
        }
        Some(Slice {
            center: self.center[j],
            inner: self.inner[j],
            outer: self.radii[j],
        })
    }

    /// The set of `t` with `line.point(t)` in the domain, or `None` when the
    /// line misses it.
    pub fn line_slice(&self, fixed: usize, value: C64) -> Option<Slice> {
        let free = 1 - fixed;
        match self.shape {
            Shape::Ball => {
                let r2 = self.radii[0].powi(2) - (value - self.center[fixed]).norm_sqr();
                (r2 > 0.0).then(|| Slice {
                    center: self.center[free],
                    inner: 0.0,
                    outer: r2.sqrt(),
                })
            }
            _ => self
                .slice(fixed)?
                .contains(value)
                .then(|| self.slice(free))
                .flatten(),
        }
    }
}

fn disc_sample<R: Rng + ?Sized>(rng: &mut R, inner: f64, outer: f64) -> C64 {
    let u: f64 = rng.gen();
    let r = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
    C64::from_polar(r, TAU * rng.gen::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;

    #[test]
    fn boundary_points_have_unit_gauge() {
        for d in [
            Domain::ball(1, 4.0),
            Domain::ball(2, 3.0),
            Domain::polydisc(2, 2.0),
            Domain::annulus(0.5, 2.0),
        ] {
            for i in 0..64 {
                let g = d.gauge(&d.boundary_point(i, 64));
                assert!((g - 1.0).abs() < 1e-12, "{d:?} gauge {g}");
            }
        }
    }

    #[test]
    fn uniform_samples_match_volume_fraction() {
        // fraction of the annulus product with |z| < 1 is (1 - 1/4) / (4 - 1/4) = 0.2
        let d = Domain::annulus(0.5, 2.0);
        let mut rng = Seed(3).stream(0);
        let n = 40_000;
        let hits = (0..n)
            .filter(|_| d.sample_uniform(&mut rng)[0].norm() < 1.0)
            .count();
        let frac = hits as f64 / n as f64;
        assert!((frac - 0.2).abs() < 4.0 * (0.2f64 * 0.8 / n as f64).sqrt());
    }
}
