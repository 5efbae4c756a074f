//! Periodic points of the power maps, where every iterate is a monomial
//! `z -> a z^e` in each coordinate.

use crate::point::{Point, C64, ZERO};
use std::f64::consts::TAU;

/// `z -> exp(log_a) z^e`, with `log_a` any branch of the coefficient's log.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Mono {
    pub log_a: C64,
    pub e: u64,
}

impl Mono {
    pub fn new(a: f64, e: u64) -> Self {
        Mono {
            log_a: C64::new(a.ln(), 0.0),
            e,
        }
    }

    /// `self o inner`.
    pub fn after(self, inner: Mono) -> Mono {
        Mono {
            log_a: self.log_a + inner.log_a * self.e as f64,
            e: self.e * inner.e,
        }
    }

    pub fn pow(self, m: usize) -> Mono {
        (0..m).fold(Mono { log_a: ZERO, e: 1 }, |acc, _| self.after(acc))
    }

    pub fn eval(self, z: C64) -> C64 {
        if z == ZERO {
            return ZERO;
        }
        (self.log_a + z.ln() * self.e as f64).exp()
    }

    /// The `e` fixed points: the origin and `(e-1)` roots of `z^{e-1} = 1/a`.
    pub fn fixed_points(self) -> Vec<C64> {
        let mut out = vec![ZERO];
        if self.e >= 2 {
            let m = (self.e - 1) as f64;
            out.extend(
                (0..self.e - 1).map(|j| ((-self.log_a + C64::new(0.0, TAU * j as f64)) / m).exp()),
            );
        }
        out
    }
}

/// `(z^d, w^d)`.
pub(crate) fn diagonal(d: u32, n: usize) -> Vec<Point> {
    let m = Mono::new(1.0, d as u64).pow(n);
    let pts = m.fixed_points();
    pts.iter()
        .flat_map(|&z| pts.iter().map(move |&w| Point::new2(z, w)))
        .collect()
}

/// `(w^d, 2z)`.
pub(crate) fn swap(d: u32, n: usize) -> Vec<Point> {
    let d = d as u64;
    let c = Mono::new(2f64.powi(d as i32), d);
    let b = Mono::new(2.0, d);
    let m = n / 2;
    if n.is_multiple_of(2) {
        let zs = c.pow(m).fixed_points();
        let ws = b.pow(m).fixed_points();
        zs.iter()
            .flat_map(|&z| ws.iter().map(move |&w| Point::new2(z, w)))
            .collect()
    } else {
        let double = Mono::new(2.0, 1);
        let power = Mono::new(1.0, d);
        let cm = c.pow(m);
        let g = power.after(b.pow(m)).after(double).after(cm);
        g.fixed_points()
            .into_iter()
            .map(|z| Point::new2(z, double.after(cm).eval(z)))
            .collect()
    }
}
