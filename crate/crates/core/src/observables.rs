//! Scalar test functions on C^k used by the invariance, mixing, transfer and
//! discrepancy diagnostics.

use crate::maps::Domain;
use crate::point::{Point, C64};
use crate::rng::Seed;
use rand::Rng;
use std::fmt;
use std::sync::Arc;

type Func = dyn Fn(&Point) -> f64 + Send + Sync;

/// A named real function on C^k. Constant functions are tagged so that
/// statistics of them can be reported as exact zeros.
#[derive(Clone)]
pub struct Observable {
    name: String,
    constant: Option<f64>,
    f: Arc<Func>,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable")
            .field("name", &self.name)
            .field("constant", &self.constant)
            .finish()
    }
}

impl Observable {
    pub fn new(name: impl Into<String>, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        Observable {
            name: name.into(),
            constant: None,
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Observable {
            name: format!("const({c})"),
            constant: Some(c),
            f: Arc::new(move |_| c),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }

    #[inline]
    pub fn eval(&self, p: &Point) -> f64 {
        (self.f)(p)
    }

    pub fn re(j: usize) -> Self {
        Observable::new(format!("re(z{})", j + 1), move |p| p[j].re)
    }

    pub fn im(j: usize) -> Self {
        Observable::new(format!("im(z{})", j + 1), move |p| p[j].im)
    }

    pub fn abs_sqr(j: usize) -> Self {
        Observable::new(format!("|z{}|^2", j + 1), move |p| p[j].norm_sqr())
    }

    /// Gaussian bump `exp(-|p - c|^2 / s^2)`.
    pub fn bump(center: Point, scale: f64) -> Self {
        let s2 = scale * scale;
        Observable::new(
            format!(
                "bump({:.3}{:+.3}i,{:.3}{:+.3}i;{scale:.3})",
                center[0].re, center[0].im, center[1].re, center[1].im
            ),
            move |p| (-(p.dist(&center).powi(2)) / s2).exp(),
        )
    }

    /// Smoothed indicator of the half plane `{Im z_j > 0}` with edge width `width`.
    pub fn smooth_half_plane(j: usize, width: f64) -> Self {
        Observable::new(format!("halfplane(z{};{width})", j + 1), move |p| {
            0.5 * (1.0 + (p[j].im / width).tanh())
        })
    }

    /// Monomial in the real coordinates `(x1, y1, x2, y2)`.
    pub fn real_monomial(exponents: &[u32]) -> Self {
        let e: Vec<u32> = exponents.to_vec();
        let label: Vec<String> = e.iter().map(|x| x.to_string()).collect();
        if e.iter().all(|&x| x == 0) {
            let mut o = Observable::constant(1.0);
            o.name = format!("x^({})", label.join(","));
            return o;
        }
        Observable::new(format!("x^({})", label.join(",")), move |p| {
            let coords = [p[0].re, p[0].im, p[1].re, p[1].im];
            e.iter()
                .zip(coords)
                .map(|(&k, x)| x.powi(k as i32))
                .product()
        })
    }
}

/// The twelve default test functions for a space of dimension `domain.k`.
pub fn default_test_functions(domain: &Domain) -> Vec<Observable> {
    let c = |re: f64, im: f64| C64::new(re, im);
    if domain.k == 1 {
        vec![
            Observable::constant(1.0),
            Observable::re(0),
            Observable::im(0),
            Observable::abs_sqr(0),
            Observable::new("re(z^2)", |p| (p[0] * p[0]).re),
            Observable::new("im(z^2)", |p| (p[0] * p[0]).im),
            Observable::new("re(z^3)", |p| p[0].powu(3).re),
            Observable::new("|z|^4", |p| p[0].norm_sqr().powi(2)),
            Observable::new("log(1+|z|^2)", |p| p[0].norm_sqr().ln_1p()),
            Observable::new("cos(re z)", |p| p[0].re.cos()),
            Observable::bump(Point::new1(c(1.0, 0.0)), 1.0),
            Observable::bump(Point::new1(c(-0.5, 0.5)), 0.7),
        ]
    } else {
        vec![
            Observable::constant(1.0),
            Observable::re(0),
            Observable::im(1),
            Observable::abs_sqr(0),
            Observable::abs_sqr(1),
            Observable::new("re(z1 z2)", |p| (p[0] * p[1]).re),
            Observable::new("im(z1 conj z2)", |p| (p[0] * p[1].conj()).im),
            Observable::new("re(z1^2)", |p| (p[0] * p[0]).re),
            Observable::new("re(z2^2)", |p| (p[1] * p[1]).re),
            Observable::new("log(1+|z|^2)", |p| p.norm_sqr().ln_1p()),
            Observable::bump(Point::new2(c(0.3, 0.3), c(0.6, 0.0)), 0.8),
            Observable::bump(Point::new2(c(-0.3, 0.0), c(0.0, -0.5)), 0.6),
        ]
    }
}

/// All monomials in the `2k` real coordinates of total degree `1..=max_degree`
/// together with the constant.
pub fn moment_family(k: usize, max_degree: u32) -> Vec<Observable> {
    let dims = 2 * k;
    let mut out = Vec::new();
    let mut e = vec![0u32; dims];
    fn rec(i: usize, left: u32, e: &mut Vec<u32>, out: &mut Vec<Observable>) {
        if i == e.len() {
            out.push(Observable::real_monomial(e));
            return;
        }
        for x in 0..=left {
            e[i] = x;
            rec(i + 1, left - x, e, out);
        }
        e[i] = 0;
    }
    rec(0, max_degree, &mut e, &mut out);
    out
}

/// `count` Gaussian bumps with centres uniform in `domain` and widths between
/// a tenth and a half of its outer radius.
pub fn random_bumps(domain: &Domain, count: usize, seed: Seed) -> Vec<Observable> {
    let mut rng = seed.stream(0xb0b);
    let r = domain.outer_radius();
    (0..count)
        .map(|_| {
            let c = domain.sample_uniform(&mut rng);
            let s = r * rng.gen_range(0.1..0.5);
            Observable::bump(c, s)
        })
        .collect()
}

/// Moments up to total degree four plus eight random bumps.
pub fn default_discrepancy_family(domain: &Domain, seed: Seed) -> Vec<Observable> {
    let mut fam = moment_family(domain.k, 4);
    fam.extend(random_bumps(domain, 8, seed));
    fam
}
