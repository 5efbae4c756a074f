//! Simultaneous polynomial root finding (Aberth–Ehrlich) with closed forms
//! for the low-degree and binomial cases.

use crate::error::{Error, Result};
use crate::point::{Point, C64, ZERO};
use crate::poly::Poly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// One Newton evaluation of a root problem.
#[derive(Clone, Copy, Debug)]
pub struct NewtonStep {
    /// `f(z) / f'(z)`.
    pub ratio: C64,
    /// `|f(z)|` is at the level of its own rounding error.
    pub negligible: bool,
}

/// Anything whose roots Aberth iteration can chase: a degree and a Newton ratio.
pub trait RootProblem: Sync {
    fn degree(&self) -> usize;
    fn newton(&self, z: C64) -> NewtonStep;
}

impl RootProblem for Poly {
    fn degree(&self) -> usize {
        Poly::degree(self)
    }

    fn newton(&self, z: C64) -> NewtonStep {
        let (p, dp) = self.eval_with_derivative(z);
        let scale = self.sup_bound_on_disc(z.norm());
        NewtonStep {
            ratio: p / dp,
            negligible: p.norm() <= 8.0 * f64::EPSILON * scale,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AberthOptions {
    pub max_iter: usize,
    pub rel_tol: f64,
    /// Degrees at or above this use a parallel update sweep.
    pub parallel_from: usize,
}

impl Default for AberthOptions {
    fn default() -> Self {
        AberthOptions {
            max_iter: 200,
            rel_tol: 1e-13,
            parallel_from: 256,
        }
    }
}

/// Jacobi-style Aberth iteration from the given starting points.
///
/// Each approximation is frozen once its correction drops below
/// `rel_tol * (1 + |z|)` or the residual reaches rounding level. A stagnating
/// sweep triggers a small deterministic random perturbation of the unfrozen
/// approximations.
pub fn aberth<P: RootProblem + ?Sized>(
    problem: &P,
    mut z: Vec<C64>,
    opts: &AberthOptions,
) -> Result<Vec<C64>> {
    let n = z.len();
    debug_assert_eq!(n, problem.degree());
    let mut frozen = vec![false; n];
    let mut best = f64::INFINITY;
    let mut stale = 0usize;
    let mut jitter = ChaCha8Rng::seed_from_u64(0x5eed_ab37);

    for _ in 0..opts.max_iter {
        let correction = |i: usize| -> Option<C64> {
            if frozen[i] {
                return Some(ZERO);
            }
            let step = problem.newton(z[i]);
            if step.negligible {
                return None;
            }
            let s: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            Some(step.ratio / (C64::new(1.0, 0.0) - step.ratio * s))
        };
        let updates: Vec<Option<C64>> = if n >= opts.parallel_from {
            (0..n).into_par_iter().map(correction).collect()
        } else {
            (0..n).map(correction).collect()
        };

        let mut worst: f64 = 0.0;
        let mut broken = false;
        for (i, u) in updates.into_iter().enumerate() {
            match u {
                None => frozen[i] = true,
                Some(w) if frozen[i] => debug_assert_eq!(w, ZERO),
                Some(w) if !(w.re.is_finite() && w.im.is_finite()) => broken = true,
                Some(w) => {
                    z[i] -= w;
                    let rel = w.norm() / (1.0 + z[i].norm());
                    if rel <= opts.rel_tol {
                        frozen[i] = true;
                    }
                    worst = worst.max(rel);
                }
            }
        }
        if frozen.iter().all(|&f| f) {
            return Ok(z);
        }
        if worst < 0.5 * best {
            best = worst;
            stale = 0;
        } else {
            stale += 1;
        }
        if broken || stale >= 25 {
            for i in (0..n).filter(|&i| !frozen[i]) {
                let r = 1e-3 * (1.0 + z[i].norm());
                z[i] += C64::from_polar(r * jitter.gen::<f64>(), TAU * jitter.gen::<f64>());
            }
            stale = 0;
            best = f64::INFINITY;
        }
    }
    Err(Error::RootNonConvergence {
        degree: n,
        iterations: opts.max_iter,
    })
}

/// All roots of `p`, repeated according to the solver (not yet clustered).
pub fn poly_roots(p: &Poly) -> Result<Vec<C64>> {
    let d = p.degree();
    if !p.has_nonzero_leading() {
        return Err(Error::ZeroLeadingCoefficient("root target"));
    }
    match d {
        0 => Ok(Vec::new()),
        1 => Ok(vec![-p.coeffs[0] / p.coeffs[1]]),
        2 => Ok(quadratic_roots(p.coeffs[2], p.coeffs[1], p.coeffs[0]).to_vec()),
        _ if p.is_binomial() => Ok(nth_roots(-p.coeffs[0] / p.coeffs[d], d as u32)),
        _ => {
            let start = aberth_start(p);
            let mut roots = aberth(p, start, &AberthOptions::default())?;
            for r in roots.iter_mut() {
                *r = newton_polish(p, *r);
            }
            Ok(roots)
        }
    }
}

/// Roots of `a w^2 + b w + c` by the cancellation-free formula.
/// With `b = 0` the two roots are exact negatives of each other.
pub fn quadratic_roots(a: C64, b: C64, c: C64) -> [C64; 2] {
    if b == ZERO {
        let r = (-c / a).sqrt();
        return [r, -r];
    }
    let s = (b * b - a * c * 4.0).sqrt();
    let q = if (b.conj() * s).re >= 0.0 {
        (b + s) * -0.5
    } else {
        (b - s) * -0.5
    };
    if q == ZERO {
        return [ZERO, ZERO];
    }
    [q / a, c / q]
}

/// The `d` complex d-th roots of `z`; `z = 0` yields `d` copies of zero.
pub fn nth_roots(z: C64, d: u32) -> Vec<C64> {
    if z == ZERO {
        return vec![ZERO; d as usize];
    }
    let (r, theta) = z.to_polar();
    let rho = r.powf(1.0 / d as f64);
    (0..d)
        .map(|j| C64::from_polar(rho, (theta + TAU * j as f64) / d as f64))
        .collect()
}

fn aberth_start(p: &Poly) -> Vec<C64> {
    let d = p.degree();
    let centroid = -p.coeffs[d - 1] / (p.coeffs[d] * d as f64);
    let r = (p.eval(centroid).norm() / p.leading().norm()).powf(1.0 / d as f64);
    let r = if r > 0.0 && r.is_finite() { r } else { 1e-3 };
    (0..d)
        .map(|j| centroid + C64::from_polar(r, TAU * j as f64 / d as f64 + 0.4))
        .collect()
}

fn newton_polish(p: &Poly, z: C64) -> C64 {
    let mut z = z;
    for _ in 0..2 {
        let (v, dv) = p.eval_with_derivative(z);
        if dv == ZERO {
            break;
        }
        let next = z - v / dv;
        if !(next.re.is_finite() && next.im.is_finite()) || p.eval(next).norm() >= v.norm() {
            break;
        }
        z = next;
    }
    z
}

/// Greedy single-linkage merge of weighted points closer than `tol`.
/// The merged point is the multiplicity-weighted mean; multiplicities add.
pub fn cluster(points: Vec<(Point, u64)>, tol: f64) -> Vec<(Point, u64)> {
    let mut out: Vec<(Point, u64, Point)> = Vec::with_capacity(points.len());
    'next: for (p, m) in points {
        for slot in out.iter_mut() {
            if slot.0.dist(&p) <= tol {
                slot.2 = slot.2 + p * m as f64;
                slot.1 += m;
                slot.0 = slot.2 * (1.0 / slot.1 as f64);
                continue 'next;
            }
        }
        out.push((p, m, p * m as f64));
    }
    out.into_iter().map(|(p, m, _)| (p, m)).collect()
}
