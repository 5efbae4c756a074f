//! Fixed points of a composition `s_{n-1} o ... o s_0` of univariate
//! polynomials, solved without expanding the composition.

use crate::error::{Error, Result};
use crate::point::{Point, C64, ZERO};
use crate::poly::Poly;
use crate::rng::{par_indexed, Seed};
use crate::roots::{aberth, cluster, poly_roots, AberthOptions, NewtonStep, RootProblem};
use crate::spatial::GridIndex;
use rand::Rng;

/// Past this modulus the orbit is treated as escaping and the Newton ratio
/// switches to its leading-order form.
const HUGE: f64 = 1e30;

pub(crate) struct Chain<'a> {
    pub steps: Vec<&'a Poly>,
}

impl Chain<'_> {
    pub fn total_degree(&self) -> Option<usize> {
        self.steps
            .iter()
            .try_fold(1usize, |acc, p| acc.checked_mul(p.degree()))
    }

    fn eval(&self, z: C64) -> (C64, C64) {
        let mut w = z;
        let mut dw = C64::new(1.0, 0.0);
        for p in &self.steps {
            let (v, dv) = p.eval_with_derivative(w);
            dw *= dv;
            w = v;
        }
        (w, dw)
    }
}

impl RootProblem for Chain<'_> {
    fn degree(&self) -> usize {
        self.total_degree().expect("checked by the caller")
    }

    /// Newton ratio of `F(z) - z` with a running bound on the rounding error
    /// of `F(z)`.
    fn newton(&self, z: C64) -> NewtonStep {
        let mut w = z;
        let mut dw = C64::new(1.0, 0.0);
        let mut err = 0.0;
        for (j, p) in self.steps.iter().enumerate() {
            if w.norm() > HUGE {
                let rest: f64 = self.steps[j..].iter().map(|q| q.degree() as f64).product();
                return NewtonStep {
                    ratio: w / (dw * rest),
                    negligible: false,
                };
            }
            let (v, dv) = p.eval_with_derivative(w);
            err = dv.norm() * err + 4.0 * f64::EPSILON * p.sup_bound_on_disc(w.norm());
            dw *= dv;
            w = v;
        }
        let g = w - z;
        let dg = dw - C64::new(1.0, 0.0);
        NewtonStep {
            ratio: g / dg,
            negligible: g.norm() <= 4.0 * (err + f64::EPSILON * z.norm()),
        }
    }
}

/// The full preimage `F^{-1}(y)` by peeling off one step at a time.
fn pullback(chain: &Chain, y: C64) -> Result<Vec<C64>> {
    let mut level = vec![y];
    for p in chain.steps.iter().rev() {
        let mut next = Vec::with_capacity(level.len() * p.degree());
        for &v in &level {
            next.extend(poly_roots(&p.shifted(v))?);
        }
        level = next;
    }
    Ok(level)
}

/// All `deg F` fixed points, clustered into distinct points with multiplicity.
pub(crate) fn exact_fixed_points(chain: &Chain, start: C64, tol: f64) -> Result<Vec<(C64, u64)>> {
    let mut z0 = pullback(chain, start)?;
    // spread coincident starts so the Aberth sums stay finite
    for i in 1..z0.len() {
        if z0[..i].contains(&z0[i]) {
            let r = 1e-6 * (1.0 + z0[i].norm());
            z0[i] += C64::from_polar(r, i as f64);
        }
    }
    let roots = aberth(chain, z0, &AberthOptions::default())?;
    Ok(merge(roots, tol))
}

fn merge(roots: Vec<C64>, tol: f64) -> Vec<(C64, u64)> {
    let scale = roots.iter().fold(0.0f64, |m, r| m.max(r.norm()));
    cluster(
        roots.into_iter().map(|r| (Point::new1(r), 1)).collect(),
        tol * (1.0 + scale),
    )
    .into_iter()
    .map(|(p, m)| (p[0], m))
    .collect()
}

/// Distinct fixed points reached by Newton from random points of `F^{-1}`
/// chains started at `start`; a lower bound on the true set.
pub(crate) fn sampled_fixed_points(
    chain: &Chain,
    start: C64,
    starts: usize,
    tol: f64,
    seed: Seed,
) -> Vec<C64> {
    let found: Vec<Option<C64>> = par_indexed(starts, |i| {
        let mut rng = seed.stream(i as u64);
        let mut y = start;
        for p in chain.steps.iter().rev() {
            let r = poly_roots(&p.shifted(y)).ok()?;
            y = r[rng.gen_range(0..r.len())];
        }
        newton_polish(chain, y)
    });
    let mut index = GridIndex::new(tol.max(1e-12), 1);
    let mut out: Vec<C64> = Vec::new();
    for z in found.into_iter().flatten() {
        let p = Point::new1(z);
        let seen = index.any_near(&p, |id| (out[id as usize] - z).norm() <= tol);
        if !seen {
            index.insert(out.len() as u32, &p);
            out.push(z);
        }
    }
    out
}

fn newton_polish(chain: &Chain, mut z: C64) -> Option<C64> {
    for _ in 0..100 {
        let step = chain.newton(z);
        if step.negligible {
            return Some(z);
        }
        if !(step.ratio.re.is_finite() && step.ratio.im.is_finite()) {
            return None;
        }
        z -= step.ratio;
        if step.ratio.norm() <= 1e-13 * (1.0 + z.norm()) {
            let (w, _) = chain.eval(z);
            return ((w - z).norm() <= 1e-8 * (1.0 + z.norm())).then_some(z);
        }
    }
    None
}

/// Ensures a solve returned exactly `expected` roots with multiplicity.
pub(crate) fn check_total(found: &[(C64, u64)], expected: usize) -> Result<()> {
    let total: u64 = found.iter().map(|(_, m)| m).sum();
    if total as usize != expected {
        return Err(Error::SolveInconsistency(format!(
            "fixed-point solve returned {total} roots, expected {expected}"
        )));
    }
    Ok(())
}

pub(crate) fn generic_start(radius: f64) -> C64 {
    if radius > 0.0 {
        C64::from_polar(0.37 * radius, 0.9)
    } else {
        ZERO
    }
}
