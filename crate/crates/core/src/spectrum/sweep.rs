use super::lyapunov::lyapunov;
use crate::error::{Error, Result};
use crate::maps::{Family, MapSpec};
use crate::measure::{sample_equilibrium, SampleConfig};
use crate::point::C64;
use crate::poly::Poly;
use crate::rng::Seed;
use serde::{Deserialize, Serialize};

/// Which coefficient of a family the sweep parameter `s` replaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSlot {
    Lambda,
    Coeffs(usize),
    A(usize),
    P(usize),
    Q(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTemplate {
    pub base: Family,
    pub slot: ParamSlot,
}

fn set_coeff(p: &Poly, i: usize, s: C64) -> Poly {
    let mut c = p.coeffs.clone();
    if c.len() <= i {
        c.resize(i + 1, C64::new(0.0, 0.0));
    }
    c[i] = s;
    Poly::new(c)
}

impl SweepTemplate {
    pub fn family_at(&self, s: C64) -> Result<Family> {
        let mismatch = || {
            Error::InvalidInput(format!(
                "slot {:?} does not exist in family {}",
                self.slot,
                self.base.tag()
            ))
        };
        Ok(match (&self.base, self.slot) {
            (Family::Poly1D { p }, ParamSlot::Coeffs(i)) => Family::Poly1D {
                p: set_coeff(p, i, s),
            },
            (Family::Skew2D { p, q, .. }, ParamSlot::Lambda) => Family::Skew2D {
                lambda: s,
                p: p.clone(),
                q: q.clone(),
            },
            (Family::Skew2D { lambda, p, q }, ParamSlot::P(i)) => Family::Skew2D {
                lambda: *lambda,
                p: set_coeff(p, i, s),
                q: q.clone(),
            },
            (Family::Skew2D { lambda, p, q }, ParamSlot::Q(i)) => Family::Skew2D {
                lambda: *lambda,
                p: p.clone(),
                q: set_coeff(q, i, s),
            },
            (Family::Poly2DTriangularizable { a, p, q }, slot) => {
                let (mut a, mut p, mut q) = (a.clone(), p.clone(), q.clone());
                match slot {
                    ParamSlot::A(i) => a = set_coeff(&a, i, s),
                    ParamSlot::P(i) => p = set_coeff(&p, i, s),
                    ParamSlot::Q(i) => q = set_coeff(&q, i, s),
                    _ => return Err(mismatch()),
                }
                Family::Poly2DTriangularizable { a, p, q }
            }
            _ => return Err(mismatch()),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub cloud_size: usize,
    pub orbit_length: usize,
    pub lyapunov_samples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            cloud_size: 1000,
            orbit_length: 200,
            lyapunov_samples: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub s: C64,
    /// `h(s) = int log J_s dmu_s = 2 sum lambda_i(s)`.
    pub h: f64,
    pub stderr: f64,
    pub valid: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubMeanCheck {
    pub center_h: f64,
    pub circle_mean: f64,
    pub sigma: f64,
    /// `h(center) <= circle mean + 3 sigma`.
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub sub_mean_value: Option<SubMeanCheck>,
}

impl SweepTable {
    /// CSV with header `s_re,s_im,h,stderr,valid`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s_re,s_im,h,stderr,valid\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                r.s.re, r.s.im, r.h, r.stderr, r.valid
            ));
        }
        out
    }
}

/// `grid[0]` is a centre and `grid[1..]` (at least three points) lie on a
/// common circle around it.
fn is_disc_grid(grid: &[C64]) -> bool {
    if grid.len() < 4 {
        return false;
    }
    let r = (grid[1] - grid[0]).norm();
    r > 0.0
        && grid[1..]
            .iter()
            .all(|s| ((*s - grid[0]).norm() - r).abs() <= 1e-9 * (1.0 + r))
}

/// `h(s)` over a parameter grid. Cells whose map does not validate are marked
/// invalid. When the grid is a centre followed by a circle of parameters,
/// the sub-mean-value inequality of a plurisubharmonic `h` is checked.
pub fn lyapunov_sweep(
    template: &SweepTemplate,
    grid: &[C64],
    cfg: &SweepConfig,
    seed: Seed,
) -> Result<SweepTable> {
    let rows: Vec<SweepRow> = grid
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let cell_seed = seed.derive(i as u64);
            let run = || -> Result<(f64, f64)> {
                let map = MapSpec::with_auto_domain(template.family_at(s)?)?;
                let cloud =
                    sample_equilibrium(&map, &SampleConfig::iid(cfg.cloud_size), cell_seed)?;
                let spec = lyapunov(
                    &map,
                    &cloud,
                    cfg.orbit_length,
                    cfg.lyapunov_samples,
                    cell_seed.derive(1),
                )?;
                let (h, se) = spec.real_jacobian_sum();
                Ok((h, se))
            };
            match run() {
                Ok((h, stderr)) => SweepRow {
                    s,
                    h,
                    stderr,
                    valid: true,
                    note: None,
                },
                Err(e) => SweepRow {
                    s,
                    h: f64::NAN,
                    stderr: f64::NAN,
                    valid: false,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect();
    let sub_mean_value = if is_disc_grid(grid) && rows.iter().all(|r| r.valid) {
        let ring = &rows[1..];
        let m = ring.len() as f64;
        let circle_mean = ring.iter().map(|r| r.h).sum::<f64>() / m;
        let ring_se = (ring.iter().map(|r| r.stderr * r.stderr).sum::<f64>()).sqrt() / m;
        let sigma = rows[0].stderr.hypot(ring_se);
        Some(SubMeanCheck {
            center_h: rows[0].h,
            circle_mean,
            sigma,
            holds: rows[0].h <= circle_mean + 3.0 * sigma,
        })
    } else {
        None
    };
    Ok(SweepTable {
        rows,
        sub_mean_value,
    })
}

/// `center` followed by `m` equally spaced points on the circle of radius `r`.
pub fn disc_grid(center: C64, r: f64, m: usize) -> Vec<C64> {
    std::iter::once(center)
        .chain(
            (0..m)
                .map(|j| center + C64::from_polar(r, std::f64::consts::TAU * j as f64 / m as f64)),
        )
        .collect()
}
