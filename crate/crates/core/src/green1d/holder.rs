use crate::error::{Error, Result};
use crate::measure::WeightedCloud;
use crate::point::Point;
use crate::rng::{par_indexed, Seed};
use crate::spatial::GridIndex;
use crate::stats::fit_line;
use rand::Rng;
use serde::Serialize;

/// The fitted exponent may fall this far below `alpha` and still pass.
pub const HOLDER_SLACK: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub enum HolderCenters {
    /// This many cloud points drawn at random.
    Sampled(usize),
    Explicit(Vec<Point>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderReport {
    pub alpha: f64,
    pub radii: Vec<f64>,
    /// `sup_x mu(B(x, r))` per radius.
    pub sup_mass: Vec<f64>,
    /// Slope of `log sup mu(B(x, r))` against `log r`.
    pub exponent: Option<f64>,
    pub pass: bool,
    pub warning: Option<String>,
}

/// Tests `mu(B(x, r)) <= c r^alpha` by the slope of the largest ball mass.
pub fn holder_check(
    cloud: &WeightedCloud,
    alpha: f64,
    radii: &[f64],
    centers: &HolderCenters,
    seed: Seed,
) -> Result<HolderReport> {
    if radii.is_empty() {
        return Ok(HolderReport {
            alpha,
            radii: vec![],
            sup_mass: vec![],
            exponent: None,
            pass: true,
            warning: Some("no radii given; the check is vacuous".into()),
        });
    }
    if cloud.is_empty() {
        return Err(Error::InvalidInput(
            "Hölder check needs a nonempty cloud".into(),
        ));
    }
    let resolution = 1.0 / cloud.len() as f64;
    if let Some(r) = radii.iter().find(|&&r| !(r > resolution)) {
        return Err(Error::InvalidInput(format!(
            "radius {r} is below the cloud resolution {resolution:.1e}"
        )));
    }
    let centers: Vec<Point> = match centers {
        HolderCenters::Explicit(c) => c.clone(),
        HolderCenters::Sampled(m) => {
            let mut rng = seed.stream(0);
            (0..*m)
                .map(|_| cloud.points[rng.gen_range(0..cloud.len())])
                .collect()
        }
    };
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let mut index = GridIndex::new(r_max, cloud.k);
    for (i, p) in cloud.points.iter().enumerate() {
        index.insert(i as u32, p);
    }
    let masses: Vec<Vec<f64>> = par_indexed(centers.len(), |c| {
        let x = centers[c];
        let mut m = vec![0.0; radii.len()];
        index.for_each_near(&x, |id| {
            let d = cloud.points[id as usize].dist(&x);
            for (mj, r) in m.iter_mut().zip(radii) {
                if d < *r {
                    *mj += cloud.weights[id as usize];
                }
            }
        });
        m
    });
    let sup_mass: Vec<f64> = (0..radii.len())
        .map(|j| masses.iter().map(|m| m[j]).fold(0.0, f64::max))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = radii
        .iter()
        .zip(&sup_mass)
        .filter(|(_, m)| **m > 0.0)
        .map(|(r, m)| (r.ln(), m.ln()))
        .unzip();
    let exponent = fit_line(&xs, &ys).map(|f| f.slope);
    let warning = (xs.len() < radii.len())
        .then(|| format!("{} radii caught no mass", radii.len() - xs.len()));
    Ok(HolderReport {
        alpha,
        radii: radii.to_vec(),
        sup_mass,
        exponent,
        pass: exponent.is_some_and(|e| e >= alpha - HOLDER_SLACK),
        warning,
    })
}
