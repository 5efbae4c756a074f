//! The equilibrium measure as a weighted point cloud: backward-walk sampling,
//! the Perron–Frobenius operator and its convergence diagnostics.

mod decay;
mod io;
mod transfer;
mod walk;

pub use decay::{write_decay_csv, DecayPoint, DecaySeries};
pub use io::{read_cloud, write_cloud};
pub use transfer::{
    invariance_report, l2_convergence, transfer_apply, transfer_iterate, write_invariance_csv,
    InvarianceReport, InvarianceRow, RESIDUAL_FLOOR,
};
pub use walk::{
    backward_step, backward_walk, default_burn_in, sample_equilibrium, SampleConfig, StartLaw,
};

use crate::error::{Error, Result};
use crate::maps::{Domain, MapSpec};
use crate::observables::Observable;
use crate::point::Point;
use crate::preimage::iterated_fiber;
use crate::rng::Seed;
use crate::stats::{weighted_estimate, Estimate};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    BackwardWalk,
    IteratedFiber,
    PeriodicPoints,
    CesaroPullback,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::BackwardWalk => "BackwardWalk",
            Provenance::IteratedFiber => "IteratedFiber",
            Provenance::PeriodicPoints => "PeriodicPoints",
            Provenance::CesaroPullback => "CesaroPullback",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "BackwardWalk" => Provenance::BackwardWalk,
            "IteratedFiber" => Provenance::IteratedFiber,
            "PeriodicPoints" => Provenance::PeriodicPoints,
            "CesaroPullback" => Provenance::CesaroPullback,
            other => return Err(Error::Format(format!("unknown provenance `{other}`"))),
        })
    }
}

/// A finite weighted point set in C^k.
///
/// Weights of sampled clouds sum to one. Periodic-point clouds keep the raw
/// `d_t^{-n}` weights, so their mass can be below one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCloud {
    pub k: usize,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub provenance: Provenance,
    pub seed: Option<Seed>,
    pub params: BTreeMap<String, String>,
}

impl WeightedCloud {
    pub fn equal_weights(k: usize, points: Vec<Point>, provenance: Provenance) -> Self {
        let w = if points.is_empty() {
            0.0
        } else {
            1.0 / points.len() as f64
        };
        let weights = vec![w; points.len()];
        WeightedCloud {
            k,
            points,
            weights,
            provenance,
            seed: None,
            params: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Checks that the weights are a probability vector and that every point
    /// lies in `domain`.
    pub fn check(&self, domain: &Domain) -> Result<()> {
        if self.points.len() != self.weights.len() {
            return Err(Error::Corrupted(
                "cloud has mismatched point and weight counts".into(),
            ));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Corrupted("negative or NaN weight".into()));
        }
        if (self.total_mass() - 1.0).abs() > 1e-12 {
            return Err(Error::Corrupted(format!(
                "weights sum to {}",
                self.total_mass()
            )));
        }
        if let Some(p) = self.points.iter().find(|p| !domain.contains(p)) {
            return Err(Error::Corrupted(format!("cloud point {:?} outside V", p.0)));
        }
        Ok(())
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// `sum w_i phi(x_i)` with a standard error from the effective sample size.
    /// Constant observables integrate exactly.
    pub fn integrate_estimate(&self, phi: &Observable) -> Estimate {
        if let Some(c) = phi.constant_value() {
            return Estimate::exact(c * self.total_mass());
        }
        let vals: Vec<f64> = self.points.iter().map(|p| phi.eval(p)).collect();
        let mass = self.total_mass();
        weighted_estimate(&vals, &self.weights).scaled(mass)
    }

    pub fn values(&self, phi: &Observable) -> Vec<f64> {
        self.points.iter().map(|p| phi.eval(p)).collect()
    }
}

/// `sum w_i phi(x_i)`.
pub fn integrate(cloud: &WeightedCloud, phi: &Observable) -> f64 {
    if let Some(c) = phi.constant_value() {
        return c * cloud.total_mass();
    }
    cloud
        .points
        .iter()
        .zip(&cloud.weights)
        .map(|(p, w)| w * phi.eval(p))
        .sum()
}

pub(crate) fn point_label(p: &Point, k: usize) -> String {
    let coords: Vec<String> = (0..k).map(|j| p[j].to_string()).collect();
    format!("({})", coords.join(", "))
}

/// The pullback `d_t^{-n} (f^n)^* delta_z` as a cloud: the points of
/// `f^{-n}(z)` weighted by multiplicity over `d_t^n`.
pub fn fiber_cloud(map: &MapSpec, z: &Point, n: usize, cap: u64) -> Result<WeightedCloud> {
    let set = iterated_fiber(map, z, n, cap)?;
    let total = set.total as f64;
    let (points, weights) = set
        .points
        .iter()
        .map(|(p, m)| (*p, *m as f64 / total))
        .unzip();
    let cloud = WeightedCloud {
        k: map.dimension(),
        points,
        weights,
        provenance: Provenance::IteratedFiber,
        seed: None,
        params: BTreeMap::new(),
    };
    Ok(cloud
        .with_param("depth", n)
        .with_param("base", point_label(z, map.dimension())))
}
