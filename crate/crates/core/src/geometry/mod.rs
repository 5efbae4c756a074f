//! Monte Carlo volume growth: dynamical degrees `d_{l,n}`, the critical
//! volume `delta_n` and the PLB decay series `d_{1,n} / d_t^n`.
//!
//! The Kähler form is the Euclidean one, so `(f^n)^* omega ∧ omega` is
//! `|D f^n|_F^2` times Lebesgue measure.

mod critical;
mod degrees;
mod sampling;

pub use critical::{
    critical_volume, write_delta_csv, CriticalVolume, DeltaRow, LineContribution, LineMethod,
    SeriesVerdict, SERIES_BAND,
};
pub use degrees::{
    degree_estimate, degree_table, volume_of_u, write_degree_csv, DegreeMethod, DegreeRow,
    DegreeTable,
};
pub use sampling::MIN_ACCEPTANCE;

use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::measure::{DecayPoint, DecaySeries};
use crate::rng::Seed;
use serde::Serialize;

/// Slack allowed between the fitted PLB rate and the algebraic bound.
pub const PLB_RATE_SLACK: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlbReport {
    pub method: DegreeMethod,
    pub series: DecaySeries,
    /// `d^{k-1} / d_t` for algebraic degree `d`.
    pub alpha: f64,
    /// `None` when `alpha >= 1` and the bound says nothing.
    pub within_bound: Option<bool>,
}

/// `v_n = d_{1,n} / d_t^n` with its fitted rate, compared with the bound
/// `alpha = d^{k-1} / d_t` of globally polynomial maps.
pub fn plb_decay(
    map: &MapSpec,
    n_max: usize,
    samples: usize,
    seed: Seed,
    method: DegreeMethod,
) -> Result<PlbReport> {
    if map.dimension() != 2 {
        return Err(Error::InvalidInput(
            "the PLB series is defined for maps of C^2".into(),
        ));
    }
    let table = degree_table(map, 1, n_max, samples, seed, method)?;
    let dt = map.topological_degree() as f64;
    let values = table
        .rows
        .iter()
        .map(|r| {
            let s = dt.powi(-(r.n as i32));
            DecayPoint {
                n: r.n,
                value: r.estimate * s,
                stderr: r.stderr * s,
            }
        })
        .collect();
    let series = DecaySeries::new(values);
    let alpha = map.algebraic_degree() as f64 / dt;
    let within_bound = (alpha < 1.0).then(|| {
        series
            .fitted_rate
            .is_some_and(|c| c <= alpha + PLB_RATE_SLACK)
    });
    Ok(PlbReport {
        method: table.method,
        series,
        alpha,
        within_bound,
    })
}
