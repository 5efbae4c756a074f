use crate::config::{c64, point, Experiment, RunConfig, SweepGrid};
use polylike::exceptional::{invariance_verdict, write_exceptional_csv, AlgebraicSet, Verdict};
use polylike::geometry::{critical_volume, degree_table, plb_decay, write_degree_csv};
use polylike::green1d::{
    expansion_constant, green_many, hausdorff_dimension, holder_check, write_green_csv,
    HolderCenters,
};
use polylike::maps::validate_polynomial_like;
use polylike::measure::{
    fiber_cloud, invariance_report, read_cloud, sample_equilibrium, write_cloud, write_decay_csv,
    write_invariance_csv,
};
use polylike::observables::moment_family;
use polylike::periodic::{
    discrepancy, periodic_measure, periodic_points_range, write_periodic_csv,
};
use polylike::spectrum::{
    default_epsilons, disc_grid, entropy_estimate, lyapunov, lyapunov_sweep, mixing_decay,
    write_entropy_csv, write_lyapunov_csv, SweepConfig, SweepTemplate,
};
use polylike::{Error, MapSpec, Result, SampleConfig, Seed, StartLaw, WeightedCloud, C64};
use serde_json::{json, Value};
use std::io::{BufReader, Write};
use std::path::Path;

pub struct Output {
    pub csv: Vec<u8>,
    pub cloud: Option<WeightedCloud>,
    pub summary: Value,
}

impl Output {
    fn new(csv: Vec<u8>, summary: Value) -> Self {
        Output {
            csv,
            cloud: None,
            summary,
        }
    }
}

/// Sub-seeds so that the cloud and the experiment draw independent streams.
const CLOUD_TAG: u64 = 1;
const RUN_TAG: u64 = 2;

fn measure(
    map: &MapSpec,
    samples: usize,
    path: &Option<std::path::PathBuf>,
    seed: Seed,
) -> Result<WeightedCloud> {
    match path {
        Some(p) => {
            let f = std::fs::File::open(p).map_err(|e| {
                Error::InvalidInput(format!("cannot open cloud `{}`: {e}", p.display()))
            })?;
            let cloud = read_cloud(BufReader::new(f))?;
            if cloud.k != map.dimension() {
                return Err(Error::InvalidInput(format!(
                    "cloud lives in C^{} but the map acts on C^{}",
                    cloud.k,
                    map.dimension()
                )));
            }
            cloud.check(map.domain())?;
            Ok(cloud)
        }
        None => sample_equilibrium(map, &SampleConfig::iid(samples), seed.derive(CLOUD_TAG)),
    }
}

fn need(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg.to_string()))
    }
}

pub fn run(cfg: &RunConfig, map: &MapSpec) -> Result<Output> {
    let seed = Seed(cfg.seed);
    let k = map.dimension();
    let dt = map.topological_degree();
    match &cfg.experiment {
        Experiment::Validate(e) => {
            let r = validate_polynomial_like(map, map.domain(), e.boundary_samples)?;
            let mut csv = b"is_polynomial_like,max_preimage_radius,max_gauge,margin,required_margin,lojasiewicz_lambda,lojasiewicz_l,boundary_samples\n".to_vec();
            writeln!(
                csv,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.is_polynomial_like,
                r.max_preimage_radius,
                r.max_gauge,
                r.margin,
                r.required_margin,
                r.lojasiewicz_estimate.0,
                r.lojasiewicz_estimate.1,
                r.boundary_samples
            )?;
            let summary = json!({
                "polynomial_like": r.is_polynomial_like,
                "topological_degree": dt,
                "algebraic_degree": map.algebraic_degree(),
                "report": r,
            });
            Ok(Output::new(csv, summary))
        }
        Experiment::Sample(e) => {
            let cloud = match &e.fiber {
                Some(f) => fiber_cloud(map, &point(&f.point, k)?, f.depth, f.cap)?,
                None => {
                    need(
                        e.samples > 0 && e.per_walker > 0,
                        "samples and per_walker must be positive",
                    )?;
                    let walkers = e.samples.div_ceil(e.per_walker);
                    let start_law = match &e.start {
                        Some(p) => StartLaw::FixedPoint(point(p, k)?),
                        None => StartLaw::UniformOnV,
                    };
                    let sc = SampleConfig {
                        burn_in: e.burn_in,
                        start_law,
                        ..SampleConfig::walks(walkers, e.per_walker)
                    };
                    sample_equilibrium(map, &sc, seed)?
                }
            };
            let mut file = Vec::new();
            write_cloud(&cloud, &mut file)?;
            let text = String::from_utf8(file).expect("cloud files are UTF-8");
            let csv: String = text
                .lines()
                .filter(|l| !l.starts_with('#'))
                .flat_map(|l| [l, "\n"])
                .collect();
            let csv = csv.into_bytes();
            let summary = json!({
                "points": cloud.len(),
                "total_mass": cloud.total_mass(),
                "provenance": cloud.provenance.as_str(),
                "params": cloud.params,
            });
            Ok(Output {
                csv,
                cloud: Some(cloud),
                summary,
            })
        }
        Experiment::Invariance(e) => {
            let cloud = measure(map, e.samples, &e.cloud, seed)?;
            let fns = polylike::observables::default_test_functions(map.domain());
            let r = invariance_report(map, &cloud, &fns)?;
            let mut csv = Vec::new();
            write_invariance_csv(&r, &mut csv)?;
            let summary = json!({
                "samples": r.samples,
                "sigmas": e.sigmas,
                "all_pass": r.all_pass(e.sigmas),
                "failing": r.rows.iter().filter(|row| !row.passes(e.sigmas)).map(|row| row.function.clone()).collect::<Vec<_>>(),
            });
            Ok(Output::new(csv, summary))
        }
        Experiment::Lyapunov(e) => {
            let cloud = measure(map, e.samples, &e.cloud, seed)?;
            let s = lyapunov(map, &cloud, e.orbit_length, e.orbits, seed.derive(RUN_TAG))?;
            let mut csv = Vec::new();
            write_lyapunov_csv(&s, &mut csv)?;
            let (h, h_se) = s.real_jacobian_sum();
            let summary = json!({
                "exponents": s.exponents,
                "standard_errors": s.standard_errors,
                "discarded": s.discarded,
                "real_jacobian_sum": h,
                "real_jacobian_sum_stderr": h_se,
                "log_dt": (dt as f64).ln(),
                "sum_matches_jacobian": s.sum_matches_jacobian(3.0),
                "lower_bound_holds": h >= (dt as f64).ln() - 3.0 * h_se,
            });
            Ok(Output::new(csv, summary))
        }
        Experiment::Mixing(e) => {
            let cloud = measure(map, e.samples, &e.cloud, seed)?;
            let phi = e.phi.build(k)?;
            let psi = e.psi.build(k)?;
            let s = mixing_decay(map, &cloud, &phi, &psi, e.n_max)?;
            let mut csv = Vec::new();
            write_decay_csv(&s, &mut csv)?;
            let summary = json!({
                "phi": phi.name(),
                "psi": psi.name(),
                "fitted_rate": s.fitted_rate,
                "fit_residual": s.fit_residual,
                "fitted_points": s.fitted_points,
            });
            Ok(Output::new(csv, summary))
        }
        Experiment::Entropy(e) => {
            let cloud = measure(map, e.samples, &e.cloud, seed)?;
            let eps = e
                .epsilons
                .clone()
                .unwrap_or_else(|| default_epsilons(&cloud));
            let r = entropy_estimate(map, &cloud, &eps, e.n_max)?;
            let mut csv = Vec::new();
            write_entropy_csv(&r, &mut csv)?;
            let slopes: Vec<Option<f64>> = r.rows.iter().map(|row| row.slope).collect();
            let summary = json!({
                "estimate": r.estimate,
                "log_dt": (dt as f64).ln(),
                "epsilons": eps,
                "slopes": slopes,
                "points_used": r.points_used,
            });
            Ok(Output::new(csv, summary))
        }
        Experiment::Periodic(e) => {
            need(
                !e.periods.is_empty() && e.periods.iter().all(|n| *n > 0),
                "periods must be a nonempty list of positive integers",
            )?;
            let sets = periodic_points_range(map, &e.periods, e.tol)
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let mu = match e.discrepancy_samples {
                Some(n) => Some(sample_equilibrium(
                    map,
                    &SampleConfig::iid(n),
                    seed.derive(CLOUD_TAG),
                )?),
                None => None,
            };
            let family = moment_family(k, e.moment_degree);
            let mut csv = Vec::new();
            let mut rows = Vec::new();
            for (i, s) in sets.iter().enumerate() {
                let mut buf = Vec::new();
                write_periodic_csv(s, &mut buf)?;
                let skip = if i == 0 {
                    0
                } else {
                    buf.iter()
                        .position(|b| *b == b'\n')
                        .map_or(buf.len(), |p| p + 1)
                };
                csv.extend_from_slice(&buf[skip..]);
                let disc = match &mu {
                    Some(mu) => Some(discrepancy(
                        &periodic_measure(s, e.repelling_only),
                        mu,
                        &family,
                    )?),
                    None => None,
                };
                rows.push(json!({
                    "period": s.period,
                    "expected_count": s.expected_count.to_string(),
                    "count": s.count,
                    "completeness": format!("{:?}", s.completeness),
                    "repelling": s.count_of(polylike::periodic::PointClass::Repelling),
                    "discrepancy": disc,
                }));
            }
            Ok(Output::new(csv, json!({ "periods": rows })))
        }
        Experiment::Degrees(e) => {
            let t = degree_table(map, e.l, e.n_max, e.samples, seed, e.method)?;
            let mut csv = Vec::new();
            write_degree_csv(&t, &mut csv)?;
            let summary = json!({
                "method": t.method,
                "growth_rate": t.growth_rate,
                "log_dt": (dt as f64).ln(),
                "within_ceiling": t.growth_rate.map(|g| g <= (dt as f64).ln() + 0.1),
            });
            Ok(Output::new(csv, summary))
        }
        Experiment::Plb(e) => {
            let r = plb_decay(map, e.n_max, e.samples, seed, e.method)?;
            let mut csv = Vec::new();
            write_decay_csv(&r.series, &mut csv)?;
            let critical = if e.critical_volume {
                let cv = critical_volume(map, e.n_max, e.samples, seed.derive(RUN_TAG))?;
                json!({ "rows": cv.rows, "lines": cv.lines, "slope": cv.slope, "verdict": cv.verdict })
            } else {
                Value::Null
            };
            let summary = json!({
                "method": r.method,
                "alpha": r.alpha,
                "fitted_rate": r.series.fitted_rate,
                "within_bound": r.within_bound,
                "critical_volume": critical,
            });
            Ok(Output::new(csv, summary))
        }
        Experiment::Green(e) => {
            let mut zs: Vec<C64> = e.points.iter().map(|p| c64(*p)).collect();
            if let Some(g) = &e.grid {
                need(
                    g.m >= 2 && g.half_width > 0.0,
                    "grid needs m >= 2 and a positive half_width",
                )?;
                let step = 2.0 * g.half_width / (g.m - 1) as f64;
                for i in 0..g.m {
                    for j in 0..g.m {
                        zs.push(
                            c64(g.center)
                                + C64::new(
                                    -g.half_width + j as f64 * step,
                                    -g.half_width + i as f64 * step,
                                ),
                        );
                    }
                }
            }
            need(!zs.is_empty(), "green needs `points` or a `grid`")?;
            let evals = green_many(map, &zs, e.n_max, e.tol)?;
            let mut csv = Vec::new();
            write_green_csv(&evals, &mut csv)?;
            let summary = json!({
                "points": evals.len(),
                "unconverged": evals.iter().filter(|g| !g.converged).count(),
                "max": evals.iter().map(|g| g.value).fold(0.0, f64::max),
            });
            Ok(Output::new(csv, summary))
        }
        Experiment::Hausdorff(e) => {
            let cloud = measure(map, e.samples, &e.cloud, seed)?;
            let spec = if e.orbits > 0 {
                Some(
                    lyapunov(map, &cloud, e.orbit_length, e.orbits, seed.derive(RUN_TAG))?
                        .exponents[0],
                )
            } else {
                None
            };
            let h = hausdorff_dimension(map, &cloud, spec)?;
            let mut csv = b"quantity,value,stderr\n".to_vec();
            writeln!(
                csv,
                "hausdorff_dimension,{:.16e},{:.16e}",
                h.dimension, h.stderr
            )?;
            writeln!(
                csv,
                "lyapunov,{:.16e},{:.16e}",
                h.lyapunov, h.lyapunov_stderr
            )?;
            if let Some(x) = h.spectrum_exponent {
                writeln!(csv, "spectrum_exponent,{x:.16e},")?;
            }
            let mut summary = json!({ "hausdorff": h });
            if let Some(n) = e.expansion_n {
                let x = expansion_constant(map, &cloud, n)?;
                writeln!(csv, "expansion_constant,{:.16e},", x.value())?;
                summary["expansion"] = json!(x);
            }
            if let Some(hs) = &e.holder {
                let centers = match &hs.centers {
                    Some(cs) => HolderCenters::Explicit(
                        cs.iter()
                            .map(|c| point(std::slice::from_ref(c), 1))
                            .collect::<Result<_>>()?,
                    ),
                    None => HolderCenters::Sampled(hs.sampled),
                };
                let r = holder_check(
                    &cloud,
                    hs.alpha,
                    &hs.radii,
                    &centers,
                    seed.derive(RUN_TAG + 1),
                )?;
                for (rad, m) in r.radii.iter().zip(&r.sup_mass) {
                    writeln!(csv, "holder_sup_mass@{rad:.6e},{m:.16e},")?;
                }
                if let Some(x) = r.exponent {
                    writeln!(csv, "holder_exponent,{x:.16e},")?;
                }
                summary["holder"] = json!(r);
            }
            Ok(Output::new(csv, summary))
        }
        Experiment::Exceptional(e) => {
            need(
                k == 2
                    || e.x
                        .iter()
                        .all(|c| matches!(c, polylike::exceptional::Component::Point(_))),
                "lines need a map of C^2",
            )?;
            let x = if e.x.is_empty() {
                AlgebraicSet::axes()
            } else {
                AlgebraicSet::new(k, e.x.clone())?
            };
            let res = invariance_verdict(map, &x, e.probes, e.n_max, e.tol, seed)?;
            let mut csv = Vec::new();
            write_exceptional_csv(k, &res, &mut csv)?;
            let members = res.iter().filter(|r| r.verdict == Verdict::Member).count();
            let summary = json!({
                "probes": res.len(),
                "members": members,
                "nonmembers": res.len() - members,
                "ratios_monotone": res.iter().all(|r| r.series.ratios_nonincreasing()),
            });
            Ok(Output::new(csv, summary))
        }
        Experiment::Sweep(e) => {
            let template = SweepTemplate {
                base: map.family().clone(),
                slot: e.slot,
            };
            let grid = match &e.grid {
                SweepGrid::Points(ps) => ps.iter().map(|p| c64(*p)).collect(),
                SweepGrid::Disc { center, radius, m } => disc_grid(c64(*center), *radius, *m),
            };
            let sc = SweepConfig {
                cloud_size: e.cloud_size,
                orbit_length: e.orbit_length,
                lyapunov_samples: e.lyapunov_samples,
            };
            let t = lyapunov_sweep(&template, &grid, &sc, seed)?;
            let summary = json!({
                "cells": t.rows.len(),
                "valid": t.rows.iter().filter(|r| r.valid).count(),
                "sub_mean_value": t.sub_mean_value,
            });
            Ok(Output::new(t.to_csv().into_bytes(), summary))
        }
    }
}

/// Paths named in the config are relative to the working directory.
pub fn check_paths(cfg: &RunConfig) -> Result<()> {
    let cloud = match &cfg.experiment {
        Experiment::Invariance(e) => &e.cloud,
        Experiment::Lyapunov(e) => &e.cloud,
        Experiment::Mixing(e) => &e.cloud,
        Experiment::Entropy(e) => &e.cloud,
        Experiment::Hausdorff(e) => &e.cloud,
        _ => &None,
    };
    if let Some(p) = cloud {
        if !Path::new(p).is_file() {
            return Err(Error::InvalidInput(format!(
                "cloud file `{}` does not exist",
                p.display()
            )));
        }
    }
    Ok(())
}
