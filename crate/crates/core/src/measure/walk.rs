use super::{Provenance, WeightedCloud};
use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::point::Point;
use crate::preimage::random_preimage;
use crate::rng::{par_indexed, Seed};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Maximal relative mismatch `|f(w) - z| / (1 + |z|)` accepted when re-checking
/// a backward step.
const RECHECK_TOL: f64 = 1e-8;

/// `20 + ceil(log(diam V / 1e-9) / log d_t)` backward steps.
pub fn default_burn_in(map: &MapSpec) -> usize {
    let steps = (map.domain().diameter() / 1e-9).ln() / (map.topological_degree() as f64).ln();
    20 + steps.ceil().max(0.0) as usize
}

/// One random backward step from `z`, re-checked by evaluating `f`.
pub fn backward_step<R: Rng + ?Sized>(map: &MapSpec, z: &Point, rng: &mut R) -> Result<Point> {
    let w = random_preimage(map, z, rng)?;
    let back = map.eval(&w);
    let mismatch = back.dist(z) / (1.0 + z.norm());
    if !(mismatch <= RECHECK_TOL) {
        return Err(Error::SolveInconsistency(format!(
            "backward step re-check: |f(w) - z| / (1 + |z|) = {mismatch:.3e}"
        )));
    }
    if !map.domain().contains(&w) {
        return Err(Error::Escaped(format!("backward walk left V at {:?}", w.0)));
    }
    Ok(w)
}

/// Iterates random preimages from `start`, drops the first `burn_in` points
/// and returns the next `length`.
pub fn backward_walk<R: Rng + ?Sized>(
    map: &MapSpec,
    start: &Point,
    burn_in: usize,
    length: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    if !map.domain().contains(start) {
        return Err(Error::InvalidInput(format!(
            "walk start {:?} is not in V",
            start.0
        )));
    }
    let mut z = *start;
    for _ in 0..burn_in {
        z = backward_step(map, &z, rng)?;
    }
    let mut out = Vec::with_capacity(length);
    for _ in 0..length {
        z = backward_step(map, &z, rng)?;
        out.push(z);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum StartLaw {
    /// A deterministic start, e.g. to probe the exceptional set on purpose.
    FixedPoint(Point),
    UniformOnV,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleConfig {
    pub walkers: usize,
    /// `None` selects [`default_burn_in`].
    pub burn_in: Option<usize>,
    pub per_walker: usize,
    pub start_law: StartLaw,
    /// Fraction of walkers allowed to fail before the run is aborted.
    pub max_failed_fraction: f64,
}

impl SampleConfig {
    /// `n` independent points: one per walker.
    pub fn iid(n: usize) -> Self {
        SampleConfig {
            walkers: n,
            burn_in: None,
            per_walker: 1,
            start_law: StartLaw::UniformOnV,
            max_failed_fraction: 0.01,
        }
    }

    pub fn walks(walkers: usize, per_walker: usize) -> Self {
        SampleConfig {
            walkers,
            per_walker,
            ..SampleConfig::iid(walkers)
        }
    }
}

/// Pools independent backward walks into one equal-weight cloud. Walker `i`
/// draws from stream `i` of `seed` and the pooled order is by walker index.
pub fn sample_equilibrium(map: &MapSpec, cfg: &SampleConfig, seed: Seed) -> Result<WeightedCloud> {
    if cfg.walkers == 0 {
        return Err(Error::InvalidInput(
            "sample_equilibrium needs at least one walker".into(),
        ));
    }
    let burn_in = cfg.burn_in.unwrap_or_else(|| default_burn_in(map));
    let walks: Vec<Result<Vec<Point>>> = par_indexed(cfg.walkers, |i| {
        let mut rng = seed.stream(i as u64);
        let start = match &cfg.start_law {
            StartLaw::FixedPoint(p) => *p,
            StartLaw::UniformOnV => map.domain().sample_uniform(&mut rng),
        };
        backward_walk(map, &start, burn_in, cfg.per_walker, &mut rng)
    });
    let failed = walks.iter().filter(|w| w.is_err()).count();
    let allowed = (cfg.max_failed_fraction * cfg.walkers as f64).floor() as usize;
    if failed > allowed {
        if cfg.walkers == 1 {
            return Err(walks.into_iter().next().unwrap().unwrap_err());
        }
        return Err(Error::TooManyFailures {
            what: "walkers",
            failed,
            total: cfg.walkers,
            allowed: cfg.max_failed_fraction,
        });
    }
    let points: Vec<Point> = walks.into_iter().filter_map(|w| w.ok()).flatten().collect();
    let mut cloud = WeightedCloud::equal_weights(map.dimension(), points, Provenance::BackwardWalk)
        .with_param("walkers", cfg.walkers)
        .with_param("burn_in", burn_in)
        .with_param("per_walker", cfg.per_walker)
        .with_param("failed_walkers", failed)
        .with_param(
            "start_law",
            match &cfg.start_law {
                StartLaw::UniformOnV => "UniformOnV".to_string(),
                StartLaw::FixedPoint(p) => {
                    format!("FixedPoint{}", super::point_label(p, map.dimension()))
                }
            },
        );
    cloud.seed = Some(seed);
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{Domain, Family};
    use crate::point::C64;
    use crate::poly::Poly;

    fn square() -> MapSpec {
        MapSpec::new(
            Family::Poly1D {
                p: Poly::from_real(&[0.0, 0.0, 1.0]),
            },
            Domain::ball(1, 4.0),
        )
        .unwrap()
    }

    #[test]
    fn square_walk_reaches_unit_circle() {
        let mut rng = Seed(1).stream(0);
        let pts = backward_walk(&square(), &Point::real1(2.0), 30, 50, &mut rng).unwrap();
        assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-9));
    }

    #[test]
    fn torus_walk_reaches_unit_torus() {
        let m = MapSpec::new(
            Family::ProductPower2D {
                degree: 2,
                variant: crate::maps::PowerVariant::Diagonal,
            },
            Domain::polydisc(2, 4.0),
        )
        .unwrap();
        let mut rng = Seed(2).stream(0);
        let start = Point::new2(C64::new(2.0, 0.0), C64::new(2.0, 0.0));
        let pts = backward_walk(&m, &start, 40, 50, &mut rng).unwrap();
        assert!(pts
            .iter()
            .all(|p| (p[0].norm() - 1.0).abs() < 1e-9 && (p[1].norm() - 1.0).abs() < 1e-9));
    }

    #[test]
    fn start_outside_is_rejected() {
        let mut rng = Seed(3).stream(0);
        assert!(matches!(
            backward_walk(&square(), &Point::real1(5.0), 1, 1, &mut rng),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn cloud_is_independent_of_thread_count() {
        let cfg = SampleConfig::walks(16, 8);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sample_equilibrium(&square(), &cfg, Seed(9)).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
