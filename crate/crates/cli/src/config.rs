//! Run configuration: one JSON object per invocation.

use polylike::exceptional::Component;
use polylike::geometry::DegreeMethod;
use polylike::preimage::DEFAULT_CAP;
use polylike::spectrum::ParamSlot;
use polylike::{
    parse_map_spec, reference_map, serialize_map_spec, Error, MapSpec, Observable, Point, Result,
    C64,
};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::path::{Path, PathBuf};

pub type Pair = [f64; 2];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// A reference-map name, a path to a map-spec file, or an inline spec.
    pub map: MapRef,
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub workers: Workers,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapRef {
    Name(String),
    Inline(serde_json::Value),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Workers {
    #[default]
    Auto,
    Count(usize),
}

impl Workers {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(Workers::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Workers::Count(n)),
            _ => Err(format!(
                "workers must be a positive integer or `auto`, got `{s}`"
            )),
        }
    }

    pub fn resolve(self) -> usize {
        match self {
            Workers::Count(n) => n,
            Workers::Auto => std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl Serialize for Workers {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Workers::Auto => s.serialize_str("auto"),
            Workers::Count(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Workers {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Workers::parse(&n.to_string()),
            Raw::S(s) => Workers::parse(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    Validate(Validate),
    Sample(Sample),
    Invariance(Invariance),
    Lyapunov(Lyapunov),
    Mixing(Mixing),
    Entropy(Entropy),
    Periodic(Periodic),
    Degrees(Degrees),
    Plb(Plb),
    Green(Green),
    Hausdorff(Hausdorff),
    Exceptional(Exceptional),
    Sweep(Sweep),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Validate(_) => "validate",
            Experiment::Sample(_) => "sample",
            Experiment::Invariance(_) => "invariance",
            Experiment::Lyapunov(_) => "lyapunov",
            Experiment::Mixing(_) => "mixing",
            Experiment::Entropy(_) => "entropy",
            Experiment::Periodic(_) => "periodic",
            Experiment::Degrees(_) => "degrees",
            Experiment::Plb(_) => "plb",
            Experiment::Green(_) => "green",
            Experiment::Hausdorff(_) => "hausdorff",
            Experiment::Exceptional(_) => "exceptional",
            Experiment::Sweep(_) => "sweep",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Validate {
    pub boundary_samples: usize,
}

impl Default for Validate {
    fn default() -> Self {
        Validate {
            boundary_samples: 256,
        }
    }
}

/// The pullback of a Dirac mass by `f^depth`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSource {
    pub point: Vec<Pair>,
    pub depth: usize,
    #[serde(default = "default_cap")]
    pub cap: u64,
}

fn default_cap() -> u64 {
    DEFAULT_CAP
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sample {
    pub samples: usize,
    pub per_walker: usize,
    pub burn_in: Option<usize>,
    /// A fixed walk start; uniform on V when absent.
    pub start: Option<Vec<Pair>>,
    pub fiber: Option<FiberSource>,
}

impl Default for Sample {
    fn default() -> Self {
        Sample {
            samples: 10_000,
            per_walker: 1,
            burn_in: None,
            start: None,
            fiber: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Invariance {
    pub samples: usize,
    pub cloud: Option<PathBuf>,
    pub sigmas: f64,
}

impl Default for Invariance {
    fn default() -> Self {
        Invariance {
            samples: 20_000,
            cloud: None,
            sigmas: 3.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Lyapunov {
    pub samples: usize,
    pub cloud: Option<PathBuf>,
    pub orbit_length: usize,
    pub orbits: usize,
}

impl Default for Lyapunov {
    fn default() -> Self {
        Lyapunov {
            samples: 1000,
            cloud: None,
            orbit_length: 200,
            orbits: 200,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableSpec {
    Constant { value: f64 },
    Re { coord: usize },
    Im { coord: usize },
    AbsSqr { coord: usize },
    Bump { center: Vec<Pair>, scale: f64 },
    HalfPlane { coord: usize, width: f64 },
}

impl ObservableSpec {
    pub fn build(&self, k: usize) -> Result<Observable> {
        let coord = |j: usize| {
            if j < k {
                Ok(j)
            } else {
                Err(Error::InvalidInput(format!(
                    "coordinate {j} does not exist in C^{k}"
                )))
            }
        };
        Ok(match self {
            ObservableSpec::Constant { value } => Observable::constant(*value),
            ObservableSpec::Re { coord: j } => Observable::re(coord(*j)?),
            ObservableSpec::Im { coord: j } => Observable::im(coord(*j)?),
            ObservableSpec::AbsSqr { coord: j } => Observable::abs_sqr(coord(*j)?),
            ObservableSpec::Bump { center, scale } => Observable::bump(point(center, k)?, *scale),
            ObservableSpec::HalfPlane { coord: j, width } => {
                Observable::smooth_half_plane(coord(*j)?, *width)
            }
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Mixing {
    pub samples: usize,
    pub cloud: Option<PathBuf>,
    pub phi: ObservableSpec,
    pub psi: ObservableSpec,
    pub n_max: usize,
}

impl Default for Mixing {
    fn default() -> Self {
        Mixing {
            samples: 10_000,
            cloud: None,
            phi: ObservableSpec::Re { coord: 0 },
            psi: ObservableSpec::Re { coord: 0 },
            n_max: 10,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Entropy {
    pub samples: usize,
    pub cloud: Option<PathBuf>,
    pub n_max: usize,
    /// Defaults to 5%, 10% and 20% of the cloud's spread.
    pub epsilons: Option<Vec<f64>>,
}

impl Default for Entropy {
    fn default() -> Self {
        Entropy {
            samples: 10_000,
            cloud: None,
            n_max: 10,
            epsilons: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Periodic {
    pub periods: Vec<usize>,
    pub tol: f64,
    pub repelling_only: bool,
    /// Equilibrium samples for the moment discrepancy of each period.
    pub discrepancy_samples: Option<usize>,
    pub moment_degree: u32,
}

impl Default for Periodic {
    fn default() -> Self {
        Periodic {
            periods: (1..=6).collect(),
            tol: 1e-8,
            repelling_only: true,
            discrepancy_samples: None,
            moment_degree: 4,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Degrees {
    pub l: usize,
    pub n_max: usize,
    pub samples: usize,
    pub method: DegreeMethod,
}

impl Default for Degrees {
    fn default() -> Self {
        Degrees {
            l: 1,
            n_max: 8,
            samples: 20_000,
            method: DegreeMethod::Auto,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Plb {
    pub n_max: usize,
    pub samples: usize,
    pub method: DegreeMethod,
    /// Also estimate the volumes `delta_n` near the critical set.
    pub critical_volume: bool,
}

impl Default for Plb {
    fn default() -> Self {
        Plb {
            n_max: 8,
            samples: 20_000,
            method: DegreeMethod::Auto,
            critical_volume: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub center: Pair,
    pub half_width: f64,
    /// Points per side.
    pub m: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Green {
    pub points: Vec<Pair>,
    pub grid: Option<GridSpec>,
    pub n_max: usize,
    pub tol: f64,
}

impl Default for Green {
    fn default() -> Self {
        Green {
            points: Vec::new(),
            grid: None,
            n_max: polylike::green1d::DEFAULT_N_MAX,
            tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderSpec {
    pub alpha: f64,
    pub radii: Vec<f64>,
    /// Explicit centres; otherwise `sampled` cloud points.
    #[serde(default)]
    pub centers: Option<Vec<Pair>>,
    #[serde(default = "default_sampled")]
    pub sampled: usize,
}

fn default_sampled() -> usize {
    100
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hausdorff {
    pub samples: usize,
    pub cloud: Option<PathBuf>,
    /// Lyapunov orbits for the cross-check; zero skips it.
    pub orbits: usize,
    pub orbit_length: usize,
    pub expansion_n: Option<usize>,
    pub holder: Option<HolderSpec>,
}

impl Default for Hausdorff {
    fn default() -> Self {
        Hausdorff {
            samples: 100_000,
            cloud: None,
            orbits: 200,
            orbit_length: 100,
            expansion_n: None,
            holder: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Exceptional {
    pub x: Vec<Component>,
    pub probes: usize,
    pub n_max: usize,
    pub tol: f64,
}

impl Default for Exceptional {
    fn default() -> Self {
        Exceptional {
            x: Vec::new(),
            probes: 20,
            n_max: 6,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepGrid {
    Points(Vec<Pair>),
    /// A centre followed by `m` points on the circle of radius `radius`.
    Disc {
        center: Pair,
        radius: f64,
        m: usize,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub slot: ParamSlot,
    pub grid: SweepGrid,
    #[serde(default = "default_cloud_size")]
    pub cloud_size: usize,
    #[serde(default = "default_orbit_length")]
    pub orbit_length: usize,
    #[serde(default = "default_orbits")]
    pub lyapunov_samples: usize,
}

fn default_cloud_size() -> usize {
    1000
}

fn default_orbit_length() -> usize {
    200
}

fn default_orbits() -> usize {
    200
}

pub fn c64(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn point(coords: &[Pair], k: usize) -> Result<Point> {
    if coords.len() != k {
        return Err(Error::InvalidInput(format!(
            "expected a point with {k} coordinates, got {}",
            coords.len()
        )));
    }
    let mut p = Point::default();
    for (j, c) in coords.iter().enumerate() {
        p[j] = c64(*c);
    }
    Ok(p)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    serde_json::from_str(text).map_err(|e| Error::Schema(format!("config: {e}")))
}

/// Loads the map and replaces the reference by the full inline spec.
/// Relative map paths are taken from `base`.
pub fn resolve_map(cfg: &mut RunConfig, base: &Path) -> Result<MapSpec> {
    let map = match &cfg.map {
        MapRef::Name(name) if polylike::reference::reference_source(name).is_some() => {
            reference_map(name)?
        }
        MapRef::Name(path) => {
            let p = base.join(path);
            let text = std::fs::read_to_string(&p).map_err(|e| {
                Error::InvalidInput(format!(
                    "map `{path}` is neither a reference name nor a readable file: {e}"
                ))
            })?;
            parse_map_spec(&text)?
        }
        MapRef::Inline(v) => parse_map_spec(&v.to_string())?,
    };
    let inline =
        serde_json::from_str(&serialize_map_spec(&map)).expect("serialised map spec is JSON");
    cfg.map = MapRef::Inline(inline);
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_filled() {
        let c = parse_config(r#"{"map": "skew", "experiment": {"kind": "lyapunov"}}"#).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.workers, Workers::Auto);
        let Experiment::Lyapunov(l) = &c.experiment else {
            panic!()
        };
        assert_eq!((l.samples, l.orbit_length, l.orbits), (1000, 200, 200));
    }

    #[test]
    fn workers_forms() {
        assert_eq!(Workers::parse("auto"), Ok(Workers::Auto));
        assert_eq!(Workers::parse("3"), Ok(Workers::Count(3)));
        assert!(Workers::parse("0").is_err() && Workers::parse("many").is_err());
        let c =
            parse_config(r#"{"map": "skew", "experiment": {"kind": "validate"}, "workers": 4}"#)
                .unwrap();
        assert_eq!(c.workers, Workers::Count(4));
        assert_eq!(serde_json::to_string(&Workers::Auto).unwrap(), "\"auto\"");
        assert!(Workers::Auto.resolve() >= 1);
    }

    #[test]
    fn observables_are_strict() {
        let bad = r#"{"map": "doubling", "experiment": {"kind": "mixing", "phi": {"type": "re", "coord": 0, "x": 1}}}"#;
        assert!(matches!(parse_config(bad), Err(Error::Schema(_))));
        let spec = ObservableSpec::Re { coord: 1 };
        assert!(spec.build(1).is_err());
        assert!(spec.build(2).is_ok());
    }

    #[test]
    fn maps_resolve_inline() {
        let mut c =
            parse_config(r#"{"map": "torus", "experiment": {"kind": "validate"}}"#).unwrap();
        let m = resolve_map(&mut c, Path::new(".")).unwrap();
        assert_eq!(m.topological_degree(), 4);
        let MapRef::Inline(v) = &c.map else { panic!() };
        let back = parse_map_spec(&v.to_string()).unwrap();
        assert_eq!(&back, &m);
    }

    #[test]
    fn point_arity() {
        assert!(point(&[[1.0, 0.0]], 2).is_err());
        assert_eq!(point(&[[1.0, 2.0]], 1).unwrap()[0], C64::new(1.0, 2.0));
    }
}
