//! Numerical toolkit for polynomial-like maps `f: U -> V` on C and C^2:
//! preimages, the equilibrium measure of maximal entropy, its Lyapunov
//! spectrum and mixing, periodic-point equidistribution, dynamical degrees
//! and the exceptional set.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exceptional;
pub mod geometry;
pub mod green1d;
pub mod maps;
pub mod measure;
pub mod observables;
pub mod periodic;
pub mod point;
pub mod poly;
pub mod preimage;
pub mod reference;
pub mod rng;
pub mod roots;
pub mod spatial;
pub mod spectrum;
pub mod stats;

pub use error::{Error, Result};
pub use maps::{
    parse_map_spec, serialize_map_spec, Domain, Family, MapSpec, PowerVariant, Shape,
    ValidationReport,
};
pub use measure::{DecaySeries, Provenance, SampleConfig, StartLaw, WeightedCloud};
pub use observables::Observable;
pub use point::{CMat, Point, C64};
pub use poly::Poly;
pub use preimage::{fiber, iterated_fiber, random_preimage, PreimageSet};
pub use reference::{reference_map, REFERENCE_NAMES};
pub use rng::Seed;
