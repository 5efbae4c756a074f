//! Fixtures shared by the benchmarks in `benches/`.

use polylike::measure::sample_equilibrium;
use polylike::{reference_map, MapSpec, Point, SampleConfig, Seed, WeightedCloud, C64};

pub fn map(name: &str) -> MapSpec {
    reference_map(name).expect("reference map")
}

/// An equilibrium cloud of `n` points with a fixed seed.
pub fn cloud(m: &MapSpec, n: usize) -> WeightedCloud {
    sample_equilibrium(m, &SampleConfig::iid(n), Seed(7)).expect("sampling a reference map")
}

/// A generic point of V away from the critical values.
pub fn generic_point(m: &MapSpec) -> Point {
    match m.dimension() {
        1 => Point::new1(C64::new(0.31, 0.27)),
        _ => Point::new2(C64::new(0.9, 0.4), C64::new(0.8, -0.35)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        for name in polylike::REFERENCE_NAMES {
            let m = map(name);
            assert!(m.domain().contains(&generic_point(&m)), "{name}");
            cloud(&m, 8).check(m.domain()).unwrap();
        }
    }
}
