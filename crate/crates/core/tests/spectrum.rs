use polylike::measure::{sample_equilibrium, SampleConfig};
use polylike::spectrum::{
    default_epsilons, disc_grid, entropy_estimate, lyapunov, lyapunov_sweep, mixing_decay,
    ParamSlot, SweepConfig, SweepTemplate,
};
use polylike::{reference_map, Family, Observable, Point, Poly, Seed, WeightedCloud, C64};
use std::f64::consts::LN_2;

fn cloud(name: &str, n: usize, seed: u64) -> (polylike::MapSpec, WeightedCloud) {
    let m = reference_map(name).unwrap();
    let c = sample_equilibrium(&m, &SampleConfig::iid(n), Seed(seed)).unwrap();
    (m, c)
}

#[test]
fn doubling_exponent_is_log2() {
    let (m, c) = cloud("doubling", 500, 1);
    let s = lyapunov(&m, &c, 100, 100, Seed(2)).unwrap();
    assert!((s.exponents[0] - LN_2).abs() < 1e-6, "{s:?}");
    assert!(s.sum_matches_jacobian(3.0));
}

#[test]
fn skew_exponents() {
    let (m, c) = cloud("skew", 300, 3);
    let s = lyapunov(&m, &c, 500, 100, Seed(4)).unwrap();
    println!("skew {s:?}");
    assert!((s.exponents[0] - 4f64.ln()).abs() < 0.02);
    assert!((s.exponents[1] - LN_2).abs() < 0.02);
}

#[test]
fn torus_exponents() {
    let (m, c) = cloud("torus", 300, 5);
    let s = lyapunov(&m, &c, 200, 100, Seed(6)).unwrap();
    println!("torus {s:?}");
    assert!(s.exponents.iter().all(|e| (e - LN_2).abs() < 0.02));
}

#[test]
fn short_orbits_are_rejected() {
    let (m, c) = cloud("doubling", 10, 1);
    assert!(lyapunov(&m, &c, 20, 10, Seed(1)).is_err());
}

#[test]
fn mixing_examples() {
    let (m, c) = cloud("doubling", 10_000, 7);
    let s = mixing_decay(&m, &c, &Observable::re(0), &Observable::constant(1.0), 8).unwrap();
    assert!(s.values.iter().all(|p| p.value == 0.0 && p.stderr == 0.0));
    let s = mixing_decay(&m, &c, &Observable::re(0), &Observable::re(0), 10).unwrap();
    println!("re {:?}", s.values);
    for p in &s.values[1..] {
        assert!(p.value <= 3.0 * p.stderr, "{p:?}");
    }
    let (m, c) = cloud("doubling", 100_000, 8);
    let bump = Observable::bump(Point::new1(C64::new(0.0, 1.0)), 0.5);
    let s = mixing_decay(&m, &c, &bump, &bump, 8).unwrap();
    println!("bump {s:?}");
    assert!(s.fitted_rate.unwrap() <= 0.55);
}

#[test]
fn entropy_examples() {
    let (m, c) = cloud("doubling", 10_000, 9);
    let e = entropy_estimate(&m, &c, &default_epsilons(&c), 12).unwrap();
    println!("doubling {e:?}");
    assert!(e.estimate >= 0.6 && e.estimate <= 0.72, "{}", e.estimate);

    let single = WeightedCloud::equal_weights(
        1,
        vec![Point::real1(1.0)],
        polylike::Provenance::BackwardWalk,
    );
    assert_eq!(
        entropy_estimate(&m, &single, &[0.1], 5).unwrap().estimate,
        0.0
    );
}

#[test]
fn entropy_wd2z() {
    let (m, c) = cloud("wd2z", 100_000, 11);
    let e = entropy_estimate(&m, &c, &default_epsilons(&c), 10).unwrap();
    println!("wd2z {e:?}");
    assert!((e.estimate - 3f64.ln()).abs() <= 0.1, "{}", e.estimate);
}

#[test]
fn sweep_examples() {
    let t = SweepTemplate {
        base: Family::Poly1D {
            p: Poly::from_real(&[0.0, 0.0, 1.0]),
        },
        slot: ParamSlot::Coeffs(0),
    };
    let cfg = SweepConfig {
        cloud_size: 200,
        orbit_length: 100,
        lyapunov_samples: 100,
    };
    let one = lyapunov_sweep(&t, &[C64::new(0.0, 0.0)], &cfg, Seed(1)).unwrap();
    assert_eq!(one.rows.len(), 1);
    assert!(one.sub_mean_value.is_none());
    assert!((one.rows[0].h - 2.0 * LN_2).abs() < 1e-6);

    let skew = SweepTemplate {
        base: Family::Skew2D {
            lambda: C64::new(4.0, 0.0),
            p: Poly::zero(),
            q: Poly::from_real(&[0.0, 0.0, 1.0]),
        },
        slot: ParamSlot::Lambda,
    };
    let grid: Vec<C64> = (0..6).map(|j| C64::from_polar(4.0, j as f64)).collect();
    let table = lyapunov_sweep(&skew, &grid, &cfg, Seed(2)).unwrap();
    let target = 2.0 * (4f64.ln() + LN_2);
    for r in &table.rows {
        assert!(r.valid);
        assert!((r.h - target).abs() < 1e-6, "{r:?}");
    }

    let disc = lyapunov_sweep(&t, &disc_grid(C64::new(0.0, 0.0), 0.1, 6), &cfg, Seed(3)).unwrap();
    let check = disc.sub_mean_value.unwrap();
    println!("{check:?}");
    assert!(check.holds);
}
