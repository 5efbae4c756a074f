use polylike::geometry::{
    critical_volume, degree_table, plb_decay, volume_of_u, DegreeMethod, LineMethod, SeriesVerdict,
};
use polylike::{reference_map, Seed};
use std::f64::consts::PI;

fn torus_oracle(n: usize) -> f64 {
    let big_n = (1u64 << n) as f64;
    3.0 * PI * PI * big_n * (2f64.powf(1.0 / big_n) - 2f64.powf(-1.0 / big_n))
}

fn skew_p0_oracle(n: usize) -> f64 {
    let big_n = (1u64 << n) as f64;
    let rho2 = 2f64.powf(1.0 / big_n);
    PI * PI / 4.0 * (rho2 + 2.0 * big_n / 16f64.powi(n as i32))
}

fn close(got: f64, se: f64, want: f64) -> bool {
    (got - want).abs() <= 4.0 * se + 1e-9 * want.abs()
}

#[test]
fn torus_pushforward_matches_closed_form() {
    let m = reference_map("torus").unwrap();
    let t = degree_table(&m, 1, 8, 20_000, Seed(1), DegreeMethod::Auto).unwrap();
    assert_eq!(t.method, DegreeMethod::Pushforward);
    for r in &t.rows {
        println!("{r:?} oracle {}", torus_oracle(r.n));
        assert!(close(r.estimate, r.stderr, torus_oracle(r.n)));
    }
    let g = t.growth_rate.unwrap();
    assert!(g.abs() <= 0.05, "{g}");
}

#[test]
fn torus_forward_agrees_while_acceptance_lasts() {
    let m = reference_map("torus").unwrap();
    let t = degree_table(&m, 1, 3, 200_000, Seed(2), DegreeMethod::Forward).unwrap();
    for r in &t.rows {
        println!("{r:?} oracle {}", torus_oracle(r.n));
        assert!(close(r.estimate, r.stderr, torus_oracle(r.n)));
    }
    let err = degree_table(&m, 1, 10, 20_000, Seed(2), DegreeMethod::Forward).unwrap_err();
    assert!(
        matches!(err, polylike::Error::LowAcceptance { .. }),
        "{err}"
    );
}

#[test]
fn skew_p0_fibered_matches_closed_form() {
    let m = reference_map("skew_p0").unwrap();
    let t = degree_table(&m, 1, 8, 20_000, Seed(3), DegreeMethod::Auto).unwrap();
    assert_eq!(t.method, DegreeMethod::Fibered);
    for r in &t.rows {
        println!("{r:?} oracle {}", skew_p0_oracle(r.n));
        assert!(close(r.estimate, r.stderr, skew_p0_oracle(r.n)));
    }
    assert!(t.growth_rate.unwrap().abs() < 0.05);
}

#[test]
fn skew_fibered_agrees_with_forward() {
    let m = reference_map("skew").unwrap();
    let fib = degree_table(&m, 1, 1, 50_000, Seed(4), DegreeMethod::Fibered).unwrap();
    let fwd = degree_table(&m, 1, 1, 400_000, Seed(5), DegreeMethod::Forward).unwrap();
    for (a, b) in fib.rows.iter().zip(&fwd.rows) {
        println!("{a:?} {b:?}");
        assert!((a.estimate - b.estimate).abs() <= 4.0 * (a.stderr.hypot(b.stderr)));
    }
}

#[test]
fn top_degree_is_analytic() {
    let m = reference_map("torus").unwrap();
    let t = degree_table(&m, 2, 5, 100_000, Seed(6), DegreeMethod::Auto).unwrap();
    assert_eq!(t.method, DegreeMethod::Analytic);
    let vol_u = (1.5 * PI).powi(2);
    for r in &t.rows {
        assert!(close(r.estimate, r.stderr, 4f64.powi(r.n as i32) * vol_u));
    }
    assert!((t.growth_rate.unwrap() - 4f64.ln()).abs() < 1e-12);
    let u = volume_of_u(&m, 100_000, Seed(7)).unwrap();
    assert!(close(u.mean, u.stderr, vol_u));
}

#[test]
fn swap_map_forward_degrees() {
    let m = reference_map("wd2z").unwrap();
    let t = degree_table(&m, 1, 8, 50_000, Seed(8), DegreeMethod::Auto).unwrap();
    assert_eq!(t.method, DegreeMethod::Forward);
    println!("{t:?}");
    assert!(t.rows.iter().all(|r| r.estimate >= 0.0));
    assert!(t.growth_rate.unwrap() <= 3f64.ln() + 0.1);
}

#[test]
fn skew_critical_volume_is_exact() {
    for name in ["skew", "skew_p0"] {
        let m = reference_map(name).unwrap();
        let cv = critical_volume(&m, 10, 1000, Seed(9)).unwrap();
        assert_eq!(cv.lines.len(), 1);
        assert_eq!(cv.lines[0].method, LineMethod::FiberPullback);
        for r in &cv.rows {
            let want = PI / (4.0 * 2f64.powi(r.n as i32));
            assert!((r.delta - want).abs() < 1e-12 * want, "{r:?} vs {want}");
        }
        assert_eq!(cv.verdict, SeriesVerdict::Convergent);
    }
}

#[test]
fn torus_critical_lines_miss_the_annulus() {
    let m = reference_map("torus").unwrap();
    let cv = critical_volume(&m, 6, 1000, Seed(10)).unwrap();
    assert!(cv.lines.iter().all(|l| l.method == LineMethod::Empty));
    assert!(cv.rows.iter().all(|r| r.delta == 0.0));
    assert_eq!(cv.verdict, SeriesVerdict::Convergent);
}

#[test]
fn swap_critical_volume_runs_forward() {
    let m = reference_map("wd2z").unwrap();
    let cv = critical_volume(&m, 6, 20_000, Seed(11)).unwrap();
    assert_eq!(cv.lines[0].method, LineMethod::Forward);
    println!("{cv:?}");
    assert!(cv.rows.iter().all(|r| r.delta >= 0.0));
}

#[test]
fn plb_bounds() {
    let torus = reference_map("torus").unwrap();
    let r = plb_decay(&torus, 8, 20_000, Seed(12), DegreeMethod::Auto).unwrap();
    println!("{r:?}");
    assert_eq!(r.alpha, 0.5);
    assert_eq!(r.within_bound, Some(true));
    let c = r.series.fitted_rate.unwrap();
    assert!((c - 0.25).abs() < 0.02, "{c}");

    let skew = reference_map("skew_p0").unwrap();
    let r = plb_decay(&skew, 6, 5_000, Seed(13), DegreeMethod::Auto).unwrap();
    assert_eq!(r.alpha, 1.0);
    assert_eq!(r.within_bound, None);
    assert!((r.series.values[0].value - skew_p0_oracle(0)).abs() < 4.0 * r.series.values[0].stderr);
}
