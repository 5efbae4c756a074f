//! The twelve acceptance criteria, run in order with one status line each.
//! Criteria 1-11 run on a four-thread pool; criterion 12 reruns them on a
//! single thread and compares the emitted CSV bytes.

use polylike::exceptional::{
    invariance_verdict, write_exceptional_csv, AlgebraicSet, Component, Verdict,
};
use polylike::geometry::{degree_table, write_degree_csv, DegreeMethod};
use polylike::green1d::{
    green, green_many, hausdorff_dimension, holder_check, write_green_csv, HolderCenters,
    DEFAULT_N_MAX,
};
use polylike::maps::analytic_graph;
use polylike::measure::{
    invariance_report, sample_equilibrium, write_cloud, write_decay_csv, write_invariance_csv,
    RESIDUAL_FLOOR,
};
use polylike::observables::{default_test_functions, moment_family};
use polylike::periodic::{
    discrepancy, periodic_measure, periodic_points, write_periodic_csv, Completeness,
};
use polylike::spectrum::{
    default_epsilons, entropy_estimate, log_jacobian_integral, lyapunov, mixing_decay,
    write_entropy_csv, write_lyapunov_csv,
};
use polylike::stats::{ks_critical_1pct, ks_statistic};
use polylike::{
    reference_map, Family, MapSpec, Observable, Point, Result, SampleConfig, Seed, WeightedCloud,
    C64, REFERENCE_NAMES,
};
use rand::Rng;
use std::f64::consts::{LN_2, TAU};
use std::io::Write;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
    csv: Vec<u8>,
}

struct Criterion {
    id: usize,
    budget: Duration,
    run: fn() -> Result<Outcome>,
}

fn cloud(m: &MapSpec, n: usize, seed: u64) -> Result<WeightedCloud> {
    sample_equilibrium(m, &SampleConfig::iid(n), Seed(seed))
}

fn ln(d: u64) -> f64 {
    (d as f64).ln()
}

fn c1() -> Result<Outcome> {
    let m = reference_map("doubling")?;
    let c = cloud(&m, 10_000, 101)?;
    let radial = c
        .points
        .iter()
        .map(|p| (p[0].norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let angles: Vec<f64> = c
        .points
        .iter()
        .map(|p| p[0].arg().rem_euclid(TAU) / TAU)
        .collect();
    let ks = ks_statistic(&angles, |x| x.clamp(0.0, 1.0));
    let crit = ks_critical_1pct(c.len());
    let mut csv = Vec::new();
    write_cloud(&c, &mut csv)?;
    Ok(Outcome {
        pass: radial < 1e-8 && ks < crit,
        detail: format!("max||z|-1| = {radial:.2e}, KS = {ks:.4} (1% critical {crit:.4})"),
        csv,
    })
}

fn c2() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut csv = b"map,log_j_integral,stderr,log_dt\n".to_vec();
    for (i, name) in REFERENCE_NAMES.iter().enumerate() {
        let m = reference_map(name)?;
        let c = cloud(&m, 20_000, 200 + i as u64)?;
        let (v, se) = log_jacobian_integral(&m, &c);
        let target = ln(m.topological_degree());
        pass &= v >= target - 3.0 * se;
        parts.push(format!("{name} {v:.3}>={target:.3}"));
        writeln!(csv, "{name},{v:.16e},{se:.16e},{target:.16e}")?;
    }
    Ok(Outcome {
        pass,
        detail: parts.join(", "),
        csv,
    })
}

fn c3() -> Result<Outcome> {
    let m = reference_map("skew")?;
    let c = cloud(&m, 200, 301)?;
    let s = lyapunov(&m, &c, 500, 200, Seed(302))?;
    let want = [4f64.ln(), LN_2];
    let exps_ok = s
        .exponents
        .iter()
        .zip(want)
        .all(|(e, w)| (e - w).abs() <= 0.02);
    let mut graph = 0.0f64;
    for p in &c.points {
        graph = graph.max((p[0] - analytic_graph(&m, p[1], None)?.value).norm());
    }
    let mut csv = Vec::new();
    write_lyapunov_csv(&s, &mut csv)?;
    writeln!(csv, "graph_residual,{graph:.16e},0")?;
    Ok(Outcome {
        pass: exps_ok && graph < 1e-5,
        detail: format!(
            "exponents {:.4}, {:.4} (want {:.4}, {:.4}), max|z1-h(z2)| = {graph:.2e}",
            s.exponents[0], s.exponents[1], want[0], want[1]
        ),
        csv,
    })
}

fn c4() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut csv = Vec::new();
    for (i, name) in REFERENCE_NAMES.iter().enumerate() {
        let m = reference_map(name)?;
        let c = cloud(&m, 20_000, 400 + i as u64)?;
        let fns = default_test_functions(m.domain());
        let r = invariance_report(&m, &c, &fns)?;
        let worst = r
            .rows
            .iter()
            .flat_map(|row| {
                [
                    (row.push_residual, row.push_stderr),
                    (row.pull_residual, row.pull_stderr),
                ]
            })
            .filter(|(_, s)| *s > RESIDUAL_FLOOR)
            .map(|(v, s)| v / s)
            .fold(0.0, f64::max);
        pass &= r.rows.len() == 12 && r.all_pass(3.0);
        let ok = r.rows.iter().filter(|row| row.passes(3.0)).count();
        parts.push(format!("{name} {ok}/{} ({worst:.2}s)", r.rows.len()));
        writeln!(csv, "# {name}")?;
        write_invariance_csv(&r, &mut csv)?;
    }
    Ok(Outcome {
        pass,
        detail: format!(
            "rows within 3 sigma (worst noisy row): {}",
            parts.join(", ")
        ),
        csv,
    })
}

fn c5() -> Result<Outcome> {
    let m = reference_map("doubling")?;
    let c = cloud(&m, 10_000, 501)?;
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut csv = Vec::new();
    let modes = [Observable::re(0), Observable::im(0)];
    for phi in &modes {
        for psi in &modes {
            let s = mixing_decay(&m, &c, phi, psi, 10)?;
            for p in &s.values[1..] {
                pass &= p.value <= 3.0 * p.stderr;
                worst = worst.max(p.value / p.stderr);
            }
            writeln!(csv, "# {} {}", phi.name(), psi.name())?;
            write_decay_csv(&s, &mut csv)?;
        }
    }
    let big = cloud(&m, 100_000, 502)?;
    let bump = Observable::bump(Point::new1(C64::new(0.0, 1.0)), 0.5);
    let s = mixing_decay(&m, &big, &bump, &bump, 8)?;
    let rate = s.fitted_rate;
    pass &= rate.is_some_and(|r| r <= 0.55);
    writeln!(csv, "# bump")?;
    write_decay_csv(&s, &mut csv)?;
    Ok(Outcome {
        pass,
        detail: format!(
            "Fourier-mode correlations within {worst:.2} sigma, bump decay rate {rate:.3?}"
        ),
        csv,
    })
}

fn c6() -> Result<Outcome> {
    let m = reference_map("doubling")?;
    let mut csv = Vec::new();
    let mut counts_ok = true;
    for n in 1..=9 {
        let s = periodic_points(&m, n, 1e-8)?;
        counts_ok &= s.completeness == Completeness::Exact && s.count as u128 == 1u128 << n;
        write_periodic_csv(&s, &mut csv)?;
    }

    let sk = reference_map("skew")?;
    let Family::Skew2D { lambda, q, .. } = sk.family().clone() else {
        unreachable!()
    };
    let mut mult_err = 0.0f64;
    for n in 1..=6 {
        let s = periodic_points(&sk, n, 1e-8)?;
        counts_ok &= s.count as u128 == 1u128 << n;
        for p in &s.points {
            let mut w = p.point[1];
            let mut dq = C64::new(1.0, 0.0);
            for _ in 0..n {
                let (v, dv) = q.eval_with_derivative(w);
                dq *= dv;
                w = v;
            }
            let mut oracle = [lambda.powu(n as u32), dq];
            oracle.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
            for (got, want) in p.multipliers.iter().zip(oracle) {
                mult_err = mult_err.max((got - want).norm() / want.norm().max(1.0));
            }
        }
        write_periodic_csv(&s, &mut csv)?;
    }

    let mu = cloud(&m, 100_000, 601)?;
    let s10 = periodic_points(&m, 10, 1e-8)?;
    let disc = discrepancy(&periodic_measure(&s10, true), &mu, &moment_family(1, 4))?;
    writeln!(csv, "discrepancy,{disc:.16e}")?;
    Ok(Outcome {
        pass: counts_ok && mult_err <= 1e-8 && disc < 0.02,
        detail: format!("counts exact: {counts_ok}, multiplier error {mult_err:.2e}, discrepancy(nu10) = {disc:.4}"),
        csv,
    })
}

fn c7() -> Result<Outcome> {
    let m = reference_map("torus")?;
    let t = degree_table(&m, 1, 8, 20_000, Seed(701), DegreeMethod::Auto)?;
    let g = t.growth_rate.unwrap_or(f64::NAN);
    let d1 = g.exp();
    let c = cloud(&m, 300, 702)?;
    let s = lyapunov(&m, &c, 200, 100, Seed(703))?;
    let bound = 0.5 * (m.topological_degree() as f64 / d1).ln();
    let lmin = s.min();
    let regime = if (lmin - bound).abs() <= 0.05 {
        "equality"
    } else {
        "strict"
    };
    let mut csv = Vec::new();
    write_degree_csv(&t, &mut csv)?;
    write_lyapunov_csv(&s, &mut csv)?;
    Ok(Outcome {
        pass: (-0.05..=0.05).contains(&g) && lmin >= bound - 0.05,
        detail: format!(
            "growth {g:.4}, d1 = {d1:.3}, lambda_min {lmin:.4} >= 1/2 log(4/d1) = {bound:.4} ({regime} regime)"
        ),
        csv,
    })
}

fn c8() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut csv = Vec::new();
    for (i, name) in REFERENCE_NAMES.iter().enumerate() {
        let m = reference_map(name)?;
        let t = degree_table(&m, 1, 8, 20_000, Seed(800 + i as u64), DegreeMethod::Auto)?;
        let g = t.growth_rate.unwrap_or(f64::INFINITY);
        let cap = ln(m.topological_degree()) + 0.1;
        pass &= g <= cap;
        parts.push(format!("{name} {g:.3}<={cap:.3}"));
        write_degree_csv(&t, &mut csv)?;
    }
    Ok(Outcome {
        pass,
        detail: parts.join(", "),
        csv,
    })
}

fn c9() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut csv = Vec::new();
    for (name, n, n_max, seed) in [("doubling", 10_000, 12, 901), ("wd2z", 100_000, 10, 902)] {
        let m = reference_map(name)?;
        let c = cloud(&m, n, seed)?;
        let e = entropy_estimate(&m, &c, &default_epsilons(&c), n_max)?;
        let h = ln(m.topological_degree());
        pass &= e.estimate >= h - 0.1 && e.estimate <= h + 0.05;
        parts.push(format!(
            "{name} {:.4} in [{:.4}, {:.4}]",
            e.estimate,
            h - 0.1,
            h + 0.05
        ));
        write_entropy_csv(&e, &mut csv)?;
    }
    Ok(Outcome {
        pass,
        detail: parts.join(", "),
        csv,
    })
}

fn c10() -> Result<Outcome> {
    let m = reference_map("doubling")?;
    let g2 = green(&m, C64::new(2.0, 0.0), DEFAULT_N_MAX, 1e-12)?.value;
    let mut csv = Vec::new();

    let Family::Poly1D { p } = m.family() else {
        unreachable!()
    };
    let mut rng = Seed(1001).stream(0);
    let zs: Vec<C64> = (0..100)
        .map(|_| C64::from_polar(rng.gen_range(1.0..3.0), rng.gen_range(0.0..TAU)))
        .collect();
    let fz: Vec<C64> = zs.iter().map(|z| p.eval(*z)).collect();
    let a = green_many(&m, &fz, DEFAULT_N_MAX, 1e-13)?;
    let b = green_many(&m, &zs, DEFAULT_N_MAX, 1e-13)?;
    let fe = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x.value - 2.0 * y.value).abs())
        .fold(0.0, f64::max);
    write_green_csv(&b, &mut csv)?;

    let mut hd = Vec::new();
    for (i, name) in ["doubling", "chebyshev"].into_iter().enumerate() {
        let m = reference_map(name)?;
        let c = cloud(&m, 100_000, 1010 + i as u64)?;
        let l = lyapunov(&m, &c, 100, 200, Seed(1020 + i as u64))?;
        let h = hausdorff_dimension(&m, &c, Some(l.exponents[0]))?;
        writeln!(csv, "hd,{name},{:.16e},{:.16e}", h.dimension, h.stderr)?;
        hd.push(h.dimension);
    }

    let ch = reference_map("chebyshev")?;
    let c = cloud(&ch, 100_000, 1030)?;
    let radii: Vec<f64> = (0..8)
        .map(|j| 1e-3 * 10f64.powf(2.0 * j as f64 / 7.0))
        .collect();
    let ends = HolderCenters::Explicit(vec![Point::real1(2.0), Point::real1(-2.0)]);
    let lo = holder_check(&c, 0.45, &radii, &ends, Seed(1031))?;
    let hi = holder_check(&c, 0.9, &radii, &ends, Seed(1031))?;
    for r in [&lo, &hi] {
        writeln!(
            csv,
            "holder,{},{:.16e},{}",
            r.alpha,
            r.exponent.unwrap_or(f64::NAN),
            r.pass
        )?;
    }

    let pass = (g2 - LN_2).abs() <= 1e-9
        && fe < 1e-9
        && hd.iter().all(|h| (h - 1.0).abs() <= 0.02)
        && lo.pass
        && !hi.pass;
    Ok(Outcome {
        pass,
        detail: format!(
            "G(2)-log2 = {:.1e}, functional residual {fe:.1e}, HD {:.4}/{:.4}, Holder 0.45 {} / 0.9 {} (slope {:.3?})",
            g2 - LN_2,
            hd[0],
            hd[1],
            if lo.pass { "pass" } else { "fail" },
            if hi.pass { "pass" } else { "fail" },
            lo.exponent
        ),
        csv,
    })
}

fn c11() -> Result<Outcome> {
    let mut csv = Vec::new();
    let m = reference_map("wd2z")?;
    let res = invariance_verdict(&m, &AlgebraicSet::axes(), 20, 6, 1e-9, Seed(1101))?;
    let members = res.iter().filter(|r| r.verdict == Verdict::Member).count();
    let mut monotone = res.iter().all(|r| r.series.ratios_nonincreasing());
    write_exceptional_csv(2, &res, &mut csv)?;

    let sq = reference_map("doubling")?;
    let neg1 = invariance_verdict(
        &sq,
        &AlgebraicSet::point(Point::real1(1.0), 1),
        3,
        4,
        1e-9,
        Seed(1102),
    )?;
    write_exceptional_csv(1, &neg1, &mut csv)?;
    let torus = reference_map("torus")?;
    let one = C64::new(1.0, 0.0);
    let diag = AlgebraicSet::new(
        2,
        vec![Component::Line {
            a: one,
            b: -one,
            c: C64::new(0.0, 0.0),
        }],
    )?;
    let neg2 = invariance_verdict(&torus, &diag, 20, 4, 1e-9, Seed(1103))?;
    write_exceptional_csv(2, &neg2, &mut csv)?;
    let negatives = neg1.iter().chain(&neg2);
    let drops = negatives
        .clone()
        .filter(|r| r.verdict == Verdict::NonMember { drop_at: 1 })
        .count();
    monotone &= negatives.clone().all(|r| r.series.ratios_nonincreasing());
    let total_neg = neg1.len() + neg2.len();
    Ok(Outcome {
        pass: members == 20 && drops == total_neg && monotone,
        detail: format!("{members}/20 MEMBER to n=6, {drops}/{total_neg} controls NONMEMBER at n=1, ratios monotone: {monotone}"),
        csv,
    })
}

fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    vec![
        Criterion {
            id: 1,
            budget: s(10),
            run: c1,
        },
        Criterion {
            id: 2,
            budget: s(60),
            run: c2,
        },
        Criterion {
            id: 3,
            budget: s(60),
            run: c3,
        },
        Criterion {
            id: 4,
            budget: s(60),
            run: c4,
        },
        Criterion {
            id: 5,
            budget: s(30),
            run: c5,
        },
        Criterion {
            id: 6,
            budget: s(60),
            run: c6,
        },
        Criterion {
            id: 7,
            budget: s(120),
            run: c7,
        },
        Criterion {
            id: 8,
            budget: s(120),
            run: c8,
        },
        Criterion {
            id: 9,
            budget: s(120),
            run: c9,
        },
        Criterion {
            id: 10,
            budget: s(60),
            run: c10,
        },
        Criterion {
            id: 11,
            budget: s(30),
            run: c11,
        },
    ]
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

#[test]
fn acceptance() {
    let list = criteria();
    let wide = pool(4);
    let mut failed = Vec::new();
    let mut bodies = Vec::new();
    for c in &list {
        let t = Instant::now();
        let out = wide.install(c.run);
        let dt = t.elapsed();
        let (pass, detail) = match &out {
            Ok(o) => (o.pass && dt <= c.budget, o.detail.clone()),
            Err(e) => (false, format!("error: {e}")),
        };
        let over = if dt > c.budget {
            format!(", over the {:?} budget", c.budget)
        } else {
            String::new()
        };
        println!(
            "criterion {}: {} {detail} ({:.2?}{over})",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            dt
        );
        if !pass {
            failed.push(c.id);
        }
        bodies.push(out.ok().map(|o| o.csv));
    }

    let t = Instant::now();
    let narrow = pool(1);
    let mut differing = Vec::new();
    for (c, wide_csv) in list.iter().zip(&bodies) {
        let again = narrow.install(c.run).ok().map(|o| o.csv);
        if wide_csv.is_none() || again != *wide_csv {
            differing.push(c.id);
        }
    }
    let pass = differing.is_empty();
    let bytes: usize = bodies.iter().flatten().map(Vec::len).sum();
    println!(
        "criterion 12: {} CSV bodies of criteria 1-11 ({bytes} bytes) identical on 4 and 1 threads{} ({:.2?})",
        if pass { "PASS" } else { "FAIL" },
        if pass { String::new() } else { format!(", differing: {differing:?}") },
        t.elapsed()
    );
    if !pass {
        failed.push(12);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
