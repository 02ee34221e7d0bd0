//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process exits nonzero if any check fails.

mod common;

use std::time::Instant;

use common::{exhaustive_t_hull, no_nesting, rel_err, rng, selection, t_limits};
use ipool::ci::point_t_interval;
use ipool::kernels::{chi_square_quantile, student_t_quantile};
use ipool::mle::{exp_ci_interval, exp_mle_interval, exp_mle_traditional, unif_ci_interval, unif_mle_interval};
use ipool::pbox::ks_band as band_of;
use ipool::sim::{mle_sampling_study, success_curve};
use ipool::synth::{intervalize_central, intervalize_systematic, sample};
use ipool::{
    ks_critical, outer_ci, pbox_from_intervals, Alpha, Family, Interval, IntervalDataset, Label, Metric, Scenario,
    SeedStream, SourceDistribution,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn alpha(a: f64) -> Alpha {
    Alpha::new(a).unwrap()
}

fn normal4() -> SourceDistribution {
    SourceDistribution::Normal { mu: 0.0, sigma: 2.0 }
}

fn ks_critical_value() -> Outcome {
    let d = ks_critical(30, alpha(0.025)).map_err(|e| e.to_string())?;
    check((d - 0.2417).abs() <= 0.00005, format!("D(30, 0.025) = {d:.6}, want 0.2417 +- 0.00005"))
}

fn outer_ci_balanced_ten() -> Outcome {
    let sc =
        Scenario { replications: 5000, master_seed: 2024, ..Scenario::new(normal4(), 10, 10, Metric::OuterCiWidth) };
    let curve = success_curve(&sc, &[5.0, 10.0]).map_err(|e| e.to_string())?;
    let (p5, p10) = (curve.points[0].percent, curve.points[1].percent);
    check(
        (p5 - 85.0).abs() <= 3.0 && (p10 - 47.0).abs() <= 3.0,
        format!("10:10 success f=5: {p5:.2}% (want 85 +- 3), f=10: {p10:.2}% (want 47 +- 3)"),
    )
}

fn outer_ci_eighty_skinny() -> Outcome {
    let sc =
        Scenario { replications: 5000, master_seed: 2025, ..Scenario::new(normal4(), 80, 80, Metric::OuterCiWidth) };
    let curve = success_curve(&sc, &[2.0]).map_err(|e| e.to_string())?;
    let p = curve.points[0].percent;
    check((p - 99.0).abs() <= 1.5, format!("80:80 success f=2: {p:.2}% (want 99 +- 1.5)"))
}

fn traditional_mle_means() -> Outcome {
    let rows = [(20, 2.0, 0.835, 0.815), (50, 15.0, 0.812, 0.790), (80, 5.0, 0.805, 0.795)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, &(n, f, want_s, want_p)) in rows.iter().enumerate() {
        let sc = Scenario {
            f,
            replications: 10_000,
            master_seed: 800 + i as u64,
            ..Scenario::new(SourceDistribution::Exponential { lambda: 0.8 }, n, n, Metric::TraditionalMle)
        };
        let s = mle_sampling_study(&sc).map_err(|e| e.to_string())?;
        ok &= (s.mean_skinny - want_s).abs() <= 0.03 && (s.mean_pooled - want_p).abs() <= 0.03;
        parts.push(format!(
            "{}:{} f={f}: {:.4}/{:.4} (want {want_s}/{want_p})",
            s.n_skinny, s.n_pooled, s.mean_skinny, s.mean_pooled
        ));
    }
    check(ok, format!("mean rate skinny/pooled, +- 0.03: {}", parts.join("; ")))
}

fn sweep_matches_exhaustive() -> Outcome {
    let mut worst = 0.0f64;
    for d in 0..500u64 {
        let mut r = rng(5, d);
        let n = r.gen_range(2..=12);
        let ds = no_nesting(&mut r, n, 10.0);
        if !ds.is_no_nesting() {
            return Err(format!("generator produced nested data at dataset {d}"));
        }
        let hull = outer_ci(&ds, alpha(0.05)).map_err(|e| e.to_string())?.hull();
        let (lo, hi) = exhaustive_t_hull(&ds, 0.05);
        worst = worst.max(rel_err(hull.lo(), lo)).max(rel_err(hull.hi(), hi));
    }
    check(worst <= 1e-9, format!("500 datasets, worst relative difference {worst:.3e} (want <= 1e-9)"))
}

fn enclosure_properties() -> Outcome {
    let mut failures = Vec::new();

    // Interval MLEs enclose every point MLE over all endpoint selections.
    for d in 0..200u64 {
        let mut r = rng(6, d);
        let n = r.gen_range(1..=10);
        let ds: IntervalDataset = (0..n)
            .map(|_| {
                let a = r.gen_range(0.01..10.0);
                Interval::new(a, a + r.gen_range(0.0..3.0)).unwrap()
            })
            .collect();
        let e = exp_mle_interval(&ds).unwrap().estimate;
        let u = unif_mle_interval(&ds).unwrap().estimate;
        for mask in 0..1u64 << n {
            let xs = selection(&ds, mask);
            let lam = n as f64 / xs.iter().sum::<f64>();
            let theta = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let slack = 1e-12 * lam;
            if lam < e.lo() - slack || lam > e.hi() + slack || !u.contains(theta) {
                failures.push(format!("mle enclosure, dataset {d} mask {mask}"));
                break;
            }
        }
    }

    // Band edges are ordered at every grid point.
    for d in 0..200u64 {
        let mut r = rng(7, d);
        let n = r.gen_range(1..=40);
        let ds = common::arbitrary(&mut r, n, -5.0, 5.0, 2.0);
        let pb = pbox_from_intervals(&ds).unwrap();
        let band = band_of(&pb, n, alpha(0.025)).unwrap();
        let ok = (0..=4000).map(|i| -8.0 + 16.0 * i as f64 / 4000.0).chain(ds.lows()).chain(ds.highs()).all(|x| {
            let (bl, fl, fu, bu) = (band.lower.eval(x), pb.lower.eval(x), pb.upper.eval(x), band.upper.eval(x));
            bl <= fl && fl <= fu && fu <= bu
        });
        if !ok {
            failures.push(format!("band ordering, dataset {d}"));
        }
    }

    // Degenerate intervals reproduce the point-data confidence intervals.
    for d in 0..200u64 {
        let mut r = rng(8, d);
        let n = r.gen_range(2..=30);
        let xs: Vec<f64> = (0..n).map(|_| r.gen_range(0.01..10.0)).collect();
        let ds = IntervalDataset::from_points(&xs, Label::default()).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);

        let t = point_t_interval(&xs, alpha(0.05)).unwrap();
        let h = outer_ci(&ds, alpha(0.05)).unwrap().hull();
        let sum: f64 = xs.iter().sum();
        let chi = |p: f64| chi_square_quantile(2 * n as u32, p).unwrap() / (2.0 * sum);
        let he = exp_ci_interval(&ds, alpha(0.05)).unwrap().hull();
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let hu = unif_ci_interval(&ds, alpha(0.05)).unwrap().hull();
        let ok = close(h.lo(), t.0)
            && close(h.hi(), t.1)
            && close(he.lo(), chi(0.025))
            && close(he.hi(), chi(0.975))
            && close(hu.lo(), max / 0.975f64.powf(1.0 / n as f64))
            && close(hu.hi(), max / 0.025f64.powf(1.0 / n as f64));
        if !ok {
            failures.push(format!("degenerate reduction, dataset {d}"));
        }
    }

    match failures.first() {
        None => Ok("mle enclosure (200 x 2^N), band ordering (200), degenerate CIs (200)".into()),
        Some(_) => Err(format!("{} failures, first: {}", failures.len(), failures[0])),
    }
}

fn coverage() -> Outcome {
    let src = SourceDistribution::Normal { mu: 3.0, sigma: 1.5 };
    let mut band_hits = 0;
    for i in 0..2000u64 {
        let xs = sample(&src, 30, SeedStream::new(70, i)).unwrap();
        let ds = IntervalDataset::from_points(&xs, Label::default()).unwrap();
        let band = band_of(&pbox_from_intervals(&ds).unwrap(), 30, Alpha::ks_for_confidence(0.95).unwrap()).unwrap();
        band_hits += band.encloses_cdf(|x| src.cdf(x)) as usize;
    }
    let band_pct = 100.0 * band_hits as f64 / 2000.0;

    let lambda = 0.8;
    let exp = SourceDistribution::Exponential { lambda };
    let mut ci_hits = 0;
    for i in 0..5000u64 {
        let xs = sample(&exp, 30, SeedStream::new(71, i)).unwrap();
        let ds = IntervalDataset::from_points(&xs, Label::default()).unwrap();
        ci_hits += exp_ci_interval(&ds, alpha(0.05)).unwrap().hull().contains(lambda) as usize;
    }
    let ci_pct = 100.0 * ci_hits as f64 / 5000.0;
    check(
        band_pct >= 93.5 && (ci_pct - 95.0).abs() <= 1.5,
        format!("K-S band {band_pct:.2}% (want >= 93.5), rate CI {ci_pct:.2}% (want 95 +- 1.5)"),
    )
}

fn degenerate_reductions() -> Outcome {
    let mut r = rng(9, 0);
    let xs: Vec<f64> = (0..50).map(|_| r.gen_range(0.1..4.0)).collect();

    let narrow = intervalize_central(&xs, 0.5e-6).unwrap();
    let fit = exp_mle_traditional(&narrow).map_err(|e| e.to_string())?.estimate.lo();
    let inv_mean = xs.len() as f64 / xs.iter().sum::<f64>();
    let mle_ok = (fit - inv_mean).abs() <= 1e-4;

    let ds = IntervalDataset::from_points(&xs, Label::default()).unwrap();
    let h = outer_ci(&ds, alpha(0.05)).unwrap().hull();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let s = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let half = student_t_quantile(xs.len() as u32 - 1, 0.975).unwrap() * s / n.sqrt();
    let ci_err = (h.lo() - (mean - half)).abs().max((h.hi() - (mean + half)).abs());
    let (tl, tu) = t_limits(&xs, 0.05);
    let ci_ok = ci_err <= 1e-12 && (h.lo() - tl).abs() <= 1e-12 && (h.hi() - tu).abs() <= 1e-12;

    let sys = intervalize_systematic(&xs, 0.3, 0.0).unwrap();
    let cen = intervalize_central(&xs, 0.3).unwrap();
    let bit_ok =
        sys.iter().zip(&cen).all(|(a, b)| a.lo().to_bits() == b.lo().to_bits() && a.hi().to_bits() == b.hi().to_bits())
            && sys.len() == cen.len();

    check(
        mle_ok && ci_ok && bit_ok,
        format!(
            "narrow-interval MLE {fit:.8} vs 1/mean {inv_mean:.8}; point CI error {ci_err:.2e}; systematic(C=0) == central: {bit_ok}"
        ),
    )
}

fn monotone_trend() -> Outcome {
    let grid: Vec<f64> = (1..=15).map(f64::from).collect();
    let mixture = SourceDistribution::NormalMixture { mu1: 0.0, sigma1: 1.0, n1: 10, mu2: 8.0, sigma2: 3.0, n2: 10 };
    let cases = [
        ("K-S normal", normal4(), Metric::KsHorizontalWidth),
        ("K-S mixture", mixture, Metric::KsHorizontalWidth),
        ("MLE-CI uniform", SourceDistribution::Uniform { a: 0.0, b: 10.0 }, Metric::MleCiWidth(Family::Uniform)),
        (
            "MLE-CI exponential",
            SourceDistribution::Exponential { lambda: 0.1 },
            Metric::MleCiWidth(Family::Exponential),
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, src, metric)) in cases.into_iter().enumerate() {
        let sc = Scenario { replications: 2000, master_seed: 900 + i as u64, ..Scenario::new(src, 20, 20, metric) };
        let curve = success_curve(&sc, &grid).map_err(|e| e.to_string())?;
        let residual = curve.isotonic_residual();
        let first = curve.points[0].percent;
        ok &= residual <= RESIDUAL_TOL && first >= 95.0;
        parts.push(format!("{name}: f=1 {first:.1}%, residual {residual:.2}"));
    }
    check(ok, format!("20:20, f=1..15, M=2000 (f=1 >= 95%, isotonic residual <= {RESIDUAL_TOL}): {}", parts.join("; ")))
}

/// Largest pointwise departure, in percentage points, from the nonincreasing
/// fit. At M = 2000 one binomial standard error is at most 1.12 points.
const RESIDUAL_TOL: f64 = 4.5;

fn main() {
    let checks: [Check; 9] = [
        ("ks critical value", ks_critical_value),
        ("outer CI success, 10:10", outer_ci_balanced_ten),
        ("outer CI success, 80 skinny", outer_ci_eighty_skinny),
        ("traditional MLE sampling means", traditional_mle_means),
        ("sweep equals exhaustive hull", sweep_matches_exhaustive),
        ("enclosure properties", enclosure_properties),
        ("coverage", coverage),
        ("degenerate reductions", degenerate_reductions),
        ("monotone success trend", monotone_trend),
    ];
    let mut failed = 0;
    for (i, (name, run)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
