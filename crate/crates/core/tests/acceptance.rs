//! Acceptance criteria. Runs without the libtest harness so that the
//! `ACCEPTANCE <id> PASS|FAIL ...` lines always reach stdout; a criterion
//! that panics before reporting is printed as FAIL.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::sync::Mutex;
use std::time::Instant;

use sinr_core::distribution::{fit_comparison, regularized_gamma_limit_scan, scaling_limit, to_db};
use sinr_core::psi::{psi_piecewise, psi_polynomial, psi_power_law, psi_quadrature};
use sinr_core::simulator::{self, ks_critical_value, run_campaign, run_trials, FarField};
use sinr_core::*;

static REPORTED: Mutex<Option<HashSet<String>>> = Mutex::new(None);

fn report(id: &str, pass: bool, start: Instant, detail: String) {
    REPORTED.lock().unwrap().get_or_insert_with(HashSet::new).insert(id.to_owned());
    println!(
        "ACCEPTANCE {id} {} ({:.2}s) {detail}",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn seg(rho: f64, eps: f64, outer: f64) -> PowerLawSegmentF64 {
    PowerLawSegment { rho, eps, outer_radius: outer }
}

fn criterion_1_closed_forms_match_quadrature() {
    let start = Instant::now();
    let spec = QuadratureSpec::default().with_rel_tol(1e-11).unwrap();
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let mut worst: f64 = 0.0;
    let mut sets = [0usize; 3];

    for (rho, eps, alpha, rt) in [(1.0003e-3, 0.0, 4.0, 5.0), (0.023, -0.5, 4.0, 10.0), (0.3, -1.7, 3.0, 20.0), (0.01, 0.8, 3.5, 10.0)] {
        let m = IntensityModelF64::power_law(rho, eps).unwrap();
        for g in log_grid(1e-2, 1e6, 17) {
            let gamma = g * f64::powf(rt, alpha);
            worst = worst.max(rel(psi_power_law(rho, eps, alpha, gamma).unwrap(), psi_quadrature(&m, alpha, gamma, &spec).unwrap()));
        }
        sets[0] += 1;
    }
    for (coeffs, r0, rho0, eps, alpha, rt) in [
        (vec![1e-3, 1e-6], 300.0, 0.5, -1.5, 3.0, 20.0),
        (vec![0.0], 50.0, 0.02, -1.2, 4.0, 10.0),
        (vec![2e-2, -1e-4, 2e-7, 1e-9], 200.0, 0.1, -1.9, 3.5, 5.0),
    ] {
        let m = IntensityModelF64::polynomial_with_tail(coeffs.clone(), r0, rho0, eps).unwrap();
        for g in log_grid(1e-2, 1e6, 17) {
            let gamma = g * f64::powf(rt, alpha);
            let c = psi_polynomial(&coeffs, r0, rho0, eps, alpha, gamma).unwrap();
            worst = worst.max(rel(c, psi_quadrature(&m, alpha, gamma, &spec).unwrap()));
        }
        sets[1] += 1;
    }
    for (segs, alpha, rt) in [
        (vec![seg(0.05, -0.5, 100.0), seg(0.2, 0.3, 400.0), seg(3.0, -2.0, 900.0)], 4.0, 10.0),
        (vec![seg(0.01, 0.0, 50.0), seg(1.0, -1.5, 300.0), seg(50.0, -2.5, f64::INFINITY)], 3.0, 20.0),
        (vec![seg(0.3, -1.0, 30.0), seg(1e-3, 1.2, 60.0), seg(2e3, -3.0, f64::INFINITY)], 3.0, 5.0),
    ] {
        let m = IntensityModelF64::piecewise_power_law(segs.clone()).unwrap();
        for g in log_grid(1e-2, 1e6, 17) {
            let gamma = g * f64::powf(rt, alpha);
            worst = worst.max(rel(psi_piecewise(&segs, alpha, gamma).unwrap(), psi_quadrature(&m, alpha, gamma, &spec).unwrap()));
        }
        sets[2] += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst < 1e-7 && sets.iter().all(|&s| s >= 3) && secs < 10.0;
    report("1", pass, start, format!("max relative gap {worst:.2e} over {sets:?} parameter sets"));
    assert!(pass);
}

fn criterion_2_double_sum_identity() {
    let start = Instant::now();
    let models = [
        (IntensityModelF64::power_law(0.023, -0.5).unwrap(), LinkConfigF64::new(4.0, 1e-12, 10.0, 1).unwrap()),
        (IntensityModelF64::power_law(1.0003e-3, 0.0).unwrap(), LinkConfigF64::new(4.0, 1e-12, 5.0, 1).unwrap()),
        (IntensityModelF64::gaussian_cluster(0.254, 500.0).unwrap(), LinkConfigF64::new(3.0, 1e-14, 20.0, 1).unwrap()),
        (
            IntensityModelF64::polynomial_with_tail(vec![1e-3, 1e-6], 300.0, 0.5, -1.5).unwrap(),
            LinkConfigF64::new(3.0, 1e-10, 20.0, 1).unwrap(),
        ),
    ];
    let mut worst: f64 = 0.0;
    for (m, link) in models {
        for l in [1, 2, 4, 10, 20] {
            let d = SinrDistributionF64::from_model(m.clone(), link.with_antennas(l).unwrap()).unwrap();
            let k = link.gamma_scale();
            for g in log_grid(1e-3 * k, 1e4 * k, 30) {
                worst = worst.max((d.cdf_gamma(g).unwrap() - d.cdf_gamma_double_sum(g).unwrap()).abs());
            }
        }
    }
    let pass = worst < 1e-10 && start.elapsed().as_secs_f64() < 5.0;
    report("2", pass, start, format!("max |F - F_double_sum| = {worst:.2e}"));
    assert!(pass);
}

fn campaign_against_analytic(id: &str, model: IntensityModelF64, link: LinkConfigF64, seed: u64) {
    let start = Instant::now();
    let trials = 20_000;
    let sim = SimConfigF64::with_auto_radius(trials, seed, link, model.clone(), FarField::Ignore).unwrap();
    let emp = run_campaign(&sim).unwrap();
    let analytic = SinrDistributionF64::from_model(model.clone(), link).unwrap();
    let ks = emp.ks_distance(|x| analytic.cdf_sinr(x)).unwrap();
    let mu = model.mean_count(&DiskRegion::new(sim.truncation_radius).unwrap()).unwrap();
    let pass = ks < 0.015;
    report(
        id,
        pass,
        start,
        format!(
            "KS {ks:.4} (threshold 0.015, 1% critical {:.4}) trials {trials} R_sim {:.1} mean interferers {mu:.0}",
            ks_critical_value(trials, 1.63),
            sim.truncation_radius
        ),
    );
    assert!(pass);
}

fn criterion_3_gaussian_cluster_campaign() {
    let model = IntensityModelF64::gaussian_cluster_with_mean(1000.0, 500.0).unwrap();
    campaign_against_analytic("3", model, LinkConfigF64::new(3.0, 1e-14, 20.0, 10).unwrap(), 2024);
}

fn criterion_4_power_law_campaign() {
    let model = IntensityModelF64::power_law(0.023, -0.5).unwrap();
    campaign_against_analytic("4", model, LinkConfigF64::new(4.0, 1e-12, 10.0, 10).unwrap(), 2025);
}

fn criterion_5_outage_claims() {
    let start = Instant::now();
    let outage = |eps: f64, l: u32| {
        let rho = 3142.0 * (2.0 + eps) / (2.0 * PI * 1000f64.powf(2.0 + eps));
        let d = SinrDistributionF64::from_model(
            IntensityModelF64::power_law(rho, eps).unwrap(),
            LinkConfigF64::new(4.0, 1e-12, 5.0, l).unwrap(),
        )
        .unwrap();
        d.outage_probability(10.0, 5.0).unwrap()
    };
    let homogeneous = outage(0.0, 4);
    let clustered = outage(-0.5, 4);
    let clustered_12 = outage(-0.5, 12);
    let ratio = clustered_12 / homogeneous;
    let pass = (1e-4..=1e-3).contains(&homogeneous)
        && clustered > 0.1
        && (0.1..=10.0).contains(&ratio)
        && start.elapsed().as_secs_f64() < 1.0;
    report(
        "5",
        pass,
        start,
        format!("outage(0,4) {homogeneous:.3e}, outage(-0.5,4) {clustered:.4}, outage(-0.5,12) {clustered_12:.3e}"),
    );
    assert!(pass);
}

fn criterion_6_antenna_scaling() {
    let start = Instant::now();
    let q = 0.0254;
    let (alpha, sigma2, r_t) = (3.0, 1e-14, 20.0);
    let nominal = IntensityModelF64::gaussian_cluster(1.0, 500.0).unwrap();
    let limit = scaling_limit(&nominal, q, alpha, r_t, &QuadratureSpec::default()).unwrap();
    let mut widths = Vec::new();
    let mut median_20 = 0.0;
    for l in [1u32, 5, 10, 20] {
        let beta = q * l as f64;
        let model = nominal.clone().with_beta(beta).unwrap();
        let d = SinrDistributionF64::from_model(model, LinkConfigF64::new(alpha, sigma2, r_t, l).unwrap()).unwrap();
        let k = d.link().gamma_scale();
        let lo = to_db(d.quantile_gamma(0.1).unwrap() / k);
        let hi = to_db(d.quantile_gamma(0.9).unwrap() / k);
        widths.push(hi - lo);
        if l == 20 {
            median_20 = d.quantile_gamma(0.5).unwrap() / k;
        }
    }
    let gap_db = (to_db(median_20) - to_db(limit.sinr)).abs();
    let decreasing = widths.windows(2).all(|w| w[1] < w[0]);
    let pass = decreasing && gap_db < 1.0 && start.elapsed().as_secs_f64() < 60.0;
    report(
        "6",
        pass,
        start,
        format!("10-90% widths dB {widths:.3?}, median(L=20) vs limit gap {gap_db:.3} dB, q = {q}"),
    );
    assert!(pass);
}

fn criterion_7_gamma_limits() {
    let start = Instant::now();
    let ls = [10, 100, 1000];
    let below = regularized_gamma_limit_scan(0.8, &ls).unwrap();
    let above = regularized_gamma_limit_scan(1.2, &ls).unwrap();
    let pass = below[2] >= 0.99
        && above[2] <= 0.01
        && below.windows(2).all(|w| w[1] > w[0])
        && above.windows(2).all(|w| w[1] < w[0])
        && start.elapsed().as_secs_f64() < 1.0;
    report("7", pass, start, format!("Q(L,0.8L) [{}], Q(L,1.2L) [{}]", sci(&below), sci(&above)));
    assert!(pass);
}

fn criterion_8_polynomial_convergence() {
    let start = Instant::now();
    let model = IntensityModelF64::gaussian_cluster_with_mean(1000.0, 500.0).unwrap();
    let link = LinkConfigF64::new(3.0, 1e-14, 20.0, 10).unwrap();
    let k = link.gamma_scale();
    let grid = log_grid(1e-2 * k, 1e3 * k, 96);
    let spec = QuadratureSpec::default().with_rel_tol(1e-11).unwrap();
    let errors: Vec<f64> = [2, 4, 8, 12]
        .iter()
        .map(|&m| fit_comparison(&model, 1500.0, m, -1.5, &link, &grid, &spec).unwrap().sup_error)
        .collect();
    let pass = errors.windows(2).all(|w| w[1] < w[0]) && errors[3] < 1e-3 && start.elapsed().as_secs_f64() < 30.0;
    report("8", pass, start, format!("sup CDF error for m = 2,4,8,12: [{}]", sci(&errors)));
    assert!(pass);
}

fn criterion_9_property_suites() {
    let start = Instant::now();
    let mut failures: Vec<&str> = Vec::new();
    let families: Vec<(IntensityModelF64, LinkConfigF64)> = vec![
        (IntensityModelF64::power_law(0.023, -0.5).unwrap(), LinkConfigF64::new(4.0, 1e-12, 10.0, 4).unwrap()),
        (
            IntensityModelF64::piecewise_power_law(vec![seg(0.05, -0.5, 100.0), seg(0.002, 0.0, 400.0), seg(50.0, -2.5, f64::INFINITY)])
                .unwrap(),
            LinkConfigF64::new(3.5, 1e-12, 10.0, 4).unwrap(),
        ),
        (
            IntensityModelF64::polynomial_with_tail(vec![1e-3, 1e-6], 300.0, 0.5, -1.5).unwrap(),
            LinkConfigF64::new(3.0, 1e-12, 20.0, 4).unwrap(),
        ),
        (IntensityModelF64::gaussian_cluster(0.254, 500.0).unwrap(), LinkConfigF64::new(3.0, 1e-14, 20.0, 4).unwrap()),
    ];
    for (m, link) in &families {
        let d = SinrDistributionF64::from_model(m.clone(), *link).unwrap();
        let k = link.gamma_scale();
        let grid = log_grid(1e-3 * k, 1e4 * k, 64);
        // ψ
        if d.psi().psi(0.0).unwrap() != 0.0 {
            failures.push("psi(0) != 0");
        }
        let psis: Vec<f64> = grid.iter().map(|&g| d.psi().psi(g).unwrap()).collect();
        if !psis.windows(2).all(|w| w[1] > w[0]) || psis[0] <= 0.0 {
            failures.push("psi not strictly increasing");
        }
        // CDF in γ, L, β
        let f = d.cdf_grid(&grid).unwrap();
        if d.cdf_gamma(0.0).unwrap() != 0.0 || !f.windows(2).all(|w| w[1] >= w[0]) {
            failures.push("cdf not monotone in gamma");
        }
        for &g in grid.iter().step_by(8) {
            let by_l: Vec<f64> = (1..=12).map(|l| d.with_antennas(l).unwrap().cdf_gamma(g).unwrap()).collect();
            if !by_l.windows(2).all(|w| w[1] <= w[0]) {
                failures.push("cdf increases with L");
            }
            let by_beta: Vec<f64> = [0.5, 1.0, 2.0, 10.0].iter().map(|&b| d.with_beta(b).unwrap().cdf_gamma(g).unwrap()).collect();
            if !by_beta.windows(2).all(|w| w[1] >= w[0]) {
                failures.push("cdf decreases with beta");
            }
        }
        // pdf against a central difference of the CDF, step 1e-4·γ
        for &g in &grid {
            let (lo, hi) = d.cdf_pair(g).unwrap();
            if !(1e-8..1.0 - 1e-8).contains(&lo) {
                continue;
            }
            let h = 1e-4 * g;
            let fd = if lo < 0.5 {
                (d.cdf_gamma(g + h).unwrap() - d.cdf_gamma(g - h).unwrap()) / (2.0 * h)
            } else {
                (d.ccdf_gamma(g - h).unwrap() - d.ccdf_gamma(g + h).unwrap()) / (2.0 * h)
            };
            let p = d.pdf_gamma(g).unwrap();
            if (p - fd).abs() > 1e-5 * p {
                failures.push("pdf disagrees with cdf difference");
            }
            let _ = hi;
        }
    }
    // MMSE oracles
    let link = LinkConfigF64::new(3.0, 0.2, 1.7, 2).unwrap();
    let mut rng = simulator::trial_rng(99, 0);
    for _ in 0..50 {
        let ch = simulator::draw_channels::<f64, _>(1, 2, &mut rng);
        let r1: f64 = 2.3;
        let p = r1.powf(-3.0);
        let s = simulator::mmse_sinr(&[r1], &ch, &link).unwrap();
        let g1 = ch.interferer(0);
        let gt2: f64 = ch.target.iter().map(|z| z.norm_sqr()).sum();
        let g12: f64 = g1.iter().map(|z| z.norm_sqr()).sum();
        let cross: num_complex::Complex<f64> = ch.target.iter().zip(g1).map(|(a, b)| a.conj() * b).sum();
        let expected = (gt2 - p * cross.norm_sqr() / (0.2 + p * g12)) / 0.2 / 1.7f64.powf(3.0);
        if (s - expected).abs() > 1e-10 * expected {
            failures.push("Sherman-Morrison oracle");
        }
        let ch1 = simulator::draw_channels::<f64, _>(1, 1, &mut rng);
        let s1 = simulator::mmse_sinr(&[r1], &ch1, &link.with_antennas(1).unwrap()).unwrap();
        let e1 = ch1.target[0].norm_sqr() / 1.7f64.powf(3.0) / (0.2 + p * ch1.interferers[0].norm_sqr());
        if (s1 - e1).abs() > 1e-10 * e1 {
            failures.push("scalar oracle");
        }
    }
    // campaign determinism across thread counts
    let sim = SimConfigF64::with_auto_radius(
        500,
        17,
        LinkConfigF64::new(3.0, 1e-14, 20.0, 10).unwrap(),
        IntensityModelF64::gaussian_cluster(0.254, 500.0).unwrap(),
        FarField::Ignore,
    )
    .unwrap();
    let bits = |threads: usize| -> Vec<u64> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_trials(&sim).unwrap().iter().map(|t| t.sinr.to_bits()).collect())
    };
    if bits(1) != bits(3) {
        failures.push("campaign differs across thread counts");
    }
    failures.dedup();
    let pass = failures.is_empty();
    report("9", pass, start, if pass { "all property checks hold".into() } else { format!("violations: {failures:?}") });
    assert!(pass, "{failures:?}");
}

fn main() {
    let criteria: [(&str, fn()); 9] = [
        ("1", criterion_1_closed_forms_match_quadrature),
        ("2", criterion_2_double_sum_identity),
        ("3", criterion_3_gaussian_cluster_campaign),
        ("4", criterion_4_power_law_campaign),
        ("5", criterion_5_outage_claims),
        ("6", criterion_6_antenna_scaling),
        ("7", criterion_7_gamma_limits),
        ("8", criterion_8_polynomial_convergence),
        ("9", criterion_9_property_suites),
    ];
    let mut failed = 0;
    for (id, f) in criteria {
        if std::panic::catch_unwind(f).is_err() {
            failed += 1;
            let seen = REPORTED.lock().unwrap().as_ref().is_some_and(|r| r.contains(id));
            if !seen {
                println!("ACCEPTANCE {id} FAIL panicked before reporting");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
