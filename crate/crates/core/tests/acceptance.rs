//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on
//! any failure. Runs without the libtest harness so the lines always print.

use std::f64::consts::LN_2;
use std::time::{Duration, Instant};

use gaussian_page::ensembles::{sample_gaussian_state, sample_number_conserving_eigenstate, Ensemble};
use gaussian_page::formulas::{gaussian_average_exact, gaussian_thermo, gaussian_variance_limit, page_average_exact};
use gaussian_page::gstates::restrict;
use gaussian_page::rmt::{variance_finite_n, DEFAULT_TAIL_TOL};
use gaussian_page::stats::{ks_critical_one_sample, ks_critical_two_sample, ks_statistic, ks_statistic_cdf, mc_collect, mc_collect_many, mc_estimate};
use gaussian_page::{JacobiKernelCtx, Result, SystemSplit};
use rand::Rng;

const ALPHA: f64 = 0.01;

struct Outcome {
    pass: bool,
    detail: String,
}

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn split(n: usize, n_a: usize) -> SystemSplit {
    SystemSplit::new(n, n_a).expect("valid split")
}

fn exact_anchors() -> Result<Outcome> {
    let g = gaussian_average_exact(2, 1)?;
    let p = page_average_exact(2, 1)?;
    Ok(Outcome {
        pass: (g - 0.5).abs() <= 1e-12 && (p - 1.0 / 3.0).abs() <= 1e-12,
        detail: format!("G(2,1) = {g:.16}, Page(2,1) = {p:.16}"),
    })
}

fn quadrature_equivalence() -> Result<Outcome> {
    let mut worst: (f64, usize, usize) = (0.0, 0, 0);
    for n in 2..=40 {
        for n_a in 1..=n / 2 {
            let q = JacobiKernelCtx::for_split(n, n_a)?.average_entropy_quadrature()?;
            let err = (q - gaussian_average_exact(n, n_a)?).abs();
            if err > worst.0 {
                worst = (err, n, n_a);
            }
        }
    }
    Ok(Outcome { pass: worst.0 <= 1e-8, detail: format!("max error {:.2e} at ({}, {})", worst.0, worst.1, worst.2) })
}

fn gaussian_sampler(n: usize, n_a: usize, samples: usize, seed: u64) -> Result<(gaussian_page::MCEstimate, Vec<f64>)> {
    let s = split(n, n_a);
    mc_collect(|r| Ensemble::Gaussian.sample_entropy(s, r), samples, seed, workers())
}

fn sampler_equivalence() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, (n, n_a)) in [(4, 2), (8, 4), (16, 8)].into_iter().enumerate() {
        let (est, _) = gaussian_sampler(n, n_a, 100_000, 300 + k as u64)?;
        let z = est.mean_z_score(gaussian_average_exact(n, n_a)?);
        pass &= z < 3.0;
        parts.push(format!("({n},{n_a}) z = {z:.2}"));
    }
    Ok(Outcome { pass, detail: parts.join(", ") })
}

fn hamiltonian_equivalence() -> Result<Outcome> {
    let s = split(8, 4);
    let (eig, eig_samples) = mc_collect(|r| Ensemble::Hamiltonian.sample_entropy(s, r), 100_000, 400, workers())?;
    let (_, haar_samples) = gaussian_sampler(8, 4, 100_000, 401)?;
    let z = eig.mean_z_score(gaussian_average_exact(8, 4)?);
    let d = ks_statistic(&eig_samples, &haar_samples)?;
    let crit = ks_critical_two_sample(ALPHA, eig_samples.len(), haar_samples.len());
    Ok(Outcome { pass: z < 3.0 && d < crit, detail: format!("z = {z:.2}, KS D = {d:.5} (critical {crit:.5})") })
}

fn variance_chain() -> Result<Outcome> {
    let v84 = variance_finite_n(&JacobiKernelCtx::for_split(8, 4)?, DEFAULT_TAIL_TOL)?;
    let (mc, _) = gaussian_sampler(8, 4, 1_000_000, 500)?;
    let z = mc.variance_z_score(v84);
    let limit = gaussian_variance_limit(0.5)?;
    let seq = [32, 64, 128, 256]
        .into_iter()
        .map(|n| variance_finite_n(&JacobiKernelCtx::for_split(n, n / 2)?, DEFAULT_TAIL_TOL))
        .collect::<Result<Vec<f64>>>()?;
    let gaps: Vec<f64> = seq.iter().map(|v| (v - limit).abs()).collect();
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    let final_gap = gaps[gaps.len() - 1] / limit;
    Ok(Outcome {
        pass: z < 3.0 && monotone && final_gap < 0.03,
        detail: format!(
            "(8,4): sum {v84:.6} vs MC {:.6}, z = {z:.2}; f=1/2 sequence {seq:.6?} -> {limit:.8}, final gap {:.3}%",
            mc.variance,
            100.0 * final_gap
        ),
    })
}

fn page_side() -> Result<Outcome> {
    let s = split(10, 5);
    let est = mc_estimate(|r| Ensemble::HaarPure.sample_entropy(s, r), 10_000, 600, workers())?;
    let z = est.mean_z_score(page_average_exact(10, 5)?);
    Ok(Outcome { pass: z < 3.0, detail: format!("mean {:.6}, z = {z:.2}", est.mean) })
}

fn thermodynamic_scaling() -> Result<Outcome> {
    let gap = |n: usize| -> Result<f64> { Ok(gaussian_average_exact(n, n / 2)? - gaussian_thermo(n, 0.5)?) };
    let (g100, g200) = (gap(100)?, gap(200)?);
    let ratio = g100 / g200;
    Ok(Outcome {
        pass: g100 > 0.0 && g200 > 0.0 && (1.6..=2.4).contains(&ratio),
        detail: format!("gap(100) = {g100:.3e}, gap(200) = {g200:.3e}, ratio {ratio:.4}"),
    })
}

fn number_conserving_limit() -> Result<Outcome> {
    let est = mc_estimate(|r| sample_number_conserving_eigenstate(400, 200, r), 200, 800, workers())?;
    let per_mode = est.mean / 400.0;
    Ok(Outcome {
        pass: (per_mode - 0.19315).abs() <= 0.005,
        detail: format!("<S_A>/N = {per_mode:.5} (log 2 - 1/2 = {:.5})", LN_2 - 0.5),
    })
}

fn kernel_suite() -> Result<Outcome> {
    let mut worst_orth: f64 = 0.0;
    let mut worst_repro: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    let mut rng = gaussian_page::RngStream::new(900, 0).rng();
    for (n_a, delta) in [(1, 0), (2, 1), (5, 5), (20, 20)] {
        let ctx = JacobiKernelCtx::new(n_a, delta)?;
        worst_orth = worst_orth.max(ctx.orthonormality_defect());
        let q = ctx.quadrature();
        worst_norm = worst_norm.max((q.integrate(|x| ctx.level_density(x)) - 1.0).abs());
        for _ in 0..5 {
            let (x, y): (f64, f64) = (rng.random(), rng.random());
            let lhs = q.integrate(|z| ctx.kernel(x, z) * ctx.kernel(z, y));
            worst_repro = worst_repro.max((lhs - ctx.kernel(x, y)).abs());
        }
    }
    let s = split(8, 2);
    let ctx = JacobiKernelCtx::for_split(8, 2)?;
    let xs = mc_collect_many(
        |r| {
            let x = restrict(&sample_gaussian_state(8, r)?, s)?;
            let pick = r.random_range(0..x.len());
            Ok(vec![x.values()[pick]])
        },
        100_000,
        901,
        workers(),
    )?;
    let d = ks_statistic_cdf(&xs, |t| ctx.level_density_cdf(t))?;
    let crit = ks_critical_one_sample(ALPHA, xs.len());
    Ok(Outcome {
        pass: worst_orth <= 1e-8 && worst_repro <= 1e-8 && worst_norm <= 1e-9 && d < crit,
        detail: format!(
            "orthonormality {worst_orth:.1e}, reproducing {worst_repro:.1e}, normalization {worst_norm:.1e}, KS D = {d:.5} (critical {crit:.5})"
        ),
    })
}

fn histogram_comparison() -> Result<Outcome> {
    let (g, _) = gaussian_sampler(10, 5, 100_000, 1000)?;
    let s = split(10, 5);
    let (pure, _) = mc_collect(|r| Ensemble::HaarPure.sample_entropy(s, r), 10_000, 1001, workers())?;
    let z = g.mean_z_score(gaussian_average_exact(10, 5)?);
    let predicted = variance_finite_n(&JacobiKernelCtx::for_split(10, 5)?, DEFAULT_TAIL_TOL)?.sqrt();
    let rel = (g.std_dev() - predicted).abs() / predicted;
    let narrowing = g.std_dev() / pure.std_dev();
    Ok(Outcome {
        pass: z < 3.0 && rel < 0.10 && narrowing >= 3.0,
        detail: format!(
            "mean z = {z:.2}, std {:.5} vs {predicted:.5} ({:.2}% off), Gaussian/haar-pure std ratio {narrowing:.2}",
            g.std_dev(),
            100.0 * rel
        ),
    })
}

fn main() {
    type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);
    let criteria: [Criterion; 10] = [
        ("exact anchors", Duration::from_millis(1), exact_anchors),
        ("formula-quadrature equivalence", Duration::from_secs(30), quadrature_equivalence),
        ("sampler-formula equivalence", Duration::from_secs(120), sampler_equivalence),
        ("Hamiltonian-eigenstate equivalence", Duration::from_secs(180), hamiltonian_equivalence),
        ("variance chain", Duration::from_secs(300), variance_chain),
        ("Page-side validation", Duration::from_secs(60), page_side),
        ("thermodynamic scaling", Duration::from_secs(1), thermodynamic_scaling),
        ("number-conserving limit", Duration::from_secs(120), number_conserving_limit),
        ("kernel property suite", Duration::from_secs(60), kernel_suite),
        ("entropy histogram widths", Duration::from_secs(180), histogram_comparison),
    ];
    let mut failures = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.3} s, budget {} s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
