use gaussian_page::ensembles::sample_gaussian_state;
use gaussian_page::formulas::{gaussian_average_exact, page_average_exact};
use gaussian_page::gstates::restrict;
use gaussian_page::rmt::{variance_finite_n, DEFAULT_TAIL_TOL};
use gaussian_page::stats::{ks_critical_one_sample, ks_statistic_cdf, mc_collect_many, mc_estimate};
use gaussian_page::{JacobiKernelCtx, SystemSplit};
use rand::Rng;

const WORKERS: usize = 2;

#[test]
fn restricted_spectra_follow_level_density() {
    let split = SystemSplit::new(8, 2).unwrap();
    let ctx = JacobiKernelCtx::for_split(8, 2).unwrap();
    // One uniformly chosen value per draw is an exact sample of ρ.
    let xs = mc_collect_many(
        |r| {
            let x = restrict(&sample_gaussian_state(8, r)?, split)?;
            let pick = r.random_range(0..x.len());
            Ok(vec![x.values()[pick]])
        },
        100_000,
        21,
        WORKERS,
    )
    .unwrap();
    let d = ks_statistic_cdf(&xs, |t| ctx.level_density_cdf(t)).unwrap();
    assert!(d < ks_critical_one_sample(0.01, xs.len()), "D = {d}");
}

#[test]
fn joint_density_integrates_to_one_by_monte_carlo() {
    let ctx = JacobiKernelCtx::new(2, 1).unwrap();
    let est = mc_estimate(|r| ctx.correlation_k(&[r.random::<f64>(), r.random::<f64>()]), 200_000, 22, WORKERS).unwrap();
    assert!(est.mean_z_score(1.0).abs() < 3.0, "{est:?}");
}

#[test]
fn quadrature_matches_closed_form_on_small_grid() {
    for n in 2..=16 {
        for n_a in 1..=n / 2 {
            let q = JacobiKernelCtx::for_split(n, n_a).unwrap().average_entropy_quadrature().unwrap();
            let exact = gaussian_average_exact(n, n_a).unwrap();
            assert!((q - exact).abs() <= 1e-8, "({n}, {n_a}): {q} vs {exact}");
        }
    }
}

#[test]
fn sampled_means_match_closed_forms() {
    let split = SystemSplit::new(10, 3).unwrap();
    let g = mc_estimate(
        |r| gaussian_page::gstates::subsystem_entropy(&sample_gaussian_state(10, r)?, split),
        20_000,
        23,
        WORKERS,
    )
    .unwrap();
    assert!(g.mean_z_score(gaussian_average_exact(10, 3).unwrap()).abs() < 3.0, "{g:?}");
    let p = mc_estimate(
        |r| gaussian_page::ensembles::Ensemble::HaarPure.sample_entropy(split, r),
        5_000,
        24,
        WORKERS,
    )
    .unwrap();
    assert!(p.mean_z_score(page_average_exact(10, 3).unwrap()).abs() < 3.0, "{p:?}");
}

#[test]
fn variance_sum_matches_sampled_variance() {
    let split = SystemSplit::new(6, 3).unwrap();
    let v = variance_finite_n(&JacobiKernelCtx::for_split(6, 3).unwrap(), DEFAULT_TAIL_TOL).unwrap();
    let est = mc_estimate(
        |r| gaussian_page::gstates::subsystem_entropy(&sample_gaussian_state(6, r)?, split),
        100_000,
        25,
        WORKERS,
    )
    .unwrap();
    assert!(est.variance_z_score(v).abs() < 3.0, "{v} vs {est:?}");
}
