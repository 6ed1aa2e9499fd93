use gaussian_page::ensembles::{
    eigenstate_structure, sample_gaussian_state, sample_number_conserving_eigenstate, sample_random_hamiltonian,
    sample_scaled_hamiltonian, Ensemble, OccupationPattern,
};
use gaussian_page::gstates::{restrict, subsystem_entropy};
use gaussian_page::linalg::{gaussian_matrix, haar_orthogonal, RngStream};
use gaussian_page::stats::{ks_critical_one_sample, ks_critical_two_sample, ks_statistic, ks_statistic_cdf, mc_collect, mc_collect_many, mc_estimate};
use gaussian_page::SystemSplit;

const ALPHA: f64 = 0.01;
const WORKERS: usize = 2;

fn split(n: usize, n_a: usize) -> SystemSplit {
    SystemSplit::new(n, n_a).unwrap()
}

#[test]
fn haar_orthogonal_is_left_invariant() {
    let q = haar_orthogonal(6, &mut RngStream::new(1, 999).rng()).unwrap();
    let plain = mc_collect(|r| Ok(haar_orthogonal(6, r)?.as_matrix()[(0, 0)]), 10_000, 2, WORKERS).unwrap().1;
    let rotated = mc_collect(
        |r| Ok((q.as_matrix() * haar_orthogonal(6, r)?.as_matrix())[(0, 0)]),
        10_000,
        3,
        WORKERS,
    )
    .unwrap()
    .1;
    let d = ks_statistic(&plain, &rotated).unwrap();
    assert!(d < ks_critical_two_sample(ALPHA, plain.len(), rotated.len()), "D = {d}");
}

#[test]
fn single_mode_restricted_value_is_uniform() {
    let xs = mc_collect_many(|r| Ok(restrict(&sample_gaussian_state(2, r)?, split(2, 1))?.values().to_vec()), 100_000, 4, WORKERS)
        .unwrap();
    assert_eq!(xs.len(), 100_000);
    let d = ks_statistic_cdf(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
    assert!(d < ks_critical_one_sample(ALPHA, xs.len()), "D = {d}");
}

#[test]
fn two_mode_means() {
    let s = split(2, 1);
    let g = mc_estimate(|r| Ensemble::Gaussian.sample_entropy(s, r), 100_000, 5, WORKERS).unwrap();
    assert!(g.mean_z_score(0.5).abs() < 3.0, "{g:?}");
    let ground = mc_estimate(
        |r| {
            let ham = sample_random_hamiltonian(2, r)?;
            subsystem_entropy(&eigenstate_structure(&ham, &OccupationPattern::vacuum(2))?, s)
        },
        100_000,
        6,
        WORKERS,
    )
    .unwrap();
    assert!(ground.mean_z_score(0.5).abs() < 3.0, "{ground:?}");
    let pure = mc_estimate(|r| Ensemble::HaarPure.sample_entropy(s, r), 100_000, 7, WORKERS).unwrap();
    assert!(pure.mean_z_score(1.0 / 3.0).abs() < 3.0, "{pure:?}");
}

#[test]
fn single_particle_energies_match_singular_values() {
    let n = 50;
    let omega = mc_collect_many(|r| Ok(sample_random_hamiltonian(n, r)?.omega().to_vec()), 1_000, 8, WORKERS).unwrap();
    let direct = mc_collect_many(
        |r| {
            let g = gaussian_matrix(2 * n, 2 * n, r);
            let h = (&g - g.transpose()) * 0.5;
            let mut sv: Vec<f64> = h.singular_values().iter().copied().collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            // Singular values of a real antisymmetric matrix come in pairs.
            Ok(sv.into_iter().step_by(2).collect())
        },
        1_000,
        9,
        WORKERS,
    )
    .unwrap();
    let d = ks_statistic(&omega, &direct).unwrap();
    assert!(d < ks_critical_two_sample(ALPHA, omega.len(), direct.len()), "D = {d}");
}

#[test]
fn eigenstates_and_haar_states_share_entropy_distribution() {
    let s = split(6, 3);
    let haar = mc_collect(|r| Ensemble::Gaussian.sample_entropy(s, r), 10_000, 10, WORKERS).unwrap().1;
    let eig = mc_collect(|r| Ensemble::Hamiltonian.sample_entropy(s, r), 10_000, 11, WORKERS).unwrap().1;
    let d = ks_statistic(&haar, &eig).unwrap();
    assert!(d < ks_critical_two_sample(ALPHA, haar.len(), eig.len()), "D = {d}");
}

#[test]
fn eigenstate_entropy_is_scale_invariant() {
    let s = split(6, 3);
    let draw = |scale: f64| {
        move |r: &mut rand_chacha::ChaCha8Rng| {
            let ham = sample_scaled_hamiltonian(6, scale, r)?;
            let occ = OccupationPattern::random(6, r);
            subsystem_entropy(&eigenstate_structure(&ham, &occ)?, s)
        }
    };
    let unit = mc_collect(draw(1.0), 10_000, 12, WORKERS).unwrap().1;
    let scaled = mc_collect(draw(10.0), 10_000, 13, WORKERS).unwrap().1;
    let d = ks_statistic(&unit, &scaled).unwrap();
    assert!(d < ks_critical_two_sample(ALPHA, unit.len(), scaled.len()), "D = {d}");
}

#[test]
fn number_conserving_entropy_is_bounded() {
    let xs = mc_collect(|r| sample_number_conserving_eigenstate(12, 5, r), 2_000, 14, WORKERS).unwrap().1;
    assert!(xs.iter().all(|&s| (0.0..=5.0 * std::f64::consts::LN_2 + 1e-12).contains(&s)));
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let s = split(5, 2);
    let one = mc_estimate(|r| Ensemble::Hamiltonian.sample_entropy(s, r), 5_000, 15, 1).unwrap();
    let three = mc_estimate(|r| Ensemble::Hamiltonian.sample_entropy(s, r), 5_000, 15, 3).unwrap();
    assert_eq!(one.mean.to_bits(), three.mean.to_bits());
    assert_eq!(one.variance.to_bits(), three.variance.to_bits());
}
