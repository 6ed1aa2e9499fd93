//! Monte Carlo harness: streaming moments, reproducible parallel sampling,
//! two-sample Kolmogorov–Smirnov statistics and histograms.
//!
//! Samples are drawn in fixed-size blocks. Block `k` always uses
//! `RngStream { seed, stream: k }` and block results are merged in block
//! order, so an estimate depends only on `(seed, n)`: the worker count
//! changes the wall-clock time, never the bytes.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::linalg::RngStream;

/// Samples per RNG stream.
pub const BLOCK_SIZE: usize = 2048;

/// Running central moments up to fourth order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.merge(&Moments { n: 1, mean: x, m2: 0.0, m3: 0.0, m4: 0.0 });
    }

    /// Combines two disjoint sample sets (Pébay's pairwise update).
    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let d = other.mean - self.mean;
        let d_n = d / n;
        let mean = self.mean + nb * d_n;
        let m2 = self.m2 + other.m2 + d * d_n * na * nb;
        let m3 = self.m3 + other.m3 + d * d_n * d_n * na * nb * (na - nb)
            + 3.0 * d_n * (na * other.m2 - nb * self.m2);
        let m4 = self.m4 + other.m4
            + d * d_n * d_n * d_n * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * d_n * d_n * (na * na * other.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * other.m3 - nb * self.m3);
        *self = Moments { n: self.n + other.n, mean, m2, m3, m4 };
    }

    pub fn from_slice(xs: &[f64]) -> Self {
        let mut m = Moments::default();
        xs.iter().for_each(|&x| m.push(x));
        m
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n as f64 - 1.0)
        }
    }

    /// Biased fourth central moment `m4 / n`.
    pub fn fourth_central(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.m4 / self.n as f64
        }
    }

    /// Standard error of [`Moments::variance`]:
    /// `Var(s²) = μ₄/n − σ⁴ (n−3) / (n (n−1))`.
    pub fn variance_std_error(&self) -> f64 {
        if self.n < 4 {
            return f64::NAN;
        }
        let n = self.n as f64;
        let s2 = self.variance();
        let v = self.fourth_central() / n - s2 * s2 * (n - 3.0) / (n * (n - 1.0));
        v.max(0.0).sqrt()
    }
}

/// Result of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    /// Unbiased (n − 1) sample variance.
    pub variance: f64,
    /// `√(variance / n)`.
    pub std_error: f64,
    /// Standard error of `variance`.
    pub variance_std_error: f64,
    pub n: u64,
    pub seed: u64,
    pub workers: usize,
}

impl MCEstimate {
    pub fn from_moments(m: &Moments, seed: u64, workers: usize) -> Self {
        let variance = m.variance();
        Self {
            mean: m.mean,
            variance,
            std_error: (variance / m.n as f64).sqrt(),
            variance_std_error: m.variance_std_error(),
            n: m.n,
            seed,
            workers,
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// `|mean − target|` in units of the standard error.
    pub fn mean_z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.std_error
    }

    pub fn variance_z_score(&self, target: f64) -> f64 {
        (self.variance - target).abs() / self.variance_std_error
    }
}

fn block_ranges(n: usize) -> Vec<(u64, usize)> {
    (0..n.div_ceil(BLOCK_SIZE))
        .map(|k| (k as u64, BLOCK_SIZE.min(n - k * BLOCK_SIZE)))
        .collect()
}

fn run_blocks<T, G>(n: usize, seed: u64, workers: usize, per_block: G) -> Result<Vec<T>>
where
    T: Send,
    G: Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
{
    let blocks = block_ranges(n);
    let run_one = |&(id, len): &(u64, usize)| per_block(&mut RngStream::new(seed, id).rng(), len);
    if workers <= 1 {
        return blocks.iter().map(run_one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| crate::Error::ResourceLimit(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| blocks.par_iter().map(run_one).collect())
}

/// Mean, variance and standard errors of `n` draws of `sampler`.
pub fn mc_estimate<F>(sampler: F, n: usize, seed: u64, workers: usize) -> Result<MCEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    ensure!(n >= 2, InvalidArgument, "Monte Carlo needs at least two samples, got {n}");
    let parts = run_blocks(n, seed, workers, |rng, len| {
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(sampler(rng)?);
        }
        Ok(m)
    })?;
    let mut total = Moments::default();
    parts.iter().for_each(|m| total.merge(m));
    Ok(MCEstimate::from_moments(&total, seed, workers.max(1)))
}

/// Like [`mc_estimate`], also returning the samples in block order.
pub fn mc_collect<F>(sampler: F, n: usize, seed: u64, workers: usize) -> Result<(MCEstimate, Vec<f64>)>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    ensure!(n >= 2, InvalidArgument, "Monte Carlo needs at least two samples, got {n}");
    let parts = run_blocks(n, seed, workers, |rng, len| {
        (0..len).map(|_| sampler(rng)).collect::<Result<Vec<f64>>>()
    })?;
    let samples: Vec<f64> = parts.into_iter().flatten().collect();
    let mut total = Moments::default();
    for part in samples.chunks(BLOCK_SIZE) {
        total.merge(&Moments::from_slice(part));
    }
    Ok((MCEstimate::from_moments(&total, seed, workers.max(1)), samples))
}

/// Runs a vector-valued sampler (e.g. a whole restricted spectrum per draw)
/// `n` times and concatenates the outputs in block order.
pub fn mc_collect_many<F>(sampler: F, n: usize, seed: u64, workers: usize) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Vec<f64>> + Sync,
{
    ensure!(n >= 1, InvalidArgument, "need at least one draw");
    let parts = run_blocks(n, seed, workers, |rng, len| {
        let mut out = Vec::new();
        for _ in 0..len {
            out.extend(sampler(rng)?);
        }
        Ok(out)
    })?;
    Ok(parts.into_iter().flatten().collect())
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a − F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    ensure!(!a.is_empty() && !b.is_empty(), InvalidArgument, "KS statistic needs two non-empty samples");
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_statistic_cdf<C: Fn(f64) -> f64>(samples: &[f64], cdf: C) -> Result<f64> {
    ensure!(!samples.is_empty(), InvalidArgument, "KS statistic needs a non-empty sample");
    let xs = sorted(samples);
    let n = xs.len() as f64;
    Ok(xs.iter().enumerate().fold(0.0_f64, |d, (k, &x)| {
        let f = cdf(x);
        d.max((k as f64 + 1.0) / n - f).max(f - k as f64 / n)
    }))
}

/// Asymptotic KS coefficient `c(α) = √(−ln(α/2) / 2)`; `c(0.01) ≈ 1.628`.
pub fn ks_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Two-sample critical value `c(α) √((n+m)/(n m))`.
pub fn ks_critical_two_sample(alpha: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ks_coefficient(alpha) * ((n + m) / (n * m)).sqrt()
}

/// One-sample critical value `c(α) / √n`.
pub fn ks_critical_one_sample(alpha: f64, n: usize) -> f64 {
    ks_coefficient(alpha) / (n as f64).sqrt()
}

/// Equal-width histogram. Bins are left-closed, the last bin also takes
/// the right edge; samples outside the range land in the overflow fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
    pub total: u64,
}

impl Histogram {
    /// Counts normalized to a probability density over the in-range samples.
    pub fn density(&self) -> Vec<f64> {
        let inside: u64 = self.counts.iter().sum();
        self.counts
            .iter()
            .zip(self.edges.windows(2))
            .map(|(&c, e)| if inside == 0 { 0.0 } else { c as f64 / (inside as f64 * (e[1] - e[0])) })
            .collect()
    }
}

pub fn histogram(samples: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    ensure!(bins >= 1, InvalidArgument, "histogram needs at least one bin");
    let (lo, hi) = range;
    ensure!(lo.is_finite() && hi.is_finite() && hi > lo, InvalidArgument, "empty histogram range [{lo}, {hi}]");
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins).map(|k| if k == bins { hi } else { lo + k as f64 * width }).collect();
    let mut h = Histogram { edges, counts: vec![0; bins], underflow: 0, overflow: 0, total: samples.len() as u64 };
    for &x in samples {
        if x < lo || x.is_nan() {
            h.underflow += 1;
        } else if x > hi {
            h.overflow += 1;
        } else {
            let k = (((x - lo) / width) as usize).min(bins - 1);
            h.counts[k] += 1;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn constant_sampler() {
        let est = mc_estimate(|_| Ok(0.4), 1000, 1, 1).unwrap();
        assert!((est.mean - 0.4).abs() < 1e-15);
        assert!(est.variance.abs() < 1e-28);
        assert!(mc_estimate(|_| Ok(0.4), 1, 1, 1).is_err());
    }

    #[test]
    fn uniform_sampler_moments() {
        let est = mc_estimate(|rng| Ok(rng.random::<f64>()), 1_000_000, 42, 4).unwrap();
        assert!(est.mean_z_score(0.5) < 3.0, "mean {}", est.mean);
        assert!(est.variance_z_score(1.0 / 12.0) < 3.0, "variance {}", est.variance);
        assert_eq!(est.n, 1_000_000);
        assert!((est.std_error - (est.variance / 1e6).sqrt()).abs() < 1e-18);
    }

    #[test]
    fn estimates_are_bit_reproducible_across_worker_counts() {
        let f = |rng: &mut ChaCha8Rng| Ok(rng.random::<f64>().powi(3));
        let a = mc_estimate(f, 20_001, 9, 3).unwrap();
        let b = mc_estimate(f, 20_001, 9, 3).unwrap();
        let c = mc_estimate(f, 20_001, 9, 1).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.variance.to_bits(), b.variance.to_bits());
        assert_eq!(a.mean.to_bits(), c.mean.to_bits());
        let (d, samples) = mc_collect(f, 20_001, 9, 2).unwrap();
        assert_eq!(samples.len(), 20_001);
        assert!((d.mean - a.mean).abs() <= 1e-12 * a.mean.abs());
    }

    #[test]
    fn sampler_errors_propagate() {
        let r = mc_estimate(|_| Err(crate::Error::Accuracy("boom".into())), 10, 0, 2);
        assert!(r.is_err());
    }

    #[test]
    fn streaming_matches_two_pass() {
        let mut rng = RngStream::new(5, 0).rng();
        let xs: Vec<f64> = (0..1_000_000)
            .map(|k| {
                let scale = 10f64.powi((k % 9) - 4);
                1e3 + scale * rng.random::<f64>()
            })
            .collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        let mut streamed = Moments::default();
        for chunk in xs.chunks(777) {
            streamed.merge(&Moments::from_slice(chunk));
        }
        assert!((streamed.mean - mean).abs() <= 1e-12 * mean.abs());
        assert!((streamed.variance() - var).abs() <= 1e-12 * var);
        assert!((streamed.fourth_central() - m4).abs() <= 1e-10 * m4);
    }

    #[test]
    fn ks_trivial_cases() {
        let a = [0.1, 0.5, 0.9];
        assert_eq!(ks_statistic(&a, &a).unwrap(), 0.0);
        assert_eq!(ks_statistic(&[0.0, 0.1], &[1.0, 2.0]).unwrap(), 1.0);
        assert!(ks_statistic(&[], &a).is_err());
    }

    #[test]
    fn ks_same_distribution_below_critical_value() {
        let mut rng = RngStream::new(6, 0).rng();
        let a: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
        let d = ks_statistic(&a, &b).unwrap();
        let crit = 1.63 * (2.0f64 / 1e4).sqrt();
        assert!(d < crit, "{d} vs {crit}");
        assert!((ks_critical_two_sample(0.01, 10_000, 10_000) - crit).abs() < 2e-3 * crit);
        let d1 = ks_statistic_cdf(&a, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(d1 < ks_critical_one_sample(0.01, a.len()));
    }

    #[test]
    fn histogram_rules() {
        let h = histogram(&[0.5], 2, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts, vec![0, 1]);
        let h = histogram(&[-1.0, 0.0, 0.25, 1.0, 2.0], 4, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts, vec![1, 1, 0, 1]);
        assert_eq!((h.underflow, h.overflow), (1, 1));
        assert_eq!(h.counts.iter().sum::<u64>() + h.underflow + h.overflow, h.total);
        assert!(histogram(&[0.1], 0, (0.0, 1.0)).is_err());
        assert!(histogram(&[0.1], 3, (1.0, 1.0)).is_err());
    }

    #[test]
    fn uniform_histogram_is_binomial() {
        let mut rng = RngStream::new(8, 0).rng();
        let xs: Vec<f64> = (0..100_000).map(|_| rng.random()).collect();
        let h = histogram(&xs, 10, (0.0, 1.0)).unwrap();
        // Binomial(10^5, 0.1): 3σ = 3√(n p (1−p)).
        let tol = 3.0 * (1e5f64 * 0.1 * 0.9).sqrt();
        for &c in &h.counts {
            assert!((c as f64 - 1e4).abs() <= tol, "{c}");
        }
        assert_eq!(h.counts.iter().sum::<u64>() + h.underflow + h.overflow, 100_000);
        let dens = h.density();
        assert!(dens.iter().all(|d| (d - 1.0).abs() < 0.05));
    }
}
