//! Closed forms: both Page curves, their thermodynamic limits and the
//! limiting variance of the Gaussian ensemble.

use std::f64::consts::LN_2;

use crate::error::{ensure, Result};
use crate::special::{digamma, digamma_pow2_plus_one_excess, log_factorial};

/// Largest `N` accepted by [`page_average_exact`].
pub const PAGE_MAX_MODES: usize = 1024;

/// What a [`CurvePoint`] value measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Mean,
    Std,
    MeanPerN,
}

/// One tabulated point of a Page-type curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    pub n_a: usize,
    pub f: f64,
    pub value: f64,
    pub kind: CurveKind,
}

/// Page's average over Haar-random pure states of `N` qubit-like modes:
/// `Ψ(2^N+1) − Ψ(2^{N−N_A}+1) − (2^{N_A}−1)/2^{N−N_A+1}`.
///
/// Requires `N_A ≤ N_B`. Evaluated as `N_A log 2` plus small corrections so
/// that no power of two is formed beyond the `f64` range.
pub fn page_average_exact(n: usize, n_a: usize) -> Result<f64> {
    ensure!(n <= PAGE_MAX_MODES, InvalidArgument, "N = {n} exceeds {PAGE_MAX_MODES}");
    ensure!(2 * n_a <= n, InvalidArgument, "Page formula needs N_A <= N_B, got N = {n}, N_A = {n_a}");
    let n_b = n - n_a;
    let excess = digamma_pow2_plus_one_excess(n as u32) - digamma_pow2_plus_one_excess(n_b as u32);
    // (2^{N_A} − 1) / 2^{N_B+1}
    let tail = (n_a as f64 - n_b as f64 - 1.0).exp2() - (-(n_b as f64) - 1.0).exp2();
    Ok(n_a as f64 * LN_2 + excess - tail)
}

/// Two-term asymptotic form `f N log 2 − ½ e^{−(1−2f) N log 2}`.
pub fn page_thermo(n: usize, f: f64) -> Result<f64> {
    ensure!(f > 0.0 && f <= 0.5, InvalidArgument, "page_thermo needs 0 < f <= 1/2, got {f}");
    let n = n as f64;
    Ok(f * n * LN_2 - 0.5 * (-(1.0 - 2.0 * f) * n * LN_2).exp())
}

/// Leading standard deviation of the Page ensemble:
/// `2^{−(1−f)N−½}` for `f < ½` and `2^{−N/2−1}` at `f = ½`.
pub fn page_std_thermo(n: usize, f: f64) -> Result<f64> {
    ensure!(f > 0.0 && f <= 0.5, InvalidArgument, "page_std_thermo needs 0 < f <= 1/2, got {f}");
    let n = n as f64;
    let exponent = if f == 0.5 { -0.5 * n - 1.0 } else { -(1.0 - f) * n - 0.5 };
    Ok(exponent.exp2())
}

/// Exact average entanglement entropy over Haar-random pure fermionic
/// Gaussian states:
///
/// ```text
/// (N−½)Ψ(2N) + (½+N_A−N)Ψ(2N−2N_A) + (¼−N_A)Ψ(N) − ¼Ψ(N−N_A) − N_A
/// ```
///
/// The expression holds for `N_A ≤ N_B`; larger subsystems are evaluated
/// on their complement (`S_A = S_B` for pure states). `N_A = N` gives 0.
pub fn gaussian_average_exact(n: usize, n_a: usize) -> Result<f64> {
    ensure!(n_a <= n, InvalidArgument, "subsystem size {n_a} exceeds system size {n}");
    let n_a = n_a.min(n - n_a);
    if n_a == 0 {
        return Ok(0.0);
    }
    let (nf, af) = (n as f64, n_a as f64);
    Ok((nf - 0.5) * digamma(2.0 * nf)?
        + (0.5 + af - nf) * digamma(2.0 * (nf - af))?
        + (0.25 - af) * digamma(nf)?
        - 0.25 * digamma(nf - af)?
        - af)
}

/// `N((log 2 − 1)f + (f − 1)log(1 − f)) + f/2 + ¼ log(1 − f)`, the large-`N`
/// form of [`gaussian_average_exact`]. Like the exact formula it is taken at
/// `min(f, 1 − f)`.
pub fn gaussian_thermo(n: usize, f: f64) -> Result<f64> {
    ensure!(f > 0.0 && f < 1.0, InvalidArgument, "gaussian_thermo needs 0 < f < 1, got {f}");
    let f = f.min(1.0 - f);
    Ok(n as f64 * lrv_value(f) + 0.5 * f + 0.25 * (1.0 - f).ln())
}

/// Leading-order entropy density `(log 2 − 1)f + (f − 1)log(1 − f)`.
pub fn lrv_density(f: f64) -> Result<f64> {
    ensure!((0.0..=0.5).contains(&f), InvalidArgument, "lrv_density needs 0 <= f <= 1/2, got {f}");
    Ok(lrv_value(f))
}

fn lrv_value(f: f64) -> f64 {
    (LN_2 - 1.0) * f + (f - 1.0) * (-f).ln_1p()
}

/// Limiting variance `(f + f² + log(1 − f)) / 2`.
pub fn gaussian_variance_limit(f: f64) -> Result<f64> {
    ensure!(f > 0.0 && f <= 0.5, InvalidArgument, "variance limit needs 0 < f <= 1/2, got {f}");
    // f + f² + log(1−f) = f²/2 − f³/3 − …; the series avoids cancellation at small f.
    let v = if f < 1e-3 {
        let mut acc = 0.5 * f * f;
        let mut pow = f * f;
        for k in 3..40 {
            pow *= f;
            acc -= pow / k as f64;
        }
        acc
    } else {
        f + f * f + (-f).ln_1p()
    };
    Ok(0.5 * v)
}

/// Limiting standard deviation `√((f + f² + log(1 − f)) / 2)`.
pub fn gaussian_std_limit(f: f64) -> Result<f64> {
    Ok(gaussian_variance_limit(f)?.sqrt())
}

/// Limit of `s²_{N_A−1−l, N_A+k}` at fixed `f = N_A/N`:
///
/// ```text
/// (1/f − 1)^{−2(k+l+1)} (2k+2l+3 − 4f(k+l+1))²
/// ─────────────────────────────────────────────────
/// 4 (k+l+1)² (2k+2l+1)² (2k+2l+3)²
/// ```
pub fn sbar_lk(l: usize, k: usize, f: f64) -> Result<f64> {
    ensure!(f > 0.0 && f < 1.0, InvalidArgument, "sbar_lk needs 0 < f < 1, got {f}");
    let m = (k + l + 1) as f64;
    let ratio = 1.0 / f - 1.0;
    let num = (2.0 * m + 1.0 - 4.0 * f * m).powi(2);
    let den = 4.0 * m * m * (2.0 * m - 1.0).powi(2) * (2.0 * m + 1.0).powi(2);
    Ok((-2.0 * m * ratio.ln()).exp() * num / den)
}

/// Squared matrix element `s²_ij` of the mode entropy between the Jacobi
/// wavefunctions `ψ_i` and `ψ_j`, closed form valid for `i < j`. Factorials
/// enter through `log_gamma`.
pub fn s2_closed_form(i: usize, j: usize, delta: usize) -> Result<f64> {
    ensure!(i < j, InvalidArgument, "closed form for s²_ij needs i < j, got i = {i}, j = {j}");
    let (fi, fj, d) = (i as f64, j as f64, delta as f64);
    let poly = (1.0 + d - 2.0 * d * d) * fi - 2.0 * (d - 1.0) * fi * fi + (d + 1.0) * (2.0 * fj + 1.0) * (d + fj);
    if poly == 0.0 {
        return Ok(0.0);
    }
    let log_fact = log_factorial(2 * j as u64) + log_factorial(2 * (delta + i) as u64)
        - log_factorial(2 * i as u64)
        - log_factorial(2 * (delta + j + 1) as u64);
    let num = [
        2.0 * d + 4.0 * fi + 1.0,
        d + fj + 1.0,
        2.0 * d + 2.0 * fj + 1.0,
        2.0 * d + 4.0 * fj + 1.0,
    ];
    let den_sq = [
        2.0 * fj - 2.0 * fi + 1.0,
        fj - fi,
        2.0 * fj - 2.0 * fi - 1.0,
        d + fi + fj,
        d + fi + fj + 1.0,
        2.0 * d + 2.0 * fi + 2.0 * fj + 1.0,
    ];
    let log_rest = num.iter().map(|v| v.ln()).sum::<f64>() + 2.0 * poly.abs().ln()
        - 2.0 * den_sq.iter().map(|v| v.abs().ln()).sum::<f64>()
        - LN_2;
    Ok((log_fact + log_rest).exp())
}

/// Gaussian Page curve `N_A = 0..=N/2` from the exact formula.
pub fn gaussian_page_curve(n: usize) -> Result<Vec<CurvePoint>> {
    (0..=n / 2)
        .map(|n_a| {
            Ok(CurvePoint {
                n,
                n_a,
                f: n_a as f64 / n as f64,
                value: gaussian_average_exact(n, n_a)?,
                kind: CurveKind::Mean,
            })
        })
        .collect()
}

/// Page curve `N_A = 0..=N/2` from the exact formula.
pub fn page_curve(n: usize) -> Result<Vec<CurvePoint>> {
    (0..=n / 2)
        .map(|n_a| {
            Ok(CurvePoint {
                n,
                n_a,
                f: n_a as f64 / n as f64,
                value: page_average_exact(n, n_a)?,
                kind: CurveKind::Mean,
            })
        })
        .collect()
}
