//! Jacobi-ensemble analytics for the restricted spectrum `x ∈ [0, 1]`.
//!
//! The joint density of the `N_A` paired singular values of `[J]_A` is a
//! determinantal process with kernel
//!
//! ```text
//! K(x, y) = Σ_{j<N_A} ψ_j(x) ψ_j(y),
//! ψ_j(x)  = (1 − x²)^{Δ/2} P^{(Δ,Δ)}_{2j}(x) / √c_j,
//! ```
//!
//! where `Δ = N − 2N_A`. Everything in this module is a deterministic
//! function of `(N_A, Δ)`.

use nalgebra::DMatrix;

use crate::error::{ensure, Error, Result};
use crate::formulas::s2_closed_form;
use crate::gstates::mode_entropy;
use crate::special::{gauss_legendre, graded_unit_rule, integrate_unit_interval, log_factorial, QuadratureRule};

/// Tolerance of the orthonormality check run at construction.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Default truncation tolerance of [`variance_finite_n`].
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

const QUADRATURE_TOL: f64 = 1e-13;
const RESCALE: f64 = 1e150;
/// Terms per row after which a non-decreasing tail is an error.
const TAIL_WARMUP: usize = 4;
const MAX_TAIL_TERMS: usize = 10_000_000;

/// Immutable context for one `(N_A, Δ)`.
#[derive(Debug, Clone)]
pub struct JacobiKernelCtx {
    n_a: usize,
    delta: usize,
    log_c: Vec<f64>,
    quadrature: QuadratureRule,
}

/// `log c_j` with `c_j = 2^{2Δ} ((2j+Δ)!)² / ((2j)! (2j+2Δ)! (4j+2Δ+1))`.
pub fn log_normalization(j: usize, delta: usize) -> f64 {
    let (j, d) = (j as u64, delta as u64);
    2.0 * d as f64 * std::f64::consts::LN_2 + 2.0 * log_factorial(2 * j + d)
        - log_factorial(2 * j)
        - log_factorial(2 * j + 2 * d)
        - ((4 * j + 2 * d + 1) as f64).ln()
}

/// `c_j` for any `j ≥ 0`.
pub fn normalization(j: usize, delta: usize) -> f64 {
    log_normalization(j, delta).exp()
}

/// `ψ_0(x), …, ψ_{count−1}(x)`.
///
/// The Jacobi recurrence is run on rescaled values with the scale kept in
/// log form, so large `Δ` and degrees neither overflow nor underflow early.
fn psi_values(count: usize, delta: usize, x: f64, log_c: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let one_minus = (1.0 - x) * (1.0 + x);
    if one_minus <= 0.0 {
        // P^{(0,0)}_{2j}(1) = 1; any Δ > 0 weight vanishes.
        out.extend((0..count).map(|j| if delta > 0 { 0.0 } else { (-0.5 * log_c(j)).exp() }));
        return out;
    }
    let log_w = 0.5 * delta as f64 * one_minus.ln();
    let a = delta as f64;
    let mut log_scale = 0.0;
    let (mut prev, mut curr) = (0.0, 1.0);
    for n in 0..=2 * (count - 1) {
        if n == 1 {
            prev = curr;
            curr = (a + 1.0) * x;
        } else if n >= 2 {
            let nf = n as f64;
            let s = 2.0 * nf + 2.0 * a;
            let lead = 2.0 * nf * (nf + 2.0 * a) * (s - 2.0);
            let c1 = (s - 1.0) * s * (s - 2.0) * x;
            let c2 = 2.0 * (nf + a - 1.0) * (nf + a - 1.0) * s;
            let next = (c1 * curr - c2 * prev) / lead;
            prev = curr;
            curr = next;
        }
        if curr.abs() > RESCALE {
            curr /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        if n % 2 == 0 {
            let j = n / 2;
            let mag = log_w + log_scale - 0.5 * log_c(j);
            out.push(if curr == 0.0 { 0.0 } else { curr * mag.exp() });
        }
    }
    out
}

impl JacobiKernelCtx {
    /// Builds the context and checks `∫₀¹ ψ_i ψ_j = δ_ij` on its quadrature.
    pub fn new(n_a: usize, delta: usize) -> Result<Self> {
        ensure!(n_a >= 1, InvalidArgument, "kernel needs N_A >= 1");
        let log_c: Vec<f64> = (0..n_a).map(|j| log_normalization(j, delta)).collect();
        // ψ_i ψ_j has degree at most 4N_A + 2Δ; exact on every panel.
        let quadrature = graded_unit_rule(2 * n_a + delta + 4)?;
        let ctx = Self { n_a, delta, log_c, quadrature };
        let defect = ctx.orthonormality_defect();
        ensure!(
            defect <= ORTHONORMALITY_TOL,
            InternalConsistency,
            "Jacobi wavefunctions not orthonormal for N_A = {n_a}, Δ = {delta}: defect {defect:e}"
        );
        Ok(ctx)
    }

    /// Context for the split `(N, N_A)`; needs `N_A ≤ N/2`.
    pub fn for_split(n: usize, n_a: usize) -> Result<Self> {
        ensure!(2 * n_a <= n, InvalidArgument, "kernel needs Δ = N - 2N_A >= 0, got N = {n}, N_A = {n_a}");
        Self::new(n_a, n - 2 * n_a)
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// `c_0, …, c_{N_A−1}`.
    pub fn normalizations(&self) -> Vec<f64> {
        self.log_c.iter().map(|l| l.exp()).collect()
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quadrature
    }

    /// Maximum entry of `|∫ψ_iψ_j − δ_ij|` on the context quadrature.
    pub fn orthonormality_defect(&self) -> f64 {
        let q = &self.quadrature;
        let rows: Vec<f64> = q
            .nodes
            .iter()
            .zip(&q.weights)
            .flat_map(|(&x, &w)| self.psis(x).into_iter().map(move |p| p * w.sqrt()))
            .collect();
        let psi = DMatrix::from_row_slice(q.len(), self.n_a, &rows);
        let gram = psi.transpose() * &psi;
        (gram - DMatrix::identity(self.n_a, self.n_a)).amax()
    }

    /// `ψ_0(x), …, ψ_{N_A−1}(x)`.
    pub fn psis(&self, x: f64) -> Vec<f64> {
        psi_values(self.n_a, self.delta, x, |j| self.log_c[j])
    }

    /// `ψ_j(x)` for any `j`, including `j ≥ N_A`.
    pub fn psi(&self, j: usize, x: f64) -> f64 {
        psi_values(j + 1, self.delta, x, |k| self.log_c_any(k))[j]
    }

    fn log_c_any(&self, j: usize) -> f64 {
        self.log_c.get(j).copied().unwrap_or_else(|| log_normalization(j, self.delta))
    }

    /// `K(x, y)`.
    pub fn kernel(&self, x: f64, y: f64) -> f64 {
        let px = self.psis(x);
        if x == y {
            return px.iter().map(|p| p * p).sum();
        }
        px.iter().zip(self.psis(y)).map(|(a, b)| a * b).sum()
    }

    /// `ρ(x) = K(x, x) / N_A`.
    pub fn level_density(&self, x: f64) -> f64 {
        self.kernel(x, x) / self.n_a as f64
    }

    /// `∫₀ᵗ ρ`, exact up to rounding since `ρ` is a polynomial.
    pub fn level_density_cdf(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        if t == 0.0 {
            return 0.0;
        }
        let rule = gauss_legendre(2 * self.n_a + self.delta + 2)
            .expect("positive order")
            .mapped(0.0, t);
        rule.integrate(|x| self.level_density(x)).min(1.0)
    }

    /// `ρ` tabulated on `points` equispaced nodes covering `[0, 1]`.
    pub fn spectral_density(&self, points: usize) -> Result<SpectralDensity> {
        ensure!(points >= 2, InvalidArgument, "density grid needs at least 2 points, got {points}");
        let grid: Vec<f64> = (0..points).map(|k| k as f64 / (points - 1) as f64).collect();
        let values = grid.iter().map(|&x| self.level_density(x)).collect();
        Ok(SpectralDensity { grid, values })
    }

    /// `R_k = ((N_A−k)!/N_A!) det[K(x_a, x_b)]`.
    pub fn correlation_k(&self, points: &[f64]) -> Result<f64> {
        let k = points.len();
        ensure!(
            (1..=self.n_a).contains(&k),
            InvalidArgument,
            "correlation order {k} outside 1..={}",
            self.n_a
        );
        let psis: Vec<Vec<f64>> = points.iter().map(|&x| self.psis(x)).collect();
        let kmat = DMatrix::from_fn(k, k, |a, b| psis[a].iter().zip(&psis[b]).map(|(p, q)| p * q).sum::<f64>());
        let prefactor = (log_factorial((self.n_a - k) as u64) - log_factorial(self.n_a as u64)).exp();
        Ok(prefactor * kmat.determinant())
    }

    /// `N_A ∫₀¹ s(x) ρ(x) dx`.
    pub fn average_entropy_quadrature(&self) -> Result<f64> {
        let integral = integrate_unit_interval(
            |x| mode_entropy(x) * self.kernel(x, x),
            2 * self.n_a + self.delta + 16,
            QUADRATURE_TOL,
        )?;
        Ok(integral)
    }

    /// `s_ij = ∫₀¹ s(x) ψ_i(x) ψ_j(x) dx`.
    pub fn s_ij_quadrature(&self, i: usize, j: usize) -> Result<f64> {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        integrate_unit_interval(
            |x| {
                let p = psi_values(hi + 1, self.delta, x, |k| self.log_c_any(k));
                mode_entropy(x) * p[lo] * p[hi]
            },
            lo + hi + self.delta + 16,
            QUADRATURE_TOL,
        )
    }
}

/// `ρ` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// `Σ_{i<N_A} Σ_{j≥N_A} s²_ij` from the closed form of `s²_ij`.
///
/// Each row is cut once the extrapolated tail `2 t r / (1 − r)`, with `r`
/// the ratio of the last two terms, drops below `tail_tol / N_A`.
pub fn variance_finite_n(ctx: &JacobiKernelCtx, tail_tol: f64) -> Result<f64> {
    ensure!(tail_tol > 0.0, InvalidArgument, "tail tolerance must be positive, got {tail_tol}");
    let (n_a, delta) = (ctx.n_a, ctx.delta);
    let row_tol = tail_tol / n_a as f64;
    let mut total = 0.0;
    for i in 0..n_a {
        let mut prev = s2_closed_form(i, n_a, delta)?;
        let mut row = prev;
        let mut j = n_a + 1;
        loop {
            let t = s2_closed_form(i, j, delta)?;
            row += t;
            let steps = j - n_a;
            if t == 0.0 {
                break;
            }
            let r = t / prev;
            if r >= 1.0 {
                if steps >= TAIL_WARMUP {
                    return Err(Error::Accuracy(format!(
                        "non-decreasing tail in row i = {i} at j = {j} (N_A = {n_a}, Δ = {delta})"
                    )));
                }
            } else if 2.0 * t * r / (1.0 - r) < row_tol {
                break;
            }
            ensure!(steps < MAX_TAIL_TERMS, Accuracy, "variance row i = {i} did not converge");
            prev = t;
            j += 1;
        }
        total += row;
    }
    Ok(total)
}
