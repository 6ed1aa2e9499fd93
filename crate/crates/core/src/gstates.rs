//! Pure fermionic Gaussian states as complex structures.
//!
//! Majorana operators use the split ordering `(ξ_1 … ξ_N, ξ_{N+1} … ξ_{2N})`
//! with `ξ_i = (a_i† + a_i)/√2` and `ξ_{N+i} = i(a_i† − a_i)/√2`. A pure
//! Gaussian state is labelled by the real antisymmetric orthogonal matrix
//! `J` with `⟨[ξ_μ, ξ_ν]⟩ = i J_μν`.

use std::f64::consts::LN_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ensure, Error, Result};
use crate::linalg::{max_abs, orthogonality_defect, sym_eigen, Matrix, OrthogonalMatrix};

/// Tolerance on `Jᵀ = −J` and `J Jᵀ = 1`.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Restricted singular values this far outside `[0, 1]` are clamped.
pub const CLAMP_WINDOW: f64 = 1e-9;
/// Maximal mismatch between the two copies of a paired singular value.
pub const PAIRING_TOL: f64 = 1e-8;

/// Bipartition of `N` modes into `A` (first `N_A` modes) and `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SystemSplit {
    pub n: usize,
    pub n_a: usize,
}

impl SystemSplit {
    pub fn new(n: usize, n_a: usize) -> Result<Self> {
        ensure!(n_a <= n, InvalidArgument, "subsystem size {n_a} exceeds system size {n}");
        Ok(Self { n, n_a })
    }

    pub fn n_b(&self) -> usize {
        self.n - self.n_a
    }

    /// `Δ = N_B − N_A`, negative when `A` is the larger side.
    pub fn delta(&self) -> i64 {
        self.n_b() as i64 - self.n_a as i64
    }

    /// Subsystem fraction `f = N_A / N`.
    pub fn fraction(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.n_a as f64 / self.n as f64
        }
    }

    pub fn complement(&self) -> Self {
        Self { n: self.n, n_a: self.n_b() }
    }

    /// Majorana indices of subsystem `A`: `{0..N_A} ∪ {N..N+N_A}`.
    pub fn majorana_indices(&self) -> Vec<usize> {
        (0..self.n_a).chain(self.n..self.n + self.n_a).collect()
    }

    /// Majorana indices of the complement `B`.
    pub fn complement_indices(&self) -> Vec<usize> {
        (self.n_a..self.n).chain(self.n + self.n_a..2 * self.n).collect()
    }
}

/// Real antisymmetric orthogonal `2N × 2N` matrix labelling a pure Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure(Matrix);

impl ComplexStructure {
    /// Validates antisymmetry and orthogonality within [`STRUCTURE_TOL`].
    pub fn new(j: Matrix) -> Result<Self> {
        ensure!(j.is_square() && j.nrows() >= 2 && j.nrows().is_multiple_of(2), InvalidArgument,
            "complex structure must be square of even dimension, got {}x{}", j.nrows(), j.ncols());
        let asym = max_abs(&(&j + j.transpose()));
        ensure!(asym <= STRUCTURE_TOL, ConstraintViolation, "‖J+Jᵀ‖_max = {asym:e}");
        let defect = orthogonality_defect(&j);
        ensure!(defect <= STRUCTURE_TOL, ConstraintViolation, "‖JJᵀ−1‖_max = {defect:e}");
        Ok(Self(j))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    /// `(‖J+Jᵀ‖_max, ‖JJᵀ−1‖_max)`.
    pub fn defects(&self) -> (f64, f64) {
        (max_abs(&(&self.0 + self.0.transpose())), orthogonality_defect(&self.0))
    }

    /// Principal sub-block on the given Majorana indices.
    pub fn sub_block(&self, indices: &[usize]) -> Matrix {
        Matrix::from_fn(indices.len(), indices.len(), |a, b| self.0[(indices[a], indices[b])])
    }
}

/// Complex structure of the reference state annihilated by every `a_i`:
/// `J₀ = [[0, 1], [−1, 0]]` in the split ordering.
pub fn reference_structure(n: usize) -> Result<ComplexStructure> {
    ensure!(n >= 1, InvalidArgument, "need at least one mode");
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    Ok(ComplexStructure(j))
}

/// `J = M J₀ Mᵀ`.
pub fn conjugate(j0: &ComplexStructure, m: &OrthogonalMatrix) -> Result<ComplexStructure> {
    ensure!(j0.0.nrows() == m.dim(), InvalidArgument,
        "dimension mismatch: J is {}x{}, M is {}x{}", j0.0.nrows(), j0.0.nrows(), m.dim(), m.dim());
    let mm = m.as_matrix();
    let j = mm * &j0.0 * mm.transpose();
    // Remove the symmetric rounding component; it is O(ε) and not part of J.
    let j = (&j - j.transpose()) * 0.5;
    Ok(ComplexStructure(j))
}

/// Majorana representation of the Bogoliubov map `a' = α a + β a†`:
///
/// ```text
/// M = [[Re(α+β), Im(β−α)],
///      [Im(α+β), Re(α−β)]]
/// ```
pub fn bogoliubov_to_orthogonal(
    alpha: &DMatrix<Complex64>,
    beta: &DMatrix<Complex64>,
) -> Result<OrthogonalMatrix> {
    let n = alpha.nrows();
    ensure!(alpha.is_square() && beta.is_square() && beta.nrows() == n && n >= 1, InvalidArgument,
        "alpha and beta must be square matrices of the same size");
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (alpha[(i, j)], beta[(i, j)]);
            m[(i, j)] = (a + b).re;
            m[(i, n + j)] = (b - a).im;
            m[(n + i, j)] = (a + b).im;
            m[(n + i, n + j)] = (a - b).re;
        }
    }
    let defect = orthogonality_defect(&m);
    if defect > 1e-8 {
        return Err(Error::ConstraintViolation(format!(
            "(alpha, beta) does not preserve the anticommutation relations: ‖MMᵀ−1‖_max = {defect:e}"
        )));
    }
    Ok(OrthogonalMatrix::from_raw(m))
}

/// The `N_A` singular values of `[J]_A`, each in `[0, 1]`, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedSpectrum(Vec<f64>);

impl RestrictedSpectrum {
    /// Accepts values in `[0, 1]`, clamping anything within [`CLAMP_WINDOW`] outside.
    pub fn new(mut x: Vec<f64>) -> Result<Self> {
        for v in x.iter_mut() {
            ensure!(v.is_finite() && *v >= -CLAMP_WINDOW && *v <= 1.0 + CLAMP_WINDOW, InvalidArgument,
                "restricted singular value {v} outside [0, 1]");
            *v = v.clamp(0.0, 1.0);
        }
        x.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(x))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Paired singular values of the subsystem block `[J]_A`.
///
/// `[J]_Aᵀ[J]_A` has eigenvalues `x_i²`, each twice; the two copies are
/// checked against [`PAIRING_TOL`] and averaged.
pub fn restrict(j: &ComplexStructure, split: SystemSplit) -> Result<RestrictedSpectrum> {
    ensure!(split.n == j.modes(), InvalidArgument,
        "split is for {} modes, structure has {}", split.n, j.modes());
    ensure!(split.n_a >= 1, InvalidArgument, "subsystem must contain at least one mode");
    let block = j.sub_block(&split.majorana_indices());
    let gram = block.transpose() * &block;
    let gram = (&gram + gram.transpose()) * 0.5;
    let (squares, _) = sym_eigen(&gram)?;
    let mut x = Vec::with_capacity(split.n_a);
    for pair in squares.chunks_exact(2) {
        let (hi, lo) = (clamp_unit(pair[0].max(0.0).sqrt()), clamp_unit(pair[1].max(0.0).sqrt()));
        if (hi - lo).abs() > PAIRING_TOL {
            return Err(Error::InternalConsistency(format!(
                "singular values of [J]_A are not paired: {hi} vs {lo}"
            )));
        }
        x.push(0.5 * (hi + lo));
    }
    RestrictedSpectrum::new(x)
}

fn clamp_unit(v: f64) -> f64 {
    if v > 1.0 && v <= 1.0 + CLAMP_WINDOW {
        1.0
    } else {
        v
    }
}

/// Entropy contribution of one paired singular value,
/// `s(x) = −((1−x)/2) log((1−x)/2) − ((1+x)/2) log((1+x)/2)`, with `0 log 0 = 0`.
pub fn mode_entropy(x: f64) -> f64 {
    let lo = 0.5 * (1.0 - x);
    let hi = 0.5 * (1.0 + x);
    xlogx_neg(lo) + xlogx_neg(hi)
}

/// `−p log p` with the convention `0 log 0 = 0`.
pub fn xlogx_neg(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.ln()
    }
}

/// `S_A = Σ_i s(x_i)` in nats.
pub fn entropy_from_spectrum(x: &RestrictedSpectrum) -> f64 {
    x.0.iter().map(|&v| mode_entropy(v)).sum()
}

/// Entropy from raw values, validating the `[0, 1]` range first.
pub fn entropy_from_values(x: &[f64]) -> Result<f64> {
    Ok(entropy_from_spectrum(&RestrictedSpectrum::new(x.to_vec())?))
}

/// Entanglement entropy of subsystem `A` for a pure Gaussian state.
///
/// `N_A = 0` and `N_A = N` give zero.
pub fn subsystem_entropy(j: &ComplexStructure, split: SystemSplit) -> Result<f64> {
    if split.n_a == 0 || split.n_a == split.n {
        return Ok(0.0);
    }
    Ok(entropy_from_spectrum(&restrict(j, split)?))
}

/// Largest entropy a subsystem of `n_a` modes can carry.
pub fn max_entropy(n_a: usize) -> f64 {
    n_a as f64 * LN_2
}
