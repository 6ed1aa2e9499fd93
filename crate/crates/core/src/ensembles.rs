//! Random state ensembles.
//!
//! * Haar-random Gaussian states `J = M J₀ Mᵀ`, `M ∈ O(2N)` Haar.
//! * Eigenstates of random quadratic Hamiltonians `Ĥ = Σ i h_μν ξ_μ ξ_ν`.
//! * Number-conserving eigenstates, generated by `U(N)` only.
//! * Haar-random pure states on the full `2^N`-dimensional Fock space.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ensure, Error, Result};
use crate::gstates::{conjugate, reference_structure, subsystem_entropy, xlogx_neg, ComplexStructure, SystemSplit};
use crate::linalg::{antisym_canonical, gaussian_matrix, haar_orthogonal, haar_unitary_columns, Matrix, OrthogonalMatrix};

/// Largest `N` for which full Fock-space states are sampled.
pub const MAX_PURE_STATE_MODES: usize = 14;
/// Tolerance on hermiticity of `A` and antisymmetry of `B`.
pub const PARTICLE_BASIS_TOL: f64 = 1e-10;

const NORM_TOL: f64 = 1e-12;

/// `Ĥ = Σ i h_μν ξ_μ ξ_ν` together with its canonical form
/// `M h Mᵀ = ⊕ [[0, ω_i], [−ω_i, 0]]`, so that `Ĥ = Σ 2ω_i (b_i†b_i − ½)`.
#[derive(Debug, Clone)]
pub struct QuadraticHamiltonian {
    n: usize,
    h: Matrix,
    m: OrthogonalMatrix,
    omega: Vec<f64>,
}

impl QuadraticHamiltonian {
    /// Canonicalizes a real antisymmetric `2N × 2N` matrix.
    pub fn new(h: Matrix) -> Result<Self> {
        let (m, omega) = antisym_canonical(&h)?;
        Ok(Self { n: h.nrows() / 2, h, m, omega })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn diagonalizer(&self) -> &OrthogonalMatrix {
        &self.m
    }

    /// Single-particle energies, descending.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// `Σ 2ω_i (n_i − ½)`.
    pub fn energy(&self, occ: &OccupationPattern) -> Result<f64> {
        ensure!(occ.len() == self.n, InvalidArgument, "occupation pattern has {} modes, Hamiltonian {}", occ.len(), self.n);
        Ok(self.omega.iter().zip(occ.bits()).map(|(w, &b)| 2.0 * w * (b as f64 - 0.5)).sum())
    }

    /// `⟨J| Ĥ |J⟩ = ½ tr(h J)`.
    pub fn expectation(&self, j: &ComplexStructure) -> Result<f64> {
        ensure!(j.modes() == self.n, InvalidArgument, "state has {} modes, Hamiltonian {}", j.modes(), self.n);
        Ok(0.5 * (&self.h * j.as_matrix()).trace())
    }
}

/// Occupation numbers `n_i ∈ {0, 1}` of the normal modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupationPattern(Vec<u8>);

impl OccupationPattern {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        ensure!(bits.iter().all(|&b| b <= 1), InvalidArgument, "occupations must be 0 or 1");
        Ok(Self(bits))
    }

    pub fn vacuum(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn filled(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// Independent fair bits.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self((0..n).map(|_| rng.random_range(0..=1u8)).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }
}

/// Unit vector in the `2^N`-dimensional Fock space. Basis index bit
/// `N−1−k` is the occupation of mode `k`, so subsystem `A` occupies the
/// most significant bits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl PureStateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        ensure!(len >= 2 && len.is_power_of_two(), InvalidArgument, "state length {len} is not a power of two >= 2");
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        ensure!((norm - 1.0).abs() <= NORM_TOL, ConstraintViolation, "state norm {norm} differs from 1");
        Ok(Self { n: len.trailing_zeros() as usize, amplitudes })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// Index permutation from the split Majorana ordering to the interleaved
/// one: `ξ_i → 2i`, `ξ_{N+i} → 2i + 1`.
pub fn split_to_interleaved(n: usize) -> Vec<usize> {
    (0..2 * n).map(|mu| if mu < n { 2 * mu } else { 2 * (mu - n) + 1 }).collect()
}

/// Inverse of [`split_to_interleaved`].
pub fn interleaved_to_split(n: usize) -> Vec<usize> {
    (0..2 * n).map(|k| if k % 2 == 0 { k / 2 } else { n + k / 2 }).collect()
}

/// Matrix with entries moved by `perm`: `out[perm[a], perm[b]] = m[a, b]`.
pub fn permute_matrix(m: &Matrix, perm: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    for a in 0..m.nrows() {
        for b in 0..m.ncols() {
            out[(perm[a], perm[b])] = m[(a, b)];
        }
    }
    out
}

/// Haar-random pure Gaussian state.
pub fn sample_gaussian_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexStructure> {
    let j0 = reference_structure(n)?;
    let m = haar_orthogonal(2 * n, rng)?;
    conjugate(&j0, &m)
}

/// `h = (G − Gᵀ)/2` with `G` a standard Gaussian `2N × 2N` matrix.
pub fn sample_random_hamiltonian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<QuadraticHamiltonian> {
    sample_scaled_hamiltonian(n, 1.0, rng)
}

/// As [`sample_random_hamiltonian`], with every entry multiplied by `scale`.
pub fn sample_scaled_hamiltonian<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> Result<QuadraticHamiltonian> {
    ensure!(n >= 1, InvalidArgument, "need at least one mode");
    ensure!(scale > 0.0 && scale.is_finite(), InvalidArgument, "scale must be positive, got {scale}");
    let g = gaussian_matrix(2 * n, 2 * n, rng);
    QuadraticHamiltonian::new((&g - g.transpose()) * (0.5 * scale))
}

/// Complex structure of the eigenstate with normal-mode occupations `occ`.
///
/// In the interleaved normal-mode basis the state is `⊕ (1−2n_i)[[0,1],[−1,0]]`;
/// it is brought back with `Mᵀ`.
pub fn eigenstate_structure(ham: &QuadraticHamiltonian, occ: &OccupationPattern) -> Result<ComplexStructure> {
    let n = ham.n;
    ensure!(occ.len() == n, InvalidArgument, "occupation pattern has {} modes, Hamiltonian {n}", occ.len());
    let j_split = reference_structure(n)?;
    let mut j_int = permute_matrix(j_split.as_matrix(), &split_to_interleaved(n));
    for (i, &b) in occ.bits().iter().enumerate() {
        if b == 1 {
            j_int[(2 * i, 2 * i + 1)] *= -1.0;
            j_int[(2 * i + 1, 2 * i)] *= -1.0;
        }
    }
    conjugate(&ComplexStructure::new(j_int)?, &ham.m.transpose())
}

/// Majorana form of `Ĥ = Σ A_ij a_i†a_j + Σ (B_ij a_i†a_j† + h.c.)`.
///
/// With `a_i† = (ξ_i − iξ_{N+i})/√2`, the operator is `Σ Q_μν ξ_μ ξ_ν` for a
/// complex `Q`; its antisymmetric part equals `i h` and the symmetric part
/// contributes a constant.
pub fn from_particle_basis(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Result<QuadraticHamiltonian> {
    let n = a.nrows();
    ensure!(n >= 1 && a.is_square() && b.shape() == (n, n), InvalidArgument,
        "A and B must both be N x N, got {:?} and {:?}", a.shape(), b.shape());
    let herm = (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    ensure!(herm <= PARTICLE_BASIS_TOL, InvalidArgument, "A is not Hermitian: ‖A−A†‖_max = {herm:e}");
    let anti = (b + b.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    ensure!(anti <= PARTICLE_BASIS_TOL, InvalidArgument, "B is not antisymmetric: ‖B+Bᵀ‖_max = {anti:e}");

    // Row i of u holds the Majorana coefficients of a_i†.
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = DMatrix::<Complex64>::zeros(n, 2 * n);
    for i in 0..n {
        u[(i, i)] = Complex64::new(r, 0.0);
        u[(i, n + i)] = Complex64::new(0.0, -r);
    }
    let uc = u.conjugate();
    let q = u.transpose() * a * &uc + u.transpose() * b * &u + uc.transpose() * b.adjoint() * &uc;
    let q_anti = (&q - q.transpose()) * Complex64::new(0.5, 0.0);
    let h_complex = q_anti * Complex64::new(0.0, -1.0);
    let imag = h_complex.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let scale = h_complex.iter().map(|z| z.norm()).fold(0.0, f64::max);
    ensure!(imag <= 1e-12 * scale.max(1.0), InternalConsistency, "Majorana coefficients not real: {imag:e}");
    QuadraticHamiltonian::new(h_complex.map(|z| z.re))
}

/// `U|0⟩` for Haar `U ∈ U(2^N)`: a normalized vector of complex normals.
pub fn sample_haar_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureStateVector> {
    ensure!(n >= 1, InvalidArgument, "need at least one mode");
    if n > MAX_PURE_STATE_MODES {
        return Err(Error::ResourceLimit(format!(
            "Haar pure states need 2^N amplitudes; N = {n} exceeds {MAX_PURE_STATE_MODES}"
        )));
    }
    let mut amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    PureStateVector::new(amps)
}

/// `−Tr ρ_A log ρ_A` with `ρ_A = Tr_B |ψ⟩⟨ψ|`.
pub fn entanglement_entropy_pure(psi: &PureStateVector, n_a: usize) -> Result<f64> {
    let n = psi.n;
    ensure!(n_a <= n, InvalidArgument, "subsystem size {n_a} exceeds system size {n}");
    if n_a == 0 || n_a == n {
        return Ok(0.0);
    }
    let (da, db) = (1usize << n_a, 1usize << (n - n_a));
    let m = DMatrix::from_row_slice(da, db, &psi.amplitudes);
    let rho = &m * m.adjoint();
    let eig = SymmetricEigen::new(rho).eigenvalues;
    Ok(eig.iter().map(|&l| xlogx_neg(l)).sum())
}

/// Entropy of subsystem `A` for an eigenstate of a random number-conserving
/// quadratic Hamiltonian.
///
/// For Haar `U ∈ U(N)` and occupations `n`, the correlation matrix is
/// `C = U diag(n) U†`, which only involves the occupied columns of `U`.
pub fn sample_number_conserving_eigenstate<R: Rng + ?Sized>(n: usize, n_a: usize, rng: &mut R) -> Result<f64> {
    ensure!(n >= 2, InvalidArgument, "need at least two modes, got {n}");
    ensure!(n_a <= n, InvalidArgument, "subsystem size {n_a} exceeds system size {n}");
    let occ = OccupationPattern::random(n, rng);
    number_conserving_entropy(n, n_a, &occ, rng)
}

/// As [`sample_number_conserving_eigenstate`] with fixed occupations.
pub fn number_conserving_entropy<R: Rng + ?Sized>(n: usize, n_a: usize, occ: &OccupationPattern, rng: &mut R) -> Result<f64> {
    ensure!(occ.len() == n, InvalidArgument, "occupation pattern has {} modes, system {n}", occ.len());
    let filled = occ.count();
    if filled == 0 || n_a == 0 {
        return Ok(0.0);
    }
    let v = haar_unitary_columns(n, filled, rng)?;
    let va = v.rows(0, n_a);
    let c = va * va.adjoint();
    let eig = SymmetricEigen::new(c).eigenvalues;
    Ok(eig.iter().map(|&l| binary_entropy(l)).sum())
}

fn binary_entropy(l: f64) -> f64 {
    let l = l.clamp(0.0, 1.0);
    xlogx_neg(l) + xlogx_neg(1.0 - l)
}

/// The four state ensembles, for drawing entanglement entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    Gaussian,
    HaarPure,
    /// Eigenstates of random `O(2N)`-invariant quadratic Hamiltonians with
    /// uniformly random occupations.
    Hamiltonian,
    NumberConserving,
}

impl Ensemble {
    pub fn name(&self) -> &'static str {
        match self {
            Ensemble::Gaussian => "gaussian",
            Ensemble::HaarPure => "haar-pure",
            Ensemble::Hamiltonian => "hamiltonian",
            Ensemble::NumberConserving => "number-conserving",
        }
    }

    /// Checks that the ensemble can be sampled at this size.
    pub fn check(&self, split: SystemSplit) -> Result<()> {
        ensure!(split.n >= 1, InvalidArgument, "need at least one mode");
        match self {
            Ensemble::HaarPure if split.n > MAX_PURE_STATE_MODES => Err(Error::ResourceLimit(format!(
                "haar-pure needs 2^N amplitudes; N = {} exceeds {MAX_PURE_STATE_MODES}",
                split.n
            ))),
            Ensemble::NumberConserving if split.n < 2 => {
                Err(Error::InvalidArgument("number-conserving ensemble needs N >= 2".into()))
            }
            _ => Ok(()),
        }
    }

    /// One entanglement entropy of subsystem `A`.
    pub fn sample_entropy<R: Rng + ?Sized>(&self, split: SystemSplit, rng: &mut R) -> Result<f64> {
        match self {
            Ensemble::Gaussian => subsystem_entropy(&sample_gaussian_state(split.n, rng)?, split),
            Ensemble::HaarPure => entanglement_entropy_pure(&sample_haar_pure_state(split.n, rng)?, split.n_a),
            Ensemble::Hamiltonian => {
                let ham = sample_random_hamiltonian(split.n, rng)?;
                let occ = OccupationPattern::random(split.n, rng);
                subsystem_entropy(&eigenstate_structure(&ham, &occ)?, split)
            }
            Ensemble::NumberConserving => sample_number_conserving_eigenstate(split.n, split.n_a, rng),
        }
    }
}

impl std::str::FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Ensemble::Gaussian),
            "haar-pure" => Ok(Ensemble::HaarPure),
            "hamiltonian" => Ok(Ensemble::Hamiltonian),
            "number-conserving" => Ok(Ensemble::NumberConserving),
            other => Err(Error::InvalidArgument(format!("unknown ensemble '{other}'"))),
        }
    }
}
