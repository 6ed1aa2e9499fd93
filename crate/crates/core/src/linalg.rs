//! Dense real linear algebra on small matrices.
//!
//! Storage and the basic factorizations (QR, Hermitian eigendecomposition)
//! come from `nalgebra`; this module adds the Haar-measure sampling, the
//! sorted symmetric eigendecomposition and the canonical form of real
//! antisymmetric matrices used throughout the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{ensure, Error, Result};

/// Dense real matrix.
pub type Matrix = DMatrix<f64>;

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

/// Tolerance used when accepting an externally supplied matrix as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Largest absolute entry, `‖A‖_max`.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// `‖A Aᵀ − 1‖_max`.
pub fn orthogonality_defect(m: &Matrix) -> f64 {
    let mut g = m * m.transpose();
    for i in 0..g.nrows() {
        g[(i, i)] -= 1.0;
    }
    max_abs(&g)
}

/// Seed plus stream id of a counter-based generator.
///
/// Two values with the same `(seed, stream)` produce identical draws, and
/// different stream ids give statistically independent sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// A real square matrix `M` with `M Mᵀ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMatrix(Matrix);

impl OrthogonalMatrix {
    /// Accepts `m` if it is square and orthogonal within [`ORTHOGONALITY_TOL`].
    pub fn new(m: Matrix) -> Result<Self> {
        Self::with_tolerance(m, ORTHOGONALITY_TOL)
    }

    pub fn with_tolerance(m: Matrix, tol: f64) -> Result<Self> {
        ensure!(m.is_square(), InvalidArgument, "orthogonal matrix must be square, got {}x{}", m.nrows(), m.ncols());
        let defect = orthogonality_defect(&m);
        ensure!(defect <= tol, ConstraintViolation, "‖MMᵀ−1‖_max = {defect:e} exceeds {tol:e}");
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim, dim))
    }

    pub(crate) fn from_raw(m: Matrix) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }
}

/// Matrix of independent standard normal entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed element of the full orthogonal group `O(dim)`.
///
/// QR of a Ginibre matrix, with the columns of `Q` rescaled by the signs of
/// `diag(R)` so that the factorization is unique and `Q` is exactly Haar.
pub fn haar_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<OrthogonalMatrix> {
    ensure!(dim >= 2 && dim.is_multiple_of(2), InvalidArgument, "Haar sampling needs an even dimension >= 2, got {dim}");
    let g = gaussian_matrix(dim, dim, rng);
    let qr = g.qr();
    let r_diag = qr.r().diagonal();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r_diag[j] < 0.0 {
            col.neg_mut();
        }
    }
    Ok(OrthogonalMatrix(q))
}

/// First `cols` columns of a Haar-distributed unitary of size `dim`.
///
/// Complex Ginibre QR with the phases of `diag(R)` divided out.
pub fn haar_unitary_columns<R: Rng + ?Sized>(dim: usize, cols: usize, rng: &mut R) -> Result<CMatrix> {
    ensure!(dim >= 1 && cols <= dim, InvalidArgument, "need 1 <= dim and cols <= dim, got dim={dim}, cols={cols}");
    if cols == 0 {
        return Ok(CMatrix::zeros(dim, 0));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(dim, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let r_diag = qr.r().diagonal();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let d = r_diag[j];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        col *= phase;
    }
    Ok(q)
}

/// Eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues are returned in descending order; column `k` of the
/// orthogonal factor is the eigenvector of eigenvalue `k`.
pub fn sym_eigen(s: &Matrix) -> Result<(Vec<f64>, OrthogonalMatrix)> {
    ensure!(s.is_square() && s.nrows() > 0, InvalidArgument, "symmetric eigenproblem needs a non-empty square matrix");
    let scale = max_abs(s);
    let asym = max_abs(&(s - s.transpose()));
    ensure!(asym <= 1e-10 * scale.max(f64::MIN_POSITIVE), InvalidArgument, "matrix is not symmetric: ‖S−Sᵀ‖_max = {asym:e}");

    let eig = s.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..s.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Matrix::from_fn(s.nrows(), s.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, OrthogonalMatrix(vectors)))
}

/// Real canonical form of an antisymmetric matrix.
///
/// Returns `(M, ω)` with `M h Mᵀ = ⊕ᵢ [[0, ωᵢ], [−ωᵢ, 0]]`, `ωᵢ ≥ 0` sorted
/// descending. Row `2i` of `M` carries the first and row `2i+1` the second
/// vector of block `i`.
pub fn antisym_canonical(h: &Matrix) -> Result<(OrthogonalMatrix, Vec<f64>)> {
    ensure!(h.is_square(), InvalidArgument, "antisymmetric matrix must be square");
    let n = h.nrows();
    ensure!(n >= 2 && n.is_multiple_of(2), InvalidArgument, "antisymmetric canonical form needs an even dimension >= 2, got {n}");
    let scale = max_abs(h);
    let sym = max_abs(&(h + h.transpose()));
    ensure!(sym <= 1e-10 * scale.max(f64::MIN_POSITIVE), InvalidArgument, "matrix is not antisymmetric: ‖h+hᵀ‖_max = {sym:e}");

    let rows = canonical_rows(h)?;
    let mut m = Matrix::zeros(n, n);
    for (k, row) in rows.iter().enumerate() {
        m.set_row(k, &row.transpose());
    }
    reorthonormalize_rows(&mut m);

    let mut omega = Vec::with_capacity(n / 2);
    for i in 0..n / 2 {
        let u = m.row(2 * i).transpose();
        let v = m.row(2 * i + 1).transpose();
        let w = u.dot(&(h * &v));
        if w < 0.0 {
            m.swap_rows(2 * i, 2 * i + 1);
        }
        fix_block_rotation(&mut m, i);
        omega.push(w.abs());
    }
    Ok((OrthogonalMatrix(m), omega))
}

// Rotations inside a 2×2 block leave the block invariant. Pick the one that
// puts the block's largest coordinate entirely into its first vector, so a
// matrix that is already in canonical form gets M = 1.
fn fix_block_rotation(m: &mut Matrix, block: usize) {
    let (r0, r1) = (2 * block, 2 * block + 1);
    let mut best = 0;
    let mut best_norm = -1.0;
    for k in 0..m.ncols() {
        let w = m[(r0, k)].powi(2) + m[(r1, k)].powi(2);
        if w > best_norm * (1.0 + 1e-12) {
            best = k;
            best_norm = w;
        }
    }
    let theta = m[(r1, best)].atan2(m[(r0, best)]);
    let (s, c) = theta.sin_cos();
    for k in 0..m.ncols() {
        let (u, v) = (m[(r0, k)], m[(r1, k)]);
        m[(r0, k)] = c * u + s * v;
        m[(r1, k)] = -s * u + c * v;
    }
}

// Below this fraction of the largest ω, the ±ω eigenvectors of i·h are no
// longer reliably separated and the block is canonicalized recursively.
const SEPARATION: f64 = 1e-3;

fn canonical_rows(h: &Matrix) -> Result<Vec<DVector<f64>>> {
    let n = h.nrows();
    if max_abs(h) == 0.0 {
        return Ok((0..n).map(|k| unit_vector(n, k)).collect());
    }

    // i·h is Hermitian with spectrum ±ωᵢ. An eigenvector a + ib of +ω gives
    // h a = ω b and h b = −ω a.
    let ih = CMatrix::from_fn(n, n, |i, j| Complex64::new(0.0, h[(i, j)]));
    let eig = ih.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[order[0]];
    let cutoff = SEPARATION * top;

    let mut rows = Vec::with_capacity(n);
    for &k in order.iter().take(n / 2) {
        if eig.eigenvalues[k] <= cutoff {
            break;
        }
        let w = eig.eigenvectors.column(k);
        let re = DVector::from_iterator(n, w.iter().map(|z| z.re * std::f64::consts::SQRT_2));
        let im = DVector::from_iterator(n, w.iter().map(|z| z.im * std::f64::consts::SQRT_2));
        rows.push(im);
        rows.push(re);
    }

    let rest = n - rows.len();
    if rest > 0 {
        let basis = complement_basis(&rows, n, rest)?;
        let sub = basis.transpose() * h * &basis;
        let sub = (&sub - sub.transpose()) * 0.5;
        for r in canonical_rows(&sub)? {
            rows.push(&basis * r);
        }
    }
    Ok(rows)
}

/// Orthonormal basis (as columns) of the complement of `rows`.
fn complement_basis(rows: &[DVector<f64>], n: usize, rank: usize) -> Result<Matrix> {
    let mut proj = Matrix::identity(n, n);
    for r in rows {
        proj -= r * r.transpose();
    }
    let proj = (&proj + proj.transpose()) * 0.5;
    let (values, vectors) = sym_eigen(&proj)?;
    if values[rank - 1] < 0.5 {
        return Err(Error::InternalConsistency(format!(
            "complement of {} canonical vectors has rank below {rank}",
            rows.len()
        )));
    }
    Ok(vectors.as_matrix().columns(0, rank).into_owned())
}

fn unit_vector(n: usize, k: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[k] = 1.0;
    e
}

// Two passes of modified Gram-Schmidt over the rows.
fn reorthonormalize_rows(m: &mut Matrix) {
    let mut cols = m.transpose();
    for _ in 0..2 {
        for i in 0..cols.ncols() {
            for j in 0..i {
                let d = cols.column(i).dot(&cols.column(j));
                let cj = cols.column(j).into_owned();
                cols.column_mut(i).axpy(-d, &cj, 1.0);
            }
            let norm = cols.column(i).norm();
            cols.column_mut(i).unscale_mut(norm);
        }
    }
    *m = cols.transpose();
}
