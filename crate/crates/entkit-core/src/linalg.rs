//! Dense complex linear algebra on desk-scale Hilbert spaces.
//!
//! Decompositions are delegated to `nalgebra` and then canonicalized so that
//! repeated calls on the same input are bit-identical: eigenvalues and
//! singular values come out in descending order, every vector's phase is
//! fixed through [`crate::canonical::canonical_phase`], and (near-)degenerate
//! groups are ordered by a lexicographic key on rounded entries.
//!
//! Rank decisions use the cutoff `eps = dim * lambda_max * RANK_REL`; spectral
//! functions (`op_sqrt`, `range_projector`, `pinv_on_range`) treat eigenvalues
//! at or below the cutoff as exact zeros, so pseudo-inverses act on the range
//! only.

use nalgebra as na;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::canonical::{canonical_phase, canonical_phase_factor, lex_key};
use crate::tolerances;

pub type CMatrix = na::DMatrix<C64>;
pub type CVector = na::DVector<C64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    /// The operation needs a square matrix.
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    /// Hermiticity defect above tolerance.
    #[error("matrix is not Hermitian: |H - H*| = {deviation:.3e} exceeds {bound:.3e}")]
    NotHermitian { deviation: f64, bound: f64 },
    /// A claimed positive-semidefinite operator has a genuinely negative eigenvalue.
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.6e} below -{bound:.3e}")]
    NotPositiveSemidefinite { eigenvalue: f64, bound: f64 },
    /// NaN or infinity in the input.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    /// Zero-dimensional input.
    #[error("empty matrix")]
    Empty,
}

pub type LinalgResult<T> = Result<T, LinalgError>;

/// Eigendecomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors as columns, aligned with `eigenvalues`.
    pub eigenvectors: CMatrix,
    /// Number of eigenvalues above the rank cutoff in magnitude.
    pub rank: usize,
}

impl SpectralData {
    /// Rank cutoff used for this spectrum: `dim * lambda_max * RANK_REL`.
    pub fn rank_cutoff(&self) -> f64 {
        rank_cutoff(self.eigenvalues.len(), &self.eigenvalues)
    }

    /// Eigenvector columns as owned vectors.
    pub fn vectors(&self) -> Vec<CVector> {
        columns(&self.eigenvectors)
    }
}

/// Singular value decomposition `m = left * diag(singulars) * right^adjoint`.
#[derive(Debug, Clone)]
pub struct SvdData {
    /// Left singular vectors as columns, `rows x k`.
    pub left: CMatrix,
    /// Singular values in descending order, `k = min(rows, cols)` of them.
    pub singulars: Vec<f64>,
    /// Right singular vectors as columns, `cols x k`.
    pub right: CMatrix,
}

fn rank_cutoff(dim: usize, values: &[f64]) -> f64 {
    let max_abs = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    dim as f64 * max_abs * tolerances::RANK_REL
}

fn ensure_finite(m: &CMatrix) -> LinalgResult<()> {
    for row in 0..m.nrows() {
        for col in 0..m.ncols() {
            let z = m[(row, col)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(LinalgError::NonFinite { row, col });
            }
        }
    }
    Ok(())
}

fn ensure_square(m: &CMatrix) -> LinalgResult<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(LinalgError::Empty);
    }
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(())
}

/// Frobenius deviation of `m` from its own adjoint.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

fn ensure_hermitian(m: &CMatrix) -> LinalgResult<()> {
    ensure_square(m)?;
    ensure_finite(m)?;
    let deviation = hermiticity_deviation(m);
    let bound = tolerances::HERMITICITY_REL * (1.0 + m.norm());
    if deviation > bound {
        return Err(LinalgError::NotHermitian { deviation, bound });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix with canonical ordering and
/// phases. The input may deviate from exact Hermiticity by roundoff; it is
/// symmetrized before the solve.
pub fn eig_hermitian(h: &CMatrix) -> LinalgResult<SpectralData> {
    ensure_hermitian(h)?;
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let dim = h.nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors: Vec<CVector> = order
        .iter()
        .map(|&i| canonical_phase(&eig.eigenvectors.column(i).into_owned()))
        .collect();
    sort_ties_by(&values, &mut vectors, lex_key);
    let cutoff = rank_cutoff(dim, &values);
    let rank = values.iter().filter(|v| v.abs() > cutoff).count();
    Ok(SpectralData {
        eigenvalues: values,
        eigenvectors: from_columns(&vectors),
        rank,
    })
}

/// Orders items inside runs of (near-)equal values by a deterministic key,
/// keeping the descending value order intact elsewhere.
fn sort_ties_by<T, K: Ord, F: Fn(&T) -> K>(values: &[f64], items: &mut [T], key: F) {
    let tie = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())) * tolerances::WEIGHT_ROUND;
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && (values[end - 1] - values[end]).abs() <= tie {
            end += 1;
        }
        if end - start > 1 {
            items[start..end].sort_by_key(|item| key(item));
        }
        start = end;
    }
}

/// Singular value decomposition with descending singular values and canonical
/// phases on the left vectors (the matching rotation is applied to the right
/// vectors, so the product is unchanged).
pub fn svd(m: &CMatrix) -> LinalgResult<SvdData> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(LinalgError::Empty);
    }
    ensure_finite(m)?;
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singulars: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut pairs: Vec<(CVector, CVector)> = order
        .iter()
        .map(|&i| {
            let lu = u.column(i).into_owned();
            let rv: CVector = v_t.row(i).adjoint();
            let phase = canonical_phase_factor(&lu);
            (lu * phase, rv * phase)
        })
        .collect();
    sort_ties_by(&singulars, &mut pairs, |(l, _)| lex_key(l));
    let (left, right): (Vec<CVector>, Vec<CVector>) = pairs.into_iter().unzip();
    Ok(SvdData {
        left: from_columns(&left),
        singulars,
        right: from_columns(&right),
    })
}

/// Spectrum of a positive-semidefinite operator; tiny negative eigenvalues
/// (within the rank cutoff) are clamped to zero, genuine ones are rejected.
pub fn eig_psd(rho: &CMatrix) -> LinalgResult<SpectralData> {
    let mut spectral = eig_hermitian(rho)?;
    let cutoff = spectral.rank_cutoff();
    if let Some(&min) = spectral.eigenvalues.iter().find(|v| **v < -cutoff) {
        return Err(LinalgError::NotPositiveSemidefinite { eigenvalue: min, bound: cutoff });
    }
    for v in spectral.eigenvalues.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(spectral)
}

/// Applies a function to the spectrum of a PSD operator, restricted to
/// eigenvalues above the rank cutoff; the rest contribute zero.
fn spectral_map<F>(rho: &CMatrix, f: F) -> LinalgResult<CMatrix>
where
    F: Fn(f64) -> f64,
{
    let spectral = eig_psd(rho)?;
    let cutoff = spectral.rank_cutoff();
    let dim = rho.nrows();
    let mut out = CMatrix::zeros(dim, dim);
    for (i, &lambda) in spectral.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let v = spectral.eigenvectors.column(i);
            out += (v * v.adjoint()).scale(f(lambda));
        }
    }
    Ok(out)
}

/// Positive-operator square root of a PSD operator.
pub fn op_sqrt(rho: &CMatrix) -> LinalgResult<CMatrix> {
    spectral_map(rho, f64::sqrt)
}

/// Orthogonal projector onto the range of a PSD operator.
pub fn range_projector(rho: &CMatrix) -> LinalgResult<CMatrix> {
    spectral_map(rho, |_| 1.0)
}

/// Pseudo-inverse power of a PSD operator: eigenvalues above the rank cutoff
/// are raised to `exponent` (here `-1` or `-1/2`), the null space is mapped
/// to zero.
pub fn pinv_on_range(rho: &CMatrix, exponent: f64) -> LinalgResult<CMatrix> {
    spectral_map(rho, |lambda| lambda.powf(exponent))
}

/// Rank of a PSD operator at the shared cutoff.
pub fn psd_rank(rho: &CMatrix) -> LinalgResult<usize> {
    Ok(eig_psd(rho)?.rank)
}

/// Deterministic orthonormal basis of the range of a PSD operator: the
/// eigenvectors with eigenvalues above the rank cutoff.
pub fn range_basis(rho: &CMatrix) -> LinalgResult<Vec<CVector>> {
    let spectral = eig_psd(rho)?;
    Ok(spectral.vectors()[..spectral.rank].to_vec())
}

/// Deterministic orthonormal basis of the range that is not an eigenbasis
/// (for rank above one): the range eigenvectors mixed by the discrete
/// Fourier matrix. Useful as a default probe basis.
pub fn fourier_range_basis(rho: &CMatrix) -> LinalgResult<Vec<CVector>> {
    let basis = range_basis(rho)?;
    let rank = basis.len();
    let scale = 1.0 / (rank as f64).sqrt();
    Ok((0..rank)
        .map(|k| {
            let mut out = CVector::zeros(rho.nrows());
            for (j, v) in basis.iter().enumerate() {
                let angle = std::f64::consts::TAU * (j * k) as f64 / rank as f64;
                out += v * (C64::new(0.0, angle).exp() * scale);
            }
            out
        })
        .collect())
}

/// Stacks owned vectors as matrix columns.
pub fn from_columns(cols: &[CVector]) -> CMatrix {
    assert!(!cols.is_empty(), "cannot build a matrix from zero columns");
    let rows = cols[0].len();
    CMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Matrix columns as owned vectors.
pub fn columns(m: &CMatrix) -> Vec<CVector> {
    (0..m.ncols()).map(|j| m.column(j).into_owned()).collect()
}

/// Largest deviation of `vectors` from pairwise orthonormality.
pub fn orthonormality_deviation(vectors: &[CVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate() {
            let overlap: C64 = u.dotc(v);
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((overlap - C64::new(expected, 0.0)).norm());
        }
    }
    worst
}
