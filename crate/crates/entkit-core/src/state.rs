//! Bipartite pure states and their antilinear-operator representation.
//!
//! A pure state of a two-part system with dimensions `d1 x d2` is stored as
//! its coefficient matrix `F` in the standard product basis: entry `(j, k)`
//! multiplies `|j> (x) |k>`. Taking the partial scalar product of a nearby
//! vector `psi` with the state,
//!
//! ```text
//! psi  |->  sum_{j,k} F[j,k] conj(psi[j]) |k>
//! ```
//!
//! defines an antilinear map from the nearby space into the remote one. That
//! map determines the state completely, and all structure computed by this
//! crate (reduced states, Schmidt data, the correlation operator) is read off
//! from it.
//!
//! Antilinear operators are represented as `psi -> M * conj(psi)`. Under this
//! encoding the adjoint with respect to `(chi, A psi) = ((A^dag chi), psi)*`
//! is the plain transpose of `M`, and the composition of two antilinear
//! operators is the linear operator `M1 * conj(M2)`.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::linalg::{self, CMatrix, CVector, LinalgError};
use crate::tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    /// Coefficient matrices and operator representations must have unit
    /// Frobenius norm.
    #[error("state norm is {norm:.12}, expected 1 within {bound:.1e}")]
    NotNormalized { norm: f64, bound: f64 },
    /// NaN or infinity among the coefficients.
    #[error("non-finite coefficient at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    /// Vector or operator dimensions do not match the state.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// Both operands of the Hilbert-Schmidt inner product must share a shape.
    #[error("shape mismatch: {a_rows}x{a_cols} vs {b_rows}x{b_cols}")]
    ShapeMismatch { a_rows: usize, a_cols: usize, b_rows: usize, b_cols: usize },
    /// The coefficient matrix vanishes, so no state can be normalized from it.
    #[error("cannot normalize a zero coefficient matrix")]
    ZeroState,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type StateResult<T> = Result<T, StateError>;

/// Pure state of a bipartite system, stored as its coefficient matrix in the
/// standard product basis. Unit Frobenius norm is enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    coeffs: CMatrix,
}

impl BipartiteState {
    /// Wraps a coefficient matrix, rejecting non-finite entries and norm
    /// defects beyond [`tolerances::UNIT_NORM`].
    pub fn new(coeffs: CMatrix) -> StateResult<Self> {
        for row in 0..coeffs.nrows() {
            for col in 0..coeffs.ncols() {
                let z = coeffs[(row, col)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(StateError::NonFinite { row, col });
                }
            }
        }
        let norm = coeffs.norm();
        if (norm - 1.0).abs() > tolerances::UNIT_NORM {
            return Err(StateError::NotNormalized { norm, bound: tolerances::UNIT_NORM });
        }
        Ok(Self { coeffs })
    }

    /// Rescales an arbitrary nonzero coefficient matrix to unit norm.
    pub fn normalized(coeffs: CMatrix) -> StateResult<Self> {
        let norm = coeffs.norm();
        if !norm.is_finite() {
            return Err(StateError::NonFinite { row: 0, col: 0 });
        }
        if norm == 0.0 {
            return Err(StateError::ZeroState);
        }
        Self::new(coeffs.scale(1.0 / norm))
    }

    /// State whose coefficients are i.i.d. standard-normal complex numbers,
    /// normalized. Fully determined by `(d1, d2, seed)`.
    pub fn random(d1: usize, d2: usize, seed: u64) -> Self {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let coeffs = CMatrix::from_fn(d1, d2, |_, _| C64::new(draw(), draw()));
        Self::normalized(coeffs).expect("normal samples are finite and almost surely nonzero")
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    /// Nearby-subsystem dimension.
    pub fn d1(&self) -> usize {
        self.coeffs.nrows()
    }

    /// Remote-subsystem dimension.
    pub fn d2(&self) -> usize {
        self.coeffs.ncols()
    }
}

/// Antilinear operator `psi -> matrix * conj(psi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearOp {
    matrix: CMatrix,
}

impl AntilinearOp {
    pub fn new(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Input dimension (length of vectors the operator accepts).
    pub fn dim_in(&self) -> usize {
        self.matrix.ncols()
    }

    /// Output dimension.
    pub fn dim_out(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, psi: &CVector) -> CVector {
        assert_eq!(psi.len(), self.dim_in(), "antilinear operator input dimension");
        &self.matrix * psi.conjugate()
    }

    /// Adjoint under `(chi, A psi) = ((A^dag chi), psi)*`: the transposed
    /// matrix, not the conjugate transpose.
    pub fn adjoint(&self) -> AntilinearOp {
        AntilinearOp::new(self.matrix.transpose())
    }

    /// Linear operator `self . other` (two antilinearities cancel):
    /// `M_self * conj(M_other)`.
    pub fn compose(&self, other: &AntilinearOp) -> CMatrix {
        &self.matrix * other.matrix.conjugate()
    }

    /// Antilinear operator `lin . self`.
    pub fn before_linear(&self, lin: &CMatrix) -> AntilinearOp {
        AntilinearOp::new(lin * &self.matrix)
    }

    /// Antilinear operator `self . lin`.
    pub fn after_linear(&self, lin: &CMatrix) -> AntilinearOp {
        AntilinearOp::new(&self.matrix * lin.conjugate())
    }

    /// Linear operator `self . lin . self^dag` (conjugation by an antilinear
    /// map): `M * conj(lin) * M^dag`.
    pub fn sandwich(&self, lin: &CMatrix) -> CMatrix {
        &self.matrix * lin.conjugate() * self.matrix.adjoint()
    }
}

/// Schmidt (biorthogonal) expansion data of a bipartite state.
#[derive(Debug, Clone)]
pub struct SchmidtData {
    /// Positive Schmidt coefficients `sqrt(r_i)`, descending. Zero modes are
    /// dropped.
    pub coefficients: Vec<f64>,
    /// Orthonormal nearby vectors, one per coefficient.
    pub left: Vec<CVector>,
    /// Orthonormal remote vectors, one per coefficient.
    pub right: Vec<CVector>,
}

impl SchmidtData {
    /// Number of nonzero Schmidt terms.
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Squared coefficients: the common positive spectrum of both reduced
    /// density operators.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }
}

/// The antiunitary correlation operator of a state together with the range
/// projectors it intertwines.
#[derive(Debug, Clone)]
pub struct CorrelationOperator {
    /// Partial antiunitary `U` mapping the range of `rho1` onto the range of
    /// `rho2` (zero on the orthogonal complement).
    pub op: AntilinearOp,
    /// Projector onto the range of `rho1` (the domain of `op`).
    pub q1: CMatrix,
    /// Projector onto the range of `rho2` (the image of `op`).
    pub q2: CMatrix,
}

/// Remote vector `sum_{j,k} F[j,k] conj(psi[j]) |k>` left by projecting the
/// nearby factor on `psi`. Its squared norm is the probability of the
/// corresponding nearby event; the vector is not normalized.
pub fn partial_scalar_product(psi: &CVector, state: &BipartiteState) -> StateResult<CVector> {
    if psi.len() != state.d1() {
        return Err(StateError::DimensionMismatch { expected: state.d1(), got: psi.len() });
    }
    Ok(state.coeffs.transpose() * psi.conjugate())
}

/// The antilinear operator representing the state: `M = F^T`.
pub fn to_antilinear(state: &BipartiteState) -> AntilinearOp {
    AntilinearOp::new(state.coeffs.transpose())
}

/// Reads a state back from its operator representation.
pub fn from_antilinear(op: &AntilinearOp) -> StateResult<BipartiteState> {
    BipartiteState::new(op.matrix().transpose())
}

/// Hilbert-Schmidt inner product `tr(M_a^dag M_b)` of two operator
/// representations; equals the overlap `<state_a | state_b>`.
pub fn hs_inner(a: &AntilinearOp, b: &AntilinearOp) -> StateResult<C64> {
    if a.matrix().shape() != b.matrix().shape() {
        let (a_rows, a_cols) = a.matrix().shape();
        let (b_rows, b_cols) = b.matrix().shape();
        return Err(StateError::ShapeMismatch { a_rows, a_cols, b_rows, b_cols });
    }
    Ok((a.matrix().adjoint() * b.matrix()).trace())
}

/// Reduced density operators `(rho1, rho2)` of the two subsystems, computed
/// as `A^dag A` and `A A^dag` from the antilinear representation. Both are
/// positive with equal positive spectra.
pub fn reduced_states(state: &BipartiteState) -> (CMatrix, CMatrix) {
    let op = to_antilinear(state);
    let adj = op.adjoint();
    (adj.compose(&op), op.compose(&adj))
}

/// Schmidt expansion via the singular value decomposition of the coefficient
/// matrix. Coefficients below the rank cutoff are dropped together with
/// their vectors.
pub fn schmidt(state: &BipartiteState) -> SchmidtData {
    let svd = linalg::svd(state.coeffs()).expect("validated state has finite coefficients");
    let weights: Vec<f64> = svd.singulars.iter().map(|s| s * s).collect();
    let max = weights.first().copied().unwrap_or(0.0);
    let cutoff = weights.len() as f64 * max * tolerances::RANK_REL;
    let rank = weights.iter().filter(|w| **w > cutoff).count();
    let left = linalg::columns(&svd.left)[..rank].to_vec();
    let right: Vec<CVector> = linalg::columns(&svd.right)[..rank]
        .iter()
        .map(|v| v.conjugate())
        .collect();
    SchmidtData { coefficients: svd.singulars[..rank].to_vec(), left, right }
}

/// The correlation operator: the antiunitary factor of the polar
/// decomposition `A = rho2^{1/2} U` restricted to the range of `rho1`,
/// computed through the uniqueness formula `U = pinv(rho2)^{1/2} A`.
pub fn correlation_operator(state: &BipartiteState) -> CorrelationOperator {
    let (rho1, rho2) = reduced_states(state);
    let inv_root =
        linalg::pinv_on_range(&rho2, -0.5).expect("reduced state is positive semidefinite");
    let q1 = linalg::range_projector(&rho1).expect("reduced state is positive semidefinite");
    let q2 = linalg::range_projector(&rho2).expect("reduced state is positive semidefinite");
    let op = to_antilinear(state).before_linear(&inv_root);
    CorrelationOperator { op, q1, q2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SQRT3_2: f64 = 0.8660254037844386;
    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn cm(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(
            rows,
            cols,
            &entries.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>(),
        )
    }

    /// Product state |0>|0>.
    fn s1() -> BipartiteState {
        BipartiteState::new(cm(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap()
    }

    /// Maximally entangled state with equal real coefficients on |00>, |11>.
    fn s2() -> BipartiteState {
        BipartiteState::new(cm(2, 2, &[INV_SQRT2, 0.0, 0.0, INV_SQRT2])).unwrap()
    }

    /// Unequal-weight diagonal state, reduced spectra (3/4, 1/4).
    fn s3() -> BipartiteState {
        BipartiteState::new(cm(2, 2, &[SQRT3_2, 0.0, 0.0, 0.5])).unwrap()
    }

    fn e(dim: usize, idx: usize) -> CVector {
        CVector::from_fn(dim, |i, _| C64::new(if i == idx { 1.0 } else { 0.0 }, 0.0))
    }

    #[test]
    fn construction_rejects_norm_defect() {
        let err = BipartiteState::new(cm(2, 2, &[1.0, 0.0, 0.0, 0.1])).unwrap_err();
        assert!(matches!(err, StateError::NotNormalized { .. }));
    }

    #[test]
    fn normalized_constructor_rescales() {
        let state = BipartiteState::normalized(cm(2, 2, &[3.0, 0.0, 0.0, 4.0])).unwrap();
        assert_relative_eq!(state.coeffs()[(0, 0)].re, 0.6, max_relative = 1e-15);
        assert_relative_eq!(state.coeffs()[(1, 1)].re, 0.8, max_relative = 1e-15);
    }

    #[test]
    fn partial_scalar_product_on_entangled_state() {
        let out = partial_scalar_product(&e(2, 0), &s2()).unwrap();
        assert_relative_eq!(out[0].re, INV_SQRT2, max_relative = 1e-15);
        assert!(out[1].norm() < 1e-15);
    }

    #[test]
    fn partial_scalar_product_of_orthogonal_event_vanishes() {
        let out = partial_scalar_product(&e(2, 1), &s1()).unwrap();
        assert!(out.norm() < 1e-15);
    }

    #[test]
    fn partial_scalar_product_conjugates_the_nearby_vector() {
        let psi = CVector::from_vec(vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)]);
        let out = partial_scalar_product(&psi, &s2()).unwrap();
        assert_relative_eq!(out[0].im, -INV_SQRT2, max_relative = 1e-15);
    }

    #[test]
    fn antilinear_matrix_is_transposed_coefficients() {
        let f = BipartiteState::normalized(CMatrix::from_row_slice(
            2,
            3,
            &[
                C64::new(0.1, 0.2),
                C64::new(0.3, -0.1),
                C64::new(0.0, 0.5),
                C64::new(0.4, 0.0),
                C64::new(-0.2, 0.2),
                C64::new(0.1, -0.3),
            ],
        ))
        .unwrap();
        let op = to_antilinear(&f);
        assert_eq!(op.matrix().shape(), (3, 2));
        assert_eq!(op.matrix()[(2, 1)], f.coeffs()[(1, 2)]);
        let back = from_antilinear(&op).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn adjoint_satisfies_the_antilinear_pairing() {
        // (chi, A psi) = ((A^dag chi), psi)* with (a, b) conjugate-linear in a.
        let op = to_antilinear(&s3());
        let adj = op.adjoint();
        let chi = CVector::from_vec(vec![C64::new(0.6, 0.1), C64::new(-0.2, 0.77)]);
        let psi = CVector::from_vec(vec![C64::new(0.3, -0.4), C64::new(0.5, 0.2)]);
        let lhs: C64 = chi.dotc(&op.apply(&psi));
        let rhs: C64 = adj.apply(&chi).dotc(&psi).conj();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn hs_inner_is_the_state_overlap() {
        let got = hs_inner(&to_antilinear(&s1()), &to_antilinear(&s2())).unwrap();
        assert_relative_eq!(got.re, INV_SQRT2, max_relative = 1e-15);
        assert!(got.im.abs() < 1e-15);
        let norm = hs_inner(&to_antilinear(&s3()), &to_antilinear(&s3())).unwrap();
        assert_relative_eq!(norm.re, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn reduced_states_of_diagonal_state() {
        let (rho1, rho2) = reduced_states(&s3());
        assert!((rho1 - cm(2, 2, &[0.75, 0.0, 0.0, 0.25])).norm() < 1e-15);
        assert!((rho2 - cm(2, 2, &[0.75, 0.0, 0.0, 0.25])).norm() < 1e-15);
    }

    #[test]
    fn reduced_states_share_their_positive_spectrum() {
        let state = BipartiteState::random(3, 5, 11);
        let (rho1, rho2) = reduced_states(&state);
        let s1 = linalg::eig_hermitian(&rho1).unwrap();
        let s2 = linalg::eig_hermitian(&rho2).unwrap();
        assert_eq!(s1.rank, s2.rank);
        for i in 0..s1.rank {
            assert_relative_eq!(s1.eigenvalues[i], s2.eigenvalues[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn schmidt_of_maximally_entangled_state() {
        let data = schmidt(&s2());
        assert_eq!(data.rank(), 2);
        assert_relative_eq!(data.coefficients[0], INV_SQRT2, max_relative = 1e-14);
        assert_relative_eq!(data.coefficients[1], INV_SQRT2, max_relative = 1e-14);
    }

    #[test]
    fn schmidt_of_product_state_has_rank_one() {
        let data = schmidt(&s1());
        assert_eq!(data.rank(), 1);
        assert_relative_eq!(data.coefficients[0], 1.0, max_relative = 1e-14);
        assert!((data.left[0][0].re - 1.0).abs() < 1e-14);
        assert!((data.right[0][0].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn schmidt_reconstructs_the_coefficient_matrix() {
        let state = BipartiteState::random(4, 3, 7);
        let data = schmidt(&state);
        let mut rec = CMatrix::zeros(4, 3);
        for i in 0..data.rank() {
            rec += (&data.left[i] * data.right[i].transpose()).scale(data.coefficients[i]);
        }
        assert!((rec - state.coeffs()).norm() < 1e-12);
    }

    #[test]
    fn correlation_operator_of_equal_weights_is_plain_conjugation() {
        let corr = correlation_operator(&s2());
        assert!((corr.op.matrix() - CMatrix::identity(2, 2)).norm() < 1e-13);
        assert!((corr.q1 - CMatrix::identity(2, 2)).norm() < 1e-13);
    }

    #[test]
    fn correlation_operator_of_product_state_is_rank_one() {
        let corr = correlation_operator(&s1());
        assert!((corr.op.matrix() - cm(2, 2, &[1.0, 0.0, 0.0, 0.0])).norm() < 1e-13);
        assert!((corr.q2 - cm(2, 2, &[1.0, 0.0, 0.0, 0.0])).norm() < 1e-13);
    }

    #[test]
    fn correlation_operator_transports_left_schmidt_vectors_to_right() {
        let state = BipartiteState::random(3, 4, 23);
        let corr = correlation_operator(&state);
        let data = schmidt(&state);
        for i in 0..data.rank() {
            let image = corr.op.apply(&data.left[i]);
            assert!((image - &data.right[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn correlation_operator_is_partially_antiunitary() {
        let state = BipartiteState::random(4, 2, 5);
        let corr = correlation_operator(&state);
        let adj = corr.op.adjoint();
        assert!((adj.compose(&corr.op) - &corr.q1).norm() < 1e-10);
        assert!((corr.op.compose(&adj) - &corr.q2).norm() < 1e-10);
    }

    #[test]
    fn polar_reconstructions_recover_the_state_operator() {
        for seed in [1_u64, 2, 3] {
            let state = BipartiteState::random(3, 3, seed);
            let op = to_antilinear(&state);
            let (rho1, rho2) = reduced_states(&state);
            let corr = correlation_operator(&state);
            let sqrt1 = linalg::op_sqrt(&rho1).unwrap();
            let sqrt2 = linalg::op_sqrt(&rho2).unwrap();
            // A = U rho1^{1/2}
            let via_right = corr.op.after_linear(&sqrt1);
            assert!((via_right.matrix() - op.matrix()).norm() < 1e-10);
            // A = rho2^{1/2} U Q1
            let via_left = corr.op.after_linear(&corr.q1).before_linear(&sqrt2);
            assert!((via_left.matrix() - op.matrix()).norm() < 1e-10);
        }
    }

    #[test]
    fn random_states_are_deterministic_per_seed() {
        let a = BipartiteState::random(3, 4, 99);
        let b = BipartiteState::random(3, 4, 99);
        assert_eq!(a, b);
        assert_relative_eq!(a.coeffs().norm(), 1.0, max_relative = 1e-14);
    }
}
