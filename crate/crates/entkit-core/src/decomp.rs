//! Convex decompositions of density operators and their bijection with
//! orthonormal range bases.
//!
//! A decomposition `rho = sum_i p_i |phi_i><phi_i|` with linearly independent
//! `phi_i` behaves like a basis expansion: every vector in the range of `rho`
//! expands uniquely over the `phi_i`, and each unit vector in the range
//! carries a characteristic weight, the one weight it can have in any such
//! decomposition. The bijection with orthonormal bases of the range is
//!
//! ```text
//! forward:  p_i = <e_i| rho |e_i>,   phi_i = p_i^{-1/2} rho^{1/2} e_i
//! inverse:  e_i = p_i^{1/2} pinv(rho)^{1/2} phi_i
//! ```
//!
//! Decompositions are stored canonically: weights descending, ties broken by
//! a lexicographic key on rounded entries, and every vector phase-fixed. All
//! of that is unobservable in `rho` itself.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::canonical::{canonical_phase, lex_key, round_weight};
use crate::linalg::{self, CMatrix, CVector, LinalgError};
use crate::tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompError {
    /// Decompositions carry at least one term.
    #[error("decomposition has no terms")]
    Empty,
    /// Weights are probabilities of a complete event family.
    #[error("weights sum to {sum:.12}, expected 1")]
    WeightSum { sum: f64 },
    /// Every weight must be strictly positive.
    #[error("weight {value:.3e} at term {index} is not positive")]
    NonPositiveWeight { index: usize, value: f64 },
    /// Every decomposition vector must be unit.
    #[error("vector {index} has norm {norm:.12}, expected 1")]
    NotUnit { index: usize, norm: f64 },
    /// All vectors must share the parent dimension.
    #[error("vector {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    /// Basis size must match the rank of the density operator.
    #[error("basis has {got} vectors, range dimension is {expected}")]
    WrongBasisSize { expected: usize, got: usize },
    /// Basis vectors must be pairwise orthonormal.
    #[error("basis deviates from orthonormality by {deviation:.3e}")]
    NotOrthonormal { deviation: f64 },
    /// A vector that must lie in the range of the operator does not.
    #[error("vector {index} leaves the range: residual {residual:.3e}")]
    OutsideRange { index: usize, residual: f64 },
    /// The decomposition does not assemble the given density operator.
    #[error("decomposition reconstructs the operator only to {residual:.3e}")]
    Inconsistent { residual: f64 },
    /// Unique expansion needs linearly independent vectors.
    #[error("decomposition vectors are linearly dependent")]
    Dependent,
    /// Density operators must have unit trace.
    #[error("operator trace is {trace:.12}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type DecompResult<T> = Result<T, DecompError>;

/// A finite convex decomposition of a density operator into weighted unit
/// vectors, held in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    weights: Vec<f64>,
    vectors: Vec<CVector>,
    dim: usize,
}

impl Decomposition {
    /// Validates terms and stores them canonically (descending weight,
    /// lexicographic tie-break, phases fixed).
    pub fn new(terms: Vec<(f64, CVector)>) -> DecompResult<Self> {
        if terms.is_empty() {
            return Err(DecompError::Empty);
        }
        let dim = terms[0].1.len();
        for (index, (weight, vector)) in terms.iter().enumerate() {
            if vector.len() != dim {
                return Err(DecompError::DimensionMismatch {
                    index,
                    expected: dim,
                    got: vector.len(),
                });
            }
            if !weight.is_finite() || *weight <= 0.0 {
                return Err(DecompError::NonPositiveWeight { index, value: *weight });
            }
            let norm = vector.norm();
            if (norm - 1.0).abs() > tolerances::UNIT_NORM {
                return Err(DecompError::NotUnit { index, norm });
            }
        }
        let sum: f64 = terms.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() > tolerances::WEIGHT_SUM {
            return Err(DecompError::WeightSum { sum });
        }
        let mut canonical: Vec<(f64, CVector)> = terms
            .into_iter()
            .map(|(w, v)| (w, canonical_phase(&v)))
            .collect();
        canonical.sort_by(|a, b| {
            round_weight(b.0)
                .cmp(&round_weight(a.0))
                .then_with(|| lex_key(&a.1).cmp(&lex_key(&b.1)))
        });
        let (weights, vectors) = canonical.into_iter().unzip();
        Ok(Self { weights, vectors, dim })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Dimension of the parent Hilbert space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &CVector)> {
        self.weights.iter().copied().zip(self.vectors.iter())
    }

    /// The density operator `sum_i p_i |phi_i><phi_i|` assembled from the
    /// terms.
    pub fn reconstruct(&self) -> CMatrix {
        let mut rho = CMatrix::zeros(self.dim, self.dim);
        for (weight, vector) in self.iter() {
            rho += (vector * vector.adjoint()).scale(weight);
        }
        rho
    }

    /// True when the decomposition vectors are linearly independent.
    pub fn is_linearly_independent(&self) -> bool {
        is_linearly_independent(&self.vectors)
    }
}

fn gram(vectors: &[CVector]) -> CMatrix {
    let n = vectors.len();
    CMatrix::from_fn(n, n, |i, j| vectors[i].dotc(&vectors[j]))
}

fn check_uniform_dims(vectors: &[CVector]) {
    if let Some(first) = vectors.first() {
        assert!(
            vectors.iter().all(|v| v.len() == first.len()),
            "vector family with mixed dimensions"
        );
    }
}

/// Linear independence through the rank of the Gram matrix.
pub fn is_linearly_independent(vectors: &[CVector]) -> bool {
    check_uniform_dims(vectors);
    span_dimension(vectors) == vectors.len()
}

/// Sequential (weak) linear independence: no vector lies in the span of its
/// predecessors. Equivalent to [`is_linearly_independent`] on finite
/// families.
pub fn is_linearly_independent_weak(vectors: &[CVector]) -> bool {
    check_uniform_dims(vectors);
    let mut orthonormal: Vec<CVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut residual = v.clone();
        for b in &orthonormal {
            let overlap: C64 = b.dotc(&residual);
            residual -= b * overlap;
        }
        let scale = v.norm().max(1.0);
        if residual.norm() <= tolerances::RANGE_MEMBERSHIP * scale {
            return false;
        }
        let norm = residual.norm();
        orthonormal.push(residual.unscale(norm));
    }
    true
}

/// Dimension of the span: the rank of the Gram matrix at the shared cutoff.
pub fn span_dimension(vectors: &[CVector]) -> usize {
    check_uniform_dims(vectors);
    if vectors.is_empty() {
        return 0;
    }
    linalg::psd_rank(&gram(vectors)).expect("Gram matrices are positive semidefinite")
}

fn ensure_density(rho: &CMatrix) -> DecompResult<linalg::SpectralData> {
    let spectral = linalg::eig_hermitian(rho)?;
    let cutoff = spectral.rank_cutoff();
    if let Some(&min) = spectral.eigenvalues.iter().find(|v| **v < -cutoff) {
        return Err(LinalgError::NotPositiveSemidefinite { eigenvalue: min, bound: cutoff }.into());
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > tolerances::WEIGHT_SUM || trace.im.abs() > tolerances::WEIGHT_SUM {
        return Err(DecompError::TraceNotOne { trace: trace.re });
    }
    Ok(spectral)
}

/// Residual of `v` against the range of `rho`: `|Q v - v|` with `Q` the range
/// projector.
pub fn range_residual(rho: &CMatrix, v: &CVector) -> DecompResult<f64> {
    let q = linalg::range_projector(rho)?;
    Ok((&q * v - v).norm())
}

/// True when `v` lies in the range of `rho` within the membership tolerance.
pub fn in_range(rho: &CMatrix, v: &CVector) -> DecompResult<bool> {
    Ok(range_residual(rho, v)? <= tolerances::RANGE_MEMBERSHIP * v.norm().max(1.0))
}

/// Forward bijection: an orthonormal basis of the range of `rho` goes to the
/// linearly independent decomposition with `p_i = <e_i|rho|e_i>` and
/// `phi_i = p_i^{-1/2} rho^{1/2} e_i`.
pub fn cvl_forward(rho: &CMatrix, basis: &[CVector]) -> DecompResult<Decomposition> {
    let spectral = ensure_density(rho)?;
    if basis.len() != spectral.rank {
        return Err(DecompError::WrongBasisSize { expected: spectral.rank, got: basis.len() });
    }
    for (index, e) in basis.iter().enumerate() {
        if e.len() != rho.nrows() {
            return Err(DecompError::DimensionMismatch {
                index,
                expected: rho.nrows(),
                got: e.len(),
            });
        }
    }
    let deviation = linalg::orthonormality_deviation(basis);
    if deviation > tolerances::ORTHONORMALITY {
        return Err(DecompError::NotOrthonormal { deviation });
    }
    let q = linalg::range_projector(rho)?;
    for (index, e) in basis.iter().enumerate() {
        let residual = (&q * e - e).norm();
        if residual > tolerances::RANGE_MEMBERSHIP {
            return Err(DecompError::OutsideRange { index, residual });
        }
    }
    let root = linalg::op_sqrt(rho)?;
    let terms = basis
        .iter()
        .map(|e| {
            let weight = e.dotc(&(rho * e)).re;
            let vector = (&root * e).unscale(weight.sqrt());
            (weight, vector)
        })
        .collect();
    Decomposition::new(terms)
}

/// Inverse bijection: a linearly independent decomposition of `rho` goes back
/// to the orthonormal range basis `e_i = p_i^{1/2} pinv(rho)^{1/2} phi_i`.
pub fn cvl_inverse(rho: &CMatrix, decomp: &Decomposition) -> DecompResult<Vec<CVector>> {
    ensure_density(rho)?;
    if decomp.dim() != rho.nrows() {
        return Err(DecompError::DimensionMismatch {
            index: 0,
            expected: rho.nrows(),
            got: decomp.dim(),
        });
    }
    let residual = (decomp.reconstruct() - rho).norm();
    if residual > tolerances::RECONSTRUCTION {
        return Err(DecompError::Inconsistent { residual });
    }
    if !decomp.is_linearly_independent() {
        return Err(DecompError::Dependent);
    }
    let inv_root = linalg::pinv_on_range(rho, -0.5)?;
    Ok(decomp
        .iter()
        .map(|(weight, phi)| (&inv_root * phi).scale(weight.sqrt()))
        .collect())
}

/// Expansion coefficients of `chi` over the vectors of a linearly
/// independent decomposition: `alpha_i = p_i <phi_i| pinv(rho) |chi>` with
/// `rho` reconstructed from the decomposition itself.
pub fn expand_in_li_basis(decomp: &Decomposition, chi: &CVector) -> DecompResult<Vec<C64>> {
    if chi.len() != decomp.dim() {
        return Err(DecompError::DimensionMismatch {
            index: 0,
            expected: decomp.dim(),
            got: chi.len(),
        });
    }
    if !decomp.is_linearly_independent() {
        return Err(DecompError::Dependent);
    }
    let rho = decomp.reconstruct();
    let residual = range_residual(&rho, chi)?;
    if residual > tolerances::RANGE_MEMBERSHIP * chi.norm().max(1.0) {
        return Err(DecompError::OutsideRange { index: 0, residual });
    }
    let inv = linalg::pinv_on_range(&rho, -1.0)?;
    let image = &inv * chi;
    Ok(decomp
        .iter()
        .map(|(weight, phi)| phi.dotc(&image) * C64::new(weight, 0.0))
        .collect())
}

/// The characteristic weight of a unit vector `phi` in `rho`: the only weight
/// `phi` can carry in any linearly independent decomposition of `rho`.
/// Vanishes exactly when `phi` leaves the range.
pub fn characteristic_weight(rho: &CMatrix, phi: &CVector) -> DecompResult<f64> {
    let computed = characteristic_weight_routes(rho, phi)?;
    Ok(computed.resolvent)
}

/// Both internal routes to the characteristic weight; they agree to
/// [`tolerances::CHAR_WEIGHT_AGREE`] on valid inputs.
#[derive(Debug, Clone, Copy)]
pub struct CharWeightRoutes {
    /// `1 / <phi| pinv(rho) |phi>`.
    pub resolvent: f64,
    /// `1 / sum_k |<k|phi>|^2 / r_k` over the positive eigenpairs.
    pub eigenbasis: f64,
}

/// Computes the characteristic weight through the pseudo-inverse and through
/// the eigenbasis sum. Exposed so the agreement can be checked externally.
pub fn characteristic_weight_routes(
    rho: &CMatrix,
    phi: &CVector,
) -> DecompResult<CharWeightRoutes> {
    let spectral = ensure_density(rho)?;
    if phi.len() != rho.nrows() {
        return Err(DecompError::DimensionMismatch {
            index: 0,
            expected: rho.nrows(),
            got: phi.len(),
        });
    }
    let norm = phi.norm();
    if (norm - 1.0).abs() > tolerances::UNIT_NORM {
        return Err(DecompError::NotUnit { index: 0, norm });
    }
    if !in_range(rho, phi)? {
        return Ok(CharWeightRoutes { resolvent: 0.0, eigenbasis: 0.0 });
    }
    let inv = linalg::pinv_on_range(rho, -1.0)?;
    let resolvent = 1.0 / phi.dotc(&(&inv * phi)).re;
    let cutoff = spectral.rank_cutoff();
    let mut sum = 0.0;
    for (i, &lambda) in spectral.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let overlap: C64 = spectral.eigenvectors.column(i).dotc(phi);
            sum += overlap.norm_sqr() / lambda;
        }
    }
    let eigenbasis = 1.0 / sum;
    debug_assert!(
        (resolvent - eigenbasis).abs() <= tolerances::CHAR_WEIGHT_AGREE * resolvent.max(1.0),
        "characteristic-weight routes disagree: {resolvent} vs {eigenbasis}"
    );
    Ok(CharWeightRoutes { resolvent, eigenbasis })
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

    fn rv(entries: &[f64]) -> CVector {
        CVector::from_iterator(entries.len(), entries.iter().map(|&x| C64::new(x, 0.0)))
    }

    fn rho_unequal() -> CMatrix {
        cm(2, 2, &[0.75, 0.0, 0.0, 0.25])
    }

    fn hadamard_basis() -> Vec<CVector> {
        vec![rv(&[INV_SQRT2, INV_SQRT2]), rv(&[INV_SQRT2, -INV_SQRT2])]
    }

    #[test]
    fn independence_of_standard_pair_and_dependent_triple() {
        let e1 = rv(&[1.0, 0.0]);
        let e2 = rv(&[0.0, 1.0]);
        let sum = rv(&[INV_SQRT2, INV_SQRT2]);
        assert!(is_linearly_independent(&[e1.clone(), e2.clone()]));
        assert!(!is_linearly_independent(&[e1.clone(), e2.clone(), sum.clone()]));
        assert!(is_linearly_independent_weak(&[e1.clone(), e2.clone()]));
        assert!(!is_linearly_independent_weak(&[e1, e2, sum]));
    }

    #[test]
    fn independence_does_not_require_orthogonality() {
        let v1 = rv(&[1.0, 0.0]);
        let v2 = rv(&[SQRT3_2, 0.5]);
        assert!(is_linearly_independent(&[v1.clone(), v2.clone()]));
        assert!(is_linearly_independent_weak(&[v1, v2]));
    }

    #[test]
    fn span_dimension_counts_the_gram_rank() {
        let e1 = rv(&[1.0, 0.0, 0.0]);
        let e2 = rv(&[0.0, 1.0, 0.0]);
        let mix = rv(&[0.6, 0.8, 0.0]);
        assert_eq!(span_dimension(std::slice::from_ref(&e1)), 1);
        assert_eq!(span_dimension(&[e1.clone(), e2.clone()]), 2);
        assert_eq!(span_dimension(&[e1, e2, mix]), 2);
        assert_eq!(span_dimension(&[]), 0);
    }

    #[test]
    fn decomposition_rejects_bad_terms() {
        assert!(matches!(Decomposition::new(vec![]), Err(DecompError::Empty)));
        let v = rv(&[1.0, 0.0]);
        assert!(matches!(
            Decomposition::new(vec![(0.5, v.clone()), (0.5, rv(&[2.0, 0.0]))]),
            Err(DecompError::NotUnit { .. })
        ));
        assert!(matches!(
            Decomposition::new(vec![(0.9, v.clone())]),
            Err(DecompError::WeightSum { .. })
        ));
        assert!(matches!(
            Decomposition::new(vec![(1.2, v.clone()), (-0.2, rv(&[0.0, 1.0]))]),
            Err(DecompError::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            Decomposition::new(vec![(0.5, v), (0.5, rv(&[0.0, 0.0, 1.0]))]),
            Err(DecompError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn decomposition_orders_terms_canonically() {
        let d = Decomposition::new(vec![
            (0.25, rv(&[0.0, 1.0])),
            (0.75, rv(&[1.0, 0.0])),
        ])
        .unwrap();
        assert_relative_eq!(d.weights()[0], 0.75, max_relative = 1e-15);
        assert_relative_eq!(d.weights()[1], 0.25, max_relative = 1e-15);
    }

    #[test]
    fn cvl_forward_of_eigenbasis_returns_eigenvectors() {
        let d = cvl_forward(&rho_unequal(), &[rv(&[1.0, 0.0]), rv(&[0.0, 1.0])]).unwrap();
        assert_relative_eq!(d.weights()[0], 0.75, max_relative = 1e-14);
        assert_relative_eq!(d.weights()[1], 0.25, max_relative = 1e-14);
        assert!((d.vectors()[0][0].re - 1.0).abs() < 1e-14);
        assert!((d.vectors()[1][1].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cvl_forward_of_hadamard_basis_has_frozen_values() {
        let d = cvl_forward(&rho_unequal(), &hadamard_basis()).unwrap();
        assert_relative_eq!(d.weights()[0], 0.5, max_relative = 1e-14);
        assert_relative_eq!(d.weights()[1], 0.5, max_relative = 1e-14);
        // phi = (sqrt(3)/2, +-1/2)
        assert_relative_eq!(d.vectors()[0][0].re, SQRT3_2, max_relative = 1e-13);
        assert_relative_eq!(d.vectors()[0][1].re.abs(), 0.5, max_relative = 1e-13);
        assert_relative_eq!(d.vectors()[1][0].re, SQRT3_2, max_relative = 1e-13);
        let product = d.vectors()[0][1].re * d.vectors()[1][1].re;
        assert_relative_eq!(product, -0.25, max_relative = 1e-12);
    }

    #[test]
    fn cvl_forward_of_circular_basis_on_maximally_mixed_state() {
        let rho = cm(2, 2, &[0.5, 0.0, 0.0, 0.5]);
        let plus_i = CVector::from_vec(vec![
            C64::new(INV_SQRT2, 0.0),
            C64::new(0.0, INV_SQRT2),
        ]);
        let minus_i = CVector::from_vec(vec![
            C64::new(INV_SQRT2, 0.0),
            C64::new(0.0, -INV_SQRT2),
        ]);
        let d = cvl_forward(&rho, &[plus_i.clone(), minus_i.clone()]).unwrap();
        assert_relative_eq!(d.weights()[0], 0.5, max_relative = 1e-14);
        let dist = crate::canonical::family_distance(d.vectors(), &[plus_i, minus_i]);
        assert!(dist < 1e-13);
    }

    #[test]
    fn cvl_forward_validates_the_basis() {
        assert!(matches!(
            cvl_forward(&rho_unequal(), &[rv(&[1.0, 0.0])]),
            Err(DecompError::WrongBasisSize { .. })
        ));
        assert!(matches!(
            cvl_forward(&rho_unequal(), &[rv(&[1.0, 0.0]), rv(&[SQRT3_2, 0.5])]),
            Err(DecompError::NotOrthonormal { .. })
        ));
        let rank_one = cm(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            cvl_forward(&rank_one, &[rv(&[0.0, 1.0])]),
            Err(DecompError::OutsideRange { .. })
        ));
    }

    #[test]
    fn cvl_inverse_recovers_the_hadamard_basis() {
        let rho = rho_unequal();
        let d = cvl_forward(&rho, &hadamard_basis()).unwrap();
        let basis = cvl_inverse(&rho, &d).unwrap();
        assert!(linalg::orthonormality_deviation(&basis) < 1e-12);
        let dist = crate::canonical::family_distance(&basis, &hadamard_basis());
        assert!(dist < 1e-12);
    }

    #[test]
    fn cvl_inverse_rejects_foreign_decompositions() {
        let d = Decomposition::new(vec![(1.0, rv(&[1.0, 0.0]))]).unwrap();
        assert!(matches!(
            cvl_inverse(&rho_unequal(), &d),
            Err(DecompError::Inconsistent { .. })
        ));
    }

    #[test]
    fn round_trip_from_decomposition_side() {
        let rho = rho_unequal();
        let d = cvl_forward(&rho, &hadamard_basis()).unwrap();
        let basis = cvl_inverse(&rho, &d).unwrap();
        let again = cvl_forward(&rho, &basis).unwrap();
        let dist = crate::canonical::weighted_family_distance(
            d.weights(),
            d.vectors(),
            again.weights(),
            again.vectors(),
        );
        assert!(dist < 1e-12);
    }

    #[test]
    fn expansion_over_own_vectors_is_a_unit_coefficient() {
        let d = cvl_forward(&rho_unequal(), &hadamard_basis()).unwrap();
        let alpha = expand_in_li_basis(&d, &d.vectors()[0].clone()).unwrap();
        assert!((alpha[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(alpha[1].norm() < 1e-12);
    }

    #[test]
    fn expansion_reconstructs_arbitrary_range_vectors() {
        let d = cvl_forward(&rho_unequal(), &hadamard_basis()).unwrap();
        let chi = rv(&[0.28, 0.96]);
        let alpha = expand_in_li_basis(&d, &chi).unwrap();
        let mut rec = CVector::zeros(2);
        for (a, phi) in alpha.iter().zip(d.vectors()) {
            rec += phi * *a;
        }
        assert!((rec - chi).norm() < 1e-12);
    }

    #[test]
    fn expansion_rejects_vectors_off_the_range() {
        let d = Decomposition::new(vec![(1.0, rv(&[1.0, 0.0]))]).unwrap();
        assert!(matches!(
            expand_in_li_basis(&d, &rv(&[0.0, 1.0])),
            Err(DecompError::OutsideRange { .. })
        ));
    }

    #[test]
    fn characteristic_weight_of_eigenvector_is_its_eigenvalue() {
        let w = characteristic_weight(&rho_unequal(), &rv(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(w, 0.75, max_relative = 1e-13);
    }

    #[test]
    fn characteristic_weight_of_balanced_vector() {
        let w = characteristic_weight(&rho_unequal(), &rv(&[INV_SQRT2, INV_SQRT2])).unwrap();
        assert_relative_eq!(w, 0.375, max_relative = 1e-13);
    }

    #[test]
    fn characteristic_weight_vanishes_off_the_range() {
        let rho = cm(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let w = characteristic_weight(&rho, &rv(&[0.0, 1.0])).unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn characteristic_weight_routes_agree() {
        let routes = characteristic_weight_routes(&rho_unequal(), &rv(&[0.6, 0.8])).unwrap();
        assert!((routes.resolvent - routes.eigenbasis).abs() < 1e-14);
    }

    #[test]
    fn characteristic_weight_matches_cvl_weight_of_own_vector() {
        let d = cvl_forward(&rho_unequal(), &hadamard_basis()).unwrap();
        let w = characteristic_weight(&rho_unequal(), &d.vectors()[0].clone()).unwrap();
        assert_relative_eq!(w, d.weights()[0], max_relative = 1e-12);
    }
}
