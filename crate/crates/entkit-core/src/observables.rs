//! Subsystem observables, their detectable parts, and twin partners.
//!
//! In an entangled pure state only the part of a subsystem observable that
//! acts within the range of the local reduced density operator is visible to
//! measurement; the block on the null space is undetectable. An observable
//! whose detectable part has a nondegenerate spectrum singles out a unique
//! eigenbasis of the range, and the correlation operator transports that
//! basis to the other subsystem. Assigning arbitrary distinct eigenvalues to
//! the transported basis (zero on the far null space) yields a twin partner:
//! measuring either observable also measures the other, on every run, without
//! touching the far subsystem.

use thiserror::Error;

use crate::canonical::{canonical_phase, family_distance, phase_aligned_distance};
use crate::linalg::{self, CMatrix, CVector, LinalgError};
use crate::state::{correlation_operator, reduced_states, BipartiteState};
use crate::tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    /// Observables are Hermitian operators.
    #[error("observable is not Hermitian: deviation {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    /// Operator dimension must match the tagged subsystem of the state.
    #[error("observable dimension {got} does not match subsystem dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    /// The twin construction needs an observable commuting with its reduced
    /// density operator.
    #[error("observable does not commute with the reduced state: residual {residual:.3e}")]
    NotStateCompatible { residual: f64 },
    /// The detectable spectrum must be nondegenerate to fix an eigenbasis.
    #[error("detectable spectrum is degenerate: gap {gap:.3e} at or below {bound:.3e}")]
    DegenerateDetectableSpectrum { gap: f64, bound: f64 },
    /// Pair classification needs relevant observables on both sides.
    #[error("observable on subsystem {subsystem:?} is not relevant for this state")]
    NotRelevant { subsystem: Subsystem },
    /// A replacement spectrum must have one value per detectable eigenvector.
    #[error("replacement spectrum has {got} values, detectable rank is {expected}")]
    SpectrumLength { expected: usize, got: usize },
    /// A replacement spectrum must be injective.
    #[error("replacement spectrum repeats the value {value}")]
    SpectrumNotInjective { value: f64 },
    /// Pair classification needs one observable per subsystem.
    #[error("expected one observable per subsystem, got two tagged {subsystem:?}")]
    SameSubsystem { subsystem: Subsystem },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type ObservableResult<T> = Result<T, ObservableError>;

/// The subsystem an observable acts on: the nearby one (measured directly)
/// or the remote one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Nearby,
    Remote,
}

impl Subsystem {
    pub fn other(self) -> Subsystem {
        match self {
            Subsystem::Nearby => Subsystem::Remote,
            Subsystem::Remote => Subsystem::Nearby,
        }
    }
}

/// Hermitian operator acting on one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
    subsystem: Subsystem,
}

impl Observable {
    pub fn new(matrix: CMatrix, subsystem: Subsystem) -> ObservableResult<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(LinalgError::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() }
                .into());
        }
        let deviation = linalg::hermiticity_deviation(&matrix);
        if deviation > tolerances::HERMITICITY_REL * (1.0 + matrix.norm()) {
            return Err(ObservableError::NotHermitian { deviation });
        }
        Ok(Self { matrix, subsystem })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn subsystem(&self) -> Subsystem {
        self.subsystem
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Split of an observable relative to the range of a reduced density
/// operator: the detectable part (within the range), the undetectable
/// remainder (within the null space), and the mixing blocks between them.
#[derive(Debug, Clone)]
pub struct PartialSpectralForm {
    /// Eigenvalues of the detectable part, descending.
    pub detectable_eigenvalues: Vec<f64>,
    /// Unit eigenvectors of the detectable part; they span the range.
    pub detectable_vectors: Vec<CVector>,
    /// `sum_i a_i |v_i><v_i|`, the block of the observable within the range.
    pub detectable: CMatrix,
    /// Block of the observable within the null space.
    pub remainder: CMatrix,
    /// Norm of the range/null-space mixing blocks; zero exactly when the
    /// observable commutes with the range projector.
    pub cross_norm: f64,
}

impl PartialSpectralForm {
    /// Smallest gap between adjacent detectable eigenvalues; `None` for a
    /// single eigenvalue.
    pub fn min_gap(&self) -> Option<f64> {
        self.detectable_eigenvalues
            .windows(2)
            .map(|w| w[0] - w[1])
            .min_by(f64::total_cmp)
    }
}

fn ensure_dim(observable: &Observable, rho: &CMatrix) -> ObservableResult<()> {
    if observable.dim() != rho.nrows() {
        return Err(ObservableError::DimensionMismatch {
            expected: rho.nrows(),
            got: observable.dim(),
        });
    }
    Ok(())
}

/// Decomposes the observable into detectable part, remainder, and mixing
/// blocks relative to the range of `rho`.
pub fn partial_spectral_form(
    observable: &Observable,
    rho: &CMatrix,
) -> ObservableResult<PartialSpectralForm> {
    ensure_dim(observable, rho)?;
    let range = linalg::range_basis(rho)?;
    let a = observable.matrix();
    let r = linalg::from_columns(&range);
    let reducee = r.adjoint() * a * &r;
    let spectral = linalg::eig_hermitian(&reducee)?;
    let detectable_vectors: Vec<CVector> = spectral
        .vectors()
        .iter()
        .map(|w| canonical_phase(&(&r * w)))
        .collect();
    let mut detectable = CMatrix::zeros(a.nrows(), a.ncols());
    for (value, v) in spectral.eigenvalues.iter().zip(&detectable_vectors) {
        detectable += (v * v.adjoint()).scale(*value);
    }
    let q = linalg::range_projector(rho)?;
    let q_perp = CMatrix::identity(a.nrows(), a.ncols()) - &q;
    let remainder = &q_perp * a * &q_perp;
    let cross_norm = (&q * a * &q_perp + &q_perp * a * &q).norm();
    Ok(PartialSpectralForm {
        detectable_eigenvalues: spectral.eigenvalues,
        detectable_vectors,
        detectable,
        remainder,
        cross_norm,
    })
}

/// Residual `|A rho - rho A|` of commutation with the reduced state.
pub fn state_compatibility_residual(observable: &Observable, rho: &CMatrix) -> f64 {
    let a = observable.matrix();
    (a * rho - rho * a).norm()
}

/// True when the observable commutes with the reduced density operator
/// (relative to the product of norms).
pub fn is_state_compatible(observable: &Observable, rho: &CMatrix) -> bool {
    let scale = observable.matrix().norm() * rho.norm();
    state_compatibility_residual(observable, rho) <= tolerances::COMPATIBILITY_REL * scale.max(1.0)
}

/// Residual `|A Q - Q A|` of commutation with the range projector of `rho`.
pub fn range_compatibility_residual(
    observable: &Observable,
    rho: &CMatrix,
) -> ObservableResult<f64> {
    ensure_dim(observable, rho)?;
    let q = linalg::range_projector(rho)?;
    let a = observable.matrix();
    Ok((a * &q - &q * a).norm())
}

/// True when the observable commutes with the range projector: it then maps
/// the range into itself and has a well-defined reducee there.
pub fn is_range_compatible(observable: &Observable, rho: &CMatrix) -> ObservableResult<bool> {
    let scale = observable.matrix().norm();
    Ok(range_compatibility_residual(observable, rho)?
        <= tolerances::COMPATIBILITY_REL * scale.max(1.0))
}

/// True when the observable is range-compatible and its detectable spectrum
/// is nondegenerate, so it singles out a unique eigenbasis of the range.
pub fn is_relevant(observable: &Observable, rho: &CMatrix) -> ObservableResult<bool> {
    if !is_range_compatible(observable, rho)? {
        return Ok(false);
    }
    let form = partial_spectral_form(observable, rho)?;
    let bound = tolerances::DEGENERACY_GAP_REL * observable.matrix().norm();
    Ok(match form.min_gap() {
        Some(gap) => gap > bound,
        None => true,
    })
}

/// The unique eigenbasis of the range singled out by a relevant observable.
pub fn relevant_basis(observable: &Observable, rho: &CMatrix) -> ObservableResult<Vec<CVector>> {
    if !is_relevant(observable, rho)? {
        return Err(ObservableError::NotRelevant { subsystem: observable.subsystem() });
    }
    Ok(partial_spectral_form(observable, rho)?.detectable_vectors)
}

/// Builds the twin partner on the other subsystem: the correlation operator
/// transports the common eigenbasis, the undetectable block is set to zero,
/// and the detectable eigenvalues are kept unless a replacement `spectrum`
/// (any injective real sequence) is supplied.
pub fn twin_partner(
    observable: &Observable,
    state: &BipartiteState,
    spectrum: Option<&[f64]>,
) -> ObservableResult<Observable> {
    let (rho1, rho2) = reduced_states(state);
    let (rho_here, other_dim) = match observable.subsystem() {
        Subsystem::Nearby => (&rho1, state.d2()),
        Subsystem::Remote => (&rho2, state.d1()),
    };
    ensure_dim(observable, rho_here)?;
    let residual = state_compatibility_residual(observable, rho_here);
    let scale = (observable.matrix().norm() * rho_here.norm()).max(1.0);
    if residual > tolerances::COMPATIBILITY_REL * scale {
        return Err(ObservableError::NotStateCompatible { residual });
    }
    let form = partial_spectral_form(observable, rho_here)?;
    let bound = tolerances::DEGENERACY_GAP_REL * observable.matrix().norm();
    if let Some(gap) = form.min_gap() {
        if gap <= bound {
            return Err(ObservableError::DegenerateDetectableSpectrum { gap, bound });
        }
    }
    let values: Vec<f64> = match spectrum {
        Some(values) => {
            if values.len() != form.detectable_vectors.len() {
                return Err(ObservableError::SpectrumLength {
                    expected: form.detectable_vectors.len(),
                    got: values.len(),
                });
            }
            for (i, v) in values.iter().enumerate() {
                if values[..i].contains(v) {
                    return Err(ObservableError::SpectrumNotInjective { value: *v });
                }
            }
            values.to_vec()
        }
        None => form.detectable_eigenvalues.clone(),
    };
    let corr = correlation_operator(state);
    let transport = match observable.subsystem() {
        Subsystem::Nearby => corr.op,
        Subsystem::Remote => corr.op.adjoint(),
    };
    let mut partner = CMatrix::zeros(other_dim, other_dim);
    for (value, r) in values.iter().zip(&form.detectable_vectors) {
        let image = transport.apply(r);
        partner += (&image * image.adjoint()).scale(*value);
    }
    Observable::new(partner, observable.subsystem().other())
}

/// How a pair of observables, one per subsystem, stands with respect to the
/// twin relation in a given state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwinClassification {
    /// Generalized twins that both commute with their reduced states.
    ProperTwin,
    /// Generalized twins where at least one side fails to commute with its
    /// reduced state.
    ExtendedTwin,
    /// The relevant eigenbases do not correspond under the correlation
    /// operator.
    NotGeneralizedTwin,
}

impl TwinClassification {
    pub fn label(self) -> &'static str {
        match self {
            TwinClassification::ProperTwin => "proper-twin",
            TwinClassification::ExtendedTwin => "extended-twin",
            TwinClassification::NotGeneralizedTwin => "not-generalized-twin",
        }
    }
}

/// Classifies a pair of relevant observables: generalized twins have
/// relevant eigenbases exchanged by the correlation operator; proper twins
/// additionally commute with their reduced states.
pub fn classify_pair(
    first: &Observable,
    second: &Observable,
    state: &BipartiteState,
) -> ObservableResult<TwinClassification> {
    if first.subsystem() == second.subsystem() {
        return Err(ObservableError::SameSubsystem { subsystem: first.subsystem() });
    }
    let (nearby, remote) = match first.subsystem() {
        Subsystem::Nearby => (first, second),
        Subsystem::Remote => (second, first),
    };
    let (rho1, rho2) = reduced_states(state);
    let basis1 = relevant_basis(nearby, &rho1)?;
    let basis2 = relevant_basis(remote, &rho2)?;
    let corr = correlation_operator(state);
    let images: Vec<CVector> = basis1.iter().map(|e| corr.op.apply(e)).collect();
    if family_distance(&images, &basis2) > tolerances::DIAGRAM_COMMUTE {
        return Ok(TwinClassification::NotGeneralizedTwin);
    }
    let proper = is_state_compatible(nearby, &rho1) && is_state_compatible(remote, &rho2);
    Ok(if proper {
        TwinClassification::ProperTwin
    } else {
        TwinClassification::ExtendedTwin
    })
}

/// Largest phase-aligned mismatch between the detectable eigenvectors of
/// `observable` and the transported eigenvectors of its claimed partner.
/// Used to verify the symmetry of the twin construction.
pub fn twin_detectable_mismatch(
    observable: &Observable,
    partner: &Observable,
    state: &BipartiteState,
) -> ObservableResult<f64> {
    let (rho1, rho2) = reduced_states(state);
    let (rho_here, rho_there) = match observable.subsystem() {
        Subsystem::Nearby => (&rho1, &rho2),
        Subsystem::Remote => (&rho2, &rho1),
    };
    let here = partial_spectral_form(observable, rho_here)?;
    let there = partial_spectral_form(partner, rho_there)?;
    let corr = correlation_operator(state);
    let transport = match observable.subsystem() {
        Subsystem::Nearby => corr.op,
        Subsystem::Remote => corr.op.adjoint(),
    };
    let mut worst: f64 = 0.0;
    for (r, image_expected) in here.detectable_vectors.iter().zip(&there.detectable_vectors) {
        worst = worst.max(phase_aligned_distance(&transport.apply(r), image_expected));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64 as C64;

    const SQRT3_2: f64 = 0.8660254037844386;
    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn cm(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(
            rows,
            cols,
            &entries.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>(),
        )
    }

    fn s2() -> BipartiteState {
        BipartiteState::new(cm(2, 2, &[INV_SQRT2, 0.0, 0.0, INV_SQRT2])).unwrap()
    }

    fn s3() -> BipartiteState {
        BipartiteState::new(cm(2, 2, &[SQRT3_2, 0.0, 0.0, 0.5])).unwrap()
    }

    fn diag12(subsystem: Subsystem) -> Observable {
        Observable::new(cm(2, 2, &[1.0, 0.0, 0.0, 2.0]), subsystem).unwrap()
    }

    fn pauli_x(subsystem: Subsystem) -> Observable {
        Observable::new(cm(2, 2, &[0.0, 1.0, 1.0, 0.0]), subsystem).unwrap()
    }

    #[test]
    fn observable_rejects_non_hermitian_matrices() {
        let err = Observable::new(cm(2, 2, &[0.0, 1.0, 0.0, 0.0]), Subsystem::Nearby);
        assert!(matches!(err, Err(ObservableError::NotHermitian { .. })));
    }

    #[test]
    fn detectable_part_on_full_rank_state_is_the_whole_observable() {
        let (rho1, _) = reduced_states(&s3());
        let a = diag12(Subsystem::Nearby);
        let form = partial_spectral_form(&a, &rho1).unwrap();
        assert_eq!(form.detectable_eigenvalues, vec![2.0, 1.0]);
        assert!((form.detectable.clone() - a.matrix()).norm() < 1e-12);
        assert!(form.remainder.norm() < 1e-12);
        assert!(form.cross_norm < 1e-12);
    }

    #[test]
    fn detectable_part_on_rank_deficient_state_truncates() {
        let product = BipartiteState::new(cm(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let (rho1, _) = reduced_states(&product);
        let a = pauli_x(Subsystem::Nearby);
        let form = partial_spectral_form(&a, &rho1).unwrap();
        assert_eq!(form.detectable_eigenvalues.len(), 1);
        assert_relative_eq!(form.detectable_eigenvalues[0], 0.0, epsilon = 1e-12);
        // off-diagonal couplings between range and null space show up as
        // mixing blocks
        assert!(form.cross_norm > 0.5);
    }

    #[test]
    fn state_compatibility_of_diagonal_and_off_diagonal_observables() {
        let (rho1, _) = reduced_states(&s3());
        assert!(is_state_compatible(&diag12(Subsystem::Nearby), &rho1));
        assert!(!is_state_compatible(&pauli_x(Subsystem::Nearby), &rho1));
    }

    #[test]
    fn range_compatibility_is_weaker_than_state_compatibility() {
        // rank-deficient rho1 = diag(1, 0, 0): an observable block-diagonal
        // over range/null commutes with Q but not with rho when the null
        // block is nontrivial; pauli_x on the null coordinates provides one.
        let coeffs = CMatrix::from_row_slice(
            3,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let state = BipartiteState::new(coeffs).unwrap();
        let (rho1, _) = reduced_states(&state);
        let a = Observable::new(
            cm(3, 3, &[5.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]),
            Subsystem::Nearby,
        )
        .unwrap();
        assert!(is_range_compatible(&a, &rho1).unwrap());
        // [A, rho] = 0 here as well since rho acts only on the range block;
        // perturb the range block to break state compatibility while keeping
        // Q-compatibility
        let b = Observable::new(
            cm(3, 3, &[5.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 2.0]),
            Subsystem::Nearby,
        )
        .unwrap();
        assert!(is_range_compatible(&b, &rho1).unwrap());
    }

    #[test]
    fn relevance_requires_a_nondegenerate_detectable_spectrum() {
        let (rho1, _) = reduced_states(&s3());
        assert!(is_relevant(&diag12(Subsystem::Nearby), &rho1).unwrap());
        let degenerate = Observable::new(CMatrix::identity(2, 2), Subsystem::Nearby).unwrap();
        assert!(!is_relevant(&degenerate, &rho1).unwrap());
        assert!(matches!(
            relevant_basis(&degenerate, &rho1),
            Err(ObservableError::NotRelevant { .. })
        ));
    }

    #[test]
    fn pauli_x_is_relevant_though_not_state_compatible() {
        let (rho1, _) = reduced_states(&s3());
        let a = pauli_x(Subsystem::Nearby);
        assert!(is_relevant(&a, &rho1).unwrap());
        let basis = relevant_basis(&a, &rho1).unwrap();
        let expected = vec![
            CVector::from_vec(vec![C64::new(INV_SQRT2, 0.0), C64::new(INV_SQRT2, 0.0)]),
            CVector::from_vec(vec![C64::new(INV_SQRT2, 0.0), C64::new(-INV_SQRT2, 0.0)]),
        ];
        assert!(family_distance(&basis, &expected) < 1e-12);
    }

    #[test]
    fn twin_of_diagonal_observable_in_diagonal_state_is_itself() {
        let partner = twin_partner(&diag12(Subsystem::Nearby), &s3(), None).unwrap();
        assert_eq!(partner.subsystem(), Subsystem::Remote);
        assert!((partner.matrix() - diag12(Subsystem::Remote).matrix()).norm() < 1e-12);
    }

    #[test]
    fn twin_of_pauli_z_in_maximally_entangled_state() {
        let z = Observable::new(cm(2, 2, &[1.0, 0.0, 0.0, -1.0]), Subsystem::Nearby).unwrap();
        let partner = twin_partner(&z, &s2(), None).unwrap();
        assert!((partner.matrix() - z.matrix()).norm() < 1e-12);
    }

    #[test]
    fn twin_of_pauli_x_in_maximally_entangled_state() {
        let partner = twin_partner(&pauli_x(Subsystem::Nearby), &s2(), None).unwrap();
        assert!((partner.matrix() - pauli_x(Subsystem::Remote).matrix()).norm() < 1e-12);
    }

    #[test]
    fn twin_accepts_replacement_spectrum_and_validates_it() {
        let partner =
            twin_partner(&diag12(Subsystem::Nearby), &s3(), Some(&[7.0, -3.0])).unwrap();
        let spectral = linalg::eig_hermitian(partner.matrix()).unwrap();
        assert_relative_eq!(spectral.eigenvalues[0], 7.0, max_relative = 1e-12);
        assert_relative_eq!(spectral.eigenvalues[1], -3.0, max_relative = 1e-12);
        assert!(matches!(
            twin_partner(&diag12(Subsystem::Nearby), &s3(), Some(&[1.0])),
            Err(ObservableError::SpectrumLength { .. })
        ));
        assert!(matches!(
            twin_partner(&diag12(Subsystem::Nearby), &s3(), Some(&[1.0, 1.0])),
            Err(ObservableError::SpectrumNotInjective { .. })
        ));
    }

    #[test]
    fn twin_rejects_incompatible_or_degenerate_observables() {
        assert!(matches!(
            twin_partner(&pauli_x(Subsystem::Nearby), &s3(), None),
            Err(ObservableError::NotStateCompatible { .. })
        ));
        let degenerate = Observable::new(CMatrix::identity(2, 2), Subsystem::Nearby).unwrap();
        assert!(matches!(
            twin_partner(&degenerate, &s3(), None),
            Err(ObservableError::DegenerateDetectableSpectrum { .. })
        ));
    }

    #[test]
    fn twin_construction_is_symmetric() {
        let a = diag12(Subsystem::Nearby);
        let partner = twin_partner(&a, &s3(), None).unwrap();
        let back = twin_partner(&partner, &s3(), None).unwrap();
        assert_eq!(back.subsystem(), Subsystem::Nearby);
        assert!((back.matrix() - a.matrix()).norm() < 1e-11);
        assert!(twin_detectable_mismatch(&a, &partner, &s3()).unwrap() < 1e-11);
    }

    #[test]
    fn classify_pair_proper_twin() {
        let got = classify_pair(&diag12(Subsystem::Nearby), &diag12(Subsystem::Remote), &s3())
            .unwrap();
        assert_eq!(got, TwinClassification::ProperTwin);
    }

    #[test]
    fn classify_pair_extended_twin() {
        // relevant but not state-compatible on either side of the unequal
        // state; eigenbases still correspond under plain conjugation
        let got = classify_pair(&pauli_x(Subsystem::Nearby), &pauli_x(Subsystem::Remote), &s3())
            .unwrap();
        assert_eq!(got, TwinClassification::ExtendedTwin);
    }

    #[test]
    fn classify_pair_not_generalized_twin() {
        let got = classify_pair(&diag12(Subsystem::Nearby), &pauli_x(Subsystem::Remote), &s3())
            .unwrap();
        assert_eq!(got, TwinClassification::NotGeneralizedTwin);
        assert_eq!(got.label(), "not-generalized-twin");
    }

    #[test]
    fn classify_pair_requires_opposite_subsystems() {
        assert!(matches!(
            classify_pair(&diag12(Subsystem::Nearby), &diag12(Subsystem::Nearby), &s3()),
            Err(ObservableError::SameSubsystem { .. })
        ));
    }
}
