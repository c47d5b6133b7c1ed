//! Simulation of the measurement chain: apparatus pointer, nearby
//! subsystem, remote subsystem.
//!
//! Premeasurement of a nearby basis takes the composite state to a sum of
//! branches `sqrt(p_i) |i> |e'_i> |phi_i>`: pointer position `i`, nearby
//! post-measurement vector `e'_i`, and remote branch state `phi_i`. The
//! apparatus is encoded by the outcome index alone; pointer states are
//! orthonormal, so nothing is lost. The branch data `(p_i, phi_i)` is
//! exactly the remote decomposition induced by the basis, whatever the
//! nearby post-measurement vectors are: a repeatable measurement keeps
//! `e'_i = e_i`, a second-kind measurement may move the nearby subsystem
//! anywhere, and the remote side cannot tell the difference.
//!
//! Monte Carlo sampling derives each shot's randomness from the seed and the
//! shot index independently, so counts do not depend on evaluation order and
//! parallel runs agree with sequential ones bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{self, CVector, LinalgError};
use crate::state::{reduced_states, to_antilinear, AntilinearOp, BipartiteState};
use crate::tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    /// The basis must cover the whole nearby space or exactly its range.
    #[error("basis has {got} vectors; expected the full dimension {full} or the rank {rank}")]
    WrongBasisSize { full: usize, rank: usize, got: usize },
    #[error("basis is not orthonormal: deviation {deviation:.3e}")]
    NotOrthonormal { deviation: f64 },
    /// A rank-sized basis must stay inside the range of the nearby reduced
    /// state.
    #[error("basis vector {index} leaves the range: residual {residual:.3e}")]
    OutsideRange { index: usize, residual: f64 },
    #[error("vector {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("expected {expected} post-measurement vectors, got {got}")]
    PostVectorCount { expected: usize, got: usize },
    #[error("post-measurement vector {index} is not normalized: |v| = {norm}")]
    PostVectorNotUnit { index: usize, norm: f64 },
    /// Selecting a branch the premeasurement never populates.
    #[error("pointer index {index} has probability below the floor")]
    ZeroProbabilityBranch { index: usize },
    #[error("pointer index {index} is outside the basis (size {size})")]
    UnknownPointerIndex { index: usize, size: usize },
    #[error("sampling needs at least one shot")]
    NoShots,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type MeasureResult<T> = Result<T, MeasureError>;

/// Whether the nearby subsystem survives in the measured basis state or is
/// handed to arbitrary post-measurement vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    /// Non-demolition: `e'_i = e_i`, so an immediate repetition gives the
    /// same result.
    Repeatable,
    /// The nearby subsystem ends in supplied unit vectors `e'_i`, not
    /// necessarily orthogonal or related to the basis.
    SecondKind,
}

impl MeasurementKind {
    pub fn label(self) -> &'static str {
        match self {
            MeasurementKind::Repeatable => "repeatable",
            MeasurementKind::SecondKind => "second-kind",
        }
    }
}

/// A validated measurement arrangement: state, nearby basis, kind, and the
/// nearby post-measurement vectors.
#[derive(Debug, Clone)]
pub struct MeasurementSetup {
    state: BipartiteState,
    basis: Vec<CVector>,
    kind: MeasurementKind,
    post_vectors: Vec<CVector>,
    op: AntilinearOp,
}

impl MeasurementSetup {
    /// Repeatable measurement of `basis`, which must be orthonormal and
    /// either span the whole nearby space or exactly the range of the
    /// nearby reduced state.
    pub fn repeatable(state: BipartiteState, basis: Vec<CVector>) -> MeasureResult<Self> {
        Self::build(state, basis, MeasurementKind::Repeatable, None)
    }

    /// Second-kind measurement; `post_vectors` default to the basis itself.
    pub fn second_kind(
        state: BipartiteState,
        basis: Vec<CVector>,
        post_vectors: Option<Vec<CVector>>,
    ) -> MeasureResult<Self> {
        Self::build(state, basis, MeasurementKind::SecondKind, post_vectors)
    }

    fn build(
        state: BipartiteState,
        basis: Vec<CVector>,
        kind: MeasurementKind,
        post_vectors: Option<Vec<CVector>>,
    ) -> MeasureResult<Self> {
        let d1 = state.d1();
        let (rho1, _) = reduced_states(&state);
        let rank = linalg::psd_rank(&rho1)?;
        if basis.len() != d1 && basis.len() != rank {
            return Err(MeasureError::WrongBasisSize { full: d1, rank, got: basis.len() });
        }
        for (index, e) in basis.iter().enumerate() {
            if e.len() != d1 {
                return Err(MeasureError::DimensionMismatch { index, expected: d1, got: e.len() });
            }
        }
        let deviation = linalg::orthonormality_deviation(&basis);
        if deviation > tolerances::ORTHONORMALITY {
            return Err(MeasureError::NotOrthonormal { deviation });
        }
        if basis.len() < d1 {
            let q = linalg::range_projector(&rho1)?;
            for (index, e) in basis.iter().enumerate() {
                let residual = (&q * e - e).norm();
                if residual > tolerances::RANGE_MEMBERSHIP {
                    return Err(MeasureError::OutsideRange { index, residual });
                }
            }
        }
        let post_vectors = match post_vectors {
            Some(post) => {
                if post.len() != basis.len() {
                    return Err(MeasureError::PostVectorCount {
                        expected: basis.len(),
                        got: post.len(),
                    });
                }
                for (index, v) in post.iter().enumerate() {
                    if v.len() != d1 {
                        return Err(MeasureError::DimensionMismatch {
                            index,
                            expected: d1,
                            got: v.len(),
                        });
                    }
                    let norm = v.norm();
                    if (norm - 1.0).abs() > tolerances::UNIT_NORM {
                        return Err(MeasureError::PostVectorNotUnit { index, norm });
                    }
                }
                post
            }
            None => basis.clone(),
        };
        let op = to_antilinear(&state);
        Ok(Self { state, basis, kind, post_vectors, op })
    }

    pub fn state(&self) -> &BipartiteState {
        &self.state
    }

    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    /// The effective nearby post-measurement vectors, one per basis vector.
    pub fn post_vectors(&self) -> &[CVector] {
        &self.post_vectors
    }
}

/// One populated branch of the premeasurement superposition.
#[derive(Debug, Clone)]
pub struct TripartiteOutcome {
    /// Apparatus pointer position: the index of the measured basis vector.
    pub pointer_index: usize,
    pub probability: f64,
    /// Nearby subsystem state after this outcome.
    pub nearby_state: CVector,
    /// Remote subsystem state after this outcome.
    pub remote_state: CVector,
}

/// Runs the premeasurement and lists every branch above the probability
/// floor, in basis order.
pub fn evolve(setup: &MeasurementSetup) -> Vec<TripartiteOutcome> {
    let mut outcomes = Vec::new();
    for (i, e) in setup.basis.iter().enumerate() {
        let image = setup.op.apply(e);
        let probability = image.norm_squared();
        if probability > tolerances::EPS_P {
            outcomes.push(TripartiteOutcome {
                pointer_index: i,
                probability,
                nearby_state: setup.post_vectors[i].clone(),
                remote_state: image.unscale(probability.sqrt()),
            });
        }
    }
    outcomes
}

/// Selective reading: the collapsed branch at one pointer position.
pub fn select(setup: &MeasurementSetup, pointer_index: usize) -> MeasureResult<TripartiteOutcome> {
    if pointer_index >= setup.basis.len() {
        return Err(MeasureError::UnknownPointerIndex {
            index: pointer_index,
            size: setup.basis.len(),
        });
    }
    evolve(setup)
        .into_iter()
        .find(|o| o.pointer_index == pointer_index)
        .ok_or(MeasureError::ZeroProbabilityBranch { index: pointer_index })
}

/// Monte Carlo counts over the branches of [`evolve`], aligned index for
/// index with its output.
#[derive(Debug, Clone)]
pub struct SampleReport {
    pub outcomes: Vec<TripartiteOutcome>,
    pub counts: Vec<u64>,
    pub shots: u64,
}

impl SampleReport {
    /// Empirical frequency of each outcome.
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.shots as f64).collect()
    }
}

/// Draws the branch for one shot. The generator is re-derived from the seed
/// and the shot index every time, making the draw independent of every other
/// shot.
fn draw(seed: u64, shot: u64, cumulative: &[f64]) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    let u: f64 = rng.random();
    cumulative
        .iter()
        .position(|&edge| u < edge)
        .unwrap_or(cumulative.len() - 1)
}

fn cumulative_probabilities(outcomes: &[TripartiteOutcome]) -> Vec<f64> {
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    let mut acc = 0.0;
    outcomes
        .iter()
        .map(|o| {
            acc += o.probability / total;
            acc
        })
        .collect()
}

/// Samples `shots` premeasurement outcomes, deterministically in `seed`.
pub fn sample(setup: &MeasurementSetup, shots: u64, seed: u64) -> MeasureResult<SampleReport> {
    if shots == 0 {
        return Err(MeasureError::NoShots);
    }
    let outcomes = evolve(setup);
    let cumulative = cumulative_probabilities(&outcomes);
    let mut counts = vec![0_u64; outcomes.len()];
    for shot in 0..shots {
        counts[draw(seed, shot, &cumulative)] += 1;
    }
    Ok(SampleReport { outcomes, counts, shots })
}

/// [`sample`] across threads; the per-shot generator derivation makes the
/// result identical to the sequential run.
pub fn sample_parallel(
    setup: &MeasurementSetup,
    shots: u64,
    seed: u64,
) -> MeasureResult<SampleReport> {
    if shots == 0 {
        return Err(MeasureError::NoShots);
    }
    let outcomes = evolve(setup);
    let cumulative = cumulative_probabilities(&outcomes);
    let counts = (0..shots)
        .into_par_iter()
        .fold(
            || vec![0_u64; outcomes.len()],
            |mut acc, shot| {
                acc[draw(seed, shot, &cumulative)] += 1;
                acc
            },
        )
        .reduce(
            || vec![0_u64; outcomes.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(SampleReport { outcomes, counts, shots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::phase_aligned_distance;
    use crate::diagrams::{remote_decomposition_from_onb, DiagramContext};
    use crate::linalg::CMatrix;
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

    fn cv(entries: &[(f64, f64)]) -> CVector {
        CVector::from_vec(entries.iter().map(|&(re, im)| C64::new(re, im)).collect())
    }

    fn s1() -> BipartiteState {
        BipartiteState::new(cm(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap()
    }

    fn s2() -> BipartiteState {
        BipartiteState::new(cm(2, 2, &[INV_SQRT2, 0.0, 0.0, INV_SQRT2])).unwrap()
    }

    fn s3() -> BipartiteState {
        BipartiteState::new(cm(2, 2, &[SQRT3_2, 0.0, 0.0, 0.5])).unwrap()
    }

    fn standard_basis(dim: usize) -> Vec<CVector> {
        (0..dim)
            .map(|i| {
                let mut v = CVector::zeros(dim);
                v[i] = C64::new(1.0, 0.0);
                v
            })
            .collect()
    }

    fn hadamard_basis() -> Vec<CVector> {
        vec![
            cv(&[(INV_SQRT2, 0.0), (INV_SQRT2, 0.0)]),
            cv(&[(INV_SQRT2, 0.0), (-INV_SQRT2, 0.0)]),
        ]
    }

    #[test]
    fn maximally_entangled_state_splits_evenly() {
        let setup = MeasurementSetup::repeatable(s2(), standard_basis(2)).unwrap();
        let outcomes = evolve(&setup);
        assert_eq!(outcomes.len(), 2);
        for (i, outcome) in outcomes.iter().enumerate() {
            assert_eq!(outcome.pointer_index, i);
            assert!((outcome.probability - 0.5).abs() < 1e-12);
            assert!(phase_aligned_distance(&outcome.nearby_state, &standard_basis(2)[i]) < 1e-12);
            assert!(phase_aligned_distance(&outcome.remote_state, &standard_basis(2)[i]) < 1e-12);
        }
    }

    #[test]
    fn product_state_populates_one_branch() {
        let setup = MeasurementSetup::repeatable(s1(), standard_basis(2)).unwrap();
        let outcomes = evolve(&setup);
        assert_eq!(outcomes.len(), 1);
        assert_eq!(outcomes[0].pointer_index, 0);
        assert!((outcomes[0].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotated_basis_reproduces_the_frozen_branches() {
        let setup = MeasurementSetup::repeatable(s3(), hadamard_basis()).unwrap();
        let outcomes = evolve(&setup);
        assert_eq!(outcomes.len(), 2);
        let expected = [
            cv(&[(SQRT3_2, 0.0), (0.5, 0.0)]),
            cv(&[(SQRT3_2, 0.0), (-0.5, 0.0)]),
        ];
        for (outcome, want) in outcomes.iter().zip(&expected) {
            assert!((outcome.probability - 0.5).abs() < 1e-12);
            assert!(phase_aligned_distance(&outcome.remote_state, want) < 1e-12);
        }
    }

    #[test]
    fn branches_agree_with_the_remote_decomposition() {
        let state = BipartiteState::random(3, 4, 23);
        let ctx = DiagramContext::new(state.clone());
        let basis = standard_basis(3);
        let setup = MeasurementSetup::repeatable(state, basis.clone()).unwrap();
        let outcomes = evolve(&setup);
        let decomp = remote_decomposition_from_onb(&ctx, &basis).unwrap();
        let probability_sum: f64 = outcomes.iter().map(|o| o.probability).sum();
        assert!((probability_sum - 1.0).abs() < 1e-10);
        // same branches up to the decomposition's canonical ordering
        for outcome in &outcomes {
            let closest = decomp
                .iter()
                .map(|(w, v)| {
                    f64::max(
                        (w - outcome.probability).abs(),
                        phase_aligned_distance(v, &outcome.remote_state),
                    )
                })
                .min_by(f64::total_cmp)
                .unwrap();
            assert!(closest < 1e-10);
        }
    }

    #[test]
    fn nonselective_measurement_preserves_the_remote_ensemble() {
        let state = BipartiteState::random(4, 3, 9);
        let (_, rho2) = reduced_states(&state);
        let setup = MeasurementSetup::repeatable(state, standard_basis(4)).unwrap();
        let mut mix = CMatrix::zeros(3, 3);
        for outcome in evolve(&setup) {
            mix += (&outcome.remote_state * outcome.remote_state.adjoint())
                .scale(outcome.probability);
        }
        assert!((mix - rho2).norm() < 1e-10);
    }

    #[test]
    fn second_kind_measurement_keeps_the_remote_branches() {
        let post = vec![
            cv(&[(0.0, 0.0), (1.0, 0.0)]),
            cv(&[(0.6, 0.0), (0.0, 0.8)]),
        ];
        let repeatable = MeasurementSetup::repeatable(s3(), hadamard_basis()).unwrap();
        let second =
            MeasurementSetup::second_kind(s3(), hadamard_basis(), Some(post.clone())).unwrap();
        let a = evolve(&repeatable);
        let b = evolve(&second);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.probability - y.probability).abs() < 1e-15);
            assert!(phase_aligned_distance(&x.remote_state, &y.remote_state) < 1e-15);
        }
        // the nearby side does move
        assert!(phase_aligned_distance(&b[0].nearby_state, &post[0]) < 1e-15);
        assert!(phase_aligned_distance(&a[0].nearby_state, &hadamard_basis()[0]) < 1e-15);
    }

    #[test]
    fn range_confined_basis_is_accepted_and_complete() {
        let state = BipartiteState::random(3, 2, 31);
        let (rho1, _) = reduced_states(&state);
        let range = linalg::range_basis(&rho1).unwrap();
        assert_eq!(range.len(), 2);
        let setup = MeasurementSetup::repeatable(state, range).unwrap();
        let total: f64 = evolve(&setup).iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn setup_validation_rejects_bad_bases() {
        assert!(matches!(
            MeasurementSetup::repeatable(s3(), vec![cv(&[(1.0, 0.0), (0.0, 0.0)])]),
            Err(MeasureError::WrongBasisSize { .. })
        ));
        let skewed = vec![
            cv(&[(1.0, 0.0), (0.0, 0.0)]),
            cv(&[(INV_SQRT2, 0.0), (INV_SQRT2, 0.0)]),
        ];
        assert!(matches!(
            MeasurementSetup::repeatable(s3(), skewed),
            Err(MeasureError::NotOrthonormal { .. })
        ));
        let state = BipartiteState::random(3, 2, 31);
        let outside = vec![
            cv(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]),
            cv(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]),
        ];
        assert!(matches!(
            MeasurementSetup::repeatable(state, outside),
            Err(MeasureError::OutsideRange { .. })
        ));
        assert!(matches!(
            MeasurementSetup::second_kind(
                s3(),
                hadamard_basis(),
                Some(vec![cv(&[(2.0, 0.0), (0.0, 0.0)]), cv(&[(0.0, 0.0), (1.0, 0.0)])])
            ),
            Err(MeasureError::PostVectorNotUnit { .. })
        ));
        assert!(matches!(
            MeasurementSetup::second_kind(s3(), hadamard_basis(), Some(vec![])),
            Err(MeasureError::PostVectorCount { .. })
        ));
    }

    #[test]
    fn select_returns_single_branches_and_rejects_empty_ones() {
        let setup = MeasurementSetup::repeatable(s1(), standard_basis(2)).unwrap();
        let chosen = select(&setup, 0).unwrap();
        assert!((chosen.probability - 1.0).abs() < 1e-12);
        assert!(matches!(
            select(&setup, 1),
            Err(MeasureError::ZeroProbabilityBranch { index: 1 })
        ));
        assert!(matches!(
            select(&setup, 5),
            Err(MeasureError::UnknownPointerIndex { index: 5, .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_order_independent() {
        let setup = MeasurementSetup::repeatable(s2(), standard_basis(2)).unwrap();
        let a = sample(&setup, 10_000, 42).unwrap();
        let b = sample(&setup, 10_000, 42).unwrap();
        let c = sample_parallel(&setup, 10_000, 42).unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.counts, c.counts);
        let other = sample(&setup, 10_000, 43).unwrap();
        assert_ne!(a.counts, other.counts);
        assert_eq!(a.counts.iter().sum::<u64>(), 10_000);
    }

    #[test]
    fn sampling_matches_binomial_statistics() {
        let setup = MeasurementSetup::repeatable(s2(), standard_basis(2)).unwrap();
        let shots = 100_000;
        let bound = 4.0 * (0.25_f64 / shots as f64).sqrt();
        for seed in [1, 2, 3, 4, 5] {
            let report = sample(&setup, shots, seed).unwrap();
            for (frequency, outcome) in report.frequencies().iter().zip(&report.outcomes) {
                assert!(
                    (frequency - outcome.probability).abs() < bound,
                    "seed {seed}: frequency {frequency} vs probability {}",
                    outcome.probability
                );
            }
        }
    }

    #[test]
    fn sampling_passes_a_chi_square_check_on_four_categories() {
        let state = BipartiteState::random(4, 4, 77);
        let setup = MeasurementSetup::repeatable(state, standard_basis(4)).unwrap();
        let shots = 1_000_000;
        let report = sample_parallel(&setup, shots, 2024).unwrap();
        assert_eq!(report.outcomes.len(), 4);
        let chi_square: f64 = report
            .counts
            .iter()
            .zip(&report.outcomes)
            .map(|(&count, outcome)| {
                let expected = outcome.probability * shots as f64;
                let diff = count as f64 - expected;
                diff * diff / expected
            })
            .sum();
        // 0.1% critical value of the chi-square distribution with 3 degrees
        // of freedom
        assert!(chi_square < 16.266, "chi-square statistic {chi_square}");
    }

    #[test]
    fn deterministic_state_samples_one_outcome() {
        let setup = MeasurementSetup::repeatable(s1(), standard_basis(2)).unwrap();
        let report = sample(&setup, 1000, 7).unwrap();
        assert_eq!(report.counts, vec![1000]);
        assert!(matches!(sample(&setup, 0, 7), Err(MeasureError::NoShots)));
    }
}
