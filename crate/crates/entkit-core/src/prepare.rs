//! Remote pure-state preparation: which nearby atomic events leave the far
//! subsystem in a chosen pure state, with what probabilities, and which
//! event does it best.
//!
//! Measuring a nearby event `|j><j|` on the composite state collapses the
//! remote subsystem to `p^{-1/2} A j` with probability `p = |A j|^2`. A unit
//! target inside the range of `rho2` is reachable exactly by the events
//! `j = alpha f + beta g` with `f` the pulled-back target
//! (`f = U^{-1} pinv(rho2)^{1/2} phi`, normalized), `g` any unit vector in
//! the null space of `rho1`, and `|alpha|^2 + |beta|^2 = 1`, `alpha != 0`.
//! The probability of such an event is `|alpha|^2` times the maximum, and
//! the maximum, attained at `f` itself, equals the characteristic weight of
//! the target in `rho2`: the weight the target carries in any linearly
//! independent decomposition it belongs to.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::canonical::canonical_phase;
use crate::decomp::{self, DecompError};
use crate::diagrams::DiagramContext;
use crate::linalg::{self, CVector, LinalgError};
use crate::tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrepareError {
    /// Targets outside the range of `rho2` cannot be reached by any event.
    #[error("target is not preparable from this state: range residual {residual:.3e}")]
    NotPreparable { residual: f64 },
    #[error("vector has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector must be normalized: |v| = {norm}")]
    NotUnit { norm: f64 },
    /// Family coefficients must satisfy `|alpha|^2 + |beta|^2 = 1`.
    #[error("family coefficients have total weight {total}, expected 1")]
    FamilyWeightNotOne { total: f64 },
    /// Events with no component along the optimal one occur with probability
    /// zero and prepare nothing.
    #[error("family members need a nonzero component along the optimal event")]
    ZeroAlpha,
    /// A null-space component was requested but the nearby reduced state has
    /// full rank.
    #[error("the nearby null space is trivial; beta must vanish")]
    NullComponentUnavailable,
    #[error("null combination has {got} coefficients, the null space dimension is {expected}")]
    NullComboLength { expected: usize, got: usize },
    #[error("null combination vanishes; it cannot be normalized")]
    ZeroNullCombination,
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type PrepareResult<T> = Result<T, PrepareError>;

/// Everything known about preparing one target: the optimal event, its
/// probability, and the parametrization of every other event that also
/// works.
#[derive(Debug, Clone)]
pub struct PreparationPlan {
    target: CVector,
    optimal_event: CVector,
    max_probability: f64,
    is_characteristic: bool,
    null_basis: Vec<CVector>,
}

impl PreparationPlan {
    pub fn target(&self) -> &CVector {
        &self.target
    }

    /// The unique event of maximal probability, a unit vector in the range
    /// of `rho1`.
    pub fn optimal_event(&self) -> &CVector {
        &self.optimal_event
    }

    pub fn max_probability(&self) -> f64 {
        self.max_probability
    }

    /// Whether the maximal probability agrees with the characteristic weight
    /// of the target in `rho2`; true for every in-range target.
    pub fn is_characteristic(&self) -> bool {
        self.is_characteristic
    }

    /// Orthonormal basis of the null space of `rho1`; family members may mix
    /// the optimal event with this subspace without changing the prepared
    /// state.
    pub fn null_basis(&self) -> &[CVector] {
        &self.null_basis
    }

    pub fn null_dimension(&self) -> usize {
        self.null_basis.len()
    }

    /// The event `alpha f + beta g`, with `g` the normalized combination of
    /// null-space basis vectors given by `null_combo`. Requires
    /// `|alpha|^2 + |beta|^2 = 1` and a nonzero `alpha`; the member occurs
    /// with probability `|alpha|^2` times the maximum and prepares the same
    /// target.
    pub fn family_member(
        &self,
        alpha: C64,
        beta: C64,
        null_combo: &[C64],
    ) -> PrepareResult<CVector> {
        let total = alpha.norm_sqr() + beta.norm_sqr();
        if (total - 1.0).abs() > tolerances::UNIT_NORM {
            return Err(PrepareError::FamilyWeightNotOne { total });
        }
        if alpha.norm_sqr() <= tolerances::EPS_P {
            return Err(PrepareError::ZeroAlpha);
        }
        let mut member = &self.optimal_event * alpha;
        if beta.norm_sqr() > tolerances::EPS_P {
            if self.null_basis.is_empty() {
                return Err(PrepareError::NullComponentUnavailable);
            }
            if null_combo.len() != self.null_basis.len() {
                return Err(PrepareError::NullComboLength {
                    expected: self.null_basis.len(),
                    got: null_combo.len(),
                });
            }
            let mut g = CVector::zeros(self.optimal_event.len());
            for (c, basis_vector) in null_combo.iter().zip(&self.null_basis) {
                g += basis_vector * *c;
            }
            let norm = g.norm();
            if norm <= tolerances::EPS_P {
                return Err(PrepareError::ZeroNullCombination);
            }
            member += g * (beta / norm);
        }
        Ok(member)
    }

    /// Representative family members at squared overlaps 1, 1/2, and 1/10
    /// with the optimal event, paired with their occurrence probabilities.
    /// Only the optimal event itself is returned when the null space is
    /// trivial.
    pub fn exemplar_members(&self) -> Vec<(CVector, f64)> {
        let mut members = vec![(self.optimal_event.clone(), self.max_probability)];
        if self.null_basis.is_empty() {
            return members;
        }
        let mut combo = vec![C64::new(0.0, 0.0); self.null_basis.len()];
        combo[0] = C64::new(1.0, 0.0);
        for weight in [0.5_f64, 0.1] {
            let alpha = C64::new(weight.sqrt(), 0.0);
            let beta = C64::new((1.0 - weight).sqrt(), 0.0);
            let member = self
                .family_member(alpha, beta, &combo)
                .expect("exemplar coefficients are valid by construction");
            members.push((member, weight * self.max_probability));
        }
        members
    }
}

fn ensure_unit(vector: &CVector, expected_dim: usize) -> PrepareResult<()> {
    if vector.len() != expected_dim {
        return Err(PrepareError::DimensionMismatch { expected: expected_dim, got: vector.len() });
    }
    let norm = vector.norm();
    if (norm - 1.0).abs() > tolerances::UNIT_NORM {
        return Err(PrepareError::NotUnit { norm });
    }
    Ok(())
}

/// True when some nearby event collapses the remote subsystem to `phi2`:
/// in finite dimension, exactly when the target lies in the range of `rho2`.
pub fn is_preparable(ctx: &DiagramContext, phi2: &CVector) -> PrepareResult<bool> {
    ensure_unit(phi2, ctx.state().d2())?;
    Ok(decomp::in_range(ctx.rho2(), phi2)?)
}

/// Builds the full preparation plan for an in-range target.
pub fn plan_preparation(ctx: &DiagramContext, phi2: &CVector) -> PrepareResult<PreparationPlan> {
    ensure_unit(phi2, ctx.state().d2())?;
    let residual = decomp::range_residual(ctx.rho2(), phi2)?;
    if residual > tolerances::RANGE_MEMBERSHIP * phi2.norm().max(1.0) {
        return Err(PrepareError::NotPreparable { residual });
    }
    let pulled = ctx.inv_sqrt_rho2() * phi2;
    let event = ctx.correlation_inverse().apply(&pulled);
    let optimal_event = canonical_phase(&event.unscale(event.norm()));
    let max_probability = (ctx.sqrt_rho1() * &optimal_event).norm_squared();
    let char_weight = decomp::characteristic_weight(ctx.rho2(), phi2)?;
    let is_characteristic =
        (max_probability - char_weight).abs() <= tolerances::OPERATOR_IDENTITY;
    let spectral = linalg::eig_hermitian(ctx.rho1())?;
    let null_basis = spectral.vectors()[spectral.rank..].to_vec();
    Ok(PreparationPlan {
        target: phi2.clone(),
        optimal_event,
        max_probability,
        is_characteristic,
        null_basis,
    })
}

/// Probability that the nearby event `j1` fires, together with the remote
/// state it leaves behind; no state is produced below the probability floor.
pub fn event_probability(
    ctx: &DiagramContext,
    j1: &CVector,
) -> PrepareResult<(f64, Option<CVector>)> {
    ensure_unit(j1, ctx.state().d1())?;
    let image = ctx.op().apply(j1);
    let probability = image.norm_squared();
    if probability <= tolerances::EPS_P {
        return Ok((0.0, None));
    }
    Ok((probability, Some(image.unscale(probability.sqrt()))))
}

/// The case split of preparable targets closes with those lying in the root
/// range but not the range itself: they admit events of probability
/// arbitrarily close to, but never attaining, the supremum. The two sets
/// coincide in finite dimension, so the case is empty here; this marker
/// keeps the analysis total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimalEventGap {
    EmptyInFiniteDimension,
}

pub fn targets_without_optimal_event(_ctx: &DiagramContext) -> OptimalEventGap {
    OptimalEventGap::EmptyInFiniteDimension
}
