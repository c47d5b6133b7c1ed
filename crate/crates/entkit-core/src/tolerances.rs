//! Pinned numeric tolerances.
//!
//! Every comparison in the crate goes through one of these constants so that
//! the accepted error budget is visible in a single place. The values are
//! calibrated for desk-scale dimensions (`dim <= 64`) and `f64` arithmetic.

/// Relative rank cutoff: an eigenvalue counts as nonzero when its magnitude
/// exceeds `dim * lambda_max * RANK_REL`.
pub const RANK_REL: f64 = 1e-12;

/// A vector component anchors the canonical phase once its magnitude exceeds
/// this bound.
pub const PHASE_ANCHOR: f64 = 1e-8;

/// Residual bound for range membership, `|Q v - v| <= RANGE_MEMBERSHIP`.
pub const RANGE_MEMBERSHIP: f64 = 1e-8;

/// Adjacent eigenvalues closer than `DEGENERACY_GAP_REL * |A|` count as
/// degenerate.
pub const DEGENERACY_GAP_REL: f64 = 1e-8;

/// Probability floor; branches at or below it are treated as absent.
pub const EPS_P: f64 = 1e-12;

/// Allowed deviation from unit norm when validating states and vectors.
pub const UNIT_NORM: f64 = 1e-8;

/// Allowed Gram-matrix deviation when validating orthonormal inputs.
pub const ORTHONORMALITY: f64 = 1e-9;

/// Relative Hermiticity defect accepted on operator inputs.
pub const HERMITICITY_REL: f64 = 1e-9;

/// Relative commutator residual for state/range compatibility predicates.
pub const COMPATIBILITY_REL: f64 = 1e-9;

/// Residual bound on operator-level identities (polar reconstructions,
/// reduced-state transport).
pub const OPERATOR_IDENTITY: f64 = 1e-9;

/// Residual bound when a decomposition must reconstruct its density operator.
pub const RECONSTRUCTION: f64 = 1e-9;

/// Deviation bound for commutativity of composed bijections.
pub const DIAGRAM_COMMUTE: f64 = 1e-8;

/// Agreement bound between the two characteristic-weight routes.
pub const CHAR_WEIGHT_AGREE: f64 = 1e-12;

/// Deviation bound for weight sums that must equal one.
pub const WEIGHT_SUM: f64 = 1e-9;

/// Rounding quantum applied to vector entries before lexicographic ordering.
pub const LEX_ROUND: f64 = 1e-9;

/// Rounding quantum applied to weights and eigenvalues before tie-breaking.
pub const WEIGHT_ROUND: f64 = 1e-10;
