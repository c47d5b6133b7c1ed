//! The commuting square of bijections between local bases and remote
//! decompositions, with a verification harness.
//!
//! Four corners: orthonormal bases of the range of `rho1` (nearby bases),
//! orthonormal bases of the range of `rho2` (remote bases), linearly
//! independent complete decompositions of `rho1` (nearby decompositions), and
//! the same for `rho2` (remote decompositions). Between every ordered pair of
//! corners there is exactly one arrow, twelve in all:
//!
//! - horizontal arrows transport by the correlation operator (or its
//!   inverse), preserving weights where present;
//! - vertical arrows are exactly the basis/decomposition bijections of
//!   [`crate::decomp`] ([`crate::decomp::cvl_forward`] and its inverse);
//! - diagonal arrows are the physical maps: measuring a nearby basis induces
//!   a remote decomposition with branch weights `p_i = <e_i|rho1|e_i>`, and
//!   conversely every linearly independent remote decomposition arises from
//!   exactly one nearby basis.
//!
//! Every composite of two arrows equals the direct arrow between its
//! endpoints (or the identity when it returns to its start), up to the
//! per-vector phases and ordering that the canonical forms remove.
//! [`verify_diagram1`] checks all 36 composable ordered pairs on a concrete
//! instance. [`map_vector`] applies the same arrows pointwise to a single
//! vector, which is the form remote preparation uses.

use thiserror::Error;

use crate::canonical::{canonical_phase, family_distance, weighted_family_distance};
use crate::decomp::{self, DecompError, Decomposition};
use crate::linalg::{self, CMatrix, CVector, LinalgError};
use crate::state::{
    correlation_operator, reduced_states, to_antilinear, AntilinearOp, BipartiteState,
};
use crate::tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    /// Range bases must have exactly one vector per positive eigenvalue.
    #[error("basis has {got} vectors, the range dimension is {expected}")]
    WrongBasisSize { expected: usize, got: usize },
    #[error("basis is not orthonormal: deviation {deviation:.3e}")]
    NotOrthonormal { deviation: f64 },
    #[error("vector {index} leaves the range: residual {residual:.3e}")]
    OutsideRange { index: usize, residual: f64 },
    #[error("vector {index} has dimension {got}, subsystem dimension is {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    /// A decomposition fed to an arrow must reconstruct that side's reduced
    /// state.
    #[error("decomposition does not reconstruct the reduced state: residual {residual:.3e}")]
    Inconsistent { residual: f64 },
    /// The bijections are between bases and linearly independent
    /// decompositions only.
    #[error("decomposition vectors are linearly dependent")]
    Dependent,
    /// Arrows act on the value kind of their source corner.
    #[error("arrow {arrow:?} starts at a {expected} corner, got a {got} value")]
    KindMismatch { arrow: Arrow, expected: &'static str, got: &'static str },
    #[error("vector must be normalized: |v| = {norm}")]
    NotUnit { norm: f64 },
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type DiagramResult<T> = Result<T, DiagramError>;

/// The four corners of the square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    NearbyBasis,
    RemoteBasis,
    NearbyDecomp,
    RemoteDecomp,
}

impl Corner {
    pub const ALL: [Corner; 4] =
        [Corner::NearbyBasis, Corner::RemoteBasis, Corner::NearbyDecomp, Corner::RemoteDecomp];

    pub fn label(self) -> &'static str {
        match self {
            Corner::NearbyBasis => "nearby-basis",
            Corner::RemoteBasis => "remote-basis",
            Corner::NearbyDecomp => "nearby-decomp",
            Corner::RemoteDecomp => "remote-decomp",
        }
    }

}

/// The twelve directed arrows, one per ordered pair of distinct corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arrow {
    NearbyBasisToRemoteBasis,
    RemoteBasisToNearbyBasis,
    NearbyBasisToNearbyDecomp,
    NearbyDecompToNearbyBasis,
    RemoteBasisToRemoteDecomp,
    RemoteDecompToRemoteBasis,
    NearbyDecompToRemoteDecomp,
    RemoteDecompToNearbyDecomp,
    NearbyBasisToRemoteDecomp,
    RemoteDecompToNearbyBasis,
    RemoteBasisToNearbyDecomp,
    NearbyDecompToRemoteBasis,
}

impl Arrow {
    pub const ALL: [Arrow; 12] = [
        Arrow::NearbyBasisToRemoteBasis,
        Arrow::RemoteBasisToNearbyBasis,
        Arrow::NearbyBasisToNearbyDecomp,
        Arrow::NearbyDecompToNearbyBasis,
        Arrow::RemoteBasisToRemoteDecomp,
        Arrow::RemoteDecompToRemoteBasis,
        Arrow::NearbyDecompToRemoteDecomp,
        Arrow::RemoteDecompToNearbyDecomp,
        Arrow::NearbyBasisToRemoteDecomp,
        Arrow::RemoteDecompToNearbyBasis,
        Arrow::RemoteBasisToNearbyDecomp,
        Arrow::NearbyDecompToRemoteBasis,
    ];

    pub fn source(self) -> Corner {
        match self {
            Arrow::NearbyBasisToRemoteBasis
            | Arrow::NearbyBasisToNearbyDecomp
            | Arrow::NearbyBasisToRemoteDecomp => Corner::NearbyBasis,
            Arrow::RemoteBasisToNearbyBasis
            | Arrow::RemoteBasisToRemoteDecomp
            | Arrow::RemoteBasisToNearbyDecomp => Corner::RemoteBasis,
            Arrow::NearbyDecompToNearbyBasis
            | Arrow::NearbyDecompToRemoteDecomp
            | Arrow::NearbyDecompToRemoteBasis => Corner::NearbyDecomp,
            Arrow::RemoteDecompToRemoteBasis
            | Arrow::RemoteDecompToNearbyDecomp
            | Arrow::RemoteDecompToNearbyBasis => Corner::RemoteDecomp,
        }
    }

    pub fn target(self) -> Corner {
        match self {
            Arrow::RemoteBasisToNearbyBasis
            | Arrow::NearbyDecompToNearbyBasis
            | Arrow::RemoteDecompToNearbyBasis => Corner::NearbyBasis,
            Arrow::NearbyBasisToRemoteBasis
            | Arrow::RemoteDecompToRemoteBasis
            | Arrow::NearbyDecompToRemoteBasis => Corner::RemoteBasis,
            Arrow::NearbyBasisToNearbyDecomp
            | Arrow::RemoteDecompToNearbyDecomp
            | Arrow::RemoteBasisToNearbyDecomp => Corner::NearbyDecomp,
            Arrow::RemoteBasisToRemoteDecomp
            | Arrow::NearbyDecompToRemoteDecomp
            | Arrow::NearbyBasisToRemoteDecomp => Corner::RemoteDecomp,
        }
    }

    /// The unique arrow between two distinct corners.
    pub fn between(source: Corner, target: Corner) -> Option<Arrow> {
        Arrow::ALL.into_iter().find(|a| a.source() == source && a.target() == target)
    }

    /// The arrow running the opposite way; every arrow is a bijection and
    /// this is its inverse.
    pub fn reverse(self) -> Arrow {
        Arrow::between(self.target(), self.source())
            .expect("every ordered corner pair has an arrow")
    }

    pub fn label(self) -> String {
        format!("{}->{}", self.source().label(), self.target().label())
    }
}

/// A value sitting at a corner: an ordered orthonormal basis or a canonical
/// decomposition.
#[derive(Debug, Clone)]
pub enum DiagramValue {
    Basis(Vec<CVector>),
    Decomp(Decomposition),
}

impl DiagramValue {
    pub fn kind(&self) -> &'static str {
        match self {
            DiagramValue::Basis(_) => "basis",
            DiagramValue::Decomp(_) => "decomposition",
        }
    }

    pub fn as_basis(&self) -> Option<&[CVector]> {
        match self {
            DiagramValue::Basis(b) => Some(b),
            DiagramValue::Decomp(_) => None,
        }
    }

    pub fn as_decomp(&self) -> Option<&Decomposition> {
        match self {
            DiagramValue::Decomp(d) => Some(d),
            DiagramValue::Basis(_) => None,
        }
    }
}

/// Distance between two corner values modulo per-vector phases and ordering:
/// matched phase-aligned distance for bases, matched max of weight gap and
/// phase-aligned distance for decompositions. Infinite across kinds.
pub fn value_distance(a: &DiagramValue, b: &DiagramValue) -> f64 {
    match (a, b) {
        (DiagramValue::Basis(x), DiagramValue::Basis(y)) => family_distance(x, y),
        (DiagramValue::Decomp(x), DiagramValue::Decomp(y)) => weighted_family_distance(
            x.weights(),
            x.vectors(),
            y.weights(),
            y.vectors(),
        ),
        _ => f64::INFINITY,
    }
}

/// Everything the arrows need, derived once from a state: reduced states,
/// correlation operator, range projectors, square roots and their range
/// pseudo-inverses.
#[derive(Debug, Clone)]
pub struct DiagramContext {
    state: BipartiteState,
    op: AntilinearOp,
    adj: AntilinearOp,
    corr: AntilinearOp,
    corr_adj: AntilinearOp,
    rho1: CMatrix,
    rho2: CMatrix,
    q1: CMatrix,
    q2: CMatrix,
    sqrt_rho1: CMatrix,
    sqrt_rho2: CMatrix,
    inv_sqrt_rho1: CMatrix,
    inv_sqrt_rho2: CMatrix,
    rank: usize,
}

impl DiagramContext {
    pub fn new(state: BipartiteState) -> Self {
        let op = to_antilinear(&state);
        let adj = op.adjoint();
        let (rho1, rho2) = reduced_states(&state);
        let corr = correlation_operator(&state);
        let corr_adj = corr.op.adjoint();
        let sqrt_rho1 = linalg::op_sqrt(&rho1).expect("reduced states are positive semidefinite");
        let sqrt_rho2 = linalg::op_sqrt(&rho2).expect("reduced states are positive semidefinite");
        let inv_sqrt_rho1 = linalg::pinv_on_range(&rho1, -0.5)
            .expect("reduced states are positive semidefinite");
        let inv_sqrt_rho2 = linalg::pinv_on_range(&rho2, -0.5)
            .expect("reduced states are positive semidefinite");
        let rank = linalg::psd_rank(&rho1).expect("reduced states are positive semidefinite");
        Self {
            state,
            op,
            adj,
            corr: corr.op,
            corr_adj,
            rho1,
            rho2,
            q1: corr.q1,
            q2: corr.q2,
            sqrt_rho1,
            sqrt_rho2,
            inv_sqrt_rho1,
            inv_sqrt_rho2,
            rank,
        }
    }

    pub fn state(&self) -> &BipartiteState {
        &self.state
    }

    /// The antilinear operator representing the state itself.
    pub fn op(&self) -> &AntilinearOp {
        &self.op
    }

    pub fn rho1(&self) -> &CMatrix {
        &self.rho1
    }

    pub fn rho2(&self) -> &CMatrix {
        &self.rho2
    }

    /// The correlation operator, mapping the range of `rho1` onto the range
    /// of `rho2` antiunitarily.
    pub fn correlation(&self) -> &AntilinearOp {
        &self.corr
    }

    /// Its inverse on the ranges.
    pub fn correlation_inverse(&self) -> &AntilinearOp {
        &self.corr_adj
    }

    pub fn range_projector_nearby(&self) -> &CMatrix {
        &self.q1
    }

    pub fn range_projector_remote(&self) -> &CMatrix {
        &self.q2
    }

    pub fn sqrt_rho1(&self) -> &CMatrix {
        &self.sqrt_rho1
    }

    pub fn sqrt_rho2(&self) -> &CMatrix {
        &self.sqrt_rho2
    }

    pub fn inv_sqrt_rho1(&self) -> &CMatrix {
        &self.inv_sqrt_rho1
    }

    pub fn inv_sqrt_rho2(&self) -> &CMatrix {
        &self.inv_sqrt_rho2
    }

    /// Common rank of the two reduced states.
    pub fn rank(&self) -> usize {
        self.rank
    }

    fn side(&self, nearby: bool) -> SideView<'_> {
        if nearby {
            SideView {
                rho: &self.rho1,
                q: &self.q1,
                inv_sqrt: &self.inv_sqrt_rho1,
                dim: self.state.d1(),
                // nearby events map to remote states through the state
                // operator itself
                branch: &self.op,
                transport: &self.corr,
            }
        } else {
            SideView {
                rho: &self.rho2,
                q: &self.q2,
                inv_sqrt: &self.inv_sqrt_rho2,
                dim: self.state.d2(),
                branch: &self.adj,
                transport: &self.corr_adj,
            }
        }
    }

    fn validate_range_basis(&self, basis: &[CVector], nearby: bool) -> DiagramResult<()> {
        let side = self.side(nearby);
        if basis.len() != self.rank {
            return Err(DiagramError::WrongBasisSize { expected: self.rank, got: basis.len() });
        }
        for (index, e) in basis.iter().enumerate() {
            if e.len() != side.dim {
                return Err(DiagramError::DimensionMismatch {
                    index,
                    expected: side.dim,
                    got: e.len(),
                });
            }
        }
        let deviation = linalg::orthonormality_deviation(basis);
        if deviation > tolerances::ORTHONORMALITY {
            return Err(DiagramError::NotOrthonormal { deviation });
        }
        for (index, e) in basis.iter().enumerate() {
            let residual = (side.q * e - e).norm();
            if residual > tolerances::RANGE_MEMBERSHIP {
                return Err(DiagramError::OutsideRange { index, residual });
            }
        }
        Ok(())
    }

    fn validate_decomp(&self, decomp: &Decomposition, nearby: bool) -> DiagramResult<()> {
        let side = self.side(nearby);
        if decomp.dim() != side.dim {
            return Err(DiagramError::DimensionMismatch {
                index: 0,
                expected: side.dim,
                got: decomp.dim(),
            });
        }
        let residual = (decomp.reconstruct() - side.rho).norm();
        if residual > tolerances::RECONSTRUCTION {
            return Err(DiagramError::Inconsistent { residual });
        }
        if !decomp.is_linearly_independent() {
            return Err(DiagramError::Dependent);
        }
        Ok(())
    }
}

/// One side of the square with the operators that leave it.
struct SideView<'a> {
    rho: &'a CMatrix,
    q: &'a CMatrix,
    inv_sqrt: &'a CMatrix,
    dim: usize,
    branch: &'a AntilinearOp,
    transport: &'a AntilinearOp,
}

/// The remote decomposition induced by measuring a full orthonormal basis of
/// the nearby space: `p_j = |A e_j|^2` with branches at or below the
/// probability floor dropped, `phi_j = p_j^{-1/2} A e_j`. The output vectors
/// need not be linearly independent; they are exactly when the basis stays
/// inside the range of `rho1`.
pub fn remote_decomposition_from_onb(
    ctx: &DiagramContext,
    basis: &[CVector],
) -> DiagramResult<Decomposition> {
    let d1 = ctx.state.d1();
    if basis.len() != d1 {
        return Err(DiagramError::WrongBasisSize { expected: d1, got: basis.len() });
    }
    for (index, e) in basis.iter().enumerate() {
        if e.len() != d1 {
            return Err(DiagramError::DimensionMismatch { index, expected: d1, got: e.len() });
        }
    }
    let deviation = linalg::orthonormality_deviation(basis);
    if deviation > tolerances::ORTHONORMALITY {
        return Err(DiagramError::NotOrthonormal { deviation });
    }
    let mut terms = Vec::new();
    for e in basis {
        let image = ctx.op.apply(e);
        let weight = image.norm_squared();
        if weight > tolerances::EPS_P {
            terms.push((weight, image.unscale(weight.sqrt())));
        }
    }
    Ok(Decomposition::new(terms)?)
}

fn transport_basis(ctx: &DiagramContext, basis: &[CVector], nearby: bool) -> Vec<CVector> {
    let side = ctx.side(nearby);
    basis.iter().map(|e| canonical_phase(&side.transport.apply(e))).collect()
}

fn branch_decomp(
    ctx: &DiagramContext,
    basis: &[CVector],
    nearby: bool,
) -> DiagramResult<Decomposition> {
    ctx.validate_range_basis(basis, nearby)?;
    let side = ctx.side(nearby);
    let terms = basis
        .iter()
        .map(|e| {
            let image = side.branch.apply(e);
            let weight = image.norm_squared();
            (weight, image.unscale(weight.sqrt()))
        })
        .collect();
    Ok(Decomposition::new(terms)?)
}

fn events_basis(
    ctx: &DiagramContext,
    decomp: &Decomposition,
    decomp_nearby: bool,
) -> DiagramResult<Vec<CVector>> {
    ctx.validate_decomp(decomp, decomp_nearby)?;
    let side = ctx.side(decomp_nearby);
    Ok(decomp
        .iter()
        .map(|(weight, phi)| {
            let pulled = (side.inv_sqrt * phi).scale(weight.sqrt());
            canonical_phase(&side.transport.apply(&pulled))
        })
        .collect())
}

fn transport_decomp(
    ctx: &DiagramContext,
    decomp: &Decomposition,
    nearby: bool,
) -> DiagramResult<Decomposition> {
    ctx.validate_decomp(decomp, nearby)?;
    let side = ctx.side(nearby);
    let terms = decomp
        .iter()
        .map(|(weight, chi)| (weight, side.transport.apply(chi)))
        .collect();
    Ok(Decomposition::new(terms)?)
}

fn expect_basis(arrow: Arrow, value: &DiagramValue) -> DiagramResult<&[CVector]> {
    value.as_basis().ok_or(DiagramError::KindMismatch {
        arrow,
        expected: "basis",
        got: value.kind(),
    })
}

fn expect_decomp(arrow: Arrow, value: &DiagramValue) -> DiagramResult<&Decomposition> {
    value.as_decomp().ok_or(DiagramError::KindMismatch {
        arrow,
        expected: "decomposition",
        got: value.kind(),
    })
}

/// Applies one arrow of the square to a corner value.
pub fn apply_arrow(
    ctx: &DiagramContext,
    arrow: Arrow,
    value: &DiagramValue,
) -> DiagramResult<DiagramValue> {
    match arrow {
        Arrow::NearbyBasisToRemoteBasis => {
            let basis = expect_basis(arrow, value)?;
            ctx.validate_range_basis(basis, true)?;
            Ok(DiagramValue::Basis(transport_basis(ctx, basis, true)))
        }
        Arrow::RemoteBasisToNearbyBasis => {
            let basis = expect_basis(arrow, value)?;
            ctx.validate_range_basis(basis, false)?;
            Ok(DiagramValue::Basis(transport_basis(ctx, basis, false)))
        }
        Arrow::NearbyBasisToNearbyDecomp => {
            let basis = expect_basis(arrow, value)?;
            Ok(DiagramValue::Decomp(decomp::cvl_forward(&ctx.rho1, basis)?))
        }
        Arrow::NearbyDecompToNearbyBasis => {
            let d = expect_decomp(arrow, value)?;
            let basis = decomp::cvl_inverse(&ctx.rho1, d)?;
            Ok(DiagramValue::Basis(basis.iter().map(canonical_phase).collect()))
        }
        Arrow::RemoteBasisToRemoteDecomp => {
            let basis = expect_basis(arrow, value)?;
            Ok(DiagramValue::Decomp(decomp::cvl_forward(&ctx.rho2, basis)?))
        }
        Arrow::RemoteDecompToRemoteBasis => {
            let d = expect_decomp(arrow, value)?;
            let basis = decomp::cvl_inverse(&ctx.rho2, d)?;
            Ok(DiagramValue::Basis(basis.iter().map(canonical_phase).collect()))
        }
        Arrow::NearbyDecompToRemoteDecomp => {
            let d = expect_decomp(arrow, value)?;
            Ok(DiagramValue::Decomp(transport_decomp(ctx, d, true)?))
        }
        Arrow::RemoteDecompToNearbyDecomp => {
            let d = expect_decomp(arrow, value)?;
            Ok(DiagramValue::Decomp(transport_decomp(ctx, d, false)?))
        }
        Arrow::NearbyBasisToRemoteDecomp => {
            let basis = expect_basis(arrow, value)?;
            Ok(DiagramValue::Decomp(branch_decomp(ctx, basis, true)?))
        }
        Arrow::RemoteDecompToNearbyBasis => {
            let d = expect_decomp(arrow, value)?;
            Ok(DiagramValue::Basis(events_basis(ctx, d, false)?))
        }
        Arrow::RemoteBasisToNearbyDecomp => {
            let basis = expect_basis(arrow, value)?;
            Ok(DiagramValue::Decomp(branch_decomp(ctx, basis, false)?))
        }
        Arrow::NearbyDecompToRemoteBasis => {
            let d = expect_decomp(arrow, value)?;
            Ok(DiagramValue::Basis(events_basis(ctx, d, true)?))
        }
    }
}

/// One composition identity checked at a concrete instance: following
/// `first` then `second` must equal the `direct` arrow (or the identity when
/// the composite returns to its start).
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub first: Arrow,
    pub second: Arrow,
    pub direct: Option<Arrow>,
    pub deviation: f64,
    pub pass: bool,
}

impl IdentityCheck {
    pub fn label(&self) -> String {
        let composite = format!("{} then {}", self.first.label(), self.second.label());
        match self.direct {
            Some(direct) => format!("{} = {}", composite, direct.label()),
            None => format!("{} = identity", composite),
        }
    }
}

/// Result of checking every composable ordered pair of arrows at one
/// instance.
#[derive(Debug, Clone)]
pub struct CommutativityReport {
    pub checks: Vec<IdentityCheck>,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl CommutativityReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Checks all 36 composable ordered arrow pairs starting from the corner
/// values generated by `basis` (an orthonormal basis of the range of
/// `rho1`), comparing each composite against the direct arrow up to phases
/// and ordering.
pub fn verify_diagram1(
    ctx: &DiagramContext,
    basis: &[CVector],
) -> DiagramResult<CommutativityReport> {
    verify_diagram1_with(ctx, basis, tolerances::DIAGRAM_COMMUTE)
}

/// [`verify_diagram1`] with an explicit deviation tolerance.
pub fn verify_diagram1_with(
    ctx: &DiagramContext,
    basis: &[CVector],
    tolerance: f64,
) -> DiagramResult<CommutativityReport> {
    ctx.validate_range_basis(basis, true)?;
    let seed = DiagramValue::Basis(basis.iter().map(canonical_phase).collect());
    let corner_value = |corner: Corner| -> DiagramResult<DiagramValue> {
        if corner == Corner::NearbyBasis {
            return Ok(seed.clone());
        }
        let arrow = Arrow::between(Corner::NearbyBasis, corner)
            .expect("distinct corners are connected");
        apply_arrow(ctx, arrow, &seed)
    };
    let values: Vec<(Corner, DiagramValue)> = Corner::ALL
        .into_iter()
        .map(|c| Ok((c, corner_value(c)?)))
        .collect::<DiagramResult<_>>()?;
    fn value_at(values: &[(Corner, DiagramValue)], corner: Corner) -> &DiagramValue {
        &values.iter().find(|(c, _)| *c == corner).expect("all corners computed").1
    }
    let mut checks = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for first in Arrow::ALL {
        let start = value_at(&values, first.source());
        let mid = apply_arrow(ctx, first, start)?;
        for second in Arrow::ALL.into_iter().filter(|a| a.source() == first.target()) {
            let composite = apply_arrow(ctx, second, &mid)?;
            let (direct, reference) = if second.target() == first.source() {
                (None, start.clone())
            } else {
                let arrow = Arrow::between(first.source(), second.target())
                    .expect("distinct corners are connected");
                (Some(arrow), apply_arrow(ctx, arrow, start)?)
            };
            let deviation = value_distance(&composite, &reference);
            max_deviation = max_deviation.max(deviation);
            checks.push(IdentityCheck {
                first,
                second,
                direct,
                deviation,
                pass: deviation <= tolerance,
            });
        }
    }
    Ok(CommutativityReport { checks, max_deviation, tolerance })
}

/// Applies an arrow pointwise to a single unit vector of its source set and
/// returns the image vector together with the attached scalar: the branch
/// weight for basis-to-decomposition arrows, the weight the input carries in
/// its own decomposition for decomposition-to-basis arrows, and 1 for the
/// norm-preserving transports.
pub fn map_vector(
    ctx: &DiagramContext,
    arrow: Arrow,
    vector: &CVector,
) -> DiagramResult<(CVector, f64)> {
    let nearby = matches!(arrow.source(), Corner::NearbyBasis | Corner::NearbyDecomp);
    let side = ctx.side(nearby);
    if vector.len() != side.dim {
        return Err(DiagramError::DimensionMismatch {
            index: 0,
            expected: side.dim,
            got: vector.len(),
        });
    }
    let norm = vector.norm();
    if (norm - 1.0).abs() > tolerances::UNIT_NORM {
        return Err(DiagramError::NotUnit { norm });
    }
    let residual = (side.q * vector - vector).norm();
    if residual > tolerances::RANGE_MEMBERSHIP {
        return Err(DiagramError::OutsideRange { index: 0, residual });
    }
    let transported = |op: &AntilinearOp| (canonical_phase(&op.apply(vector)), 1.0);
    // basis -> decomposition: the branch the vector generates
    let weighted = |image: CVector| {
        let weight = image.norm_squared();
        (canonical_phase(&image.unscale(weight.sqrt())), weight)
    };
    // decomposition -> basis: rescaling by the inverse root; the inverse of
    // the squared norm is the weight the vector carries in its own
    // decomposition (its characteristic weight)
    let unweighted = |pulled: CVector, back: Option<&AntilinearOp>| {
        let weight = 1.0 / pulled.norm_squared();
        let unit = pulled.unscale(pulled.norm());
        let out = match back {
            Some(op) => op.apply(&unit),
            None => unit,
        };
        (canonical_phase(&out), weight)
    };
    Ok(match arrow {
        Arrow::NearbyBasisToRemoteBasis | Arrow::NearbyDecompToRemoteDecomp => {
            transported(&ctx.corr)
        }
        Arrow::RemoteBasisToNearbyBasis | Arrow::RemoteDecompToNearbyDecomp => {
            transported(&ctx.corr_adj)
        }
        Arrow::NearbyBasisToNearbyDecomp => weighted(&ctx.sqrt_rho1 * vector),
        Arrow::RemoteBasisToRemoteDecomp => weighted(&ctx.sqrt_rho2 * vector),
        Arrow::NearbyBasisToRemoteDecomp => weighted(ctx.op.apply(vector)),
        Arrow::RemoteBasisToNearbyDecomp => weighted(ctx.adj.apply(vector)),
        Arrow::NearbyDecompToNearbyBasis => unweighted(&ctx.inv_sqrt_rho1 * vector, None),
        Arrow::RemoteDecompToRemoteBasis => unweighted(&ctx.inv_sqrt_rho2 * vector, None),
        Arrow::NearbyDecompToRemoteBasis => {
            unweighted(&ctx.inv_sqrt_rho1 * vector, Some(&ctx.corr))
        }
        Arrow::RemoteDecompToNearbyBasis => {
            unweighted(&ctx.inv_sqrt_rho2 * vector, Some(&ctx.corr_adj))
        }
    })
}
