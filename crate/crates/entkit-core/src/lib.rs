//! Entanglement structure of finite-dimensional bipartite pure states.
//!
//! Given the coefficient matrix of a pure state of a two-part system, this
//! crate computes the objects that organize everything the distant parts can
//! learn about each other by local measurement and communication:
//!
//! - Schmidt data and the two reduced density operators ([`state`]);
//! - the antiunitary correlation operator that carries structure from the
//!   nearby subsystem to the remote one ([`state`]);
//! - linearly independent convex decompositions of a density operator and
//!   their bijection with orthonormal bases of its range ([`decomp`]);
//! - twin observables, which are measured "for free" on the far side
//!   ([`observables`]);
//! - the commuting square of bijections between nearby/remote bases and
//!   decompositions, with a full verification harness ([`diagrams`]);
//! - remote pure-state preparation plans with optimal event probabilities
//!   ([`prepare`]);
//! - unitary premeasurement evolution and Monte Carlo outcome sampling
//!   ([`measure`]).
//!
//! All numerical comparisons go through the pinned constants in
//! [`tolerances`]; decompositions and eigenbases are canonicalized (ordering
//! and phases) so that equal inputs give bit-identical outputs.

pub mod canonical;
pub mod decomp;
pub mod diagrams;
pub mod linalg;
pub mod measure;
pub mod observables;
pub mod prepare;
pub mod state;
pub mod tolerances;

pub use decomp::{DecompError, Decomposition};
pub use diagrams::{
    Arrow, CommutativityReport, Corner, DiagramContext, DiagramError, DiagramValue,
    IdentityCheck,
};
pub use linalg::{CMatrix, CVector, LinalgError, SpectralData, SvdData};
pub use measure::{
    MeasureError, MeasurementKind, MeasurementSetup, SampleReport, TripartiteOutcome,
};
pub use observables::{
    Observable, ObservableError, PartialSpectralForm, Subsystem, TwinClassification,
};
pub use prepare::{PreparationPlan, PrepareError};
pub use state::{
    AntilinearOp, BipartiteState, CorrelationOperator, SchmidtData, StateError,
};
