//! Commands reading the state alone: schmidt, correlation-op, reduce.

use std::path::Path;

use entkit_core::{canonical, linalg, state, tolerances, CMatrix};
use num_complex::Complex64 as C64;
use serde_json::json;

use crate::error::CliResult;
use crate::files;
use crate::render::{self, Checks, Document};

pub fn schmidt(state_path: &Path, scale: f64) -> CliResult<Document> {
    let loaded = files::load_state(state_path)?;
    let st = &loaded.value;
    let data = state::schmidt(st);
    let mut rebuilt = CMatrix::zeros(st.d1(), st.d2());
    for ((c, l), r) in data.coefficients.iter().zip(&data.left).zip(&data.right) {
        rebuilt += (l * r.transpose()).scale(*c);
    }
    let mut checks = Checks::new();
    checks.metric(
        "schmidt expansion reconstructs the coefficient matrix",
        (rebuilt - st.coeffs()).norm(),
        tolerances::RECONSTRUCTION * scale,
    );
    checks.metric(
        "nearby schmidt vectors are orthonormal",
        linalg::orthonormality_deviation(&data.left),
        tolerances::ORTHONORMALITY * scale,
    );
    checks.metric(
        "remote schmidt vectors are orthonormal",
        linalg::orthonormality_deviation(&data.right),
        tolerances::ORTHONORMALITY * scale,
    );
    checks.metric(
        "schmidt weights sum to one",
        (data.weights().iter().sum::<f64>() - 1.0).abs(),
        tolerances::WEIGHT_SUM * scale,
    );
    Ok(Document {
        command: "schmidt",
        inputs: json!({ "state": loaded.echo, "tolerance_scale": scale }),
        results: json!({
            "rank": data.rank(),
            "coefficients": render::reals(&data.coefficients),
            "weights": render::reals(&data.weights()),
            "nearby_vectors": render::vectors(&data.left),
            "remote_vectors": render::vectors(&data.right),
        }),
        checks,
    })
}

pub fn correlation_op(state_path: &Path, scale: f64) -> CliResult<Document> {
    let loaded = files::load_state(state_path)?;
    let st = &loaded.value;
    let (rho1, rho2) = state::reduced_states(st);
    let corr = state::correlation_operator(st);
    let op = state::to_antilinear(st);
    let adj = corr.op.adjoint();
    let sqrt1 = linalg::op_sqrt(&rho1).expect("reduced states are positive semidefinite");
    let sqrt2 = linalg::op_sqrt(&rho2).expect("reduced states are positive semidefinite");
    let tol = tolerances::OPERATOR_IDENTITY * scale;

    let mut checks = Checks::new();
    checks.metric(
        "adjoint after correlation is the nearby range projector",
        canonical::operator_distance(&adj.compose(&corr.op), &corr.q1),
        tol,
    );
    checks.metric(
        "correlation after adjoint is the remote range projector",
        canonical::operator_distance(&corr.op.compose(&adj), &corr.q2),
        tol,
    );
    checks.metric(
        "state operator splits as correlation after the nearby root",
        canonical::operator_distance(corr.op.after_linear(&sqrt1).matrix(), op.matrix()),
        tol,
    );
    checks.metric(
        "state operator splits as the remote root after correlation",
        canonical::operator_distance(
            corr.op.before_linear(&sqrt2).matrix(),
            op.after_linear(&corr.q1).matrix(),
        ),
        tol,
    );
    checks.metric(
        "adjoint state operator splits as the nearby root after the inverse correlation",
        canonical::operator_distance(adj.before_linear(&sqrt1).matrix(), op.adjoint().matrix()),
        tol,
    );
    checks.metric(
        "correlation transports the nearby reduced state to the remote one",
        canonical::operator_distance(&corr.op.sandwich(&rho1), &rho2),
        tol,
    );
    checks.metric(
        "inverse correlation transports the remote reduced state back",
        canonical::operator_distance(&adj.sandwich(&rho2), &rho1),
        tol,
    );
    let overlap = state::hs_inner(&op, &op).expect("an operator matches its own shape");
    checks.metric(
        "state has unit norm as an operator",
        (overlap - C64::new(1.0, 0.0)).norm(),
        tolerances::UNIT_NORM * scale,
    );
    let back = state::from_antilinear(&op).expect("operator representation is a valid state");
    checks.metric(
        "operator representation round-trips to the state",
        (back.coeffs() - st.coeffs()).norm(),
        tol,
    );
    Ok(Document {
        command: "correlation-op",
        inputs: json!({ "state": loaded.echo, "tolerance_scale": scale }),
        results: json!({
            "correlation_matrix": render::matrix(corr.op.matrix()),
            "range_projector_nearby": render::matrix(&corr.q1),
            "range_projector_remote": render::matrix(&corr.q2),
            "state_operator": render::matrix(op.matrix()),
        }),
        checks,
    })
}

pub fn reduce(state_path: &Path, scale: f64) -> CliResult<Document> {
    let loaded = files::load_state(state_path)?;
    let st = &loaded.value;
    let (rho1, rho2) = state::reduced_states(st);
    let s1 = linalg::eig_psd(&rho1).expect("reduced states are positive semidefinite");
    let s2 = linalg::eig_psd(&rho2).expect("reduced states are positive semidefinite");
    let rank1 = linalg::psd_rank(&rho1).expect("reduced states are positive semidefinite");
    let rank2 = linalg::psd_rank(&rho2).expect("reduced states are positive semidefinite");

    let mut checks = Checks::new();
    checks.metric(
        "nearby reduced state has unit trace",
        (rho1.trace() - C64::new(1.0, 0.0)).norm(),
        tolerances::WEIGHT_SUM * scale,
    );
    checks.metric(
        "remote reduced state has unit trace",
        (rho2.trace() - C64::new(1.0, 0.0)).norm(),
        tolerances::WEIGHT_SUM * scale,
    );
    checks.predicate("reduced states have equal rank", rank1 == rank2);
    let rank = rank1.min(rank2);
    let spectra_gap = (0..rank)
        .map(|i| (s1.eigenvalues[i] - s2.eigenvalues[i]).abs())
        .fold(0.0, f64::max);
    checks.metric(
        "positive spectra of the reduced states agree",
        spectra_gap,
        tolerances::OPERATOR_IDENTITY * scale,
    );
    Ok(Document {
        command: "reduce",
        inputs: json!({ "state": loaded.echo, "tolerance_scale": scale }),
        results: json!({
            "rho1": render::matrix(&rho1),
            "rho2": render::matrix(&rho2),
            "spectrum_nearby": render::reals(&s1.eigenvalues),
            "spectrum_remote": render::reals(&s2.eigenvalues),
            "rank": rank1,
        }),
        checks,
    })
}
