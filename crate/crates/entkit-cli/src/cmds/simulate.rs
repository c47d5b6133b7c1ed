//! The simulate command: premeasurement branches and Monte Carlo sampling.

use std::path::Path;

use entkit_core::{
    canonical, diagrams, measure, state, tolerances, Arrow, CMatrix, CVector, DiagramContext,
    DiagramValue, MeasurementSetup,
};
use serde_json::{json, Value};

use crate::error::{precondition, CliResult};
use crate::files;
use crate::render::{self, Checks, Document};

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    state_path: &Path,
    basis_path: &Path,
    shots: u64,
    seed: u64,
    second_kind: Option<&Path>,
    parallel_shots: bool,
    scale: f64,
) -> CliResult<Document> {
    let loaded_state = files::load_state(state_path)?;
    let loaded_basis = files::load_basis(basis_path)?;
    let st = &loaded_state.value;
    let basis = &loaded_basis.value;
    let (setup, post_echo) = match second_kind {
        Some(path) => {
            let post = files::load_basis(path)?;
            let setup =
                MeasurementSetup::second_kind(st.clone(), basis.clone(), Some(post.value.clone()))
                    .map_err(precondition)?;
            (setup, post.echo)
        }
        None => {
            let setup =
                MeasurementSetup::repeatable(st.clone(), basis.clone()).map_err(precondition)?;
            (setup, Value::Null)
        }
    };
    let outcomes = measure::evolve(&setup);
    let report = if parallel_shots {
        measure::sample_parallel(&setup, shots, seed)
    } else {
        measure::sample(&setup, shots, seed)
    }
    .map_err(precondition)?;

    let modal_position = report
        .counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .expect("a valid setup has at least one branch");
    let modal = measure::select(&setup, outcomes[modal_position].pointer_index)
        .map_err(precondition)?;

    let mut amplitude_dev: f64 = 0.0;
    for outcome in &outcomes {
        let image = state::partial_scalar_product(&setup.basis()[outcome.pointer_index], st)
            .map_err(precondition)?;
        let p = image.norm_squared();
        amplitude_dev = amplitude_dev.max((p - outcome.probability).abs());
        amplitude_dev = amplitude_dev.max(canonical::phase_aligned_distance(
            &image.unscale(p.sqrt()),
            &outcome.remote_state,
        ));
    }

    let ctx = DiagramContext::new(st.clone());
    let decomposition = if basis.len() == st.d1() {
        diagrams::remote_decomposition_from_onb(&ctx, basis).map_err(precondition)?
    } else {
        let value =
            diagrams::apply_arrow(&ctx, Arrow::NearbyBasisToRemoteDecomp, &DiagramValue::Basis(basis.clone()))
                .map_err(precondition)?;
        value.as_decomp().expect("a decomposition corner holds a decomposition").clone()
    };
    let weights: Vec<f64> = outcomes.iter().map(|o| o.probability).collect();
    let branch_vectors: Vec<CVector> = outcomes.iter().map(|o| o.remote_state.clone()).collect();

    let mut ensemble = CMatrix::zeros(st.d2(), st.d2());
    for outcome in &outcomes {
        ensemble += (&outcome.remote_state * outcome.remote_state.adjoint())
            .scale(outcome.probability);
    }

    let mut checks = Checks::new();
    checks.metric(
        "branch probabilities sum to one",
        (weights.iter().sum::<f64>() - 1.0).abs(),
        tolerances::WEIGHT_SUM * scale,
    );
    checks.metric(
        "branch amplitudes follow from the partial scalar product",
        amplitude_dev,
        tolerances::OPERATOR_IDENTITY * scale,
    );
    checks.metric(
        "branches realize the remote decomposition",
        canonical::weighted_family_distance(
            &weights,
            &branch_vectors,
            decomposition.weights(),
            decomposition.vectors(),
        ),
        tolerances::DIAGRAM_COMMUTE * scale,
    );
    checks.metric(
        "branch ensemble rebuilds the remote reduced state",
        (ensemble - ctx.rho2()).norm(),
        tolerances::RECONSTRUCTION * scale,
    );

    let branches: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "pointer_index": o.pointer_index,
                "probability": o.probability,
                "nearby_state": render::vector(&o.nearby_state),
                "remote_state": render::vector(&o.remote_state),
            })
        })
        .collect();
    Ok(Document {
        command: "simulate",
        inputs: json!({
            "state": loaded_state.echo,
            "basis": loaded_basis.echo,
            "shots": shots,
            "seed": seed,
            "second_kind": post_echo,
            "parallel_shots": parallel_shots,
            "tolerance_scale": scale,
        }),
        results: json!({
            "kind": setup.kind().label(),
            "branches": branches,
            "counts": report.counts,
            "frequencies": render::reals(&report.frequencies()),
            "shots": report.shots,
            "modal_outcome": {
                "pointer_index": modal.pointer_index,
                "count": report.counts[modal_position],
                "probability": modal.probability,
            },
        }),
        checks,
    })
}
