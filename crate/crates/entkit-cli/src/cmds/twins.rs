//! Observable commands: twin, classify-pair.

use std::path::Path;

use entkit_core::{canonical, observables, state, tolerances, Observable, Subsystem};
use serde_json::json;

use crate::error::{precondition, CliResult};
use crate::files;
use crate::render::{self, Checks, Document};

fn subsystem_number(s: Subsystem) -> u8 {
    match s {
        Subsystem::Nearby => 1,
        Subsystem::Remote => 2,
    }
}

pub fn twin(
    state_path: &Path,
    observable_path: &Path,
    spectrum: Option<&[f64]>,
    scale: f64,
) -> CliResult<Document> {
    let loaded_state = files::load_state(state_path)?;
    let loaded_obs = files::load_observable(observable_path)?;
    let st = &loaded_state.value;
    let obs = &loaded_obs.value;
    let (rho1, rho2) = state::reduced_states(st);
    let (rho_here, rho_there) = match obs.subsystem() {
        Subsystem::Nearby => (&rho1, &rho2),
        Subsystem::Remote => (&rho2, &rho1),
    };
    let partner = observables::twin_partner(obs, st, spectrum).map_err(precondition)?;
    let form_here = observables::partial_spectral_form(obs, rho_here).map_err(precondition)?;
    let form_there =
        observables::partial_spectral_form(&partner, rho_there).map_err(precondition)?;
    let mismatch = observables::twin_detectable_mismatch(obs, &partner, st).map_err(precondition)?;
    let relevant = observables::is_relevant(obs, rho_here).map_err(precondition)?;
    let range_compatible = observables::is_range_compatible(obs, rho_here).map_err(precondition)?;
    let here_residual = observables::state_compatibility_residual(obs, rho_here);
    let there_residual = observables::state_compatibility_residual(&partner, rho_there);

    let mut checks = Checks::new();
    checks.metric(
        "observable commutes with its reduced state",
        here_residual,
        tolerances::COMPATIBILITY_REL * (obs.matrix().norm() * rho_here.norm()).max(1.0) * scale,
    );
    checks.metric(
        "twin partner commutes with the other reduced state",
        there_residual,
        tolerances::COMPATIBILITY_REL
            * (partner.matrix().norm() * rho_there.norm()).max(1.0)
            * scale,
    );
    checks.metric(
        "transported eigenbasis diagonalizes the twin partner",
        mismatch,
        tolerances::DIAGRAM_COMMUTE * scale,
    );
    if spectrum.is_none() {
        let back = observables::twin_partner(&partner, st, None).map_err(precondition)?;
        checks.metric(
            "partner of the partner restores the detectable part",
            canonical::operator_distance(back.matrix(), &form_here.detectable),
            tolerances::OPERATOR_IDENTITY * (1.0 + form_here.detectable.norm()) * scale,
        );
    }
    Ok(Document {
        command: "twin",
        inputs: json!({
            "state": loaded_state.echo,
            "observable": loaded_obs.echo,
            "spectrum": spectrum.map(render::reals),
            "tolerance_scale": scale,
        }),
        results: json!({
            "partner_subsystem": subsystem_number(partner.subsystem()),
            "partner_matrix": render::matrix(partner.matrix()),
            "detectable_eigenvalues": render::reals(&form_here.detectable_eigenvalues),
            "partner_detectable_eigenvalues": render::reals(&form_there.detectable_eigenvalues),
            "cross_norm": form_here.cross_norm,
            "relevant": relevant,
            "range_compatible": range_compatible,
            "state_compatible": observables::is_state_compatible(obs, rho_here),
        }),
        checks,
    })
}

fn observable_summary(
    obs: &Observable,
    st: &entkit_core::BipartiteState,
) -> CliResult<serde_json::Value> {
    let (rho1, rho2) = state::reduced_states(st);
    let rho = match obs.subsystem() {
        Subsystem::Nearby => &rho1,
        Subsystem::Remote => &rho2,
    };
    let basis = observables::relevant_basis(obs, rho).map_err(precondition)?;
    Ok(json!({
        "subsystem": subsystem_number(obs.subsystem()),
        "state_residual": observables::state_compatibility_residual(obs, rho),
        "detectable_dimension": basis.len(),
    }))
}

pub fn classify_pair(
    state_path: &Path,
    first_path: &Path,
    second_path: &Path,
    scale: f64,
) -> CliResult<Document> {
    let loaded_state = files::load_state(state_path)?;
    let loaded_first = files::load_observable(first_path)?;
    let loaded_second = files::load_observable(second_path)?;
    let st = &loaded_state.value;
    let classification = observables::classify_pair(&loaded_first.value, &loaded_second.value, st)
        .map_err(precondition)?;
    Ok(Document {
        command: "classify-pair",
        inputs: json!({
            "state": loaded_state.echo,
            "first": loaded_first.echo,
            "second": loaded_second.echo,
            "tolerance_scale": scale,
        }),
        results: json!({
            "classification": classification.label(),
            "first": observable_summary(&loaded_first.value, st)?,
            "second": observable_summary(&loaded_second.value, st)?,
        }),
        checks: Checks::new(),
    })
}
