//! Decomposition commands: cvl, cvl-inverse, char-weight, expand.

use std::path::Path;

use entkit_core::{canonical, decomp, linalg, tolerances, CVector};
use serde_json::json;

use crate::error::{precondition, CliResult};
use crate::files;
use crate::render::{self, Checks, Document};

pub fn cvl(state_path: &Path, basis_path: &Path, subsystem: u8, scale: f64) -> CliResult<Document> {
    let loaded_state = files::load_state(state_path)?;
    let loaded_basis = files::load_basis(basis_path)?;
    let (rho, side) = super::reduced_for(&loaded_state.value, subsystem);
    let dec = decomp::cvl_forward(&rho, &loaded_basis.value).map_err(precondition)?;

    let mut checks = Checks::new();
    checks.metric(
        "decomposition reconstructs the reduced state",
        (dec.reconstruct() - &rho).norm(),
        tolerances::RECONSTRUCTION * scale,
    );
    let strong = decomp::is_linearly_independent(dec.vectors());
    let weak = decomp::is_linearly_independent_weak(dec.vectors());
    checks.predicate("decomposition vectors are linearly independent", strong);
    checks.predicate("strong and weak independence agree", strong == weak);
    checks.metric(
        "weights sum to one",
        (dec.weights().iter().sum::<f64>() - 1.0).abs(),
        tolerances::WEIGHT_SUM * scale,
    );
    let span = decomp::span_dimension(dec.vectors());
    checks.predicate("span dimension equals the term count", span == dec.len());
    Ok(Document {
        command: "cvl",
        inputs: json!({
            "state": loaded_state.echo,
            "basis": loaded_basis.echo,
            "subsystem": subsystem,
            "tolerance_scale": scale,
        }),
        results: json!({
            "side": side,
            "decomposition": render::decomposition(&dec),
            "span_dimension": span,
        }),
        checks,
    })
}

pub fn cvl_inverse(
    state_path: &Path,
    decomp_path: &Path,
    subsystem: u8,
    scale: f64,
) -> CliResult<Document> {
    let loaded_state = files::load_state(state_path)?;
    let loaded_decomp = files::load_decomp(decomp_path)?;
    let (rho, side) = super::reduced_for(&loaded_state.value, subsystem);
    let dec = &loaded_decomp.value;
    let basis = decomp::cvl_inverse(&rho, dec).map_err(precondition)?;
    let round = decomp::cvl_forward(&rho, &basis).map_err(precondition)?;

    let mut checks = Checks::new();
    checks.metric(
        "recovered basis is orthonormal",
        linalg::orthonormality_deviation(&basis),
        tolerances::ORTHONORMALITY * scale,
    );
    let range_dev = basis
        .iter()
        .map(|e| decomp::range_residual(&rho, e).expect("reduced state stays valid"))
        .fold(0.0, f64::max);
    checks.metric(
        "recovered basis lies in the range",
        range_dev,
        tolerances::RANGE_MEMBERSHIP * scale,
    );
    checks.metric(
        "forward map returns the original decomposition",
        canonical::weighted_family_distance(
            round.weights(),
            round.vectors(),
            dec.weights(),
            dec.vectors(),
        ),
        tolerances::DIAGRAM_COMMUTE * scale,
    );
    Ok(Document {
        command: "cvl-inverse",
        inputs: json!({
            "state": loaded_state.echo,
            "decomp": loaded_decomp.echo,
            "subsystem": subsystem,
            "tolerance_scale": scale,
        }),
        results: json!({ "side": side, "basis": render::vectors(&basis) }),
        checks,
    })
}

pub fn char_weight(
    state_path: &Path,
    target_path: &Path,
    subsystem: u8,
    scale: f64,
) -> CliResult<Document> {
    let loaded_state = files::load_state(state_path)?;
    let loaded_target = files::load_vector(target_path)?;
    let (rho, side) = super::reduced_for(&loaded_state.value, subsystem);
    let phi = &loaded_target.value;
    let routes = decomp::characteristic_weight_routes(&rho, phi).map_err(precondition)?;
    let residual = decomp::range_residual(&rho, phi).map_err(precondition)?;
    let inside = decomp::in_range(&rho, phi).map_err(precondition)?;
    let spectral = linalg::eig_psd(&rho).expect("reduced states are positive semidefinite");
    let lambda_max = spectral.eigenvalues.first().copied().unwrap_or(0.0);
    let lambda_min_pos = spectral.eigenvalues[..spectral.rank].last().copied().unwrap_or(0.0);
    let mean = phi.dotc(&(&rho * phi)).re;
    let weight = routes.resolvent;

    let mut checks = Checks::new();
    checks.metric(
        "resolvent and eigenbasis routes agree",
        (routes.resolvent - routes.eigenbasis).abs(),
        tolerances::CHAR_WEIGHT_AGREE * scale,
    );
    checks.metric(
        "weight does not exceed the mean value",
        (weight - mean).max(0.0),
        tolerances::OPERATOR_IDENTITY * scale,
    );
    if inside {
        checks.metric(
            "weight lies within the positive spectrum",
            (lambda_min_pos - weight).max(weight - lambda_max).max(0.0),
            tolerances::OPERATOR_IDENTITY * scale,
        );
    } else {
        checks.predicate("weight vanishes off the range", weight == 0.0);
    }
    Ok(Document {
        command: "char-weight",
        inputs: json!({
            "state": loaded_state.echo,
            "target": loaded_target.echo,
            "subsystem": subsystem,
            "tolerance_scale": scale,
        }),
        results: json!({
            "side": side,
            "weight": weight,
            "eigenbasis_route": routes.eigenbasis,
            "in_range": inside,
            "range_residual": residual,
            "mean_value": mean,
            "smallest_positive_eigenvalue": lambda_min_pos,
            "largest_eigenvalue": lambda_max,
        }),
        checks,
    })
}

pub fn expand(decomp_path: &Path, vector_path: &Path, scale: f64) -> CliResult<Document> {
    let loaded_decomp = files::load_decomp(decomp_path)?;
    let loaded_vector = files::load_vector(vector_path)?;
    let dec = &loaded_decomp.value;
    let chi = &loaded_vector.value;
    let coeffs = decomp::expand_in_li_basis(dec, chi).map_err(precondition)?;
    let mut rebuilt = CVector::zeros(dec.dim());
    for (c, phi) in coeffs.iter().zip(dec.vectors()) {
        rebuilt += phi * *c;
    }
    let again = decomp::expand_in_li_basis(dec, &rebuilt).map_err(precondition)?;
    let idempotence =
        coeffs.iter().zip(&again).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    let mut checks = Checks::new();
    checks.metric(
        "coefficients reconstruct the vector",
        (&rebuilt - chi).norm(),
        tolerances::RECONSTRUCTION * scale,
    );
    checks.metric(
        "expansion is idempotent",
        idempotence,
        tolerances::OPERATOR_IDENTITY * scale,
    );
    Ok(Document {
        command: "expand",
        inputs: json!({
            "decomp": loaded_decomp.echo,
            "vector": loaded_vector.echo,
            "tolerance_scale": scale,
        }),
        results: json!({
            "coefficients": coeffs.iter().map(|&z| render::complex(z)).collect::<Vec<_>>(),
            "reconstruction": render::vector(&rebuilt),
        }),
        checks,
    })
}
