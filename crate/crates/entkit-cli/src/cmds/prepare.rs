//! The prepare command: maximal-probability remote preparation of a target.

use std::path::Path;

use entkit_core::{canonical, decomp, prepare as plib, tolerances, DiagramContext};
use serde_json::json;

use crate::error::{precondition, CliError, CliResult};
use crate::files;
use crate::render::{self, Checks, Document};

pub fn prepare(state_path: &Path, target_path: &Path, scale: f64) -> CliResult<Document> {
    let loaded_state = files::load_state(state_path)?;
    let loaded_target = files::load_vector(target_path)?;
    let ctx = DiagramContext::new(loaded_state.value.clone());
    let phi2 = &loaded_target.value;
    if !plib::is_preparable(&ctx, phi2).map_err(precondition)? {
        let residual = decomp::range_residual(ctx.rho2(), phi2).map_err(precondition)?;
        return Err(CliError::Precondition(format!(
            "target must lie in the range of the remote reduced density operator \
             (range residual {residual:.3e})"
        )));
    }
    let plan = plib::plan_preparation(&ctx, phi2).map_err(precondition)?;
    let (optimal_p, realized) = plib::event_probability(&ctx, plan.optimal_event())
        .map_err(precondition)?;
    let char_weight = decomp::characteristic_weight(ctx.rho2(), phi2).map_err(precondition)?;
    let exemplars = plan.exemplar_members();
    let mut exemplar_dev: f64 = 0.0;
    for (member, expected_p) in &exemplars {
        let (p, prepared) = plib::event_probability(&ctx, member).map_err(precondition)?;
        exemplar_dev = exemplar_dev.max((p - expected_p).abs());
        match prepared {
            Some(v) => exemplar_dev = exemplar_dev.max(canonical::phase_aligned_distance(&v, phi2)),
            None => exemplar_dev = f64::INFINITY,
        }
    }
    let gap_note = match plib::targets_without_optimal_event(&ctx) {
        plib::OptimalEventGap::EmptyInFiniteDimension => {
            "none: in finite dimension every preparable target has a maximal event"
        }
    };

    let mut checks = Checks::new();
    checks.metric(
        "optimal event realizes the target",
        realized.map_or(f64::INFINITY, |v| canonical::phase_aligned_distance(&v, phi2)),
        tolerances::DIAGRAM_COMMUTE * scale,
    );
    checks.metric(
        "optimal event attains the planned probability",
        (optimal_p - plan.max_probability()).abs(),
        tolerances::OPERATOR_IDENTITY * scale,
    );
    checks.metric(
        "maximal probability equals the characteristic weight",
        (plan.max_probability() - char_weight).abs(),
        tolerances::OPERATOR_IDENTITY * scale,
    );
    checks.metric(
        "family exemplars realize the target at scaled probability",
        exemplar_dev,
        tolerances::DIAGRAM_COMMUTE * scale,
    );
    Ok(Document {
        command: "prepare",
        inputs: json!({
            "state": loaded_state.echo,
            "target": loaded_target.echo,
            "tolerance_scale": scale,
        }),
        results: json!({
            "optimal_event": render::vector(plan.optimal_event()),
            "max_probability": plan.max_probability(),
            "is_characteristic": plan.is_characteristic(),
            "null_dimension": plan.null_dimension(),
            "family_exemplars": exemplars
                .iter()
                .map(|(member, p)| json!({
                    "event": render::vector(member),
                    "probability": p,
                }))
                .collect::<Vec<_>>(),
            "targets_without_optimal_event": gap_note,
        }),
        checks,
    })
}
