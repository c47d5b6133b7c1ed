//! The diagram-check command: verify all twelve arrows of the four-corner
//! decomposition square, on one state or on a batch of random ones.

use std::path::Path;

use entkit_core::{
    canonical, diagrams, linalg, tolerances, Arrow, BipartiteState, CVector, Corner,
    DiagramContext, DiagramValue,
};
use serde_json::{json, Value};

use crate::error::{precondition, CliError, CliResult};
use crate::files;
use crate::render::{self, Checks, Document};

pub fn diagram_check(
    state_path: Option<&Path>,
    basis_path: Option<&Path>,
    random: Option<u32>,
    dims: Option<&[usize]>,
    seed: Option<u64>,
    scale: f64,
) -> CliResult<Document> {
    match (state_path, random) {
        (Some(_), Some(_)) => {
            Err(CliError::Flag("pass a state file or --random, not both".into()))
        }
        (None, None) => Err(CliError::Flag("pass a state file or --random".into())),
        (Some(path), None) => {
            if dims.is_some() || seed.is_some() {
                return Err(CliError::Flag("--dims and --seed apply only to --random".into()));
            }
            single(path, basis_path, scale)
        }
        (None, Some(count)) => {
            if basis_path.is_some() {
                return Err(CliError::Flag("--basis applies only to a state file".into()));
            }
            let dims = dims.ok_or_else(|| CliError::Flag("--random needs --dims D1 D2".into()))?;
            let seed = seed.ok_or_else(|| CliError::Flag("--random needs --seed".into()))?;
            batch(count, dims[0], dims[1], seed, scale)
        }
    }
}

fn verify(
    ctx: &DiagramContext,
    basis: &[CVector],
    scale: f64,
) -> CliResult<diagrams::CommutativityReport> {
    let report = if scale == 1.0 {
        diagrams::verify_diagram1(ctx, basis)
    } else {
        diagrams::verify_diagram1_with(ctx, basis, tolerances::DIAGRAM_COMMUTE * scale)
    };
    report.map_err(precondition)
}

/// Probe vector of a corner value: its first basis vector or first
/// decomposition vector.
fn first_vector(value: &DiagramValue) -> CVector {
    match value {
        DiagramValue::Basis(vs) => vs[0].clone(),
        DiagramValue::Decomp(d) => d.vectors()[0].clone(),
    }
}

fn single(state_path: &Path, basis_path: Option<&Path>, scale: f64) -> CliResult<Document> {
    let loaded = files::load_state(state_path)?;
    let ctx = DiagramContext::new(loaded.value.clone());
    let (basis, basis_echo) = match basis_path {
        Some(path) => {
            let lb = files::load_basis(path)?;
            (lb.value, lb.echo)
        }
        None => {
            let basis = linalg::fourier_range_basis(ctx.rho1())
                .expect("reduced states are positive semidefinite");
            (basis, json!("fourier mix of the nearby range eigenbasis"))
        }
    };
    let report = verify(&ctx, &basis, scale)?;

    let seed_value = DiagramValue::Basis(basis.clone());
    let mut corners = vec![(Corner::NearbyBasis, seed_value)];
    for target in [Corner::RemoteBasis, Corner::NearbyDecomp, Corner::RemoteDecomp] {
        let arrow = Arrow::between(Corner::NearbyBasis, target).expect("corners are distinct");
        let value = diagrams::apply_arrow(&ctx, arrow, &corners[0].1).map_err(precondition)?;
        corners.push((target, value));
    }
    fn corner_value(corners: &[(Corner, DiagramValue)], corner: Corner) -> &DiagramValue {
        &corners.iter().find(|(c, _)| *c == corner).expect("all four corners are seeded").1
    }
    let pointwise: Vec<Value> = Arrow::ALL
        .iter()
        .map(|&arrow| -> CliResult<Value> {
            let probe = first_vector(corner_value(&corners, arrow.source()));
            let (image, weight) = diagrams::map_vector(&ctx, arrow, &probe).map_err(precondition)?;
            Ok(json!({
                "arrow": arrow.label(),
                "weight": weight,
                "image": render::vector(&image),
            }))
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut checks = Checks::new();
    for check in &report.checks {
        checks.metric(check.label(), check.deviation, report.tolerance);
    }
    let (branch_image, branch_weight) = diagrams::map_vector(
        &ctx,
        Arrow::NearbyBasisToRemoteDecomp,
        &basis[0],
    )
    .map_err(precondition)?;
    let direct = ctx.op().apply(&basis[0]);
    let direct_weight = direct.norm_squared();
    let pointwise_dev = (branch_weight - direct_weight).abs()
        + canonical::phase_aligned_distance(&branch_image, &direct.unscale(direct_weight.sqrt()));
    checks.metric(
        "pointwise branch map matches the direct image",
        pointwise_dev,
        tolerances::OPERATOR_IDENTITY * scale,
    );

    let corner_json: Vec<Value> = corners
        .iter()
        .map(|(corner, value)| {
            let content = match value {
                DiagramValue::Basis(vs) => render::vectors(vs),
                DiagramValue::Decomp(d) => render::decomposition(d),
            };
            json!({ "corner": corner.label(), "kind": value.kind(), "value": content })
        })
        .collect();
    Ok(Document {
        command: "diagram-check",
        inputs: json!({
            "state": loaded.echo,
            "basis": basis_echo,
            "tolerance_scale": scale,
        }),
        results: json!({
            "corners": corner_json,
            "pointwise": pointwise,
            "compositions_checked": report.checks.len(),
        }),
        checks,
    })
}

fn batch(count: u32, d1: usize, d2: usize, seed: u64, scale: f64) -> CliResult<Document> {
    if d1 == 0 || d2 == 0 {
        return Err(CliError::Flag("--dims must be positive".into()));
    }
    let mut checks = Checks::new();
    let mut instances = Vec::new();
    for k in 0..count {
        let instance_seed = seed.wrapping_add(u64::from(k));
        let state = BipartiteState::random(d1, d2, instance_seed);
        let ctx = DiagramContext::new(state);
        let basis = linalg::fourier_range_basis(ctx.rho1())
            .expect("reduced states are positive semidefinite");
        let report = verify(&ctx, &basis, scale)?;
        checks.metric(
            format!("instance {k}: all compositions commute"),
            report.max_deviation,
            report.tolerance,
        );
        instances.push(json!({
            "instance": k,
            "seed": instance_seed,
            "compositions_checked": report.checks.len(),
            "max_deviation": report.max_deviation,
            "pass": report.pass(),
        }));
    }
    Ok(Document {
        command: "diagram-check",
        inputs: json!({
            "random": count,
            "d1": d1,
            "d2": d2,
            "seed": seed,
            "tolerance_scale": scale,
        }),
        results: json!({ "instances": instances }),
        checks,
    })
}
