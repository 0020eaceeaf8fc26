//! Scenario runners. Each writes its data files, `config.json` and
//! `summary.json` into the output directory.

use std::path::Path;

use gamcal::calculus::StepSize;
use gamcal::hamilton_jacobi::{conserved_quantity, hj_residual, motion_from_hj, HjFunction};
use gamcal::hamiltonian::{HamiltonianKind, HamiltonianSpec, SplitFrame};
use gamcal::solver::{
    action_value, action_value_surface, constraint_residual, continuity_residual, curve_spur_residual,
    dw_equation_residuals, energy_momentum_tensor, field_constraint_residual, first_equation_residual,
    line_deviation, solve_geodesic, solve_mechanics, solve_scalar_field, EnergyMomentumField, FieldGrid,
    MotionCurve, RelaxationOptions, SurfaceMesh,
};
use gamcal::Multivector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{Scenario, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::output::{write_json, write_numeric_csv, write_records};
use crate::selftest::{run_selftest, SelftestRow};

/// Runs the scenario named in `config` and writes its artifacts to `out`.
/// Returns the summary that was written.
pub fn run(config: &ScenarioConfig, out: &Path) -> CliResult<Value> {
    let config = config.clone().resolved();
    config.validate()?;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Numeric(format!("cannot create {}: {e}", out.display())))?;
    write_json(&out.join("config.json"), &config)?;
    let details = match config.scenario {
        Scenario::Mechanics => mechanics(&config, out)?,
        Scenario::ScalarField => scalar_field(&config, out)?,
        Scenario::Geodesic => geodesic(&config, out)?,
        Scenario::HjCheck => hj_check(&config, out)?,
        Scenario::GaSelftest => ga_selftest(&config, out)?,
    };
    let summary = summary(&config, details);
    write_json(&out.join("summary.json"), &summary)?;
    if config.scenario == Scenario::GaSelftest && summary["passed"] != Value::Bool(true) {
        return Err(CliError::Numeric("at least one identity exceeded its tolerance".into()));
    }
    Ok(summary)
}

/// Fields every summary carries, merged with the scenario's own entries.
/// Quantities that do not apply to a scenario are `null`.
fn summary(config: &ScenarioConfig, details: Value) -> Value {
    let mut s = json!({
        "scenario": config.scenario.name(),
        "config_hash": config.hash(),
        "seed": config.seed,
        "max_H_residual": null,
        "energy_drift": null,
        "continuity_residual": null,
        "action": null,
        "lambda_sign": null,
    });
    if let (Value::Object(base), Value::Object(extra)) = (&mut s, details) {
        base.extend(extra);
    }
    s
}

fn vector(components: &[f64]) -> Multivector {
    Multivector::vector(components)
}

fn mechanics(config: &ScenarioConfig, out: &Path) -> CliResult<Value> {
    let ham = config.ham()?;
    let HamiltonianSpec::Mechanics(h) = ham.build()? else {
        unreachable!("validated kind")
    };
    let q0 = vector(config.initial.q0.as_deref().expect("resolved"));
    let p0 = vector(config.initial.p0.as_deref().expect("resolved"));
    let num = &config.numeric;
    let curve = solve_mechanics(&h, &q0, &p0, num.t_end.expect("resolved"), num.dt.expect("resolved"))?;
    write_numeric_csv(
        &out.join("trajectory.csv"),
        &MotionCurve::csv_header(ham.dims.n),
        &curve.csv_rows(),
    )?;
    Ok(json!({
        "max_H_residual": constraint_residual(&h, &curve)?,
        "energy_drift": curve.energy_drift(),
        "action": action_value(&curve)?,
        "first_equation_residual": first_equation_residual(&h, &curve)?,
        // The time step is the multiplier of the graph parametrization.
        "lambda_sign": 1,
        "samples": curve.len(),
    }))
}

pub(crate) fn field_grid(config: &ScenarioConfig) -> CliResult<FieldGrid> {
    let spec = config
        .numeric
        .grid
        .as_ref()
        .ok_or_else(|| CliError::Validation("scalar-field needs numeric.grid".into()))?;
    Ok(FieldGrid::new(spec.lower.clone(), spec.upper.clone(), spec.cells.clone())?)
}

fn scalar_field(config: &ScenarioConfig, out: &Path) -> CliResult<Value> {
    let ham = config.ham()?;
    let HamiltonianSpec::Dw(h) = ham.build()? else {
        unreachable!("validated kind")
    };
    let d = ham.dims.motion_dim;
    let spec = config.numeric.grid.as_ref().expect("resolved");
    let mut grid = field_grid(config)?;
    let boundary = config.boundary.as_ref().expect("resolved");
    grid.set_boundary(boundary.profile(&spec.lower, &spec.upper));
    let num = &config.numeric;
    let options = RelaxationOptions {
        tol: num.tol.expect("resolved"),
        max_iter: num.max_iter.expect("resolved"),
        relaxation: num.relaxation.expect("resolved"),
    };
    let solved = solve_scalar_field(&h, &grid, options)?;
    let tensor = energy_momentum_tensor(&solved, h.potential());
    write_numeric_csv(&out.join("field.csv"), &FieldGrid::csv_header(d), &solved.csv_rows())?;
    write_numeric_csv(
        &out.join("tensor.csv"),
        &EnergyMomentumField::csv_header(d),
        &tensor.csv_rows(),
    )?;
    let dw = dw_equation_residuals(&h, &solved)?;
    let action = if d == 2 { Some(surface_action(&h, &solved)?) } else { None };
    Ok(json!({
        "max_H_residual": field_constraint_residual(&h, &solved)?,
        "continuity_residual": continuity_residual(&tensor)?,
        "action": action,
        "lambda_sign": 1,
        "field_equation_residual": solved.field_equation_residual(h.potential()),
        "momentum_relation_residual": dw.momentum_relation,
        "dw_field_equation_residual": dw.field_equation,
        "tensor_asymmetry": tensor.asymmetry(),
        "nodes": solved.len(),
    }))
}

/// Action of the graph surface `x -> x + phi(x) e_y` for D = 2.
fn surface_action(h: &gamcal::hamiltonian::DwHamiltonian, grid: &FieldGrid) -> CliResult<f64> {
    let shape = grid.shape();
    let lower = grid.lower();
    let upper: Vec<f64> = (0..2).map(|k| lower[k] + grid.spacing()[k] * (shape[k] - 1) as f64).collect();
    // Grid and mesh both order nodes with the second axis fastest.
    let points = (0..grid.len()).map(|n| grid.point(n).vector_part()).collect();
    let momenta = (0..grid.len())
        .map(|n| grid.momentum(h, n))
        .collect::<gamcal::Result<Vec<_>>>()?;
    let mesh = SurfaceMesh::from_points(
        shape[0] - 1,
        shape[1] - 1,
        (lower[0], upper[0]),
        (lower[1], upper[1]),
        points,
    )?
    .with_momenta(momenta)?;
    Ok(action_value_surface(&mesh)?)
}

fn geodesic(config: &ScenarioConfig, out: &Path) -> CliResult<Value> {
    let ham = config.ham()?;
    let HamiltonianSpec::String(h) = ham.build()? else {
        unreachable!("validated kind")
    };
    let q0 = vector(config.initial.q0.as_deref().expect("resolved"));
    let v0 = vector(config.initial.v0.as_deref().expect("resolved"));
    let s_end = config.numeric.s_end.expect("resolved");
    let curve = solve_geodesic(&h, &q0, &v0, s_end, config.numeric.ds.expect("resolved"))?;
    write_numeric_csv(&out.join("geodesic.csv"), &MotionCurve::csv_header(ham.dims.n), &curve.csv_rows())?;
    Ok(json!({
        "max_H_residual": constraint_residual(&h, &curve)?,
        "energy_drift": curve.energy_drift(),
        "action": action_value(&curve)?,
        "expected_action": h.tension() * s_end,
        "line_deviation": line_deviation(&curve, &q0, &v0)?,
        "spur_residual": curve_spur_residual(&curve)?.max(),
        // Arclength parametrization: lambda = ds / Lambda.
        "lambda_sign": 1,
        "samples": curve.len(),
    }))
}

/// The Hamiltonian and the known solution of its Hamilton-Jacobi equation
/// checked by `hj-check`.
pub(crate) fn hj_problem(config: &ScenarioConfig) -> CliResult<(HamiltonianSpec, HjFunction)> {
    let ham = config.ham()?;
    let spec = ham.build()?;
    let potential = &ham.potential;
    let s = match ham.kind {
        HamiltonianKind::String => {
            if ham.dims.motion_dim != 1 {
                return Err(CliError::Validation("hj-check on a string Hamiltonian needs D = 1".into()));
            }
            let q0 = vector(config.initial.q0.as_deref().expect("resolved"));
            HjFunction::relativistic_particle(ham.lambda.expect("validated"), q0)?
        }
        HamiltonianKind::Mechanics => {
            if !potential.is_constant() {
                return Err(CliError::Validation(
                    "hj-check on mechanics needs a constant potential (free particle)".into(),
                ));
            }
            // H0 adds V once per spatial axis.
            let v = (ham.dims.n - 1) as f64 * potential.eval(0.0);
            let energy = config.initial.energy.expect("resolved");
            if energy <= v {
                return Err(CliError::Validation(format!("initial.energy must exceed V = {v}")));
            }
            let k = (2.0 * ham.mass.unwrap_or(1.0) * (energy - v)).sqrt();
            let n = ham.dims.n;
            // S = -E t + k x_2 with time along e_1.
            HjFunction::new(0, move |q| Multivector::scalar(n, -energy * q.coeff(1) + k * q.coeff(2)))
        }
        HamiltonianKind::Dw => {
            if !potential.is_constant() {
                return Err(CliError::Validation("hj-check on dw needs a constant potential".into()));
            }
            let frame = SplitFrame::field(ham.dims.motion_dim)?;
            HjFunction::weyl_linear(&frame, config.initial.c.expect("resolved"), potential.eval(0.0))?
        }
    };
    Ok((spec, s))
}

pub(crate) fn hj_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=n).map(|j| format!("q_{j}")).collect();
    h.push("residual".into());
    h
}

fn hj_check(config: &ScenarioConfig, out: &Path) -> CliResult<Value> {
    let (h, s) = hj_problem(config)?;
    let ham = config.ham()?;
    let n = ham.dims.n;
    let num = &config.numeric;
    let step = StepSize::new(num.h.expect("resolved"))?;
    let extent = num.extent.expect("resolved");
    let samples = num.samples.expect("resolved");
    let q0 = config.initial.q0.clone().expect("resolved");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rows = Vec::with_capacity(samples);
    while rows.len() < samples {
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-extent..extent)).collect();
        // Stay clear of the apex of the particle cone.
        let distance = q.iter().zip(&q0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if ham.kind == HamiltonianKind::String && distance < 0.1 * extent {
            continue;
        }
        let r = hj_residual(&h, &s, &vector(&q), step)?;
        let mut row = q;
        row.push(r);
        rows.push(row);
    }
    write_numeric_csv(&out.join("hj_samples.csv"), &hj_header(n), &rows)?;
    let residuals: Vec<f64> = rows.iter().map(|r| r[n]).collect();
    let max = residuals.iter().cloned().fold(0.0, f64::max);
    let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;

    let spread = if ham.kind == HamiltonianKind::String {
        // Parameter derivatives of S along the straight motion through the
        // first sample point.
        let start = vector(&q0);
        let dir = vector(&rows[0][..n]).try_sub(&start)?;
        let dir = dir.scale(1.0 / dir.magnitude());
        let motion = motion_from_hj(&start, &dir, 2.0 * extent, extent / 100.0)?;
        let mut worst = 0.0f64;
        for k in 0..n {
            worst = worst.max(conserved_quantity(&s, &motion, k)?.spread);
        }
        Some(worst)
    } else {
        None
    };
    Ok(json!({
        "op": "hj_residual",
        "hamiltonian": format!("{:?}", ham.kind).to_lowercase(),
        "samples": samples,
        "max_residual": max,
        "mean_residual": mean,
        "conserved_spread": spread,
    }))
}

pub(crate) fn selftest_header() -> Vec<String> {
    ["identity", "dim", "cases", "max_error", "passed"].map(String::from).to_vec()
}

fn ga_selftest(config: &ScenarioConfig, out: &Path) -> CliResult<Value> {
    let num = &config.numeric;
    let tolerance = config.tolerances.identity.expect("resolved");
    let rows = run_selftest(
        num.dims.as_deref().expect("resolved"),
        num.samples.expect("resolved"),
        config.seed,
        num.workers.expect("resolved"),
        tolerance,
    )?;
    let mut records = vec![selftest_header()];
    records.extend(rows.iter().map(SelftestRow::record));
    write_records(&out.join("selftest.csv"), &records)?;
    let identities: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "name": r.identity.name(),
                "statement": r.identity.statement(),
                "dim": r.dim,
                "cases": r.cases,
                "max_error": r.max_error,
                "passed": r.passed,
            })
        })
        .collect();
    Ok(json!({
        "tolerance": tolerance,
        "identities": identities,
        "passed": rows.iter().all(|r| r.passed),
    }))
}
