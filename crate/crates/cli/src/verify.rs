//! Re-checks a data file against the equations it is supposed to satisfy.
//!
//! The file schema is recognized from its header; a header that does not
//! belong to the configured scenario is a validation error.

use std::path::Path;

use gamcal::calculus::StepSize;
use gamcal::hamilton_jacobi::hj_residual;
use gamcal::hamiltonian::HamiltonianSpec;
use gamcal::solver::{
    constraint_residual, continuity_residual, dw_equation_residuals, field_constraint_residual,
    first_equation_residual, line_deviation, EnergyMomentumField, FieldGrid, MotionCurve,
};
use gamcal::Multivector;
use serde::Serialize;

use crate::config::{Scenario, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::output::{read_numeric_csv, read_records, NumericTable};
use crate::scenarios::{field_grid, hj_header, hj_problem, selftest_header};
use crate::selftest::run_selftest;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub scenario: String,
    pub data: String,
    pub rows: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Evaluates the residual checks for `data`. Failing checks are reported,
/// not returned as errors; schema problems are errors.
pub fn verify(config: &ScenarioConfig, data: &Path) -> CliResult<VerifyReport> {
    let config = config.clone().resolved();
    config.validate()?;
    let (rows, checks) = if config.scenario == Scenario::GaSelftest {
        verify_selftest(&config, data)?
    } else {
        let table = read_numeric_csv(data)?;
        let checks = match config.scenario {
            Scenario::Mechanics => verify_mechanics(&config, &table)?,
            Scenario::ScalarField => verify_field(&config, &table)?,
            Scenario::Geodesic => verify_geodesic(&config, &table)?,
            Scenario::HjCheck => verify_hj(&config, &table)?,
            Scenario::GaSelftest => unreachable!(),
        };
        (table.rows.len(), checks)
    };
    Ok(VerifyReport {
        scenario: config.scenario.name().to_string(),
        data: data.display().to_string(),
        rows,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn expect_header(table: &NumericTable, expected: &[String], what: &str) -> CliResult<()> {
    if table.header != expected {
        return Err(CliError::Validation(format!(
            "schema mismatch: expected {what} header {}, found {}",
            expected.join(","),
            table.header.join(",")
        )));
    }
    Ok(())
}

fn schema(e: gamcal::Error) -> CliError {
    match e {
        gamcal::Error::Parse(msg) => CliError::Validation(format!("schema mismatch: {msg}")),
        other => other.into(),
    }
}

fn tolerance(v: Option<f64>) -> f64 {
    v.expect("resolved tolerance")
}

fn verify_mechanics(config: &ScenarioConfig, table: &NumericTable) -> CliResult<Vec<Check>> {
    let ham = config.ham()?;
    let n = ham.dims.n;
    expect_header(table, &MotionCurve::csv_header(n), "trajectory")?;
    let curve = MotionCurve::from_csv_rows(n, &table.rows).map_err(schema)?;
    let HamiltonianSpec::Mechanics(h) = ham.build()? else {
        unreachable!("validated kind")
    };
    let energies: Vec<f64> = curve
        .points()
        .iter()
        .zip(curve.momenta())
        .map(|(q, p)| h.energy(q, p))
        .collect();
    let max = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let t = &config.tolerances;
    let mut checks = vec![
        Check::new("max_H_residual", constraint_residual(&h, &curve)?, tolerance(t.h_residual)),
        Check::new("energy_drift", max - min, tolerance(t.energy_drift)),
    ];
    if curve.len() > 1 {
        checks.push(Check::new(
            "first_equation_residual",
            first_equation_residual(&h, &curve)?,
            tolerance(t.first_equation),
        ));
    }
    Ok(checks)
}

fn verify_field(config: &ScenarioConfig, table: &NumericTable) -> CliResult<Vec<Check>> {
    let ham = config.ham()?;
    let d = ham.dims.motion_dim;
    let HamiltonianSpec::Dw(h) = ham.build()? else {
        unreachable!("validated kind")
    };
    let mut grid = field_grid(config)?;
    let t = &config.tolerances;
    if table.header == FieldGrid::csv_header(d) {
        grid.load_csv_rows(&table.rows).map_err(schema)?;
        let dw = dw_equation_residuals(&h, &grid)?;
        Ok(vec![
            Check::new("max_H_residual", field_constraint_residual(&h, &grid)?, tolerance(t.h_residual)),
            Check::new("momentum_relation", dw.momentum_relation, tolerance(t.momentum_relation)),
            Check::new(
                "field_equation_residual",
                grid.field_equation_residual(h.potential()),
                tolerance(t.field_equation),
            ),
        ])
    } else {
        expect_header(table, &EnergyMomentumField::csv_header(d), "field or tensor")?;
        let tensor = EnergyMomentumField::from_csv_rows(&grid, &table.rows).map_err(schema)?;
        Ok(vec![
            Check::new("continuity_residual", continuity_residual(&tensor)?, tolerance(t.continuity)),
            Check::new("tensor_asymmetry", tensor.asymmetry(), tolerance(t.symmetry)),
        ])
    }
}

fn verify_geodesic(config: &ScenarioConfig, table: &NumericTable) -> CliResult<Vec<Check>> {
    let ham = config.ham()?;
    let n = ham.dims.n;
    expect_header(table, &MotionCurve::csv_header(n), "geodesic")?;
    let curve = MotionCurve::from_csv_rows(n, &table.rows).map_err(schema)?;
    let HamiltonianSpec::String(h) = ham.build()? else {
        unreachable!("validated kind")
    };
    let t = &config.tolerances;
    let p0 = &curve.momenta()[0];
    if p0.magnitude() == 0.0 {
        return Err(CliError::Numeric("first momentum is zero".into()));
    }
    let direction = p0.scale(1.0 / p0.magnitude());
    let pts = curve.points();
    let length: f64 = pts.windows(2).map(|w| (&w[1] - &w[0]).magnitude()).sum();
    let action = gamcal::solver::action_value(&curve)?;
    Ok(vec![
        Check::new("max_H_residual", constraint_residual(&h, &curve)?, tolerance(t.h_residual)),
        Check::new("line_deviation", line_deviation(&curve, &pts[0], &direction)?, tolerance(t.collinearity)),
        Check::new("action_minus_tension_length", (action - h.tension() * length).abs(), tolerance(t.action)),
    ])
}

fn verify_hj(config: &ScenarioConfig, table: &NumericTable) -> CliResult<Vec<Check>> {
    let ham = config.ham()?;
    let n = ham.dims.n;
    expect_header(table, &hj_header(n), "hj_samples")?;
    let (h, s) = hj_problem(config)?;
    let step = StepSize::new(config.numeric.h.expect("resolved"))?;
    let mut worst = 0.0f64;
    for row in &table.rows {
        worst = worst.max(hj_residual(&h, &s, &Multivector::vector(&row[..n]), step)?);
    }
    Ok(vec![Check::new("max_hj_residual", worst, tolerance(config.tolerances.hj_residual))])
}

/// Re-runs the identity checks with the configured seed and compares them
/// with the file, then applies the tolerance to the recorded errors.
fn verify_selftest(config: &ScenarioConfig, data: &Path) -> CliResult<(usize, Vec<Check>)> {
    let records = read_records(data)?;
    if records[0] != selftest_header() {
        return Err(CliError::Validation(format!(
            "schema mismatch: expected selftest header {}",
            selftest_header().join(",")
        )));
    }
    let num = &config.numeric;
    let tol = tolerance(config.tolerances.identity);
    let expected = run_selftest(
        num.dims.as_deref().expect("resolved"),
        num.samples.expect("resolved"),
        config.seed,
        num.workers.expect("resolved"),
        tol,
    )?;
    let body = &records[1..];
    if body.len() != expected.len() {
        return Err(CliError::Validation(format!(
            "schema mismatch: expected {} selftest rows, found {}",
            expected.len(),
            body.len()
        )));
    }
    let mut checks = Vec::with_capacity(2 * body.len());
    for (record, row) in body.iter().zip(&expected) {
        if record.len() != 5 || record[0] != row.identity.name() || record[1] != row.dim.to_string() {
            return Err(CliError::Validation(format!("schema mismatch: unexpected selftest row {record:?}")));
        }
        let recorded: f64 = record[3]
            .parse()
            .map_err(|_| CliError::Validation(format!("cannot parse max_error {:?}", record[3])))?;
        let label = format!("{}_n{}", row.identity.name(), row.dim);
        checks.push(Check::new(&label, recorded, tol));
        checks.push(Check::new(&format!("{label}_reproduced"), (recorded - row.max_error).abs(), 0.0));
    }
    Ok((body.len(), checks))
}
