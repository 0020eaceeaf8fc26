//! Scenario configuration: parsing, defaults and validation.
//!
//! Every optional field is resolved against per-scenario defaults before a
//! run, and the resolved configuration is what gets written next to the
//! outputs and hashed into the summary.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use gamcal::hamiltonian::{Dims, HamiltonianConfig, HamiltonianKind, Potential};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Mechanics,
    ScalarField,
    Geodesic,
    HjCheck,
    GaSelftest,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Mechanics,
        Scenario::ScalarField,
        Scenario::Geodesic,
        Scenario::HjCheck,
        Scenario::GaSelftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Mechanics => "mechanics",
            Scenario::ScalarField => "scalar-field",
            Scenario::Geodesic => "geodesic",
            Scenario::HjCheck => "hj-check",
            Scenario::GaSelftest => "ga-selftest",
        }
    }

    pub fn from_name(name: &str) -> Option<Scenario> {
        Scenario::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Comma-separated list used in error messages.
    pub fn valid_names() -> String {
        Scenario::ALL.map(Scenario::name).join(", ")
    }

    /// Data files written by the scenario, in output order.
    pub fn data_files(self) -> &'static [&'static str] {
        match self {
            Scenario::Mechanics => &["trajectory.csv"],
            Scenario::ScalarField => &["field.csv", "tensor.csv"],
            Scenario::Geodesic => &["geodesic.csv"],
            Scenario::HjCheck => &["hj_samples.csv"],
            Scenario::GaSelftest => &["selftest.csv"],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numeric {
    /// Mechanics time step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Geodesic arclength step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_end: Option<f64>,
    /// Finite-difference step for derivatives of S.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Relaxation stopping tolerance on the nodal residual.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Sample points for hj-check, cases per identity for ga-selftest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Half-width of the hj-check sampling box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
    /// Algebra dimensions covered by ga-selftest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<Vec<f64>>,
    /// Energy of the free-particle solution used by hj-check on mechanics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    /// Parameter of the linear Weyl solution used by hj-check on dw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

/// Dirichlet data for the scalar field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Boundary {
    /// `amplitude * sin(wavenumber * pi * (x_a - lower_a) / width_a)` on the
    /// face `x_{other} = upper`, zero elsewhere.
    Sine { axis: usize, amplitude: f64, wavenumber: f64 },
    /// `offset + slope . x`.
    Linear { slope: Vec<f64>, offset: f64 },
    Constant { value: f64 },
}

impl Boundary {
    /// Boundary profile on a grid with the given extents.
    pub fn profile(&self, lower: &[f64], upper: &[f64]) -> impl Fn(&[f64]) -> f64 {
        let this = self.clone();
        let lower = lower.to_vec();
        let upper = upper.to_vec();
        move |x: &[f64]| match &this {
            Boundary::Sine {
                axis,
                amplitude,
                wavenumber,
            } => {
                let on_top = (0..x.len())
                    .filter(|k| k != axis)
                    .all(|k| (x[k] - upper[k]).abs() <= 1e-12 * (1.0 + upper[k].abs()));
                if on_top {
                    let width = upper[*axis] - lower[*axis];
                    amplitude * (wavenumber * PI * (x[*axis] - lower[*axis]) / width).sin()
                } else {
                    0.0
                }
            }
            Boundary::Linear { slope, offset } => offset + slope.iter().zip(x).map(|(a, b)| a * b).sum::<f64>(),
            Boundary::Constant { value } => *value,
        }
    }
}

/// Thresholds used by `verify`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_equation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_equation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum_relation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collinearity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hj_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianConfig>,
    #[serde(default)]
    pub numeric: Numeric,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Output directory; the `--out` flag takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn hamiltonian(kind: HamiltonianKind, potential: Vec<f64>, lambda: Option<f64>, n: usize, d: usize) -> HamiltonianConfig {
    HamiltonianConfig {
        kind,
        potential: Potential::new(potential).expect("finite default coefficients"),
        lambda,
        mass: None,
        dims: Dims { n, motion_dim: d },
    }
}

fn fill<T: Clone>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

impl ScenarioConfig {
    /// The configuration used when no `--config` is given.
    pub fn default_for(scenario: Scenario) -> Self {
        ScenarioConfig {
            scenario,
            hamiltonian: None,
            numeric: Numeric::default(),
            initial: Initial::default(),
            boundary: None,
            tolerances: Tolerances::default(),
            output_dir: None,
            seed: DEFAULT_SEED,
        }
        .resolved()
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Validation(format!("config: {e} (valid scenarios: {})", Scenario::valid_names()))
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fills every unset field with the scenario default.
    pub fn resolved(mut self) -> Self {
        let num = &mut self.numeric;
        let init = &mut self.initial;
        let tol = &mut self.tolerances;
        match self.scenario {
            Scenario::Mechanics => {
                fill(&mut self.hamiltonian, hamiltonian(HamiltonianKind::Mechanics, vec![0.0, 0.0, 0.5], None, 2, 1));
                let n = self.hamiltonian.as_ref().map_or(2, |h| h.dims.n);
                fill(&mut num.dt, 1e-3);
                fill(&mut num.t_end, 2.0 * PI);
                let mut q0 = vec![0.0; n];
                if n > 1 {
                    q0[1] = 1.0;
                }
                fill(&mut init.q0, q0);
                fill(&mut init.p0, vec![0.0; n]);
                fill(&mut tol.h_residual, 1e-8);
                fill(&mut tol.energy_drift, 1e-8);
                fill(&mut tol.first_equation, 1e-4);
            }
            Scenario::ScalarField => {
                fill(&mut self.hamiltonian, hamiltonian(HamiltonianKind::Dw, vec![0.0, 0.0, 0.5], None, 3, 2));
                let d = self.hamiltonian.as_ref().map_or(2, |h| h.dims.motion_dim);
                let mut upper = vec![1.0; d];
                upper[0] = PI;
                let mut cells = vec![16; d];
                cells[0] = 32;
                fill(
                    &mut num.grid,
                    GridSpec {
                        lower: vec![0.0; d],
                        upper,
                        cells,
                    },
                );
                fill(&mut num.tol, 1e-10);
                fill(&mut num.max_iter, 100_000);
                fill(&mut num.relaxation, 1.8);
                fill(
                    &mut self.boundary,
                    Boundary::Sine {
                        axis: 0,
                        amplitude: 1.0,
                        wavenumber: 1.0,
                    },
                );
                fill(&mut tol.h_residual, 1e-8);
                fill(&mut tol.field_equation, 1e-8);
                fill(&mut tol.momentum_relation, 1e-10);
                fill(&mut tol.continuity, 1e-2);
                fill(&mut tol.symmetry, 1e-12);
            }
            Scenario::Geodesic => {
                fill(&mut self.hamiltonian, hamiltonian(HamiltonianKind::String, vec![], Some(1.0), 3, 1));
                let n = self.hamiltonian.as_ref().map_or(3, |h| h.dims.n);
                fill(&mut num.ds, 1e-2);
                fill(&mut num.s_end, 5.0);
                fill(&mut init.q0, vec![0.0; n]);
                let mut v0 = vec![0.0; n];
                v0[0] = 0.6;
                if n > 2 {
                    v0[2] = 0.8;
                } else {
                    v0[1] = 0.8;
                }
                fill(&mut init.v0, v0);
                fill(&mut tol.h_residual, 1e-10);
                fill(&mut tol.collinearity, 1e-10);
                fill(&mut tol.action, 1e-8);
            }
            Scenario::HjCheck => {
                fill(&mut self.hamiltonian, hamiltonian(HamiltonianKind::String, vec![], Some(1.0), 3, 1));
                let n = self.hamiltonian.as_ref().map_or(3, |h| h.dims.n);
                fill(&mut num.h, 1e-5);
                fill(&mut num.samples, 200);
                fill(&mut num.extent, 2.0);
                fill(&mut init.q0, vec![0.0; n]);
                fill(&mut init.energy, 0.5);
                fill(&mut init.c, 0.5);
                fill(&mut tol.hj_residual, 1e-6);
            }
            Scenario::GaSelftest => {
                fill(&mut num.samples, 1000);
                fill(&mut num.dims, vec![3, 4, 5]);
                fill(&mut num.workers, 4);
                fill(&mut tol.identity, 1e-12);
            }
        }
        self
    }

    /// Checks the resolved configuration: positivity, dimensions and the
    /// blocks each scenario needs.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Validation(msg));
        let positive = |name: &str, v: Option<f64>| -> CliResult<()> {
            match v {
                Some(x) if !(x > 0.0 && x.is_finite()) => {
                    Err(CliError::Validation(format!("{name} must be positive and finite, got {x}")))
                }
                _ => Ok(()),
            }
        };
        let num = &self.numeric;
        positive("numeric.dt", num.dt)?;
        positive("numeric.t_end", num.t_end)?;
        positive("numeric.ds", num.ds)?;
        positive("numeric.s_end", num.s_end)?;
        positive("numeric.h", num.h)?;
        positive("numeric.tol", num.tol)?;
        positive("numeric.extent", num.extent)?;
        if let Some(w) = num.relaxation {
            if !(w > 0.0 && w < 2.0) {
                return bad(format!("numeric.relaxation must lie in (0, 2), got {w}"));
            }
        }
        for (name, v) in [("numeric.max_iter", num.max_iter), ("numeric.samples", num.samples), ("numeric.workers", num.workers)] {
            if v == Some(0) {
                return bad(format!("{name} must be positive"));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("h_residual", t.h_residual),
            ("energy_drift", t.energy_drift),
            ("first_equation", t.first_equation),
            ("field_equation", t.field_equation),
            ("momentum_relation", t.momentum_relation),
            ("continuity", t.continuity),
            ("symmetry", t.symmetry),
            ("collinearity", t.collinearity),
            ("action", t.action),
            ("hj_residual", t.hj_residual),
            ("identity", t.identity),
        ] {
            positive(&format!("tolerances.{name}"), v)?;
        }

        if self.scenario == Scenario::GaSelftest {
            for &d in num.dims.as_deref().unwrap_or(&[]) {
                if !(2..=8).contains(&d) {
                    return bad(format!("numeric.dims entries must lie in 2..=8, got {d}"));
                }
            }
            return Ok(());
        }

        let ham = self
            .hamiltonian
            .as_ref()
            .ok_or_else(|| CliError::Validation("missing hamiltonian block".into()))?;
        ham.build()?;
        let n = ham.dims.n;
        let expected = match self.scenario {
            Scenario::Mechanics => Some(HamiltonianKind::Mechanics),
            Scenario::ScalarField => Some(HamiltonianKind::Dw),
            Scenario::Geodesic => Some(HamiltonianKind::String),
            _ => None,
        };
        if let Some(kind) = expected {
            if ham.kind != kind {
                return bad(format!("scenario {} needs a {kind:?} hamiltonian", self.scenario).to_lowercase());
            }
        }
        let check_len = |name: &str, v: &Option<Vec<f64>>| -> CliResult<()> {
            match v {
                Some(x) if x.len() != n => Err(CliError::Validation(format!("{name} needs {n} components, got {}", x.len()))),
                Some(x) if x.iter().any(|c| !c.is_finite()) => Err(CliError::Validation(format!("{name} must be finite"))),
                _ => Ok(()),
            }
        };
        check_len("initial.q0", &self.initial.q0)?;
        check_len("initial.p0", &self.initial.p0)?;
        check_len("initial.v0", &self.initial.v0)?;

        if self.scenario == Scenario::ScalarField {
            let d = ham.dims.motion_dim;
            let grid = num
                .grid
                .as_ref()
                .ok_or_else(|| CliError::Validation("scalar-field needs numeric.grid".into()))?;
            if grid.lower.len() != d || grid.upper.len() != d || grid.cells.len() != d {
                return bad(format!("numeric.grid needs {d} entries per field"));
            }
            for k in 0..d {
                let spacing = (grid.upper[k] - grid.lower[k]) / grid.cells[k] as f64;
                if !(spacing > 0.0 && spacing.is_finite()) {
                    return bad(format!("grid spacing along axis {} must be positive, got {spacing}", k + 1));
                }
                if grid.cells[k] < 2 {
                    return bad("numeric.grid needs at least 2 cells per axis".into());
                }
            }
            match &self.boundary {
                Some(Boundary::Sine { axis, amplitude, wavenumber }) => {
                    if *axis >= d || !amplitude.is_finite() || !wavenumber.is_finite() {
                        return bad("boundary: sine needs axis < D and finite amplitude, wavenumber".into());
                    }
                }
                Some(Boundary::Linear { slope, offset }) => {
                    if slope.len() != d || !offset.is_finite() || slope.iter().any(|s| !s.is_finite()) {
                        return bad(format!("boundary: linear needs {d} finite slopes"));
                    }
                }
                Some(Boundary::Constant { value }) if !value.is_finite() => {
                    return bad("boundary: constant value must be finite".into());
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Canonical JSON of the configuration (struct field order, shortest
    /// round-trip floats).
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }

    /// Hex SHA-256 of [`Self::canonical_json`].
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub(crate) fn ham(&self) -> CliResult<&HamiltonianConfig> {
        self.hamiltonian
            .as_ref()
            .ok_or_else(|| CliError::Validation("missing hamiltonian block".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_for_every_scenario() {
        for s in Scenario::ALL {
            let cfg = ScenarioConfig::default_for(s);
            cfg.validate().unwrap();
            assert_eq!(cfg.seed, 42);
            assert_eq!(cfg.clone().resolved(), cfg);
        }
    }

    #[test]
    fn json_round_trip_keeps_hash() {
        let cfg = ScenarioConfig::default_for(Scenario::ScalarField);
        let back = ScenarioConfig::from_json(&cfg.canonical_json()).unwrap();
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn negative_spacing_is_rejected() {
        let text = r#"{"scenario": "scalar-field",
            "hamiltonian": {"type": "dw", "potential": [0, 0, 0.5], "dims": {"n": 3, "D": 2}},
            "numeric": {"grid": {"lower": [0, 0], "upper": [-1, 1], "cells": [8, 8]}}}"#;
        let cfg = ScenarioConfig::from_json(text).unwrap().resolved();
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("spacing"));
    }

    #[test]
    fn unknown_scenario_names_the_valid_ones() {
        let err = ScenarioConfig::from_json(r#"{"scenario": "bogus"}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let msg = err.to_string();
        for s in Scenario::ALL {
            assert!(msg.contains(s.name()), "{msg}");
        }
    }

    #[test]
    fn mismatched_hamiltonian_is_rejected() {
        let mut cfg = ScenarioConfig::default_for(Scenario::Geodesic);
        cfg.hamiltonian = ScenarioConfig::default_for(Scenario::Mechanics).hamiltonian;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sine_boundary_lives_on_the_top_face() {
        let b = Boundary::Sine {
            axis: 0,
            amplitude: 2.0,
            wavenumber: 1.0,
        };
        let f = b.profile(&[0.0, 0.0], &[PI, 1.0]);
        assert!((f(&[PI / 2.0, 1.0]) - 2.0).abs() < 1e-15);
        assert_eq!(f(&[PI / 2.0, 0.0]), 0.0);
    }
}
