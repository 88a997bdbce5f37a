//! Scenario files, experiment dispatch and machine-readable reports.
//!
//! A scenario names one command together with its material, grid, seed and
//! command-specific parameters:
//!
//! ```json
//! {
//!   "command": "decay",
//!   "material": { "eps": [1, 2, 3], "mu": [1, 1, 1] },
//!   "grid": { "n": 128, "box": 100 },
//!   "params": { "data": "charge-free" },
//!   "outputs": { "json": "decay.json", "csv": "decay.csv" },
//!   "seed": 1
//! }
//! ```
//!
//! Running a scenario yields a [`Report`] with one [`Check`] per embedded
//! assertion and a JSON payload, and optionally a CSV [`Table`].

mod commands;
mod report;

use std::path::PathBuf;

use anisomax::tensors::DiagonalMaterial;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub use report::{emit_report, scenario_hash, Bound, Check, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Fresnel,
    Singular,
    Curvature,
    Classify,
    Propagate,
    Decay,
    Strichartz,
    Gronwall,
    Eigenfield,
    Holonomy,
    Symmetrizer,
    Fbi,
    IdentitySuite,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Fresnel => "fresnel",
            Command::Singular => "singular",
            Command::Curvature => "curvature",
            Command::Classify => "classify",
            Command::Propagate => "propagate",
            Command::Decay => "decay",
            Command::Strichartz => "strichartz",
            Command::Gronwall => "gronwall",
            Command::Eigenfield => "eigenfield",
            Command::Holonomy => "holonomy",
            Command::Symmetrizer => "symmetrizer",
            Command::Fbi => "fbi",
            Command::IdentitySuite => "identity-suite",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub eps: [f64; 3],
    #[serde(default = "unit")]
    pub mu: [f64; 3],
}

fn unit() -> [f64; 3] {
    [1.0; 3]
}

impl Default for MaterialSpec {
    fn default() -> Self {
        Self {
            eps: [1.0, 2.0, 3.0],
            mu: unit(),
        }
    }
}

impl MaterialSpec {
    pub fn build(&self) -> Result<DiagonalMaterial, CliError> {
        DiagonalMaterial::new(self.eps, self.mu).map_err(|e| CliError::Input(e.to_string()))
    }
}

/// Cubic periodic grid with `n` points per side and side length `box`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridArg {
    pub n: Option<usize>,
    #[serde(rename = "box")]
    pub length: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub command: Command,
    #[serde(default)]
    pub material: MaterialSpec,
    #[serde(default)]
    pub grid: Option<GridArg>,
    #[serde(default)]
    pub tmax: Option<f64>,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    1
}

impl Scenario {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            material: MaterialSpec::default(),
            grid: None,
            tmax: None,
            params: Map::new(),
            outputs: Outputs::default(),
            seed: default_seed(),
        }
    }

    /// Parses a scenario from JSON text.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed scenario: {e}")))
    }

    /// Loads a scenario from a file, or parses `arg` itself when it starts
    /// with `{`.
    pub fn load(arg: &str) -> Result<Self, CliError> {
        if arg.trim_start().starts_with('{') {
            return Self::from_json(arg);
        }
        let text = std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("cannot read scenario {arg}: {e}")))?;
        Self::from_json(&text)
    }

    pub fn grid_n(&self, default: usize) -> usize {
        self.grid.and_then(|g| g.n).unwrap_or(default)
    }

    pub fn grid_box(&self, default: f64) -> f64 {
        self.grid.and_then(|g| g.length).unwrap_or(default)
    }

    /// Command parameters decoded into `T`, rejecting unknown keys.
    pub fn params<T: serde::de::DeserializeOwned>(&self) -> Result<T, CliError> {
        serde_json::from_value(Value::Object(self.params.clone()))
            .map_err(|e| CliError::Input(format!("invalid params for {}: {e}", self.command.name())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed scenario, inadmissible material or a rejected experiment.
    Input(String),
    /// An output artifact could not be written.
    Output(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Output(m) => write!(f, "cannot write output: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INVALID
    }
}

pub(crate) fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

/// Checks, payload and optional table produced by one command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub payload: Map<String, Value>,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn check(&mut self, name: impl Into<String>, value: f64, bound: Bound) {
        self.checks.push(Check::new(name, value, bound));
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("payload values serialize");
        self.payload.insert(key.to_string(), v);
    }
}

/// Runs the scenario and assembles its report. Artifacts are not written;
/// see [`emit_report`].
pub fn run_scenario(s: &Scenario) -> Result<(Report, Option<Table>), CliError> {
    let outcome = commands::dispatch(s)?;
    let report = Report::new(s, &outcome);
    Ok((report, outcome.table))
}

/// Runs the scenario, writes its declared artifacts and returns the exit code
/// together with the report.
pub fn execute(s: &Scenario) -> Result<(i32, Report), CliError> {
    let (report, table) = run_scenario(s)?;
    emit_report(&report, table.as_ref(), &s.outputs)?;
    let code = if report.pass { EXIT_OK } else { EXIT_FAILED };
    Ok((code, report))
}
