use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::{CliError, Outcome, Outputs, Scenario};

/// Acceptance region of a checked value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "limit", rename_all = "kebab-case")]
pub enum Bound {
    Below(f64),
    AtMost(f64),
    Above(f64),
    AtLeast(f64),
    Within(f64, f64),
    Equals(f64),
}

impl Bound {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Bound::Below(x) => v < x,
            Bound::AtMost(x) => v <= x,
            Bound::Above(x) => v > x,
            Bound::AtLeast(x) => v >= x,
            Bound::Within(lo, hi) => lo <= v && v <= hi,
            Bound::Equals(x) => v == x,
        }
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::Below(x) => write!(f, "< {x:e}"),
            Bound::AtMost(x) => write!(f, "<= {x}"),
            Bound::Above(x) => write!(f, "> {x:e}"),
            Bound::AtLeast(x) => write!(f, ">= {x}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
            Bound::Equals(x) => write!(f, "= {x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound) -> Self {
        Self {
            name: name.into(),
            value,
            pass: bound.holds(value),
            bound,
        }
    }
}

/// Rows of a CSV artifact. Cells are preformatted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_f64(&mut self, row: &[f64]) {
        self.push(row.iter().map(|x| x.to_string()).collect());
    }

    /// gnuplot-compatible text: `#` header lines, then comma-separated rows.
    pub fn render(&self, report: &Report) -> String {
        let mut out = format!(
            "# {} {} {}\n# scenario {} seed {}\n# columns: {}\n",
            report.tool,
            report.version,
            report.command,
            report.scenario_hash,
            report.seed,
            self.columns.join(",")
        );
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub scenario_hash: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub payload: Map<String, Value>,
    /// Column names of the CSV artifact, when one is produced.
    pub csv_columns: Option<Vec<String>>,
}

impl Report {
    pub fn new(s: &Scenario, outcome: &Outcome) -> Self {
        Self {
            tool: "anisomax".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: s.command.name().into(),
            seed: s.seed,
            scenario_hash: scenario_hash(s),
            pass: outcome.checks.iter().all(|c| c.pass),
            checks: outcome.checks.clone(),
            payload: outcome.payload.clone(),
            csv_columns: outcome.table.as_ref().map(|t| t.columns.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{} {}: {:.6e} (want {})\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.bound));
        }
        out.push_str(&format!("{}: {} of {} checks passed\n", self.command, self.checks.iter().filter(|c| c.pass).count(), self.checks.len()));
        out
    }
}

/// SHA-256 of the scenario with its output paths removed, as lowercase hex.
pub fn scenario_hash(s: &Scenario) -> String {
    let mut canonical = s.clone();
    canonical.outputs = Outputs::default();
    let bytes = serde_json::to_vec(&canonical).expect("scenarios serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    let mut f = std::fs::File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    f.write_all(text.as_bytes()).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Writes the JSON report and the CSV table to the declared outputs.
pub fn emit_report(report: &Report, table: Option<&Table>, outputs: &Outputs) -> Result<(), CliError> {
    if let Some(path) = &outputs.json {
        write_file(path, &report.to_json())?;
    }
    if let (Some(path), Some(t)) = (&outputs.csv, table) {
        write_file(path, &t.render(report))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Command;

    #[test]
    fn empty_outcome_gives_minimal_report() {
        let s = Scenario::new(Command::Validate);
        let r = Report::new(&s, &Outcome::default());
        assert!(r.pass);
        assert!(r.checks.is_empty());
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.scenario_hash.len(), 64);
    }

    #[test]
    fn hash_ignores_output_paths() {
        let mut a = Scenario::new(Command::Singular);
        let b = a.clone();
        a.outputs.json = Some("x.json".into());
        assert_eq!(scenario_hash(&a), scenario_hash(&b));
        a.seed = 2;
        assert_ne!(scenario_hash(&a), scenario_hash(&b));
    }

    #[test]
    fn bounds() {
        assert!(Bound::Below(1.0).holds(0.5) && !Bound::Below(1.0).holds(1.0));
        assert!(Bound::Within(0.0, 1.0).holds(1.0));
        assert!(!Bound::Above(0.0).holds(f64::NAN));
    }
}
