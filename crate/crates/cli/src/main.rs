use std::process::ExitCode;

use anisomax_cli::{execute, CliError, Command, GridArg, MaterialSpec, Scenario, EXIT_INVALID};
use clap::{Parser, ValueEnum};

/// Runs one anisomax experiment and reports its checks.
///
/// The first argument is either a command name or `run`, which takes a
/// scenario file (or inline JSON) as its second argument. Flags override the
/// corresponding scenario fields.
#[derive(Debug, Parser)]
#[command(name = "anisomax", version)]
struct Cli {
    /// Command name, or `run`.
    command: String,
    /// Scenario path or inline JSON object (with `run`).
    scenario: Option<String>,
    /// Permittivity diagonal, e.g. `1,2,3`.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Permeability diagonal.
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<f64>>,
    /// Grid points per side.
    #[arg(long)]
    grid: Option<usize>,
    /// Box side length.
    #[arg(long = "box")]
    box_length: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Command parameters as a JSON object.
    #[arg(long)]
    params: Option<String>,
    /// Path of the JSON report.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Path of the CSV table.
    #[arg(long)]
    csv: Option<std::path::PathBuf>,
    /// Print the JSON report on standard output instead of the summary.
    #[arg(long)]
    json: bool,
}

fn triple(name: &str, v: &[f64]) -> Result<[f64; 3], CliError> {
    v.try_into()
        .map_err(|_| CliError::Input(format!("--{name} takes three comma-separated values, got {}", v.len())))
}

fn scenario(cli: &Cli) -> Result<Scenario, CliError> {
    let mut s = if cli.command == "run" {
        let arg = cli.scenario.as_deref().ok_or_else(|| CliError::Input("run needs a scenario path or inline JSON".into()))?;
        Scenario::load(arg)?
    } else {
        if cli.scenario.is_some() {
            return Err(CliError::Input(format!("unexpected argument after {}", cli.command)));
        }
        let cmd = Command::from_str(&cli.command, false).map_err(|_| CliError::Input(format!("unknown command {}", cli.command)))?;
        Scenario::new(cmd)
    };
    if let Some(eps) = &cli.eps {
        s.material = MaterialSpec {
            eps: triple("eps", eps)?,
            mu: s.material.mu,
        };
    }
    if let Some(mu) = &cli.mu {
        s.material.mu = triple("mu", mu)?;
    }
    if cli.grid.is_some() || cli.box_length.is_some() {
        let old = s.grid.unwrap_or(GridArg { n: None, length: None });
        s.grid = Some(GridArg {
            n: cli.grid.or(old.n),
            length: cli.box_length.or(old.length),
        });
    }
    if cli.tmax.is_some() {
        s.tmax = cli.tmax;
    }
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    if let Some(text) = &cli.params {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed params: {e}")))?;
        match v {
            serde_json::Value::Object(map) => s.params.extend(map),
            _ => return Err(CliError::Input("params must be a JSON object".into())),
        }
    }
    if cli.out.is_some() {
        s.outputs.json = cli.out.clone();
    }
    if cli.csv.is_some() {
        s.outputs.csv = cli.csv.clone();
    }
    Ok(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = scenario(&cli).and_then(|s| execute(&s));
    match result {
        Ok((code, report)) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.summary());
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("anisomax: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
