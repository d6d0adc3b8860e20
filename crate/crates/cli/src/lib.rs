//! `gptk`: runs the verification suites of `poincare-gpt` and emits JSON or
//! CSV reports. Exit status is 0 only when every check passes.

pub mod suites;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use poincare_gpt::composites;
use poincare_gpt::poincare_rep::ToySpacetimeReport;
use poincare_gpt::zoo;
use serde::Serialize;

use suites::{ChshRow, Suite};

#[derive(Parser, Debug)]
#[command(name = "gptk", version, about = "Verification harness for probabilistic theories and Poincaré symmetry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Export a theory from the registry as JSON, or list the registry.
    Zoo {
        /// `bit`, `simplex:N`, `polygon:N`, `ball:d` or `boxworld`.
        name: Option<String>,
    },
    /// Maximize CHSH over the maximal tensor product for each `--locals` entry.
    ChshScan,
    /// Interval, mass-shell and group-law checks on random Poincaré transforms.
    MinkowskiChecks,
    /// Little-group element, Wigner rotations and their composition law.
    LittleGroupChecks,
    /// Probability invariance, detector sphere and momentum pairing.
    InvarianceChecks,
    /// Lattice translations acting on an N-gon by R(kθ).
    ToySpacetime,
    /// Every suite, with the acceptance configuration.
    Report,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunConfig {
    /// Spatial dimension.
    #[arg(long, global = true, default_value_t = 3)]
    pub n: usize,
    /// Particle mass for sampled momenta.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, global = true, default_value_t = 20_240_601)]
    pub seed: u64,
    /// Tolerance; each check has its own default when omitted.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Random draws per check; each suite has its own default when omitted.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Comma-separated scan entries, each `A` or `A/B`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub locals: Vec<String>,
    /// Polygon order for the toy spacetime.
    #[arg(long = "N", global = true, default_value_t = 5)]
    pub big_n: usize,
    /// Lattice step for the toy spacetime.
    #[arg(long, global = true, default_value_t = 2, allow_negative_numbers = true)]
    pub k: i64,
    /// Solve CHSH scans with exact arithmetic where a frame exists.
    #[arg(long, global = true)]
    pub exact: bool,
    /// JSON scenario file for `chsh-scan`, replacing `--locals`.
    #[arg(long, global = true)]
    pub scenarios: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Write the sampled Poincaré transforms as a JSON array of `{a, lambda}`.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub log: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

pub const DEFAULT_LOCALS: [&str; 4] = ["bit", "polygon:3", "polygon:4", "polygon:6"];

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.n >= 1, "--n must be at least 1");
        ensure!(self.mass > 0.0 && self.mass.is_finite(), "--mass must be positive");
        if let Some(t) = self.tol {
            ensure!(t > 0.0 && t.is_finite(), "--tol must be positive");
        }
        ensure!(self.big_n >= 3, "--N must be at least 3");
        Ok(())
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: RunConfig,
    pub suites: Vec<Suite>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<ChshRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToySpacetimeReport>,
    pub pass: bool,
}

/// Rendered output of one invocation, plus the transform log when the
/// command samples transforms.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub pass: bool,
    pub log: Option<String>,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Zoo { .. } => "zoo",
        Command::ChshScan => "chsh-scan",
        Command::MinkowskiChecks => "minkowski-checks",
        Command::LittleGroupChecks => "little-group-checks",
        Command::InvarianceChecks => "invariance-checks",
        Command::ToySpacetime => "toy-spacetime",
        Command::Report => "report",
    }
}

/// Every suite at the tolerances and sizes of the acceptance criteria.
pub fn report_suites(cfg: &RunConfig) -> Result<Vec<Suite>> {
    let seed = cfg.seed;
    let mut out = vec![
        Suite::new("distinguishability", suites::distinguishability()?),
        Suite::new("polygon-symmetry", suites::polygon_symmetry(12, cfg.tol_or(1e-12))?),
        Suite::new("bloch-consistency", suites::bloch_consistency(cfg.samples_or(1000), seed, cfg.tol_or(1e-12))?),
        Suite::new("chsh", suites::chsh(cfg.tol_or(1e-9))?),
        Suite::new("tsirelson", suites::tsirelson(cfg.samples_or(100), seed, cfg.tol_or(1e-9))?),
    ];
    for n in 2..=4 {
        out.push(Suite::new(
            format!("minkowski-n{n}"),
            suites::minkowski_checks(n, cfg.mass, cfg.samples_or(100), seed, cfg.tol_or(1e-9), &mut Vec::new())?,
        ));
    }
    for n in 2..=4 {
        let mut checks =
            suites::little_group_checks(n, cfg.mass, cfg.samples_or(200), seed, cfg.tol_or(1e-9), &mut Vec::new())?;
        if n == 3 {
            checks.push(suites::thomas_wigner(1e-12)?);
        }
        out.push(Suite::new(format!("little-group-n{n}"), checks));
    }
    for n in 2..=4 {
        out.push(Suite::new(
            format!("invariance-n{n}"),
            suites::invariance_checks(n, cfg.mass, cfg.samples_or(200), seed, cfg.tol_or(1e-10))?,
        ));
    }
    out.push(Suite::new("toy-spacetime", suites::toy_spacetime_exhaustive(12, cfg.tol_or(1e-12))?));
    out.push(Suite::new("ball-orbit", suites::orbit(3, cfg.samples_or(100), seed, cfg.tol_or(1e-10))?));
    Ok(out)
}

/// Runs one subcommand and renders its report.
pub fn run(command: &Command, cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    if let Command::Zoo { name } = command {
        ensure!(cfg.format == Format::Json, "zoo exports JSON only");
        let text = match name {
            Some(name) => zoo::theory_by_name(name)?.to_json()?,
            None => serde_json::to_string_pretty(&["bit", "simplex:N", "polygon:N", "ball:d", "boxworld"])?,
        };
        return Ok(Outcome { text: text + "\n", pass: true, log: None });
    }

    if cfg.log.is_some() {
        ensure!(
            matches!(command, Command::MinkowskiChecks | Command::LittleGroupChecks),
            "--log applies to minkowski-checks and little-group-checks"
        );
    }
    if cfg.scenarios.is_some() {
        ensure!(matches!(command, Command::ChshScan), "--scenarios applies to chsh-scan");
    }

    let seed = cfg.seed;
    let mut rows = None;
    let mut toy = None;
    let mut log = Vec::new();
    let suites = match command {
        Command::Zoo { .. } => unreachable!(),
        Command::ChshScan if cfg.scenarios.is_some() => {
            let path = cfg.scenarios.as_ref().expect("checked");
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let mut found = Vec::new();
            let mut checks = Vec::new();
            for s in composites::ScenarioFile::parse_many(&text)? {
                let (row, check) = suites::scenario_row(&s, cfg.tol_or(1e-9))
                    .with_context(|| format!("scenario {}", s.id))?;
                found.push(row);
                checks.push(check);
            }
            rows = Some(found);
            vec![Suite::new("chsh-scenarios", checks)]
        }
        Command::ChshScan => {
            let locals: Vec<String> = if cfg.locals.is_empty() {
                DEFAULT_LOCALS.iter().map(|s| s.to_string()).collect()
            } else {
                cfg.locals.clone()
            };
            let mut found = Vec::new();
            let mut checks = Vec::new();
            for pair in &locals {
                let (row, check) = suites::chsh_scan_row(pair, cfg.exact, cfg.tol_or(1e-9))
                    .with_context(|| format!("scanning {pair}"))?;
                found.push(row);
                checks.push(check);
            }
            rows = Some(found);
            vec![Suite::new("chsh-scan", checks)]
        }
        Command::MinkowskiChecks => vec![Suite::new(
            format!("minkowski-n{}", cfg.n),
            suites::minkowski_checks(cfg.n, cfg.mass, cfg.samples_or(100), seed, cfg.tol_or(1e-9), &mut log)?,
        )],
        Command::LittleGroupChecks => vec![Suite::new(
            format!("little-group-n{}", cfg.n),
            suites::little_group_checks(cfg.n, cfg.mass, cfg.samples_or(200), seed, cfg.tol_or(1e-9), &mut log)?,
        )],
        Command::InvarianceChecks => vec![Suite::new(
            format!("invariance-n{}", cfg.n),
            suites::invariance_checks(cfg.n, cfg.mass, cfg.samples_or(200), seed, cfg.tol_or(1e-10))?,
        )],
        Command::ToySpacetime => {
            let (r, checks) = suites::toy_spacetime(cfg.big_n, cfg.k, cfg.tol_or(1e-12))?;
            toy = Some(r);
            vec![Suite::new(format!("toy-spacetime-N{}-k{}", cfg.big_n, cfg.k), checks)]
        }
        Command::Report => report_suites(cfg)?,
    };
    let pass = suites.iter().all(|s| s.pass);
    let report = RunReport {
        command: command_name(command).to_string(),
        config: cfg.clone(),
        suites,
        rows,
        toy,
        pass,
    };
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => render_csv(&report)?,
    };
    let log = match &cfg.log {
        Some(_) => Some(serde_json::to_string_pretty(&log)? + "\n"),
        None => None,
    };
    Ok(Outcome { text, pass, log })
}

#[derive(Serialize)]
struct CheckRow<'a> {
    suite: &'a str,
    check: &'a str,
    samples: usize,
    worst_deviation: f64,
    pass: bool,
    anchor: &'a str,
}

/// CHSH scans print one row per scenario; every other command prints one
/// row per check.
pub fn render_csv(report: &RunReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(rows) = &report.rows {
        for r in rows {
            w.serialize(r)?;
        }
    } else {
        for s in &report.suites {
            for c in &s.checks {
                w.serialize(CheckRow {
                    suite: &s.suite,
                    check: &c.check,
                    samples: c.samples,
                    worst_deviation: c.worst_deviation,
                    pass: c.pass,
                    anchor: &c.anchor,
                })?;
            }
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Writes the report to `--out` (creating or truncating it) or to stdout,
/// and the transform log to `--log`.
pub fn emit(outcome: &Outcome, cfg: &RunConfig) -> Result<()> {
    match &cfg.out {
        Some(path) => write_file(path, &outcome.text)?,
        None => std::io::stdout().lock().write_all(outcome.text.as_bytes())?,
    }
    if let (Some(path), Some(log)) = (&cfg.log, &outcome.log) {
        write_file(path, log)?;
    }
    Ok(())
}

/// Parses a subcommand given as a string, for callers that do not go
/// through clap.
pub fn parse_command(name: &str) -> Result<Command> {
    Ok(match name {
        "zoo" => Command::Zoo { name: None },
        "chsh-scan" => Command::ChshScan,
        "minkowski-checks" => Command::MinkowskiChecks,
        "little-group-checks" => Command::LittleGroupChecks,
        "invariance-checks" => Command::InvarianceChecks,
        "toy-spacetime" => Command::ToySpacetime,
        "report" => Command::Report,
        other => bail!("unknown subcommand {other}"),
    })
}
