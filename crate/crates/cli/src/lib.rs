//! Config loading, suite dispatch and report documents for the `genmat` binary.

pub mod config;
pub mod suites;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use genmat::{Report, SpaceRef};
use serde::Serialize;
use thiserror::Error;

pub use config::{ExperimentConfig, Suite, CONFIG_SCHEMA, DEFAULT_SEED};

pub const REPORT_SCHEMA: &str = "genmat.report/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("space: {0}")]
    Space(#[source] genmat::Error),
    #[error("writing {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Write { .. } => 2,
            CliError::Space(_) => 3,
        }
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    ExperimentConfig::parse(&text).map_err(CliError::Config)
}

pub fn build_space(cfg: &ExperimentConfig) -> Result<SpaceRef<f64>, CliError> {
    cfg.space.build::<f64>().map_err(CliError::Space)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaceSummary {
    pub kind: &'static str,
    pub resolution: usize,
    pub nodes: usize,
    pub min_weight: f64,
    pub max_weight: f64,
    pub diameter: f64,
    pub fingerprint: String,
}

impl SpaceSummary {
    pub fn of(space: &SpaceRef<f64>) -> Self {
        Self {
            kind: space.kind().name(),
            resolution: space.resolution(),
            nodes: space.len(),
            min_weight: space.min_weight(),
            max_weight: space.max_weight(),
            diameter: space.diameter(),
            fingerprint: format!("{:016x}", space.fingerprint()),
        }
    }
}

/// The document written by `run`. It holds no timestamps or timings, so equal
/// `(config, seed)` give equal bytes.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub suite: Suite,
    pub seed: u64,
    pub space: SpaceSummary,
    pub sections: Vec<Report>,
    pub pass: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

pub fn run_suite(space: &SpaceRef<f64>, cfg: &ExperimentConfig, suite: Suite, seed: u64) -> RunReport {
    let list: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let sections: Vec<Report> = list.into_iter().map(|s| suites::run(s, space, cfg, seed)).collect();
    let pass = sections.iter().all(|r| r.pass);
    RunReport { schema: REPORT_SCHEMA, suite, seed, space: SpaceSummary::of(space), sections, pass }
}

/// Command-line values take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct RunArgs {
    pub config: PathBuf,
    pub suite: Option<Suite>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Loads, runs and writes the report; the returned status is 0 or 1.
pub fn run(args: &RunArgs) -> Result<(RunReport, PathBuf), CliError> {
    let cfg = load_config(&args.config)?;
    let suite = args.suite.or(cfg.suite).ok_or_else(|| CliError::Config("no suite given".into()))?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let out = args.out.clone().or_else(|| cfg.out.clone()).ok_or_else(|| CliError::Config("no output path given".into()))?;
    let space = build_space(&cfg)?;
    let report = run_suite(&space, &cfg, suite, seed);
    fs::write(&out, report.to_json()).map_err(|source| CliError::Write { path: out.clone(), source })?;
    Ok((report, out))
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "✓"
    } else {
        "✗"
    }
}

/// One summary line, then weight extrema and any condition witnesses.
pub fn describe(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let space = build_space(cfg)?;
    let mut out = String::new();
    let head = format!("{} nodes, diameter {}", space.len(), space.diameter());
    if space.is_finite() {
        writeln!(out, "{head}, unit exists").unwrap();
    } else {
        let cond = space.check_conditions(&cfg.deltas()).map_err(|e| CliError::Config(e.to_string()))?;
        writeln!(out, "{head}, C1 {} C2 {}", mark(cond.c1), mark(cond.c2)).unwrap();
        for w in &cond.witnesses {
            writeln!(out, "  witness: {w}").unwrap();
        }
    }
    writeln!(out, "kind {}, weights in [{}, {}]", space.kind().name(), space.min_weight(), space.max_weight()).unwrap();
    Ok(out)
}
