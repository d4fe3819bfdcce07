//! `thompson`: batch runner for the constructors, verifiers and walk experiments.
//!
//! Every run writes `report.json`, optionally `series.csv`, and a
//! `manifest.json` with the resolved settings and sha256 of each artifact.
//! Exit codes: 0 pass, 1 verified failure, 2 resource limit, 64 usage error.

mod commands;
mod settings;
mod sets;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use settings::Overrides;

#[derive(Parser, Debug)]
#[command(name = "thompson", version, about = "Approximation verifiers and walk experiments on the dyadic Schreier graph of F")]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Overrides,
    /// JSON settings file (or a previous manifest.json); flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for report.json, series.csv and manifest.json.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Inspect the Schreier graph.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Check superharmonicity of a vertex or set function.
    #[command(subcommand)]
    Fn(FnCmd),
    /// Strong approximation: verify, construct or refute E_n.
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// Random walk statistics.
    #[command(subcommand)]
    Walk(WalkCmd),
    /// The free-group counterexample.
    #[command(subcommand)]
    Cx(CxCmd),
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum GraphCmd {
    /// BFS ball around p with skeleton and hair counts per distance.
    Explore,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum FnCmd {
    Check,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum ApproxCmd {
    Verify,
    Construct,
    Refute,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum WalkCmd {
    Green,
    Return,
    Decay,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum CxCmd {
    Scan,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::Graph(GraphCmd::Explore) => "graph explore",
            Cmd::Fn(FnCmd::Check) => "fn check",
            Cmd::Approx(ApproxCmd::Verify) => "approx verify",
            Cmd::Approx(ApproxCmd::Construct) => "approx construct",
            Cmd::Approx(ApproxCmd::Refute) => "approx refute",
            Cmd::Walk(WalkCmd::Green) => "walk green",
            Cmd::Walk(WalkCmd::Return) => "walk return",
            Cmd::Walk(WalkCmd::Decay) => "walk decay",
            Cmd::Cx(CxCmd::Scan) => "cx scan",
        }
    }
}

pub const EXIT_FAIL: u8 = 1;
pub const EXIT_RESOURCE: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

/// Why a run stopped before producing artifacts.
#[derive(Debug)]
pub enum Abort {
    Usage(String),
    Resource(String),
    Failed(String),
}

impl From<thompson_core::Error> for Abort {
    fn from(e: thompson_core::Error) -> Self {
        use thompson_core::Error as E;
        if e.is_resource() {
            Abort::Resource(e.to_string())
        } else if matches!(e, E::Parse(_) | E::PreconditionFailed(_)) {
            Abort::Usage(e.to_string())
        } else {
            Abort::Failed(e.to_string())
        }
    }
}

/// What a command hands back for writing.
pub struct Output {
    pub report: serde_json::Value,
    pub series: Option<String>,
    pub pass: bool,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_artifacts(dir: &Path, out: &Output, manifest: serde_json::Value) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut files = serde_json::Map::new();
    let report = serde_json::to_string_pretty(&out.report)? + "\n";
    std::fs::write(dir.join("report.json"), &report)?;
    files.insert("report.json".into(), sha256_hex(report.as_bytes()).into());
    if let Some(csv) = &out.series {
        std::fs::write(dir.join("series.csv"), csv)?;
        files.insert("series.csv".into(), sha256_hex(csv.as_bytes()).into());
    }
    let mut manifest = manifest;
    manifest["files"] = files.into();
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")
}

fn drop_nulls(v: serde_json::Value) -> serde_json::Value {
    match v {
        serde_json::Value::Object(m) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        other => other,
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let file = match cli.config.as_deref().map(Overrides::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let settings = cli.opts.clone().or(file).or(commands::defaults(cli.cmd));
    if let Some(t) = settings.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_RESOURCE);
        }
    }
    let out = match commands::run(cli.cmd, &settings) {
        Ok(o) => o,
        Err(Abort::Usage(m)) => {
            eprintln!("usage error: {m}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Abort::Resource(m)) => {
            eprintln!("resource limit: {m}");
            return ExitCode::from(EXIT_RESOURCE);
        }
        Err(Abort::Failed(m)) => {
            eprintln!("failed: {m}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    let code = if out.pass { 0 } else { EXIT_FAIL };
    let manifest = json!({
        "tool": "thompson",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.cmd.name(),
        "args": std::env::args().skip(1).collect::<Vec<_>>(),
        "settings": drop_nulls(serde_json::to_value(&settings).expect("plain settings")),
        "threads_used": rayon::current_num_threads(),
        "exit_code": code,
        "wall_clock_secs": started.elapsed().as_secs_f64(),
    });
    if let Err(e) = write_artifacts(&cli.out, &out, manifest) {
        eprintln!("error: writing {}: {e}", cli.out.display());
        return ExitCode::from(EXIT_RESOURCE);
    }
    println!("{}: {} ({})", cli.cmd.name(), if out.pass { "pass" } else { "FAIL" }, cli.out.display());
    ExitCode::from(code)
}
