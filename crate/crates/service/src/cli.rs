//! The `blendvis` command line: replay a script in-process and emit or check
//! the resulting state, or serve sessions over HTTP.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use blendvis_core::data::{load_csv, CsvOptions, Dataset};
use blendvis_core::script::{run, Script, StepReport};
use blendvis_core::{Session, SessionConfig};

use crate::state::AppState;

#[derive(Debug, Clone, Parser)]
#[command(name = "blendvis", version, about = "Replay visualization scripts or serve sessions over HTTP")]
pub struct Args {
    /// CSV dataset; defaults to the script's `dataset` inside the data directory.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// JSON replay script.
    #[arg(long)]
    pub script: Option<PathBuf>,
    /// Write the final spec as canonical JSON (`-` for stdout).
    #[arg(long, value_name = "PATH")]
    pub emit_spec: Option<PathBuf>,
    /// Write the final view model as canonical JSON (`-` for stdout).
    #[arg(long, value_name = "PATH")]
    pub emit_view: Option<PathBuf>,
    /// Write the pending recommendations as JSON (`-` for stdout).
    #[arg(long, value_name = "PATH")]
    pub emit_recs: Option<PathBuf>,
    /// JSON file with any of `spec`, `view`, `recommendations` to compare against.
    #[arg(long, value_name = "PATH")]
    pub assert: Option<PathBuf>,
    /// Serve the HTTP API instead of replaying.
    #[arg(long)]
    pub serve: bool,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory that referenced datasets are read from.
    #[arg(long, env = "LIGER_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,
    /// Session id used for replay (appears in recommendation ids).
    #[arg(long, default_value = "cli")]
    pub session_id: String,
    /// Suppress the per-step report.
    #[arg(short, long)]
    pub quiet: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Engine(#[from] blendvis_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Assert(String),
}

impl CliError {
    /// 1 for a failed step, 2 for bad input, 3 for an assertion mismatch.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Engine(blendvis_core::Error::Script(_)) => 1,
            CliError::Assert(_) => 3,
            _ => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if path.as_os_str() == "-" {
        println!("{text}");
        return Ok(());
    }
    std::fs::write(path, format!("{text}\n")).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn load_dataset(path: &Path) -> Result<Arc<Dataset>, CliError> {
    let text = read(path)?;
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    Ok(Arc::new(load_csv(text.as_bytes(), &CsvOptions::named(id))?))
}

/// Canonical serializations of a session's observable state.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub spec: String,
    /// The view model, or the error code when the spec cannot render.
    pub view: Result<String, String>,
    pub recommendations: String,
}

impl Outputs {
    pub fn of(session: &Session) -> Self {
        Outputs {
            spec: session.spec().canonical_json(),
            view: session.view().map(|v| v.canonical_json()).map_err(|e| e.code().to_string()),
            recommendations: serde_json::to_string(&session.presentation()).expect("presentation serializes"),
        }
    }
}

/// Expected values for `--assert`; absent keys are not checked.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub view: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommendations: Option<Value>,
}

impl Assertions {
    /// Names of the checked outputs that differ.
    pub fn mismatches(&self, out: &Outputs) -> Vec<&'static str> {
        let parse = |s: &str| serde_json::from_str::<Value>(s).ok();
        let mut bad = Vec::new();
        if self.spec.as_ref().is_some_and(|v| Some(v) != parse(&out.spec).as_ref()) {
            bad.push("spec");
        }
        if self.view.as_ref().is_some_and(|v| Some(v) != out.view.as_deref().ok().and_then(parse).as_ref()) {
            bad.push("view");
        }
        if self.recommendations.as_ref().is_some_and(|v| Some(v) != parse(&out.recommendations).as_ref()) {
            bad.push("recommendations");
        }
        bad
    }
}

fn print_reports(reports: &[StepReport]) {
    for r in reports {
        let status = match (&r.error, r.passed()) {
            (_, false) => format!("FAILED {}", r.failures.join("; ")),
            (Some(e), true) => format!("ok (expected error: {e})"),
            (None, true) => "ok".to_string(),
        };
        eprintln!("step {:>3} {:<14} {status}", r.index, r.op);
    }
}

/// Replays `--script` (or nothing) against the dataset and handles the emit
/// and assert flags. Returns the final session.
pub fn replay(args: &Args) -> Result<Session, CliError> {
    let script = match &args.script {
        Some(path) => Script::parse(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => Script::default(),
    };
    let data = match (&args.data, &script.dataset) {
        (Some(path), _) => path.clone(),
        (None, Some(name)) => args.data_dir.join(name),
        (None, None) => return Err(CliError::Usage("no dataset: pass --data or name one in the script".into())),
    };
    let mut session = Session::with_config(args.session_id.clone(), load_dataset(&data)?, SessionConfig::default());
    let (reports, result) = run(&mut session, &script);
    if !args.quiet {
        print_reports(&reports);
    }
    result?;

    let out = Outputs::of(&session);
    if let Some(path) = &args.emit_spec {
        write(path, &out.spec)?;
    }
    if let Some(path) = &args.emit_view {
        match &out.view {
            Ok(view) => write(path, view)?,
            Err(code) => return Err(CliError::Usage(format!("final spec does not render: {code}"))),
        }
    }
    if let Some(path) = &args.emit_recs {
        write(path, &out.recommendations)?;
    }
    if let Some(path) = &args.assert {
        let assertions: Assertions =
            serde_json::from_str(&read(path)?).map_err(|source| CliError::Json { path: path.clone(), source })?;
        let bad = assertions.mismatches(&out);
        if !bad.is_empty() {
            return Err(CliError::Assert(format!("{} differs from {}", bad.join(", "), path.display())));
        }
    }
    Ok(session)
}

pub fn serve(args: &Args) -> Result<(), CliError> {
    let state = Arc::new(AppState::new(args.data_dir.clone(), SessionConfig::default()));
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], args.port));
    let runtime = tokio::runtime::Runtime::new().map_err(|source| CliError::Io { path: PathBuf::from("<runtime>"), source })?;
    eprintln!("listening on http://{addr} (data directory {})", args.data_dir.display());
    runtime
        .block_on(crate::api::serve(state, addr))
        .map_err(|source| CliError::Io { path: PathBuf::from(addr.to_string()), source })
}
