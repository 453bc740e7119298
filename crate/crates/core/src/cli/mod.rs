//! Command-line front end.
//!
//! Every command prints one JSON object on stdout:
//!
//! ```json
//! { "schema_version": 1, "command": "...", "metrics": {...},
//!   "model_path": "..." | null, "config": {...} }
//! ```
//!
//! `config` is the fully resolved configuration; passing it back through
//! `--config` repeats the run. Logs go to stderr. Exit codes: 0 success,
//! 1 configuration or IO error, 2 non-finite loss or parameters.

mod args;
mod commands;
mod config;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub use args::*;
pub use commands::*;
pub use config::{load_config_file, parse_config_text, resolve};

use crate::error::{Error, Result};

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

fn run_with<A, C>(file: &Map<String, Value>, args: &A, f: impl FnOnce(&C) -> Result<Outcome>) -> Result<(Value, Outcome)>
where
    A: Serialize,
    C: DeserializeOwned + Serialize,
{
    let config: C = resolve(file.clone(), args)?;
    let echo = serde_json::to_value(&config).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok((echo, f(&config)?))
}

/// Runs a parsed command line and returns the JSON summary.
pub fn run(cli: &Cli) -> Result<Value> {
    let file = match &cli.config {
        Some(p) => load_config_file(p)?,
        None => Map::new(),
    };
    let (config, outcome) = match &cli.command {
        Command::TrainEncoder(a) => run_with(&file, a, train_encoder_cmd)?,
        Command::Embed(a) => run_with(&file, a, embed_cmd)?,
        Command::Knn(a) => run_with(&file, a, knn_cmd)?,
        Command::TrainTagger(a) => run_with(&file, a, train_tagger_cmd)?,
        Command::Tag(a) => run_with(&file, a, tag_cmd)?,
        Command::EvalTags(a) => run_with(&file, a, eval_tags_cmd)?,
        Command::TrainParser(a) => run_with(&file, a, train_parser_cmd)?,
        Command::Parse(a) => run_with(&file, a, parse_cmd)?,
        Command::EvalParse(a) => run_with(&file, a, eval_parse_cmd)?,
        Command::ExportArcScores(a) => run_with(&file, a, export_arc_scores_cmd)?,
    };
    Ok(json!({
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "command": cli.command.name(),
        "metrics": outcome.metrics,
        "model_path": outcome.model_path,
        "config": config,
    }))
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        2
    } else {
        1
    }
}
