//! `synth`: writes a synthetic corpus with its ground truth.

use std::io::BufWriter;
use std::path::Path;

use serde::Deserialize;
use serde_json::json;

use polarscope::groups::{write_partition, write_seeds};
use polarscope::ingest::{write_events_csv, write_events_jsonl};
use polarscope::synth::{gen_corpus, CorpusSpec};

use crate::error::{CliError, Result};
use crate::output::{file_digest, OutputDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum EventFileFormat {
    #[default]
    Csv,
    Jsonl,
}

impl EventFileFormat {
    pub fn file_name(self) -> &'static str {
        match self {
            EventFileFormat::Csv => "events.csv",
            EventFileFormat::Jsonl => "events.jsonl",
        }
    }
}

/// TOML dates become strings so specs may write them bare or quoted.
fn dates_as_strings(v: toml::Value) -> toml::Value {
    match v {
        toml::Value::Datetime(d) => toml::Value::String(d.to_string()),
        toml::Value::Array(a) => toml::Value::Array(a.into_iter().map(dates_as_strings).collect()),
        toml::Value::Table(t) => toml::Value::Table(t.into_iter().map(|(k, v)| (k, dates_as_strings(v))).collect()),
        other => other,
    }
}

pub fn parse_spec(src: &str) -> Result<CorpusSpec> {
    let raw: toml::Value = toml::from_str(src).map_err(|e| CliError::validation(format!("synth spec: {e}")))?;
    let spec =
        CorpusSpec::deserialize(dates_as_strings(raw)).map_err(|e| CliError::validation(format!("synth spec: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

pub fn load_spec(path: &Path) -> Result<CorpusSpec> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_spec(&src).map_err(|e| match e {
        CliError::Validation(f) => {
            CliError::Validation(f.into_iter().map(|m| format!("{}: {m}", path.display())).collect())
        }
        e if e.exit_code() == 1 => CliError::validation(format!("{}: {e}", path.display())),
        other => other,
    })
}

pub fn synth(spec_path: &Path, seed: Option<u64>, format: EventFileFormat, out_dir: &Path) -> Result<()> {
    let mut spec = load_spec(spec_path)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let corpus = gen_corpus(&spec)?;
    let mut out = OutputDir::new(out_dir);

    let events_path = out_dir.join(format.file_name());
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let file = std::fs::File::create(&events_path).map_err(|e| CliError::io(&events_path, e))?;
    let w = BufWriter::with_capacity(1 << 20, file);
    match format {
        EventFileFormat::Csv => write_events_csv(&corpus.events, w)?,
        EventFileFormat::Jsonl => write_events_jsonl(&corpus.events, w)?,
    }

    let mut seeds = Vec::new();
    write_seeds(&corpus.seeds, &mut seeds)?;
    out.write("seeds.csv", &seeds)?;
    for (planting, partition) in &corpus.truth {
        let mut bytes = Vec::new();
        write_partition(partition, &[("planting", planting.clone()), ("seed", spec.seed.to_string())], &mut bytes)?;
        out.write(format!("truth/{planting}.csv"), &bytes)?;
    }
    let (sha256, bytes) = file_digest(&events_path)?;
    let meta = json!({
        "tool": "polarscope",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "synth",
        "prng": polarscope::rng::PRNG_VERSION,
        "seed": spec.seed,
        "spec": spec,
        "events": { "file": format.file_name(), "count": corpus.events.len(), "sha256": sha256, "bytes": bytes },
        "seeds": corpus.seeds.len(),
        "plantings": corpus.truth.keys().collect::<Vec<_>>(),
    });
    out.write_json("metadata.json", &meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_and_quoted_dates_parse_alike() {
        let spec = |start: &str| {
            format!(
                r#"
seed = 1
reference_planting = "p"

[[blocs]]
label = "A"
size = 10

[[blocs]]
label = "B"
size = 10

[[periods]]
name = "one"
start = {start}
weeks = 1

[[topics]]
id = "t"
text = "t"
events_per_week = 50
p_in = 0.9
p_out = 0.1
planting = "p"
"#
            )
        };
        let bare = parse_spec(&spec("2018-01-01")).unwrap();
        let quoted = parse_spec(&spec("\"2018-01-01\"")).unwrap();
        assert_eq!(bare, quoted);
        assert!(matches!(parse_spec(&spec("\"not a date\"")), Err(CliError::Validation(_))));
    }
}
