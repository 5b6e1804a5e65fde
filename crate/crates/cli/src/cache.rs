//! Content-addressed cache of weekly model selections.
//!
//! The key is the SHA-256 of the graph (node ids and weighted edges) plus
//! every inference parameter, so a hit can only return what a fresh run
//! would compute. Entries are JSON files `<key>.json`; deleting the
//! directory is always safe.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use polarscope::graphs::EndorsementGraph;
use polarscope::groups::{select_model, InferenceOptions, Partition};
use polarscope::rng::PRNG_VERSION;

use crate::error::{CliError, Result};

pub const CACHE_FORMAT: &str = "polarscope-selection/1";

/// The parts of a model selection later stages use.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub chosen_b: usize,
    pub evidence_margin: f64,
    pub scores: BTreeMap<usize, f64>,
    pub chosen: Partition,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    format: String,
    key: String,
    chosen_b: usize,
    evidence_margin: f64,
    scores: BTreeMap<usize, f64>,
    num_groups: usize,
    score: f64,
    assignment: Vec<(String, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SelectionParams {
    pub b_max: usize,
    pub seed: u64,
    pub restarts: usize,
    pub options: InferenceOptions,
}

#[derive(Debug, Clone)]
pub struct SelectionCache {
    dir: Option<PathBuf>,
}

pub fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn cache_key(graph: &EndorsementGraph, p: &SelectionParams) -> String {
    let mut h = Sha256::new();
    h.update(CACHE_FORMAT.as_bytes());
    let header = format!(
        "\n{}\n{}\nbinarize={}\nb_max={}\nseed={}\nrestarts={}\n",
        PRNG_VERSION,
        p.options.objective.tag(),
        p.options.binarize,
        p.b_max,
        p.seed,
        p.restarts
    );
    h.update(header.as_bytes());
    h.update((graph.node_count() as u64).to_le_bytes());
    for n in graph.nodes() {
        h.update((n.len() as u64).to_le_bytes());
        h.update(n.as_bytes());
    }
    for e in graph.edges() {
        h.update(e.source.to_le_bytes());
        h.update(e.target.to_le_bytes());
        h.update(e.multiplicity.to_le_bytes());
    }
    to_hex(&h.finalize())
}

impl SelectionCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    pub fn disabled() -> Self {
        Self { dir: None }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn select(&self, graph: &EndorsementGraph, params: &SelectionParams) -> Result<Selection> {
        let key = cache_key(graph, params);
        if let Some(path) = self.path(&key) {
            if let Some(hit) = read_entry(&path, &key) {
                return Ok(hit);
            }
        }
        let r = select_model(graph, params.b_max, params.seed, params.restarts, &params.options)?;
        let selection = Selection {
            chosen_b: r.chosen_b,
            evidence_margin: r.evidence_margin,
            scores: r.per_b.iter().map(|(&b, p)| (b, p.score())).collect(),
            chosen: r.chosen().clone(),
        };
        if let Some(path) = self.path(&key) {
            write_entry(&path, &key, &selection)?;
        }
        Ok(selection)
    }
}

fn read_entry(path: &Path, key: &str) -> Option<Selection> {
    let bytes = std::fs::read(path).ok()?;
    let e: Entry = match serde_json::from_slice(&bytes) {
        Ok(e) => e,
        Err(err) => {
            log::warn!("{}: unreadable cache entry ({err}); recomputing", path.display());
            return None;
        }
    };
    if e.format != CACHE_FORMAT || e.key != key {
        return None;
    }
    let chosen = Partition::new(e.assignment.into_iter().collect(), e.num_groups, e.score).ok()?;
    Some(Selection { chosen_b: e.chosen_b, evidence_margin: e.evidence_margin, scores: e.scores, chosen })
}

fn write_entry(path: &Path, key: &str, s: &Selection) -> Result<()> {
    let entry = Entry {
        format: CACHE_FORMAT.into(),
        key: key.into(),
        chosen_b: s.chosen_b,
        evidence_margin: s.evidence_margin,
        scores: s.scores.clone(),
        num_groups: s.chosen.num_groups(),
        score: s.chosen.score(),
        assignment: s.chosen.assignment().iter().map(|(u, &g)| (u.clone(), g)).collect(),
    };
    let dir = path.parent().expect("cache file has a parent");
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    // write then rename, so readers never see a partial entry
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let json = serde_json::to_vec(&entry).map_err(|e| CliError::Runtime(e.to_string()))?;
    std::fs::write(&tmp, json).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))?;
    Ok(())
}
