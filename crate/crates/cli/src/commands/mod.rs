//! Subcommand implementations.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use chrono::Duration;
use chrono_tz::Tz;
use rayon::prelude::*;

use polarscope::graphs::EndorsementGraph;
use polarscope::groups::{read_partition, Partition};
use polarscope::ingest::TimeWindow;

use crate::cache::{Selection, SelectionCache, SelectionParams};
use crate::config::{LoadedConfig, PeriodConfig};
use crate::data::{period_windows, Inputs};
use crate::error::{CliError, Result};

pub mod align;
pub mod infer_groups;
pub mod newsflow;
pub mod synth;
pub mod trends;
pub mod validate;

/// Which reference partition a row refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Institutional,
    Ideological,
}

impl Reference {
    pub const ALL: [Reference; 2] = [Reference::Institutional, Reference::Ideological];

    pub fn name(self) -> &'static str {
        match self {
            Reference::Institutional => "institutional",
            Reference::Ideological => "ideological",
        }
    }

    pub fn groups(self) -> usize {
        match self {
            Reference::Institutional => 2,
            Reference::Ideological => 3,
        }
    }
}

pub fn partition_file(period: &str, r: Reference) -> PathBuf {
    PathBuf::from("partitions").join(format!("{period}_{}.csv", r.name()))
}

/// Reference partitions of a period as written by `infer-groups`.
pub fn load_references(cfg: &LoadedConfig, period: &str) -> Result<[Partition; 2]> {
    let load = |r: Reference| -> Result<Partition> {
        let path = cfg.output_dir().join(partition_file(period, r));
        let file = File::open(&path).map_err(|e| {
            CliError::Runtime(format!("{}: {e}; run `polarscope infer-groups` with this config first", path.display()))
        })?;
        let (p, _) =
            read_partition(BufReader::new(file)).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        Ok(p)
    };
    Ok([load(Reference::Institutional)?, load(Reference::Ideological)?])
}

/// Output sub-directory name for the graph-construction variant.
pub fn variant(cfg: &LoadedConfig) -> String {
    let c = &cfg.config;
    let mut v = format!("{}_{}", c.windows.to_string().replace(':', ""), c.account_filter);
    if c.retweets_with_news {
        v.push_str("_news");
    }
    v
}

pub fn selection_params(cfg: &LoadedConfig) -> SelectionParams {
    let c = &cfg.config;
    SelectionParams { b_max: c.b_max, seed: c.seed, restarts: c.restarts, options: c.inference() }
}

/// Local first and last day of a window.
pub fn window_dates(w: &TimeWindow, tz: Tz) -> (String, String) {
    let start = w.start.with_timezone(&tz).date_naive();
    let last = (w.end - Duration::seconds(1)).with_timezone(&tz).date_naive();
    (start.to_string(), last.to_string())
}

/// One topic in one window with its model selection.
pub struct Weekly {
    pub topic: usize,
    pub window: TimeWindow,
    pub graph: EndorsementGraph,
    pub selection: Selection,
}

/// Weekly graphs and selections of `topics` in `period`, topic-major then by
/// window. Windows run in parallel; the result order does not depend on it.
pub fn weekly(
    inputs: &Inputs,
    cfg: &LoadedConfig,
    cache: &SelectionCache,
    topics: &[usize],
    period: &PeriodConfig,
) -> Result<Vec<Weekly>> {
    let (study, windows) = period_windows(period, cfg, inputs.tz);
    let mut jobs = Vec::new();
    for &t in topics {
        for (w, idx) in inputs.windowed(t, &study, &windows).into_iter().enumerate() {
            jobs.push((t, windows[w].clone(), idx));
        }
    }
    let params = selection_params(cfg);
    jobs.into_par_iter()
        .map(|(topic, window, idx)| {
            let graph = inputs.filtered_graph(&idx, Some(window.clone()), cfg)?;
            let selection = cache.select(&graph, &params)?;
            log::debug!("{} {} {}: B={}", period.name, inputs.topic_id(topic), window.index, selection.chosen_b);
            Ok(Weekly { topic, window, graph, selection })
        })
        .collect()
}

pub fn open_cache(cfg: &LoadedConfig, enabled: bool) -> SelectionCache {
    if enabled {
        SelectionCache::new(cfg.cache_dir())
    } else {
        SelectionCache::disabled()
    }
}
