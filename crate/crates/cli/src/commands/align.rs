//! `align`: RMI between weekly partitions of every analysis topic, per period.

use serde_json::json;

use polarscope::polarization::{alignment_matrix, AlignmentEntry};

use super::{variant, weekly};
use crate::cache::SelectionCache;
use crate::config::LoadedConfig;
use crate::data::{window_label, Inputs};
use crate::error::Result;
use crate::output::{num, run_metadata, OutputDir, Table};

pub const HEADER: [&str; 8] = ["topic_a", "week_a", "topic_b", "week_b", "rmi", "defined", "overlap_n", "approximate"];

pub fn align(cfg: &LoadedConfig, inputs: &Inputs, cache: &SelectionCache, out: &mut OutputDir) -> Result<()> {
    let c = &cfg.config;
    let topics = inputs.analysis_topics(cfg)?;
    let dir = format!("alignment/{}", variant(cfg));
    let mut summary = serde_json::Map::new();
    for period in &c.periods {
        let entries: Vec<AlignmentEntry> = weekly(inputs, cfg, cache, &topics, period)?
            .into_iter()
            .map(|w| AlignmentEntry {
                topic: inputs.topic_id(w.topic).to_owned(),
                week: window_label(&w.window, inputs.tz),
                chosen_b: w.selection.chosen_b,
                partition: w.selection.chosen,
            })
            .collect();
        let cells = alignment_matrix(&entries, c.min_overlap, &c.omega);
        let mut table = Table::new(HEADER);
        let mut defined = 0usize;
        for cell in &cells {
            defined += usize::from(cell.value.is_some());
            table.row([
                cell.topic_a.clone(),
                cell.week_a.clone(),
                cell.topic_b.clone(),
                cell.week_b.clone(),
                num(cell.value),
                cell.value.is_some().to_string(),
                cell.overlap.to_string(),
                cell.approximate.to_string(),
            ]);
        }
        out.write(format!("{dir}/{}.csv", period.name), &table.into_bytes())?;
        summary.insert(period.name.clone(), json!({ "entries": entries.len(), "defined_cells": defined }));
    }
    let meta = run_metadata("align", cfg, json!({ "variant": variant(cfg), "periods": summary }))?;
    out.write_json(format!("{dir}/metadata.json"), &meta)
}
