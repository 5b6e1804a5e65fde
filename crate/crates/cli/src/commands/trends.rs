//! `trends`: weekly AEI per reference group pair, participation and
//! partisan sorting per topic.

use rayon::prelude::*;
use serde_json::json;

use polarscope::graphs::participation;
use polarscope::polarization::{all_pairs_aei, rmi_with};

use super::{load_references, variant, weekly, window_dates, Reference, Weekly};
use crate::cache::SelectionCache;
use crate::config::LoadedConfig;
use crate::data::Inputs;
use crate::error::Result;
use crate::output::{num, run_metadata, OutputDir, Table};

pub const HEADER: [&str; 20] = [
    "period",
    "topic",
    "window_index",
    "window_start",
    "window_end",
    "events",
    "reference",
    "pair",
    "aei",
    "m_in",
    "m_out",
    "active_x",
    "active_y",
    "active_total",
    "nonpartisan_share",
    "chosen_b",
    "evidence_margin",
    "rmi_institutional",
    "rmi_ideological",
    "rmi_approximate",
];

pub fn trends(cfg: &LoadedConfig, inputs: &Inputs, cache: &SelectionCache, out: &mut OutputDir) -> Result<()> {
    let c = &cfg.config;
    let topics = inputs.analysis_topics(cfg)?;
    let mut tables: Vec<Table> = topics.iter().map(|_| Table::new(HEADER)).collect();
    let mut windows_per_period = serde_json::Map::new();
    for period in &c.periods {
        let refs = load_references(cfg, &period.name)?;
        let weeks = weekly(inputs, cfg, cache, &topics, period)?;
        let rows: Vec<Vec<Vec<String>>> =
            weeks.par_iter().map(|w| rows_for(cfg, inputs, &period.name, w, &refs)).collect();
        for (w, rows) in weeks.iter().zip(rows) {
            let slot = topics.iter().position(|&t| t == w.topic).expect("analysis topic");
            for r in rows {
                tables[slot].row(r);
            }
        }
        windows_per_period.insert(period.name.clone(), json!(weeks.len() / topics.len().max(1)));
    }
    let dir = format!("trends/{}", variant(cfg));
    for (&t, table) in topics.iter().zip(tables) {
        out.write(format!("{dir}/{}.csv", inputs.topic_id(t)), &table.into_bytes())?;
    }
    let topic_ids: Vec<&str> = topics.iter().map(|&t| inputs.topic_id(t)).collect();
    let meta = run_metadata(
        "trends",
        cfg,
        json!({ "variant": variant(cfg), "topics": topic_ids, "windows": windows_per_period }),
    )?;
    out.write_json(format!("{dir}/metadata.json"), &meta)
}

fn rows_for(
    cfg: &LoadedConfig,
    inputs: &Inputs,
    period: &str,
    w: &Weekly,
    refs: &[polarscope::groups::Partition; 2],
) -> Vec<Vec<String>> {
    let s = &w.selection;
    let sorting: Vec<Option<polarscope::polarization::Rmi>> = refs
        .iter()
        .map(|r| if s.chosen_b > 1 { rmi_with(&s.chosen, r, None, &cfg.config.omega) } else { None })
        .collect();
    let approximate = sorting.iter().flatten().any(|r| r.approximate);
    let (start, end) = window_dates(&w.window, inputs.tz);
    let mut rows = Vec::new();
    for (r, reference) in Reference::ALL.iter().zip(refs) {
        let part = participation(&w.graph, reference);
        for pair in all_pairs_aei(&w.graph, reference) {
            rows.push(vec![
                period.to_owned(),
                inputs.topic_id(w.topic).to_owned(),
                w.window.index.to_string(),
                start.clone(),
                end.clone(),
                w.graph.event_count().to_string(),
                r.name().to_owned(),
                pair.pair_name(),
                num(pair.aei),
                pair.m_in.to_string(),
                pair.m_out.to_string(),
                pair.n_x.to_string(),
                pair.n_y.to_string(),
                part.active_total.to_string(),
                part.nonpartisan_share.to_string(),
                s.chosen_b.to_string(),
                s.evidence_margin.to_string(),
                num(sorting[0].map(|x| x.value)),
                num(sorting[1].map(|x| x.value)),
                approximate.to_string(),
            ]);
        }
    }
    rows
}
