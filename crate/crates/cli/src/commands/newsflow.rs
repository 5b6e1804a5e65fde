//! `newsflow`: outlet tables, most viral articles and per-group sentiment
//! breakdowns from tweets sharing news links.

use serde_json::{json, Value};

use polarscope::graphs::{build_user_news_graph, UserNewsGraph};
use polarscope::groups::{Partition, NONPARTISAN};
use polarscope::ingest::{mentions_any, InteractionEvent};
use polarscope::newsflow::{
    group_sentiment_breakdown, negativity_share, node_centrality, outlet_table, top_viral_news, virality_of_counts,
    OutletCounting,
};

use super::load_references;
use crate::config::LoadedConfig;
use crate::data::Inputs;
use crate::error::Result;
use crate::output::{num, run_metadata, slug, OutputDir, Table};

pub const SUBSET_ALL: &str = "all";
pub const SUBSET_JOURNALISM: &str = "journalism";

pub fn viral_file(period: &str, topic: &str, subset: &str) -> String {
    format!("newsflow/viral/{period}_{topic}_{subset}.csv")
}

pub fn breakdown_file(period: &str, topic: &str, subset: &str) -> String {
    format!("newsflow/breakdown/{period}_{topic}_{subset}.json")
}

pub fn newsflow(cfg: &LoadedConfig, inputs: &Inputs, out: &mut OutputDir) -> Result<()> {
    let c = &cfg.config;
    let topics = inputs.analysis_topics(cfg)?;
    let count_col = match c.outlet_counting {
        OutletCounting::UniqueArticles => "unique_articles",
        OutletCounting::Shares => "shares",
    };
    let mut outlets = Table::new(["period", "topic", "subset", "group", "outlet", count_col, "rank"]);
    let mut summary = Vec::new();
    for period in &c.periods {
        let [_, ideological] = load_references(cfg, &period.name)?;
        let study = period.study_period();
        for &t in &topics {
            let topic = inputs.topic_id(t);
            let mut subsets: Vec<(&str, Vec<&InteractionEvent>)> =
                vec![(SUBSET_ALL, inputs.in_period(t, &study).collect())];
            if let Some(kw) = &inputs.journalism {
                let picked = subsets[0].1.iter().copied().filter(|e| mentions_any(e, kw)).collect();
                subsets.push((SUBSET_JOURNALISM, picked));
            }
            for (subset, events) in subsets {
                let (graph, report) = build_user_news_graph(events, virality_of_counts, &c.url_policy);
                for row in outlet_table(&graph, &ideological, c.outlet_counting, Some(c.outlets_top_n)) {
                    outlets.row([
                        period.name.clone(),
                        topic.to_owned(),
                        subset.to_owned(),
                        row.group,
                        row.outlet,
                        row.count.to_string(),
                        row.rank.to_string(),
                    ]);
                }
                let (viral, breakdown) = viral_tables(&graph, &ideological, c.viral_top_k)?;
                out.write(viral_file(&period.name, topic, subset), &viral)?;
                let doc = json!({
                    "period": period.name,
                    "topic": topic,
                    "subset": subset,
                    "contributing_tweets": report.contributing_tweets,
                    "rejected_urls": report.rejected_urls,
                    "missing_sentiment": report.missing_sentiment,
                    "users": graph.users().len(),
                    "articles": breakdown,
                });
                out.write_json(breakdown_file(&period.name, topic, subset), &doc)?;
                summary.push(json!({
                    "period": period.name,
                    "topic": topic,
                    "subset": subset,
                    "contributing_tweets": report.contributing_tweets,
                    "articles": graph.articles().len(),
                }));
            }
        }
    }
    out.write("newsflow/outlets.csv", &outlets.into_bytes())?;
    let meta = run_metadata("newsflow", cfg, json!({ "outlet_counting": count_col, "tables": summary }))?;
    out.write_json("newsflow/metadata.json", &meta)
}

/// Top-k article table (CSV bytes) and the matching breakdown documents.
pub fn viral_tables(graph: &UserNewsGraph, partition: &Partition, k: usize) -> Result<(Vec<u8>, Vec<Value>)> {
    let mut labels: Vec<String> = (0..partition.num_groups()).map(|g| partition.label(g)).collect();
    labels.push(NONPARTISAN.to_owned());
    let mut header: Vec<String> = ["rank", "article_key", "outlet", "centrality"].map(String::from).to_vec();
    for l in &labels {
        let s = slug(l);
        for suffix in ["tweets", "pos", "neg", "virality", "negativity_share"] {
            header.push(format!("{s}_{suffix}"));
        }
    }
    let mut table = Table::new(&header);
    let mut docs = Vec::new();
    let centrality = node_centrality(graph);
    for (i, (key, c)) in top_viral_news(graph, k)?.into_iter().enumerate() {
        let b = group_sentiment_breakdown(graph, partition, &key)?;
        let outlet = graph.article(&key).expect("ranked article exists").outlet.clone();
        debug_assert_eq!(centrality.article(&key), c);
        let mut row = vec![(i + 1).to_string(), key.clone(), outlet.clone(), c.to_string()];
        let mut groups = Vec::new();
        for (label, g) in &b.groups {
            let share = negativity_share(&b, label);
            row.extend([
                g.tweet_count.to_string(),
                g.pos_count.to_string(),
                g.neg_count.to_string(),
                g.virality_total.to_string(),
                num(share),
            ]);
            groups.push(json!({
                "group": label,
                "tweets": g.tweet_count,
                "pos": g.pos_count,
                "neg": g.neg_count,
                "neutral": g.neutral_count,
                "virality": g.virality_total,
                "virality_pos": g.virality_pos,
                "virality_neg": g.virality_neg,
                "virality_neutral": g.virality_neutral,
                "negativity_share": share,
            }));
        }
        table.row(&row);
        docs.push(json!({ "rank": i + 1, "article_key": key, "outlet": outlet, "centrality": c, "groups": groups }));
    }
    Ok((table.into_bytes(), docs))
}
