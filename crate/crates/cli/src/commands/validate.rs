//! `validate`: every check that needs no inference.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use polarscope::ingest::{load_topic_config, EventFormat, EventParser};

use crate::config::LoadedConfig;
use crate::data::{read_keywords, read_seeds};

/// Line-level parse errors reported per file before summarizing.
const MAX_LINE_FINDINGS: usize = 20;

#[derive(Debug, Default)]
pub struct Report {
    pub findings: Vec<String>,
    pub events: usize,
    pub topics: Vec<String>,
    pub seeds: usize,
}

pub fn validate(cfg: &LoadedConfig) -> Report {
    let c = &cfg.config;
    let mut r = Report { findings: c.check(), ..Report::default() };

    for (key, path) in cfg.referenced_paths() {
        if !path.is_file() {
            r.findings.push(format!("{key}: {} does not exist or is not a file", path.display()));
        }
    }

    let mut parser = EventParser::new();
    let mut sink = Vec::new();
    for p in &c.inputs {
        let path = cfg.resolve(p);
        let Ok(file) = File::open(&path) else { continue };
        let before = parser.report().errors.len();
        if let Err(e) =
            parser.parse_into(BufReader::with_capacity(1 << 20, file), EventFormat::from_path(&path), &mut sink)
        {
            r.findings.push(format!("{}: {e}", path.display()));
            continue;
        }
        r.events = sink.len();
        let errors = &parser.report().errors[before..];
        for e in errors.iter().take(MAX_LINE_FINDINGS) {
            r.findings.push(format!("{}:{}: {}", path.display(), e.line, e.reason));
        }
        if errors.len() > MAX_LINE_FINDINGS {
            r.findings.push(format!("{}: {} more rejected lines", path.display(), errors.len() - MAX_LINE_FINDINGS));
        }
    }
    if c.retweets_with_news && sink.iter().any(|e| e.is_retweet() && e.retweeted_urls.is_none()) {
        r.findings.push(
            "retweets_with_news: some retweets lack `retweeted_urls` (a `retweeted_urls` CSV column or JSON field)"
                .into(),
        );
    }
    drop(sink);

    for p in &c.topics {
        let path = cfg.resolve(p);
        if !path.is_file() {
            continue;
        }
        match load_topic_config(&path) {
            Ok(ts) => {
                for t in ts {
                    if r.topics.iter().any(|o| o == t.topic_id()) {
                        r.findings.push(format!("{}: topic `{}` defined twice", path.display(), t.topic_id()));
                    } else {
                        r.topics.push(t.topic_id().to_owned());
                    }
                }
            }
            Err(e) => r.findings.push(e.to_string()),
        }
    }
    let topics_ok = c.topics.iter().all(|p| cfg.resolve(p).is_file());
    if topics_ok && !r.topics.contains(&c.parties_topic) {
        r.findings.push(format!("parties_topic: `{}` is not defined in any topic config", c.parties_topic));
    }
    if let (true, Some(ids)) = (topics_ok, &c.analysis_topics) {
        for id in ids {
            if !r.topics.contains(id) {
                r.findings.push(format!("analysis_topics: `{id}` is not defined in any topic config"));
            }
        }
    }

    check_file(&cfg.resolve(&c.seeds), &mut r.findings, |p| {
        let seeds = read_seeds(p)?;
        r.seeds = seeds.len();
        if seeds.is_empty() {
            return Err(crate::error::CliError::validation("no seed accounts"));
        }
        Ok(())
    });
    if let Some(j) = &c.journalism_keywords {
        check_file(&cfg.resolve(j), &mut r.findings, |p| {
            if read_keywords(p)?.is_empty() {
                return Err(crate::error::CliError::validation("no keywords"));
            }
            Ok(())
        });
    }
    r
}

fn check_file<F>(path: &Path, findings: &mut Vec<String>, f: F)
where
    F: FnOnce(&Path) -> crate::error::Result<()>,
{
    if !path.is_file() {
        return;
    }
    if let Err(e) = f(path) {
        findings.push(format!("{}: {e}", path.display()));
    }
}
