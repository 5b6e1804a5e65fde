//! Loading inputs and slicing events by topic, period and window without
//! copying them.

use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use chrono_tz::Tz;
use rayon::prelude::*;

use polarscope::graphs::{build_endorsement_graph, is_news_retweet, EndorsementGraph};
use polarscope::groups::{parse_seeds, SeedAccount};
use polarscope::ingest::{
    load_topic_config, parse_keyword_list, parse_timezone, window_of, windows_for, EventFormat, EventParser,
    InteractionEvent, ParseReport, StudyPeriod, TimeWindow, TopicConfig, TopicMatcher,
};

use crate::config::{LoadedConfig, PeriodConfig};
use crate::error::{CliError, Result};

/// Parse reports keyed by file.
pub type FileReports = Vec<(String, ParseReport)>;

pub fn read_events(paths: &[std::path::PathBuf]) -> Result<(Vec<InteractionEvent>, FileReports)> {
    let mut events = Vec::new();
    let mut reports = Vec::new();
    // one parser across files, so duplicate ids between files are caught
    let mut parser = EventParser::new();
    for path in paths {
        let before = parser_counts(&parser);
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        parser.parse_into(BufReader::with_capacity(1 << 20, file), EventFormat::from_path(path), &mut events)?;
        reports.push((path.display().to_string(), diff(&parser, before)));
    }
    Ok((events, reports))
}

fn parser_counts(p: &EventParser) -> (usize, usize, usize) {
    let r = p.report();
    (r.parsed, r.rejected, r.errors.len())
}

fn diff(p: &EventParser, before: (usize, usize, usize)) -> ParseReport {
    let r = p.report();
    ParseReport { parsed: r.parsed - before.0, rejected: r.rejected - before.1, errors: r.errors[before.2..].to_vec() }
}

pub fn read_topics(paths: &[std::path::PathBuf]) -> Result<Vec<TopicConfig>> {
    let mut all: Vec<TopicConfig> = Vec::new();
    for path in paths {
        let loaded = load_topic_config(path).map_err(|e| match e {
            polarscope::Error::Io(io) => CliError::io(path, io),
            other => other.into(),
        })?;
        for t in loaded {
            if all.iter().any(|o| o.topic_id() == t.topic_id()) {
                return Err(CliError::validation(format!(
                    "{}: topic `{}` is already defined in another topic config",
                    path.display(),
                    t.topic_id()
                )));
            }
            all.push(t);
        }
    }
    Ok(all)
}

pub fn read_seeds(path: &Path) -> Result<Vec<SeedAccount>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(parse_seeds(BufReader::new(file))?)
}

pub fn read_keywords(path: &Path) -> Result<Vec<String>> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(parse_keyword_list(&src))
}

/// Everything a pipeline command reads, loaded once.
pub struct Inputs {
    pub events: Vec<InteractionEvent>,
    pub topics: Vec<TopicConfig>,
    /// Event indices per topic, ascending, aligned with `topics`.
    pub topic_events: Vec<Vec<u32>>,
    pub seeds: Vec<SeedAccount>,
    pub seed_ids: HashSet<String>,
    pub journalism: Option<Vec<String>>,
    pub tz: Tz,
}

impl Inputs {
    pub fn load(cfg: &LoadedConfig) -> Result<Self> {
        let c = &cfg.config;
        let inputs: Vec<_> = c.inputs.iter().map(|p| cfg.resolve(p)).collect();
        let (events, reports) = read_events(&inputs)?;
        for (path, r) in &reports {
            if r.rejected > 0 {
                log::warn!("{path}: {} records rejected (run `validate` for details)", r.rejected);
            }
        }
        if events.len() > u32::MAX as usize {
            return Err(CliError::Runtime("more than 2^32 events".into()));
        }
        let topics = read_topics(&c.topics.iter().map(|p| cfg.resolve(p)).collect::<Vec<_>>())?;
        let matcher = TopicMatcher::new(&topics).with_retweeted_text(c.match_retweeted_text);
        let masks: Vec<Vec<bool>> = events.par_iter().map(|e| matcher.event_mask(e)).collect();
        let mut topic_events = vec![Vec::new(); topics.len()];
        for (i, mask) in masks.iter().enumerate() {
            for (t, &hit) in mask.iter().enumerate() {
                if hit {
                    topic_events[t].push(i as u32);
                }
            }
        }
        let seeds = read_seeds(&cfg.resolve(&c.seeds))?;
        let seed_ids = seeds.iter().map(|s| s.author_id.clone()).collect();
        let journalism = c.journalism_keywords.as_ref().map(|p| read_keywords(&cfg.resolve(p))).transpose()?;
        let tz = parse_timezone(&c.timezone)?;
        Ok(Self { events, topics, topic_events, seeds, seed_ids, journalism, tz })
    }

    pub fn topic_index(&self, id: &str) -> Result<usize> {
        self.topics
            .iter()
            .position(|t| t.topic_id() == id)
            .ok_or_else(|| CliError::validation(format!("topic `{id}` is not defined in any topic config")))
    }

    /// Topics to analyze, in config order.
    pub fn analysis_topics(&self, cfg: &LoadedConfig) -> Result<Vec<usize>> {
        match &cfg.config.analysis_topics {
            Some(ids) => ids.iter().map(|id| self.topic_index(id)).collect(),
            None => {
                Ok((0..self.topics.len()).filter(|&i| self.topics[i].topic_id() != cfg.config.parties_topic).collect())
            }
        }
    }

    pub fn topic_id(&self, t: usize) -> &str {
        self.topics[t].topic_id()
    }

    /// Events of topic `t` whose local date falls in `period`.
    pub fn in_period<'a>(
        &'a self,
        t: usize,
        period: &'a StudyPeriod,
    ) -> impl Iterator<Item = &'a InteractionEvent> + 'a {
        self.topic_events[t]
            .iter()
            .map(|&i| &self.events[i as usize])
            .filter(move |e| period.contains_date(e.created_at.with_timezone(&self.tz).date_naive()))
    }

    /// Event indices of topic `t` per window of `period`.
    pub fn windowed(&self, t: usize, period: &StudyPeriod, windows: &[TimeWindow]) -> Vec<Vec<u32>> {
        let mut buckets = vec![Vec::new(); windows.len()];
        for &i in &self.topic_events[t] {
            if let Some(w) = window_of(windows, period, self.tz, self.events[i as usize].created_at) {
                buckets[w].push(i);
            }
        }
        buckets
    }

    /// Endorsement graph of the given events after the account and
    /// retweets-with-news filters.
    pub fn filtered_graph(
        &self,
        idx: &[u32],
        window: Option<TimeWindow>,
        cfg: &LoadedConfig,
    ) -> Result<EndorsementGraph> {
        let c = &cfg.config;
        let mut kept = Vec::with_capacity(idx.len());
        for &i in idx {
            let e = &self.events[i as usize];
            if !e.is_retweet() || !c.account_filter.admits(&e.author_id, &self.seed_ids) {
                continue;
            }
            if c.retweets_with_news && !is_news_retweet(e, &c.url_policy)? {
                continue;
            }
            kept.push(e);
        }
        Ok(build_endorsement_graph(kept, window))
    }
}

pub fn period_windows(period: &PeriodConfig, cfg: &LoadedConfig, tz: Tz) -> (StudyPeriod, Vec<TimeWindow>) {
    let p = period.study_period();
    let w = windows_for(&p, cfg.config.windows, tz);
    (p, w)
}

/// Local start date of a window, used as its label.
pub fn window_label(w: &TimeWindow, tz: Tz) -> String {
    w.start.with_timezone(&tz).date_naive().to_string()
}
