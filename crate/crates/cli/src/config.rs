//! Run configuration: one TOML document, paths relative to its directory.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize};

use polarscope::graphs::{AccountFilter, UrlPolicy};
use polarscope::groups::{Bloc, InferenceOptions, Objective};
use polarscope::ingest::{StudyPeriod, WindowScheme};
use polarscope::newsflow::OutletCounting;
use polarscope::polarization::{OmegaConfig, DEFAULT_MIN_OVERLAP};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodConfig {
    pub name: String,
    #[serde(deserialize_with = "date")]
    pub start: NaiveDate,
    /// Inclusive.
    #[serde(deserialize_with = "date")]
    pub end: NaiveDate,
    #[serde(default)]
    pub government_parties: BTreeSet<String>,
}

impl PeriodConfig {
    pub fn study_period(&self) -> StudyPeriod {
        StudyPeriod { name: self.name.clone(), start: self.start, end: self.end }
    }
}

/// Accepts a TOML date as well as a quoted `YYYY-MM-DD` string.
fn date<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<NaiveDate, D::Error> {
    let raw = match toml::Value::deserialize(d)? {
        toml::Value::String(s) => s,
        toml::Value::Datetime(dt) => dt.to_string(),
        other => return Err(serde::de::Error::custom(format!("expected a date, got {other}"))),
    };
    NaiveDate::parse_from_str(&raw, "%Y-%m-%d").map_err(|e| serde::de::Error::custom(format!("date `{raw}`: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Event files (`.csv`, anything else is read as JSON lines).
    pub inputs: Vec<PathBuf>,
    /// Topic config files; topic ids must be unique across them.
    pub topics: Vec<PathBuf>,
    #[serde(default = "default_parties_topic")]
    pub parties_topic: String,
    /// Topics to analyze; all but the parties topic when absent.
    #[serde(default)]
    pub analysis_topics: Option<Vec<String>>,
    pub seeds: PathBuf,
    #[serde(default)]
    pub journalism_keywords: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// Weekly model selections; defaults to `<output_dir>/cache`.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    pub periods: Vec<PeriodConfig>,
    #[serde(default = "default_windows")]
    pub windows: WindowScheme,
    #[serde(default = "default_timezone")]
    pub timezone: String,
    #[serde(default)]
    pub account_filter: AccountFilter,
    #[serde(default)]
    pub retweets_with_news: bool,
    #[serde(default = "default_true")]
    pub match_retweeted_text: bool,
    #[serde(default = "default_b_max")]
    pub b_max: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_min_overlap")]
    pub min_overlap: usize,
    #[serde(default)]
    pub objective: Objective,
    #[serde(default)]
    pub binarize: bool,
    #[serde(default)]
    pub outlet_counting: OutletCounting,
    #[serde(default = "default_outlets_top_n")]
    pub outlets_top_n: usize,
    #[serde(default = "default_viral_top_k")]
    pub viral_top_k: usize,
    /// Party -> bloc overrides for the seed file.
    #[serde(default)]
    pub bloc_map: BTreeMap<String, Bloc>,
    #[serde(default)]
    pub url_policy: UrlPolicy,
    #[serde(default)]
    pub omega: OmegaConfig,
}

fn default_parties_topic() -> String {
    "parties".into()
}
fn default_windows() -> WindowScheme {
    WindowScheme::Weekly
}
fn default_timezone() -> String {
    "Europe/Helsinki".into()
}
fn default_true() -> bool {
    true
}
fn default_b_max() -> usize {
    3
}
fn default_restarts() -> usize {
    3
}
fn default_min_overlap() -> usize {
    DEFAULT_MIN_OVERLAP
}
fn default_outlets_top_n() -> usize {
    5
}
fn default_viral_top_k() -> usize {
    50
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub account_filter: Option<AccountFilter>,
    pub retweets_with_news: bool,
    pub windows: Option<WindowScheme>,
}

/// A parsed config plus the directory its relative paths hang off.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| CliError::validation(format!("config: {e}")))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(f) = o.account_filter {
            self.account_filter = f;
        }
        if o.retweets_with_news {
            self.retweets_with_news = true;
        }
        if let Some(w) = o.windows {
            self.windows = w;
        }
    }

    pub fn inference(&self) -> InferenceOptions {
        InferenceOptions { objective: self.objective, binarize: self.binarize }
    }

    /// Findings that need no file access.
    pub fn check(&self) -> Vec<String> {
        let mut findings = Vec::new();
        if self.inputs.is_empty() {
            findings.push("config: `inputs` lists no event files".into());
        }
        if self.topics.is_empty() {
            findings.push("config: `topics` lists no topic config files".into());
        }
        if self.periods.is_empty() {
            findings.push("config: no `[[periods]]`".into());
        }
        let mut names = BTreeSet::new();
        for p in &self.periods {
            if !names.insert(p.name.as_str()) {
                findings.push(format!("config: period `{}` defined twice", p.name));
            }
            if p.name.is_empty() || !p.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                findings.push(format!("config: period name `{}` must be non-empty [A-Za-z0-9_-]", p.name));
            }
        }
        let periods: Vec<StudyPeriod> = self.periods.iter().map(PeriodConfig::study_period).collect();
        if let Err(e) = polarscope::ingest::validate_periods(&periods) {
            findings.push(format!("config: {e}"));
        }
        if let Err(e) = polarscope::ingest::parse_timezone(&self.timezone) {
            findings.push(format!("config: {e}"));
        }
        if self.b_max == 0 {
            findings.push("config: `b_max` must be at least 1".into());
        }
        if self.restarts == 0 {
            findings.push("config: `restarts` must be at least 1".into());
        }
        if self.viral_top_k == 0 {
            findings.push("config: `viral_top_k` must be at least 1".into());
        }
        if self.outlets_top_n == 0 {
            findings.push("config: `outlets_top_n` must be at least 1".into());
        }
        findings
    }
}

impl LoadedConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config =
            RunConfig::parse(&src).map_err(|e| CliError::validation(format!("{}: {}", path.display(), e)))?;
        config.apply(overrides);
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, base_dir })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.config.output_dir)
    }

    pub fn cache_dir(&self) -> PathBuf {
        match &self.config.cache_dir {
            Some(d) => self.resolve(d),
            None => self.output_dir().join("cache"),
        }
    }

    /// Every path the config references, with the key naming it.
    pub fn referenced_paths(&self) -> Vec<(String, PathBuf)> {
        let c = &self.config;
        let mut out: Vec<(String, PathBuf)> = Vec::new();
        out.extend(c.inputs.iter().map(|p| ("inputs".to_owned(), self.resolve(p))));
        out.extend(c.topics.iter().map(|p| ("topics".to_owned(), self.resolve(p))));
        out.push(("seeds".into(), self.resolve(&c.seeds)));
        if let Some(j) = &c.journalism_keywords {
            out.push(("journalism_keywords".into(), self.resolve(j)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
inputs = ["events.csv"]
topics = ["topics.toml"]
seeds = "seeds.csv"
output_dir = "out"

[[periods]]
name = "first"
start = 2018-01-01
end = "2018-03-31"
government_parties = ["kesk", "kok"]
"#;

    #[test]
    fn defaults_are_filled_in() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.b_max, 3);
        assert_eq!(c.min_overlap, 20);
        assert_eq!(c.viral_top_k, 50);
        assert_eq!(c.outlets_top_n, 5);
        assert_eq!(c.windows, WindowScheme::Weekly);
        assert_eq!(c.timezone, "Europe/Helsinki");
        assert_eq!(c.parties_topic, "parties");
        assert_eq!(c.periods[0].start, NaiveDate::from_ymd_opt(2018, 1, 1).unwrap());
        assert_eq!(c.periods[0].end, NaiveDate::from_ymd_opt(2018, 3, 31).unwrap());
        assert!(c.check().is_empty());
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::parse(MINIMAL).unwrap();
        c.apply(&Overrides {
            seed: Some(9),
            account_filter: Some(AccountFilter::ExcludeCandidates),
            retweets_with_news: true,
            windows: Some(WindowScheme::Bimonthly),
        });
        assert_eq!((c.seed, c.account_filter, c.retweets_with_news), (9, AccountFilter::ExcludeCandidates, true));
        assert_eq!(c.windows, WindowScheme::Bimonthly);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(RunConfig::parse(&format!("{MINIMAL}\nbogus = 1")).is_err());
        let bad = MINIMAL.replace("inputs = [\"events.csv\"]", "inputs = []\nb_max = 0\ntimezone = \"Mars/Base\"");
        let c = RunConfig::parse(&bad).unwrap();
        let findings = c.check();
        assert_eq!(findings.len(), 3, "{findings:?}");
    }

    #[test]
    fn overlapping_periods_are_a_finding() {
        let two = format!("{MINIMAL}\n[[periods]]\nname = \"second\"\nstart = 2018-03-01\nend = 2018-04-30\n");
        let c = RunConfig::parse(&two).unwrap();
        assert_eq!(c.check().len(), 1);
    }

    #[test]
    fn relative_paths_follow_the_config() {
        let loaded = LoadedConfig { config: RunConfig::parse(MINIMAL).unwrap(), base_dir: PathBuf::from("/data/run") };
        assert_eq!(loaded.output_dir(), PathBuf::from("/data/run/out"));
        assert_eq!(loaded.cache_dir(), PathBuf::from("/data/run/out/cache"));
        assert_eq!(loaded.referenced_paths().len(), 3);
    }
}
