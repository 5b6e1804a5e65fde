use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use aho_corasick::AhoCorasick;
use serde::Deserialize;

use super::casefold;
use super::event::InteractionEvent;
use crate::error::{Error, Result};

/// A topic and its substring keywords, stored case-folded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicConfig {
    topic_id: String,
    keywords: Vec<String>,
}

impl TopicConfig {
    pub fn new<I, S>(topic_id: impl Into<String>, keywords: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let topic_id = topic_id.into();
        if topic_id.is_empty() {
            return Err(Error::Config("empty topic id".into()));
        }
        let keywords: Vec<String> = keywords.into_iter().map(|k| casefold(k.as_ref())).collect();
        if keywords.is_empty() {
            return Err(Error::Config(format!("topic `{topic_id}` has no keywords")));
        }
        if keywords.iter().any(String::is_empty) {
            return Err(Error::Config(format!("topic `{topic_id}` has an empty keyword")));
        }
        Ok(Self { topic_id, keywords })
    }

    pub fn topic_id(&self) -> &str {
        &self.topic_id
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }
}

#[derive(Debug, Deserialize)]
struct TopicFile {
    topics: BTreeMap<String, Vec<String>>,
}

/// Parses a topic config document:
///
/// ```toml
/// [topics]
/// coronavirus = ["korona", "covid"]
/// ```
pub fn parse_topic_config(src: &str) -> Result<Vec<TopicConfig>> {
    let file: TopicFile = toml::from_str(src).map_err(|e| Error::Config(format!("topic config: {e}")))?;
    if file.topics.is_empty() {
        return Err(Error::Config("topic config defines no topics".into()));
    }
    file.topics.into_iter().map(|(id, kws)| TopicConfig::new(id, kws)).collect()
}

pub fn load_topic_config(path: &Path) -> Result<Vec<TopicConfig>> {
    let src = std::fs::read_to_string(path)?;
    parse_topic_config(&src).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Reference implementation: a topic matches iff one of its keywords is a
/// substring of the case-folded text.
pub fn match_topics(text: &str, configs: &[TopicConfig]) -> BTreeSet<String> {
    let folded = casefold(text);
    configs
        .iter()
        .filter(|c| c.keywords.iter().any(|k| folded.contains(k.as_str())))
        .map(|c| c.topic_id.clone())
        .collect()
}

/// All keywords of all topics compiled into one automaton.
#[derive(Debug, Clone)]
pub struct TopicMatcher {
    topics: Vec<String>,
    pattern_topic: Vec<usize>,
    automaton: AhoCorasick,
    match_retweeted_text: bool,
}

impl TopicMatcher {
    pub fn new(configs: &[TopicConfig]) -> Self {
        let mut patterns = Vec::new();
        let mut pattern_topic = Vec::new();
        for (i, c) in configs.iter().enumerate() {
            for k in &c.keywords {
                patterns.push(k.as_str());
                pattern_topic.push(i);
            }
        }
        let automaton = AhoCorasick::new(&patterns).expect("keyword automaton");
        Self {
            topics: configs.iter().map(|c| c.topic_id.clone()).collect(),
            pattern_topic,
            automaton,
            match_retweeted_text: true,
        }
    }

    /// Whether retweets also match on `retweeted_text` when it is supplied.
    pub fn with_retweeted_text(mut self, enabled: bool) -> Self {
        self.match_retweeted_text = enabled;
        self
    }

    pub fn topics(&self) -> &[String] {
        &self.topics
    }

    /// Indices into [`Self::topics`] of every topic matching `text`.
    fn mark(&self, text: &str, hit: &mut [bool]) {
        let folded = casefold(text);
        for m in self.automaton.find_overlapping_iter(&folded) {
            hit[self.pattern_topic[m.pattern().as_usize()]] = true;
        }
    }

    pub fn match_text(&self, text: &str) -> BTreeSet<String> {
        let mut hit = vec![false; self.topics.len()];
        self.mark(text, &mut hit);
        self.collect(&hit)
    }

    pub fn match_event(&self, event: &InteractionEvent) -> BTreeSet<String> {
        self.collect(&self.event_mask(event))
    }

    /// One flag per entry of [`Self::topics`].
    pub fn event_mask(&self, event: &InteractionEvent) -> Vec<bool> {
        let mut hit = vec![false; self.topics.len()];
        self.mark(&event.text, &mut hit);
        if self.match_retweeted_text && event.is_retweet() {
            if let Some(rt) = &event.retweeted_text {
                self.mark(rt, &mut hit);
            }
        }
        hit
    }

    pub fn event_has_topic(&self, event: &InteractionEvent, topic: &str) -> bool {
        self.match_event(event).contains(topic)
    }

    fn collect(&self, hit: &[bool]) -> BTreeSet<String> {
        hit.iter().zip(&self.topics).filter(|(h, _)| **h).map(|(_, t)| t.clone()).collect()
    }
}

/// `true` when the event text contains any of the (casefolded) keywords.
pub fn mentions_any(event: &InteractionEvent, folded_keywords: &[String]) -> bool {
    let folded = casefold(&event.text);
    folded_keywords.iter().any(|k| !k.is_empty() && folded.contains(k.as_str()))
}

/// Splits events into (subject matter, journalism targeting) by keyword.
pub fn split_journalism(
    events: &[InteractionEvent],
    journalism_keywords: &[String],
) -> (Vec<InteractionEvent>, Vec<InteractionEvent>) {
    let keywords: Vec<String> = journalism_keywords.iter().map(|k| casefold(k)).collect();
    events.iter().cloned().partition(|ev| !mentions_any(ev, &keywords))
}

/// Reads a keyword list: one keyword per line, `#` starts a comment.
pub fn parse_keyword_list(src: &str) -> Vec<String> {
    src.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()).map(casefold).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> Vec<TopicConfig> {
        vec![
            TopicConfig::new("coronavirus", ["korona", "covid"]).unwrap(),
            TopicConfig::new("security", ["nato", "krim"]).unwrap(),
            TopicConfig::new("climate", ["hiilinielu"]).unwrap(),
        ]
    }

    #[test]
    fn config_rejects_empty_keywords() {
        assert!(TopicConfig::new("x", Vec::<String>::new()).is_err());
        assert!(TopicConfig::new("x", ["ok", ""]).is_err());
        assert_eq!(TopicConfig::new("x", ["NATO"]).unwrap().keywords(), ["nato"]);
    }

    #[test]
    fn parse_config_document() {
        let c = parse_topic_config("[topics]\nb = [\"Y\"]\na = [\"x\"]\n").unwrap();
        assert_eq!(c[0].topic_id(), "a");
        assert_eq!(c[1].keywords(), ["y"]);
        assert!(parse_topic_config("[topics]\na = \"x\"").is_err());
        assert!(parse_topic_config("[topics]\na = []").is_err());
    }

    #[test]
    fn substring_semantics() {
        assert_eq!(match_topics("Koronarajoitukset", &cfg()), BTreeSet::from(["coronavirus".to_string()]));
        assert!(match_topics("", &cfg()).is_empty());
        // "krim" inside an unrelated word still matches
        assert!(match_topics("kriminaali", &cfg()).contains("security"));
    }

    #[test]
    fn journalism_split() {
        let mk = |id: &str, text: &str| InteractionEvent {
            id: id.into(),
            created_at: chrono::DateTime::UNIX_EPOCH,
            author_id: "a".into(),
            text: text.into(),
            kind: crate::ingest::EventKind::Original,
            retweeted_author_id: None,
            retweeted_status_id: None,
            urls: vec![],
            like_count: 0,
            retweet_count: 0,
            reply_count: 0,
            sentiment: None,
            retweeted_text: None,
            retweeted_urls: None,
        };
        let events = vec![mk("1", "Huono Toimittaja taas"), mk("2", "hyvä uutinen"), mk("3", "journalismia")];
        let kws = vec!["toimittaja".to_string(), "journalis".to_string()];
        let (subject, journalism) = split_journalism(&events, &kws);
        assert_eq!(subject.iter().map(|e| e.id.as_str()).collect::<Vec<_>>(), ["2"]);
        assert_eq!(journalism.iter().map(|e| e.id.as_str()).collect::<Vec<_>>(), ["1", "3"]);

        let (subject, journalism) = split_journalism(&events, &[]);
        assert_eq!(subject.len(), 3);
        assert!(journalism.is_empty());

        let (s, j) = split_journalism(&[], &kws);
        assert!(s.is_empty() && j.is_empty());
    }

    #[test]
    fn keyword_list_file() {
        let k = parse_keyword_list("# header\nToimittaja\n\n journalis # trailing\n");
        assert_eq!(k, ["toimittaja", "journalis"]);
    }

    proptest! {
        #[test]
        fn automaton_agrees_with_reference(text in "[a-zA-ZäöÄÖ -]{0,40}") {
            let configs = cfg();
            let m = TopicMatcher::new(&configs);
            prop_assert_eq!(m.match_text(&text), match_topics(&text, &configs));
        }

        #[test]
        fn matching_ignores_case(text in "[a-zA-ZäöÄÖ ]{0,30}") {
            let configs = cfg();
            prop_assert_eq!(match_topics(&text, &configs), match_topics(&casefold(&text), &configs));
            prop_assert_eq!(match_topics(&text, &configs), match_topics(&text.to_uppercase(), &configs));
        }

        #[test]
        fn adding_keywords_is_monotone(text in "[a-z ]{0,30}", extra in "[a-z]{1,4}") {
            let base = cfg();
            let mut grown = cfg();
            grown[0] = TopicConfig::new("coronavirus", ["korona", "covid", extra.as_str()]).unwrap();
            let before = match_topics(&text, &base);
            let after = match_topics(&text, &grown);
            prop_assert!(before.is_subset(&after));
        }
    }
}
