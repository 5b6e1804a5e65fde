use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::url::{canonicalize_url, UrlPolicy};
use crate::error::{Error, Result};
use crate::ingest::InteractionEvent;

/// Keeps retweets whose retweeted status links to at least one news URL.
///
/// Needs `retweeted_urls` on every retweet; without it the input cannot
/// tell a linkless status from missing data.
pub fn restrict_to_news_retweets(events: &[InteractionEvent], policy: &UrlPolicy) -> Result<Vec<InteractionEvent>> {
    let mut kept = Vec::new();
    for ev in events {
        if is_news_retweet(ev, policy)? {
            kept.push(ev.clone());
        }
    }
    Ok(kept)
}

/// Whether `event` is a retweet of a status linking to news. Fails on a
/// retweet without `retweeted_urls`.
pub fn is_news_retweet(event: &InteractionEvent, policy: &UrlPolicy) -> Result<bool> {
    if !event.is_retweet() {
        return Ok(false);
    }
    let urls = event.retweeted_urls.as_deref().ok_or_else(|| {
        Error::Unsupported(format!(
            "retweets-with-news needs `retweeted_urls` on every retweet; event `{}` has none",
            event.id
        ))
    })?;
    Ok(urls.iter().any(|u| canonicalize_url(u, policy).is_ok()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccountFilter {
    #[default]
    All,
    CandidatesOnly,
    ExcludeCandidates,
}

impl fmt::Display for AccountFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccountFilter::All => "all",
            AccountFilter::CandidatesOnly => "candidates-only",
            AccountFilter::ExcludeCandidates => "exclude-candidates",
        })
    }
}

impl FromStr for AccountFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "all" => Ok(AccountFilter::All),
            "candidates-only" => Ok(AccountFilter::CandidatesOnly),
            "exclude-candidates" => Ok(AccountFilter::ExcludeCandidates),
            other => Err(Error::Config(format!("unknown account filter `{other}`"))),
        }
    }
}

impl AccountFilter {
    pub fn admits(self, author_id: &str, seeds: &HashSet<String>) -> bool {
        match self {
            AccountFilter::All => true,
            AccountFilter::CandidatesOnly => seeds.contains(author_id),
            AccountFilter::ExcludeCandidates => !seeds.contains(author_id),
        }
    }
}

/// Filters on the acting account (the retweeter for retweets).
pub fn filter_accounts(
    events: &[InteractionEvent],
    mode: AccountFilter,
    seeds: &HashSet<String>,
) -> Vec<InteractionEvent> {
    events.iter().filter(|e| mode.admits(&e.author_id, seeds)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::EventKind;

    fn ev(id: &str, author: &str, kind: EventKind, rt_urls: Option<Vec<&str>>) -> InteractionEvent {
        let rt = kind == EventKind::Retweet;
        InteractionEvent {
            id: id.into(),
            created_at: chrono::DateTime::UNIX_EPOCH,
            author_id: author.into(),
            text: String::new(),
            kind,
            retweeted_author_id: rt.then(|| "x".into()),
            retweeted_status_id: rt.then(|| "s".into()),
            urls: vec![],
            like_count: 0,
            retweet_count: 0,
            reply_count: 0,
            sentiment: None,
            retweeted_text: None,
            retweeted_urls: rt_urls.map(|u| u.into_iter().map(String::from).collect()),
        }
    }

    #[test]
    fn news_retweets() {
        let events = vec![
            ev("1", "a", EventKind::Retweet, Some(vec!["https://www.hs.fi/a"])),
            ev("2", "a", EventKind::Retweet, Some(vec![])),
            ev("3", "a", EventKind::Original, None),
        ];
        let kept = restrict_to_news_retweets(&events, &UrlPolicy::default()).unwrap();
        assert_eq!(kept.iter().map(|e| e.id.as_str()).collect::<Vec<_>>(), ["1"]);
    }

    #[test]
    fn news_retweets_need_status_urls() {
        let events = vec![ev("1", "a", EventKind::Retweet, None)];
        assert!(matches!(restrict_to_news_retweets(&events, &UrlPolicy::default()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn account_modes() {
        let events = vec![ev("1", "cand", EventKind::Original, None), ev("2", "other", EventKind::Original, None)];
        let seeds: HashSet<String> = ["cand".to_string()].into();
        assert_eq!(filter_accounts(&events, AccountFilter::All, &seeds), events);
        let ex = filter_accounts(&events, AccountFilter::ExcludeCandidates, &seeds);
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].id, "2");
        let only = filter_accounts(&events, AccountFilter::CandidatesOnly, &seeds);
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].id, "1");
        assert_eq!("exclude_candidates".parse::<AccountFilter>().unwrap(), AccountFilter::ExcludeCandidates);
    }
}
