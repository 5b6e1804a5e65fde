//! News-sharing analytics on user/news graphs: virality, centrality,
//! top-viral ranking, per-group sentiment splits and outlet tables.

mod breakdown;
mod outlets;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::UserNewsGraph;

pub use breakdown::{group_sentiment_breakdown, negativity_share, GroupSentiment, SentimentBreakdown};
pub use outlets::{outlet_table, OutletCounting, OutletRow};

pub const LIKE_WEIGHT: u64 = 30;
pub const RETWEET_WEIGHT: u64 = 20;
pub const REPLY_WEIGHT: u64 = 1;

/// `30 * likes + 20 * retweets + replies`; negative counts are rejected.
pub fn virality(likes: i64, retweets: i64, replies: i64) -> Result<u64> {
    let check = |name: &str, v: i64| {
        u64::try_from(v).map_err(|_| Error::InvalidInput(format!("{name} must be non-negative, got {v}")))
    };
    Ok(virality_of_counts(
        check("like_count", likes)?,
        check("retweet_count", retweets)?,
        check("reply_count", replies)?,
    ))
}

/// Virality of validated counts. Exact for any counts below 2^58; larger
/// inputs saturate at `u64::MAX`.
pub fn virality_of_counts(likes: u64, retweets: u64, replies: u64) -> u64 {
    let total = LIKE_WEIGHT as u128 * likes as u128 + RETWEET_WEIGHT as u128 * retweets as u128 + replies as u128;
    u64::try_from(total).unwrap_or(u64::MAX)
}

/// Presentation helper: virality in thousands, rounded half up.
pub fn round_to_thousands(v: u64) -> u64 {
    v / 1000 + u64::from(v % 1000 >= 500)
}

/// Virality-weighted degree of every node.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Centrality {
    pub users: BTreeMap<String, u64>,
    pub articles: BTreeMap<String, u64>,
}

impl Centrality {
    /// 0 for users without sharing edges.
    pub fn user(&self, id: &str) -> u64 {
        self.users.get(id).copied().unwrap_or(0)
    }

    pub fn article(&self, key: &str) -> u64 {
        self.articles.get(key).copied().unwrap_or(0)
    }
}

pub fn node_centrality(graph: &UserNewsGraph) -> Centrality {
    let mut c = Centrality::default();
    for key in graph.articles().keys() {
        c.articles.insert(key.clone(), 0);
    }
    for e in graph.edges() {
        let u = c.users.entry(e.user.clone()).or_default();
        *u = u.saturating_add(e.virality);
        let a = c.articles.entry(e.article_key.clone()).or_default();
        *a = a.saturating_add(e.virality);
    }
    c
}

/// The `k` most central articles, by centrality descending then key.
pub fn top_viral_news(graph: &UserNewsGraph, k: usize) -> Result<Vec<(String, u64)>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let mut ranked: Vec<(String, u64)> = node_centrality(graph).articles.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    Ok(ranked)
}

#[cfg(test)]
pub(crate) mod test_support {
    use chrono::DateTime;

    use crate::graphs::{NewsArticle, NewsEdge, UserNewsGraph};
    use crate::ingest::Sentiment;

    pub fn article(key: &str) -> NewsArticle {
        NewsArticle {
            article_key: key.into(),
            outlet: key.split('/').next().unwrap().into(),
            first_seen: DateTime::UNIX_EPOCH,
        }
    }

    pub fn edge(tweet: &str, user: &str, key: &str, sentiment: Sentiment, virality: u64) -> NewsEdge {
        NewsEdge { user: user.into(), article_key: key.into(), sentiment, virality, tweet_id: tweet.into() }
    }

    pub fn graph(keys: &[&str], edges: Vec<NewsEdge>) -> UserNewsGraph {
        UserNewsGraph::from_parts(keys.iter().map(|k| article(k)).collect(), edges).unwrap()
    }
}
