use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};

use super::url::{canonicalize_url, UrlPolicy};
use crate::error::{Error, Result};
use crate::ingest::{EventKind, InteractionEvent, Sentiment};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewsArticle {
    pub article_key: String,
    pub outlet: String,
    pub first_seen: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewsEdge {
    pub user: String,
    pub article_key: String,
    pub sentiment: Sentiment,
    pub virality: u64,
    pub tweet_id: String,
}

/// Bipartite user -> article graph; one edge per (tweet, article).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UserNewsGraph {
    users: BTreeSet<String>,
    articles: BTreeMap<String, NewsArticle>,
    edges: Vec<NewsEdge>,
}

impl UserNewsGraph {
    /// Assembles a graph from explicit parts. Every edge must point at a
    /// listed article, and each (tweet, article) pair may appear once.
    pub fn from_parts(articles: Vec<NewsArticle>, edges: Vec<NewsEdge>) -> Result<Self> {
        let articles: BTreeMap<String, NewsArticle> =
            articles.into_iter().map(|a| (a.article_key.clone(), a)).collect();
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !articles.contains_key(&e.article_key) {
                return Err(Error::UnknownArticle(e.article_key.clone()));
            }
            if !seen.insert((e.tweet_id.as_str(), e.article_key.as_str())) {
                return Err(Error::InvalidInput(format!(
                    "duplicate edge for tweet `{}` and article `{}`",
                    e.tweet_id, e.article_key
                )));
            }
        }
        let users = edges.iter().map(|e| e.user.clone()).collect();
        Ok(Self { users, articles, edges })
    }

    pub fn users(&self) -> &BTreeSet<String> {
        &self.users
    }

    pub fn articles(&self) -> &BTreeMap<String, NewsArticle> {
        &self.articles
    }

    pub fn article(&self, key: &str) -> Option<&NewsArticle> {
        self.articles.get(key)
    }

    pub fn edges(&self) -> &[NewsEdge] {
        &self.edges
    }

    pub fn edges_of_article<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a NewsEdge> + 'a {
        self.edges.iter().filter(move |e| e.article_key == key)
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NewsBuildReport {
    pub contributing_tweets: usize,
    pub rejected_urls: usize,
    pub missing_sentiment: usize,
}

/// Original tweets with at least one canonicalizable URL become sharing
/// edges. Missing sentiment counts as neutral and is tallied in the report.
pub fn build_user_news_graph<'a, I, F>(
    events: I,
    virality_fn: F,
    policy: &UrlPolicy,
) -> (UserNewsGraph, NewsBuildReport)
where
    I: IntoIterator<Item = &'a InteractionEvent>,
    F: Fn(u64, u64, u64) -> u64,
{
    let mut graph = UserNewsGraph::default();
    let mut report = NewsBuildReport::default();
    for ev in events.into_iter().filter(|e| e.kind == EventKind::Original) {
        let mut keys = BTreeSet::new();
        for raw in &ev.urls {
            match canonicalize_url(raw, policy) {
                Ok(c) => {
                    if keys.insert(c.article_key.clone()) {
                        let entry = graph.articles.entry(c.article_key.clone()).or_insert_with(|| NewsArticle {
                            article_key: c.article_key.clone(),
                            outlet: c.outlet.clone(),
                            first_seen: ev.created_at,
                        });
                        entry.first_seen = entry.first_seen.min(ev.created_at);
                    }
                }
                Err(_) => report.rejected_urls += 1,
            }
        }
        if keys.is_empty() {
            continue;
        }
        report.contributing_tweets += 1;
        let sentiment = ev.sentiment.unwrap_or_else(|| {
            report.missing_sentiment += 1;
            Sentiment::Neutral
        });
        let virality = virality_fn(ev.like_count, ev.retweet_count, ev.reply_count);
        graph.users.insert(ev.author_id.clone());
        for key in keys {
            graph.edges.push(NewsEdge {
                user: ev.author_id.clone(),
                article_key: key,
                sentiment,
                virality,
                tweet_id: ev.id.clone(),
            });
        }
    }
    if report.missing_sentiment > 0 {
        log::warn!("{} sharing tweets without sentiment were treated as neutral", report.missing_sentiment);
    }
    (graph, report)
}
