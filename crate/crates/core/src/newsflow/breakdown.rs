use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::UserNewsGraph;
use crate::groups::{Partition, NONPARTISAN};
use crate::ingest::Sentiment;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSentiment {
    pub tweet_count: u64,
    pub pos_count: u64,
    pub neg_count: u64,
    pub neutral_count: u64,
    pub virality_total: u64,
    pub virality_pos: u64,
    pub virality_neg: u64,
    pub virality_neutral: u64,
}

impl GroupSentiment {
    fn add(&mut self, sentiment: Sentiment, virality: u64) {
        self.tweet_count += 1;
        self.virality_total += virality;
        match sentiment {
            Sentiment::Positive => {
                self.pos_count += 1;
                self.virality_pos += virality;
            }
            Sentiment::Negative => {
                self.neg_count += 1;
                self.virality_neg += virality;
            }
            Sentiment::Neutral => {
                self.neutral_count += 1;
                self.virality_neutral += virality;
            }
        }
    }
}

/// Sharing activity on one article, per group label in group order, with
/// unassigned sharers under `Nonpartisan` last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentimentBreakdown {
    pub article_key: String,
    pub groups: Vec<(String, GroupSentiment)>,
}

impl SentimentBreakdown {
    pub fn group(&self, label: &str) -> Option<&GroupSentiment> {
        self.groups.iter().find(|(l, _)| l == label).map(|(_, g)| g)
    }

    pub fn total(&self) -> GroupSentiment {
        let mut t = GroupSentiment::default();
        for (_, g) in &self.groups {
            t.tweet_count += g.tweet_count;
            t.pos_count += g.pos_count;
            t.neg_count += g.neg_count;
            t.neutral_count += g.neutral_count;
            t.virality_total += g.virality_total;
            t.virality_pos += g.virality_pos;
            t.virality_neg += g.virality_neg;
            t.virality_neutral += g.virality_neutral;
        }
        t
    }
}

pub fn group_sentiment_breakdown(
    graph: &UserNewsGraph,
    partition: &Partition,
    article_key: &str,
) -> Result<SentimentBreakdown> {
    if graph.article(article_key).is_none() {
        return Err(Error::UnknownArticle(article_key.to_owned()));
    }
    let b = partition.num_groups();
    let mut per = vec![GroupSentiment::default(); b + 1];
    for e in graph.edges_of_article(article_key) {
        let slot = partition.group_of(&e.user).unwrap_or(b);
        per[slot].add(e.sentiment, e.virality);
    }
    let groups = per
        .into_iter()
        .enumerate()
        .map(|(g, s)| (if g == b { NONPARTISAN.to_owned() } else { partition.label(g) }, s))
        .collect();
    Ok(SentimentBreakdown { article_key: article_key.to_owned(), groups })
}

/// Share of the article's total virality that comes from `group`'s
/// negative shares. `None` for zero-virality articles or unknown groups.
pub fn negativity_share(breakdown: &SentimentBreakdown, group: &str) -> Option<f64> {
    let total = breakdown.total().virality_total;
    let g = breakdown.group(group)?;
    (total > 0).then(|| g.virality_neg as f64 / total as f64)
}
