use chrono::{DateTime, Duration, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::Partition;
use crate::ingest::{EventKind, InteractionEvent, Sentiment};
use crate::rng::{CounterRng, WeightedIndex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleSpec {
    pub article_key: String,
    pub outlet: String,
}

/// Sentiment proportions of one bloc's shares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentMix {
    pub negative: f64,
    pub neutral: f64,
    pub positive: f64,
}

impl SentimentMix {
    fn as_array(&self) -> [f64; 3] {
        [self.negative, self.neutral, self.positive]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewsBlocSpec {
    /// Group label in the sharer partition.
    pub label: String,
    pub sentiment: SentimentMix,
    /// Mean number of shares per member (geometric).
    #[serde(default)]
    pub share_rate: f64,
    /// Exact share total for the bloc; overrides `share_rate`.
    #[serde(default)]
    pub shares: Option<u64>,
}

/// Geometric means of the engagement counts of each share.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EngagementSpec {
    pub likes_mean: f64,
    pub retweets_mean: f64,
    pub replies_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewsStreamSpec {
    pub articles: Vec<ArticleSpec>,
    /// Relative popularity of each article; uniform when absent.
    #[serde(default)]
    pub article_weights: Option<Vec<f64>>,
    pub blocs: Vec<NewsBlocSpec>,
    #[serde(default)]
    pub engagement: EngagementSpec,
    pub start: NaiveDate,
    pub days: u32,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub id_prefix: String,
    pub seed: u64,
}

impl NewsStreamSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.articles.is_empty() {
            return bad("at least one article is required".into());
        }
        for a in &self.articles {
            if !a.article_key.starts_with(&a.outlet) {
                return bad(format!("article `{}` does not start with its outlet `{}`", a.article_key, a.outlet));
            }
        }
        if let Some(w) = &self.article_weights {
            if w.len() != self.articles.len() || WeightedIndex::new(w).is_none() {
                return bad("article_weights needs one non-negative weight per article, not all zero".into());
            }
        }
        for b in &self.blocs {
            let mix = b.sentiment.as_array();
            if mix.iter().any(|&p| p.is_nan() || p < 0.0) || (mix.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return bad(format!("bloc `{}`: sentiment proportions must be non-negative and sum to 1", b.label));
            }
            if b.share_rate.is_nan() || b.share_rate < 0.0 {
                return bad(format!("bloc `{}`: share_rate must be non-negative", b.label));
            }
        }
        let e = &self.engagement;
        if [e.likes_mean, e.retweets_mean, e.replies_mean].iter().any(|&m| m.is_nan() || m < 0.0) {
            return bad("engagement means must be non-negative".into());
        }
        if self.days == 0 {
            return bad("days must be positive".into());
        }
        Ok(())
    }
}

/// Largest-remainder split of `total` by `mix`, so the counts match the
/// proportions as closely as integers allow.
fn quotas(total: u64, mix: [f64; 3]) -> [u64; 3] {
    let raw: Vec<f64> = mix.iter().map(|p| p * total as f64).collect();
    let mut q = [0u64; 3];
    for i in 0..3 {
        q[i] = (raw[i] + 1e-9).floor() as u64;
    }
    let mut left = total.saturating_sub(q.iter().sum());
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| (raw[b] - q[b] as f64).total_cmp(&(raw[a] - q[a] as f64)).then(a.cmp(&b)));
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        q[i] += 1;
        left -= 1;
    }
    q
}

/// Original tweets, one URL each, by members of the partition's groups.
///
/// Each bloc's share count is fixed (`shares`) or drawn per member; its
/// sentiments are then dealt by exact quota in shuffled order, so the
/// per-bloc sentiment counts are deterministic functions of the spec.
pub fn gen_news_sharing_events(spec: &NewsStreamSpec, partition: &Partition) -> Result<Vec<InteractionEvent>> {
    spec.validate()?;
    let uniform = vec![1.0; spec.articles.len()];
    let articles = WeightedIndex::new(spec.article_weights.as_deref().unwrap_or(&uniform)).expect("validated");
    let start: DateTime<Utc> = spec.start.and_hms_opt(0, 0, 0).expect("midnight").and_utc();
    let seconds = i64::from(spec.days) * 86_400;
    let mut events = Vec::new();
    for (bi, bloc) in spec.blocs.iter().enumerate() {
        let g = partition
            .group_by_label(&bloc.label)
            .ok_or_else(|| Error::InvalidSpec(format!("no group labeled `{}` in the sharer partition", bloc.label)))?;
        let members = partition.members(g);
        let mut rng = CounterRng::from_seed(spec.seed, "news-bloc", bi as u64);
        let sharers: Vec<&str> = match bloc.shares {
            Some(k) => (0..k).map(|_| members[rng.below(members.len() as u64) as usize]).collect(),
            None => {
                members.iter().flat_map(|&m| std::iter::repeat_n(m, rng.geometric(bloc.share_rate) as usize)).collect()
            }
        };
        let q = quotas(sharers.len() as u64, bloc.sentiment.as_array());
        let mut sentiments: Vec<Sentiment> =
            Sentiment::ALL.iter().zip(q).flat_map(|(&s, n)| std::iter::repeat_n(s, n as usize)).collect();
        rng.shuffle(&mut sentiments);
        for (k, (author, sentiment)) in sharers.into_iter().zip(sentiments).enumerate() {
            let article = &spec.articles[articles.sample(&mut rng)];
            let at = start + Duration::seconds(rng.below(seconds as u64) as i64);
            events.push(InteractionEvent {
                id: format!("{}n{bi}-{k}", spec.id_prefix),
                created_at: at,
                author_id: author.to_owned(),
                text: spec.text.clone(),
                kind: EventKind::Original,
                retweeted_author_id: None,
                retweeted_status_id: None,
                urls: vec![format!("https://{}", article.article_key)],
                like_count: rng.geometric(spec.engagement.likes_mean),
                retweet_count: rng.geometric(spec.engagement.retweets_mean),
                reply_count: rng.geometric(spec.engagement.replies_mean),
                sentiment: Some(sentiment),
                retweeted_text: None,
                retweeted_urls: None,
            });
        }
    }
    events.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.id.cmp(&b.id)));
    Ok(events)
}
