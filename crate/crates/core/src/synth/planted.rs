use std::collections::BTreeMap;

use chrono::{DateTime, Duration, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::EndorsementGraph;
use crate::groups::Partition;
use crate::ingest::{EventKind, InteractionEvent};
use crate::rng::{CounterRng, WeightedIndex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlocSize {
    pub label: String,
    pub size: usize,
}

/// Planted-partition retweet stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedStreamSpec {
    pub n_users: usize,
    pub blocs: Vec<BlocSize>,
    pub weeks: usize,
    pub events_per_week: usize,
    /// Relative endorsement propensity for a same-bloc target.
    pub p_in: f64,
    /// Relative endorsement propensity for an other-bloc target.
    pub p_out: f64,
    /// User activity weight is `rank^-activity_exponent`; 0 is uniform.
    #[serde(default)]
    pub activity_exponent: f64,
    /// Fraction of users whose ground-truth label is redrawn uniformly.
    #[serde(default)]
    pub label_noise: f64,
    pub seed: u64,
    /// Seed for bloc membership and activity ranks; defaults to `seed`.
    /// Streams sharing it share their planting.
    #[serde(default)]
    pub membership_seed: Option<u64>,
    /// Per-week override of `p_out`.
    #[serde(default)]
    pub p_out_schedule: Option<Vec<f64>>,
    /// Monday of the first week (UTC); events fall inside each local week.
    #[serde(default = "default_start")]
    pub start: NaiveDate,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub id_prefix: String,
    #[serde(default = "default_user_prefix")]
    pub user_prefix: String,
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2019, 1, 7).expect("valid date")
}

fn default_user_prefix() -> String {
    "u".into()
}

impl PlantedStreamSpec {
    pub fn new(
        blocs: &[(&str, usize)],
        weeks: usize,
        events_per_week: usize,
        p_in: f64,
        p_out: f64,
        seed: u64,
    ) -> Self {
        Self {
            n_users: blocs.iter().map(|b| b.1).sum(),
            blocs: blocs.iter().map(|&(l, s)| BlocSize { label: l.into(), size: s }).collect(),
            weeks,
            events_per_week,
            p_in,
            p_out,
            activity_exponent: 0.0,
            label_noise: 0.0,
            seed,
            membership_seed: None,
            p_out_schedule: None,
            start: default_start(),
            text: String::new(),
            id_prefix: String::new(),
            user_prefix: default_user_prefix(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.blocs.is_empty() {
            return bad("at least one bloc is required".into());
        }
        let total: usize = self.blocs.iter().map(|b| b.size).sum();
        if total != self.n_users {
            return bad(format!("bloc sizes sum to {total}, n_users is {}", self.n_users));
        }
        if self.blocs.iter().any(|b| b.size == 0) {
            return bad("bloc sizes must be positive".into());
        }
        let mut labels: Vec<&str> = self.blocs.iter().map(|b| b.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return bad("bloc labels must be unique".into());
        }
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.p_in) || !prob(self.p_out) || self.p_in + self.p_out == 0.0 {
            return bad("p_in and p_out must lie in [0, 1] and not both be 0".into());
        }
        if !(0.0..1.0).contains(&self.label_noise) {
            return bad("label_noise must lie in [0, 1)".into());
        }
        if self.activity_exponent.is_nan() || self.activity_exponent < 0.0 {
            return bad("activity_exponent must be non-negative".into());
        }
        if let Some(s) = &self.p_out_schedule {
            if s.len() != self.weeks || s.iter().any(|&p| !prob(p)) {
                return bad("p_out_schedule needs one value in [0, 1] per week".into());
            }
        }
        if self.weeks == 0 {
            return bad("weeks must be positive".into());
        }
        for w in 0..self.weeks {
            let p_out = self.p_out_at(w);
            let isolated = self.blocs.iter().any(|b| {
                let inside = self.p_in > 0.0 && b.size > 1;
                let outside = p_out > 0.0 && self.blocs.len() > 1;
                !inside && !outside
            });
            if isolated {
                return bad(format!("week {w}: some bloc has no possible retweet target"));
            }
        }
        if self.p_in < self.p_out {
            log::warn!("planted stream is disassortative (p_in < p_out)");
        }
        Ok(())
    }

    fn p_out_at(&self, week: usize) -> f64 {
        self.p_out_schedule.as_ref().map_or(self.p_out, |s| s[week])
    }

    pub fn user_id(&self, i: usize) -> String {
        format!("{}{i:06}", self.user_prefix)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedStream {
    pub events: Vec<InteractionEvent>,
    /// Labels as planted, with `label_noise` applied.
    pub truth: Partition,
    /// Labels as planted.
    pub planted: Partition,
}

/// Bloc of each user index plus activity weights, from the membership seed.
fn plant(spec: &PlantedStreamSpec) -> (Vec<usize>, Vec<f64>) {
    let key = spec.membership_seed.unwrap_or(spec.seed);
    let mut order: Vec<usize> = (0..spec.n_users).collect();
    CounterRng::from_seed(key, "membership", 0).shuffle(&mut order);
    let mut bloc_of = vec![0; spec.n_users];
    let mut at = 0;
    for (b, bloc) in spec.blocs.iter().enumerate() {
        for &u in &order[at..at + bloc.size] {
            bloc_of[u] = b;
        }
        at += bloc.size;
    }
    let mut rank: Vec<usize> = (0..spec.n_users).collect();
    CounterRng::from_seed(key, "activity", 0).shuffle(&mut rank);
    let weights = rank.iter().map(|&r| ((r + 1) as f64).powf(-spec.activity_exponent)).collect();
    (bloc_of, weights)
}

fn labeled_partition(spec: &PlantedStreamSpec, bloc_of: &[usize]) -> Result<Partition> {
    let map: BTreeMap<String, usize> = bloc_of.iter().enumerate().map(|(u, &b)| (spec.user_id(u), b)).collect();
    Partition::new(map, spec.blocs.len(), 0.0)?.with_labels(spec.blocs.iter().map(|b| b.label.clone()).collect())
}

pub fn gen_planted_retweet_stream(spec: &PlantedStreamSpec) -> Result<PlantedStream> {
    spec.validate()?;
    let (bloc_of, weight) = plant(spec);
    let nb = spec.blocs.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); nb];
    for (u, &b) in bloc_of.iter().enumerate() {
        members[b].push(u);
    }
    let bloc_tables: Vec<WeightedIndex> = members
        .iter()
        .map(|m| WeightedIndex::new(&m.iter().map(|&u| weight[u]).collect::<Vec<_>>()).expect("positive weights"))
        .collect();
    let bloc_weight: Vec<f64> = members.iter().map(|m| m.iter().map(|&u| weight[u]).sum()).collect();
    let sources = WeightedIndex::new(&weight).expect("positive weights");

    let user_ids: Vec<String> = (0..spec.n_users).map(|u| spec.user_id(u)).collect();
    let mut events = Vec::with_capacity(spec.weeks * spec.events_per_week);
    let start: DateTime<Utc> = spec.start.and_hms_opt(0, 0, 0).expect("midnight").and_utc();
    // Mon 06:00 to Sun 18:00 UTC stays inside the local week for zones
    // within six hours of UTC.
    let span = 6 * 86_400 + 12 * 3_600;
    for week in 0..spec.weeks {
        let mut rng = CounterRng::from_seed(spec.seed, "planted-week", week as u64);
        let p_out = spec.p_out_at(week);
        let week_start = start + Duration::days(7 * week as i64) + Duration::hours(6);
        for k in 0..spec.events_per_week {
            let src = sources.sample(&mut rng);
            let sb = bloc_of[src];
            let target_bloc_weights: Vec<f64> =
                (0..nb)
                    .map(|b| {
                        if b == sb {
                            spec.p_in * (bloc_weight[b] - weight[src]).max(0.0)
                        } else {
                            p_out * bloc_weight[b]
                        }
                    })
                    .collect();
            let tb = WeightedIndex::new(&target_bloc_weights).expect("validated").sample(&mut rng);
            let dst = loop {
                let d = members[tb][bloc_tables[tb].sample(&mut rng)];
                if d != src {
                    break d;
                }
            };
            let offset = (k as i64 * span) / spec.events_per_week.max(1) as i64;
            events.push(InteractionEvent {
                id: format!("{}w{week}e{k}", spec.id_prefix),
                created_at: week_start + Duration::seconds(offset),
                author_id: user_ids[src].clone(),
                text: spec.text.clone(),
                kind: EventKind::Retweet,
                retweeted_author_id: Some(user_ids[dst].clone()),
                retweeted_status_id: Some(format!("{}s{week}e{k}", spec.id_prefix)),
                urls: Vec::new(),
                like_count: 0,
                retweet_count: 0,
                reply_count: 0,
                sentiment: None,
                retweeted_text: Some(spec.text.clone()),
                retweeted_urls: Some(Vec::new()),
            });
        }
    }

    let planted = labeled_partition(spec, &bloc_of)?;
    let mut noisy = bloc_of.clone();
    let flips = (spec.label_noise * spec.n_users as f64).floor() as usize;
    let mut rng = CounterRng::from_seed(spec.seed, "label-noise", 0);
    let mut who: Vec<usize> = (0..spec.n_users).collect();
    rng.shuffle(&mut who);
    for &u in &who[..flips] {
        noisy[u] = rng.below(nb as u64) as usize;
    }
    let truth = labeled_partition(spec, &noisy)?;
    Ok(PlantedStream { events, truth, planted })
}

/// Directed graph with each ordered pair present independently, with
/// probability `p_in` inside a group and `p_out` across. Node `i` of group
/// `g` is named `g<g>n<i>`.
pub fn gen_planted_density_graph(sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> (EndorsementGraph, Partition) {
    let mut names = Vec::new();
    let mut group = Vec::new();
    for (g, &s) in sizes.iter().enumerate() {
        for i in 0..s {
            names.push(format!("g{g}n{i}"));
            group.push(g);
        }
    }
    let mut rng = CounterRng::from_seed(seed, "density-graph", 0);
    let mut edges = Vec::new();
    for a in 0..names.len() {
        for b in 0..names.len() {
            if a != b && rng.bernoulli(if group[a] == group[b] { p_in } else { p_out }) {
                edges.push((names[a].as_str(), names[b].as_str(), 1u64));
            }
        }
    }
    let graph = EndorsementGraph::from_weighted_edges(None, edges);
    let map = names.iter().cloned().zip(group.iter().copied()).collect();
    let partition = Partition::new(map, sizes.len(), 0.0).expect("valid groups");
    (graph, partition)
}
