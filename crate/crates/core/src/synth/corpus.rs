use std::collections::{BTreeMap, HashSet};

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use super::news::{gen_news_sharing_events, NewsStreamSpec};
use super::planted::{gen_planted_retweet_stream, BlocSize, PlantedStreamSpec};
use crate::error::{Error, Result};
use crate::groups::{Bloc, Partition, SeedAccount};
use crate::ingest::InteractionEvent;
use crate::rng::{derive_key, CounterRng};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusParty {
    pub name: String,
    /// Seed bloc recorded for the party's candidates.
    pub bloc: Bloc,
    /// Number of candidate accounts drawn from the bloc's members.
    pub candidates: usize,
    #[serde(default = "default_election_year")]
    pub election_year: u16,
}

fn default_election_year() -> u16 {
    2019
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusBloc {
    pub label: String,
    pub size: usize,
    #[serde(default)]
    pub parties: Vec<CorpusParty>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusPeriod {
    pub name: String,
    /// A Monday.
    pub start: NaiveDate,
    pub weeks: usize,
}

impl CorpusPeriod {
    /// Last day of the period (a Sunday).
    pub fn end(&self) -> NaiveDate {
        self.start + chrono::Days::new(7 * self.weeks as u64 - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusTopic {
    pub id: String,
    pub text: String,
    pub events_per_week: usize,
    pub p_in: f64,
    pub p_out: f64,
    /// `p_out` per week, over all periods in order.
    #[serde(default)]
    pub p_out_schedule: Option<Vec<f64>>,
    #[serde(default)]
    pub activity_exponent: f64,
    /// Topics with the same planting share their bloc membership.
    pub planting: String,
}

/// A multi-topic, multi-period synthetic corpus over one user population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    #[serde(default = "default_user_prefix")]
    pub user_prefix: String,
    pub blocs: Vec<CorpusBloc>,
    pub periods: Vec<CorpusPeriod>,
    pub topics: Vec<CorpusTopic>,
    /// Planting whose blocs carry the candidates and the news sharers.
    pub reference_planting: String,
    #[serde(default)]
    pub news: Vec<NewsStreamSpec>,
}

fn default_user_prefix() -> String {
    "u".into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    /// Sorted by time, then id.
    pub events: Vec<InteractionEvent>,
    pub seeds: Vec<SeedAccount>,
    /// Planted bloc partition per planting.
    pub truth: BTreeMap<String, Partition>,
}

impl CorpusSpec {
    pub fn total_weeks(&self) -> usize {
        self.periods.iter().map(|p| p.weeks).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.blocs.is_empty() || self.periods.is_empty() || self.topics.is_empty() {
            return bad("blocs, periods and topics must all be non-empty".into());
        }
        for b in &self.blocs {
            let wanted: usize = b.parties.iter().map(|p| p.candidates).sum();
            if wanted > b.size {
                return bad(format!("bloc `{}` has {} members but {wanted} candidates", b.label, b.size));
            }
        }
        let mut parties = HashSet::new();
        for p in self.blocs.iter().flat_map(|b| &b.parties) {
            if !parties.insert(p.name.as_str()) {
                return bad(format!("party `{}` appears twice", p.name));
            }
        }
        for p in &self.periods {
            if p.start.weekday() != Weekday::Mon || p.weeks == 0 {
                return bad(format!("period `{}` must start on a Monday and span at least one week", p.name));
            }
        }
        for (i, a) in self.periods.iter().enumerate() {
            if let Some(b) = self.periods.get(i + 1) {
                if b.start <= a.end() {
                    return bad(format!("periods `{}` and `{}` must be ordered and disjoint", a.name, b.name));
                }
            }
        }
        let mut ids = HashSet::new();
        for t in &self.topics {
            if !ids.insert(t.id.as_str()) {
                return bad(format!("topic `{}` appears twice", t.id));
            }
            if t.p_out_schedule.as_ref().is_some_and(|s| s.len() != self.total_weeks()) {
                return bad(format!("topic `{}`: p_out_schedule needs one value per week of all periods", t.id));
            }
        }
        if !self.topics.iter().any(|t| t.planting == self.reference_planting) {
            return bad(format!("no topic uses the reference planting `{}`", self.reference_planting));
        }
        for n in &self.news {
            n.validate()?;
        }
        Ok(())
    }

    fn stream_spec(&self, ti: usize, pi: usize) -> PlantedStreamSpec {
        let topic = &self.topics[ti];
        let period = &self.periods[pi];
        let offset: usize = self.periods[..pi].iter().map(|p| p.weeks).sum();
        PlantedStreamSpec {
            n_users: self.blocs.iter().map(|b| b.size).sum(),
            blocs: self.blocs.iter().map(|b| BlocSize { label: b.label.clone(), size: b.size }).collect(),
            weeks: period.weeks,
            events_per_week: topic.events_per_week,
            p_in: topic.p_in,
            p_out: topic.p_out,
            activity_exponent: topic.activity_exponent,
            label_noise: 0.0,
            seed: derive_key(self.seed, &format!("stream/{}", topic.id), pi as u64),
            membership_seed: Some(derive_key(self.seed, &format!("planting/{}", topic.planting), 0)),
            p_out_schedule: topic.p_out_schedule.as_ref().map(|s| s[offset..offset + period.weeks].to_vec()),
            start: period.start,
            text: topic.text.clone(),
            id_prefix: format!("t{ti}p{pi}"),
            user_prefix: self.user_prefix.clone(),
        }
    }
}

/// Candidates are drawn without replacement from each bloc's members.
fn draw_seeds(spec: &CorpusSpec, reference: &Partition) -> Vec<SeedAccount> {
    let mut seeds = Vec::new();
    for (bi, bloc) in spec.blocs.iter().enumerate() {
        let g = reference.group_by_label(&bloc.label).expect("planted labels");
        let mut members = reference.members(g);
        CounterRng::from_seed(spec.seed, "candidates", bi as u64).shuffle(&mut members);
        let mut pool = members.into_iter();
        for party in &bloc.parties {
            for k in 0..party.candidates {
                let user = pool.next().expect("validated");
                seeds.push(SeedAccount {
                    handle: format!("@{}_{k}", party.name),
                    author_id: user.to_owned(),
                    party: party.name.clone(),
                    bloc: party.bloc,
                    election_year: party.election_year,
                });
            }
        }
    }
    seeds.sort_by(|a, b| a.author_id.cmp(&b.author_id).then_with(|| a.handle.cmp(&b.handle)));
    seeds
}

pub fn gen_corpus(spec: &CorpusSpec) -> Result<Corpus> {
    spec.validate()?;
    let mut events = Vec::new();
    let mut truth = BTreeMap::new();
    for ti in 0..spec.topics.len() {
        for pi in 0..spec.periods.len() {
            let stream = gen_planted_retweet_stream(&spec.stream_spec(ti, pi))?;
            events.extend(stream.events);
            truth.entry(spec.topics[ti].planting.clone()).or_insert(stream.planted);
        }
    }
    let reference = &truth[&spec.reference_planting];
    let seeds = draw_seeds(spec, reference);
    for news in &spec.news {
        events.extend(gen_news_sharing_events(news, reference)?);
    }
    let mut seen = HashSet::with_capacity(events.len());
    if let Some(dup) = events.iter().find(|e| !seen.insert(e.id.as_str())) {
        return Err(Error::InvalidSpec(format!(
            "generated id `{}` twice; give news streams distinct id_prefix",
            dup.id
        )));
    }
    events.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.id.cmp(&b.id)));
    Ok(Corpus { events, seeds, truth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{ArticleSpec, EngagementSpec, NewsBlocSpec, SentimentMix};

    fn party(name: &str, bloc: Bloc, candidates: usize) -> CorpusParty {
        CorpusParty { name: name.into(), bloc, candidates, election_year: 2019 }
    }

    fn topic(id: &str, planting: &str) -> CorpusTopic {
        CorpusTopic {
            id: id.into(),
            text: format!("{id} text"),
            events_per_week: 40,
            p_in: 1.0,
            p_out: 0.1,
            p_out_schedule: None,
            activity_exponent: 0.0,
            planting: planting.into(),
        }
    }

    fn spec() -> CorpusSpec {
        CorpusSpec {
            seed: 11,
            user_prefix: "u".into(),
            blocs: vec![
                CorpusBloc { label: "A".into(), size: 12, parties: vec![party("pa", Bloc::ConservativeRight, 3)] },
                CorpusBloc {
                    label: "B".into(),
                    size: 10,
                    parties: vec![party("pb", Bloc::LiberalLeft, 2), party("pm", Bloc::Minor, 1)],
                },
            ],
            periods: vec![
                CorpusPeriod { name: "one".into(), start: NaiveDate::from_ymd_opt(2018, 1, 1).unwrap(), weeks: 2 },
                CorpusPeriod { name: "two".into(), start: NaiveDate::from_ymd_opt(2020, 1, 6).unwrap(), weeks: 1 },
            ],
            topics: vec![topic("x", "shared"), topic("y", "shared"), topic("z", "own")],
            reference_planting: "shared".into(),
            news: vec![NewsStreamSpec {
                articles: vec![ArticleSpec { article_key: "hs.fi/a".into(), outlet: "hs.fi".into() }],
                article_weights: None,
                blocs: vec![NewsBlocSpec {
                    label: "A".into(),
                    sentiment: SentimentMix { negative: 0.5, neutral: 0.5, positive: 0.0 },
                    share_rate: 0.0,
                    shares: Some(6),
                }],
                engagement: EngagementSpec::default(),
                start: NaiveDate::from_ymd_opt(2018, 1, 2).unwrap(),
                days: 5,
                text: "x news".into(),
                id_prefix: "n0".into(),
                seed: 3,
            }],
        }
    }

    #[test]
    fn composes_streams_seeds_and_news() {
        let c = gen_corpus(&spec()).unwrap();
        assert_eq!(c.events.len(), 3 * 3 * 40 + 6);
        assert!(c.events.windows(2).all(|w| (w[0].created_at, &w[0].id) < (w[1].created_at, &w[1].id)));
        assert_eq!(c.seeds.len(), 6);
        let shared = &c.truth["shared"];
        for s in &c.seeds {
            let expect = if s.party == "pa" { "A" } else { "B" };
            assert_eq!(shared.label(shared.group_of(&s.author_id).unwrap()), expect);
        }
        assert_eq!(c.truth.len(), 2);
        assert_ne!(c.truth["shared"].assignment(), c.truth["own"].assignment());
        assert_eq!(c, gen_corpus(&spec()).unwrap());
    }

    #[test]
    fn shared_planting_means_shared_blocs() {
        let c = gen_corpus(&spec()).unwrap();
        let shared = &c.truth["shared"];
        for e in c.events.iter().filter(|e| e.id.starts_with("t1") && e.is_retweet()) {
            assert!(e.text.starts_with('y'));
            assert!(shared.contains(&e.author_id));
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = spec();
        s.periods[1].start = NaiveDate::from_ymd_opt(2020, 1, 7).unwrap();
        assert!(gen_corpus(&s).is_err());
        let mut s = spec();
        s.blocs[1].size = 2;
        assert!(gen_corpus(&s).is_err());
        let mut s = spec();
        s.reference_planting = "missing".into();
        assert!(gen_corpus(&s).is_err());
        let mut s = spec();
        s.news.push(s.news[0].clone());
        assert!(matches!(gen_corpus(&s), Err(Error::InvalidSpec(m)) if m.contains("twice")));
        let mut s = spec();
        s.topics[0].p_out_schedule = Some(vec![0.1; 2]);
        assert!(gen_corpus(&s).is_err());
    }
}
