use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bloc {
    ConservativeRight,
    LiberalLeft,
    ModerateRight,
    Minor,
}

impl Bloc {
    /// Human-readable group label.
    pub fn label(self) -> &'static str {
        match self {
            Bloc::ConservativeRight => "Conservative Right",
            Bloc::LiberalLeft => "Liberal Left",
            Bloc::ModerateRight => "Moderate Right",
            Bloc::Minor => "Minor",
        }
    }
}

impl fmt::Display for Bloc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bloc::ConservativeRight => "ConservativeRight",
            Bloc::LiberalLeft => "LiberalLeft",
            Bloc::ModerateRight => "ModerateRight",
            Bloc::Minor => "Minor",
        })
    }
}

impl FromStr for Bloc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ConservativeRight" => Ok(Bloc::ConservativeRight),
            "LiberalLeft" => Ok(Bloc::LiberalLeft),
            "ModerateRight" => Ok(Bloc::ModerateRight),
            "Minor" => Ok(Bloc::Minor),
            other => Err(Error::InvalidInput(format!("unknown bloc `{other}`"))),
        }
    }
}

/// A parliamentary candidate account.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedAccount {
    pub handle: String,
    pub author_id: String,
    pub party: String,
    pub bloc: Bloc,
    pub election_year: u16,
}

pub fn parse_seeds<R: Read>(input: R) -> Result<Vec<SeedAccount>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut seeds = Vec::new();
    for (i, rec) in rdr.deserialize::<SeedAccount>().enumerate() {
        let seed = rec.map_err(|e| Error::InvalidInput(format!("seed file row {}: {e}", i + 2)))?;
        if ![2019, 2023].contains(&seed.election_year) {
            return Err(Error::InvalidInput(format!("seed file row {}: election_year must be 2019 or 2023", i + 2)));
        }
        seeds.push(seed);
    }
    Ok(seeds)
}

pub fn write_seeds<W: std::io::Write>(seeds: &[SeedAccount], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in seeds {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelOutcome {
    pub partition: Partition,
    pub warnings: Vec<String>,
}

/// Labels each group by the plurality class of its seed members.
///
/// `classify` maps a seed to the class it votes for, or `None` when the seed
/// must not decide a label. Ties go to the lexicographically smallest class
/// and produce a warning. Groups without a deciding seed become
/// `Unlabeled-<k>`. If two groups win the same class, the one with more
/// votes keeps it and the others get a `#<k>` suffix.
pub fn label_groups_by<F>(partition: &Partition, seeds: &[SeedAccount], classify: F) -> Result<LabelOutcome>
where
    F: Fn(&SeedAccount) -> Option<String>,
{
    let present: Vec<&SeedAccount> = seeds.iter().filter(|s| partition.contains(&s.author_id)).collect();
    if present.is_empty() {
        return Err(Error::NoSeeds);
    }
    let mut votes: Vec<BTreeMap<String, usize>> = vec![BTreeMap::new(); partition.num_groups()];
    let mut counted = BTreeSet::new();
    for seed in present {
        // One vote per account even if it appears in both election years.
        if !counted.insert(&seed.author_id) {
            continue;
        }
        let g = partition.group_of(&seed.author_id).expect("present");
        if let Some(class) = classify(seed) {
            *votes[g].entry(class).or_default() += 1;
        }
    }

    let mut warnings = Vec::new();
    let mut winners: Vec<Option<(String, usize)>> = Vec::with_capacity(votes.len());
    for (g, v) in votes.iter().enumerate() {
        let top = v.values().copied().max();
        let winner = top.map(|top| {
            let tied: Vec<&String> = v.iter().filter(|(_, &c)| c == top).map(|(k, _)| k).collect();
            if tied.len() > 1 {
                warnings.push(format!(
                    "group {g}: tie between {} with {top} seeds each; picked `{}`",
                    tied.iter().map(|s| format!("`{s}`")).collect::<Vec<_>>().join(", "),
                    tied[0]
                ));
            }
            (tied[0].clone(), top)
        });
        winners.push(winner);
    }

    let mut labels: Vec<String> = Vec::with_capacity(winners.len());
    for (g, w) in winners.iter().enumerate() {
        let label = match w {
            None => format!("Unlabeled-{g}"),
            Some((class, votes_g)) => {
                let beaten = winners.iter().enumerate().any(|(h, other)| {
                    h != g
                        && other
                            .as_ref()
                            .is_some_and(|(c, vh)| c == class && (vh > votes_g || (vh == votes_g && h < g)))
                });
                if beaten {
                    warnings.push(format!("group {g}: `{class}` already taken by a stronger group"));
                    format!("{class} #{g}")
                } else {
                    class.clone()
                }
            }
        };
        labels.push(label);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(LabelOutcome { partition: partition.clone().with_labels(labels)?, warnings })
}

/// Ideological labels from seed blocs. `bloc_map` overrides the seed file's
/// bloc per party; minor-party seeds never decide a label.
pub fn label_groups(
    partition: &Partition,
    seeds: &[SeedAccount],
    bloc_map: &BTreeMap<String, Bloc>,
) -> Result<LabelOutcome> {
    label_groups_by(partition, seeds, |s| {
        let bloc = bloc_map.get(&s.party).copied().unwrap_or(s.bloc);
        (bloc != Bloc::Minor).then(|| bloc.label().to_owned())
    })
}

/// Government/opposition labels from the parties in government.
pub fn label_institutional(
    partition: &Partition,
    seeds: &[SeedAccount],
    government_parties: &BTreeSet<String>,
) -> Result<LabelOutcome> {
    label_groups_by(partition, seeds, |s| {
        Some(if government_parties.contains(&s.party) { "Government" } else { "Opposition" }.to_owned())
    })
}
