use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::UserNewsGraph;
use crate::groups::Partition;

/// How shares of an outlet are counted per group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutletCounting {
    /// Distinct articles shared by at least one group member.
    #[default]
    UniqueArticles,
    /// Every sharing edge counts.
    Shares,
}

impl fmt::Display for OutletCounting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutletCounting::UniqueArticles => "unique-articles",
            OutletCounting::Shares => "shares",
        })
    }
}

impl FromStr for OutletCounting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unique-articles" => Ok(OutletCounting::UniqueArticles),
            "shares" => Ok(OutletCounting::Shares),
            other => Err(Error::Config(format!("unknown outlet counting `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutletRow {
    pub group: String,
    pub outlet: String,
    pub count: u64,
    /// 1-based rank within the group.
    pub rank: usize,
}

/// Per-group outlet counts, groups in index order, each ranked by count
/// descending then outlet name. Unassigned sharers are left out.
pub fn outlet_table(
    graph: &UserNewsGraph,
    partition: &Partition,
    counting: OutletCounting,
    top_n: Option<usize>,
) -> Vec<OutletRow> {
    let b = partition.num_groups();
    let mut unique: Vec<BTreeMap<&str, BTreeSet<&str>>> = vec![BTreeMap::new(); b];
    let mut shares: Vec<BTreeMap<&str, u64>> = vec![BTreeMap::new(); b];
    for e in graph.edges() {
        let Some(g) = partition.group_of(&e.user) else { continue };
        let outlet = graph.article(&e.article_key).expect("edge article exists").outlet.as_str();
        unique[g].entry(outlet).or_default().insert(&e.article_key);
        *shares[g].entry(outlet).or_default() += 1;
    }
    let mut rows = Vec::new();
    for g in 0..b {
        let mut counts: Vec<(&str, u64)> = match counting {
            OutletCounting::UniqueArticles => unique[g].iter().map(|(o, a)| (*o, a.len() as u64)).collect(),
            OutletCounting::Shares => shares[g].iter().map(|(o, c)| (*o, *c)).collect(),
        };
        counts.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(y.0)));
        let label = partition.label(g);
        for (i, (outlet, count)) in counts.into_iter().take(top_n.unwrap_or(usize::MAX)).enumerate() {
            rows.push(OutletRow { group: label.clone(), outlet: outlet.to_owned(), count, rank: i + 1 });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Sentiment::Neutral;
    use crate::newsflow::test_support::*;

    fn two_groups() -> Partition {
        let map = (0..10).map(|i| (format!("a{i}"), 0)).chain([("b0".to_string(), 1)]).collect();
        Partition::new(map, 2, 0.0).unwrap()
    }

    #[test]
    fn unique_articles_per_outlet() {
        let g = graph(
            &["hs.fi/1", "hs.fi/2", "hs.fi/3", "yle.fi/1"],
            vec![
                edge("1", "a0", "hs.fi/1", Neutral, 1),
                edge("2", "a1", "hs.fi/2", Neutral, 1),
                edge("3", "a2", "hs.fi/3", Neutral, 1),
                edge("4", "a3", "yle.fi/1", Neutral, 1),
                edge("5", "a4", "hs.fi/1", Neutral, 1),
                edge("6", "zz", "yle.fi/1", Neutral, 1),
            ],
        );
        let rows = outlet_table(&g, &two_groups(), OutletCounting::UniqueArticles, None);
        let got: Vec<(&str, &str, u64, usize)> =
            rows.iter().map(|r| (r.group.as_str(), r.outlet.as_str(), r.count, r.rank)).collect();
        assert_eq!(got, [("group-0", "hs.fi", 3, 1), ("group-0", "yle.fi", 1, 2)]);
        let shares = outlet_table(&g, &two_groups(), OutletCounting::Shares, Some(1));
        assert_eq!((shares.len(), shares[0].count), (1, 4));
    }

    #[test]
    fn one_article_many_sharers_counts_once() {
        let edges = (0..10).map(|i| edge(&format!("t{i}"), &format!("a{i}"), "hs.fi/1", Neutral, 1)).collect();
        let g = graph(&["hs.fi/1"], edges);
        let rows = outlet_table(&g, &two_groups(), OutletCounting::UniqueArticles, Some(5));
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].count, 1);
    }

    #[test]
    fn ties_sorted_by_outlet() {
        let g = graph(
            &["b.fi/1", "a.fi/1"],
            vec![edge("1", "a0", "b.fi/1", Neutral, 1), edge("2", "a0", "a.fi/1", Neutral, 1)],
        );
        let rows = outlet_table(&g, &two_groups(), OutletCounting::UniqueArticles, None);
        assert_eq!(rows[0].outlet, "a.fi");
        assert_eq!("shares".parse::<OutletCounting>().unwrap(), OutletCounting::Shares);
    }
}
