use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Label used for active users that carry no group assignment.
pub const NONPARTISAN: &str = "Nonpartisan";

/// Assignment of users to groups `0..B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    assignment: BTreeMap<String, usize>,
    num_groups: usize,
    labels: Option<Vec<String>>,
    score: f64,
}

impl Partition {
    pub fn new(assignment: BTreeMap<String, usize>, num_groups: usize, score: f64) -> Result<Self> {
        if num_groups == 0 {
            return Err(Error::InvalidInput("a partition needs at least one group".into()));
        }
        let mut sizes = vec![0usize; num_groups];
        for (user, &g) in &assignment {
            if g >= num_groups {
                return Err(Error::InvalidInput(format!("user `{user}` assigned to group {g} >= B={num_groups}")));
            }
            sizes[g] += 1;
        }
        if num_groups > 1 {
            if let Some(empty) = sizes.iter().position(|&s| s == 0) {
                return Err(Error::InvalidInput(format!("group {empty} has no members")));
            }
        }
        Ok(Self { assignment, num_groups, labels: None, score })
    }

    /// Everyone in one group.
    pub fn trivial<I: IntoIterator<Item = String>>(users: I, score: f64) -> Self {
        Self { assignment: users.into_iter().map(|u| (u, 0)).collect(), num_groups: 1, labels: None, score }
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn group_of(&self, user: &str) -> Option<usize> {
        self.assignment.get(user).copied()
    }

    pub fn contains(&self, user: &str) -> bool {
        self.assignment.contains_key(user)
    }

    pub fn assignment(&self) -> &BTreeMap<String, usize> {
        &self.assignment
    }

    pub fn users(&self) -> impl Iterator<Item = &str> {
        self.assignment.keys().map(String::as_str)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_groups];
        for &g in self.assignment.values() {
            sizes[g] += 1;
        }
        sizes
    }

    pub fn members(&self, group: usize) -> Vec<&str> {
        self.assignment.iter().filter(|(_, &g)| g == group).map(|(u, _)| u.as_str()).collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The group's label, or `group-<k>` when the partition is unlabeled.
    pub fn label(&self, group: usize) -> String {
        match &self.labels {
            Some(l) => l[group].clone(),
            None => format!("group-{group}"),
        }
    }

    pub fn group_by_label(&self, label: &str) -> Option<usize> {
        (0..self.num_groups).find(|&g| self.label(g) == label)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_groups {
            return Err(Error::InvalidInput(format!("{} labels for {} groups", labels.len(), self.num_groups)));
        }
        let unique: BTreeSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(Error::InvalidInput("group labels must be unique".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = score;
        self
    }

    /// Renumbers groups by (size desc, smallest member id asc). Labels follow
    /// their groups.
    pub fn canonical(self) -> Self {
        let sizes = self.sizes();
        let mut first: Vec<Option<&String>> = vec![None; self.num_groups];
        for (u, &g) in &self.assignment {
            if first[g].is_none() {
                first[g] = Some(u);
            }
        }
        let mut order: Vec<usize> = (0..self.num_groups).collect();
        order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then_with(|| first[a].cmp(&first[b])));
        let mut remap = vec![0; self.num_groups];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let assignment = self.assignment.iter().map(|(u, &g)| (u.clone(), remap[g])).collect();
        let labels = self.labels.map(|l| order.iter().map(|&old| l[old].clone()).collect());
        Self { assignment, num_groups: self.num_groups, labels, score: self.score }
    }

    /// Keeps only users in `keep`; groups left empty are dropped and the
    /// rest renumbered in their original order.
    pub fn restrict<F: Fn(&str) -> bool>(&self, keep: F) -> Self {
        let assignment: BTreeMap<String, usize> =
            self.assignment.iter().filter(|(u, _)| keep(u)).map(|(u, &g)| (u.clone(), g)).collect();
        let used: BTreeSet<usize> = assignment.values().copied().collect();
        let remap: BTreeMap<usize, usize> = used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let num_groups = remap.len().max(1);
        let labels = self.labels.as_ref().map(|l| {
            if used.is_empty() {
                vec![l[0].clone()]
            } else {
                used.iter().map(|&old| l[old].clone()).collect()
            }
        });
        Self {
            assignment: assignment.into_iter().map(|(u, g)| (u, remap[&g])).collect(),
            num_groups,
            labels,
            score: self.score,
        }
    }
}

/// Writes a partition file: `#` header lines with `key=value` metadata,
/// then `user_id,group_index,label` rows sorted by user id.
pub fn write_partition<W: Write>(partition: &Partition, meta: &[(&str, String)], mut out: W) -> Result<()> {
    writeln!(out, "# polarscope partition")?;
    writeln!(out, "# B={}", partition.num_groups())?;
    writeln!(out, "# score={}", partition.score())?;
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["user_id", "group_index", "label"])?;
    for (user, &g) in partition.assignment() {
        let label = partition.labels().map(|l| l[g].as_str()).unwrap_or("");
        w.write_record([user.as_str(), &g.to_string(), label])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a partition file, returning the partition and its header metadata.
pub fn read_partition<R: BufRead>(mut input: R) -> Result<(Partition, BTreeMap<String, String>)> {
    let mut meta = BTreeMap::new();
    let mut body = String::new();
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        if let Some(rest) = line.trim_end().strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                meta.insert(k.trim().to_owned(), v.trim().to_owned());
            }
        } else {
            body.push_str(&line);
        }
    }
    let b: usize = meta
        .get("B")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::InvalidInput("partition file lacks a `# B=` header".into()))?;
    let score: f64 = meta.get("score").and_then(|v| v.parse().ok()).unwrap_or(f64::NAN);
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let mut assignment = BTreeMap::new();
    let mut labels: Vec<Option<String>> = vec![None; b];
    for rec in rdr.records() {
        let rec = rec?;
        let user = rec.get(0).unwrap_or("").to_owned();
        let g: usize = rec
            .get(1)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::InvalidInput(format!("bad group index for `{user}`")))?;
        if g >= b {
            return Err(Error::InvalidInput(format!("group index {g} out of range for B={b}")));
        }
        if let Some(l) = rec.get(2).filter(|l| !l.is_empty()) {
            labels[g] = Some(l.to_owned());
        }
        assignment.insert(user, g);
    }
    let mut p = Partition::new(assignment, b, score)?;
    if labels.iter().all(Option::is_some) {
        p = p.with_labels(labels.into_iter().map(Option::unwrap).collect())?;
    }
    Ok((p, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pairs: &[(&str, usize)], b: usize) -> Result<Partition> {
        Partition::new(pairs.iter().map(|(u, g)| (u.to_string(), *g)).collect(), b, -1.5)
    }

    #[test]
    fn empty_groups_are_rejected() {
        assert!(p(&[("a", 0), ("b", 0)], 2).is_err());
        assert!(p(&[("a", 3)], 2).is_err());
        assert!(p(&[], 1).is_ok());
    }

    #[test]
    fn canonical_orders_by_size_then_first_member() {
        let part = p(&[("a", 0), ("b", 1), ("c", 1), ("d", 2), ("e", 2)], 3)
            .unwrap()
            .with_labels(vec!["x".into(), "y".into(), "z".into()])
            .unwrap()
            .canonical();
        assert_eq!(part.group_of("b"), Some(0));
        assert_eq!(part.group_of("d"), Some(1));
        assert_eq!(part.group_of("a"), Some(2));
        assert_eq!(part.labels().unwrap(), ["y", "z", "x"]);
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let part = p(&[("a", 0), ("b", 1)], 2).unwrap();
        assert!(part.with_labels(vec!["x".into(), "x".into()]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let part = p(&[("a", 0), ("b", 1), ("c", 1)], 2)
            .unwrap()
            .with_labels(vec!["Government".into(), "Opposition".into()])
            .unwrap();
        let mut buf = Vec::new();
        write_partition(&part, &[("seed", "7".into())], &mut buf).unwrap();
        let (back, meta) = read_partition(buf.as_slice()).unwrap();
        assert_eq!(back, part);
        assert_eq!(meta["seed"], "7");
    }

    #[test]
    fn restrict_drops_empty_groups() {
        let part = p(&[("a", 0), ("b", 1), ("c", 2)], 3).unwrap();
        let r = part.restrict(|u| u != "b");
        assert_eq!(r.num_groups(), 2);
        assert_eq!(r.group_of("c"), Some(1));
    }
}
