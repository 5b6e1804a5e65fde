//! Partition search: greedy agglomeration down to `B` groups followed by
//! single-node moves, repeated over seeded restarts.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::BuildHasherDefault;

use serde::{Deserialize, Serialize};

use super::objective::{fit_value, penalty, Objective};
use super::partition::Partition;
use crate::error::{Error, Result};
use crate::graphs::EndorsementGraph;
use crate::rng::{derive_key, mix64, CounterRng};

type StableMap<K, V> = HashMap<K, V, BuildHasherDefault<DefaultHasher>>;

const MAX_SWEEPS: usize = 200;
const IMPROVEMENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct InferenceOptions {
    pub objective: Objective,
    /// Treat every endorsed pair as a single edge.
    pub binarize: bool,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        Self { objective: Objective::PlantedPartition, binarize: false }
    }
}

/// Flattened view of the graph used by the search.
pub(crate) struct Problem {
    pub n: usize,
    pub m: f64,
    pub t_total: f64,
    objective: Objective,
    offsets: Vec<usize>,
    nbrs: Vec<(u32, f64)>,
    kout: Vec<f64>,
    kin: Vec<f64>,
}

impl Problem {
    pub fn new(graph: &EndorsementGraph, options: &InferenceOptions) -> Self {
        let n = graph.node_count();
        let mut kout = vec![0.0; n];
        let mut kin = vec![0.0; n];
        let mut undirected: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        let mut m = 0.0;
        for e in graph.edges() {
            let w = if options.binarize { 1.0 } else { e.multiplicity as f64 };
            m += w;
            kout[e.source as usize] += w;
            kin[e.target as usize] += w;
            let key = (e.source.min(e.target), e.source.max(e.target));
            *undirected.entry(key).or_default() += w;
        }
        let mut degree = vec![0usize; n + 1];
        for &(a, b) in undirected.keys() {
            degree[a as usize + 1] += 1;
            degree[b as usize + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut nbrs = vec![(0u32, 0.0); offsets[n]];
        for (&(a, b), &w) in &undirected {
            nbrs[fill[a as usize]] = (b, w);
            fill[a as usize] += 1;
            nbrs[fill[b as usize]] = (a, w);
            fill[b as usize] += 1;
        }
        let t_total = match options.objective {
            Objective::PlantedPartition => n as f64 * (n as f64 - 1.0),
            Objective::DegreeCorrected => m * m,
        };
        Self { n, m, t_total, objective: options.objective, offsets, nbrs, kout, kin }
    }

    fn neighbors(&self, v: usize) -> &[(u32, f64)] {
        &self.nbrs[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    fn term(&self, g: &GroupStats) -> f64 {
        match self.objective {
            Objective::PlantedPartition => g.size * (g.size - 1.0),
            Objective::DegreeCorrected => g.kout * g.kin,
        }
    }

    fn node_stats(&self, v: usize) -> GroupStats {
        GroupStats { size: 1.0, kout: self.kout[v], kin: self.kin[v] }
    }

    #[inline]
    pub fn fit(&self, m_in: f64, t_in: f64) -> f64 {
        fit_value(m_in, t_in, self.m, self.t_total)
    }

    /// Exact `(m_in, t_in)` of an assignment.
    pub fn internal_counts(&self, assignment: &[usize], groups: usize) -> (f64, f64) {
        let mut stats = vec![GroupStats::default(); groups];
        for (v, &g) in assignment.iter().enumerate() {
            stats[g].add(&self.node_stats(v));
        }
        let mut m_in = 0.0;
        for v in 0..self.n {
            for &(u, w) in self.neighbors(v) {
                if (u as usize) > v && assignment[u as usize] == assignment[v] {
                    m_in += w;
                }
            }
        }
        let t_in = stats.iter().map(|s| self.term(s)).sum();
        (m_in, t_in)
    }

    pub fn score(&self, assignment: &[usize], groups: usize) -> f64 {
        let (m_in, t_in) = self.internal_counts(assignment, groups);
        self.fit(m_in, t_in) - penalty(self.n, groups, self.m.round() as u64)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct GroupStats {
    size: f64,
    kout: f64,
    kin: f64,
}

impl GroupStats {
    fn add(&mut self, o: &GroupStats) {
        self.size += o.size;
        self.kout += o.kout;
        self.kin += o.kin;
    }

    fn sub(&mut self, o: &GroupStats) {
        self.size -= o.size;
        self.kout -= o.kout;
        self.kin -= o.kin;
    }

    fn plus(mut self, o: &GroupStats) -> GroupStats {
        self.add(o);
        self
    }

    fn minus(mut self, o: &GroupStats) -> GroupStats {
        self.sub(o);
        self
    }
}

/// Greedy best-pair merges from singletons down to `groups` groups.
fn agglomerate(p: &Problem, groups: usize, key: u64) -> Vec<usize> {
    let n = p.n;
    let mut stats: Vec<GroupStats> = (0..n).map(|v| p.node_stats(v)).collect();
    let mut alive = vec![true; n];
    let mut owner: Vec<usize> = (0..n).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut links: Vec<StableMap<usize, f64>> =
        (0..n).map(|v| p.neighbors(v).iter().map(|&(u, w)| (u as usize, w)).collect()).collect();
    let mut m_in = 0.0;
    let mut t_in: f64 = stats.iter().map(|s| p.term(s)).sum();
    let tie = |a: usize, b: usize| mix64(key ^ mix64((a as u64) << 32 | b as u64));

    for _ in 0..n.saturating_sub(groups) {
        // (value, tie key, a, b)
        let mut best: Option<(f64, u64, usize, usize)> = None;
        let consider = |val: f64, a: usize, b: usize, best: &mut Option<(f64, u64, usize, usize)>| {
            let t = tie(a.min(b), a.max(b));
            let better = match best {
                None => true,
                Some((bv, bt, _, _)) => val > *bv || (val == *bv && t < *bt),
            };
            if better {
                *best = Some((val, t, a, b));
            }
        };
        for a in 0..n {
            if !alive[a] {
                continue;
            }
            let base = t_in - p.term(&stats[a]);
            for (&b, &w) in &links[a] {
                if b <= a {
                    continue;
                }
                let t = base - p.term(&stats[b]) + p.term(&stats[a].plus(&stats[b]));
                consider(p.fit(m_in + w, t), a, b, &mut best);
            }
        }
        // Cheapest merge between groups that share no edge.
        let mut smallest: [Option<usize>; 2] = [None, None];
        let weight = |g: usize| stats[g].size + stats[g].kout + stats[g].kin;
        for g in (0..n).filter(|&g| alive[g]) {
            let wg = weight(g);
            match smallest {
                [None, _] => smallest[0] = Some(g),
                [Some(s0), None] => {
                    if wg < weight(s0) {
                        smallest = [Some(g), Some(s0)];
                    } else {
                        smallest[1] = Some(g);
                    }
                }
                [Some(s0), Some(s1)] => {
                    if wg < weight(s0) {
                        smallest = [Some(g), Some(s0)];
                    } else if wg < weight(s1) {
                        smallest[1] = Some(g);
                    }
                }
            }
        }
        if let [Some(a), Some(b)] = smallest {
            let w = links[a].get(&b).copied().unwrap_or(0.0);
            let t = t_in - p.term(&stats[a]) - p.term(&stats[b]) + p.term(&stats[a].plus(&stats[b]));
            consider(p.fit(m_in + w, t), a, b, &mut best);
        }

        let Some((_, _, a, b)) = best else { break };
        // Merge the smaller link map into the larger one.
        let (keep, gone) = if links[a].len() >= links[b].len() { (a, b) } else { (b, a) };
        let w = links[keep].remove(&gone).unwrap_or(0.0);
        let gone_links = std::mem::take(&mut links[gone]);
        for (other, wo) in gone_links {
            if other == keep {
                continue;
            }
            *links[keep].entry(other).or_default() += wo;
            let back = links[other].remove(&gone).unwrap_or(0.0);
            *links[other].entry(keep).or_default() += back;
        }
        t_in = t_in - p.term(&stats[keep]) - p.term(&stats[gone]);
        let gone_stats = stats[gone];
        stats[keep].add(&gone_stats);
        t_in += p.term(&stats[keep]);
        m_in += w;
        alive[gone] = false;
        let moved = std::mem::take(&mut members[gone]);
        for &v in &moved {
            owner[v] = keep;
        }
        members[keep].extend(moved);
    }

    let mut compact: BTreeMap<usize, usize> = BTreeMap::new();
    for g in (0..n).filter(|&g| alive[g]) {
        let next = compact.len();
        compact.insert(g, next);
    }
    owner.iter().map(|g| compact[g]).collect()
}

/// First-improvement single-node moves until no move raises the fit.
fn refine(p: &Problem, assignment: &mut [usize], groups: usize, rng: &mut CounterRng) {
    let mut stats = vec![GroupStats::default(); groups];
    for (v, &g) in assignment.iter().enumerate() {
        stats[g].add(&p.node_stats(v));
    }
    let (mut m_in, mut t_in) = p.internal_counts(assignment, groups);
    let mut current = p.fit(m_in, t_in);
    let mut order: Vec<usize> = (0..p.n).collect();
    rng.shuffle(&mut order);
    let mut to_group = vec![0.0; groups];

    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for &v in &order {
            let r = assignment[v];
            if stats[r].size <= 1.0 {
                continue;
            }
            to_group.iter_mut().for_each(|x| *x = 0.0);
            for &(u, w) in p.neighbors(v) {
                to_group[assignment[u as usize]] += w;
            }
            let node = p.node_stats(v);
            let base_t = t_in - p.term(&stats[r]) + p.term(&stats[r].minus(&node));
            let base_m = m_in - to_group[r];
            let mut best: Option<(f64, usize, f64, f64)> = None;
            for s in (0..groups).filter(|&s| s != r) {
                let t = base_t - p.term(&stats[s]) + p.term(&stats[s].plus(&node));
                let m = base_m + to_group[s];
                let val = p.fit(m, t);
                if val > current + IMPROVEMENT_EPS && best.is_none_or(|(bv, ..)| val > bv) {
                    best = Some((val, s, m, t));
                }
            }
            if let Some((val, s, m, t)) = best {
                stats[r].sub(&node);
                stats[s].add(&node);
                assignment[v] = s;
                m_in = m;
                t_in = t;
                current = val;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
}

fn canonical_assignment(assignment: &[usize], groups: usize) -> Vec<usize> {
    // Same ordering rule as `Partition::canonical`: size desc, then first
    // member (nodes are sorted by user id).
    let mut sizes = vec![0usize; groups];
    let mut first = vec![usize::MAX; groups];
    for (v, &g) in assignment.iter().enumerate() {
        sizes[g] += 1;
        first[g] = first[g].min(v);
    }
    let mut order: Vec<usize> = (0..groups).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(first[a].cmp(&first[b])));
    let mut remap = vec![0; groups];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    assignment.iter().map(|&g| remap[g]).collect()
}

/// Best partition into exactly `groups` groups over `restarts` seeded runs.
pub fn infer_partition(
    graph: &EndorsementGraph,
    groups: usize,
    seed: u64,
    restarts: usize,
    options: &InferenceOptions,
) -> Result<Partition> {
    if groups == 0 {
        return Err(Error::InvalidInput("B must be at least 1".into()));
    }
    let n = graph.node_count();
    if groups > n && !(groups == 1 && n == 0) {
        return Err(Error::TooFewNodes { nodes: n, groups });
    }
    let problem = Problem::new(graph, options);
    let nodes = graph.nodes();
    if groups == 1 {
        let score = problem.score(&vec![0; n], 1);
        return Ok(Partition::trivial(nodes.iter().cloned(), score));
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..restarts.max(1) {
        let key = derive_key(seed, "restart", restart as u64);
        let mut assignment = agglomerate(&problem, groups, key);
        let mut rng = CounterRng::new(derive_key(seed, "moves", restart as u64));
        refine(&problem, &mut assignment, groups, &mut rng);
        let assignment = canonical_assignment(&assignment, groups);
        let score = problem.score(&assignment, groups);
        let better = match &best {
            None => true,
            Some((bs, ba)) => score > *bs || (score == *bs && assignment < *ba),
        };
        if better {
            best = Some((score, assignment));
        }
    }
    let (score, assignment) = best.expect("at least one restart");
    let map = nodes.iter().cloned().zip(assignment).collect();
    Partition::new(map, groups, score).map(Partition::canonical)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cliques(k: usize) -> EndorsementGraph {
        let name = |c: usize, i: usize| format!("{}{i:02}", if c == 0 { 'a' } else { 'b' });
        let mut pairs = Vec::new();
        for c in 0..2 {
            for i in 0..k {
                for j in 0..k {
                    if i != j {
                        pairs.push((name(c, i), name(c, j)));
                    }
                }
            }
        }
        pairs.push((name(0, 0), name(1, 0)));
        EndorsementGraph::from_edges(pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
    }

    #[test]
    fn trivial_partition_for_one_group() {
        let g = EndorsementGraph::from_edges([]);
        let p = infer_partition(&g, 1, 0, 1, &InferenceOptions::default()).unwrap();
        assert_eq!(p.num_groups(), 1);
        assert!(p.is_empty());
        let g = EndorsementGraph::from_edges([("a", "b"), ("b", "c")]);
        let p = infer_partition(&g, 1, 0, 1, &InferenceOptions::default()).unwrap();
        assert_eq!(p.sizes(), [3]);
    }

    #[test]
    fn too_many_groups() {
        let g = EndorsementGraph::from_edges([("a", "b")]);
        assert!(matches!(
            infer_partition(&g, 3, 0, 1, &InferenceOptions::default()),
            Err(Error::TooFewNodes { nodes: 2, groups: 3 })
        ));
    }

    #[test]
    fn cliques_split_cleanly() {
        let g = two_cliques(10);
        for objective in [Objective::PlantedPartition, Objective::DegreeCorrected] {
            let p = infer_partition(&g, 2, 1, 2, &InferenceOptions { objective, binarize: false }).unwrap();
            let a = p.group_of("a00").unwrap();
            for u in g.nodes() {
                let expect_same = u.starts_with('a');
                assert_eq!(p.group_of(u).unwrap() == a, expect_same, "{objective:?} {u}");
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let g = two_cliques(6);
        let o = InferenceOptions::default();
        let a = infer_partition(&g, 3, 9, 3, &o).unwrap();
        let b = infer_partition(&g, 3, 9, 3, &o).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.score().to_bits(), b.score().to_bits());
    }

    #[test]
    fn incremental_counts_match_recount() {
        let g = two_cliques(5);
        let p = Problem::new(&g, &InferenceOptions::default());
        let mut assignment = agglomerate(&p, 3, 17);
        refine(&p, &mut assignment, 3, &mut CounterRng::new(5));
        let (m_in, t_in) = p.internal_counts(&assignment, 3);
        let mut sizes = [0.0f64; 3];
        assignment.iter().for_each(|&g| sizes[g] += 1.0);
        assert_eq!(t_in, sizes.iter().map(|s| s * (s - 1.0)).sum::<f64>());
        assert!(m_in <= p.m);
    }
}
