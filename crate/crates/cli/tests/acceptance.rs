//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Set `POLARSCOPE_BLESS=1` to rewrite the golden outputs instead of
//! comparing against them.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chrono::{TimeZone, Utc};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use polarscope::graphs::{build_endorsement_graph, build_user_news_graph, EndorsementGraph, UrlPolicy};
use polarscope::groups::{select_model, InferenceOptions, Partition};
use polarscope::ingest::{load_topic_config, EventKind, InteractionEvent, Sentiment, TopicMatcher};
use polarscope::newsflow::{
    group_sentiment_breakdown, negativity_share, round_to_thousands, virality, virality_of_counts,
};
use polarscope::polarization::{aei, log_omega, rmi};
use polarscope::synth::{
    gen_planted_density_graph, gen_planted_retweet_stream, oracle_count_tables, PlantedStreamSpec,
};

use common::*;

type Check = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_virality() -> Check {
    for (l, r, p, want) in [(0, 0, 0, 0), (2, 1, 3, 83), (1000, 500, 100, 40100)] {
        let got = virality(l, r, p).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("virality({l},{r},{p}) = {got}, want {want}"))?;
    }
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..1000 {
        let (l, r, p): (u32, u32, u32) = (rng.random_range(0..=1 << 31), rng.random_range(0..=1 << 31), rng.random());
        let want = 30 * u128::from(l) + 20 * u128::from(r) + u128::from(p);
        let got = virality(i64::from(l), i64::from(r), i64::from(p)).map_err(|e| e.to_string())?;
        ensure(u128::from(got) == want, || format!("virality({l},{r},{p}) = {got}, want {want}"))?;
    }
    ensure(virality(-1, 0, 0).is_err(), || "negative count accepted".into())?;
    Ok("3 tabled examples and 1000 random triples exact".into())
}

fn pair_graph(edges: &[(&str, &str)], groups: &[(&str, usize)]) -> (EndorsementGraph, Partition) {
    let g = EndorsementGraph::from_edges(edges.iter().copied());
    let p = Partition::new(groups.iter().map(|&(u, k)| (u.to_owned(), k)).collect(), 2, 0.0).unwrap();
    (g, p)
}

fn c2_aei() -> Check {
    let groups = [("a", 0), ("b", 0), ("c", 1), ("d", 1)];
    let cases: [(&[(&str, &str)], f64); 3] = [
        (&[("a", "b"), ("c", "d")], 1.0),
        (&[("a", "c"), ("d", "b")], -1.0),
        (&[("a", "b"), ("a", "c"), ("c", "b")], 0.0),
    ];
    for (i, (edges, want)) in cases.iter().enumerate() {
        let gs: &[(&str, usize)] = if i == 2 { &[("a", 0), ("b", 0), ("c", 1)] } else { &groups };
        let (g, p) = pair_graph(edges, gs);
        let got = aei(&g, &p, 0, 1).map_err(|e| e.to_string())?.aei;
        ensure(got == Some(*want), || format!("case {i}: aei = {got:?}, want {want}"))?;
    }
    let (p_in, p_out) = (0.06, 0.02);
    let expected = (p_in - p_out) / (p_in + p_out);
    let mut total = 0.0;
    for seed in 0..100 {
        let (g, p) = gen_planted_density_graph(&[250, 250], p_in, p_out, seed);
        total += aei(&g, &p, 0, 1).map_err(|e| e.to_string())?.aei.ok_or("undefined aei")?;
    }
    let mean = total / 100.0;
    ensure((mean - expected).abs() <= 0.02, || format!("Monte-Carlo mean {mean:.4} vs {expected:.4}"))?;
    Ok(format!("+1/-1/0 exact; Monte-Carlo mean {mean:.4} vs {expected:.4} (n=500, 100 seeds)"))
}

fn random_partition(rng: &mut StdRng, users: &[String], b: usize) -> Partition {
    loop {
        let map: BTreeMap<String, usize> = users.iter().map(|u| (u.clone(), rng.random_range(0..b))).collect();
        if let Ok(p) = Partition::new(map, b, 0.0) {
            return p;
        }
    }
}

fn permuted(p: &Partition, rng: &mut StdRng) -> Partition {
    let b = p.num_groups();
    let mut perm: Vec<usize> = (0..b).collect();
    for i in (1..b).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let map = p.assignment().iter().map(|(u, &g)| (u.clone(), perm[g])).collect();
    Partition::new(map, b, 0.0).unwrap()
}

fn c3_rmi() -> Check {
    let mut rng = StdRng::seed_from_u64(3);
    let users: Vec<String> = (0..300).map(|i| format!("u{i:04}")).collect();
    let p = random_partition(&mut rng, &users, 3);
    ensure(rmi(&p, &p, None) == Some(1.0), || format!("identical partitions give {:?}", rmi(&p, &p, None)))?;
    let trivial = Partition::trivial(users.iter().cloned(), 0.0);
    ensure(rmi(&trivial, &p, None) == Some(0.0), || "trivial partition is not 0".into())?;
    for i in 0..100 {
        let n = rng.random_range(20..400);
        let us: Vec<String> = (0..n).map(|k| format!("v{k:04}")).collect();
        let (ka, kb) = (rng.random_range(2..5), rng.random_range(2..5));
        let a = random_partition(&mut rng, &us, ka);
        // correlated half the time, so non-zero values are exercised too
        let b = if i % 2 == 0 { permuted(&a, &mut rng) } else { random_partition(&mut rng, &us, kb) };
        let (ab, ba) = (rmi(&a, &b, None), rmi(&b, &a, None));
        ensure(ab == ba, || format!("pair {i}: asymmetric {ab:?} vs {ba:?}"))?;
        let (pa, pb) = (permuted(&a, &mut rng), permuted(&b, &mut rng));
        let relabeled = rmi(&pa, &pb, None);
        let close = match (ab, relabeled) {
            (Some(x), Some(y)) => (x - y).abs() <= 1e-12,
            _ => false,
        };
        ensure(close, || format!("pair {i}: relabeling changed {ab:?} to {relabeled:?}"))?;
    }
    let big: Vec<String> = (0..1000).map(|k| format!("w{k:04}")).collect();
    let mut zero = 0;
    for _ in 0..200 {
        let a = random_partition(&mut rng, &big, 2);
        let b = random_partition(&mut rng, &big, 2);
        zero += usize::from(rmi(&a, &b, None) == Some(0.0));
    }
    ensure(zero >= 190, || format!("only {zero}/200 independent pairs clamp to 0"))?;
    Ok(format!("identity 1.0, trivial 0, 100 pairs symmetric and relabel-invariant, {zero}/200 independent at 0"))
}

/// Non-increasing positive parts of `n`.
fn integer_partitions(n: u64, max: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for part in (1..=n.min(max)).rev() {
        prefix.push(part);
        integer_partitions(n - part, part, prefix, out);
        prefix.pop();
    }
}

fn c4_log_omega() -> Check {
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for total in 1..=12u64 {
        let mut margins = Vec::new();
        integer_partitions(total, total, &mut Vec::new(), &mut margins);
        for rows in &margins {
            for cols in &margins {
                let count = oracle_count_tables(rows, cols).map_err(|e| e.to_string())?;
                let got = log_omega(rows, cols).map_err(|e| e.to_string())?;
                let want = (count as f64).ln();
                let err = (got - want).abs();
                worst = worst.max(err);
                ensure(err <= 1e-9 * want.max(1.0), || format!("{rows:?} x {cols:?}: {got} vs ln {count}"))?;
                checked += 1;
            }
        }
    }
    // margin order and zero margins do not change the count
    let permuted = log_omega(&[1, 3, 0, 2], &[2, 0, 4]).map_err(|e| e.to_string())?;
    let sorted = log_omega(&[3, 2, 1], &[4, 2]).map_err(|e| e.to_string())?;
    ensure((permuted - sorted).abs() <= 1e-12, || "margin order matters".into())?;
    for (rows, cols, want) in [(&[2u64, 2][..], &[2u64, 2][..], 3f64.ln()), (&[1, 1, 1], &[1, 1, 1], 6f64.ln())] {
        let got = log_omega(rows, cols).map_err(|e| e.to_string())?;
        ensure((got - want).abs() <= 1e-12, || format!("{rows:?} x {cols:?}: {got} vs {want}"))?;
    }
    Ok(format!("{checked} margin pairs (totals 1..=12) match enumeration, max error {worst:.1e}; ln 3, ln 6 exact"))
}

/// Fraction of `truth` users given the matching group under the best
/// relabeling; users missing from `inferred` count as wrong.
fn agreement(truth: &Partition, inferred: &Partition) -> f64 {
    let b = truth.num_groups();
    let mut perms = vec![vec![]];
    for _ in 0..b {
        perms = perms
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..b).filter(|g| !p.contains(g)).map(|g| [p.clone(), vec![g]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    let best = perms
        .iter()
        .map(|perm| {
            truth.assignment().iter().filter(|(u, &g)| inferred.group_of(u).is_some_and(|h| perm[g] == h)).count()
        })
        .max()
        .unwrap_or(0);
    best as f64 / truth.len() as f64
}

fn c5_recovery() -> Check {
    let opts = InferenceOptions::default();
    let spec = PlantedStreamSpec::new(&[("A", 100), ("B", 100), ("C", 100)], 1, 1500, 0.9, 0.1, 5);
    let stream = gen_planted_retweet_stream(&spec).map_err(|e| e.to_string())?;
    let g = build_endorsement_graph(&stream.events, None);
    let r = select_model(&g, 3, 5, 3, &opts).map_err(|e| e.to_string())?;
    ensure(r.chosen_b == 3, || format!("planted stream: chosen B = {}", r.chosen_b))?;
    let agree = agreement(&stream.truth, r.chosen());
    ensure(agree >= 0.98, || format!("planted stream: agreement {agree:.4}"))?;
    let mut null_ones = 0;
    for seed in 0..50 {
        let spec = PlantedStreamSpec::new(&[("all", 200)], 1, 800, 1.0, 0.0, 1000 + seed);
        let stream = gen_planted_retweet_stream(&spec).map_err(|e| e.to_string())?;
        let g = build_endorsement_graph(&stream.events, None);
        null_ones += usize::from(select_model(&g, 3, seed, 3, &opts).map_err(|e| e.to_string())?.chosen_b == 1);
    }
    ensure(null_ones >= 45, || format!("null graphs: B=1 in {null_ones}/50"))?;
    Ok(format!("planted: B=3, agreement {agree:.4}; null: B=1 in {null_ones}/50"))
}

fn share(id: &str, user: &str, url: &str, sentiment: Sentiment, v: u64) -> InteractionEvent {
    InteractionEvent {
        id: id.into(),
        created_at: Utc.with_ymd_and_hms(2021, 3, 1, 12, 0, 0).unwrap(),
        author_id: user.into(),
        text: "korona".into(),
        kind: EventKind::Original,
        retweeted_author_id: None,
        retweeted_status_id: None,
        urls: vec![url.into()],
        // engagement chosen so that 30 likes + replies reproduce v exactly
        like_count: v / 30,
        retweet_count: 0,
        reply_count: v % 30,
        sentiment: Some(sentiment),
        retweeted_text: None,
        retweeted_urls: None,
    }
}

struct GroupSpec {
    label: &'static str,
    users: usize,
    pos: usize,
    neg: usize,
    virality_pos: u64,
    virality_neg: u64,
    virality_total: u64,
}

/// One share per user; each sentiment class splits its virality evenly,
/// remainder on the first share.
fn news_fixture(url: &str, groups: &[GroupSpec]) -> (Vec<InteractionEvent>, Partition) {
    let mut events = Vec::new();
    let mut assignment = BTreeMap::new();
    for (gi, g) in groups.iter().enumerate() {
        let neutral = g.users - g.pos - g.neg;
        let classes = [
            (Sentiment::Positive, g.pos, g.virality_pos),
            (Sentiment::Negative, g.neg, g.virality_neg),
            (Sentiment::Neutral, neutral, g.virality_total - g.virality_pos - g.virality_neg),
        ];
        let mut k = 0;
        for (sentiment, count, v) in classes {
            for j in 0..count {
                let each = v / count as u64 + if j == 0 { v % count as u64 } else { 0 };
                let user = format!("g{gi}u{k:03}");
                events.push(share(&format!("t{gi}-{k}"), &user, url, sentiment, each));
                assignment.insert(user, gi);
                k += 1;
            }
        }
    }
    let p = Partition::new(assignment, groups.len(), 0.0)
        .unwrap()
        .with_labels(groups.iter().map(|g| g.label.to_owned()).collect())
        .unwrap();
    (events, p)
}

fn c6_newsflow() -> Check {
    let url = "https://www.hs.fi/kotimaa/art-2000007000001.html?utm_source=twitter";
    let fig = [
        GroupSpec {
            label: "Conservative Right",
            users: 16,
            pos: 2,
            neg: 1,
            virality_pos: 120,
            virality_neg: 55_000,
            virality_total: 78_000,
        },
        GroupSpec {
            label: "Liberal Left",
            users: 16,
            pos: 3,
            neg: 2,
            virality_pos: 90,
            virality_neg: 300,
            virality_total: 27_000,
        },
        GroupSpec {
            label: "Moderate Right",
            users: 33,
            pos: 2,
            neg: 4,
            virality_pos: 60,
            virality_neg: 4_000,
            virality_total: 48_000,
        },
    ];
    // (tweets, pos, neg) and virality in thousands (total, pos, neg)
    let want = [((16, 2, 1), (78, 0, 55)), ((16, 3, 2), (27, 0, 0)), ((33, 2, 4), (48, 0, 4))];
    let (events, partition) = news_fixture(url, &fig);
    let (graph, _) = build_user_news_graph(&events, virality_of_counts, &UrlPolicy::default());
    let key = graph.articles().keys().next().ok_or("no article")?.clone();
    ensure(graph.articles().len() == 1, || "tracking parameters split the article".into())?;
    let b = group_sentiment_breakdown(&graph, &partition, &key).map_err(|e| e.to_string())?;
    for (spec, ((t, p, n), (vt, vp, vn))) in fig.iter().zip(want) {
        let g = b.group(spec.label).ok_or_else(|| format!("missing {}", spec.label))?;
        let got = ((g.tweet_count, g.pos_count, g.neg_count), (g.virality_total, g.virality_pos, g.virality_neg));
        let got = (got.0, (round_to_thousands(got.1 .0), round_to_thousands(got.1 .1), round_to_thousands(got.1 .2)));
        ensure(got == ((t, p, n), (vt, vp, vn)), || format!("{}: {got:?}", spec.label))?;
    }
    let (csv, _) =
        polarscope_cli::commands::newsflow::viral_tables(&graph, &partition, 1).map_err(|e| e.to_string())?;
    let row = String::from_utf8(csv).unwrap();
    let row = row.lines().nth(1).ok_or("empty viral table")?;
    ensure(row.contains(",16,2,1,78000,"), || format!("viral table row: {row}"))?;

    let seiska = [GroupSpec {
        label: "Conservative Right",
        users: 30,
        pos: 0,
        neg: 11,
        virality_pos: 0,
        virality_neg: 98_400,
        virality_total: 120_000,
    }];
    let (events, partition) = news_fixture("https://www.seiska.fi/uutiset/a-1", &seiska);
    let (graph, _) = build_user_news_graph(&events, virality_of_counts, &UrlPolicy::default());
    let key = graph.articles().keys().next().ok_or("no article")?.clone();
    let b = group_sentiment_breakdown(&graph, &partition, &key).map_err(|e| e.to_string())?;
    let cr = b.group("Conservative Right").ok_or("missing group")?;
    ensure(cr.tweet_count == 30 && cr.neg_count == 11, || format!("counts {cr:?}"))?;
    ensure(round_to_thousands(b.total().virality_total) == 120, || "total virality".into())?;
    let s = negativity_share(&b, "Conservative Right").ok_or("undefined share")?;
    ensure((s - 0.82).abs() <= 0.005, || format!("negativity share {s}"))?;
    Ok(format!("16/16/33 counts and 78/27/48 virality reproduced; negativity share {s:.3}"))
}

fn c7_determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = fixture("small_corpus.toml");
    let (s1, s2) = (tmp.path().join("synth1"), tmp.path().join("synth2"));
    synth(&spec, &s1);
    synth(&spec, &s2);
    let d = diff(&snapshot(&s1), &snapshot(&s2));
    ensure(d.is_empty(), || format!("synth differs: {d:?}"))?;

    let run_dir = tmp.path().join("run");
    let cfg = stage(&run_dir, &fixture("small_run.toml"));
    std::fs::rename(&s1, run_dir.join("corpus")).map_err(|e| e.to_string())?;
    let cfg = cfg.to_string_lossy().into_owned();
    let variants: [&[&str]; 2] = [&[], &["--subset", "exclude-candidates", "--windows", "days:10"]];
    let commands = ["validate", "infer-groups", "trends", "align", "newsflow"];
    let mut files = 0;
    let mut runs = Vec::new();
    // the first pass starts with a cold cache on one thread, the second
    // reuses the cache on four
    for jobs in ["1", "4"] {
        for extra in variants {
            for cmd in commands {
                let mut args = vec!["--config", &cfg, "--jobs", jobs, cmd];
                args.extend_from_slice(extra);
                polarscope(args).map_err(|e| format!("{cmd}: {e}"))?;
            }
        }
        let snap = snapshot(&run_dir.join("out"));
        files = snap.len();
        runs.push(snap);
    }
    let d = diff(&runs[0], &runs[1]);
    ensure(d.is_empty(), || format!("reruns differ: {d:?}"))?;
    Ok(format!("synth and {} commands x 2 variants byte-identical over {files} files", commands.len()))
}

fn c8_golden() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let started = Instant::now();
    synth(&golden("corpus.toml"), &tmp.path().join("corpus"));
    let cfg = stage(tmp.path(), &golden("polarscope.toml"));
    let cfg = cfg.to_string_lossy().into_owned();
    for cmd in ["validate", "infer-groups", "trends", "align", "newsflow"] {
        polarscope(["--config", &cfg, cmd]).map_err(|e| format!("{cmd}: {e}"))?;
    }
    let elapsed = started.elapsed();
    let events = std::fs::read(tmp.path().join("corpus/events.csv")).map_err(|e| e.to_string())?;
    let n_events = events.iter().filter(|&&b| b == b'\n').count() - 1;
    drop(events);
    ensure(n_events >= 1_000_000, || format!("golden corpus has only {n_events} events"))?;

    let produced = snapshot(&tmp.path().join("out"));
    let expected_dir = golden("expected");
    if std::env::var_os("POLARSCOPE_BLESS").is_some() {
        let _ = std::fs::remove_dir_all(&expected_dir);
        for (rel, bytes) in &produced {
            let path = expected_dir.join(rel);
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(path, bytes).unwrap();
        }
        return Ok(format!("blessed {} golden files ({n_events} events)", produced.len()));
    }
    let d = diff(&produced, &snapshot(&expected_dir));
    ensure(d.is_empty(), || format!("{} files differ from golden, e.g. {:?}", d.len(), &d[..d.len().min(5)]))?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    // the budget is stated for four cores; scale it on smaller machines
    let budget = Duration::from_secs(300 * 4 / cores.clamp(1, 4) as u64);
    ensure(elapsed <= budget, || format!("took {elapsed:.0?}, budget {budget:.0?} on {cores} cores"))?;
    Ok(format!(
        "{} files bit-exact, {n_events} events, {:.0?} on {cores} cores (budget {budget:.0?})",
        produced.len(),
        elapsed
    ))
}

fn c9_matcher() -> Check {
    let topics = load_topic_config(&repo_config_dir().join("topics_table_a1.toml")).map_err(|e| e.to_string())?;
    let matcher = TopicMatcher::new(&topics);
    let src = std::fs::read_to_string(fixture("topic_cases.tsv")).map_err(|e| e.to_string())?;
    let mut cases = 0;
    let mut deviations = Vec::new();
    for line in src.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let (text, expected) = line.split_once('\t').ok_or_else(|| format!("bad fixture line {line:?}"))?;
        let expected: BTreeSet<&str> = if expected == "-" { BTreeSet::new() } else { expected.split(',').collect() };
        let mut e = share("x", "u", "https://hs.fi/a", Sentiment::Neutral, 0);
        e.text = text.into();
        let got: BTreeSet<String> = matcher
            .event_mask(&e)
            .iter()
            .zip(&topics)
            .filter(|(hit, _)| **hit)
            .map(|(_, t)| t.topic_id().to_owned())
            .collect();
        let got: BTreeSet<&str> = got.iter().map(String::as_str).collect();
        if got != expected {
            deviations.push(format!("{text:?}: {got:?}"));
        }
        cases += 1;
    }
    ensure(cases >= 50, || format!("only {cases} cases"))?;
    ensure(deviations.is_empty(), || deviations.join("; "))?;
    Ok(format!("{cases} cases, 0 deviations"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "virality formula", Duration::from_secs(1), c1_virality),
        (2, "AEI boundaries and Monte-Carlo", Duration::from_secs(30), c2_aei),
        (3, "RMI properties", Duration::from_secs(60), c3_rmi),
        (4, "log_omega oracle equivalence", Duration::from_secs(60), c4_log_omega),
        (5, "partition recovery", Duration::from_secs(300), c5_recovery),
        (6, "news-flow paper round-trips", Duration::from_secs(10), c6_newsflow),
        (7, "CLI determinism", Duration::MAX, c7_determinism),
        (8, "end-to-end golden run", Duration::MAX, c8_golden),
        (9, "topic matcher fidelity", Duration::from_secs(1), c9_matcher),
    ];
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (n, name, budget, check) in criteria {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let t = Instant::now();
        let result = check();
        let took = t.elapsed();
        let result = match result {
            Ok(detail) if took > budget => Err(format!("{detail}; exceeded {budget:?}")),
            other => other,
        };
        let (status, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += usize::from(result.is_err());
        println!("criterion {n} {status} {name} ({:.2}s): {detail}", took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
