//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Adjacency and distances here come from an oracle written straight from the
//! recursive crossed-cube definition, not from the library's neighbour rule.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use cqembed::embedder::{dimension_for, embed, embed_fallback, Embedding, SearchBudget};
use cqembed::io::{export, import_embedding, ExportBundle, Format, EMBEDDING_STEM};
use cqembed::topology::{build_crossed_cube, build_hypercube, build_pqt};
use cqembed::verifier::{check_against_golden, repair_ledger, verify, TableId};

const COUNTS_LIMIT: Duration = Duration::from_secs(5);
const DIAMETER_LIMIT: Duration = Duration::from_secs(30);
const N8_LIMIT: Duration = Duration::from_secs(60);
/// Largest routed path length the embedding claims.
const MAX_DILATION: u32 = 2;

/// Adjacency in CQ_m by recursion on the top bit. Equal top bits recurse
/// into the half. Otherwise, with `k = m - 1` remaining bits, bit `k - 1`
/// must agree when `k` is odd and every lower pair must be pair-related.
fn oracle_adjacent(u: u32, v: u32, m: u32) -> bool {
    if m == 0 {
        return false;
    }
    if m == 1 {
        return u != v;
    }
    let top = 1 << (m - 1);
    let rest = top - 1;
    if u & top == v & top {
        return oracle_adjacent(u & rest, v & rest, m - 1);
    }
    // Halves differ: the remaining m - 1 bits must be joined by the
    // crossed matching.
    let k = m - 1;
    if k % 2 == 1 && (u >> (k - 1)) & 1 != (v >> (k - 1)) & 1 {
        return false;
    }
    (0..k / 2).all(|i| {
        let a = (u >> (2 * i)) & 3;
        let b = (v >> (2 * i)) & 3;
        matches!((a, b), (0, 0) | (2, 2) | (1, 3) | (3, 1))
    })
}

struct Oracle {
    m: u32,
    adjacency: Vec<Vec<u32>>,
}

impl Oracle {
    fn new(m: u32) -> Self {
        let size = 1u32 << m;
        let mut adjacency = vec![Vec::new(); size as usize];
        for u in 0..size {
            for v in (u + 1)..size {
                if oracle_adjacent(u, v, m) {
                    adjacency[u as usize].push(v);
                    adjacency[v as usize].push(u);
                }
            }
        }
        Oracle { m, adjacency }
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        u < self.adjacency.len() && self.adjacency[u].contains(&(v as u32))
    }

    /// BFS distance, giving up beyond `limit`.
    fn distance(&self, s: usize, t: usize, limit: u32) -> Option<u32> {
        if s == t {
            return Some(0);
        }
        let mut dist = vec![u32::MAX; self.adjacency.len()];
        let mut queue = VecDeque::from([s]);
        dist[s] = 0;
        while let Some(u) = queue.pop_front() {
            if dist[u] >= limit {
                break;
            }
            for &w in &self.adjacency[u] {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    if w == t {
                        return Some(dist[w]);
                    }
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// Checks an embedding against the oracle alone. Returns a problem
/// description or the largest path length.
fn oracle_check(e: &Embedding, oracle: &Oracle) -> Result<u32, String> {
    if e.m() != oracle.m {
        return Err(format!("host is CQ_{}, oracle is CQ_{}", e.m(), oracle.m));
    }
    let images: HashSet<usize> = e.vertex_map.iter().copied().collect();
    if images.len() != e.guest.vertex_count() {
        return Err(format!(
            "{} images for {} vertices",
            images.len(),
            e.guest.vertex_count()
        ));
    }
    if e.edge_paths.len() != e.guest.edge_count() {
        return Err(format!(
            "{} paths for {} edges",
            e.edge_paths.len(),
            e.guest.edge_count()
        ));
    }
    let mut longest = 0;
    for (a, b) in e.guest.edges() {
        let p = e
            .path_for(a, b)
            .ok_or_else(|| format!("edge {a}-{b} has no path"))?;
        let (x, y) = (e.image(p.from), e.image(p.to));
        if p.path.first() != Some(&x) || p.path.last() != Some(&y) {
            return Err(format!("path of {a}-{b} does not join the images"));
        }
        if let Some(w) = p.path.windows(2).find(|w| !oracle.adjacent(w[0], w[1])) {
            return Err(format!("hop {}-{} is not an edge", w[0], w[1]));
        }
        let hops = p.path.len() as u32 - 1;
        match oracle.distance(x, y, MAX_DILATION) {
            Some(d) if d <= MAX_DILATION => {}
            other => return Err(format!("images of {a}-{b} at distance {other:?}")),
        }
        longest = longest.max(hops);
    }
    Ok(longest)
}

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn structure_counts() -> Outcome {
    let start = Instant::now();
    for n in 1..=10u32 {
        let g = build_pqt(n).unwrap();
        let expected = (3usize.pow(n) - 1) / 2;
        if g.vertex_count() != expected {
            return outcome(
                false,
                format!(
                    "PQT_{n} has {} vertices, expected {expected}",
                    g.vertex_count()
                ),
            );
        }
    }
    for m in 1..=12u32 {
        let g = build_crossed_cube(m).unwrap();
        if g.vertex_count() != 1 << m {
            return outcome(false, format!("CQ_{m} has {} vertices", g.vertex_count()));
        }
        if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) != m as usize) {
            return outcome(
                false,
                format!("CQ_{m} vertex {v} has degree {}", g.degree(v)),
            );
        }
    }
    let took = start.elapsed();
    outcome(
        took < COUNTS_LIMIT,
        format!("n 1..=10, m 1..=12 in {took:.2?} (limit {COUNTS_LIMIT:?})"),
    )
}

fn dimension_table() -> Outcome {
    let pairs = [
        (2, 2),
        (3, 4),
        (4, 6),
        (5, 7),
        (6, 9),
        (8, 12),
        (9, 14),
        (10, 16),
    ];
    let wrong: Vec<String> = pairs
        .iter()
        .filter_map(|&(n, m)| {
            let got = dimension_for(n).ok();
            (got != Some(m)).then(|| format!("n={n}: {got:?} != {m}"))
        })
        .collect();
    outcome(
        wrong.is_empty(),
        if wrong.is_empty() {
            format!("{} pairs exact", pairs.len())
        } else {
            wrong.join("; ")
        },
    )
}

fn diameters() -> Outcome {
    let start = Instant::now();
    let mut wrong = Vec::new();
    for m in 2..=12u32 {
        let cq = build_crossed_cube(m).unwrap().diameter().unwrap();
        let q = build_hypercube(m).unwrap().diameter().unwrap();
        if cq != (m + 2) / 2 {
            wrong.push(format!("CQ_{m}: {cq}"));
        }
        if q != m {
            wrong.push(format!("Q_{m}: {q}"));
        }
    }
    let took = start.elapsed();
    let pass = wrong.is_empty() && took < DIAMETER_LIMIT;
    let detail = if wrong.is_empty() {
        format!("ceil((m+1)/2) and m for m 2..=12 in {took:.2?} (limit {DIAMETER_LIMIT:?})")
    } else {
        wrong.join("; ")
    };
    outcome(pass, detail)
}

fn golden_flat() -> Outcome {
    let checks = [
        (2, TableId::F5),
        (2, TableId::T6),
        (3, TableId::T1),
        (3, TableId::T6),
        (4, TableId::T2),
        (4, TableId::T6),
    ];
    let mut rows = 0;
    let mut problems = Vec::new();
    for (n, table) in checks {
        let e = embed(n).unwrap();
        let report = check_against_golden(&e, table).unwrap();
        rows += report.rows.len();
        for r in report.mismatches() {
            problems.push(format!(
                "n={n} {table} {}: {} vs {}",
                r.row, r.expected, r.actual
            ));
        }
    }
    // Dilations of the n = 3 block are 1, 1, 2.
    let e = embed(3).unwrap();
    let dil: Vec<usize> = ["01", "02", "03"]
        .iter()
        .map(|c| {
            let to = e.guest.id_of_address(&c.parse().unwrap()).unwrap();
            e.path_for(0, to).unwrap().path.len() - 1
        })
        .collect();
    if dil != [1, 1, 2] {
        problems.push(format!("n=3 dilations {dil:?}"));
    }
    let detail = if problems.is_empty() {
        format!("{rows} rows, 0 mismatches")
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

fn dilation_two() -> Outcome {
    let mut notes = Vec::new();
    for n in 2..=8u32 {
        let start = Instant::now();
        let e = match embed(n) {
            Ok(e) => e,
            Err(err) => return outcome(false, format!("n={n}: {err}")),
        };
        let took = start.elapsed();
        let oracle = Oracle::new(e.m());
        match oracle_check(&e, &oracle) {
            Ok(d) if d <= MAX_DILATION => notes.push(format!("n={n} d{d}")),
            Ok(d) => return outcome(false, format!("n={n}: dilation {d}")),
            Err(msg) => return outcome(false, format!("n={n}: {msg}")),
        }
        if n == 8 {
            notes.push(format!("n=8 embed in {took:.2?}"));
            if took >= N8_LIMIT {
                return outcome(false, format!("n=8 took {took:.2?} (limit {N8_LIMIT:?})"));
            }
        }
    }
    outcome(true, notes.join(", "))
}

fn ambiguity_containment() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for n in 2..=4u32 {
        let r = verify(&embed(n).unwrap());
        if r.repairs != 0 || r.fallbacks != 0 {
            pass = false;
        }
        notes.push(format!("n={n} r{} f{}", r.repairs, r.fallbacks));
    }
    let mut lines = Vec::new();
    for n in 5..=8u32 {
        let e = embed(n).unwrap();
        let r = verify(&e);
        if !r.holds() {
            pass = false;
        }
        let ledger = repair_ledger(&e);
        if ledger.len() != r.repairs as usize {
            pass = false;
        }
        let mut by_question: BTreeMap<&str, usize> = BTreeMap::new();
        for entry in &ledger {
            *by_question.entry(entry.ambiguity.as_str()).or_default() += 1;
        }
        notes.push(format!("n={n} r{} f{}", r.repairs, r.fallbacks));
        for (question, count) in by_question {
            lines.push(format!("      n={n}: {count} repaired edges <- {question}"));
        }
    }
    let mut detail = notes.join(", ");
    for l in lines {
        detail.push('\n');
        detail.push_str(&l);
    }
    outcome(pass, detail)
}

fn search_oracle() -> Outcome {
    let mut notes = Vec::new();
    for n in 2..=5u32 {
        let guest = build_pqt(n).unwrap();
        let host = build_crossed_cube(dimension_for(n).unwrap()).unwrap();
        let e = match embed_fallback(&guest, &host, &[(0, 0)], SearchBudget::default()) {
            Ok(e) => e,
            Err(err) => return outcome(false, format!("n={n}: {err}")),
        };
        let oracle = Oracle::new(e.m());
        match oracle_check(&e, &oracle) {
            Ok(d) if d <= MAX_DILATION => notes.push(format!("n={n} d{d}")),
            Ok(d) => return outcome(false, format!("n={n}: dilation {d}")),
            Err(msg) => return outcome(false, format!("n={n}: {msg}")),
        }
    }
    outcome(true, notes.join(", "))
}

fn round_trip() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    for n in [3u32, 5] {
        let e = embed(n).unwrap();
        let before = verify(&e);
        let mut bundle = ExportBundle::new(Format::Json);
        bundle.embedding = Some(e);
        let target = dir.path().join(format!("n{n}"));
        export(&bundle, &target).unwrap();
        let back = import_embedding(&target.join(format!("{EMBEDDING_STEM}.json"))).unwrap();
        let after = verify(&back);
        if after != before {
            return outcome(false, format!("n={n}: {before:?} became {after:?}"));
        }
    }
    outcome(true, "n=3, n=5 identical")
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("structure counts", structure_counts),
        ("dimension table", dimension_table),
        ("diameter halving", diameters),
        ("golden flat tables", golden_flat),
        ("dilation 2 for n 2..=8", dilation_two),
        ("ambiguity containment", ambiguity_containment),
        ("search oracle n 2..=5", search_oracle),
        ("json round trip", round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
