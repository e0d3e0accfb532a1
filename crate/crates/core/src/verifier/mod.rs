//! Independent checks of a finished embedding.
//!
//! Nothing the embedder recorded is trusted except the repair and fallback
//! annotations, which are only counted. Injectivity, hop validity, coverage
//! of the guest edges and all four cost measures are recomputed from the
//! raw graphs.

mod golden;

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedder::{Embedding, RouteTag, RuleTag};
use crate::topology::{cq_adjacent_raw, GraphKind};

pub use golden::{check_against_golden, GoldenReport, GoldenRow, RowVerdict, TableId};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("table {table} has rows for n in {heights:?}, embedding has n = {n}")]
    ShapeMismatch {
        table: TableId,
        n: u32,
        heights: Vec<u32>,
    },
}

/// Cost measures and structural verdicts for one embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Longest routed path, in hops.
    pub dilation: u32,
    /// Most guest-edge paths crossing one undirected host edge.
    pub congestion: u32,
    /// Host vertices per guest vertex.
    #[serde(with = "ratio_text")]
    pub expansion: Ratio<u64>,
    /// Most guest vertices sharing one host vertex.
    pub load: u32,
    pub injective: bool,
    pub paths_valid: bool,
    pub repairs: u32,
    pub fallbacks: u32,
}

impl MetricsReport {
    /// The claim under test: one-to-one, every path valid, dilation at most 2.
    pub fn holds(&self) -> bool {
        self.injective && self.paths_valid && self.dilation <= 2
    }

    /// Aligned two-column text table.
    pub fn to_text(&self) -> String {
        let rows = [
            ("dilation", self.dilation.to_string()),
            ("congestion", self.congestion.to_string()),
            ("expansion", format_ratio(&self.expansion)),
            ("load", self.load.to_string()),
            ("injective", self.injective.to_string()),
            ("paths_valid", self.paths_valid.to_string()),
            ("repairs", self.repairs.to_string()),
            ("fallbacks", self.fallbacks.to_string()),
        ];
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k:<12} {v}\n"));
        }
        out
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn format_ratio(r: &Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

mod ratio_text {
    use num_rational::Ratio;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_ratio(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let text = String::deserialize(d)?;
        let (a, b) = text
            .split_once('/')
            .ok_or_else(|| de::Error::custom(format!("expansion {text:?} is not p/q")))?;
        let p: u64 = a.trim().parse().map_err(de::Error::custom)?;
        let q: u64 = b.trim().parse().map_err(de::Error::custom)?;
        if q == 0 {
            return Err(de::Error::custom("expansion has a zero denominator"));
        }
        Ok(Ratio::new(p, q))
    }
}

/// Whether `u - v` is a host edge, checked against both the stored
/// adjacency and, for crossed cubes, the pair-related rule itself.
fn hop_ok(e: &Embedding, u: usize, v: usize) -> bool {
    let count = e.host.vertex_count();
    if u >= count || v >= count {
        return false;
    }
    let listed = e.host.neighbors(u).binary_search(&(v as u32)).is_ok();
    match e.host.kind() {
        GraphKind::CrossedCube => listed && cq_adjacent_raw(u as u32, v as u32),
        GraphKind::Hypercube => listed && (u ^ v).count_ones() == 1,
        GraphKind::SubQuadtree => listed,
    }
}

/// Recompute every measure of `e` from scratch. Failures show up as false
/// flags or large numbers, never as errors.
pub fn verify(e: &Embedding) -> MetricsReport {
    let guest_count = e.guest.vertex_count();
    let host_count = e.host.vertex_count();

    let mut preimages: HashMap<usize, u32> = HashMap::with_capacity(e.vertex_map.len());
    for &x in &e.vertex_map {
        *preimages.entry(x).or_default() += 1;
    }
    let load = preimages.values().copied().max().unwrap_or(0);
    let map_total = e.vertex_map.len() == guest_count;
    let map_in_range = e.vertex_map.iter().all(|&x| x < host_count);
    let injective = map_total && map_in_range && load <= 1;

    let mut paths_valid = map_total && map_in_range;
    let mut dilation = 0u32;
    let mut traffic: HashMap<(usize, usize), u32> = HashMap::new();
    let mut routed: HashMap<(usize, usize), u32> = HashMap::with_capacity(e.edge_paths.len());
    for p in &e.edge_paths {
        let key = (p.from.min(p.to), p.from.max(p.to));
        *routed.entry(key).or_default() += 1;
        let endpoints_ok = p.from < guest_count
            && p.to < guest_count
            && p.path.len() >= 2
            && e.vertex_map.get(p.from) == p.path.first()
            && e.vertex_map.get(p.to) == p.path.last();
        if !endpoints_ok {
            paths_valid = false;
        }
        for w in p.path.windows(2) {
            if !hop_ok(e, w[0], w[1]) {
                paths_valid = false;
            }
            *traffic.entry((w[0].min(w[1]), w[0].max(w[1]))).or_default() += 1;
        }
        dilation = dilation.max(p.path.len().saturating_sub(1) as u32);
    }
    // Every guest edge routed exactly once, and nothing else routed.
    let mut guest_edges = 0usize;
    for (a, b) in e.guest.edges() {
        guest_edges += 1;
        if routed.get(&(a, b)) != Some(&1) {
            paths_valid = false;
        }
    }
    if routed.len() != guest_edges {
        paths_valid = false;
    }

    let congestion = traffic.values().copied().max().unwrap_or(0);
    let expansion = Ratio::new(host_count as u64, guest_count.max(1) as u64);
    let repairs = e
        .edge_paths
        .iter()
        .filter(|p| p.route == RouteTag::Repaired)
        .count() as u32;
    let fallbacks = e
        .provenance
        .iter()
        .filter(|&&t| t == RuleTag::SearchFallback)
        .count() as u32;
    MetricsReport {
        dilation,
        congestion,
        expansion,
        load,
        injective,
        paths_valid,
        repairs,
        fallbacks,
    }
}

/// Exact host distance for one guest edge next to its routed length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDistance {
    pub from: usize,
    pub to: usize,
    /// BFS distance between the endpoint images; `None` if unreachable or
    /// an image is out of range.
    pub distance: Option<u32>,
    /// Hops of the routed path, if the edge has one.
    pub routed: Option<u32>,
}

impl EdgeDistance {
    /// Both endpoints landed on one host vertex.
    pub fn injectivity_violation(&self) -> bool {
        self.distance == Some(0)
    }

    /// How many hops the routed path spends above the shortest distance.
    pub fn slack(&self) -> Option<u32> {
        Some(self.routed?.saturating_sub(self.distance?))
    }
}

/// BFS distance between the images of every guest edge, in guest edge
/// order. Independent of the routed paths.
pub fn shortest_dilation_certificate(e: &Embedding) -> Vec<EdgeDistance> {
    e.guest
        .edges()
        .map(|(a, b)| {
            let (from, to) = if e.guest.parent(a) == Some(b) {
                (b, a)
            } else {
                (a, b)
            };
            let distance = match (e.vertex_map.get(from), e.vertex_map.get(to)) {
                (Some(&x), Some(&y)) => e.host.distance(x, y).ok().flatten(),
                _ => None,
            };
            let routed = e
                .path_for(from, to)
                .map(|p| p.path.len().saturating_sub(1) as u32);
            EdgeDistance {
                from,
                to,
                distance,
                routed,
            }
        })
        .collect()
}

/// Largest certified distance; `None` if any edge is unreachable.
pub fn certified_dilation(cert: &[EdgeDistance]) -> Option<u32> {
    cert.iter().try_fold(0, |acc, c| Some(acc.max(c.distance?)))
}

/// Reading of the rule text that a repaired edge depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ambiguity {
    /// Which half/quarter split applies where (the undefined `C`, `r`).
    RegionSplit,
    /// The `Pref_{0+1}` and `Pref_{2)}` typos in the case-3 edge rule.
    CaseThreePrefix,
    /// Whether the trailing `00` of the situation-2 rules is literal.
    TrailingBits,
    /// The child was placed by search, outside any rule.
    OutsideRules,
}

impl Ambiguity {
    pub fn as_str(self) -> &'static str {
        match self {
            Ambiguity::RegionSplit => "region split (C, r undefined)",
            Ambiguity::CaseThreePrefix => "case-3 prefix typos",
            Ambiguity::TrailingBits => "trailing 00 literal or inherited",
            Ambiguity::OutsideRules => "placed by search",
        }
    }

    fn of(tag: RuleTag) -> Self {
        match tag {
            RuleTag::Situation2Case3a
            | RuleTag::Situation2Case3bT2
            | RuleTag::Situation2Case3bT3 => Ambiguity::CaseThreePrefix,
            RuleTag::Situation2Case1a | RuleTag::Situation2Case1b | RuleTag::Situation2Case2 => {
                Ambiguity::TrailingBits
            }
            RuleTag::Prem | RuleTag::Situation1 => Ambiguity::RegionSplit,
            RuleTag::SearchFallback | RuleTag::Fixed => Ambiguity::OutsideRules,
        }
    }
}

/// A repaired edge with the rule that placed its child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairEntry {
    pub from: String,
    pub to: String,
    pub rule: RuleTag,
    pub ambiguity: Ambiguity,
}

/// Every repaired edge of `e`, attributed to the rule reading it depends on.
pub fn repair_ledger(e: &Embedding) -> Vec<RepairEntry> {
    e.edge_paths
        .iter()
        .filter(|p| p.route == RouteTag::Repaired)
        .map(|p| {
            let rule = e.provenance.get(p.to).copied().unwrap_or(RuleTag::Fixed);
            RepairEntry {
                from: e.guest.label(p.from),
                to: e.guest.label(p.to),
                rule,
                ambiguity: Ambiguity::of(rule),
            }
        })
        .collect()
}
