//! One-to-one, dilation-2 embedding of `PQT_n` into `CQ_m`.
//!
//! The vertex map is produced by a depth-first placement engine. For every
//! guest vertex it first offers the rule-table alternatives that apply to
//! the vertex's region (see [`plan`]), in their listed order, and only then
//! generic host vertices within distance two of the parent's image. Any
//! vertex placed by the generic tail is tagged [`RuleTag::SearchFallback`].
//! Edges are routed afterwards by [`route_edges`].

mod plan;
mod route;
mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{self, Graph, GraphKind, TopologyError};

pub use plan::{dimension_for, Frame, Plan, RuleSet};
pub use route::route_edges;
pub use search::{embed_fallback, select_alternative, SearchBudget};

/// Step budget for the attempt with the full rule table.
const FULL_RULES_BUDGET: u64 = 1_000_000;

/// Largest host dimension accepted unless the caller raises it.
pub const DEFAULT_MAX_DIM: u32 = 16;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("sub-quadtree height {0} is too small; need n >= 2")]
    HeightTooSmall(u32),
    #[error("n = {n} needs CQ_{m}, above the dimension cap {max}")]
    TooLarge { n: u32, m: u32, max: u32 },
    #[error("host must be CQ_{expected} for this guest, got {kind:?} of order {actual}")]
    HostMismatch {
        expected: u32,
        actual: u32,
        kind: GraphKind,
    },
    #[error("guest must be a sub-quadtree, got {0:?}")]
    GuestNotTree(GraphKind),
    #[error("no rule alternative fits vertex {vertex}")]
    RulesExhausted { vertex: String },
    #[error(
        "no dilation-2 extension: search stopped after {nodes} steps, deepest frontier {deepest} \
         vertices placed (stuck at {vertex})"
    )]
    NoExtension {
        vertex: String,
        deepest: usize,
        nodes: u64,
    },
    #[error("fixed partial map is not usable: {0}")]
    BadFixedMap(String),
    #[error("edge {from}-{to} spans host distance {distance:?}, more than 2")]
    EdgeTooLong {
        from: String,
        to: String,
        distance: Option<u32>,
    },
    #[error("vertex map is not injective: {a} and {b} share host vertex {host}")]
    NotInjective { a: String, b: String, host: String },
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

pub type Result<T> = std::result::Result<T, EmbedError>;

/// Which rule placed a guest vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleTag {
    /// Root anchor at the all-zeros host vertex.
    Prem,
    /// Four-way split: the child takes the 2-bit code of its suffix.
    Situation1,
    Situation2Case1a,
    Situation2Case1b,
    Situation2Case2,
    Situation2Case3a,
    Situation2Case3bT2,
    Situation2Case3bT3,
    /// Placed by the generic distance-2 search.
    SearchFallback,
    /// Supplied by the caller (fixed partial maps, hand-made embeddings).
    Fixed,
}

impl RuleTag {
    pub const ALL: [RuleTag; 10] = [
        RuleTag::Prem,
        RuleTag::Situation1,
        RuleTag::Situation2Case1a,
        RuleTag::Situation2Case1b,
        RuleTag::Situation2Case2,
        RuleTag::Situation2Case3a,
        RuleTag::Situation2Case3bT2,
        RuleTag::Situation2Case3bT3,
        RuleTag::SearchFallback,
        RuleTag::Fixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleTag::Prem => "prem",
            RuleTag::Situation1 => "situation-1",
            RuleTag::Situation2Case1a => "situation-2/case-1a",
            RuleTag::Situation2Case1b => "situation-2/case-1b",
            RuleTag::Situation2Case2 => "situation-2/case-2",
            RuleTag::Situation2Case3a => "situation-2/case-3a",
            RuleTag::Situation2Case3bT2 => "situation-2/case-3b-t2",
            RuleTag::Situation2Case3bT3 => "situation-2/case-3b-t3",
            RuleTag::SearchFallback => "search-fallback",
            RuleTag::Fixed => "fixed",
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        RuleTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown rule tag {s:?}"))
    }
}

/// How a guest edge got its host path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteTag {
    /// Endpoint images are adjacent.
    Direct,
    /// The connector prescribed by the edge rule was a common neighbour.
    Rule,
    /// The prescribed connector was unusable and a common neighbour was
    /// substituted.
    Repaired,
    /// The child was placed by search, so no rule connector exists; the
    /// smallest common neighbour is used.
    Search,
}

/// Host path for one guest edge, `from` being the tree parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePath {
    pub from: usize,
    pub to: usize,
    pub path: Vec<usize>,
    pub route: RouteTag,
}

/// Vertex map without edge paths yet.
#[derive(Debug, Clone)]
pub struct PartialEmbedding {
    pub guest: Graph,
    pub host: Graph,
    pub vertex_map: Vec<usize>,
    pub provenance: Vec<RuleTag>,
}

/// A guest graph mapped into a host graph, with a host path per guest edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub guest: Graph,
    pub host: Graph,
    pub vertex_map: Vec<usize>,
    pub edge_paths: Vec<EdgePath>,
    pub provenance: Vec<RuleTag>,
}

impl Embedding {
    /// Guest order (tree height for sub-quadtrees).
    pub fn n(&self) -> u32 {
        self.guest.order()
    }

    /// Host dimension.
    pub fn m(&self) -> u32 {
        self.host.order()
    }

    pub fn image(&self, guest_vertex: usize) -> usize {
        self.vertex_map[guest_vertex]
    }

    /// Path for the guest edge between `a` and `b`, in either orientation.
    pub fn path_for(&self, a: usize, b: usize) -> Option<&EdgePath> {
        self.edge_paths
            .iter()
            .find(|p| (p.from == a && p.to == b) || (p.from == b && p.to == a))
    }

    pub fn fallback_count(&self) -> usize {
        self.provenance
            .iter()
            .filter(|&&t| t == RuleTag::SearchFallback)
            .count()
    }

    pub fn repair_count(&self) -> usize {
        self.edge_paths
            .iter()
            .filter(|p| p.route == RouteTag::Repaired)
            .count()
    }

    /// Identity map of a graph onto itself, each edge routed directly.
    pub fn identity(graph: &Graph) -> Self {
        let edge_paths = graph
            .edges()
            .map(|(u, v)| EdgePath {
                from: u,
                to: v,
                path: vec![u, v],
                route: RouteTag::Direct,
            })
            .collect();
        Embedding {
            guest: graph.clone(),
            host: graph.clone(),
            vertex_map: (0..graph.vertex_count()).collect(),
            edge_paths,
            provenance: vec![RuleTag::Fixed; graph.vertex_count()],
        }
    }
}

/// Knobs for [`embed_with`].
#[derive(Debug, Clone, Copy)]
pub struct EmbedOptions {
    /// Allow the generic search tail after the rule alternatives.
    pub allow_fallback: bool,
    /// Largest host dimension accepted.
    pub max_dim: u32,
    pub budget: SearchBudget,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        Self {
            allow_fallback: true,
            max_dim: DEFAULT_MAX_DIM,
            budget: SearchBudget::default(),
        }
    }
}

fn check_pair(guest: &Graph, host: &Graph) -> Result<u32> {
    if guest.kind() != GraphKind::SubQuadtree {
        return Err(EmbedError::GuestNotTree(guest.kind()));
    }
    let n = guest.order();
    let m = dimension_for(n)?;
    if host.kind() != GraphKind::CrossedCube || host.order() != m {
        return Err(EmbedError::HostMismatch {
            expected: m,
            actual: host.order(),
            kind: host.kind(),
        });
    }
    Ok(m)
}

/// Rule-table vertex placement with the search tail enabled.
pub fn embed_vertices(guest: &Graph, host: &Graph) -> Result<PartialEmbedding> {
    embed_vertices_with(guest, host, &EmbedOptions::default())
}

pub fn embed_vertices_with(
    guest: &Graph,
    host: &Graph,
    options: &EmbedOptions,
) -> Result<PartialEmbedding> {
    let m = check_pair(guest, host)?;
    let plan = Plan::new(guest, m);
    // The full table first, under a bounded budget; packed deep regions can
    // be fragmented by the template jumps, in which case only the flat rule
    // is kept below deep roots.
    let first_budget = SearchBudget(options.budget.0.min(FULL_RULES_BUDGET));
    let attempt = search::place_with_rules(
        guest,
        host,
        &plan,
        RuleSet::Full,
        options.allow_fallback,
        first_budget,
    );
    let (vertex_map, provenance) = match attempt {
        Ok(placed) => placed,
        Err(EmbedError::NoExtension { .. } | EmbedError::RulesExhausted { .. }) => {
            search::place_with_rules(
                guest,
                host,
                &plan,
                RuleSet::FlatOnly,
                options.allow_fallback,
                options.budget,
            )?
        }
        Err(e) => return Err(e),
    };
    Ok(PartialEmbedding {
        guest: guest.clone(),
        host: host.clone(),
        vertex_map,
        provenance,
    })
}

/// Build `PQT_n`, `CQ_{dimension_for(n)}` and the full embedding.
pub fn embed(n: u32) -> Result<Embedding> {
    embed_with(n, &EmbedOptions::default())
}

pub fn embed_with(n: u32, options: &EmbedOptions) -> Result<Embedding> {
    let m = dimension_for(n)?;
    if m > options.max_dim {
        return Err(EmbedError::TooLarge {
            n,
            m,
            max: options.max_dim,
        });
    }
    let guest = topology::build_pqt(n)?;
    let host = topology::build_crossed_cube(m)?;
    let partial = embed_vertices_with(&guest, &host, options)?;
    route_edges(partial)
}
