//! Crossed cubes, ordinary hypercubes and particular sub-quadtrees.
//!
//! All three families share one frozen [`Graph`] representation with dense
//! integer vertex ids. Cube vertices use the numeric value of their bit
//! string as id (bit 0 is the least significant, rightmost printed digit);
//! sub-quadtree vertices are numbered in preorder, children visited in
//! suffix order 1, 2, 3.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest cube dimension the constructors accept.
pub const MAX_CUBE_DIM: u32 = 20;
/// Largest sub-quadtree height the constructor accepts.
pub const MAX_PQT_HEIGHT: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("bit string {0:?} must have exactly two digits")]
    NotAPair(String),
    #[error("invalid bit string {0:?}")]
    BadBits(String),
    #[error("invalid sub-quadtree address {0:?}")]
    BadAddress(String),
    #[error("label length mismatch: {left} vs {right} (dimension {dim})")]
    LengthMismatch { left: u32, right: u32, dim: u32 },
    #[error("a vertex is not adjacent to itself: {0}")]
    SameVertex(String),
    #[error("dimension {0} out of range 1..={MAX_CUBE_DIM}")]
    DimensionOutOfRange(u32),
    #[error("height {0} out of range 1..={MAX_PQT_HEIGHT}")]
    HeightOutOfRange(u32),
    #[error("unknown vertex id {0}")]
    UnknownVertex(usize),
    #[error("graph is disconnected")]
    Disconnected,
}

pub type Result<T> = std::result::Result<T, TopologyError>;

/// A crossed-cube (or hypercube) vertex: `dim` bits stored in `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CqVertex {
    value: u32,
    dim: u32,
}

impl CqVertex {
    pub fn new(value: u32, dim: u32) -> Result<Self> {
        if dim == 0 || dim > 31 || value >> dim != 0 {
            return Err(TopologyError::BadBits(format!(
                "{value} in dimension {dim}"
            )));
        }
        Ok(Self { value, dim })
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn dim(self) -> u32 {
        self.dim
    }

    /// Digit at position `i`, where 0 is the least significant bit.
    pub fn bit(self, i: u32) -> u8 {
        ((self.value >> i) & 1) as u8
    }
}

impl fmt::Display for CqVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.dim as usize)
    }
}

impl FromStr for CqVertex {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 31 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(TopologyError::BadBits(s.to_string()));
        }
        let value = u32::from_str_radix(s, 2).map_err(|_| TopologyError::BadBits(s.to_string()))?;
        Ok(Self {
            value,
            dim: s.len() as u32,
        })
    }
}

/// Render `value` as a most-significant-first bit string of length `dim`.
pub fn bit_string(value: u32, dim: u32) -> String {
    format!("{:0width$b}", value, width = dim as usize)
}

/// Sub-quadtree address: a leading `0` followed by digits from {1,2,3}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PqtAddress(String);

impl PqtAddress {
    pub fn root() -> Self {
        Self("0".to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn parent(&self) -> Option<Self> {
        (self.0.len() > 1).then(|| Self(self.0[..self.0.len() - 1].to_string()))
    }

    /// Child obtained by appending suffix 1, 2 or 3.
    pub fn child(&self, suffix: u8) -> Self {
        debug_assert!((1..=3).contains(&suffix));
        let mut s = self.0.clone();
        s.push(char::from(b'0' + suffix));
        Self(s)
    }

    /// Last digit of the address (0 for the root).
    pub fn suffix(&self) -> u8 {
        self.0.as_bytes()[self.0.len() - 1] - b'0'
    }
}

impl fmt::Display for PqtAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for PqtAddress {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self> {
        let b = s.as_bytes();
        if b.first() != Some(&b'0') || !b[1..].iter().all(|c| (b'1'..=b'3').contains(c)) {
            return Err(TopologyError::BadAddress(s.to_string()));
        }
        Ok(Self(s.to_string()))
    }
}

/// Membership in {(00,00), (10,10), (01,11), (11,01)} for 2-bit values.
#[inline]
pub fn pair_related_bits(x: u32, y: u32) -> bool {
    matches!(
        (x & 3, y & 3),
        (0b00, 0b00) | (0b10, 0b10) | (0b01, 0b11) | (0b11, 0b01)
    )
}

/// The pair-related relation on 2-digit bit strings.
pub fn pair_related(x: &str, y: &str) -> Result<bool> {
    let parse = |s: &str| -> Result<u32> {
        if s.len() != 2 {
            return Err(TopologyError::NotAPair(s.to_string()));
        }
        s.parse::<CqVertex>().map(CqVertex::value)
    };
    Ok(pair_related_bits(parse(x)?, parse(y)?))
}

/// Crossed-cube adjacency on raw labels of a `dim`-dimensional cube.
///
/// Bits above the highest differing position are shared, so the recursion
/// bottoms out at the sub-cube of dimension `h + 1`, where `h` is that
/// position. There the two halves are joined when the next bit agrees (for
/// even sub-cube dimension) and every lower bit pair is pair-related.
#[inline]
pub fn cq_adjacent_raw(u: u32, v: u32) -> bool {
    let diff = u ^ v;
    if diff == 0 {
        return false;
    }
    let h = 31 - diff.leading_zeros();
    let sub_dim = h + 1;
    if sub_dim.is_multiple_of(2) && (diff >> (h - 1)) & 1 != 0 {
        return false;
    }
    (0..(sub_dim - 1) / 2).all(|i| pair_related_bits(u >> (2 * i), v >> (2 * i)))
}

/// Checked crossed-cube adjacency.
pub fn cq_adjacent(u: CqVertex, v: CqVertex, m: u32) -> Result<bool> {
    if u.dim != m || v.dim != m {
        return Err(TopologyError::LengthMismatch {
            left: u.dim,
            right: v.dim,
            dim: m,
        });
    }
    if u == v {
        return Err(TopologyError::SameVertex(u.to_string()));
    }
    Ok(cq_adjacent_raw(u.value, v.value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum GraphKind {
    CrossedCube,
    Hypercube,
    SubQuadtree,
}

/// Sub-quadtree bookkeeping kept alongside the adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
struct TreeIndex {
    addresses: Vec<PqtAddress>,
    ids: HashMap<PqtAddress, usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

/// Immutable undirected simple graph with dense ids `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    kind: GraphKind,
    order: u32,
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
    tree: Option<TreeIndex>,
}

fn check_dim(m: u32) -> Result<()> {
    if (1..=MAX_CUBE_DIM).contains(&m) {
        Ok(())
    } else {
        Err(TopologyError::DimensionOutOfRange(m))
    }
}

/// The unique crossed-cube neighbour of `v` whose highest differing bit is `h`.
///
/// Pair-relatedness is a bijection on 2-bit strings (it swaps `01` and `11`
/// and fixes `00`, `10`), so each lower pair has exactly one partner.
#[inline]
pub fn cq_neighbor(v: u32, h: u32) -> u32 {
    let mut u = v ^ (1 << h);
    for i in 0..h / 2 {
        if (v >> (2 * i)) & 1 == 1 {
            u ^= 1 << (2 * i + 1);
        }
    }
    u
}

fn cube_from(kind: GraphKind, m: u32, neighbor: impl Fn(u32, u32) -> u32) -> Graph {
    let n = 1u32 << m;
    let adjacency: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            let mut list: Vec<u32> = (0..m).map(|h| neighbor(v, h)).collect();
            list.sort_unstable();
            list
        })
        .collect();
    let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
    Graph {
        kind,
        order: m,
        adjacency,
        edge_count,
        tree: None,
    }
}

/// The `m`-dimensional crossed cube.
pub fn build_crossed_cube(m: u32) -> Result<Graph> {
    check_dim(m)?;
    Ok(cube_from(GraphKind::CrossedCube, m, cq_neighbor))
}

/// The ordinary `m`-dimensional hypercube.
pub fn build_hypercube(m: u32) -> Result<Graph> {
    check_dim(m)?;
    Ok(cube_from(GraphKind::Hypercube, m, |v, h| v ^ (1 << h)))
}

/// The particular sub-quadtree of height `n`: a rooted tree in which every
/// vertex above depth `n` has children with suffixes 1, 2 and 3.
pub fn build_pqt(n: u32) -> Result<Graph> {
    if !(1..=MAX_PQT_HEIGHT).contains(&n) {
        return Err(TopologyError::HeightOutOfRange(n));
    }
    let count = (3usize.pow(n) - 1) / 2;
    let mut addresses = Vec::with_capacity(count);
    let mut parent = Vec::with_capacity(count);
    let mut children: Vec<Vec<usize>> = Vec::with_capacity(count);
    let mut stack = vec![(PqtAddress::root(), None::<usize>)];
    while let Some((addr, par)) = stack.pop() {
        let id = addresses.len();
        if let Some(p) = par {
            children[p].push(id);
        }
        if addr.depth() < n as usize {
            for s in (1..=3).rev() {
                stack.push((addr.child(s), Some(id)));
            }
        }
        addresses.push(addr);
        parent.push(par);
        children.push(Vec::with_capacity(3));
    }
    let mut adjacency = vec![Vec::new(); count];
    for (id, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            adjacency[id].push(p as u32);
            adjacency[p].push(id as u32);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    let ids = addresses
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, a)| (a, i))
        .collect();
    Ok(Graph {
        kind: GraphKind::SubQuadtree,
        order: n,
        adjacency,
        edge_count: count - 1,
        tree: Some(TreeIndex {
            addresses,
            ids,
            parent,
            children,
        }),
    })
}

impl Graph {
    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    /// Cube dimension or tree height.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match self.kind {
            GraphKind::CrossedCube => cq_adjacent_raw(u as u32, v as u32),
            GraphKind::Hypercube => (u ^ v).count_ones() == 1,
            GraphKind::SubQuadtree => self.adjacency[u].binary_search(&(v as u32)).is_ok(),
        }
    }

    /// Undirected edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    /// Printable label of a vertex: a bit string or a sub-quadtree address.
    pub fn label(&self, v: usize) -> String {
        match &self.tree {
            Some(t) => t.addresses[v].to_string(),
            None => bit_string(v as u32, self.order),
        }
    }

    pub fn address(&self, v: usize) -> Option<&PqtAddress> {
        self.tree.as_ref().map(|t| &t.addresses[v])
    }

    pub fn id_of_address(&self, a: &PqtAddress) -> Option<usize> {
        self.tree.as_ref().and_then(|t| t.ids.get(a).copied())
    }

    /// Tree parent (sub-quadtrees only).
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.tree.as_ref().and_then(|t| t.parent[v])
    }

    /// Tree children in suffix order (sub-quadtrees only).
    pub fn children(&self, v: usize) -> &[usize] {
        self.tree.as_ref().map_or(&[], |t| &t.children[v])
    }

    /// Exact hop distances from `source`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Result<Vec<Option<u32>>> {
        if source >= self.vertex_count() {
            return Err(TopologyError::UnknownVertex(source));
        }
        Ok(self
            .bfs_raw(source)
            .into_iter()
            .map(|d| (d != u32::MAX).then_some(d))
            .collect())
    }

    fn bfs_raw(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            for &w in &self.adjacency[u] {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Eccentricity of `source`, or an error if some vertex is unreachable.
    pub fn eccentricity(&self, source: usize) -> Result<u32> {
        if source >= self.vertex_count() {
            return Err(TopologyError::UnknownVertex(source));
        }
        let dist = self.bfs_raw(source);
        let max = dist.iter().copied().max().unwrap_or(0);
        if max == u32::MAX {
            Err(TopologyError::Disconnected)
        } else {
            Ok(max)
        }
    }

    /// Largest BFS distance over all vertex pairs.
    pub fn diameter(&self) -> Result<u32> {
        (0..self.vertex_count()).try_fold(0, |acc, s| Ok(acc.max(self.eccentricity(s)?)))
    }

    /// Vertices within distance 2 of `v`, excluding `v`, as
    /// `(distance, vertex)` sorted by distance then label.
    pub fn ball2(&self, v: usize) -> Vec<(u32, usize)> {
        let near = &self.adjacency[v];
        let mut far: Vec<u32> = near
            .iter()
            .flat_map(|&a| self.adjacency[a as usize].iter().copied())
            .filter(|&b| b as usize != v && near.binary_search(&b).is_err())
            .collect();
        far.sort_unstable();
        far.dedup();
        near.iter()
            .map(|&a| (1, a as usize))
            .chain(far.into_iter().map(|b| (2, b as usize)))
            .collect()
    }

    /// Whether `u` and `v` are at distance exactly 1 or 2.
    pub fn within_two(&self, u: usize, v: usize) -> bool {
        u != v
            && (self.has_edge(u, v)
                || self.adjacency[u]
                    .iter()
                    .any(|&w| self.has_edge(w as usize, v)))
    }

    /// Smallest-label common neighbour of `u` and `v`, if any.
    pub fn common_neighbor(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency[u]
            .iter()
            .map(|&w| w as usize)
            .find(|&w| w != v && self.has_edge(w, v))
    }

    /// Exact distance between two vertices by breadth-first search that
    /// stops as soon as `target` is reached.
    pub fn distance(&self, source: usize, target: usize) -> Result<Option<u32>> {
        let n = self.vertex_count();
        if source >= n {
            return Err(TopologyError::UnknownVertex(source));
        }
        if target >= n {
            return Err(TopologyError::UnknownVertex(target));
        }
        if source == target {
            return Ok(Some(0));
        }
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::from([source]);
        dist[source] = 0;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    if w == target {
                        return Ok(Some(dist[w]));
                    }
                    queue.push_back(w);
                }
            }
        }
        Ok(None)
    }
}
