//! Depth-first placement with forward checking.
//!
//! Guest vertices are visited family by family: the root, then all children of
//! a vertex together, recursing in preorder. Each vertex gets an ordered
//! candidate list; the first free candidate within distance two of the
//! parent's image that keeps every placed vertex able to seat its remaining
//! children is taken. On a dead end the engine backtracks.
//!
//! The forward check keeps, for every host vertex `h`, the number of free
//! host vertices within distance two of `h`. A placed guest vertex with `c`
//! unplaced children needs at least `c` of them.

use crate::embedder::plan::{Plan, RuleSet};
use crate::embedder::{route_edges, EmbedError, Embedding, Result, RuleTag};
use crate::topology::Graph;

const UNPLACED: usize = usize::MAX;

/// Upper bound on candidate trials before giving up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget(pub u64);

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget(20_000_000)
    }
}

/// First alternative, in listed order, that `viable` accepts. `None` means
/// every alternative is blocked and the caller has to fall back.
pub fn select_alternative<T>(alternatives: &[T], mut viable: impl FnMut(&T) -> bool) -> Option<&T> {
    alternatives.iter().find(|a| viable(a))
}

struct Engine<'a> {
    guest: &'a Graph,
    host: &'a Graph,
    image: Vec<usize>,
    tag: Vec<RuleTag>,
    owner: Vec<usize>,
    free_near: Vec<u32>,
    pending: Vec<u32>,
    fixed: Vec<bool>,
}

impl<'a> Engine<'a> {
    fn new(guest: &'a Graph, host: &'a Graph) -> Self {
        let free_near = (0..host.vertex_count())
            .map(|h| host.ball2(h).len() as u32)
            .collect();
        let pending = (0..guest.vertex_count())
            .map(|v| guest.children(v).len() as u32)
            .collect();
        Engine {
            guest,
            host,
            image: vec![UNPLACED; guest.vertex_count()],
            tag: vec![RuleTag::SearchFallback; guest.vertex_count()],
            owner: vec![UNPLACED; host.vertex_count()],
            free_near,
            pending,
            fixed: vec![false; guest.vertex_count()],
        }
    }

    fn occupy(&mut self, v: usize, x: usize, tag: RuleTag) {
        self.image[v] = x;
        self.owner[x] = v;
        self.tag[v] = tag;
        for (_, y) in self.host.ball2(x) {
            self.free_near[y] -= 1;
        }
        if let Some(p) = self.guest.parent(v) {
            self.pending[p] -= 1;
        }
    }

    fn release(&mut self, v: usize) {
        let x = self.image[v];
        self.image[v] = UNPLACED;
        self.owner[x] = UNPLACED;
        for (_, y) in self.host.ball2(x) {
            self.free_near[y] += 1;
        }
        if let Some(p) = self.guest.parent(v) {
            self.pending[p] += 1;
        }
    }

    /// Every placed guest vertex near `x` can still seat its children.
    fn still_feasible(&self, v: usize, x: usize) -> bool {
        if self.pending[v] > self.free_near[x] {
            return false;
        }
        self.host.ball2(x).into_iter().all(|(_, y)| {
            let o = self.owner[y];
            o == UNPLACED || self.pending[o] <= self.free_near[y]
        })
    }

    /// A candidate must be free and within distance two of the parent and
    /// of every already-fixed child.
    fn admissible(&self, v: usize, x: usize) -> bool {
        if self.owner[x] != UNPLACED {
            return false;
        }
        if let Some(p) = self.guest.parent(v) {
            if !self.host.within_two(self.image[p], x) {
                return false;
            }
        }
        self.guest
            .children(v)
            .iter()
            .all(|&c| !self.fixed[c] || self.host.within_two(self.image[c], x))
    }

    fn generic_candidates(&self, v: usize) -> Vec<usize> {
        match self.guest.parent(v) {
            Some(p) => self
                .host
                .ball2(self.image[p])
                .into_iter()
                .map(|(_, y)| y)
                .collect(),
            None => (0..self.host.vertex_count()).collect(),
        }
    }

    /// Run the depth-first placement over all non-fixed vertices.
    fn run(
        &mut self,
        mut candidates: impl FnMut(&Self, usize) -> Vec<(usize, RuleTag)>,
        budget: SearchBudget,
        stop_on_exhaustion: bool,
    ) -> Result<()> {
        let order: Vec<usize> = family_order(self.guest)
            .into_iter()
            .filter(|&v| !self.fixed[v])
            .collect();
        let mut lists: Vec<Vec<(usize, RuleTag)>> = Vec::with_capacity(order.len());
        let mut cursor: Vec<usize> = Vec::with_capacity(order.len());
        let mut steps = 0u64;
        let mut deepest = 0usize;
        let mut k = 0usize;
        while k < order.len() {
            let v = order[k];
            if lists.len() == k {
                lists.push(candidates(self, v));
                cursor.push(0);
            }
            let mut placed = false;
            while cursor[k] < lists[k].len() {
                let (x, tag) = lists[k][cursor[k]];
                cursor[k] += 1;
                steps += 1;
                if steps > budget.0 {
                    return Err(EmbedError::NoExtension {
                        vertex: self.guest.label(v),
                        deepest,
                        nodes: steps,
                    });
                }
                if !self.admissible(v, x) {
                    continue;
                }
                self.occupy(v, x, tag);
                if self.still_feasible(v, x) {
                    placed = true;
                    break;
                }
                self.release(v);
            }
            if placed {
                k += 1;
                deepest = deepest.max(k);
                continue;
            }
            if stop_on_exhaustion {
                return Err(EmbedError::RulesExhausted {
                    vertex: self.guest.label(v),
                });
            }
            lists.pop();
            cursor.pop();
            if k == 0 {
                return Err(EmbedError::NoExtension {
                    vertex: self.guest.label(v),
                    deepest,
                    nodes: steps,
                });
            }
            k -= 1;
            self.release(order[k]);
        }
        Ok(())
    }
}

/// Preorder over sibling groups: the root, then for each vertex in turn all
/// of its children at once before descending into the first of them.
fn family_order(guest: &Graph) -> Vec<usize> {
    let mut order = Vec::with_capacity(guest.vertex_count());
    if guest.vertex_count() == 0 {
        return order;
    }
    order.push(0);
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        let kids = guest.children(v);
        order.extend_from_slice(kids);
        stack.extend(kids.iter().rev());
    }
    if order.len() < guest.vertex_count() {
        // Not a rooted tree: fall back to id order for the rest.
        let mut seen = vec![false; guest.vertex_count()];
        for &v in &order {
            seen[v] = true;
        }
        order.extend((0..guest.vertex_count()).filter(|&v| !seen[v]));
    }
    order
}

/// Rule-first placement used by `embed_vertices`.
pub(crate) fn place_with_rules(
    guest: &Graph,
    host: &Graph,
    plan: &Plan,
    rules: RuleSet,
    allow_fallback: bool,
    budget: SearchBudget,
) -> Result<(Vec<usize>, Vec<RuleTag>)> {
    let mut engine = Engine::new(guest, host);
    let candidates = |e: &Engine, v: usize| -> Vec<(usize, RuleTag)> {
        let Some(p) = e.guest.parent(v) else {
            return vec![(0, RuleTag::Prem)];
        };
        let suffix = e.guest.address(v).map_or(1, |a| a.suffix());
        let mut list: Vec<(usize, RuleTag)> = plan
            .alternatives(plan.frame(p), e.image[p] as u32, suffix, rules)
            .into_iter()
            .map(|(x, t)| (x as usize, t))
            .filter(|&(x, _)| x < e.host.vertex_count())
            .collect();
        if allow_fallback {
            list.extend(
                e.generic_candidates(v)
                    .into_iter()
                    .map(|x| (x, RuleTag::SearchFallback)),
            );
        }
        list
    };
    // Without the search tail a dead end is reported rather than
    // backtracked, so the stuck vertex is the one named.
    engine.run(candidates, budget, !allow_fallback)?;
    Ok((engine.image, engine.tag))
}

/// Extend `fixed` (guest id, host id) to a full injective map in which
/// every guest edge spans host distance at most two, by exhaustive
/// depth-first search. Candidates for a vertex are the host vertices within
/// distance two of its parent's image, ordered by distance then label; the
/// first complete solution wins. Edges are routed through the smallest
/// common neighbour.
pub fn embed_fallback(
    guest: &Graph,
    host: &Graph,
    fixed: &[(usize, usize)],
    budget: SearchBudget,
) -> Result<Embedding> {
    let mut engine = Engine::new(guest, host);
    for &(v, x) in fixed {
        if v >= guest.vertex_count() || x >= host.vertex_count() {
            return Err(EmbedError::BadFixedMap(format!(
                "pair ({v}, {x}) out of range"
            )));
        }
        if engine.fixed[v] {
            return Err(EmbedError::BadFixedMap(format!(
                "{} fixed twice",
                guest.label(v)
            )));
        }
        if engine.owner[x] != UNPLACED {
            return Err(EmbedError::NotInjective {
                a: guest.label(engine.owner[x]),
                b: guest.label(v),
                host: host.label(x),
            });
        }
        engine.occupy(v, x, RuleTag::Fixed);
        engine.fixed[v] = true;
    }
    for &(v, x) in fixed {
        if let Some(p) = guest.parent(v) {
            if engine.fixed[p] && !host.within_two(engine.image[p], x) {
                return Err(EmbedError::EdgeTooLong {
                    from: guest.label(p),
                    to: guest.label(v),
                    distance: host.distance(engine.image[p], x)?,
                });
            }
        }
        if !engine.still_feasible(v, x) {
            return Err(EmbedError::BadFixedMap(format!(
                "{} cannot seat its children",
                guest.label(v)
            )));
        }
    }
    engine.run(
        |e, v| {
            e.generic_candidates(v)
                .into_iter()
                .map(|x| (x, RuleTag::SearchFallback))
                .collect()
        },
        budget,
        false,
    )?;
    let partial = crate::embedder::PartialEmbedding {
        guest: guest.clone(),
        host: host.clone(),
        vertex_map: engine.image,
        provenance: engine.tag,
    };
    route_edges(partial)
}
