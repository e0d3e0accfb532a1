use std::collections::HashMap;

use crate::embedder::plan::Plan;
use crate::embedder::{
    EdgePath, EmbedError, Embedding, PartialEmbedding, Result, RouteTag, RuleTag,
};
use crate::topology::GraphKind;

/// Give every guest edge a host path of length one or two.
///
/// Adjacent images are joined directly. Otherwise the connector prescribed
/// by the edge rule of the child's placement rule is used when it is a
/// common neighbour of both images; if it is not, the smallest-label common
/// neighbour is substituted and the edge is tagged [`RouteTag::Repaired`].
pub fn route_edges(partial: PartialEmbedding) -> Result<Embedding> {
    let PartialEmbedding {
        guest,
        host,
        vertex_map,
        provenance,
    } = partial;
    let mut owner: HashMap<usize, usize> = HashMap::with_capacity(vertex_map.len());
    for (v, &x) in vertex_map.iter().enumerate() {
        if let Some(prev) = owner.insert(x, v) {
            return Err(EmbedError::NotInjective {
                a: guest.label(prev),
                b: guest.label(v),
                host: host.label(x),
            });
        }
    }
    let plan = (guest.kind() == GraphKind::SubQuadtree && host.kind() == GraphKind::CrossedCube)
        .then(|| Plan::new(&guest, host.order()));

    let mut edge_paths = Vec::with_capacity(guest.edge_count());
    for (a, b) in guest.edges() {
        // Orient tree edges parent -> child.
        let (from, to) = if guest.parent(a) == Some(b) {
            (b, a)
        } else {
            (a, b)
        };
        let (x, y) = (vertex_map[from], vertex_map[to]);
        if host.has_edge(x, y) {
            edge_paths.push(EdgePath {
                from,
                to,
                path: vec![x, y],
                route: RouteTag::Direct,
            });
            continue;
        }
        let Some(fallback) = host.common_neighbor(x, y) else {
            return Err(EmbedError::EdgeTooLong {
                from: guest.label(from),
                to: guest.label(to),
                distance: host.distance(x, y)?,
            });
        };
        let tag = provenance[to];
        let prescribed: Vec<usize> = match &plan {
            Some(plan) => plan
                .connectors(plan.frame(from), x as u32, y as u32, tag)
                .into_iter()
                .map(|w| w as usize)
                .collect(),
            None => Vec::new(),
        };
        let (mid, route) = if prescribed.is_empty() {
            let route = if tag == RuleTag::SearchFallback || tag == RuleTag::Fixed {
                RouteTag::Search
            } else {
                RouteTag::Repaired
            };
            (fallback, route)
        } else {
            match prescribed
                .iter()
                .find(|&&w| w < host.vertex_count() && host.has_edge(x, w) && host.has_edge(w, y))
            {
                Some(&w) => (w, RouteTag::Rule),
                None => (fallback, RouteTag::Repaired),
            }
        };
        edge_paths.push(EdgePath {
            from,
            to,
            path: vec![x, mid, y],
            route,
        });
    }
    edge_paths.sort_by_key(|p| p.to);
    Ok(Embedding {
        guest,
        host,
        vertex_map,
        edge_paths,
        provenance,
    })
}
