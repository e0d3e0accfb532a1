//! Stable on-disk forms for graphs and embeddings.
//!
//! JSON carries everything and reads back; DOT and edge lists are for
//! viewing and other tools. Host labels are written as most-significant-first
//! bit strings so leading zeros survive.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedder::{EdgePath, Embedding, RouteTag, RuleTag};
use crate::topology::{build_crossed_cube, build_pqt, CqVertex, Graph, GraphKind, PqtAddress};
use crate::verifier::{verify, MetricsReport};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid embedding report: field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("name {0:?} is used twice in the bundle")]
    DuplicateName(String),
    #[error("name {0:?} is not a usable file stem")]
    BadName(String),
}

pub type Result<T> = std::result::Result<T, IoError>;

fn schema(field: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Dot,
    Json,
    Edgelist,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Dot => "dot",
            Format::Json => "json",
            Format::Edgelist => "edgelist",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            "edgelist" => Ok(Format::Edgelist),
            _ => Err(format!(
                "unknown format {s:?}; expected dot, json or edgelist"
            )),
        }
    }
}

/// Graphs and an optional embedding to be written in one format.
#[derive(Debug, Clone)]
pub struct ExportBundle {
    pub graphs: Vec<(String, Graph)>,
    pub embedding: Option<Embedding>,
    pub format: Format,
}

/// File stem used for the embedding in a bundle.
pub const EMBEDDING_STEM: &str = "embedding";

impl ExportBundle {
    pub fn new(format: Format) -> Self {
        Self {
            graphs: Vec::new(),
            embedding: None,
            format,
        }
    }

    fn check_names(&self) -> Result<()> {
        let mut seen = HashSet::new();
        if self.embedding.is_some() {
            seen.insert(EMBEDDING_STEM);
        }
        for (name, _) in &self.graphs {
            let usable = !name.is_empty()
                && name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
            if !usable {
                return Err(IoError::BadName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(IoError::DuplicateName(name.clone()));
            }
        }
        Ok(())
    }
}

/// Write every member of `bundle` into the directory `destination`, creating
/// it if needed. Returns the written files in write order; an empty bundle
/// writes nothing.
pub fn export(bundle: &ExportBundle, destination: &Path) -> Result<Vec<PathBuf>> {
    bundle.check_names()?;
    let mut written = Vec::new();
    if bundle.graphs.is_empty() && bundle.embedding.is_none() {
        return Ok(written);
    }
    fs::create_dir_all(destination).map_err(|source| IoError::Io {
        path: destination.to_path_buf(),
        source,
    })?;
    let ext = bundle.format.extension();
    for (name, graph) in &bundle.graphs {
        let text = graph_text(graph, name, bundle.format);
        let path = destination.join(format!("{name}.{ext}"));
        write_file(&path, &text)?;
        written.push(path);
    }
    if let Some(e) = &bundle.embedding {
        let text = embedding_text(e, bundle.format);
        let path = destination.join(format!("{EMBEDDING_STEM}.{ext}"));
        write_file(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A graph in the given format.
pub fn graph_text(graph: &Graph, name: &str, format: Format) -> String {
    match format {
        Format::Edgelist => graph_edgelist(graph),
        Format::Dot => graph_dot(graph, name),
        Format::Json => {
            let doc = GraphDoc {
                kind: graph.kind(),
                order: graph.order(),
                vertices: (0..graph.vertex_count()).map(|v| graph.label(v)).collect(),
                edges: graph
                    .edges()
                    .map(|(u, v)| [graph.label(u), graph.label(v)])
                    .collect(),
            };
            to_json(&doc)
        }
    }
}

/// An embedding in the given format.
pub fn embedding_text(e: &Embedding, format: Format) -> String {
    match format {
        Format::Json => embedding_to_json(e),
        Format::Dot => embedding_dot(e),
        Format::Edgelist => embedding_edgelist(e),
    }
}

/// One `u v` line per edge, by vertex id then neighbour id.
pub fn graph_edgelist(graph: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{} {}", graph.label(u), graph.label(v));
    }
    out
}

fn graph_dot(graph: &Graph, name: &str) -> String {
    let mut out = format!("graph {name} {{\n");
    for v in 0..graph.vertex_count() {
        let _ = writeln!(out, "  \"{}\";", graph.label(v));
    }
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "  \"{}\" -- \"{}\";", graph.label(u), graph.label(v));
    }
    out.push_str("}\n");
    out
}

/// Host graph with guest images filled, unused host vertices grey, and host
/// edges carrying routed paths drawn bold.
fn embedding_dot(e: &Embedding) -> String {
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); e.host.vertex_count()];
    for (v, &x) in e.vertex_map.iter().enumerate() {
        if let Some(slot) = owners.get_mut(x) {
            slot.push(v);
        }
    }
    let mut used_edges = BTreeSet::new();
    for p in &e.edge_paths {
        for w in p.path.windows(2) {
            used_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    let mut out = String::from("graph embedding {\n  node [style=filled];\n");
    for (x, who) in owners.iter().enumerate() {
        let label = e.host.label(x);
        if who.is_empty() {
            let _ = writeln!(
                out,
                "  \"{label}\" [fillcolor=\"#e0e0e0\", fontcolor=\"#808080\"];"
            );
        } else {
            let guests: Vec<String> = who.iter().map(|&v| e.guest.label(v)).collect();
            let fill = if who.len() > 1 { "#f08080" } else { "#87cefa" };
            let _ = writeln!(
                out,
                "  \"{label}\" [fillcolor=\"{fill}\", label=\"{label}\\n{}\"];",
                guests.join(",")
            );
        }
    }
    for (u, v) in e.host.edges() {
        let style = if used_edges.contains(&(u, v)) {
            " [penwidth=2.5]"
        } else {
            " [color=\"#c0c0c0\"]"
        };
        let _ = writeln!(
            out,
            "  \"{}\" -- \"{}\"{style};",
            e.host.label(u),
            e.host.label(v)
        );
    }
    out.push_str("}\n");
    out
}

/// One `from to path route` line per guest edge.
fn embedding_edgelist(e: &Embedding) -> String {
    let mut out = String::new();
    for p in sorted_paths(e) {
        let hops: Vec<String> = p.path.iter().map(|&x| host_label(e, x)).collect();
        let _ = writeln!(
            out,
            "{} {} {} {}",
            e.guest.label(p.from),
            e.guest.label(p.to),
            hops.join("-"),
            route_name(p.route)
        );
    }
    out
}

fn route_name(r: RouteTag) -> &'static str {
    match r {
        RouteTag::Direct => "direct",
        RouteTag::Rule => "rule",
        RouteTag::Repaired => "repaired",
        RouteTag::Search => "search",
    }
}

fn host_label(e: &Embedding, x: usize) -> String {
    if x < e.host.vertex_count() {
        e.host.label(x)
    } else {
        // Out-of-range ids only arise from hand-built embeddings; keep the
        // number rather than panic.
        format!("#{x}")
    }
}

fn sorted_paths(e: &Embedding) -> Vec<&EdgePath> {
    let mut paths: Vec<&EdgePath> = e.edge_paths.iter().collect();
    paths.sort_by_key(|p| (p.to, p.from));
    paths
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types always serialize");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct GraphDoc {
    kind: GraphKind,
    order: u32,
    vertices: Vec<String>,
    edges: Vec<[String; 2]>,
}

/// The embedding report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingReport {
    pub n: u32,
    pub m: u32,
    pub vertex_map: Vec<VertexEntry>,
    pub edge_paths: Vec<PathEntry>,
    pub provenance: Vec<ProvenanceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub pqt: String,
    pub cq: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathEntry {
    pub from: String,
    pub to: String,
    pub path: Vec<String>,
    pub route: RouteTag,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceEntry {
    pub pqt: String,
    pub rule: String,
}

impl EmbeddingReport {
    /// Report for `e`, with freshly computed metrics.
    pub fn from_embedding(e: &Embedding) -> Self {
        let vertex_map = e
            .vertex_map
            .iter()
            .enumerate()
            .map(|(v, &x)| VertexEntry {
                pqt: e.guest.label(v),
                cq: host_label(e, x),
            })
            .collect();
        let edge_paths = sorted_paths(e)
            .into_iter()
            .map(|p| PathEntry {
                from: e.guest.label(p.from),
                to: e.guest.label(p.to),
                path: p.path.iter().map(|&x| host_label(e, x)).collect(),
                route: p.route,
            })
            .collect();
        let provenance = e
            .provenance
            .iter()
            .enumerate()
            .map(|(v, t)| ProvenanceEntry {
                pqt: e.guest.label(v),
                rule: t.to_string(),
            })
            .collect();
        EmbeddingReport {
            n: e.n(),
            m: e.m(),
            vertex_map,
            edge_paths,
            provenance,
            metrics: Some(verify(e)),
        }
    }

    /// Rebuild the embedding. Graphs are regenerated from `n` and `m`; every
    /// label is resolved against them. Collisions and non-edge hops are kept
    /// as written so the verifier can report them.
    pub fn into_embedding(self) -> Result<Embedding> {
        let guest = build_pqt(self.n).map_err(|e| schema("n", e.to_string()))?;
        let host = build_crossed_cube(self.m).map_err(|e| schema("m", e.to_string()))?;
        let count = guest.vertex_count();
        let guest_id = |field: &str, label: &str| -> Result<usize> {
            let addr: PqtAddress = label
                .parse()
                .map_err(|e: crate::topology::TopologyError| schema(field, e.to_string()))?;
            guest.id_of_address(&addr).ok_or_else(|| {
                schema(
                    field,
                    format!("{label:?} is not a vertex of PQT_{}", self.n),
                )
            })
        };
        let host_id = |field: &str, label: &str| -> Result<usize> {
            let v: CqVertex = label
                .parse()
                .map_err(|e: crate::topology::TopologyError| schema(field, e.to_string()))?;
            if v.dim() != self.m {
                return Err(schema(
                    field,
                    format!("{label:?} has {} bits, expected {}", v.dim(), self.m),
                ));
            }
            Ok(v.value() as usize)
        };

        let mut vertex_map = vec![usize::MAX; count];
        for (i, entry) in self.vertex_map.iter().enumerate() {
            let field = format!("vertex_map[{i}].pqt");
            let v = guest_id(&field, &entry.pqt)?;
            if vertex_map[v] != usize::MAX {
                return Err(schema(field, format!("duplicate key {:?}", entry.pqt)));
            }
            vertex_map[v] = host_id(&format!("vertex_map[{i}].cq"), &entry.cq)?;
        }
        if let Some(v) = vertex_map.iter().position(|&x| x == usize::MAX) {
            return Err(schema(
                "vertex_map",
                format!("no entry for {:?}", guest.label(v)),
            ));
        }

        let mut edge_paths = Vec::with_capacity(self.edge_paths.len());
        for (i, entry) in self.edge_paths.iter().enumerate() {
            let from = guest_id(&format!("edge_paths[{i}].from"), &entry.from)?;
            let to = guest_id(&format!("edge_paths[{i}].to"), &entry.to)?;
            let path = entry
                .path
                .iter()
                .enumerate()
                .map(|(j, label)| host_id(&format!("edge_paths[{i}].path[{j}]"), label))
                .collect::<Result<Vec<_>>>()?;
            if path.is_empty() {
                return Err(schema(format!("edge_paths[{i}].path"), "empty path"));
            }
            edge_paths.push(EdgePath {
                from,
                to,
                path,
                route: entry.route,
            });
        }

        let mut provenance: Vec<Option<RuleTag>> = vec![None; count];
        for (i, entry) in self.provenance.iter().enumerate() {
            let field = format!("provenance[{i}].pqt");
            let v = guest_id(&field, &entry.pqt)?;
            if provenance[v].is_some() {
                return Err(schema(field, format!("duplicate key {:?}", entry.pqt)));
            }
            let tag = entry
                .rule
                .parse()
                .map_err(|m| schema(format!("provenance[{i}].rule"), m))?;
            provenance[v] = Some(tag);
        }
        let provenance = provenance
            .into_iter()
            .enumerate()
            .map(|(v, t)| {
                t.ok_or_else(|| schema("provenance", format!("no entry for {:?}", guest.label(v))))
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Embedding {
            guest,
            host,
            vertex_map,
            edge_paths,
            provenance,
        })
    }
}

/// Pretty-printed JSON report with metrics.
pub fn embedding_to_json(e: &Embedding) -> String {
    to_json(&EmbeddingReport::from_embedding(e))
}

pub fn embedding_from_json(text: &str) -> Result<Embedding> {
    let report: EmbeddingReport = serde_json::from_str(text)
        .map_err(|e| schema(json_field(&e.to_string()), e.to_string()))?;
    report.into_embedding()
}

/// Field named in a serde error message, if any.
fn json_field(message: &str) -> String {
    for marker in ["missing field `", "unknown field `"] {
        if let Some(rest) = message.split(marker).nth(1) {
            if let Some(name) = rest.split('`').next() {
                return name.to_string();
            }
        }
    }
    "<document>".to_string()
}

/// Read an embedding report from `source`.
pub fn import_embedding(source: &Path) -> Result<Embedding> {
    let text = fs::read_to_string(source).map_err(|e| IoError::Io {
        path: source.to_path_buf(),
        source: e,
    })?;
    embedding_from_json(&text).map_err(|e| match e {
        IoError::Schema { field, message } => IoError::Schema {
            field,
            message: format!("{message} (in {})", source.display()),
        },
        other => other,
    })
}

/// Count host vertices used by more than one guest vertex.
pub fn collisions(e: &Embedding) -> usize {
    let mut seen: HashMap<usize, u32> = HashMap::new();
    for &x in &e.vertex_map {
        *seen.entry(x).or_default() += 1;
    }
    seen.values().filter(|&&c| c > 1).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedder::embed;

    #[test]
    fn cq2_edgelist() {
        let g = build_crossed_cube(2).unwrap();
        assert_eq!(graph_edgelist(&g), "00 01\n00 10\n01 11\n10 11\n");
    }

    #[test]
    fn json_round_trip() {
        let e = embed(3).unwrap();
        let text = embedding_to_json(&e);
        let back = embedding_from_json(&text).unwrap();
        assert_eq!(back, e);
        assert_eq!(embedding_to_json(&back), text);
    }

    #[test]
    fn duplicate_key_is_a_schema_error() {
        let e = embed(2).unwrap();
        let mut report = EmbeddingReport::from_embedding(&e);
        report.vertex_map[1].pqt = "0".into();
        let err = report.into_embedding().unwrap_err();
        assert!(
            matches!(&err, IoError::Schema { field, .. } if field == "vertex_map[1].pqt"),
            "{err}"
        );
    }

    #[test]
    fn schema_errors_name_the_field() {
        let err = embedding_from_json(r#"{"n": 2, "m": 2, "vertex_map": []}"#).unwrap_err();
        assert!(
            matches!(&err, IoError::Schema { field, .. } if field == "edge_paths"),
            "{err}"
        );
        let e = embed(2).unwrap();
        let mut report = EmbeddingReport::from_embedding(&e);
        report.edge_paths[0].path[1] = "011".into();
        let err = report.into_embedding().unwrap_err();
        assert!(
            matches!(&err, IoError::Schema { field, .. } if field == "edge_paths[0].path[1]"),
            "{err}"
        );
    }

    #[test]
    fn collisions_load_and_are_flagged() {
        let e = embed(3).unwrap();
        let mut report = EmbeddingReport::from_embedding(&e);
        report.vertex_map[2].cq = report.vertex_map[1].cq.clone();
        let back = report.into_embedding().unwrap();
        assert_eq!(collisions(&back), 1);
        assert!(!verify(&back).injective);
    }

    #[test]
    fn empty_bundle_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out");
        assert!(export(&ExportBundle::new(Format::Dot), &target)
            .unwrap()
            .is_empty());
        assert!(!target.exists());
    }

    #[test]
    fn bundle_names_must_be_unique() {
        let g = build_crossed_cube(2).unwrap();
        let mut b = ExportBundle::new(Format::Edgelist);
        b.graphs.push(("cq".into(), g.clone()));
        b.graphs.push(("cq".into(), g.clone()));
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            export(&b, dir.path()),
            Err(IoError::DuplicateName(_))
        ));
        let mut b = ExportBundle::new(Format::Edgelist);
        b.graphs.push((EMBEDDING_STEM.into(), g));
        b.embedding = Some(embed(2).unwrap());
        assert!(matches!(
            export(&b, dir.path()),
            Err(IoError::DuplicateName(_))
        ));
    }

    #[test]
    fn dot_marks_images() {
        let text = embedding_dot(&embed(3).unwrap());
        assert!(text.contains("\"0100\" [fillcolor=\"#87cefa\", label=\"0100\\n01\"]"));
        assert_eq!(text.matches("#e0e0e0").count(), 3);
    }

    #[test]
    fn io_errors_carry_the_path() {
        let err = import_embedding(Path::new("/nonexistent/report.json")).unwrap_err();
        assert!(err.to_string().starts_with("/nonexistent/report.json"));
    }
}
