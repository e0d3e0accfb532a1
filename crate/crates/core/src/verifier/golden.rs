//! Reference vertex maps and edge paths transcribed from the published
//! tables, with a checker that compares an embedding against them.

use std::fmt;
use std::str::FromStr;

use crate::embedder::Embedding;
use crate::topology::PqtAddress;

/// One of the published reference tables. `F5` is the four-vertex map of
/// the `n = 2` drawing, whose images follow from the `n = 2` block of `T6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableId {
    F5,
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
}

impl TableId {
    pub const ALL: [TableId; 10] = [
        TableId::F5,
        TableId::T1,
        TableId::T2,
        TableId::T3,
        TableId::T4,
        TableId::T5,
        TableId::T6,
        TableId::T7,
        TableId::T8,
        TableId::T9,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableId::F5 => "F5",
            TableId::T1 => "T1",
            TableId::T2 => "T2",
            TableId::T3 => "T3",
            TableId::T4 => "T4",
            TableId::T5 => "T5",
            TableId::T6 => "T6",
            TableId::T7 => "T7",
            TableId::T8 => "T8",
            TableId::T9 => "T9",
        }
    }

    /// Guest heights the table has rows for.
    pub fn heights(self) -> &'static [u32] {
        match self {
            TableId::F5 => &[2],
            TableId::T1 => &[3],
            TableId::T2 => &[4],
            TableId::T3 | TableId::T7 => &[5],
            TableId::T4 | TableId::T8 => &[6],
            TableId::T5 | TableId::T9 => &[8],
            TableId::T6 => &[2, 3, 4],
        }
    }

    /// Rows for guest height `n`, or `None` if the table has no block for it.
    pub fn rows(self, n: u32) -> Option<Vec<GoldenRow>> {
        if !self.heights().contains(&n) {
            return None;
        }
        let rows = match self {
            TableId::F5 => vertex_rows(&[("0", "00"), ("01", "01"), ("02", "10"), ("03", "11")]),
            TableId::T1 => vertex_rows(&[
                ("0", "0000"),
                ("01", "0100"),
                ("02", "1000"),
                ("03", "1100"),
            ]),
            TableId::T2 => vertex_rows(&[
                ("0", "000000"),
                ("01", "010000"),
                ("02", "100000"),
                ("03", "110000"),
            ]),
            TableId::T3 => vertex_rows(&[
                ("0", "0000000"),
                ("01", "0010000"),
                ("02", "1010000"),
                ("03", "1000000"),
            ]),
            TableId::T4 => vertex_rows(&[
                ("0", "000000000"),
                ("01", "010000000"),
                ("02", "100000000"),
                ("03", "110000000"),
            ]),
            TableId::T5 => vertex_rows(&[
                ("0", "000000000000"),
                ("01", "001000000000"),
                ("02", "101000000000"),
                ("03", "100000000000"),
            ]),
            TableId::T6 => match n {
                2 => edge_rows(
                    "",
                    &[
                        ("0", "01", &["00", "01"]),
                        ("0", "02", &["00", "10"]),
                        ("0", "03", &["00", "10", "11"]),
                    ],
                ),
                3 => edge_rows(
                    "",
                    &[
                        ("0", "01", &["0000", "0100"]),
                        ("0", "02", &["0000", "1000"]),
                        ("0", "03", &["0000", "1000", "1100"]),
                    ],
                ),
                _ => edge_rows(
                    "",
                    &[
                        ("0", "01", &["000000", "010000"]),
                        ("0", "02", &["000000", "100000"]),
                        ("0", "03", &["000000", "100000", "110000"]),
                    ],
                ),
            },
            TableId::T7 => [
                edge_rows(
                    "A",
                    &[
                        ("0", "01", &["0000000", "0010000"]),
                        ("0", "02", &["0000000", "0010000", "1010000"]),
                        ("0", "03", &["0000000", "1000000"]),
                    ],
                ),
                edge_rows(
                    "B",
                    &[
                        ("01", "011", &["0010000", "0010001"]),
                        ("01", "012", &["0010000", "0110000", "0100000"]),
                        ("01", "013", &["0010010", "0110000"]),
                    ],
                ),
                edge_rows(
                    "C",
                    &[
                        ("03", "031", &["1000000", "1000001"]),
                        ("03", "032", &["1000000", "1000001", "0000011"]),
                        ("03", "033", &["1000000", "1000010"]),
                    ],
                ),
                edge_rows(
                    "D",
                    &[
                        ("0331", "03311", &["1010010", "1010011"]),
                        ("0331", "03312", &["1010010", "0010010"]),
                        ("0331", "03313", &["1010010", "0010010", "0010011"]),
                    ],
                ),
            ]
            .concat(),
            TableId::T8 => edge_rows(
                "",
                &[
                    ("0", "01", &["000000000", "010000000"]),
                    ("0", "02", &["000000000", "100000000"]),
                    ("0", "03", &["000000000", "100000000", "110000000"]),
                ],
            ),
            TableId::T9 => [
                edge_rows(
                    "A",
                    &[
                        ("0", "01", &["000000000000", "001000000000"]),
                        ("0", "02", &["000000000000", "001000000000", "101000000000"]),
                        ("0", "03", &["000000000000", "100000000000"]),
                    ],
                ),
                edge_rows(
                    "B",
                    &[
                        ("03", "031", &["100000000000", "100010000000"]),
                        (
                            "03",
                            "032",
                            &["100000000000", "100010000000", "000010000000"],
                        ),
                        ("03", "033", &["100000000000", "100000000001"]),
                    ],
                ),
                edge_rows(
                    "C",
                    &[
                        ("01", "011", &["001000000000", "001010000000"]),
                        (
                            "01",
                            "012",
                            &["001000000000", "011000000000", "010000000000"],
                        ),
                        ("01", "013", &["001000000000", "011000000000"]),
                    ],
                ),
                edge_rows(
                    "D",
                    &[
                        ("011", "0111", &["001010000000", "001011000000"]),
                        (
                            "011",
                            "0112",
                            &["001010000000", "001110000000", "001100000000"],
                        ),
                        ("011", "0113", &["001010000000", "001110000000"]),
                    ],
                ),
                edge_rows(
                    "E",
                    &[
                        ("0111", "01111", &["001011000000", "001011010000"]),
                        (
                            "0111",
                            "01112",
                            &["001011000000", "001011010000", "001010010000"],
                        ),
                        ("0111", "01113", &["001011000000", "001011000001"]),
                    ],
                ),
            ]
            .concat(),
        };
        Some(rows)
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        TableId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown table {s:?}; expected one of F5, T1..T9"))
    }
}

/// A reference row: either a vertex image or a full edge path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoldenRow {
    Vertex {
        pqt: &'static str,
        cq: &'static str,
    },
    Edge {
        group: &'static str,
        from: &'static str,
        to: &'static str,
        path: Vec<&'static str>,
    },
}

fn vertex_rows(rows: &[(&'static str, &'static str)]) -> Vec<GoldenRow> {
    rows.iter()
        .map(|&(pqt, cq)| GoldenRow::Vertex { pqt, cq })
        .collect()
}

fn edge_rows(
    group: &'static str,
    rows: &[(&'static str, &'static str, &[&'static str])],
) -> Vec<GoldenRow> {
    rows.iter()
        .map(|&(from, to, path)| GoldenRow::Edge {
            group,
            from,
            to,
            path: path.to_vec(),
        })
        .collect()
}

/// Verdict on one reference row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowVerdict {
    /// Row name, e.g. `02` or `A 0-02`.
    pub row: String,
    pub expected: String,
    pub actual: String,
}

impl RowVerdict {
    pub fn matches(&self) -> bool {
        self.expected == self.actual
    }
}

/// Outcome of comparing an embedding against one table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenReport {
    pub table: TableId,
    pub rows: Vec<RowVerdict>,
    /// Guest vertices (vertex tables) or guest edges (edge tables) the
    /// table says nothing about.
    pub not_covered: usize,
}

impl GoldenReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &RowVerdict> {
        self.rows.iter().filter(|r| !r.matches())
    }

    pub fn mismatch_count(&self) -> usize {
        self.mismatches().count()
    }

    /// One line per row, then a summary line.
    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.row.len()).max().unwrap_or(0);
        let mut out = String::new();
        for r in &self.rows {
            let verdict = if r.matches() { "match" } else { "MISMATCH" };
            out.push_str(&format!(
                "{:<width$}  {verdict:<8}  expected {}",
                r.row, r.expected
            ));
            if !r.matches() {
                out.push_str(&format!("  actual {}", r.actual));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{}: {} rows, {} mismatches, {} not covered\n",
            self.table,
            self.rows.len(),
            self.mismatch_count(),
            self.not_covered
        ));
        out
    }
}

/// Compare `e` against the rows of `table`.
pub fn check_against_golden(
    e: &Embedding,
    table: TableId,
) -> Result<GoldenReport, super::VerifyError> {
    let n = e.n();
    let rows = table.rows(n).ok_or(super::VerifyError::ShapeMismatch {
        table,
        n,
        heights: table.heights().to_vec(),
    })?;
    let id = |label: &str| -> Option<usize> {
        label
            .parse::<PqtAddress>()
            .ok()
            .and_then(|a| e.guest.id_of_address(&a))
    };
    let host_label = |x: usize| -> String {
        if x < e.host.vertex_count() {
            e.host.label(x)
        } else {
            format!("#{x}")
        }
    };
    let mut verdicts = Vec::with_capacity(rows.len());
    let mut covered_vertices = 0;
    let mut covered_edges = 0;
    for row in &rows {
        match row {
            GoldenRow::Vertex { pqt, cq } => {
                covered_vertices += 1;
                let actual = match id(pqt).and_then(|v| e.vertex_map.get(v)) {
                    Some(&x) => host_label(x),
                    None => "missing".to_string(),
                };
                verdicts.push(RowVerdict {
                    row: pqt.to_string(),
                    expected: cq.to_string(),
                    actual,
                });
            }
            GoldenRow::Edge {
                group,
                from,
                to,
                path,
            } => {
                covered_edges += 1;
                let actual = match (id(from), id(to)) {
                    (Some(a), Some(b)) => match e.path_for(a, b) {
                        Some(p) => {
                            let mut hops: Vec<String> =
                                p.path.iter().map(|&x| host_label(x)).collect();
                            if p.from != a {
                                hops.reverse();
                            }
                            hops.join("-")
                        }
                        None => "missing".to_string(),
                    },
                    _ => "missing".to_string(),
                };
                let name = format!("{from}-{to}");
                verdicts.push(RowVerdict {
                    row: if group.is_empty() {
                        name
                    } else {
                        format!("{group} {name}")
                    },
                    expected: path.join("-"),
                    actual,
                });
            }
        }
    }
    let not_covered = if covered_edges > 0 {
        e.guest.edge_count().saturating_sub(covered_edges)
    } else {
        e.guest.vertex_count().saturating_sub(covered_vertices)
    };
    Ok(GoldenReport {
        table,
        rows: verdicts,
        not_covered,
    })
}
