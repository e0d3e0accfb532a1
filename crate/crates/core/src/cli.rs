//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a check fails (verification, golden
//! mismatch, no embedding found), 2 for bad invocations and unreadable input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::embedder::{embed_with, EmbedError, EmbedOptions, DEFAULT_MAX_DIM};
use crate::io::{self, ExportBundle, Format};
use crate::topology::{build_crossed_cube, build_hypercube, build_pqt, MAX_CUBE_DIM};
use crate::verifier::{check_against_golden, verify, TableId};

/// Environment variable that raises or lowers the host dimension cap.
pub const MAX_DIM_VAR: &str = "CQEMBED_MAX_DIM";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cqembed",
    version,
    about = "Embed sub-quadtrees into crossed cubes and check the result"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the crossed cube CQ_m.
    GenCq(CubeArgs),
    /// Print the hypercube Q_m.
    GenQ(CubeArgs),
    /// Print the sub-quadtree PQT_n.
    GenPqt(TreeArgs),
    /// Embed PQT_n and print the JSON report.
    Embed {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a report; exit 0 iff one-to-one, all paths valid and dilation <= 2.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Print the metrics of a report, or of a fresh embedding of PQT_n.
    Metrics {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "text")]
        format: MetricsFormat,
    },
    /// Write PQT_n, its host cube and the embedding into a directory.
    Export {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Compare a fresh embedding of PQT_n against a published table.
    GoldenCheck {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        table: TableId,
    },
}

#[derive(Debug, Args)]
pub struct CubeArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long, value_enum, default_value = "edgelist")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value = "edgelist")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Dot,
    Json,
    Edgelist,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Dot => Format::Dot,
            FormatArg::Json => Format::Json,
            FormatArg::Edgelist => Format::Edgelist,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricsFormat {
    Text,
    Json,
}

/// A failure with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn check_failed(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CHECK_FAILED,
        message: message.into(),
    }
}

impl From<EmbedError> for Failure {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::HeightTooSmall(_)
            | EmbedError::TooLarge { .. }
            | EmbedError::Topology(_) => usage(e.to_string()),
            _ => check_failed(e.to_string()),
        }
    }
}

impl From<io::IoError> for Failure {
    fn from(e: io::IoError) -> Self {
        usage(e.to_string())
    }
}

/// Dimension cap, from the environment if set.
pub fn max_dim() -> Result<u32, Failure> {
    match std::env::var(MAX_DIM_VAR) {
        Err(_) => Ok(DEFAULT_MAX_DIM),
        Ok(text) => match text.trim().parse::<u32>() {
            Ok(v) if (1..=MAX_CUBE_DIM).contains(&v) => Ok(v),
            _ => Err(usage(format!(
                "{MAX_DIM_VAR}={text:?} is not an integer in 1..={MAX_CUBE_DIM}"
            ))),
        },
    }
}

/// Run one command, writing normal output to `out`. Returns the exit status
/// for a completed run.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let cap = max_dim()?;
    let options = EmbedOptions {
        max_dim: cap,
        ..EmbedOptions::default()
    };
    match cli.command {
        Command::GenCq(a) => {
            check_cap(a.m, cap)?;
            let g = build_crossed_cube(a.m).map_err(|e| usage(e.to_string()))?;
            emit(
                out,
                a.out.as_deref(),
                &io::graph_text(&g, &format!("CQ_{}", a.m), a.format.into()),
            )?;
        }
        Command::GenQ(a) => {
            check_cap(a.m, cap)?;
            let g = build_hypercube(a.m).map_err(|e| usage(e.to_string()))?;
            emit(
                out,
                a.out.as_deref(),
                &io::graph_text(&g, &format!("Q_{}", a.m), a.format.into()),
            )?;
        }
        Command::GenPqt(a) => {
            let g = build_pqt(a.n).map_err(|e| usage(e.to_string()))?;
            emit(
                out,
                a.out.as_deref(),
                &io::graph_text(&g, &format!("PQT_{}", a.n), a.format.into()),
            )?;
        }
        Command::Embed { n, out: path } => {
            let e = embed_with(n, &options)?;
            emit(out, path.as_deref(), &io::embedding_to_json(&e))?;
        }
        Command::Verify { input } => {
            let e = io::import_embedding(&input)?;
            let report = verify(&e);
            write(out, &report.to_text())?;
            let mut failed = Vec::new();
            if !report.injective {
                failed.push("injective: false".to_string());
            }
            if !report.paths_valid {
                failed.push("paths_valid: false".to_string());
            }
            if report.dilation > 2 {
                failed.push(format!("dilation: {} > 2", report.dilation));
            }
            if failed.is_empty() {
                write(out, "verdict: PASS\n")?;
            } else {
                write(out, &format!("verdict: FAIL ({})\n", failed.join(", ")))?;
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Metrics { source, format } => {
            let e = load(&source, &options)?;
            let report = verify(&e);
            let text = match format {
                MetricsFormat::Text => report.to_text(),
                MetricsFormat::Json => {
                    let mut t = serde_json::to_string_pretty(&report).expect("metrics serialize");
                    t.push('\n');
                    t
                }
            };
            write(out, &text)?;
        }
        Command::Export {
            source,
            out: dir,
            format,
        } => {
            let e = load(&source, &options)?;
            let mut bundle = ExportBundle::new(format.into());
            bundle
                .graphs
                .push((format!("pqt_{}", e.n()), e.guest.clone()));
            bundle
                .graphs
                .push((format!("cq_{}", e.m()), e.host.clone()));
            bundle.embedding = Some(e);
            for path in io::export(&bundle, &dir)? {
                write(out, &format!("{}\n", path.display()))?;
            }
        }
        Command::GoldenCheck { n, table } => {
            let e = embed_with(n, &options)?;
            let report = check_against_golden(&e, table).map_err(|e| usage(e.to_string()))?;
            write(out, &report.to_text())?;
            if report.mismatch_count() > 0 {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

fn check_cap(m: u32, cap: u32) -> Result<(), Failure> {
    if m > cap {
        return Err(usage(format!(
            "m = {m} is above the dimension cap {cap}; set {MAX_DIM_VAR} to raise it"
        )));
    }
    Ok(())
}

fn load(source: &Source, options: &EmbedOptions) -> Result<crate::embedder::Embedding, Failure> {
    match (&source.input, source.n) {
        (Some(path), _) => Ok(io::import_embedding(path)?),
        (None, Some(n)) => Ok(embed_with(n, options)?),
        (None, None) => Err(usage("one of --n or --in is required")),
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => write(out, text),
    }
}

fn write(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| usage(format!("stdout: {e}")))
}

/// Entry point for the binary: parse `args`, run, and return the exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["cqembed"];
        full.extend_from_slice(args);
        let code = main_with(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn gen_cq_prints_sorted_edges() {
        let (code, out, _) = call(&["gen-cq", "--m", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "00 01\n00 10\n01 11\n10 11\n");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["embed"]).0, EXIT_USAGE);
        assert_eq!(call(&["gen-cq", "--m", "17"]).0, EXIT_USAGE);
        assert_eq!(
            call(&["golden-check", "--n", "3", "--table", "T12"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            call(&["golden-check", "--n", "3", "--table", "T3"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            call(&["metrics", "--n", "3", "--in", "x.json"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn golden_check_reports_rows() {
        let (code, out, _) = call(&["golden-check", "--n", "3", "--table", "T1"]);
        assert_eq!(code, 0);
        assert!(
            out.ends_with("T1: 4 rows, 0 mismatches, 9 not covered\n"),
            "{out}"
        );
    }

    #[test]
    fn metrics_table() {
        let (code, out, _) = call(&["metrics", "--n", "3"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("dilation     2\n"), "{out}");
    }
}
