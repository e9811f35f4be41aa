use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use sigx::{CompressedIndex, IndexStats, Mode, PlannerConfig};

mod bench;
mod selftest;

/// Compressed self-index over the LZ77 parse and a signature grammar.
#[derive(Parser)]
#[command(name = "sigx", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index file from a text file.
    Build {
        text: PathBuf,
        out: PathBuf,
        #[arg(long, default_value = "full")]
        mode: Mode,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        epsilon: f64,
        /// Overridden by the SIGX_SEED environment variable.
        #[arg(long)]
        seed: Option<u64>,
        /// Semi-short length cap in place of the one derived from z.
        #[arg(long)]
        semishort_cap: Option<usize>,
    },
    /// Print the sorted 1-based occurrences of one pattern. Exits 1 when
    /// there are none.
    Query {
        index: PathBuf,
        pattern: String,
        /// Read the pattern as hex-encoded bytes.
        #[arg(long)]
        hex: bool,
    },
    /// Answer one pattern per input line, printing `line<TAB>count<TAB>positions`
    /// in input order.
    BatchQuery {
        index: PathBuf,
        patterns: PathBuf,
        #[arg(long)]
        hex: bool,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print index statistics as CSV.
    Stats { index: PathBuf },
    /// Compare the index and fresh builds in every mode against a naive scan.
    Selftest {
        index: PathBuf,
        text: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Measure size and query trends over a series of generated texts (CSV).
    Bench {
        /// copies, random, english, fibonacci or runs.
        #[arg(long, default_value = "copies")]
        family: String,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize << 14, 1 << 15, 1 << 16, 1 << 17])]
        sizes: Vec<usize>,
        /// Queries per pattern length.
        #[arg(long, default_value_t = 100)]
        queries: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

const DEFAULT_SEED: u64 = 0x5167_0001;

/// `SIGX_SEED` wins over `--seed`.
fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    match std::env::var("SIGX_SEED") {
        Ok(v) => v.trim().parse().with_context(|| format!("SIGX_SEED={v:?} is not an unsigned integer")),
        Err(_) => Ok(flag.unwrap_or(DEFAULT_SEED)),
    }
}

fn decode_pattern(raw: &str, hex: bool) -> Result<Vec<u8>> {
    if hex {
        hex::decode(raw.trim()).with_context(|| format!("invalid hex pattern {raw:?}"))
    } else {
        Ok(raw.as_bytes().to_vec())
    }
}

fn load(path: &Path) -> Result<CompressedIndex> {
    CompressedIndex::load(path).with_context(|| format!("loading index {}", path.display()))
}

fn read_text(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

pub(crate) fn stats_header() -> String {
    let mut cols = vec![
        "n", "z", "mode", "epsilon", "k_short", "l_semishort", "dag_nodes", "dag_edges", "dag_height",
        "z_lg_n_over_z", "node_ratio", "trusted", "long_points", "short_symbols", "semishort_windows",
        "semishort_strings", "filter_bits", "filter_entries", "filter_ones",
    ]
    .into_iter()
    .map(String::from)
    .collect::<Vec<_>>();
    cols.extend(sigx::planner::SECTION_NAMES.iter().map(|s| format!("bytes_{s}")));
    cols.push("bytes_total".into());
    cols.join(",")
}

pub(crate) fn z_lg_n_over_z(n: usize, z: usize) -> f64 {
    z as f64 * (n as f64 / z as f64).log2().max(1.0)
}

pub(crate) fn stats_row(s: &IndexStats) -> String {
    let opt = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
    let model = z_lg_n_over_z(s.n, s.z);
    let mut cols = vec![
        s.n.to_string(),
        s.z.to_string(),
        s.mode.to_string(),
        format!("{:.6}", s.epsilon),
        s.k_short.to_string(),
        s.l_semishort.to_string(),
        s.dag_nodes.to_string(),
        s.dag_edges.to_string(),
        s.dag_height.to_string(),
        format!("{model:.1}"),
        format!("{:.4}", s.dag_nodes as f64 / model),
        s.trusted.to_string(),
        s.long_points.to_string(),
        s.short_symbols.to_string(),
        opt(s.semishort_windows),
        opt(s.semishort_strings),
        opt(s.filter_bits),
        opt(s.filter_entries),
        opt(s.filter_ones),
    ];
    cols.extend(s.sections.iter().map(|(_, b)| b.to_string()));
    cols.push(s.sections.iter().map(|(_, b)| b).sum::<usize>().to_string());
    cols.join(",")
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Build { text, out, mode, epsilon, seed, semishort_cap } => {
            let bytes = read_text(&text)?;
            if bytes.is_empty() {
                bail!("{} is empty", text.display());
            }
            let config = PlannerConfig { mode, epsilon, seed: resolve_seed(seed)?, semishort_cap, fingerprint: None };
            let started = std::time::Instant::now();
            let index = CompressedIndex::build(&bytes, &config)?;
            eprintln!("built in {:.2}s", started.elapsed().as_secs_f64());
            index.save(&out).with_context(|| format!("writing {}", out.display()))?;
            let s = index.stats();
            let mut w = BufWriter::new(io::stdout().lock());
            writeln!(w, "n\t{}", s.n)?;
            writeln!(w, "z\t{}", s.z)?;
            writeln!(w, "mode\t{}", s.mode)?;
            writeln!(w, "dag_nodes\t{}", s.dag_nodes)?;
            writeln!(w, "dag_edges\t{}", s.dag_edges)?;
            for (name, b) in &s.sections {
                writeln!(w, "bytes_{name}\t{b}")?;
            }
            writeln!(w, "bytes_total\t{}", s.sections.iter().map(|(_, b)| b).sum::<usize>())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Query { index, pattern, hex } => {
            let pattern = decode_pattern(&pattern, hex)?;
            let found = load(&index)?.locate(&pattern);
            let mut w = BufWriter::new(io::stdout().lock());
            for p in &found {
                writeln!(w, "{p}")?;
            }
            w.flush()?;
            Ok(if found.is_empty() { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::BatchQuery { index, patterns, hex, threads } => {
            let index = load(&index)?;
            let input = read_text(&patterns)?;
            let lines: Vec<&[u8]> = input.split(|&b| b == b'\n').map(|l| l.strip_suffix(b"\r").unwrap_or(l)).collect();
            let lines = match lines.last() {
                Some([]) => &lines[..lines.len() - 1],
                _ => &lines[..],
            };
            let pats = lines
                .iter()
                .map(|l| if hex { decode_pattern(std::str::from_utf8(l)?, true) } else { Ok(l.to_vec()) })
                .collect::<Result<Vec<_>>>()?;
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
            let results: Vec<Vec<usize>> = pool.install(|| pats.par_iter().map(|p| index.locate(p)).collect());
            let mut w = BufWriter::new(io::stdout().lock());
            for (i, found) in results.iter().enumerate() {
                let list: Vec<String> = found.iter().map(usize::to_string).collect();
                writeln!(w, "{}\t{}\t{}", i + 1, found.len(), list.join(" "))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { index } => {
            let s = load(&index)?.stats();
            println!("{}", stats_header());
            println!("{}", stats_row(&s));
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { index, text, trials, seed } => {
            let loaded = load(&index)?;
            let text = read_text(&text)?;
            let ok = selftest::run(&loaded, &text, trials, resolve_seed(seed)?)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bench { family, sizes, queries, seed } => {
            bench::run(&family, &sizes, queries, resolve_seed(seed)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sigx: {e:#}");
            ExitCode::from(2)
        }
    }
}
