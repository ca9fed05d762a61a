use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mismatch_index::oracle::{brute_force_query, walk_index};
use mismatch_index::{BuildError, BuildParams, MismatchIndex, Mode, QueryError, Symbol, TextError};
use mismatch_index_cli::ingest::{self, IngestError, TextFormat};
use mismatch_index_cli::persist::{self, FormatError};
use mismatch_index_cli::sweep::{self, SweepConfig, SweepError};
use mismatch_index_cli::workload::random_query;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "mmidx", version, about = "Hamming-distance text index")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index and write it to disk.
    Build(BuildArgs),
    /// Report every position within distance r of a pattern.
    Query(QueryArgs),
    /// Compare random queries against a full scan of the text.
    Verify(VerifyArgs),
    /// Sweep k and sigma over one text and write a JSON report.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Linear,
    Succinct,
}

#[derive(Args)]
struct TextArgs {
    /// How to read text and pattern files.
    #[arg(long, value_enum, default_value_t = TextFormat::Bytes)]
    format: TextFormat,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    text: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    sigma: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Linear)]
    mode: ModeArg,
    /// Fingerprint sampling rate; succinct mode only.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    tau: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Clusters per inversion structure, or "none" for uncapped.
    #[arg(long, default_value = "64", value_parser = parse_cap)]
    cluster_cap: Cap,
    /// Check structural invariants after building; violations exit 1.
    #[arg(long)]
    audit: bool,
    /// Recheck every fingerprint comparison by direct scan.
    #[arg(long)]
    paranoid: bool,
    /// Leave the text out of the file; loading then needs --text.
    #[arg(long)]
    no_text: bool,
    #[command(flatten)]
    input: TextArgs,
}

#[derive(Clone, Copy)]
struct Cap(Option<u32>);

fn parse_cap(s: &str) -> Result<Cap, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(Cap(None));
    }
    s.parse().map(|c| Cap(Some(c))).map_err(|_| format!("expected an integer or \"none\", got {s:?}"))
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long, required_unless_present = "pattern_file", conflicts_with = "pattern_file")]
    pattern: Option<String>,
    #[arg(long)]
    pattern_file: Option<PathBuf>,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    json: bool,
    /// Original text, for indices saved with --no-text.
    #[arg(long)]
    text: Option<PathBuf>,
    #[command(flatten)]
    input: TextArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Longest random pattern.
    #[arg(long, default_value_t = 32)]
    max_len: usize,
    #[arg(long)]
    text: Option<PathBuf>,
    #[command(flatten)]
    input: TextArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    text: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u32).range(1..))]
    sigma: Vec<u32>,
    #[arg(long, default_value_t = 100)]
    queries: usize,
    #[arg(long, default_value_t = 32)]
    max_len: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Linear)]
    mode: ModeArg,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    tau: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    input: TextArgs,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
            CliError::Ingest(_) | CliError::Format(_) | CliError::Io { .. } => 3,
        }
    }
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn mode_of(mode: ModeArg, tau: Option<u32>) -> Result<Mode, CliError> {
    match (mode, tau) {
        (ModeArg::Linear, Some(_)) => Err(CliError::Usage("--tau applies to --mode succinct only".into())),
        (ModeArg::Linear, None) => Ok(Mode::Linear),
        (ModeArg::Succinct, tau) => Ok(Mode::Succinct { tau: tau.unwrap_or(8) as usize }),
    }
}

fn write_file(path: &Path, data: &[u8]) -> Result<(), CliError> {
    fs::write(path, data).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load_index(path: &Path, text: Option<&Path>, format: TextFormat) -> Result<MismatchIndex, CliError> {
    let raw = text.map(|t| ingest::read(t, format)).transpose()?;
    Ok(persist::load(path, raw.as_deref())?)
}

fn build(a: BuildArgs) -> Result<(), CliError> {
    let raw = ingest::read(&a.text, a.input.format)?;
    let mode = mode_of(a.mode, a.tau)?;
    let params = BuildParams::new(a.k, a.sigma as usize)
        .mode(mode)
        .seed(a.seed)
        .cluster_cap(a.cluster_cap.0)
        .paranoid(a.paranoid)
        .audit(a.audit);
    let index = MismatchIndex::build(&raw, params)?;
    let bytes = persist::to_bytes(&index, !a.no_text);
    write_file(&a.out, &bytes)?;
    let rep = index.report();
    println!("n: {}", rep.n);
    println!("k: {}", rep.k);
    println!("sigma: {}", rep.sigma);
    println!("mode: {}", if mode == Mode::Linear { "linear".to_string() } else { format!("succinct tau={}", mode.tau()) });
    println!("nodes: {}", rep.nodes);
    println!("pivots: {}", rep.pivots);
    println!("leaves: {}", rep.leaves);
    println!("height: {}", rep.height);
    println!("path_labels: {}", rep.labels());
    println!("max_leaves_per_label: {}", rep.max_leaves_per_label());
    println!("cluster_entries: {}", rep.cluster_entries);
    println!("missing_entries: {}", rep.missing_entries);
    println!("fingerprints: {}", rep.fingerprints);
    println!("tree_bytes: {}", persist::tree_bytes(index.tree()));
    println!("file_bytes: {}", bytes.len());
    if a.audit {
        let v = walk_index(&index, false);
        println!("violations: {}", v.len());
        for x in &v {
            println!("  {x}");
        }
        if !v.is_empty() {
            return Err(CliError::Failed(format!("{} structural violations", v.len())));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Hit {
    position: usize,
    distance: usize,
}

fn query(a: QueryArgs) -> Result<(), CliError> {
    let index = load_index(&a.index, a.text.as_deref(), a.input.format)?;
    let q: Vec<Symbol> = match (&a.pattern, &a.pattern_file) {
        (Some(p), _) => ingest::parse(p.as_bytes(), a.input.format)?,
        (None, Some(f)) => ingest::read(f, a.input.format)?,
        (None, None) => unreachable!("clap requires one of --pattern or --pattern-file"),
    };
    if q.is_empty() {
        return Err(CliError::Usage(TextError::EmptyQuery.to_string()));
    }
    let hits = index.query(&q, a.r)?;
    if a.json {
        let out: Vec<Hit> = hits.iter().map(|m| Hit { position: m.position, distance: m.distance }).collect();
        println!("{}", serde_json::to_string(&out).expect("plain data serializes"));
    } else {
        for m in hits {
            println!("{}\t{}", m.position, m.distance);
        }
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let index = load_index(&a.index, a.text.as_deref(), a.input.format)?;
    let raw = index.text().raw().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut failures = 0usize;
    for trial in 0..a.trials {
        let (q, r) = random_query(&raw, index.k(), a.max_len.max(1), &mut rng);
        let got = index.query(&q, r)?;
        let want = brute_force_query(index.text(), &q, r);
        if got != want {
            failures += 1;
            let extra: Vec<usize> = got.iter().filter(|m| !want.contains(m)).map(|m| m.position).collect();
            let lost: Vec<usize> = want.iter().filter(|m| !got.contains(m)).map(|m| m.position).collect();
            println!("mismatch at trial {trial}: r={r} pattern={q:?} missing={lost:?} spurious={extra:?}");
        }
    }
    if failures > 0 {
        return Err(CliError::Failed(format!("{failures} of {} trials disagree with the scan", a.trials)));
    }
    println!("ok: {} trials agree", a.trials);
    Ok(())
}

fn bench(a: BenchArgs) -> Result<(), CliError> {
    let raw = ingest::read(&a.text, a.input.format)?;
    let cfg = SweepConfig {
        ks: a.k,
        sigmas: a.sigma.iter().map(|&s| s as usize).collect(),
        mode: mode_of(a.mode, a.tau)?,
        queries: a.queries,
        max_query_len: a.max_len.max(1),
        seed: a.seed,
    };
    let report = sweep::run(&raw, &cfg)?;
    let json = serde_json::to_string_pretty(&report).expect("plain data serializes");
    match a.out {
        Some(p) => write_file(&p, json.as_bytes()),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Command::Build(a) => build(a),
        Command::Query(a) => query(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
