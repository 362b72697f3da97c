//! `exrec` — expert recommendation for Q&A communities.
//!
//! One binary, one fixed pipeline: `ingest` a data dump into a verified
//! store, `index` it for lexical relevance, build the interaction
//! `graph` and its expertise scores, then `recommend`, `evaluate`, or
//! `explain` rankings. Every artifact directory carries a manifest with
//! content hashes and a `run.json` snapshot of the effective
//! configuration, and every stage checks those hashes before trusting an
//! input, so a stale or edited artifact fails loudly (exit 4) instead of
//! skewing results.
//!
//! Exit codes: 0 success, 1 usage (including empty queries and unknown
//! users), 2 I/O, 3 malformed input or config, 4 integrity.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use exrec_core::config::RunConfig;
use exrec_core::corpus::{
    date_filter, ingest_dump, ingest_to_memory, load_store, save_store, CorpusStore,
    IngestSummary,
};
use exrec_core::eval::{evaluate, parse_queries_file};
use exrec_core::graph::{
    build_graph, expertise_rank, load_prestige, save_prestige, verify_graph_matches_store,
};
use exrec_core::pipeline::{explain, recommend, ArtifactRefs};
use exrec_core::relevance::{build_index, load_index, save_index, verify_index_matches_store};
use exrec_core::{Error, ExpertiseRankF64, RankedExpertListF64, RelevanceIndexF64, Result};

/// Name of the config snapshot written into every artifact directory.
const RUN_SNAPSHOT_FILE: &str = "run.json";

#[derive(Parser)]
#[command(
    name = "exrec",
    version,
    about = "Expert recommendation for Q&A communities: ingest a data dump, build the \
             relevance index and interaction graph, then rank and evaluate candidate experts."
)]
struct Cli {
    /// Key=value config file; $EXREC_CONFIG is used when this flag is
    /// absent [default: none]
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override one config key, e.g. --set alpha=0.7; repeatable, wins
    /// over the config file [default: none]
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Seed for the per-user train/test splits; wins over the config
    /// file and --set [default: 42]
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Cap worker threads; every value produces byte-identical output
    /// [default: all cores]
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a Posts/Users XML dump into a verified corpus store
    Ingest(IngestArgs),
    /// Build the TF-IDF index and per-user train/test profiles
    Index(IndexArgs),
    /// Build the asker→answerer graph and its expertise scores
    Graph(GraphArgs),
    /// Rank experts for one query (or a file of queries)
    Recommend(RecommendArgs),
    /// Score rankings against relevance judgements over a query file
    Evaluate(EvaluateArgs),
    /// Show how one user moved through the cascade for a query
    Explain(ExplainArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Posts XML file from a data dump
    #[arg(long, value_name = "FILE")]
    posts: PathBuf,

    /// Users XML file; without it reputations default to zero
    /// [default: none]
    #[arg(long, value_name = "FILE")]
    users: Option<PathBuf>,

    /// Directory to write the corpus store into
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// Keep only posts created on or after this date, RFC 3339 or
    /// YYYY-MM-DD [default: no lower bound]
    #[arg(long, value_name = "DATE")]
    from: Option<String>,

    /// Keep only posts created on or before this date, RFC 3339 or
    /// YYYY-MM-DD [default: no upper bound]
    #[arg(long, value_name = "DATE")]
    to: Option<String>,
}

#[derive(Args)]
struct IndexArgs {
    /// Corpus store directory (from `exrec ingest`)
    #[arg(long, value_name = "DIR")]
    store: PathBuf,

    /// Directory to write the index into
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct GraphArgs {
    /// Corpus store directory (from `exrec ingest`)
    #[arg(long, value_name = "DIR")]
    store: PathBuf,

    /// Directory to write the graph and scores into
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

/// The three artifact directories every ranking command needs.
#[derive(Args)]
struct ArtifactArgs {
    /// Corpus store directory (from `exrec ingest`)
    #[arg(long, value_name = "DIR")]
    store: PathBuf,

    /// Relevance index directory (from `exrec index`)
    #[arg(long, value_name = "DIR")]
    index: PathBuf,

    /// Graph directory (from `exrec graph`)
    #[arg(long, value_name = "DIR")]
    graph: PathBuf,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true))]
struct RecommendArgs {
    #[command(flatten)]
    artifacts: ArtifactArgs,

    /// The question to find experts for
    #[arg(long, value_name = "TEXT", group = "source")]
    query: Option<String>,

    /// File with one query per line instead of --query
    #[arg(long, value_name = "FILE", group = "source")]
    queries: Option<PathBuf>,

    /// Print only the first N experts [default: all ranked candidates]
    #[arg(long, value_name = "N")]
    top: Option<usize>,

    /// Emit JSON instead of the table
    #[arg(long)]
    json: bool,

    /// Write the report here instead of stdout [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    artifacts: ArtifactArgs,

    /// Query file: one query per line, optional tab-separated gold user
    /// ids after the text
    #[arg(long, value_name = "FILE")]
    queries: PathBuf,

    /// Emit JSON instead of the text summary
    #[arg(long)]
    json: bool,

    /// Write the report here instead of stdout [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Also write per-rank mean precision as CSV [default: not written]
    #[arg(long, value_name = "FILE")]
    plot_data: Option<PathBuf>,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    artifacts: ArtifactArgs,

    /// The question to find experts for
    #[arg(long, value_name = "TEXT")]
    query: String,

    /// The user whose ranking to explain
    #[arg(long, value_name = "ID")]
    user: u64,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

/// Map errors to the documented exit codes.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => 2,
        Error::Parse { .. } | Error::Config(_) => 3,
        Error::Integrity(_) => 4,
        Error::InvalidArgument(_) | Error::EmptyQuery | Error::NotFound(_) => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "--threads must be at least 1".to_string(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool setup failed: {e}")))?;
    }
    let config = effective_config(&cli)?;
    match cli.command {
        Command::Ingest(args) => cmd_ingest(args, &config),
        Command::Index(args) => cmd_index(args, &config),
        Command::Graph(args) => cmd_graph(args, &config),
        Command::Recommend(args) => cmd_recommend(args, &config),
        Command::Evaluate(args) => cmd_evaluate(args, &config),
        Command::Explain(args) => cmd_explain(args, &config),
    }
}

/// Resolve the effective config: defaults, then the config file (--config
/// or $EXREC_CONFIG), then --set overrides, then the --seed flag.
fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    let file = cli
        .config
        .clone()
        .or_else(|| std::env::var_os("EXREC_CONFIG").map(PathBuf::from));
    if let Some(path) = file {
        config.apply_file(&path)?;
    }
    for pair in &cli.set {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            Error::Config(format!("override {pair:?} is not of the form key=value"))
        })?;
        config.apply_kv(key.trim(), value.trim())?;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

/// Accept RFC 3339 or a bare date. A bare date used as an upper bound
/// means the end of that day.
fn parse_date(raw: &str, end_of_day: bool) -> Result<DateTime<Utc>> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Ok(dt.with_timezone(&Utc));
    }
    if let Ok(date) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        let time = if end_of_day {
            date.and_hms_opt(23, 59, 59).expect("constant time is valid")
        } else {
            date.and_hms_opt(0, 0, 0).expect("constant time is valid")
        };
        return Ok(time.and_utc());
    }
    Err(Error::InvalidArgument(format!(
        "date {raw:?} is neither RFC 3339 nor YYYY-MM-DD"
    )))
}

/// Write the effective config and input descriptors next to an artifact.
fn write_run_snapshot(
    dir: &Path,
    config: &RunConfig,
    command: &str,
    inputs: serde_json::Value,
) -> Result<()> {
    let snapshot = serde_json::json!({
        "command": command,
        "config": config,
        "inputs": inputs,
    });
    let text = serde_json::to_string_pretty(&snapshot)
        .map_err(|e| Error::Integrity(format!("run snapshot serialization failed: {e}")))?;
    let path = dir.join(RUN_SNAPSHOT_FILE);
    fs::write(&path, format!("{text}\n")).map_err(|e| Error::io(&path, e))
}

fn cmd_ingest(args: IngestArgs, config: &RunConfig) -> Result<()> {
    let windowed = args.from.is_some() || args.to.is_some();
    let summary = if windowed {
        let (store, full) = ingest_to_memory(&args.posts, args.users.as_deref())?;
        let from = match &args.from {
            Some(raw) => parse_date(raw, false)?,
            None => DateTime::<Utc>::MIN_UTC,
        };
        let to = match &args.to {
            Some(raw) => parse_date(raw, true)?,
            None => DateTime::<Utc>::MAX_UTC,
        };
        let view = date_filter(&store, from, to)?;
        let (questions, answers) = view.type_counts();
        let summary = IngestSummary {
            questions,
            answers,
            users: view.user_count() as u64,
            orphans: view.orphan_count(),
            skipped: full.skipped,
        };
        save_store(&view, &summary, &args.out)?;
        summary
    } else {
        ingest_dump(&args.posts, args.users.as_deref(), &args.out)?
    };
    write_run_snapshot(
        &args.out,
        config,
        "ingest",
        serde_json::json!({
            "posts": args.posts.display().to_string(),
            "users": args.users.as_ref().map(|p| p.display().to_string()),
            "from": args.from,
            "to": args.to,
        }),
    )?;
    println!("questions: {}", summary.questions);
    println!("answers: {}", summary.answers);
    println!("users: {}", summary.users);
    println!("orphan answers: {}", summary.orphans);
    println!("skipped rows: {}", summary.skipped);
    println!("store written to {}", args.out.display());
    Ok(())
}

fn cmd_index(args: IndexArgs, config: &RunConfig) -> Result<()> {
    let (store, store_manifest) = load_store(&args.store)?;
    let index: RelevanceIndexF64 = build_index(&store, &config.index_params())?;
    save_index(&index, &store_manifest, &args.out)?;
    write_run_snapshot(
        &args.out,
        config,
        "index",
        serde_json::json!({
            "store": args.store.display().to_string(),
            "corpus_posts_sha256": store_manifest.posts_sha256,
            "corpus_users_sha256": store_manifest.users_sha256,
        }),
    )?;
    println!("documents: {}", index.tfidf.doc_count());
    println!("vocabulary: {}", index.tfidf.vocabulary_size());
    println!("profiles: {}", index.profiles.len());
    println!("index written to {}", args.out.display());
    Ok(())
}

fn cmd_graph(args: GraphArgs, config: &RunConfig) -> Result<()> {
    let (store, store_manifest) = load_store(&args.store)?;
    let (graph, report) = build_graph(&store);
    let params = config.rank_params();
    let rank: ExpertiseRankF64 = expertise_rank(&graph, &params)?;
    save_prestige(&graph, &rank, &report, &params, &store_manifest, &args.out)?;
    write_run_snapshot(
        &args.out,
        config,
        "graph",
        serde_json::json!({
            "store": args.store.display().to_string(),
            "corpus_posts_sha256": store_manifest.posts_sha256,
            "corpus_users_sha256": store_manifest.users_sha256,
        }),
    )?;
    println!("nodes: {}", report.node_count);
    println!("edges: {}", report.edge_count);
    println!("total weight: {}", report.total_weight);
    println!("self answers skipped: {}", report.self_answers_skipped);
    println!("answers without both owners: {}", report.missing_owner_skipped);
    println!(
        "iterations: {}{}",
        rank.iterations,
        if rank.converged { "" } else { " (not converged)" }
    );
    if !rank.converged {
        eprintln!(
            "warning: residual {} after {} sweeps did not reach tolerance {}",
            rank.residual, rank.iterations, params.tolerance
        );
    }
    println!("graph written to {}", args.out.display());
    Ok(())
}

/// Everything a ranking command works from, loaded and cross-checked.
struct Artifacts {
    store: CorpusStore,
    index: RelevanceIndexF64,
    prestige: ExpertiseRankF64,
}

/// Load the store, index, and prestige scores, verifying that index and
/// graph were built from exactly this store.
fn load_artifacts(args: &ArtifactArgs) -> Result<(Artifacts, ArtifactRefs)> {
    let (store, store_manifest) = load_store(&args.store)?;
    let (index, index_manifest) = load_index::<f64>(&args.index)?;
    verify_index_matches_store(&index_manifest, &store_manifest)?;
    let (prestige, graph_manifest) = load_prestige::<f64>(&args.graph)?;
    verify_graph_matches_store(&graph_manifest, &store_manifest)?;
    let refs = ArtifactRefs {
        corpus_posts_sha256: store_manifest.posts_sha256.clone(),
        corpus_users_sha256: store_manifest.users_sha256.clone(),
        index_sha256: index_manifest.index_sha256.clone(),
    };
    Ok((
        Artifacts {
            store,
            index,
            prestige,
        },
        refs,
    ))
}

/// Print to stdout, or write to a file when --out was given.
fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Error::io(path, e))?;
            println!("report written to {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_recommend(args: RecommendArgs, config: &RunConfig) -> Result<()> {
    let (arts, refs) = load_artifacts(&args.artifacts)?;
    let queries: Vec<String> = match (&args.query, &args.queries) {
        (Some(text), None) => vec![text.clone()],
        (None, Some(path)) => parse_queries_file(path)?
            .into_iter()
            .map(|spec| spec.text)
            .collect(),
        _ => unreachable!("clap enforces exactly one query source"),
    };
    if queries.is_empty() {
        return Err(Error::InvalidArgument(
            "query file contains no queries".to_string(),
        ));
    }
    let mut lists: Vec<RankedExpertListF64> = Vec::new();
    for query in &queries {
        let mut list = recommend(query, &arts.index, &arts.store, &arts.prestige, config)?;
        list.provenance = Some(refs.clone());
        if let Some(top) = args.top {
            list.entries.truncate(top);
        }
        lists.push(list);
    }
    let output = if args.json {
        if lists.len() == 1 {
            lists[0].to_json()?
        } else {
            let text = serde_json::to_string_pretty(&lists)
                .map_err(|e| Error::Integrity(format!("report serialization failed: {e}")))?;
            format!("{text}\n")
        }
    } else {
        lists
            .iter()
            .map(|l| l.render_table())
            .collect::<Vec<_>>()
            .join("\n")
    };
    emit(&output, args.out.as_deref())
}

fn cmd_evaluate(args: EvaluateArgs, config: &RunConfig) -> Result<()> {
    let (arts, refs) = load_artifacts(&args.artifacts)?;
    let queries = parse_queries_file(&args.queries)?;
    let mut report = evaluate(&queries, &arts.index, &arts.store, &arts.prestige, config)?;
    report.provenance = Some(refs);
    if let Some(plot) = &args.plot_data {
        report.write_plot_csv(plot, config.k_users)?;
    }
    let output = if args.json {
        report.to_json()?
    } else {
        report.render_text()
    };
    emit(&output, args.out.as_deref())
}

fn cmd_explain(args: ExplainArgs, config: &RunConfig) -> Result<()> {
    let (arts, _) = load_artifacts(&args.artifacts)?;
    let list = recommend(&args.query, &arts.index, &arts.store, &arts.prestige, config)?;
    let text = explain(&list, args.user)?;
    print!("{text}");
    if !text.ends_with('\n') {
        println!();
    }
    Ok(())
}
