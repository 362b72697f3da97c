//! The interaction graph and its prestige scores, the second stage of
//! the cascade.
//!
//! Every question-answer pair contributes a directed edge from the asker
//! to the answerer: asking transfers a little authority to whoever
//! answered. A user's expertise score is the damped stationary recurrence
//!
//! ```text
//! score(a) = (1 - d) + d · Σ over askers u of a:  score(u) / C(u)
//! ```
//!
//! where C(u) counts u's distinct answerers. The sum runs over distinct
//! askers, so by default answering one person three times pays no more
//! than answering them once; a weighted variant that honours edge
//! multiplicity is available behind a flag. Scores are computed by
//! synchronous fixed-point sweeps from an all-ones start. There is no
//! jump/teleport redistribution from sink nodes: a user who never asks
//! keeps their whole contribution out of circulation, and a user nobody
//! interacts with sits at exactly 1 - d.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStore, StoreManifest};
use crate::error::{Error, Result};
use crate::manifest::{check_hash, sha256_hex, SCHEMA_VERSION};
use crate::num::{real, Real};

/// Directed asker → answerer multigraph, stored as weighted adjacency.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaGraph {
    /// asker → answerer → number of question-answer interactions.
    edges: BTreeMap<u64, BTreeMap<u64, u64>>,
    /// Every participating user, including isolated ones.
    nodes: BTreeSet<u64>,
}

impl QaGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a user with no interactions (yet).
    pub fn add_node(&mut self, user: u64) {
        self.nodes.insert(user);
    }

    /// Record `weight` interactions where `asker`'s question was answered
    /// by `answerer`. Self-answers carry no prestige and are refused;
    /// the return value says whether the edge was accepted.
    pub fn add_edge(&mut self, asker: u64, answerer: u64, weight: u64) -> bool {
        if asker == answerer || weight == 0 {
            return false;
        }
        self.nodes.insert(asker);
        self.nodes.insert(answerer);
        *self
            .edges
            .entry(asker)
            .or_default()
            .entry(answerer)
            .or_insert(0) += weight;
        true
    }

    pub fn nodes(&self) -> impl Iterator<Item = u64> + '_ {
        self.nodes.iter().copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of distinct (asker, answerer) pairs.
    pub fn edge_count(&self) -> usize {
        self.edges.values().map(BTreeMap::len).sum()
    }

    /// Sum of all edge multiplicities.
    pub fn total_weight(&self) -> u64 {
        self.edges
            .values()
            .flat_map(BTreeMap::values)
            .sum()
    }

    pub fn edge_weight(&self, asker: u64, answerer: u64) -> u64 {
        self.edges
            .get(&asker)
            .and_then(|outs| outs.get(&answerer))
            .copied()
            .unwrap_or(0)
    }

    /// Distinct users who answered `asker`'s questions: the C(u) that
    /// divides the asker's contribution.
    pub fn distinct_answerer_count(&self, asker: u64) -> usize {
        self.edges.get(&asker).map_or(0, BTreeMap::len)
    }

    pub fn out_edges(&self, asker: u64) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.edges
            .get(&asker)
            .into_iter()
            .flat_map(|outs| outs.iter().map(|(&a, &w)| (a, w)))
    }
}

/// What went into a graph built from a corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphBuildReport {
    pub node_count: usize,
    pub edge_count: usize,
    pub total_weight: u64,
    /// Question-answer pairs where asker and answerer are the same user.
    pub self_answers_skipped: u64,
    /// Question-answer pairs with an ownerless side.
    pub missing_owner_skipped: u64,
}

/// Build the asker → answerer graph for a corpus. Every post owner
/// becomes a node, so users whose interactions were all skipped still
/// appear (isolated, at the floor score). Orphan answers join no pair.
pub fn build_graph(store: &CorpusStore) -> (QaGraph, GraphBuildReport) {
    let mut graph = QaGraph::new();
    let mut report = GraphBuildReport::default();
    for post in store.posts() {
        if let Some(owner) = post.owner_user_id {
            graph.add_node(owner);
        }
    }
    for question_id in store.answered_questions() {
        let asker = store
            .get_post(question_id)
            .and_then(|q| q.owner_user_id);
        for &answer_id in store.answers_of(question_id) {
            let answerer = store
                .get_post(answer_id)
                .and_then(|a| a.owner_user_id);
            match (asker, answerer) {
                (Some(u), Some(a)) if u == a => report.self_answers_skipped += 1,
                (Some(u), Some(a)) => {
                    graph.add_edge(u, a, 1);
                }
                _ => report.missing_owner_skipped += 1,
            }
        }
    }
    report.node_count = graph.node_count();
    report.edge_count = graph.edge_count();
    report.total_weight = graph.total_weight();
    (graph, report)
}

/// Fixed-point iteration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankParams {
    /// Damping factor d, strictly between 0 and 1.
    pub damping: f64,
    /// Stop when the largest per-node change of one sweep is at or below
    /// this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Divide contributions by total out-weight instead of by the count
    /// of distinct answerers.
    pub weighted: bool,
}

impl Default for RankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tolerance: 1e-8,
            max_iterations: 100,
            weighted: false,
        }
    }
}

/// Converged (or honestly not) prestige scores for every graph node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertiseRank<F> {
    pub scores: BTreeMap<u64, F>,
    pub iterations: usize,
    pub converged: bool,
    /// Largest per-node change in the final sweep.
    pub residual: F,
    pub damping: f64,
    pub weighted: bool,
}

impl<F: Real> ExpertiseRank<F> {
    /// The score of a node nobody interacts with.
    pub fn floor(&self) -> F {
        real::<F>(1.0) - real::<F>(self.damping)
    }

    pub fn score(&self, user: u64) -> Option<F> {
        self.scores.get(&user).copied()
    }

    /// Project scores onto a candidate list. Users absent from the graph
    /// never received or paid out prestige, so they sit at the floor.
    pub fn candidate_scores(&self, candidates: &[u64]) -> BTreeMap<u64, F> {
        candidates
            .iter()
            .map(|&user| (user, self.score(user).unwrap_or_else(|| self.floor())))
            .collect()
    }
}

/// Run synchronous sweeps of the prestige recurrence until the largest
/// per-node change drops to the tolerance, starting from all ones.
pub fn expertise_rank<F: Real>(graph: &QaGraph, params: &RankParams) -> Result<ExpertiseRank<F>> {
    use rayon::prelude::*;

    if !(params.damping > 0.0 && params.damping < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "damping factor {} is outside the open interval (0, 1)",
            params.damping
        )));
    }
    if !(params.tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {} must be positive",
            params.tolerance
        )));
    }
    if params.max_iterations == 0 {
        return Err(Error::InvalidArgument(
            "at least one iteration is required".to_string(),
        ));
    }

    let nodes: Vec<u64> = graph.nodes().collect();
    if nodes.is_empty() {
        return Ok(ExpertiseRank {
            scores: BTreeMap::new(),
            iterations: 0,
            converged: true,
            residual: F::zero(),
            damping: params.damping,
            weighted: params.weighted,
        });
    }
    let index: BTreeMap<u64, usize> = nodes.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    // Incoming edges per node as (asker position, share fraction); askers
    // arrive in ascending id order, which fixes the summation order.
    let mut in_edges: Vec<Vec<(usize, F)>> = vec![Vec::new(); nodes.len()];
    for &asker in &nodes {
        let c = graph.distinct_answerer_count(asker);
        if c == 0 {
            continue;
        }
        let total: u64 = graph.out_edges(asker).map(|(_, w)| w).sum();
        for (answerer, weight) in graph.out_edges(asker) {
            let fraction = if params.weighted {
                real::<F>(weight as f64 / total as f64)
            } else {
                real::<F>(1.0 / c as f64)
            };
            in_edges[index[&answerer]].push((index[&asker], fraction));
        }
    }

    let d = real::<F>(params.damping);
    let base = F::one() - d;
    let mut scores = vec![F::one(); nodes.len()];
    let mut iterations = 0;
    let mut residual = F::zero();
    let mut converged = false;
    while iterations < params.max_iterations {
        let next: Vec<F> = in_edges
            .par_iter()
            .zip(&scores)
            .map(|(incoming, _)| {
                let inflow = incoming
                    .iter()
                    .fold(F::zero(), |acc, &(u, fraction)| acc + scores[u] * fraction);
                base + d * inflow
            })
            .collect();
        residual = next
            .par_iter()
            .zip(&scores)
            .map(|(&a, &b)| (a - b).abs())
            .reduce(F::zero, F::max);
        scores = next;
        iterations += 1;
        if residual <= real(params.tolerance) {
            converged = true;
            break;
        }
    }

    Ok(ExpertiseRank {
        scores: nodes.into_iter().zip(scores).collect(),
        iterations,
        converged,
        residual,
        damping: params.damping,
        weighted: params.weighted,
    })
}

/// Write one `asker answerer weight` line per edge, askers ascending.
/// Isolated nodes carry no edges and so do not appear.
pub fn write_edges(graph: &QaGraph, path: &Path) -> Result<()> {
    let mut out = String::new();
    for asker in graph.nodes() {
        for (answerer, weight) in graph.out_edges(asker) {
            writeln!(out, "{asker} {answerer} {weight}").expect("string write cannot fail");
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a graph written by [`write_edges`].
pub fn read_edges(path: &Path) -> Result<QaGraph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut graph = QaGraph::new();
    let mut offset = 0u64;
    for line in text.lines() {
        let line_start = offset;
        offset += line.len() as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |what: &str, field: &str| -> Result<u64> {
            field.parse::<u64>().map_err(|_| {
                Error::parse(path, line_start, format!("invalid {what} {field:?}"))
            })
        };
        let [asker, answerer, weight] = fields.as_slice() else {
            return Err(Error::parse(
                path,
                line_start,
                format!("expected `asker answerer weight`, got {line:?}"),
            ));
        };
        let asker = parse("asker id", asker)?;
        let answerer = parse("answerer id", answerer)?;
        let weight = parse("edge weight", weight)?;
        if !graph.add_edge(asker, answerer, weight) {
            return Err(Error::parse(
                path,
                line_start,
                format!("edge {asker} -> {answerer} (weight {weight}) is not a valid interaction"),
            ));
        }
    }
    Ok(graph)
}

/// Write one `user_id score` line per node, ids ascending.
pub fn write_scores<F: Real>(rank: &ExpertiseRank<F>, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (user, score) in &rank.scores {
        writeln!(out, "{user} {score}").expect("string write cannot fail");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub const GRAPH_MANIFEST_FILE: &str = "manifest.json";
pub const EDGES_FILE: &str = "edges.txt";
pub const SCORES_FILE: &str = "scores.txt";
pub const PRESTIGE_FILE: &str = "prestige.json";

const KIND: &str = "graph";

/// Manifest of a persisted graph artifact. The corpus hashes bind the
/// graph to the exact store it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphManifest {
    pub schema_version: u32,
    pub kind: String,
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub weighted: bool,
    pub corpus_posts_sha256: String,
    pub corpus_users_sha256: String,
    pub report: GraphBuildReport,
    pub edges_file: String,
    pub scores_file: String,
    pub prestige_file: String,
    pub prestige_sha256: String,
}

/// Write the graph, its prestige scores, and a binding manifest into
/// directory `out`. The edge and score text files are for inspection;
/// [`load_prestige`] reads back the JSON artifact.
pub fn save_prestige<F: Real + Serialize>(
    graph: &QaGraph,
    rank: &ExpertiseRank<F>,
    report: &GraphBuildReport,
    params: &RankParams,
    store_manifest: &StoreManifest,
    out: &Path,
) -> Result<()> {
    if rank.damping != params.damping || rank.weighted != params.weighted {
        return Err(Error::Integrity(format!(
            "prestige scores carry damping {} (weighted: {}) but the stated parameters \
             are damping {} (weighted: {})",
            rank.damping, rank.weighted, params.damping, params.weighted
        )));
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let prestige_bytes = serde_json::to_vec(rank)
        .map_err(|e| Error::Integrity(format!("prestige serialization failed: {e}")))?;
    let manifest = GraphManifest {
        schema_version: SCHEMA_VERSION,
        kind: KIND.to_string(),
        damping: params.damping,
        tolerance: params.tolerance,
        max_iterations: params.max_iterations,
        weighted: params.weighted,
        corpus_posts_sha256: store_manifest.posts_sha256.clone(),
        corpus_users_sha256: store_manifest.users_sha256.clone(),
        report: *report,
        edges_file: EDGES_FILE.to_string(),
        scores_file: SCORES_FILE.to_string(),
        prestige_file: PRESTIGE_FILE.to_string(),
        prestige_sha256: sha256_hex(&prestige_bytes),
    };
    write_edges(graph, &out.join(EDGES_FILE))?;
    write_scores(rank, &out.join(SCORES_FILE))?;
    let prestige_path = out.join(PRESTIGE_FILE);
    fs::write(&prestige_path, &prestige_bytes).map_err(|e| Error::io(&prestige_path, e))?;
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Integrity(format!("manifest serialization failed: {e}")))?;
    let manifest_path = out.join(GRAPH_MANIFEST_FILE);
    fs::write(&manifest_path, format!("{manifest_json}\n"))
        .map_err(|e| Error::io(&manifest_path, e))
}

/// Load prestige scores saved by [`save_prestige`], verifying the
/// content hash and the recorded parameters.
pub fn load_prestige<F: Real + serde::de::DeserializeOwned>(
    dir: &Path,
) -> Result<(ExpertiseRank<F>, GraphManifest)> {
    let manifest_path = dir.join(GRAPH_MANIFEST_FILE);
    let manifest_text =
        fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: GraphManifest = serde_json::from_str(&manifest_text)
        .map_err(|e| Error::parse(&manifest_path, e.column() as u64, e.to_string()))?;
    if manifest.schema_version != SCHEMA_VERSION {
        return Err(Error::Integrity(format!(
            "graph schema version {} is not the supported {}",
            manifest.schema_version, SCHEMA_VERSION
        )));
    }
    if manifest.kind != KIND {
        return Err(Error::Integrity(format!(
            "artifact at {} is a {:?}, not a graph",
            dir.display(),
            manifest.kind
        )));
    }
    let prestige_path = dir.join(&manifest.prestige_file);
    let prestige_bytes = fs::read(&prestige_path).map_err(|e| Error::io(&prestige_path, e))?;
    check_hash(
        &manifest.prestige_sha256,
        &sha256_hex(&prestige_bytes),
        "prestige file",
    )?;
    let rank: ExpertiseRank<F> = serde_json::from_slice(&prestige_bytes)
        .map_err(|e| Error::parse(&prestige_path, e.column() as u64, e.to_string()))?;
    if rank.damping != manifest.damping || rank.weighted != manifest.weighted {
        return Err(Error::Integrity(format!(
            "prestige file states damping {} (weighted: {}) but the manifest states \
             damping {} (weighted: {})",
            rank.damping, rank.weighted, manifest.damping, manifest.weighted
        )));
    }
    Ok((rank, manifest))
}

/// Check that a graph artifact was built from exactly the given persisted
/// store.
pub fn verify_graph_matches_store(
    graph_manifest: &GraphManifest,
    store_manifest: &StoreManifest,
) -> Result<()> {
    check_hash(
        &graph_manifest.corpus_posts_sha256,
        &store_manifest.posts_sha256,
        "corpus posts file",
    )?;
    check_hash(
        &graph_manifest.corpus_users_sha256,
        &store_manifest.users_sha256,
        "corpus users file",
    )
}
