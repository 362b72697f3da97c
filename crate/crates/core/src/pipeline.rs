//! End-to-end recommendation: cascade the three stages and fuse their
//! scores into one ranked expert list.
//!
//! The relevance stage proposes and orders candidates; the prestige and
//! reputation stages then re-rank that short list. Prestige scores are
//! min-max normalized across the candidates and combined with
//! significance as
//!
//! ```text
//! fused = alpha · prestige_normalized + (1 - alpha) · significance
//! ```
//!
//! so `alpha = 1` ranks purely by interaction prestige and `alpha = 0`
//! purely by answering record. The final list keeps every intermediate
//! quantity per candidate, which is what makes a rank explainable: the
//! movement between the first-stage rank and the final rank is visible
//! in the entry itself.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::corpus::CorpusStore;
use crate::error::{Error, Result};
use crate::graph::ExpertiseRank;
use crate::num::{min_max_normalize, real, Real};
use crate::relevance::{match_experts, RelevanceIndex};
use crate::reputation::{compute_features_for, significance, ReputationFeatures};

/// One fully-scored expert in the final ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedExpert<F> {
    pub user_id: u64,
    pub display_name: Option<String>,
    /// 1-based position in the final fused ranking.
    pub final_rank: usize,
    /// 1-based position the relevance stage assigned.
    pub phase1_rank: usize,
    pub relevance_score: F,
    pub test_precision: F,
    /// Raw prestige score from the interaction graph.
    pub prestige: F,
    /// Prestige min-max normalized across this candidate set.
    pub prestige_normalized: F,
    pub significance: F,
    pub fused_score: F,
    pub features: ReputationFeatures,
}

/// Hashes tying a report to the exact artifacts that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRefs {
    pub corpus_posts_sha256: String,
    pub corpus_users_sha256: String,
    pub index_sha256: String,
}

/// The final ranking for one query, with everything needed to reproduce
/// and explain it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedExpertList<F> {
    pub query: String,
    /// Cleaned query tokens, in order.
    pub query_terms: Vec<String>,
    pub config: RunConfig,
    /// Input hashes; absent when ranking in-memory data.
    pub provenance: Option<ArtifactRefs>,
    pub entries: Vec<RankedExpert<F>>,
}

/// Run the full cascade for one query.
///
/// The prestige scores must have been computed under the same graph
/// settings the config states, and the index under the same seed; the
/// mismatches are integrity errors, not silent re-interpretations.
pub fn recommend<F: Real>(
    query: &str,
    index: &RelevanceIndex<F>,
    store: &CorpusStore,
    prestige: &ExpertiseRank<F>,
    config: &RunConfig,
) -> Result<RankedExpertList<F>> {
    if !(0.0..=1.0).contains(&config.alpha) {
        return Err(Error::InvalidArgument(format!(
            "fusion weight alpha {} is outside [0, 1]",
            config.alpha
        )));
    }
    if prestige.damping != config.damping || prestige.weighted != config.weighted_graph {
        return Err(Error::Integrity(format!(
            "prestige scores were computed with damping {} (weighted: {}) but the run \
             config states damping {} (weighted: {})",
            prestige.damping, prestige.weighted, config.damping, config.weighted_graph
        )));
    }
    if index.tfidf.variant() != config.idf_variant || index.test_fraction != config.test_fraction {
        return Err(Error::Integrity(format!(
            "index was built with idf variant {:?} and test fraction {} but the run config \
             states {:?} and {}",
            index.tfidf.variant(),
            index.test_fraction,
            config.idf_variant,
            config.test_fraction
        )));
    }

    let candidates = match_experts(query, index, store, &config.match_params())?;
    let query_terms = crate::text::clean_text(query);
    if candidates.is_empty() {
        return Ok(RankedExpertList {
            query: query.to_string(),
            query_terms,
            config: *config,
            provenance: None,
            entries: Vec::new(),
        });
    }

    let ids: Vec<u64> = candidates.iter().map(|c| c.user_id).collect();
    let prestige_by_user = prestige.candidate_scores(&ids);
    let raw_prestige: Vec<F> = ids.iter().map(|id| prestige_by_user[id]).collect();
    let normalized_prestige = min_max_normalize(&raw_prestige);
    let features = compute_features_for(store, &ids, &config.reputation_config())?;
    let significance_scores = significance::<F>(&features)?;

    let alpha = real::<F>(config.alpha);
    let beta = F::one() - alpha;
    let mut entries: Vec<RankedExpert<F>> = candidates
        .iter()
        .enumerate()
        .map(|(i, candidate)| {
            let sig = significance_scores[i].1;
            RankedExpert {
                user_id: candidate.user_id,
                display_name: store
                    .get_user(candidate.user_id)
                    .map(|u| u.display_name.clone()),
                final_rank: 0,
                phase1_rank: candidate.phase1_rank,
                relevance_score: candidate.relevance_score,
                test_precision: candidate.test_precision,
                prestige: raw_prestige[i],
                prestige_normalized: normalized_prestige[i],
                significance: sig,
                fused_score: alpha * normalized_prestige[i] + beta * sig,
            features: features[i],
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        b.fused_score
            .partial_cmp(&a.fused_score)
            .expect("fused scores are finite")
            .then_with(|| {
                b.relevance_score
                    .partial_cmp(&a.relevance_score)
                    .expect("cosine scores are finite")
            })
            .then_with(|| a.user_id.cmp(&b.user_id))
    });
    for (i, entry) in entries.iter_mut().enumerate() {
        entry.final_rank = i + 1;
    }

    Ok(RankedExpertList {
        query: query.to_string(),
        query_terms,
        config: *config,
        provenance: None,
        entries,
    })
}

impl<F: Real + Serialize> RankedExpertList<F> {
    /// Pretty JSON with a trailing newline; byte-identical for equal
    /// inputs and config.
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map(|s| format!("{s}\n"))
            .map_err(|e| Error::Integrity(format!("report serialization failed: {e}")))
    }
}

impl<F: Real> RankedExpertList<F> {
    pub fn entry(&self, user_id: u64) -> Option<&RankedExpert<F>> {
        self.entries.iter().find(|e| e.user_id == user_id)
    }

    /// Fixed-width text table with the effective settings up front.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("query: {}\n", self.query));
        out.push_str(&format!("terms: {}\n", self.query_terms.join(" ")));
        let c = &self.config;
        out.push_str(&format!(
            "config: seed={} alpha={} damping={} k_posts={} k_users={} test_fraction={} \
             accept_threshold={} idf={:?} weighted_graph={} use_accepted_flag={}\n",
            c.seed,
            c.alpha,
            c.damping,
            c.k_posts,
            c.k_users,
            c.test_fraction,
            c.accept_threshold,
            c.idf_variant,
            c.weighted_graph,
            c.use_accepted_flag,
        ));
        if let Some(refs) = &self.provenance {
            out.push_str(&format!(
                "inputs: posts={} users={} index={}\n",
                refs.corpus_posts_sha256, refs.corpus_users_sha256, refs.index_sha256
            ));
        }
        out.push_str(&format!(
            "{:>4}  {:>10}  {:>9}  {:>9}  {:>9}  {:>9}  {:>9}  {:>9}  {:>6}  name\n",
            "rank", "user", "fused", "relevance", "testprec", "prestige", "presnorm", "signif", "phase1"
        ));
        for e in &self.entries {
            out.push_str(&format!(
                "{:>4}  {:>10}  {:>9.6}  {:>9.6}  {:>9.6}  {:>9.6}  {:>9.6}  {:>9.6}  {:>6}  {}\n",
                e.final_rank,
                e.user_id,
                e.fused_score,
                e.relevance_score,
                e.test_precision,
                e.prestige,
                e.prestige_normalized,
                e.significance,
                e.phase1_rank,
                e.display_name.as_deref().unwrap_or("-"),
            ));
        }
        if self.entries.is_empty() {
            out.push_str("(no candidates)\n");
        }
        out
    }
}

/// Explain one user's final position: where they entered, where they
/// ended, and each score that moved them.
pub fn explain<F: Real>(list: &RankedExpertList<F>, user_id: u64) -> Result<String> {
    let entry = list.entry(user_id).ok_or_else(|| {
        Error::NotFound(format!(
            "user {user_id} is not among the {} ranked candidates for this query",
            list.entries.len()
        ))
    })?;
    let movement = match entry.final_rank.cmp(&entry.phase1_rank) {
        std::cmp::Ordering::Less => format!(
            "moved up from relevance rank {} to final rank {}",
            entry.phase1_rank, entry.final_rank
        ),
        std::cmp::Ordering::Greater => format!(
            "moved down from relevance rank {} to final rank {}",
            entry.phase1_rank, entry.final_rank
        ),
        std::cmp::Ordering::Equal => format!(
            "held rank {} through both stages",
            entry.final_rank
        ),
    };
    let f = &entry.features;
    Ok(format!(
        "user {} ({}) {}\n\
         query relevance: cosine {:.6} against their train profile, held-out term \
         coverage {:.6}\n\
         interaction prestige: {:.6} raw, {:.6} normalized across {} candidates\n\
         answering record: {} answers, {} accepted (ratio {:.3}), avg score {:.2}, \
         avg views {:.2}, avg favorites {:.2} -> significance {:.6}\n\
         fused: {} x {:.6} + {} x {:.6} = {:.6}\n",
        entry.user_id,
        entry.display_name.as_deref().unwrap_or("no name on record"),
        movement,
        entry.relevance_score,
        entry.test_precision,
        entry.prestige,
        entry.prestige_normalized,
        list.entries.len(),
        f.answer_count,
        f.accepted_count,
        f.acceptance_ratio,
        f.avg_score,
        f.avg_views,
        f.avg_favorites,
        entry.significance,
        list.config.alpha,
        entry.prestige_normalized,
        1.0 - list.config.alpha,
        entry.significance,
        entry.fused_score,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Post, PostType};
    use crate::graph::{build_graph, expertise_rank};
    use crate::relevance::build_index;
    use chrono::{TimeZone, Utc};

    fn question(id: u64, owner: u64, body: &str) -> Post {
        Post {
            post_id: id,
            post_type: PostType::Question,
            owner_user_id: Some(owner),
            parent_id: None,
            accepted_answer_id: None,
            creation_date: Utc.with_ymd_and_hms(2009, 3, 1, 10, 0, 0).unwrap(),
            score: 1,
            view_count: 50,
            favorite_count: 1,
            body_raw: body.to_string(),
        }
    }

    fn answer(id: u64, owner: u64, parent: u64, score: i64, body: &str) -> Post {
        Post {
            post_id: id,
            post_type: PostType::Answer,
            owner_user_id: Some(owner),
            parent_id: Some(parent),
            accepted_answer_id: None,
            creation_date: Utc.with_ymd_and_hms(2009, 3, 1, 11, 0, 0).unwrap(),
            score,
            view_count: 0,
            favorite_count: 0,
            body_raw: body.to_string(),
        }
    }

    /// Two kernel-topic candidates built to disagree across stages.
    ///
    /// User 30 wins the relevance stage: their answers are exactly the
    /// query vocabulary. User 40 writes on-topic answers diluted with
    /// extra terms, but answers questions from five distinct askers at
    /// high scores, so prestige and reputation both prefer 40.
    fn inversion_store() -> CorpusStore {
        let mut store = CorpusStore::new();
        let topic = "kernel scheduler interrupt";
        store.insert_post(question(1, 10, "kernel question")).unwrap();
        for (i, asker) in [11, 12, 13, 14, 15].iter().enumerate() {
            store
                .insert_post(question(2 + i as u64, *asker, "another kernel question"))
                .unwrap();
        }
        // User 30: two answers, exactly the topic text, unloved scores.
        store.insert_post(answer(20, 30, 1, 0, topic)).unwrap();
        store.insert_post(answer(21, 30, 1, 0, topic)).unwrap();
        // User 40: five answers across five askers, topic text diluted
        // with machinery vocabulary, score 30 each.
        for i in 0..5u64 {
            store
                .insert_post(answer(
                    30 + i,
                    40,
                    2 + i,
                    30,
                    "kernel scheduler interrupt pipeline cache register bus latency",
                ))
                .unwrap();
        }
        store.finalize();
        store
    }

    struct Fixture {
        store: CorpusStore,
        index: RelevanceIndex<f64>,
        prestige: ExpertiseRank<f64>,
        config: RunConfig,
    }

    fn fixture(config: RunConfig) -> Fixture {
        let store = inversion_store();
        let index = build_index(&store, &config.index_params()).unwrap();
        let (graph, _) = build_graph(&store);
        let prestige = expertise_rank(&graph, &config.rank_params()).unwrap();
        Fixture {
            store,
            index,
            prestige,
            config,
        }
    }

    fn run(f: &Fixture, query: &str) -> RankedExpertList<f64> {
        recommend(query, &f.index, &f.store, &f.prestige, &f.config).unwrap()
    }

    #[test]
    fn later_stages_override_the_relevance_order() {
        let f = fixture(RunConfig::default());
        let list = run(&f, "kernel scheduler interrupt");
        let leader = &list.entries[0];
        let runner_up = &list.entries[1];
        // User 30 entered first on pure relevance but the fused ranking
        // prefers user 40's prestige and record.
        assert_eq!(leader.user_id, 40);
        assert_eq!(runner_up.user_id, 30);
        assert_eq!(runner_up.phase1_rank, 1);
        assert!(leader.phase1_rank > 1);
        assert!(runner_up.relevance_score > leader.relevance_score);
        assert!(leader.prestige > runner_up.prestige);
        assert!(leader.significance > runner_up.significance);
    }

    #[test]
    fn dominant_candidate_wins_for_every_alpha() {
        for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let config = RunConfig {
                alpha,
                ..RunConfig::default()
            };
            let f = fixture(config);
            let list = run(&f, "kernel scheduler interrupt");
            // User 40 leads both prestige and significance, so no mix
            // of the two can dethrone them.
            assert_eq!(list.entries[0].user_id, 40, "alpha {alpha}");
        }
    }

    #[test]
    fn alpha_one_ranks_by_prestige_and_alpha_zero_by_significance() {
        let prestige_only = fixture(RunConfig {
            alpha: 1.0,
            ..RunConfig::default()
        });
        let list = run(&prestige_only, "kernel scheduler interrupt");
        for pair in list.entries.windows(2) {
            assert!(pair[0].prestige_normalized >= pair[1].prestige_normalized);
            assert_eq!(pair[0].fused_score, pair[0].prestige_normalized);
        }
        let record_only = fixture(RunConfig {
            alpha: 0.0,
            ..RunConfig::default()
        });
        let list = run(&record_only, "kernel scheduler interrupt");
        for pair in list.entries.windows(2) {
            assert!(pair[0].significance >= pair[1].significance);
            assert_eq!(pair[0].fused_score, pair[0].significance);
        }
    }

    #[test]
    fn alpha_outside_unit_interval_is_rejected() {
        for alpha in [-0.1, 1.5] {
            let f = fixture(RunConfig::default());
            let bad = RunConfig {
                alpha,
                ..f.config
            };
            let err =
                recommend("kernel", &f.index, &f.store, &f.prestige, &bad).unwrap_err();
            assert!(matches!(err, Error::InvalidArgument(_)), "{alpha}: {err}");
        }
    }

    #[test]
    fn stale_prestige_artifact_is_rejected() {
        let f = fixture(RunConfig::default());
        let stale = RunConfig {
            damping: 0.6,
            ..f.config
        };
        // The prestige scores were computed at damping 0.85; claiming
        // 0.6 must not silently misattribute them.
        let err = recommend("kernel", &f.index, &f.store, &f.prestige, &stale).unwrap_err();
        assert!(matches!(err, Error::Integrity(_)), "{err}");
    }

    #[test]
    fn unmatched_query_yields_an_empty_list() {
        let f = fixture(RunConfig::default());
        let list = run(&f, "gardening tulips");
        assert!(list.entries.is_empty());
        assert!(list.render_table().contains("no candidates"));
    }

    #[test]
    fn final_ranks_are_a_permutation_of_phase_one() {
        let f = fixture(RunConfig::default());
        let list = run(&f, "kernel scheduler interrupt");
        let mut phase1: Vec<usize> = list.entries.iter().map(|e| e.phase1_rank).collect();
        phase1.sort_unstable();
        let finals: Vec<usize> = (1..=list.entries.len()).collect();
        assert_eq!(phase1, finals);
        for (i, entry) in list.entries.iter().enumerate() {
            assert_eq!(entry.final_rank, i + 1);
        }
    }

    #[test]
    fn reports_are_byte_identical_across_runs() {
        let f = fixture(RunConfig::default());
        let a = run(&f, "kernel scheduler interrupt").to_json().unwrap();
        let g = fixture(RunConfig::default());
        let b = run(&g, "kernel scheduler interrupt").to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn explanation_shows_the_rank_movement() {
        let f = fixture(RunConfig::default());
        let list = run(&f, "kernel scheduler interrupt");
        let text = explain(&list, 30).unwrap();
        assert!(text.contains("moved down from relevance rank 1 to final rank 2"), "{text}");
        let text = explain(&list, 40).unwrap();
        assert!(text.contains("moved up"), "{text}");
    }

    #[test]
    fn explaining_an_absent_user_is_not_found() {
        let f = fixture(RunConfig::default());
        let list = run(&f, "kernel scheduler interrupt");
        let err = explain(&list, 9999).unwrap_err();
        assert!(matches!(err, Error::NotFound(_)), "{err}");
    }

    #[test]
    fn table_lists_entries_in_final_order() {
        let f = fixture(RunConfig::default());
        let list = run(&f, "kernel scheduler interrupt");
        let table = list.render_table();
        let user_40_line = table.lines().position(|l| l.contains("        40")).unwrap();
        let user_30_line = table.lines().position(|l| l.contains("        30")).unwrap();
        assert!(user_40_line < user_30_line, "{table}");
        assert!(table.contains("seed=42"));
    }
}
