//! Ranking quality measurement: precision at a cutoff, average
//! precision, and a batch evaluation report over a query file.
//!
//! Relevance judgements come either from gold user ids attached to a
//! query or, by default, from held-out coverage: a user is relevant when
//! their reserved test answers cover at least a configured fraction of
//! the query's distinct terms. Queries with no relevant users (or no
//! usable terms) are skipped and counted rather than silently folded
//! into the averages. Precision at n always divides by n, so asking for
//! ten results and receiving three scores at most 0.3.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::corpus::CorpusStore;
use crate::error::{Error, Result};
use crate::graph::ExpertiseRank;
use crate::num::Real;
use crate::pipeline::{recommend, ArtifactRefs};
use crate::relevance::RelevanceIndex;
use crate::reputation::compute_all_features;

/// One query to evaluate, with optional gold relevant users.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub text: String,
    /// Known-relevant user ids; empty means judge by held-out coverage.
    pub gold: Vec<u64>,
}

/// Parse a queries file: one query per line, optionally followed by
/// tab-separated gold user ids. Blank lines and `#` comments are
/// skipped.
pub fn parse_queries_file(path: &Path) -> Result<Vec<QuerySpec>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut queries = Vec::new();
    let mut offset = 0u64;
    for line in text.lines() {
        let line_start = offset;
        offset += line.len() as u64 + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let query_text = fields.next().unwrap_or("").trim();
        let mut gold = Vec::new();
        for field in fields {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let id: u64 = field.parse().map_err(|_| {
                Error::parse(
                    path,
                    line_start,
                    format!("invalid gold user id {field:?}"),
                )
            })?;
            gold.push(id);
        }
        if query_text.is_empty() {
            return Err(Error::parse(
                path,
                line_start,
                "line has gold ids but no query text".to_string(),
            ));
        }
        queries.push(QuerySpec {
            text: query_text.to_string(),
            gold,
        });
    }
    Ok(queries)
}

/// Fraction of the first `n` ranked items that are relevant. The divisor
/// is always `n`: returning fewer than `n` items forfeits the tail.
pub fn precision_at_n(ranked: &[u64], relevant: &BTreeSet<u64>, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "precision needs a cutoff of at least 1".to_string(),
        ));
    }
    let hits = ranked
        .iter()
        .take(n)
        .filter(|id| relevant.contains(id))
        .count();
    Ok(hits as f64 / n as f64)
}

/// Mean of the precision values at each relevant item's rank, divided by
/// the total number of relevant items (retrieved or not).
pub fn average_precision(ranked: &[u64], relevant: &BTreeSet<u64>) -> Result<f64> {
    if relevant.is_empty() {
        return Err(Error::InvalidArgument(
            "average precision is undefined with no relevant items".to_string(),
        ));
    }
    let mut hits = 0usize;
    let mut sum = 0.0f64;
    for (i, id) in ranked.iter().enumerate() {
        if relevant.contains(id) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Ok(sum / relevant.len() as f64)
}

/// Measured outcome of one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryEval {
    pub query: String,
    /// Final ranking, best first.
    pub ranked_user_ids: Vec<u64>,
    /// The judged-relevant users, ascending.
    pub relevant_user_ids: Vec<u64>,
    /// Whether the judgement came from supplied gold ids.
    pub gold_provided: bool,
    pub p_at_1: f64,
    pub p_at_5: f64,
    pub p_at_10: f64,
    pub p_at_20: f64,
    pub average_precision: f64,
    /// Mean held-out answer score of the ranked experts.
    pub mean_test_answer_score: f64,
}

/// A query the run could not score, and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedQuery {
    pub query: String,
    pub reason: String,
}

/// Batch evaluation over a query set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: RunConfig,
    /// Input hashes; absent when evaluating in-memory data.
    pub provenance: Option<ArtifactRefs>,
    /// The judgement rule applied when a query carries no gold ids.
    pub relevance_rule: String,
    pub per_query: Vec<QueryEval>,
    pub skipped: Vec<SkippedQuery>,
    /// Mean of the per-query average precisions.
    pub mean_average_precision: f64,
    /// Mean of the per-query held-out answer scores.
    pub mean_test_answer_score: f64,
    /// Mean acceptance ratio over every ranked expert, across queries.
    pub recommended_acceptance_ratio: f64,
    /// Mean acceptance ratio over all users with answers, for contrast.
    pub population_acceptance_ratio: f64,
}

/// Run the full cascade for every query and measure the rankings.
///
/// Queries that clean to nothing or have no relevant users are recorded
/// as skipped. If nothing remains to average, the whole evaluation is an
/// argument error rather than a report full of empty means.
pub fn evaluate<F: Real>(
    queries: &[QuerySpec],
    index: &RelevanceIndex<F>,
    store: &CorpusStore,
    prestige: &ExpertiseRank<F>,
    config: &RunConfig,
) -> Result<EvalReport> {
    if queries.is_empty() {
        return Err(Error::InvalidArgument(
            "evaluation needs at least one query".to_string(),
        ));
    }
    if !(0.0..=1.0).contains(&config.coverage_threshold) {
        return Err(Error::InvalidArgument(format!(
            "coverage threshold {} is outside [0, 1]",
            config.coverage_threshold
        )));
    }

    let mut per_query = Vec::new();
    let mut skipped = Vec::new();
    let mut accepted_sum = 0.0f64;
    let mut accepted_count = 0usize;
    for spec in queries {
        let list = match recommend(&spec.text, index, store, prestige, config) {
            Ok(list) => list,
            Err(Error::EmptyQuery) => {
                skipped.push(SkippedQuery {
                    query: spec.text.clone(),
                    reason: "query cleans to no terms".to_string(),
                });
                continue;
            }
            Err(other) => return Err(other),
        };
        let gold_provided = !spec.gold.is_empty();
        let relevant: BTreeSet<u64> = if gold_provided {
            spec.gold.iter().copied().collect()
        } else {
            coverage_relevant(&list.query_terms, index, config.coverage_threshold)
        };
        if relevant.is_empty() {
            skipped.push(SkippedQuery {
                query: spec.text.clone(),
                reason: "no relevant users under the coverage rule".to_string(),
            });
            continue;
        }
        let ranked: Vec<u64> = list.entries.iter().map(|e| e.user_id).collect();
        for entry in &list.entries {
            accepted_sum += entry.features.acceptance_ratio;
            accepted_count += 1;
        }
        per_query.push(QueryEval {
            query: spec.text.clone(),
            p_at_1: precision_at_n(&ranked, &relevant, 1)?,
            p_at_5: precision_at_n(&ranked, &relevant, 5)?,
            p_at_10: precision_at_n(&ranked, &relevant, 10)?,
            p_at_20: precision_at_n(&ranked, &relevant, 20)?,
            average_precision: average_precision(&ranked, &relevant)?,
            mean_test_answer_score: mean_test_answer_score(&ranked, index, store),
            ranked_user_ids: ranked,
            relevant_user_ids: relevant.into_iter().collect(),
            gold_provided,
        });
    }

    if per_query.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "none of the {} queries could be evaluated ({} skipped)",
            queries.len(),
            skipped.len()
        )));
    }

    let n = per_query.len() as f64;
    let mean_average_precision = per_query.iter().map(|q| q.average_precision).sum::<f64>() / n;
    let mean_test_answer_score =
        per_query.iter().map(|q| q.mean_test_answer_score).sum::<f64>() / n;
    let population = compute_all_features(store, &config.reputation_config());
    let answerers: Vec<f64> = population
        .values()
        .filter(|f| f.answer_count > 0)
        .map(|f| f.acceptance_ratio)
        .collect();
    let population_acceptance_ratio = if answerers.is_empty() {
        0.0
    } else {
        answerers.iter().sum::<f64>() / answerers.len() as f64
    };
    Ok(EvalReport {
        config: *config,
        provenance: None,
        relevance_rule: format!(
            "a user is relevant when their held-out terms cover at least {} of the \
             query's distinct terms",
            config.coverage_threshold
        ),
        per_query,
        skipped,
        mean_average_precision,
        mean_test_answer_score,
        recommended_acceptance_ratio: if accepted_count == 0 {
            0.0
        } else {
            accepted_sum / accepted_count as f64
        },
        population_acceptance_ratio,
    })
}

/// The default judgement: relevant users are those whose held-out test
/// bag covers at least `threshold` of the query's distinct terms.
fn coverage_relevant<F: Real>(
    query_terms: &[String],
    index: &RelevanceIndex<F>,
    threshold: f64,
) -> BTreeSet<u64> {
    let terms: BTreeSet<&String> = query_terms.iter().collect();
    if terms.is_empty() {
        return BTreeSet::new();
    }
    index
        .profiles
        .values()
        .filter(|profile| {
            let hits = terms
                .iter()
                .filter(|t| profile.test_bag.contains(t))
                .count();
            hits as f64 / terms.len() as f64 >= threshold
        })
        .map(|profile| profile.user_id)
        .collect()
}

/// Mean score of the held-out (test-side) answers of the ranked experts.
fn mean_test_answer_score<F: Real>(
    ranked: &[u64],
    index: &RelevanceIndex<F>,
    store: &CorpusStore,
) -> f64 {
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for user in ranked {
        let Some(profile) = index.profiles.get(user) else {
            continue;
        };
        for post_id in &profile.test_posts {
            if let Some(post) = store.get_post(*post_id) {
                sum += post.score as f64;
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map(|s| format!("{s}\n"))
            .map_err(|e| Error::Integrity(format!("report serialization failed: {e}")))
    }

    /// Human-readable summary: aggregates first, then one line per query.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        out.push_str(&format!(
            "evaluation over {} queries ({} skipped)\n",
            self.per_query.len(),
            self.skipped.len()
        ));
        out.push_str(&format!(
            "config: seed={} alpha={} damping={} k_posts={} k_users={} test_fraction={} \
             coverage_threshold={}\n",
            c.seed, c.alpha, c.damping, c.k_posts, c.k_users, c.test_fraction, c.coverage_threshold
        ));
        out.push_str(&format!("judgement: {}\n", self.relevance_rule));
        out.push_str(&format!(
            "mean average precision: {:.6}\n",
            self.mean_average_precision
        ));
        out.push_str(&format!(
            "mean held-out answer score of recommended experts: {:.4}\n",
            self.mean_test_answer_score
        ));
        out.push_str(&format!(
            "acceptance ratio: recommended {:.4} vs population {:.4}\n",
            self.recommended_acceptance_ratio, self.population_acceptance_ratio
        ));
        out.push_str(&format!(
            "{:>6}  {:>6}  {:>6}  {:>6}  {:>8}  {:>8}  query\n",
            "p@1", "p@5", "p@10", "p@20", "ap", "heldout"
        ));
        for q in &self.per_query {
            out.push_str(&format!(
                "{:>6.3}  {:>6.3}  {:>6.3}  {:>6.3}  {:>8.5}  {:>8.3}  {}\n",
                q.p_at_1,
                q.p_at_5,
                q.p_at_10,
                q.p_at_20,
                q.average_precision,
                q.mean_test_answer_score,
                q.query
            ));
        }
        for s in &self.skipped {
            out.push_str(&format!("skipped: {} ({})\n", s.query, s.reason));
        }
        out
    }

    /// Write mean precision per rank cutoff as CSV, for plotting.
    pub fn write_plot_csv(&self, path: &Path, max_rank: usize) -> Result<()> {
        if max_rank == 0 {
            return Err(Error::InvalidArgument(
                "plot data needs at least one rank".to_string(),
            ));
        }
        let mut out = String::from("rank,mean_precision\n");
        for rank in 1..=max_rank {
            let mut sum = 0.0f64;
            for q in &self.per_query {
                let relevant: BTreeSet<u64> = q.relevant_user_ids.iter().copied().collect();
                sum += precision_at_n(&q.ranked_user_ids, &relevant, rank)?;
            }
            let mean = sum / self.per_query.len() as f64;
            writeln!(out, "{rank},{mean}").expect("string write cannot fail");
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Post, PostType};
    use crate::graph::{build_graph, expertise_rank};
    use crate::relevance::build_index;
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;
    use tempfile::TempDir;

    fn set(ids: &[u64]) -> BTreeSet<u64> {
        ids.iter().copied().collect()
    }

    #[test]
    fn average_precision_hand_value() {
        // Relevant at ranks 1 and 3 with two relevant overall:
        // (1/1 + 2/3) / 2.
        let ap = average_precision(&[1, 2, 3], &set(&[1, 3])).unwrap();
        assert!((ap - 5.0 / 6.0).abs() < 1e-9, "{ap}");
        assert!((ap - 0.833333333).abs() < 1e-8);
    }

    #[test]
    fn perfect_ranking_has_average_precision_one() {
        let ap = average_precision(&[4, 9, 2], &set(&[4, 9, 2])).unwrap();
        assert_eq!(ap, 1.0);
    }

    #[test]
    fn missing_relevant_items_drag_average_precision_down() {
        // One of two relevant items is never retrieved.
        let ap = average_precision(&[1, 2], &set(&[1, 99])).unwrap();
        assert_eq!(ap, 0.5);
    }

    #[test]
    fn average_precision_without_relevant_items_is_rejected() {
        let err = average_precision(&[1, 2], &set(&[])).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)), "{err}");
    }

    #[test]
    fn precision_divides_by_the_cutoff_not_the_list_length() {
        let p = precision_at_n(&[1], &set(&[1]), 10).unwrap();
        assert_eq!(p, 0.1);
        let p = precision_at_n(&[], &set(&[1]), 5).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn zero_cutoff_is_rejected() {
        let err = precision_at_n(&[1], &set(&[1]), 0).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)), "{err}");
    }

    proptest! {
        /// An independent counting oracle for precision at n.
        #[test]
        fn precision_matches_a_direct_counter(
            ranked in prop::collection::vec(0u64..30, 0..25),
            relevant in prop::collection::vec(0u64..30, 0..10),
            n in 1usize..25,
        ) {
            let relevant: BTreeSet<u64> = relevant.into_iter().collect();
            let mut hits = 0usize;
            for i in 0..n.min(ranked.len()) {
                if relevant.contains(&ranked[i]) {
                    hits += 1;
                }
            }
            let expected = hits as f64 / n as f64;
            prop_assert_eq!(precision_at_n(&ranked, &relevant, n).unwrap(), expected);
        }

        /// Average precision against the formula computed a second way:
        /// walk every prefix and reuse the precision function itself.
        #[test]
        fn average_precision_matches_prefix_precisions(
            ranked_raw in prop::collection::vec(0u64..15, 1..12),
            relevant_raw in prop::collection::vec(0u64..15, 1..6),
        ) {
            // Deduplicate the ranking; a ranked list never repeats users.
            let mut seen = BTreeSet::new();
            let ranked: Vec<u64> = ranked_raw.into_iter().filter(|u| seen.insert(*u)).collect();
            let relevant: BTreeSet<u64> = relevant_raw.into_iter().collect();
            let mut expected = 0.0f64;
            for (i, id) in ranked.iter().enumerate() {
                if relevant.contains(id) {
                    expected += precision_at_n(&ranked, &relevant, i + 1).unwrap();
                }
            }
            expected /= relevant.len() as f64;
            let got = average_precision(&ranked, &relevant).unwrap();
            prop_assert!((got - expected).abs() < 1e-12, "{} vs {}", got, expected);
        }
    }

    #[test]
    fn queries_file_parses_text_and_gold_ids() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("queries.txt");
        fs::write(
            &path,
            "# evaluation set\nhow to sort a list\nparsing grammars\t100\t245\n\n  \nlifetime errors\t7\n",
        )
        .unwrap();
        let queries = parse_queries_file(&path).unwrap();
        assert_eq!(queries.len(), 3);
        assert_eq!(queries[0].text, "how to sort a list");
        assert!(queries[0].gold.is_empty());
        assert_eq!(queries[1].text, "parsing grammars");
        assert_eq!(queries[1].gold, vec![100, 245]);
        assert_eq!(queries[2].gold, vec![7]);
    }

    #[test]
    fn bad_gold_ids_are_parse_errors_with_offsets() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("queries.txt");
        fs::write(&path, "first query\nsecond query\tnot-a-number\n").unwrap();
        let err = parse_queries_file(&path).unwrap_err();
        match err {
            Error::Parse { offset, message, .. } => {
                assert_eq!(offset, 12);
                assert!(message.contains("not-a-number"), "{message}");
            }
            other => panic!("{other}"),
        }
    }

    fn question(id: u64, owner: u64, body: &str) -> Post {
        Post {
            post_id: id,
            post_type: PostType::Question,
            owner_user_id: Some(owner),
            parent_id: None,
            accepted_answer_id: None,
            creation_date: Utc.with_ymd_and_hms(2009, 3, 1, 10, 0, 0).unwrap(),
            score: 1,
            view_count: 40,
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

    struct Fixture {
        store: CorpusStore,
        index: RelevanceIndex<f64>,
        prestige: ExpertiseRank<f64>,
        config: RunConfig,
    }

    /// User 100 is the compiler expert: full topic vocabulary in every
    /// answer, three distinct askers, score 20. User 200 answers about
    /// databases.
    fn planted_fixture() -> Fixture {
        let mut store = CorpusStore::new();
        let topic = "compiler parser grammar token lexer";
        for (i, asker) in [10, 11, 12].iter().enumerate() {
            store
                .insert_post(question(1 + i as u64, *asker, "compiler question"))
                .unwrap();
            store
                .insert_post(answer(20 + i as u64, 100, 1 + i as u64, 20, topic))
                .unwrap();
        }
        store.insert_post(question(4, 13, "database question")).unwrap();
        store
            .insert_post(answer(23, 200, 4, 20, "database index join transaction schema"))
            .unwrap();
        store
            .insert_post(answer(24, 200, 4, 20, "database index join transaction backup"))
            .unwrap();
        store.finalize();
        let config = RunConfig::default();
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

    fn q(text: &str) -> QuerySpec {
        QuerySpec {
            text: text.to_string(),
            gold: Vec::new(),
        }
    }

    #[test]
    fn planted_expert_scores_perfectly_under_gold_judgement() {
        let f = planted_fixture();
        let queries = vec![QuerySpec {
            text: "compiler parser grammar".to_string(),
            gold: vec![100],
        }];
        let report =
            evaluate(&queries, &f.index, &f.store, &f.prestige, &f.config).unwrap();
        assert_eq!(report.per_query.len(), 1);
        let q = &report.per_query[0];
        assert!(q.gold_provided);
        assert_eq!(q.p_at_1, 1.0);
        assert_eq!(q.average_precision, 1.0);
        assert_eq!(report.mean_average_precision, 1.0);
        // The expert's held-out answers all score 20.
        assert_eq!(q.mean_test_answer_score, 20.0);
    }

    #[test]
    fn coverage_rule_finds_the_expert_without_gold() {
        let f = planted_fixture();
        let report = evaluate(
            &[q("compiler parser grammar token lexer")],
            &f.index,
            &f.store,
            &f.prestige,
            &f.config,
        )
        .unwrap();
        let query = &report.per_query[0];
        assert!(!query.gold_provided);
        assert_eq!(query.relevant_user_ids, vec![100]);
        assert_eq!(query.p_at_1, 1.0);
        assert_eq!(report.mean_average_precision, 1.0);
    }

    #[test]
    fn unusable_queries_are_skipped_and_counted() {
        let f = planted_fixture();
        let queries = vec![
            q("compiler parser grammar token lexer"),
            q("the of and"),              // cleans to nothing
            q("quantum chromodynamics"),  // no coverage anywhere
        ];
        let report =
            evaluate(&queries, &f.index, &f.store, &f.prestige, &f.config).unwrap();
        assert_eq!(report.per_query.len(), 1);
        assert_eq!(report.skipped.len(), 2);
        assert!(report.skipped[0].reason.contains("no terms"));
        assert!(report.skipped[1].reason.contains("coverage"));
    }

    #[test]
    fn evaluation_with_no_usable_queries_is_rejected() {
        let f = planted_fixture();
        let err = evaluate(
            &[q("the of and")],
            &f.index,
            &f.store,
            &f.prestige,
            &f.config,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)), "{err}");
        let err = evaluate(&[], &f.index, &f.store, &f.prestige, &f.config).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)), "{err}");
    }

    #[test]
    fn acceptance_comparison_covers_recommended_and_population() {
        let f = planted_fixture();
        let report = evaluate(
            &[q("compiler parser grammar token lexer")],
            &f.index,
            &f.store,
            &f.prestige,
            &f.config,
        )
        .unwrap();
        // All planted answers score 20, above the threshold of 15.
        assert_eq!(report.recommended_acceptance_ratio, 1.0);
        assert_eq!(report.population_acceptance_ratio, 1.0);
    }

    #[test]
    fn report_json_is_deterministic() {
        let make = || {
            let f = planted_fixture();
            evaluate(
                &[q("compiler parser grammar token lexer")],
                &f.index,
                &f.store,
                &f.prestige,
                &f.config,
            )
            .unwrap()
            .to_json()
            .unwrap()
        };
        assert_eq!(make(), make());
    }

    #[test]
    fn plot_csv_has_one_line_per_rank() {
        let f = planted_fixture();
        let report = evaluate(
            &[q("compiler parser grammar token lexer")],
            &f.index,
            &f.store,
            &f.prestige,
            &f.config,
        )
        .unwrap();
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("precision.csv");
        report.write_plot_csv(&path, 5).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "rank,mean_precision");
        assert_eq!(lines[1], "1,1");
        // Only one relevant user exists, so precision decays as 1/rank.
        assert_eq!(lines[2], "2,0.5");
    }

    #[test]
    fn text_rendering_mentions_the_aggregates() {
        let f = planted_fixture();
        let report = evaluate(
            &[q("compiler parser grammar token lexer"), q("pure nonsense zzz")],
            &f.index,
            &f.store,
            &f.prestige,
            &f.config,
        )
        .unwrap();
        let text = report.render_text();
        assert!(text.contains("mean average precision: 1.000000"), "{text}");
        assert!(text.contains("1 skipped"), "{text}");
        assert!(text.contains("skipped: pure nonsense zzz"), "{text}");
    }
}
