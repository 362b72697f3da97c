//! Answering-record features and their fusion into a significance score,
//! the third stage of the cascade.
//!
//! Four per-user features summarise how the community received a user's
//! answers: the share of answers that count as accepted, and the average
//! score, view count, and favorite count. Views and favorites live on
//! questions in the dump, so an answer inherits them from its parent
//! question; an orphan answer contributes zero. Acceptance defaults to a
//! score threshold — an answer at or above it counts — and can
//! additionally honour the asker's explicit accepted-answer mark.
//!
//! Significance is computed relative to a candidate set: each feature is
//! min-max normalized across the candidates and the four normalized
//! values are averaged, so a candidate leading every feature scores 1 and
//! one trailing every feature scores 0. A feature that never varies
//! inside the set carries no information and pins to one half.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStore, Post};
use crate::error::{Error, Result};
use crate::num::{min_max_normalize, real, Real};

/// What counts as an accepted answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReputationConfig {
    /// An answer with at least this score counts as accepted.
    pub accept_threshold: i64,
    /// Also count an answer its question marks as the accepted one.
    pub use_accepted_flag: bool,
}

impl Default for ReputationConfig {
    fn default() -> Self {
        Self {
            accept_threshold: 15,
            use_accepted_flag: false,
        }
    }
}

/// Aggregated answering record of one user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReputationFeatures {
    pub user_id: u64,
    pub answer_count: u64,
    pub accepted_count: u64,
    /// accepted_count / answer_count; zero for users without answers.
    pub acceptance_ratio: f64,
    pub avg_score: f64,
    pub avg_views: f64,
    pub avg_favorites: f64,
}

impl ReputationFeatures {
    fn empty(user_id: u64) -> Self {
        Self {
            user_id,
            answer_count: 0,
            accepted_count: 0,
            acceptance_ratio: 0.0,
            avg_score: 0.0,
            avg_views: 0.0,
            avg_favorites: 0.0,
        }
    }
}

fn is_accepted(store: &CorpusStore, answer: &Post, config: &ReputationConfig) -> bool {
    if answer.score >= config.accept_threshold {
        return true;
    }
    if config.use_accepted_flag {
        if let Some(parent) = answer.parent_id.and_then(|id| store.get_post(id)) {
            return parent.accepted_answer_id == Some(answer.post_id);
        }
    }
    false
}

/// Compute the answering-record features of one user.
///
/// A user is known if they appear in the users table or own any post;
/// anyone else is a lookup failure. A known user with no answers has an
/// all-zero record.
pub fn compute_features(
    store: &CorpusStore,
    user_id: u64,
    config: &ReputationConfig,
) -> Result<ReputationFeatures> {
    let known = store.get_user(user_id).is_some()
        || store.posts().any(|p| p.owner_user_id == Some(user_id));
    if !known {
        return Err(Error::NotFound(format!(
            "user {user_id} is not present in the corpus"
        )));
    }
    let mut features = ReputationFeatures::empty(user_id);
    let mut score_sum = 0i64;
    let mut view_sum = 0u64;
    let mut favorite_sum = 0u64;
    for post in store.posts() {
        if !post.is_answer() || post.owner_user_id != Some(user_id) {
            continue;
        }
        features.answer_count += 1;
        if is_accepted(store, post, config) {
            features.accepted_count += 1;
        }
        score_sum += post.score;
        // Views and favorites come from the parent question; an orphan
        // answer has none to inherit.
        if let Some(parent) = post.parent_id.and_then(|id| store.get_post(id)) {
            if parent.is_question() {
                view_sum += parent.view_count;
                favorite_sum += parent.favorite_count;
            }
        }
    }
    if features.answer_count > 0 {
        let n = features.answer_count as f64;
        features.acceptance_ratio = features.accepted_count as f64 / n;
        features.avg_score = score_sum as f64 / n;
        features.avg_views = view_sum as f64 / n;
        features.avg_favorites = favorite_sum as f64 / n;
    }
    Ok(features)
}

/// Features for a whole candidate list, in the given order.
pub fn compute_features_for(
    store: &CorpusStore,
    candidates: &[u64],
    config: &ReputationConfig,
) -> Result<Vec<ReputationFeatures>> {
    candidates
        .iter()
        .map(|&user| compute_features(store, user, config))
        .collect()
}

/// Features for every known user in one pass over the posts, instead of
/// one pass per user. Users without answers get all-zero records.
pub fn compute_all_features(
    store: &CorpusStore,
    config: &ReputationConfig,
) -> BTreeMap<u64, ReputationFeatures> {
    struct Sums {
        features: ReputationFeatures,
        score: i64,
        views: u64,
        favorites: u64,
    }
    let mut by_user: BTreeMap<u64, Sums> = BTreeMap::new();
    let known = |user_id: u64, by_user: &mut BTreeMap<u64, Sums>| {
        by_user.entry(user_id).or_insert_with(|| Sums {
            features: ReputationFeatures::empty(user_id),
            score: 0,
            views: 0,
            favorites: 0,
        });
    };
    for user in store.users() {
        known(user.user_id, &mut by_user);
    }
    for post in store.posts() {
        let Some(owner) = post.owner_user_id else {
            continue;
        };
        known(owner, &mut by_user);
        if !post.is_answer() {
            continue;
        }
        let sums = by_user.get_mut(&owner).expect("owner was just registered");
        sums.features.answer_count += 1;
        if is_accepted(store, post, config) {
            sums.features.accepted_count += 1;
        }
        sums.score += post.score;
        if let Some(parent) = post.parent_id.and_then(|id| store.get_post(id)) {
            if parent.is_question() {
                sums.views += parent.view_count;
                sums.favorites += parent.favorite_count;
            }
        }
    }
    by_user
        .into_iter()
        .map(|(user_id, mut sums)| {
            if sums.features.answer_count > 0 {
                let n = sums.features.answer_count as f64;
                sums.features.acceptance_ratio = sums.features.accepted_count as f64 / n;
                sums.features.avg_score = sums.score as f64 / n;
                sums.features.avg_views = sums.views as f64 / n;
                sums.features.avg_favorites = sums.favorites as f64 / n;
            }
            (user_id, sums.features)
        })
        .collect()
}

/// Fuse feature records into one significance score per candidate:
/// the mean of the four min-max normalized features.
pub fn significance<F: Real>(features: &[ReputationFeatures]) -> Result<Vec<(u64, F)>> {
    if features.is_empty() {
        return Err(Error::InvalidArgument(
            "significance needs at least one candidate".to_string(),
        ));
    }
    let column = |extract: fn(&ReputationFeatures) -> f64| -> Vec<F> {
        let raw: Vec<F> = features.iter().map(|f| real(extract(f))).collect();
        min_max_normalize(&raw)
    };
    let ratio = column(|f| f.acceptance_ratio);
    let score = column(|f| f.avg_score);
    let views = column(|f| f.avg_views);
    let favorites = column(|f| f.avg_favorites);
    let quarter = real::<F>(0.25);
    Ok(features
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mean = (ratio[i] + score[i] + views[i] + favorites[i]) * quarter;
            (f.user_id, mean)
        })
        .collect())
}

/// Write features plus their candidate-relative significance as CSV.
pub fn write_reputation_csv<F: Real>(
    features: &[ReputationFeatures],
    significance: &[(u64, F)],
    path: &Path,
) -> Result<()> {
    if features.len() != significance.len() {
        return Err(Error::InvalidArgument(format!(
            "{} feature rows but {} significance scores",
            features.len(),
            significance.len()
        )));
    }
    let mut out = String::from(
        "user_id,answer_count,accepted_count,acceptance_ratio,avg_score,avg_views,avg_favorites,significance\n",
    );
    for (f, (user, sig)) in features.iter().zip(significance) {
        if f.user_id != *user {
            return Err(Error::InvalidArgument(format!(
                "feature row for user {} does not line up with significance for user {user}",
                f.user_id
            )));
        }
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            f.user_id,
            f.answer_count,
            f.accepted_count,
            f.acceptance_ratio,
            f.avg_score,
            f.avg_views,
            f.avg_favorites,
            sig
        )
        .expect("string write cannot fail");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
