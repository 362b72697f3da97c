//! Per-user expertise profiles and the seeded train/test split.
//!
//! A profile exists for every user who owns at least one answer; users who
//! only ask questions have no answering record to rank and are never
//! candidates. The split partitions a user's answer documents into a
//! train side (indexed for matching) and a held-out test side (used for
//! precision against the query and for held-out score reporting).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStore, Post};
use crate::error::{Error, Result};
use crate::text::{build_bag, clean_text, BagOfWords, TokenList};

/// Cleaned tokens of one answer post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerDoc {
    pub post_id: u64,
    pub tokens: TokenList,
}

/// A user's textual footprint before/after splitting.
///
/// `train` and `test` are indices into `answer_docs`; both are empty until
/// [`split_profile`] runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpertProfile {
    pub user_id: u64,
    /// Terms from all the user's questions and answers.
    pub full_bag: BagOfWords,
    /// One document per answer, ascending post id.
    pub answer_docs: Vec<AnswerDoc>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl ExpertProfile {
    fn bag_over(&self, indices: &[usize]) -> BagOfWords {
        let mut bag = BagOfWords::new();
        for &i in indices {
            bag.merge(&build_bag(&self.answer_docs[i].tokens));
        }
        bag
    }

    pub fn train_bag(&self) -> BagOfWords {
        self.bag_over(&self.train)
    }

    pub fn test_bag(&self) -> BagOfWords {
        self.bag_over(&self.test)
    }

    fn post_ids(&self, indices: &[usize]) -> Vec<u64> {
        indices
            .iter()
            .map(|&i| self.answer_docs[i].post_id)
            .collect()
    }
}

/// The persisted result of splitting one profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitProfile {
    pub user_id: u64,
    pub train_posts: Vec<u64>,
    pub test_posts: Vec<u64>,
    pub train_bag: BagOfWords,
    pub test_bag: BagOfWords,
}

impl SplitProfile {
    pub fn from_profile(profile: &ExpertProfile) -> Self {
        Self {
            user_id: profile.user_id,
            train_posts: profile.post_ids(&profile.train),
            test_posts: profile.post_ids(&profile.test),
            train_bag: profile.train_bag(),
            test_bag: profile.test_bag(),
        }
    }
}

/// Clean every post body and assemble per-user profiles.
///
/// Orphan answers still belong to their owner's profile: the text counts
/// as answering experience even when the question is missing from the
/// dump. Posts without an owner contribute to no profile.
pub fn build_profiles(store: &CorpusStore) -> BTreeMap<u64, ExpertProfile> {
    let posts: Vec<_> = store.posts().collect();
    let cleaned = clean_all(&posts);
    profiles_from_cleaned(&posts, &cleaned)
}

/// Clean every post body in parallel, preserving post order.
pub(crate) fn clean_all(posts: &[&Post]) -> Vec<TokenList> {
    use rayon::prelude::*;

    posts
        .par_iter()
        .map(|post| clean_text(&post.body_raw))
        .collect()
}

/// Assemble profiles from posts paired with their cleaned tokens, so a
/// caller that already cleaned the corpus need not do it twice.
pub(crate) fn profiles_from_cleaned(
    posts: &[&Post],
    cleaned: &[TokenList],
) -> BTreeMap<u64, ExpertProfile> {
    debug_assert_eq!(posts.len(), cleaned.len());
    let mut profiles: BTreeMap<u64, ExpertProfile> = BTreeMap::new();
    // First pass: answers create profiles.
    for (post, tokens) in posts.iter().zip(cleaned) {
        let Some(owner) = post.owner_user_id else {
            continue;
        };
        if !post.is_answer() {
            continue;
        }
        let profile = profiles.entry(owner).or_insert_with(|| ExpertProfile {
            user_id: owner,
            full_bag: BagOfWords::new(),
            answer_docs: Vec::new(),
            train: Vec::new(),
            test: Vec::new(),
        });
        profile.full_bag.merge(&build_bag(tokens));
        profile.answer_docs.push(AnswerDoc {
            post_id: post.post_id,
            tokens: tokens.clone(),
        });
    }
    // Second pass: questions enrich existing profiles' full bags only.
    for (post, tokens) in posts.iter().zip(cleaned) {
        let Some(owner) = post.owner_user_id else {
            continue;
        };
        if post.is_question() {
            if let Some(profile) = profiles.get_mut(&owner) {
                profile.full_bag.merge(&build_bag(tokens));
            }
        }
    }
    profiles
}

/// Seeded 80/20-style split of a profile's answer documents.
///
/// `ceil(test_fraction · n)` documents are held out as test, the rest
/// train. The user id is folded into the stream seed so one run seed
/// still decorrelates the per-user shuffles.
pub fn split_profile(
    mut profile: ExpertProfile,
    test_fraction: f64,
    seed: u64,
) -> Result<ExpertProfile> {
    let n = profile.answer_docs.len();
    if n == 0 {
        return Err(Error::InvalidArgument(format!(
            "profile of user {} has no answer documents to split",
            profile.user_id
        )));
    }
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(Error::InvalidArgument(format!(
            "test fraction {test_fraction} is outside [0, 1]"
        )));
    }
    let test_count = test_doc_count(test_fraction, n);
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, profile.user_id));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let (test, train) = order.split_at(test_count);
    profile.test = test.to_vec();
    profile.train = train.to_vec();
    profile.test.sort_unstable();
    profile.train.sort_unstable();
    Ok(profile)
}

/// ceil(fraction · n), guarded against float round-up artifacts such as
/// 0.2 · 15 = 3.0000000000000004.
fn test_doc_count(test_fraction: f64, n: usize) -> usize {
    let raw = (test_fraction * n as f64 - 1e-9).ceil();
    (raw.max(0.0) as usize).min(n)
}

fn stream_seed(seed: u64, user_id: u64) -> u64 {
    seed ^ user_id.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}
