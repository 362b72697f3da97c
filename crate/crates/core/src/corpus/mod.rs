//! Community corpus: posts, users, and the question→answers index.
//!
//! Ingestion reads the public Stack Exchange dump format (`Posts.xml`,
//! optionally `Users.xml`) and persists a line-delimited JSON store with a
//! hashed manifest. The in-memory [`CorpusStore`] is immutable once built
//! and safe to share across threads.

pub mod store;
pub mod xml;

pub use store::{load_store, save_store, StoreManifest};

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a post asks or answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PostType {
    Question,
    Answer,
}

/// One question or answer from the dump.
///
/// `view_count`, `favorite_count` and `accepted_answer_id` are only
/// meaningful on questions; answers carry 0 / `None`. `parent_id` is
/// present exactly on answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub post_id: u64,
    pub post_type: PostType,
    pub owner_user_id: Option<u64>,
    pub parent_id: Option<u64>,
    pub accepted_answer_id: Option<u64>,
    pub creation_date: DateTime<Utc>,
    pub score: i64,
    pub view_count: u64,
    pub favorite_count: u64,
    pub body_raw: String,
}

impl Post {
    pub fn is_question(&self) -> bool {
        self.post_type == PostType::Question
    }

    pub fn is_answer(&self) -> bool {
        self.post_type == PostType::Answer
    }
}

/// A community member. `dump_reputation` is the community's own score,
/// kept only as external ground truth for comparisons; the engine never
/// feeds it into rankings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityUser {
    pub user_id: u64,
    pub display_name: String,
    pub dump_reputation: u64,
}

/// Counts reported by [`ingest_dump`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub questions: u64,
    pub answers: u64,
    pub users: u64,
    pub orphans: u64,
    pub skipped: u64,
}

/// Immutable post/user collection with a question→answers index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStore {
    posts: BTreeMap<u64, Post>,
    users: BTreeMap<u64, CommunityUser>,
    /// question id → ascending ids of its in-store answers.
    question_index: BTreeMap<u64, Vec<u64>>,
    /// Answer ids whose parent question is missing from the store (or is
    /// not a question). Kept for text matching, excluded from the graph.
    orphans: BTreeSet<u64>,
}

impl CorpusStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a post; a repeated id is an integrity error.
    pub fn insert_post(&mut self, post: Post) -> Result<()> {
        let id = post.post_id;
        if self.posts.insert(id, post).is_some() {
            return Err(Error::Integrity(format!("duplicate post id {id}")));
        }
        Ok(())
    }

    /// Insert a user; a repeated id is an integrity error.
    pub fn insert_user(&mut self, user: CommunityUser) -> Result<()> {
        let id = user.user_id;
        if self.users.insert(id, user).is_some() {
            return Err(Error::Integrity(format!("duplicate user id {id}")));
        }
        Ok(())
    }

    /// Resolve answers to their parent questions, building the
    /// question index and the orphan set. Call once after all inserts.
    pub fn finalize(&mut self) {
        self.question_index.clear();
        self.orphans.clear();
        for (id, post) in &self.posts {
            if !post.is_answer() {
                continue;
            }
            let parent_is_question = post
                .parent_id
                .and_then(|pid| self.posts.get(&pid))
                .is_some_and(Post::is_question);
            if parent_is_question {
                self.question_index
                    .entry(post.parent_id.expect("answer has parent"))
                    .or_default()
                    .push(*id);
            } else {
                self.orphans.insert(*id);
            }
        }
    }

    /// Posts in ascending id order.
    pub fn posts(&self) -> impl Iterator<Item = &Post> {
        self.posts.values()
    }

    /// Users in ascending id order.
    pub fn users(&self) -> impl Iterator<Item = &CommunityUser> {
        self.users.values()
    }

    pub fn get_post(&self, post_id: u64) -> Option<&Post> {
        self.posts.get(&post_id)
    }

    pub fn get_user(&self, user_id: u64) -> Option<&CommunityUser> {
        self.users.get(&user_id)
    }

    /// Ascending answer ids of a question (empty if none or unknown).
    pub fn answers_of(&self, question_id: u64) -> &[u64] {
        self.question_index
            .get(&question_id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Questions that have at least one resolved answer.
    pub fn answered_questions(&self) -> impl Iterator<Item = u64> + '_ {
        self.question_index.keys().copied()
    }

    pub fn is_orphan(&self, post_id: u64) -> bool {
        self.orphans.contains(&post_id)
    }

    pub fn orphan_count(&self) -> u64 {
        self.orphans.len() as u64
    }

    pub fn post_count(&self) -> usize {
        self.posts.len()
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    /// Count posts by type: (questions, answers).
    pub fn type_counts(&self) -> (u64, u64) {
        let questions = self.posts.values().filter(|p| p.is_question()).count() as u64;
        (questions, self.posts.len() as u64 - questions)
    }
}

/// Ingest a dump into a persisted store at `out`.
///
/// Every row with `PostTypeId` 1 or 2 becomes a post; other types are
/// counted as skipped. The returned summary is also recorded in the store
/// manifest.
pub fn ingest_dump(
    posts_file: &Path,
    users_file: Option<&Path>,
    out: &Path,
) -> Result<IngestSummary> {
    let (store, summary) = ingest_to_memory(posts_file, users_file)?;
    store::save_store(&store, &summary, out)?;
    Ok(summary)
}

/// Ingest without persisting; used by [`ingest_dump`] and by tests.
pub fn ingest_to_memory(
    posts_file: &Path,
    users_file: Option<&Path>,
) -> Result<(CorpusStore, IngestSummary)> {
    let mut store = CorpusStore::new();
    let skipped = xml::parse_posts_file(posts_file, &mut store)?;
    if let Some(users_path) = users_file {
        xml::parse_users_file(users_path, &mut store)?;
    }
    store.finalize();
    let (questions, answers) = store.type_counts();
    let summary = IngestSummary {
        questions,
        answers,
        users: store.user_count() as u64,
        orphans: store.orphan_count(),
        skipped,
    };
    Ok((store, summary))
}

/// Restrict a store to posts created within `[from, to]` (inclusive).
///
/// Users are kept as-is. Answers whose question falls outside the window
/// become orphans of the view, exactly as if the question were absent
/// from the dump.
pub fn date_filter(
    store: &CorpusStore,
    from: DateTime<Utc>,
    to: DateTime<Utc>,
) -> Result<CorpusStore> {
    if from > to {
        return Err(Error::InvalidArgument(format!(
            "date window is empty: {from} > {to}"
        )));
    }
    let mut view = CorpusStore {
        posts: store
            .posts
            .iter()
            .filter(|(_, p)| from <= p.creation_date && p.creation_date <= to)
            .map(|(id, p)| (*id, p.clone()))
            .collect(),
        users: store.users.clone(),
        question_index: BTreeMap::new(),
        orphans: BTreeSet::new(),
    };
    view.finalize();
    Ok(view)
}

/// Hand-built dump fixtures shared by the corpus test modules.
#[cfg(test)]
pub(crate) mod test_fixtures {
    /// 2 questions, 3 answers, 1 tag-wiki row (skipped), no orphans.
    pub(crate) const SIX_ROW_POSTS: &str = r#"<?xml version="1.0" encoding="utf-8"?>
<posts>
  <row Id="1" PostTypeId="1" AcceptedAnswerId="3" CreationDate="2009-03-01T10:00:00.000" Score="5" ViewCount="120" FavoriteCount="2" OwnerUserId="11" Body="&lt;p&gt;How do I reverse a list?&lt;/p&gt;" />
  <row Id="2" PostTypeId="1" CreationDate="2009-03-02T09:30:00.000" Score="3" ViewCount="80" OwnerUserId="12" Body="&lt;p&gt;Sorting a vector quickly&lt;/p&gt;" />
  <row Id="3" PostTypeId="2" ParentId="1" CreationDate="2009-03-01T11:00:00.000" Score="7" OwnerUserId="13" Body="&lt;p&gt;Use the reverse method.&lt;/p&gt;" />
  <row Id="4" PostTypeId="2" ParentId="1" CreationDate="2009-03-01T12:00:00.000" Score="1" OwnerUserId="12" Body="&lt;p&gt;Loop backwards.&lt;/p&gt;" />
  <row Id="5" PostTypeId="2" ParentId="2" CreationDate="2009-03-02T10:15:00.000" Score="4" OwnerUserId="13" Body="&lt;p&gt;Call sort then reverse.&lt;/p&gt;" />
  <row Id="6" PostTypeId="4" CreationDate="2009-03-03T08:00:00.000" Score="0" Body="tag wiki body" />
</posts>
"#;

    pub(crate) const THREE_USERS: &str = r#"<users>
  <row Id="11" DisplayName="alice" Reputation="321" />
  <row Id="12" DisplayName="bob" Reputation="55" />
  <row Id="13" DisplayName="carol" Reputation="1200" />
</users>
"#;
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn date(day: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2009, 3, day, 12, 0, 0).unwrap()
    }

    fn question(id: u64, day: u32) -> Post {
        Post {
            post_id: id,
            post_type: PostType::Question,
            owner_user_id: Some(100 + id),
            parent_id: None,
            accepted_answer_id: None,
            creation_date: date(day),
            score: 1,
            view_count: 10,
            favorite_count: 0,
            body_raw: format!("<p>question {id}</p>"),
        }
    }

    fn answer(id: u64, parent: u64, day: u32) -> Post {
        Post {
            post_id: id,
            post_type: PostType::Answer,
            owner_user_id: Some(200 + id),
            parent_id: Some(parent),
            accepted_answer_id: None,
            creation_date: date(day),
            score: 2,
            view_count: 0,
            favorite_count: 0,
            body_raw: format!("<p>answer {id}</p>"),
        }
    }

    fn sample_store() -> CorpusStore {
        let mut store = CorpusStore::new();
        store.insert_post(question(1, 1)).unwrap();
        store.insert_post(answer(2, 1, 2)).unwrap();
        store.insert_post(answer(3, 1, 3)).unwrap();
        store.insert_post(answer(4, 999, 3)).unwrap();
        store.finalize();
        store
    }

    #[test]
    fn duplicate_post_id_is_an_integrity_error() {
        let mut store = CorpusStore::new();
        store.insert_post(question(1, 1)).unwrap();
        let err = store.insert_post(question(1, 2)).unwrap_err();
        assert!(matches!(err, Error::Integrity(_)), "{err}");
        assert!(err.to_string().contains('1'));
    }

    #[test]
    fn finalize_builds_index_and_orphans() {
        let store = sample_store();
        assert_eq!(store.answers_of(1), &[2, 3]);
        assert!(store.is_orphan(4));
        assert!(!store.is_orphan(2));
        assert_eq!(store.orphan_count(), 1);
        assert_eq!(store.type_counts(), (1, 3));
    }

    #[test]
    fn answer_whose_parent_is_an_answer_is_an_orphan() {
        let mut store = CorpusStore::new();
        store.insert_post(question(1, 1)).unwrap();
        store.insert_post(answer(2, 1, 2)).unwrap();
        store.insert_post(answer(3, 2, 3)).unwrap(); // parent is an answer
        store.finalize();
        assert!(store.is_orphan(3));
    }

    #[test]
    fn date_filter_keeps_inclusive_window() {
        let store = sample_store();
        let view = date_filter(&store, date(2), date(3)).unwrap();
        assert_eq!(view.post_count(), 3);
        assert!(view.get_post(1).is_none());
        // The surviving answers lost their question and become orphans.
        assert!(view.is_orphan(2));
        assert!(view.is_orphan(3));
        assert!(view.is_orphan(4));
    }

    #[test]
    fn date_filter_full_window_is_identity() {
        let store = sample_store();
        let view = date_filter(&store, date(1), date(31)).unwrap();
        assert_eq!(view, store);
    }

    #[test]
    fn date_filter_empty_window_keeps_nothing() {
        let store = sample_store();
        let view = date_filter(&store, date(20), date(21)).unwrap();
        assert_eq!(view.post_count(), 0);
        assert_eq!(view.user_count(), 0);
    }

    #[test]
    fn date_filter_rejects_inverted_window() {
        let store = sample_store();
        let err = date_filter(&store, date(5), date(1)).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)), "{err}");
    }
}
