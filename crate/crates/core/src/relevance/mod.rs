//! Content-based candidate retrieval, the first stage of the cascade.
//!
//! An index holds one TF-IDF document per answer post and one per user
//! train bag. Matching a query runs in two hops: the best-scoring answer
//! posts nominate their owners, then each owner is re-scored against the
//! query through their aggregated train-side profile. Held-out test bags
//! give a per-candidate term-coverage precision that leads the final
//! candidate ordering, so users whose reserved answers actually cover the
//! query outrank users who merely wrote one similar post.

pub mod profile;
pub mod tfidf;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::corpus::{CorpusStore, StoreManifest};
use crate::error::{Error, Result};
use crate::manifest::{check_hash, sha256_hex, SCHEMA_VERSION};
use crate::num::{real, Real};
use crate::text::{build_bag, clean_text, stopword_hash, BagOfWords};

pub use profile::{build_profiles, split_profile, AnswerDoc, ExpertProfile, SplitProfile};
pub use tfidf::{cosine, DocKind, DocRef, IdfVariant, SparseVec, TfIdfIndex};

/// Parameters fixed at index build time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexParams {
    pub seed: u64,
    /// Fraction of each user's answers held out as test documents.
    pub test_fraction: f64,
    pub variant: IdfVariant,
}

impl Default for IndexParams {
    fn default() -> Self {
        Self {
            seed: 42,
            test_fraction: 0.2,
            variant: IdfVariant::default(),
        }
    }
}

/// The searchable artifact: vector index plus split user profiles, bound
/// to the seed and split fraction they were built with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceIndex<F> {
    pub tfidf: TfIdfIndex<F>,
    pub profiles: BTreeMap<u64, SplitProfile>,
    pub seed: u64,
    pub test_fraction: f64,
}

/// Build the relevance index for a corpus.
///
/// Every answer post is indexed, including orphans and answers without an
/// owner; only owned answers additionally feed a user profile. A corpus
/// with no answers has nothing to rank and is rejected.
pub fn build_index<F: Real>(store: &CorpusStore, params: &IndexParams) -> Result<RelevanceIndex<F>> {
    let posts: Vec<_> = store.posts().collect();
    let cleaned = profile::clean_all(&posts);

    let mut docs: Vec<(DocRef, BagOfWords)> = posts
        .iter()
        .zip(&cleaned)
        .filter(|(post, _)| post.is_answer())
        .map(|(post, tokens)| (DocRef::AnswerPost(post.post_id), build_bag(tokens)))
        .collect();
    if docs.is_empty() {
        return Err(Error::InvalidArgument(
            "corpus contains no answer posts to index".to_string(),
        ));
    }

    let mut profiles: BTreeMap<u64, SplitProfile> = BTreeMap::new();
    for (user_id, raw) in profile::profiles_from_cleaned(&posts, &cleaned) {
        let split = profile::split_profile(raw, params.test_fraction, params.seed)?;
        let split = SplitProfile::from_profile(&split);
        docs.push((DocRef::UserTrain(user_id), split.train_bag.clone()));
        profiles.insert(user_id, split);
    }

    let tfidf = TfIdfIndex::from_documents(docs, params.variant)?;
    Ok(RelevanceIndex {
        tfidf,
        profiles,
        seed: params.seed,
        test_fraction: params.test_fraction,
    })
}

/// Knobs for one matching run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchParams {
    /// How many answer posts nominate owners.
    pub k_posts: usize,
    /// How many candidates survive the relevance cut.
    pub k_users: usize,
    /// Must equal the seed the index was built with.
    pub seed: u64,
}

impl Default for MatchParams {
    fn default() -> Self {
        Self {
            k_posts: 50,
            k_users: 20,
            seed: 42,
        }
    }
}

/// One candidate out of the first stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelevanceCandidate<F> {
    pub user_id: u64,
    /// Cosine between the query and the user's train-bag vector.
    pub relevance_score: F,
    /// Fraction of the query's distinct cleaned terms found in the user's
    /// held-out test bag. Out-of-vocabulary terms still count in the
    /// denominator.
    pub test_precision: F,
    /// 1-based position in this candidate list.
    pub phase1_rank: usize,
}

/// Run first-stage matching for a raw query string.
///
/// A query that cleans to nothing cannot be matched; a query whose terms
/// are all absent from the corpus yields an empty candidate list.
pub fn match_experts<F: Real>(
    query_text: &str,
    index: &RelevanceIndex<F>,
    store: &CorpusStore,
    params: &MatchParams,
) -> Result<Vec<RelevanceCandidate<F>>> {
    if params.seed != index.seed {
        return Err(Error::Integrity(format!(
            "match seed {} differs from the index build seed {}; results would not be \
             reproducible against this index",
            params.seed, index.seed
        )));
    }
    let tokens = clean_text(query_text);
    if tokens.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let query = index.tfidf.query_vector(&tokens);

    // Hop one: best answer posts nominate their owners.
    let top_posts = index.tfidf.top_k(&query, DocKind::AnswerPost, params.k_posts);
    let mut owners: BTreeSet<u64> = BTreeSet::new();
    for (doc, _) in &top_posts {
        let post = store.get_post(doc.id()).ok_or_else(|| {
            Error::Integrity(format!(
                "index references post {} which is absent from the store",
                doc.id()
            ))
        })?;
        if let Some(owner) = post.owner_user_id {
            owners.insert(owner);
        }
    }

    // Hop two: score each owner through their train-bag vector.
    let mut candidates: Vec<(u64, F)> = Vec::new();
    for owner in owners {
        let train_vec = index.tfidf.doc_vector(DocRef::UserTrain(owner)).ok_or_else(|| {
            Error::Integrity(format!(
                "user {owner} owns an indexed answer but has no train document"
            ))
        })?;
        let relevance = cosine(&query, train_vec);
        if relevance > F::zero() {
            candidates.push((owner, relevance));
        }
    }
    candidates.sort_by(|(ua, sa), (ub, sb)| {
        sb.partial_cmp(sa)
            .expect("cosine scores are finite")
            .then_with(|| ua.cmp(ub))
    });
    candidates.truncate(params.k_users);

    // Held-out coverage: how much of the query the user's reserved
    // answers actually touch.
    let distinct_terms: BTreeSet<&String> = tokens.iter().collect();
    let denominator = real::<F>(distinct_terms.len() as f64);
    let mut ranked: Vec<RelevanceCandidate<F>> = candidates
        .into_iter()
        .map(|(user_id, relevance_score)| {
            let profile = &index.profiles[&user_id];
            let hits = distinct_terms
                .iter()
                .filter(|term| profile.test_bag.contains(term))
                .count();
            RelevanceCandidate {
                user_id,
                relevance_score,
                test_precision: real::<F>(hits as f64) / denominator,
                phase1_rank: 0,
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.test_precision
            .partial_cmp(&a.test_precision)
            .expect("precisions are finite")
            .then_with(|| {
                b.relevance_score
                    .partial_cmp(&a.relevance_score)
                    .expect("cosine scores are finite")
            })
            .then_with(|| a.user_id.cmp(&b.user_id))
    });
    for (i, candidate) in ranked.iter_mut().enumerate() {
        candidate.phase1_rank = i + 1;
    }
    Ok(ranked)
}

pub const INDEX_MANIFEST_FILE: &str = "manifest.json";
pub const INDEX_FILE: &str = "index.json";

const KIND: &str = "index";

/// Manifest of a persisted relevance index. The corpus hashes bind the
/// index to the exact store it was built from; the stopword hash pins the
/// text pipeline vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexManifest {
    pub schema_version: u32,
    pub kind: String,
    pub idf_variant: IdfVariant,
    pub seed: u64,
    pub test_fraction: f64,
    pub stopword_sha256: String,
    pub corpus_posts_sha256: String,
    pub corpus_users_sha256: String,
    pub doc_count: usize,
    pub vocabulary_size: usize,
    pub index_file: String,
    pub index_sha256: String,
    pub k_posts_default: usize,
    pub k_users_default: usize,
}

/// Write the index and its manifest into directory `out`.
pub fn save_index<F: Real + Serialize>(
    index: &RelevanceIndex<F>,
    store_manifest: &StoreManifest,
    out: &Path,
) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let index_bytes = serde_json::to_vec(index)
        .map_err(|e| Error::Integrity(format!("index serialization failed: {e}")))?;
    let defaults = MatchParams::default();
    let manifest = IndexManifest {
        schema_version: SCHEMA_VERSION,
        kind: KIND.to_string(),
        idf_variant: index.tfidf.variant(),
        seed: index.seed,
        test_fraction: index.test_fraction,
        stopword_sha256: stopword_hash().to_string(),
        corpus_posts_sha256: store_manifest.posts_sha256.clone(),
        corpus_users_sha256: store_manifest.users_sha256.clone(),
        doc_count: index.tfidf.doc_count(),
        vocabulary_size: index.tfidf.vocabulary_size(),
        index_file: INDEX_FILE.to_string(),
        index_sha256: sha256_hex(&index_bytes),
        k_posts_default: defaults.k_posts,
        k_users_default: defaults.k_users,
    };
    let index_path = out.join(INDEX_FILE);
    fs::write(&index_path, &index_bytes).map_err(|e| Error::io(&index_path, e))?;
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Integrity(format!("manifest serialization failed: {e}")))?;
    let manifest_path = out.join(INDEX_MANIFEST_FILE);
    fs::write(&manifest_path, format!("{manifest_json}\n"))
        .map_err(|e| Error::io(&manifest_path, e))
}

/// Load an index saved by [`save_index`], verifying the content hash and
/// the recorded build parameters.
pub fn load_index<F: Real + DeserializeOwned>(
    dir: &Path,
) -> Result<(RelevanceIndex<F>, IndexManifest)> {
    let manifest_path = dir.join(INDEX_MANIFEST_FILE);
    let manifest_text =
        fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: IndexManifest = serde_json::from_str(&manifest_text)
        .map_err(|e| Error::parse(&manifest_path, e.column() as u64, e.to_string()))?;
    if manifest.schema_version != SCHEMA_VERSION {
        return Err(Error::Integrity(format!(
            "index schema version {} is not the supported {}",
            manifest.schema_version, SCHEMA_VERSION
        )));
    }
    if manifest.kind != KIND {
        return Err(Error::Integrity(format!(
            "artifact at {} is a {:?}, not a relevance index",
            dir.display(),
            manifest.kind
        )));
    }
    check_hash(
        &manifest.stopword_sha256,
        stopword_hash(),
        "stopword list",
    )?;

    let index_path = dir.join(&manifest.index_file);
    let index_bytes = fs::read(&index_path).map_err(|e| Error::io(&index_path, e))?;
    check_hash(&manifest.index_sha256, &sha256_hex(&index_bytes), "index file")?;
    let index: RelevanceIndex<F> = serde_json::from_slice(&index_bytes)
        .map_err(|e| Error::parse(&index_path, e.column() as u64, e.to_string()))?;

    if index.seed != manifest.seed
        || index.test_fraction != manifest.test_fraction
        || index.tfidf.variant() != manifest.idf_variant
        || index.tfidf.doc_count() != manifest.doc_count
        || index.tfidf.vocabulary_size() != manifest.vocabulary_size
    {
        return Err(Error::Integrity(format!(
            "index contents disagree with its manifest (seed {} vs {}, fraction {} vs {}, \
             {} docs vs {}, {} terms vs {})",
            index.seed,
            manifest.seed,
            index.test_fraction,
            manifest.test_fraction,
            index.tfidf.doc_count(),
            manifest.doc_count,
            index.tfidf.vocabulary_size(),
            manifest.vocabulary_size,
        )));
    }
    Ok((index, manifest))
}

/// Check that an index was built from exactly the given persisted store.
pub fn verify_index_matches_store(
    index_manifest: &IndexManifest,
    store_manifest: &StoreManifest,
) -> Result<()> {
    check_hash(
        &index_manifest.corpus_posts_sha256,
        &store_manifest.posts_sha256,
        "corpus posts file",
    )?;
    check_hash(
        &index_manifest.corpus_users_sha256,
        &store_manifest.users_sha256,
        "corpus users file",
    )
}
