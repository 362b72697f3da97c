//! TF-IDF vector space: vocabulary, document frequencies, unit-norm
//! sparse document vectors, and cosine scoring.
//!
//! Weights are w(t,d) = tf(t,d) · idf(t) with raw term counts, then each
//! document vector is L2-normalized, so the dot product of two vectors is
//! their cosine. The default idf is the smoothed ln((1+N)/(1+df)) + 1,
//! which keeps one-document corpora and corpus-universal terms from
//! zeroing out; the raw ln(N/df) form is available as a variant and is
//! recorded in the index manifest either way.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{real, Real};
use crate::text::BagOfWords;

/// Which inverse-document-frequency formula an index was built with.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdfVariant {
    /// ln((1+N)/(1+df)) + 1; never zero.
    #[default]
    Smooth,
    /// ln(N/df); zero for terms present in every document.
    Raw,
}

impl IdfVariant {
    pub fn idf<F: Real>(self, doc_count: usize, df: u32) -> F {
        let n = doc_count as f64;
        let df = f64::from(df);
        let value = match self {
            IdfVariant::Smooth => ((1.0 + n) / (1.0 + df)).ln() + 1.0,
            IdfVariant::Raw => (n / df).ln(),
        };
        real(value)
    }
}

/// Identity of an indexed document. Answer posts and per-user train bags
/// live in the same collection; the variant tags the kind. The derived
/// order (answer posts first, each kind by ascending id) is the
/// deterministic tie-break for equal scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DocRef {
    AnswerPost(u64),
    UserTrain(u64),
}

impl DocRef {
    pub fn kind(self) -> DocKind {
        match self {
            DocRef::AnswerPost(_) => DocKind::AnswerPost,
            DocRef::UserTrain(_) => DocKind::UserTrain,
        }
    }

    pub fn id(self) -> u64 {
        match self {
            DocRef::AnswerPost(id) | DocRef::UserTrain(id) => id,
        }
    }
}

/// Document kind selector for scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocKind {
    AnswerPost,
    UserTrain,
}

/// Sparse vector over term ids, component ids strictly ascending.
/// Normalized to unit Euclidean length on construction; the zero vector
/// (an empty document) has no components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVec<F> {
    components: Vec<(u32, F)>,
}

impl<F: Real> SparseVec<F> {
    /// Build from (term_id, weight) pairs: sorts, drops zero weights, and
    /// L2-normalizes. Pairs must not repeat a term id.
    fn from_weights(mut pairs: Vec<(u32, F)>) -> Self {
        pairs.retain(|&(_, w)| w != F::zero());
        pairs.sort_unstable_by_key(|&(id, _)| id);
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        let norm = pairs
            .iter()
            .map(|&(_, w)| w * w)
            .fold(F::zero(), |acc, x| acc + x)
            .sqrt();
        if norm > F::zero() {
            for (_, w) in &mut pairs {
                *w /= norm;
            }
        }
        Self { components: pairs }
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[(u32, F)] {
        &self.components
    }

    /// Dot product by merge join over the ascending component ids.
    pub fn dot(&self, other: &Self) -> F {
        let (mut i, mut j) = (0, 0);
        let mut sum = F::zero();
        while i < self.components.len() && j < other.components.len() {
            let (a_id, a_w) = self.components[i];
            let (b_id, b_w) = other.components[j];
            match a_id.cmp(&b_id) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += a_w * b_w;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }

    pub fn norm(&self) -> F {
        self.components
            .iter()
            .map(|&(_, w)| w * w)
            .fold(F::zero(), |acc, x| acc + x)
            .sqrt()
    }
}

/// Cosine similarity of two unit-or-zero vectors, clamped into [0, 1]
/// against floating-point overshoot. A zero vector scores 0 against
/// everything.
pub fn cosine<F: Real>(a: &SparseVec<F>, b: &SparseVec<F>) -> F {
    let d = a.dot(b);
    if d < F::zero() {
        F::zero()
    } else if d > F::one() {
        F::one()
    } else {
        d
    }
}

/// Immutable TF-IDF index over a document collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfIndex<F> {
    variant: IdfVariant,
    /// term → term id; ids are assigned in sorted term order.
    vocabulary: BTreeMap<String, u32>,
    /// term id → number of documents containing the term.
    document_frequency: Vec<u32>,
    /// term id → idf under `variant`.
    idf: Vec<F>,
    /// doc id (position) → identity; ascending, so lookup is a binary
    /// search.
    doc_refs: Vec<DocRef>,
    doc_vectors: Vec<SparseVec<F>>,
}

impl<F: Real> TfIdfIndex<F> {
    /// Build an index over `docs`. Documents are canonically ordered by
    /// [`DocRef`]; a repeated ref is an integrity error, an empty
    /// collection an argument error.
    pub fn from_documents(docs: Vec<(DocRef, BagOfWords)>, variant: IdfVariant) -> Result<Self> {
        use rayon::prelude::*;

        if docs.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot build an index over zero documents".to_string(),
            ));
        }
        let mut docs = docs;
        docs.sort_by_key(|(r, _)| *r);
        for pair in docs.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Integrity(format!(
                    "document {:?} appears twice in the index input",
                    pair[0].0
                )));
            }
        }

        let mut terms: BTreeSet<&str> = BTreeSet::new();
        for (_, bag) in &docs {
            terms.extend(bag.terms());
        }
        let vocabulary: BTreeMap<String, u32> = terms
            .into_iter()
            .enumerate()
            .map(|(id, term)| (term.to_string(), id as u32))
            .collect();

        let mut document_frequency = vec![0u32; vocabulary.len()];
        for (_, bag) in &docs {
            for term in bag.terms() {
                document_frequency[vocabulary[term] as usize] += 1;
            }
        }
        let doc_count = docs.len();
        let idf: Vec<F> = document_frequency
            .iter()
            .map(|&df| variant.idf(doc_count, df))
            .collect();

        let doc_vectors: Vec<SparseVec<F>> = docs
            .par_iter()
            .map(|(_, bag)| {
                let weights = bag
                    .iter()
                    .map(|(term, tf)| {
                        let id = vocabulary[term];
                        (id, real::<F>(f64::from(tf)) * idf[id as usize])
                    })
                    .collect();
                SparseVec::from_weights(weights)
            })
            .collect();

        let doc_refs: Vec<DocRef> = docs.iter().map(|(r, _)| *r).collect();
        Ok(Self {
            variant,
            vocabulary,
            document_frequency,
            idf,
            doc_refs,
            doc_vectors,
        })
    }

    pub fn variant(&self) -> IdfVariant {
        self.variant
    }

    pub fn doc_count(&self) -> usize {
        self.doc_refs.len()
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn term_id(&self, term: &str) -> Option<u32> {
        self.vocabulary.get(term).copied()
    }

    pub fn document_frequency_of(&self, term: &str) -> Option<u32> {
        self.term_id(term)
            .map(|id| self.document_frequency[id as usize])
    }

    pub fn doc_refs(&self) -> &[DocRef] {
        &self.doc_refs
    }

    pub fn doc_vector(&self, doc: DocRef) -> Option<&SparseVec<F>> {
        self.doc_refs
            .binary_search(&doc)
            .ok()
            .map(|i| &self.doc_vectors[i])
    }

    /// Turn cleaned query tokens into a unit query vector. Terms outside
    /// the vocabulary are ignored; a fully out-of-vocabulary query yields
    /// the zero vector.
    pub fn query_vector(&self, tokens: &[String]) -> SparseVec<F> {
        let mut tf: BTreeMap<u32, u32> = BTreeMap::new();
        for token in tokens {
            if let Some(id) = self.term_id(token) {
                *tf.entry(id).or_insert(0) += 1;
            }
        }
        let weights = tf
            .into_iter()
            .map(|(id, count)| (id, real::<F>(f64::from(count)) * self.idf[id as usize]))
            .collect();
        SparseVec::from_weights(weights)
    }

    /// Top `k` documents of `kind` by cosine against `query`, strictly
    /// positive scores only, ordered by score descending with the DocRef
    /// order breaking ties.
    pub fn top_k(&self, query: &SparseVec<F>, kind: DocKind, k: usize) -> Vec<(DocRef, F)> {
        use rayon::prelude::*;

        let mut scored: Vec<(DocRef, F)> = self
            .doc_refs
            .par_iter()
            .zip(&self.doc_vectors)
            .filter(|(r, _)| r.kind() == kind)
            .map(|(r, v)| (*r, cosine(query, v)))
            .filter(|&(_, s)| s > F::zero())
            .collect();
        scored.sort_by(|(ra, sa), (rb, sb)| {
            sb.partial_cmp(sa)
                .expect("cosine scores are finite")
                .then_with(|| ra.cmp(rb))
        });
        scored.truncate(k);
        scored
    }
}
