//! Expert recommendation for Q&A communities.
//!
//! The engine ranks candidate answerers for a free-text question in three
//! cascaded phases: lexical relevance over what users have answered before
//! (TF-IDF vector space), a link-analysis expertise score over the
//! asker→answerer graph, and a reputation signal fused with the link
//! score. Everything is deterministic: the same inputs and seed produce
//! byte-identical artifacts and rankings.
//!
//! Numeric code is generic over the floating-point scalar via [`num::Real`]
//! (`f32` or `f64`); the type aliases at the crate root fix `f64` for the
//! common case.

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod graph;
pub mod manifest;
pub mod num;
pub mod pipeline;
pub mod relevance;
pub mod reputation;
pub mod synthetic;
pub mod text;

pub use error::{Error, Result};

/// Double-precision instantiations for callers that don't need the
/// generic forms.
pub type RelevanceIndexF64 = relevance::RelevanceIndex<f64>;
pub type TfIdfIndexF64 = relevance::TfIdfIndex<f64>;
pub type ExpertiseRankF64 = graph::ExpertiseRank<f64>;
pub type RankedExpertListF64 = pipeline::RankedExpertList<f64>;
