//! Embedded English stopword list (the classic SMART list).
//!
//! The list ships inside the binary so that every build filters identically;
//! its content hash is recorded in index manifests, which lets artifact
//! loading detect an index built against a different list.

use std::collections::HashSet;
use std::sync::OnceLock;

const STOPWORDS_RAW: &str = include_str!("../../resources/stopwords_en.txt");

fn stopword_set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS_RAW
            .lines()
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .collect()
    })
}

/// True if `word` (already lowercased) is on the shipped stopword list.
pub fn is_stopword(word: &str) -> bool {
    stopword_set().contains(word)
}

/// Number of distinct words on the shipped list.
pub fn stopword_count() -> usize {
    stopword_set().len()
}

/// Hex SHA-256 of the shipped list file, pinned into index manifests.
pub fn stopword_hash() -> &'static str {
    static HASH: OnceLock<String> = OnceLock::new();
    HASH.get_or_init(|| crate::manifest::sha256_hex(STOPWORDS_RAW.as_bytes()))
}
