//! Text cleaning pipeline: raw post HTML in, stemmed tokens out.
//!
//! Cleaning applies four steps in order:
//! 1. contents of `<code>` / `<pre>` elements are discarded;
//! 2. remaining tags are stripped and entities decoded;
//! 3. the text is lowercased and tokenized on non-alphanumeric boundaries,
//!    dropping stopwords, single-character tokens, and pure-number tokens;
//! 4. tokens are Porter-stemmed.
//!
//! Stemming is applied until it reaches a fixed point, and the step-3
//! filters are re-applied to the stemmed output. Both make the pipeline
//! idempotent: cleaning its own (space-joined) output changes nothing.
//! A single stemmer pass does not have that property — "jealously" stems
//! to "jealous", which itself stems further to "jealou" — and stemming can
//! land on a stopword ("cans" becomes "can") or a single character
//! ("ies" becomes "i").

pub mod html;
pub mod porter;
pub mod stopwords;

pub use stopwords::{is_stopword, stopword_hash};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Ordered, cleaned, stemmed tokens of one document.
pub type TokenList = Vec<String>;

/// Run the full cleaning pipeline over a raw HTML post body.
pub fn clean_text(body_raw: &str) -> TokenList {
    let without_code = html::strip_code_blocks(body_raw);
    let text = html::strip_tags_and_decode(&without_code);
    raw_tokens(&text)
        .into_iter()
        .filter(|t| keep_token(t))
        .map(|t| stem_stable(&t))
        .filter(|t| keep_token(t))
        .collect()
}

/// Lowercase and split on non-alphanumeric boundaries; no filtering yet.
fn raw_tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Token filter: at least two characters, not a pure number, not a
/// stopword.
fn keep_token(token: &str) -> bool {
    if token.chars().nth(1).is_none() {
        return false;
    }
    if token.chars().all(char::is_numeric) {
        return false;
    }
    !stopwords::is_stopword(token)
}

/// Porter-stem until the output stops changing. Terminates because a pass
/// never lengthens the word and the few length-preserving rewrites are
/// one-way; the loop bound is a backstop only.
fn stem_stable(word: &str) -> String {
    let mut current = porter::stem(word);
    for _ in 0..32 {
        let next = porter::stem(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// Term multiset of a document or a user profile.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BagOfWords {
    term_counts: BTreeMap<String, u32>,
}

impl BagOfWords {
    pub fn new() -> Self {
        Self::default()
    }

    /// Count one occurrence of `term`.
    pub fn add(&mut self, term: &str) {
        *self.term_counts.entry(term.to_string()).or_insert(0) += 1;
    }

    /// Add every count from `other` into `self`.
    pub fn merge(&mut self, other: &BagOfWords) {
        for (term, count) in &other.term_counts {
            *self.term_counts.entry(term.clone()).or_insert(0) += count;
        }
    }

    pub fn count(&self, term: &str) -> u32 {
        self.term_counts.get(term).copied().unwrap_or(0)
    }

    pub fn contains(&self, term: &str) -> bool {
        self.term_counts.contains_key(term)
    }

    pub fn distinct_terms(&self) -> usize {
        self.term_counts.len()
    }

    pub fn total_count(&self) -> u64 {
        self.term_counts.values().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.term_counts.is_empty()
    }

    /// Terms in sorted order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.term_counts.keys().map(String::as_str)
    }

    /// (term, count) pairs in sorted term order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.term_counts.iter().map(|(t, c)| (t.as_str(), *c))
    }
}

/// Build a bag from a token list.
pub fn build_bag(tokens: &[String]) -> BagOfWords {
    let mut bag = BagOfWords::new();
    for token in tokens {
        bag.add(token);
    }
    bag
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn empty_input_yields_no_tokens() {
        assert_eq!(clean_text(""), Vec::<String>::new());
    }

    #[test]
    fn all_code_input_yields_no_tokens() {
        assert_eq!(clean_text("<pre>int x = 1;</pre>"), Vec::<String>::new());
    }

    #[test]
    fn markup_stopwords_and_code_are_removed() {
        assert_eq!(
            clean_text("<p>The <code>x=1</code> loops quickly</p>"),
            toks(&["loop", "quickli"])
        );
    }

    #[test]
    fn stopwords_are_dropped_before_stemming() {
        assert_eq!(clean_text("The THE the is a an"), Vec::<String>::new());
    }

    #[test]
    fn numbers_and_single_characters_are_dropped() {
        assert_eq!(clean_text("In 2009 the 42 users posted"), toks(&["user", "post"]));
        assert_eq!(clean_text("a b c 7 9"), Vec::<String>::new());
    }

    #[test]
    fn alphanumeric_identifiers_survive() {
        assert_eq!(clean_text("x86 and c99"), toks(&["x86", "c99"]));
    }

    #[test]
    fn entities_decode_before_tokenization() {
        assert_eq!(clean_text("loops &amp; more loops"), toks(&["loop", "loop"]));
    }

    #[test]
    fn stems_that_become_stopwords_are_dropped() {
        // "cans" stems to "can", which is on the stopword list.
        assert_eq!(clean_text("cans"), Vec::<String>::new());
    }

    #[test]
    fn stems_that_become_single_characters_are_dropped() {
        // "ies" stems to "i".
        assert_eq!(clean_text("ies"), Vec::<String>::new());
    }

    #[test]
    fn stemming_runs_to_a_fixed_point() {
        // One Porter pass gives "jealous", a second gives "jealou".
        assert_eq!(clean_text("jealously"), toks(&["jealou"]));
        assert_eq!(clean_text("jealous"), toks(&["jealou"]));
    }

    #[test]
    fn cleaning_is_idempotent_on_tricky_words() {
        for input in [
            "jealously cans ties abilities",
            "dying generalization iteration",
            "The <code>x=1</code> loops quickly",
        ] {
            let once = clean_text(input);
            let twice = clean_text(&once.join(" "));
            assert_eq!(once, twice, "input {input:?}");
        }
    }

    #[test]
    fn build_bag_counts_multiplicities() {
        assert!(build_bag(&[]).is_empty());
        let bag = build_bag(&toks(&["a", "b", "a"]));
        assert_eq!(bag.count("a"), 2);
        assert_eq!(bag.count("b"), 1);
        assert_eq!(bag.count("c"), 0);
        assert_eq!(bag.distinct_terms(), 2);
        assert_eq!(bag.total_count(), 3);
    }

    #[test]
    fn bag_of_fixture_post() {
        let bag = build_bag(&clean_text("<p>The <code>x=1</code> loops quickly</p>"));
        assert_eq!(bag.count("loop"), 1);
        assert_eq!(bag.count("quickli"), 1);
        assert_eq!(bag.distinct_terms(), 2);
    }

    #[test]
    fn bag_merge_adds_counts() {
        let mut left = build_bag(&toks(&["x", "y"]));
        let right = build_bag(&toks(&["y", "z"]));
        left.merge(&right);
        assert_eq!(left.count("x"), 1);
        assert_eq!(left.count("y"), 2);
        assert_eq!(left.count("z"), 1);
        assert_eq!(left.total_count(), 4);
    }

    proptest! {
        #[test]
        fn cleaning_is_idempotent(chars in prop::collection::vec(any::<char>(), 0..200)) {
            let input: String = chars.into_iter().collect();
            let once = clean_text(&input);
            let twice = clean_text(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn clean_tokens_are_well_formed(chars in prop::collection::vec(any::<char>(), 0..200)) {
            let input: String = chars.into_iter().collect();
            for token in clean_text(&input) {
                prop_assert!(token.chars().nth(1).is_some());
                prop_assert!(!token.contains(['<', '>', '&']));
                prop_assert!(!stopwords::is_stopword(&token));
                prop_assert!(!token.chars().all(char::is_numeric));
            }
        }

        #[test]
        fn code_blocks_dominate(
            // The content alphabet excludes '<' so the block cannot contain
            // a literal close tag (which would legitimately end it early).
            body in "[a-zA-Z0-9 .,;:!?'\"()\\[\\]{}=+*/%-]{0,80}"
        ) {
            let html = format!("<code>{body}</code>");
            prop_assert_eq!(clean_text(&html), Vec::<String>::new());
        }

        #[test]
        fn bag_total_matches_token_count(tokens in prop::collection::vec("[a-z]{1,8}", 0..50)) {
            let bag = build_bag(&tokens);
            prop_assert_eq!(bag.total_count(), tokens.len() as u64);
            for (_, count) in bag.iter() {
                prop_assert!(count >= 1);
            }
        }
    }
}
