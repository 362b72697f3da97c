//! Generated communities with known ground truth, for tests and demos.
//!
//! [`planted_community`] builds a corpus with three disjoint topics. Each
//! topic has one planted expert who writes the overwhelming majority of
//! its answer text, answers many distinct askers, and scores well — so a
//! correct cascade must rank them first for on-topic queries on every
//! signal: relevance, link-based prestige, and reputation. Noise users
//! answer a little on each topic with low scores. [`topic_query`] samples
//! reproducible queries from a topic's vocabulary.

use chrono::{TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CommunityUser, CorpusStore, Post, PostType};

/// Number of planted topics.
pub const TOPIC_COUNT: usize = 3;

const QUESTIONS_PER_TOPIC: u64 = 8;
const NOISE_USERS_PER_TOPIC: u64 = 2;

/// The twelve content words of a topic. Vocabularies are disjoint even
/// after stemming, so queries never leak across topics.
pub fn topic_vocabulary(topic: usize) -> &'static [&'static str] {
    const VOCAB: [[&str; 12]; TOPIC_COUNT] = [
        [
            "compiler", "parser", "grammar", "token", "lexer", "register",
            "optimizer", "assembler", "linker", "bytecode", "syntax", "macro",
        ],
        [
            "database", "transaction", "shard", "replica", "schema", "cursor",
            "join", "vacuum", "checkpoint", "btree", "rollback", "tablespace",
        ],
        [
            "socket", "packet", "router", "firewall", "latency", "bandwidth",
            "protocol", "ethernet", "gateway", "subnet", "congestion", "handshake",
        ],
    ];
    &VOCAB[topic]
}

/// The planted expert for a topic.
pub fn expert_user_id(topic: usize) -> u64 {
    assert!(topic < TOPIC_COUNT, "no topic {topic}");
    1000 + topic as u64
}

fn asker_id(topic: u64, i: u64) -> u64 {
    100 + 10 * topic + i
}

fn noise_user_id(topic: u64, j: u64) -> u64 {
    2000 + 10 * topic + j
}

/// Build the planted corpus. The layout is fixed — no randomness — so
/// every caller sees the identical store.
///
/// Per topic: eight questions from eight distinct askers, each answered
/// by the expert with the full topic vocabulary at score 25, plus two
/// noise users who each write two thin answers (one topic word apiece)
/// at score 2. The expert therefore owns well over 80% of the topic's
/// answer text, answers the most distinct askers, and is the only user
/// whose answers clear the acceptance threshold.
pub fn planted_community() -> CorpusStore {
    let mut store = CorpusStore::new();
    for topic in 0..TOPIC_COUNT as u64 {
        let vocab = topic_vocabulary(topic as usize);
        let full_text = vocab.join(" ");
        let expert = expert_user_id(topic as usize);
        for i in 0..QUESTIONS_PER_TOPIC {
            let question_id = 10_000 + 100 * topic + i;
            let body = format!(
                "how do i deal with the {} and the {} here",
                vocab[i as usize % vocab.len()],
                vocab[(i as usize + 1) % vocab.len()],
            );
            store
                .insert_post(Post {
                    post_id: question_id,
                    post_type: PostType::Question,
                    owner_user_id: Some(asker_id(topic, i)),
                    parent_id: None,
                    accepted_answer_id: Some(20_000 + 100 * topic + i),
                    creation_date: Utc
                        .with_ymd_and_hms(2009, 1, 1 + i as u32, 9, 0, 0)
                        .unwrap(),
                    score: 3,
                    view_count: 150 + 40 * i,
                    favorite_count: 1 + i % 3,
                    body_raw: body,
                })
                .expect("fixed ids never collide");
            store
                .insert_post(Post {
                    post_id: 20_000 + 100 * topic + i,
                    post_type: PostType::Answer,
                    owner_user_id: Some(expert),
                    parent_id: Some(question_id),
                    accepted_answer_id: None,
                    creation_date: Utc
                        .with_ymd_and_hms(2009, 1, 1 + i as u32, 14, 0, 0)
                        .unwrap(),
                    score: 25,
                    view_count: 0,
                    favorite_count: 0,
                    body_raw: format!("you want the {full_text} explained with an example"),
                })
                .expect("fixed ids never collide");
        }
        for j in 0..NOISE_USERS_PER_TOPIC {
            // Two thin answers per noise user: enough history to stay a
            // candidate after the train/test split, not enough to rank.
            for k in 0..2u64 {
                let i = (2 * j + k) % QUESTIONS_PER_TOPIC;
                store
                    .insert_post(Post {
                        post_id: 30_000 + 100 * topic + 10 * j + k,
                        post_type: PostType::Answer,
                        owner_user_id: Some(noise_user_id(topic, j)),
                        parent_id: Some(10_000 + 100 * topic + i),
                        accepted_answer_id: None,
                        creation_date: Utc
                            .with_ymd_and_hms(2009, 1, 1 + i as u32, 16, 0, 0)
                            .unwrap(),
                        score: 2,
                        view_count: 0,
                        favorite_count: 0,
                        body_raw: format!(
                            "maybe try the {} with some sample code",
                            vocab[(j + k) as usize % vocab.len()],
                        ),
                    })
                    .expect("fixed ids never collide");
            }
        }
        store
            .insert_user(CommunityUser {
                user_id: expert,
                display_name: format!("expert-{topic}"),
                dump_reputation: 5000 + 100 * topic,
            })
            .expect("fixed ids never collide");
        for j in 0..NOISE_USERS_PER_TOPIC {
            store
                .insert_user(CommunityUser {
                    user_id: noise_user_id(topic, j),
                    display_name: format!("noise-{topic}-{j}"),
                    dump_reputation: 10,
                })
                .expect("fixed ids never collide");
        }
    }
    store.finalize();
    store
}

/// Sample a reproducible 10–20 word query from a topic's vocabulary.
/// Terms are drawn with replacement, so repeats are possible.
pub fn topic_query(topic: usize, seed: u64) -> String {
    assert!(topic < TOPIC_COUNT, "no topic {topic}");
    let vocab = topic_vocabulary(topic);
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (topic as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let len = rng.gen_range(10..=20);
    let words: Vec<&str> = (0..len)
        .map(|_| vocab[rng.gen_range(0..vocab.len())])
        .collect();
    words.join(" ")
}
