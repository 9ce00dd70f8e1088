//! Seeded synthetic tweet corpora.
#![allow(dead_code)]

use funnel_core::{CleanTweet, RawTweet};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIX_WEEKS: i64 = 42 * 24 * 3600;
/// Corpus epoch: 2014-03-08T00:00:00Z.
pub const T0: i64 = 1_394_236_800;

const WORDS: &[&str] = &["search", "plane", "ocean", "pray", "news", "<debris>", "\"update\"", "R&D", "it's", "\ttab", "line\nbreak"];

/// `count` tweets spread over `span` seconds from `T0`. Roughly two thirds
/// mention the topic keyword; some are retweets.
pub fn corpus(seed: u64, count: usize, span: i64) -> Vec<RawTweet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users: Vec<String> = (0..60).map(|i| if i % 7 == 0 { format!("User_{i}") } else { format!("user{i}") }).collect();
    (0..count)
        .map(|i| {
            let author = users.choose(&mut rng).unwrap();
            let mut parts: Vec<String> = Vec::new();
            if rng.random_bool(0.15) {
                parts.push(format!("RT @{}:", users.choose(&mut rng).unwrap()));
            }
            for _ in 0..rng.random_range(0..4) {
                parts.push(format!("@{}", users.choose(&mut rng).unwrap()));
            }
            for _ in 0..rng.random_range(1..5) {
                parts.push(WORDS.choose(&mut rng).unwrap().to_string());
            }
            if rng.random_bool(0.66) {
                parts.push(["#MH370", "#mh370", "mh370"][rng.random_range(0..3)].to_string());
            }
            let at = T0 + rng.random_range(0..span);
            RawTweet::new(format!("{}", 4_000_000 + i), author.clone(), parts.join(" "), at)
        })
        .collect()
}

pub fn clean(tweets: &[RawTweet]) -> Vec<CleanTweet> {
    tweets.iter().cloned().map(CleanTweet::from_raw).collect()
}

pub fn jsonl(tweets: &[RawTweet]) -> String {
    let mut out = String::new();
    for t in tweets {
        out.push_str(&funnel::record::to_record(t).to_string());
        out.push('\n');
    }
    out
}
