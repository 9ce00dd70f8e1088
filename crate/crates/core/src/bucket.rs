//! Fixed-width, epoch-aligned activity buckets.
//!
//! A tweet at `t` lands in the bucket starting at `floor(t / width) * width`.
//! Buckets tile the timeline as half-open windows and empty ones are omitted.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::text::fold_handle;
use crate::tweet::CleanTweet;

/// Five hours, in seconds.
pub const DEFAULT_BUCKET_WIDTH: i64 = 5 * 3600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum BucketError {
    #[error("bucket width must be positive, got {0}")]
    InvalidWidth(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActivityBucket {
    pub start: i64,
    pub tweet_count: u64,
    pub unique_actor_count: u64,
    /// Mention occurrences, counted before edge aggregation.
    pub mention_edge_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeBucketSeries {
    pub bucket_width: i64,
    pub buckets: Vec<ActivityBucket>,
}

impl TimeBucketSeries {
    pub fn total_tweets(&self) -> u64 {
        self.buckets.iter().map(|b| b.tweet_count).sum()
    }
}

/// Start of the bucket holding `t`.
pub fn bucket_start(t: i64, width: i64) -> Result<i64, BucketError> {
    if width <= 0 {
        return Err(BucketError::InvalidWidth(width));
    }
    Ok(t.div_euclid(width) * width)
}

#[derive(Default)]
struct Accumulator {
    tweets: u64,
    actors: BTreeSet<String>,
    mentions: u64,
}

pub fn bucket_tweets<'a, I>(tweets: I, width: i64) -> Result<TimeBucketSeries, BucketError>
where
    I: IntoIterator<Item = &'a CleanTweet>,
{
    bucket_start(0, width)?;
    let mut acc: BTreeMap<i64, Accumulator> = BTreeMap::new();
    for tweet in tweets {
        let slot = acc.entry(tweet.created_at().div_euclid(width) * width).or_default();
        slot.tweets += 1;
        slot.mentions += tweet.mentions.len() as u64;
        slot.actors.insert(fold_handle(tweet.author_handle().trim_start_matches('@')));
    }
    let buckets = acc
        .into_iter()
        .map(|(start, a)| ActivityBucket {
            start,
            tweet_count: a.tweets,
            unique_actor_count: a.actors.len() as u64,
            mention_edge_count: a.mentions,
        })
        .collect();
    Ok(TimeBucketSeries { bucket_width: width, buckets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tweet::RawTweet;
    use alloc::vec;

    fn at(id: &str, author: &str, text: &str, t: i64) -> CleanTweet {
        CleanTweet::from_raw(RawTweet::new(id, author, text, t))
    }

    #[test]
    fn boundary_falls_in_next_bucket() {
        let tweets = vec![at("1", "a", "", 0), at("2", "b", "", 17_999), at("3", "a", "", 18_000)];
        let s = bucket_tweets(&tweets, DEFAULT_BUCKET_WIDTH).unwrap();
        let starts: Vec<_> = s.buckets.iter().map(|b| (b.start, b.tweet_count)).collect();
        assert_eq!(starts, vec![(0, 2), (18_000, 1)]);
    }

    #[test]
    fn counts_actors_and_mentions() {
        let tweets = vec![at("1", "A", "@x @y", 5), at("2", "a", "@x", 6), at("3", "b", "", 7)];
        let s = bucket_tweets(&tweets, 10).unwrap();
        assert_eq!(
            s.buckets,
            vec![ActivityBucket { start: 0, tweet_count: 3, unique_actor_count: 2, mention_edge_count: 3 }]
        );
    }

    #[test]
    fn empty_and_invalid() {
        assert!(bucket_tweets(&[], 10).unwrap().buckets.is_empty());
        assert_eq!(bucket_tweets(&[], 0), Err(BucketError::InvalidWidth(0)));
        assert_eq!(bucket_start(-1, 10), Ok(-10));
    }
}
