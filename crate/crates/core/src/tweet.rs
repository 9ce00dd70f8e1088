use alloc::string::String;
use alloc::vec::Vec;

use crate::text::{clean_text, detect_retweet, extract_mentions, truncate_label};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// A geographic point in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Geo {
    pub lat: f64,
    pub lon: f64,
}

/// One social-media message as it arrives from a collector.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RawTweet {
    pub tweet_id: String,
    /// Handle without the leading `@`.
    pub author_handle: String,
    pub author_id: String,
    pub text: String,
    /// Seconds since the Unix epoch.
    pub created_at: i64,
    pub followers_count: u64,
    pub friends_count: u64,
    pub favourites_count: u64,
    pub statuses_count: u64,
    pub time_zone: Option<String>,
    pub geo: Option<Geo>,
    pub place: Option<String>,
    pub country: Option<String>,
}

impl RawTweet {
    /// A tweet with only the required fields set.
    pub fn new(tweet_id: impl Into<String>, author_handle: impl Into<String>, text: impl Into<String>, created_at: i64) -> Self {
        RawTweet {
            tweet_id: tweet_id.into(),
            author_handle: author_handle.into(),
            author_id: String::new(),
            text: text.into(),
            created_at,
            followers_count: 0,
            friends_count: 0,
            favourites_count: 0,
            statuses_count: 0,
            time_zone: None,
            geo: None,
            place: None,
            country: None,
        }
    }
}

/// A tweet after cleaning: XML-safe text plus extracted interaction structure.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CleanTweet {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub tweet: RawTweet,
    pub mentions: Vec<String>,
    pub is_retweet: bool,
}

impl CleanTweet {
    /// Extracts mentions and the retweet flag from the raw text, then replaces
    /// the text with its cleaned form.
    pub fn from_raw(mut raw: RawTweet) -> Self {
        let mentions = extract_mentions(&raw.text, &raw.author_handle);
        let is_retweet = detect_retweet(&raw.text);
        raw.text = clean_text(&raw.text);
        CleanTweet { tweet: raw, mentions, is_retweet }
    }

    pub fn tweet_id(&self) -> &str {
        &self.tweet.tweet_id
    }

    pub fn author_handle(&self) -> &str {
        &self.tweet.author_handle
    }

    pub fn created_at(&self) -> i64 {
        self.tweet.created_at
    }

    /// Display label for the tweet node: cleaned text, at most 120 characters.
    pub fn label(&self) -> String {
        truncate_label(&self.tweet.text, crate::graph::TWEET_LABEL_CHARS)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopicError {
    #[error("topic has no keywords")]
    EmptyKeywordList,
    #[error("invalid topic name {0:?}: expected [A-Za-z0-9_-]+")]
    InvalidName(String),
    #[error("blank keyword")]
    BlankKeyword,
}

/// A named keyword filter; the name doubles as the collection identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Topic {
    pub name: String,
    pub keywords: Vec<String>,
}

impl Topic {
    pub fn new<I, S>(name: impl Into<String>, keywords: I) -> Result<Self, TopicError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        if !is_valid_topic_name(&name) {
            return Err(TopicError::InvalidName(name));
        }
        let keywords: Vec<String> = keywords.into_iter().map(Into::into).collect();
        if keywords.is_empty() {
            return Err(TopicError::EmptyKeywordList);
        }
        if keywords.iter().any(|k| k.trim_start_matches('#').trim().is_empty()) {
            return Err(TopicError::BlankKeyword);
        }
        Ok(Topic { name, keywords })
    }
}

pub fn is_valid_topic_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// True iff any keyword occurs case-insensitively in the tweet text.
///
/// Matching is by substring, so `MH370` matches `#MH370`; a leading `#` on the
/// keyword itself is ignored.
pub fn topic_match(tweet: &RawTweet, topic: &Topic) -> Result<bool, TopicError> {
    if topic.keywords.is_empty() {
        return Err(TopicError::EmptyKeywordList);
    }
    let text = tweet.text.to_lowercase();
    Ok(topic
        .keywords
        .iter()
        .map(|k| k.trim_start_matches('#').to_lowercase())
        .any(|k| text.contains(k.as_str())))
}
