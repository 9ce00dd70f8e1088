//! Tweet documents as JSON key-value records.
//!
//! Field names follow [`RawTweet`]. Collector dumps in the platform's own
//! layout are accepted too: `id`/`id_str` for the tweet id, a nested `user`
//! object (`screen_name`, `id_str`, counts, `time_zone`), `place` as an object
//! with `full_name` and `country`, and `geo.coordinates` as `[lat, lon]`.
//! Unknown fields are ignored.

use chrono::DateTime;
use funnel_core::text::is_valid_handle;
use funnel_core::{Geo, RawTweet};
use serde_json::{Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("record is not a JSON object")]
    NotAnObject,
    #[error("missing required field {0:?}")]
    MissingField(&'static str),
    #[error("malformed created_at: {0}")]
    MalformedTimestamp(String),
    #[error("invalid field {field:?}: {reason}")]
    InvalidField { field: &'static str, reason: String },
}

/// Parses one JSON-lines record.
pub fn parse_line(line: &str) -> Result<RawTweet, ParseError> {
    let value: Value = serde_json::from_str(line)?;
    parse_tweet(&value)
}

/// Serializes a tweet as the flat record `parse_tweet` reads back.
pub fn to_record(tweet: &RawTweet) -> Value {
    serde_json::to_value(tweet).expect("RawTweet serializes to JSON")
}

pub fn parse_tweet(record: &Value) -> Result<RawTweet, ParseError> {
    let obj = record.as_object().ok_or(ParseError::NotAnObject)?;
    let user = obj.get("user").and_then(Value::as_object);

    let tweet_id = first_id(obj, &["tweet_id", "id_str", "id"]).ok_or(ParseError::MissingField("tweet_id"))??;
    if tweet_id.is_empty() {
        return Err(invalid("tweet_id", "empty"));
    }

    let author_handle = match obj.get("author_handle").or_else(|| obj.get("user").filter(|u| u.is_string())) {
        Some(v) => string_field(v, "author_handle")?,
        None => match user.and_then(|u| u.get("screen_name")) {
            Some(v) => string_field(v, "author_handle")?,
            None => return Err(ParseError::MissingField("author_handle")),
        },
    };
    let author_handle = author_handle.trim_start_matches('@').to_string();
    if !is_valid_handle(&author_handle) {
        return Err(invalid("author_handle", format!("{author_handle:?} is not a handle")));
    }

    let author_id = match first_id(obj, &["author_id"]) {
        Some(id) => id?,
        None => user.and_then(|u| first_id(u, &["id_str", "id"])).transpose()?.unwrap_or_default(),
    };

    let text = match obj.get("text").or_else(|| obj.get("full_text")) {
        Some(v) => string_field(v, "text")?,
        None => return Err(ParseError::MissingField("text")),
    };
    if text.len() > 560 {
        return Err(invalid("text", format!("{} bytes exceeds 560", text.len())));
    }

    let created_at = parse_timestamp(obj.get("created_at").ok_or(ParseError::MissingField("created_at"))?)?;

    let count = |name: &'static str| -> Result<u64, ParseError> {
        match obj.get(name).or_else(|| user.and_then(|u| u.get(name))) {
            None | Some(Value::Null) => Ok(0),
            Some(v) => v.as_u64().ok_or_else(|| invalid(name, "expected a non-negative integer")),
        }
    };

    let place_value = obj.get("place").filter(|v| !v.is_null());
    let place = match place_value {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(Value::Object(p)) => p.get("full_name").or_else(|| p.get("name")).and_then(Value::as_str).map(str::to_string),
        Some(_) => return Err(invalid("place", "expected a string or object")),
    };
    let country = optional_string(obj, "country")?
        .or_else(|| place_value.and_then(|p| p.get("country")).and_then(Value::as_str).map(str::to_string));
    let time_zone = match optional_string(obj, "time_zone")? {
        Some(tz) => Some(tz),
        None => match user {
            Some(u) => optional_string(u, "time_zone")?,
            None => None,
        },
    };

    Ok(RawTweet {
        tweet_id,
        author_handle,
        author_id,
        text,
        created_at,
        followers_count: count("followers_count")?,
        friends_count: count("friends_count")?,
        favourites_count: count("favourites_count")?,
        statuses_count: count("statuses_count")?,
        time_zone,
        geo: parse_geo(obj.get("geo"))?,
        place,
        country,
    })
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ParseError {
    ParseError::InvalidField { field, reason: reason.into() }
}

fn string_field(v: &Value, field: &'static str) -> Result<String, ParseError> {
    v.as_str().map(str::to_string).ok_or_else(|| invalid(field, "expected a string"))
}

fn optional_string(obj: &Map<String, Value>, field: &'static str) -> Result<Option<String>, ParseError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => string_field(v, field).map(Some),
    }
}

/// First present id among `names`; numbers are rendered in decimal.
fn first_id(obj: &Map<String, Value>, names: &[&'static str]) -> Option<Result<String, ParseError>> {
    names.iter().find_map(|&name| {
        obj.get(name).filter(|v| !v.is_null()).map(|v| match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) if n.is_u64() || n.is_i64() => Ok(n.to_string()),
            _ => Err(invalid(name, "expected a string or integer")),
        })
    })
}

/// Seconds since the epoch from an integer, a float (truncated), a numeric
/// string, RFC 3339, or the platform's `Sun Apr 20 12:00:00 +0000 2014` form.
pub fn parse_timestamp(v: &Value) -> Result<i64, ParseError> {
    let malformed = || ParseError::MalformedTimestamp(v.to_string());
    let secs = match v {
        Value::Number(n) => match n.as_i64() {
            Some(i) => i,
            None => {
                let f = n.as_f64().ok_or_else(malformed)?;
                if !f.is_finite() || f >= i64::MAX as f64 {
                    return Err(malformed());
                }
                f.trunc() as i64
            }
        },
        Value::String(s) => {
            let s = s.trim();
            if let Ok(i) = s.parse::<i64>() {
                i
            } else if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
                dt.timestamp()
            } else if let Ok(dt) = DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y") {
                dt.timestamp()
            } else {
                return Err(malformed());
            }
        }
        _ => return Err(malformed()),
    };
    if secs < 0 {
        return Err(malformed());
    }
    Ok(secs)
}

fn parse_geo(v: Option<&Value>) -> Result<Option<Geo>, ParseError> {
    let Some(v) = v.filter(|v| !v.is_null()) else { return Ok(None) };
    let coord = |x: Option<&Value>| x.and_then(Value::as_f64).filter(|f| f.is_finite());
    let geo = if let Some(c) = v.get("coordinates").and_then(Value::as_array) {
        coord(c.first()).zip(coord(c.get(1)))
    } else {
        coord(v.get("lat")).zip(coord(v.get("lon")))
    };
    match geo {
        Some((lat, lon)) if (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon) => Ok(Some(Geo { lat, lon })),
        _ => Err(invalid("geo", "expected {lat, lon} or coordinates [lat, lon] in range")),
    }
}
