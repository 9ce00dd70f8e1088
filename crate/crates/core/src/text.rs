//! Tweet text handling: XML-safe cleaning, mention extraction and retweet
//! detection.
//!
//! Handles follow the platform grammar: an `@` that is not preceded by a word
//! character, followed by 1 to 15 characters from `[A-Za-z0-9_]`. A longer run
//! still matches; only its first 15 characters form the handle.

use alloc::string::String;
use alloc::vec::Vec;

/// Maximum handle length in characters.
pub const MAX_HANDLE_LEN: usize = 15;

/// Entity references that `clean_text` leaves untouched when it meets an `&`.
const PREDEFINED_ENTITIES: [&str; 5] = ["&amp;", "&lt;", "&gt;", "&quot;", "&apos;"];

#[inline]
fn is_handle_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

#[inline]
fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Characters allowed by the XML 1.0 `Char` production.
#[inline]
pub(crate) fn is_xml_char(c: char) -> bool {
    matches!(c, '\u{9}' | '\u{A}' | '\u{D}' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..)
}

/// True when `handle` is 1..=15 characters of `[A-Za-z0-9_]`.
pub fn is_valid_handle(handle: &str) -> bool {
    !handle.is_empty() && handle.len() <= MAX_HANDLE_LEN && handle.chars().all(is_handle_char)
}

/// Case-folds a handle. Handles are ASCII, so ASCII folding is exact.
pub fn fold_handle(handle: &str) -> String {
    handle.to_ascii_lowercase()
}

/// Cleans tweet text for embedding in XML.
///
/// CR, LF, TAB and any character XML 1.0 cannot carry become a space, runs of
/// spaces collapse to one, and the result is trimmed. The five XML
/// metacharacters are replaced by their predefined entities. An `&` that
/// already starts a predefined entity is kept as is, which makes the
/// function idempotent.
pub fn clean_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + text.len() / 8);
    let mut pending_space = false;
    for (i, c) in text.char_indices() {
        let c = if matches!(c, '\r' | '\n' | '\t') || !is_xml_char(c) { ' ' } else { c };
        if c == ' ' {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        match c {
            '&' => {
                let rest = &text[i..];
                if PREDEFINED_ENTITIES.iter().any(|e| rest.starts_with(e)) {
                    out.push('&');
                } else {
                    out.push_str("&amp;");
                }
            }
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Scans `text` for handle tokens, calling `f` with each in order of
/// appearance (duplicates included).
fn scan_handles<'a>(text: &'a str, mut f: impl FnMut(&'a str)) {
    let bytes = text.as_bytes();
    let mut prev: Option<char> = None;
    let mut i = 0;
    while let Some(c) = text[i..].chars().next() {
        if c == '@' && !prev.is_some_and(is_word_char) {
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && end - start < MAX_HANDLE_LEN && is_handle_char(bytes[end] as char) {
                end += 1;
            }
            if end > start {
                f(&text[start..end]);
                prev = Some(bytes[end - 1] as char);
                i = end;
                continue;
            }
        }
        prev = Some(c);
        i += c.len_utf8();
    }
}

/// Extracts the distinct handles mentioned in raw tweet text.
///
/// Order follows first occurrence. Duplicates are removed case-insensitively,
/// keeping the casing of the first occurrence, and the author's own handle is
/// dropped.
pub fn extract_mentions(text: &str, author_handle: &str) -> Vec<String> {
    let author = fold_handle(author_handle.trim_start_matches('@'));
    let mut seen: Vec<String> = Vec::new();
    let mut out = Vec::new();
    scan_handles(text, |handle| {
        let folded = fold_handle(handle);
        if folded == author || seen.contains(&folded) {
            return;
        }
        seen.push(folded);
        out.push(String::from(handle));
    });
    out
}

/// True iff the text starts with `RT ` immediately followed by a mention token.
pub fn detect_retweet(text: &str) -> bool {
    text.strip_prefix("RT @")
        .and_then(|rest| rest.chars().next())
        .is_some_and(is_handle_char)
}

/// Truncates cleaned text to at most `max_chars` characters without splitting
/// an entity reference.
pub fn truncate_label(text: &str, max_chars: usize) -> String {
    let cut = match text.char_indices().nth(max_chars) {
        None => return String::from(text),
        Some((idx, _)) => idx,
    };
    let mut head = &text[..cut];
    if let Some(amp) = head.rfind('&') {
        if !head[amp..].contains(';') {
            head = &head[..amp];
        }
    }
    String::from(head.trim_end_matches(' '))
}
