//! Tweet cleaning: links, digits and non-letter characters are removed and
//! the remaining text is lowercased.
//!
//! Rules run per token, in this order:
//!
//! 1. drop the token if it looks like a link (`http://` or `https://` or
//!    `www.` prefix, or a `t.co/` substring; ASCII case-insensitive),
//! 2. delete every decimal digit (`\p{Nd}`), so `370ko` becomes `ko`,
//! 3. delete every character that is neither a letter (`\p{L}`) nor
//!    whitespace, so `@AmitShah` becomes `AmitShah`,
//! 4. lowercase.
//!
//! Surviving pieces are joined with single spaces. Lowercasing may expand a
//! letter into a letter plus a combining mark (`İ`); such marks are filtered
//! again so the output alphabet stays letters-only.

use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use crate::corpus::{Corpus, Tweet};

static DIGITS: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\p{Nd}").unwrap());
static NOT_LETTER_OR_SPACE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[^\p{L}\s]").unwrap());
static NOT_LETTER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\P{L}").unwrap());

/// Cleaned tweet text: lowercase letters separated by single ASCII spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CleanText {
    value: String,
    emptied: bool,
}

impl CleanText {
    /// Accepts `s` only if it already satisfies the cleaned-text invariants.
    pub fn from_clean(s: &str) -> Option<Self> {
        if is_clean(s) {
            Some(CleanText {
                value: s.to_string(),
                emptied: s.is_empty(),
            })
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.value
    }

    /// True when cleaning removed all content.
    pub fn emptied(&self) -> bool {
        self.emptied
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.value.split(' ').filter(|w| !w.is_empty())
    }
}

impl AsRef<str> for CleanText {
    fn as_ref(&self) -> &str {
        &self.value
    }
}

impl std::fmt::Display for CleanText {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.value)
    }
}

/// Checks the output alphabet: letters and single inner spaces, lowercase.
pub fn is_clean(s: &str) -> bool {
    if s.is_empty() {
        return true;
    }
    s.split(' ')
        .all(|w| !w.is_empty() && !NOT_LETTER.is_match(w) && w.to_lowercase() == w)
}

pub fn is_link(surface: &str) -> bool {
    let lower = surface.to_ascii_lowercase();
    lower.starts_with("http://")
        || lower.starts_with("https://")
        || lower.starts_with("www.")
        || lower.contains("t.co/")
}

fn clean_piece(piece: &str) -> String {
    let lowered = piece.to_lowercase();
    match NOT_LETTER.find(&lowered) {
        None => lowered,
        Some(_) => {
            let stripped = NOT_LETTER.replace_all(&lowered, "");
            // re-lowercase in case stripping exposed a different final-sigma context
            stripped.to_lowercase()
        }
    }
}

/// Cleans a sequence of token surfaces.
pub fn normalize_tokens<'a, I>(surfaces: I) -> CleanText
where
    I: IntoIterator<Item = &'a str>,
{
    let mut words: Vec<String> = Vec::new();
    for surface in surfaces {
        if is_link(surface) {
            continue;
        }
        let no_digits = DIGITS.replace_all(surface, "");
        let letters = NOT_LETTER_OR_SPACE.replace_all(&no_digits, "");
        words.extend(
            letters
                .split_whitespace()
                .map(clean_piece)
                .filter(|w| !w.is_empty()),
        );
    }
    let value = words.join(" ");
    let emptied = value.is_empty();
    CleanText { value, emptied }
}

/// Cleans free text, splitting it into tokens on whitespace first.
pub fn normalize_text(text: &str) -> CleanText {
    normalize_tokens(text.split_whitespace())
}

pub fn normalize(tweet: &Tweet) -> CleanText {
    normalize_tokens(tweet.surfaces())
}

/// One cleaned text per tweet, in corpus order. Tweets that clean to the
/// empty string are kept.
pub fn normalize_corpus(corpus: &Corpus) -> Vec<(String, CleanText)> {
    corpus
        .iter()
        .map(|t| (t.uid().to_string(), normalize(t)))
        .collect()
}

/// Renders `uid<TAB>clean_text` rows under a `uid\tclean_text` header.
pub fn write_clean_tsv(rows: &[(String, CleanText)]) -> String {
    let mut out = String::from("uid\tclean_text\n");
    for (uid, text) in rows {
        out.push_str(uid);
        out.push('\t');
        out.push_str(text.as_str());
        out.push('\n');
    }
    out
}
