//! Line-oriented tweet corpus in the SentiMix CONLL layout.
//!
//! A file is a sequence of blocks separated by blank lines. Each block opens
//! with a header line and is followed by one line per token:
//!
//! ```text
//! meta<TAB>uid<TAB>label      labeled tweet
//! meta<TAB>uid                unlabeled tweet
//! surface<TAB>tag             tag is Eng, Hin or O
//! ```
//!
//! The header is recognised only at the start of a block, so a token whose
//! surface happens to be `meta` is read as a token. Trailing blank lines are
//! ignored and a final block need not be followed by a blank line. A single
//! trailing `\r` per line is tolerated.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Three-way sentiment label. The discriminant is the canonical class index
/// used for every vector and matrix in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Negative = 0,
    Neutral = 1,
    Positive = 2,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [Self::Negative, Self::Neutral, Self::Positive];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Negative => "negative",
            Self::Neutral => "neutral",
            Self::Positive => "positive",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown sentiment label {0:?}")]
pub struct UnknownLabel(pub String);

impl FromStr for SentimentLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

/// Per-token language annotation. Anything other than `Eng`/`Hin` folds into
/// `Other`, which is written back as `O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LanguageTag {
    Eng,
    Hin,
    Other,
}

impl LanguageTag {
    /// Returns the tag and whether the input was folded from an unknown string.
    pub fn parse_lenient(s: &str) -> (Self, bool) {
        match s {
            "Eng" => (Self::Eng, false),
            "Hin" => (Self::Hin, false),
            "O" => (Self::Other, false),
            _ => (Self::Other, true),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Eng => "Eng",
            Self::Hin => "Hin",
            Self::Other => "O",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed meta line {content:?}")]
    MalformedMetaLine { line: usize, content: String },
    #[error("line {line}: {source}")]
    UnknownLabel { line: usize, source: UnknownLabel },
    #[error("duplicate uid {uid:?}")]
    DuplicateUid { uid: String },
    #[error("tweet {uid:?} has no tokens")]
    EmptyTweet { uid: String },
    #[error("line {line}: malformed token line {content:?}")]
    MalformedTokenLine { line: usize, content: String },
    #[error("invalid uid {0:?}")]
    InvalidUid(String),
    #[error("invalid token surface {0:?}")]
    InvalidSurface(String),
    #[error("tweet {uid:?} has no gold label")]
    MissingGoldLabel { uid: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<io::Error> for CorpusError {
    fn from(e: io::Error) -> Self {
        CorpusError::Io(e.to_string())
    }
}

fn is_field_safe(s: &str) -> bool {
    !s.is_empty() && !s.contains(['\t', '\n', '\r'])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    surface: String,
    lang: LanguageTag,
}

impl Token {
    pub fn new(surface: impl Into<String>, lang: LanguageTag) -> Result<Self, CorpusError> {
        let surface = surface.into();
        if !is_field_safe(&surface) {
            return Err(CorpusError::InvalidSurface(surface));
        }
        Ok(Token { surface, lang })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn lang(&self) -> LanguageTag {
        self.lang
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tweet {
    uid: String,
    tokens: Vec<Token>,
    gold: Option<SentimentLabel>,
}

impl Tweet {
    pub fn new(
        uid: impl Into<String>,
        tokens: Vec<Token>,
        gold: Option<SentimentLabel>,
    ) -> Result<Self, CorpusError> {
        let uid = uid.into();
        if !is_field_safe(&uid) {
            return Err(CorpusError::InvalidUid(uid));
        }
        if tokens.is_empty() {
            return Err(CorpusError::EmptyTweet { uid });
        }
        Ok(Tweet { uid, tokens, gold })
    }

    pub fn uid(&self) -> &str {
        &self.uid
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn gold(&self) -> Option<SentimentLabel> {
        self.gold
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(Token::surface)
    }
}

/// Tweets in file order with a uid index. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    tweets: Vec<Tweet>,
    index: HashMap<String, usize>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.tweets == other.tweets
    }
}

impl Eq for Corpus {}

impl Corpus {
    pub fn new(tweets: Vec<Tweet>) -> Result<Self, CorpusError> {
        let mut index = HashMap::with_capacity(tweets.len());
        for (i, t) in tweets.iter().enumerate() {
            if index.insert(t.uid.clone(), i).is_some() {
                return Err(CorpusError::DuplicateUid { uid: t.uid.clone() });
            }
        }
        Ok(Corpus { tweets, index })
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn get(&self, uid: &str) -> Option<&Tweet> {
        self.index.get(uid).map(|&i| &self.tweets[i])
    }

    pub fn contains(&self, uid: &str) -> bool {
        self.index.contains_key(uid)
    }

    pub fn uids(&self) -> impl Iterator<Item = &str> {
        self.tweets.iter().map(Tweet::uid)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Tweet> {
        self.tweets.iter()
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Tweet;
    type IntoIter = std::slice::Iter<'a, Tweet>;

    fn into_iter(self) -> Self::IntoIter {
        self.tweets.iter()
    }
}

/// Side information collected while parsing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    /// Token lines whose tag was not `Eng`, `Hin` or `O`.
    pub folded_tags: usize,
}

struct Pending {
    uid: String,
    gold: Option<SentimentLabel>,
    tokens: Vec<Token>,
}

impl Pending {
    fn finish(self) -> Result<Tweet, CorpusError> {
        if self.tokens.is_empty() {
            return Err(CorpusError::EmptyTweet { uid: self.uid });
        }
        Ok(Tweet {
            uid: self.uid,
            tokens: self.tokens,
            gold: self.gold,
        })
    }
}

fn parse_meta(line_no: usize, line: &str) -> Result<Pending, CorpusError> {
    let malformed = || CorpusError::MalformedMetaLine {
        line: line_no,
        content: line.to_string(),
    };
    let fields: Vec<&str> = line.split('\t').collect();
    if fields[0] != "meta" || !(2..=3).contains(&fields.len()) || fields[1].is_empty() {
        return Err(malformed());
    }
    let gold = match fields.get(2) {
        Some(raw) => {
            Some(
                raw.parse::<SentimentLabel>()
                    .map_err(|source| CorpusError::UnknownLabel {
                        line: line_no,
                        source,
                    })?,
            )
        }
        None => None,
    };
    Ok(Pending {
        uid: fields[1].to_string(),
        gold,
        tokens: Vec::new(),
    })
}

pub fn parse_conll_with_stats<R: BufRead>(input: R) -> Result<(Corpus, ParseStats), CorpusError> {
    let mut stats = ParseStats::default();
    let mut tweets = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut current: Option<Pending> = None;

    let mut push = |p: Pending, tweets: &mut Vec<Tweet>| -> Result<(), CorpusError> {
        let tweet = p.finish()?;
        if seen.insert(tweet.uid.clone(), tweets.len()).is_some() {
            return Err(CorpusError::DuplicateUid { uid: tweet.uid });
        }
        tweets.push(tweet);
        Ok(())
    };

    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);

        if line.is_empty() {
            if let Some(p) = current.take() {
                push(p, &mut tweets)?;
            }
            continue;
        }

        match current.as_mut() {
            None => current = Some(parse_meta(line_no, line)?),
            Some(p) => {
                let malformed = || CorpusError::MalformedTokenLine {
                    line: line_no,
                    content: line.to_string(),
                };
                let (surface, tag) = line.split_once('\t').ok_or_else(malformed)?;
                if surface.is_empty() || tag.contains('\t') {
                    return Err(malformed());
                }
                let (lang, folded) = LanguageTag::parse_lenient(tag);
                if folded {
                    stats.folded_tags += 1;
                }
                p.tokens.push(Token {
                    surface: surface.to_string(),
                    lang,
                });
            }
        }
    }
    if let Some(p) = current.take() {
        push(p, &mut tweets)?;
    }

    let index = seen;
    Ok((Corpus { tweets, index }, stats))
}

pub fn parse_conll<R: BufRead>(input: R) -> Result<Corpus, CorpusError> {
    parse_conll_with_stats(input).map(|(c, _)| c)
}

pub fn parse_conll_str(input: &str) -> Result<Corpus, CorpusError> {
    parse_conll(input.as_bytes())
}

pub fn write_conll(corpus: &Corpus) -> String {
    let mut out = String::new();
    for tweet in corpus {
        out.push_str("meta\t");
        out.push_str(&tweet.uid);
        if let Some(label) = tweet.gold {
            out.push('\t');
            out.push_str(label.as_str());
        }
        out.push('\n');
        for tok in &tweet.tokens {
            out.push_str(&tok.surface);
            out.push('\t');
            out.push_str(tok.lang.as_str());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Gold-label counts indexed by `SentimentLabel::index`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts(pub [usize; 3]);

impl ClassCounts {
    pub fn get(&self, label: SentimentLabel) -> usize {
        self.0[label.index()]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Most frequent class, ties going to the lowest canonical index.
    pub fn majority(&self) -> SentimentLabel {
        let mut best = SentimentLabel::Negative;
        for label in SentimentLabel::ALL {
            if self.get(label) > self.get(best) {
                best = label;
            }
        }
        best
    }
}

pub fn class_distribution(corpus: &Corpus) -> Result<ClassCounts, CorpusError> {
    let mut counts = ClassCounts::default();
    for tweet in corpus {
        let label = tweet.gold.ok_or_else(|| CorpusError::MissingGoldLabel {
            uid: tweet.uid.clone(),
        })?;
        counts.0[label.index()] += 1;
    }
    Ok(counts)
}
