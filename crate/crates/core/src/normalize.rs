//! Tokenization, stopword removal and stemming.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::Sentence;
use crate::porter;

const DEFAULT_STOPWORDS: &str = include_str!("../resources/stopwords_en.txt");

/// A lowercased word token and its 0-based index in the sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub position: usize,
}

fn is_connector(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

/// Splits text into lowercased tokens: maximal runs of letters and digits,
/// keeping hyphens and apostrophes that sit between two such characters.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let joins = is_connector(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if c.is_alphanumeric() || joins {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(Token {
                text: std::mem::take(&mut current),
                position: tokens.len(),
            });
        }
    }
    if !current.is_empty() {
        tokens.push(Token {
            text: current,
            position: tokens.len(),
        });
    }
    tokens
}

/// Stems a lowercased token.
///
/// Purely alphabetic ASCII tokens go through the Porter stemmer, after a
/// trailing possessive (`'s`, `'`) is dropped. Anything else, including tokens
/// with digits or hyphens, is returned unchanged.
pub fn stem(token: &str) -> String {
    let base = token
        .strip_suffix("'s")
        .or_else(|| token.strip_suffix("\u{2019}s"))
        .or_else(|| token.strip_suffix('\''))
        .or_else(|| token.strip_suffix('\u{2019}'))
        .unwrap_or(token);
    if !base.is_empty() && base.bytes().all(|b| b.is_ascii_lowercase()) {
        porter::stem(base)
    } else {
        token.to_string()
    }
}

/// Tokenizes and stems a keyword phrase. Stopwords are kept, so
/// "right to object" still contains "to".
pub fn normalize_phrase(phrase: &str) -> Result<Vec<String>> {
    let stems: Vec<String> = tokenize(phrase).iter().map(|t| stem(&t.text)).collect();
    if stems.is_empty() {
        return Err(Error::config(format!(
            "phrase `{phrase}` contains no word tokens"
        )));
    }
    Ok(stems)
}

/// Whether `needle` occurs as a contiguous run inside `haystack`.
pub fn contains_sequence<S: AsRef<str>>(haystack: &[S], needle: &[String]) -> bool {
    !needle.is_empty()
        && haystack
            .windows(needle.len())
            .any(|w| w.iter().zip(needle).all(|(a, b)| a.as_ref() == b))
}

/// A lowercase stopword set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// Parses a list with one token per line; `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect(),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn empty() -> Self {
        Stopwords(HashSet::new())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for Stopwords {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

/// Drops stopwords, keeping order and original positions.
pub fn remove_stopwords(tokens: &[Token], stopwords: &Stopwords) -> Vec<Token> {
    tokens
        .iter()
        .filter(|t| !stopwords.contains(&t.text))
        .cloned()
        .collect()
}

/// A sentence after tokenization, stemming and stopword marking.
///
/// `stems` is aligned with `raw_tokens`; `content` flags the positions that
/// survived stopword removal.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenizedSentence {
    pub sentence_id: String,
    pub doc_id: String,
    pub text: String,
    pub raw_tokens: Vec<Token>,
    pub stems: Vec<String>,
    pub content: Vec<bool>,
}

impl TokenizedSentence {
    pub fn new(sentence_id: &str, doc_id: &str, text: &str, stopwords: &Stopwords) -> Self {
        let raw_tokens = tokenize(text);
        let stems = raw_tokens.iter().map(|t| stem(&t.text)).collect();
        let content = raw_tokens
            .iter()
            .map(|t| !stopwords.contains(&t.text))
            .collect();
        TokenizedSentence {
            sentence_id: sentence_id.to_string(),
            doc_id: doc_id.to_string(),
            text: text.to_string(),
            raw_tokens,
            stems,
            content,
        }
    }

    pub fn from_sentence(sentence: &Sentence, stopwords: &Stopwords) -> Self {
        Self::new(&sentence.sentence_id, &sentence.doc_id, &sentence.text, stopwords)
    }

    pub fn content_stems(&self) -> Vec<&str> {
        self.stems
            .iter()
            .zip(&self.content)
            .filter(|(_, keep)| **keep)
            .map(|(s, _)| s.as_str())
            .collect()
    }

    pub fn stem_multiset(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for s in self.content_stems() {
            *counts.entry(s).or_insert(0) += 1;
        }
        counts
    }

    pub fn raw_texts(&self) -> impl Iterator<Item = &str> {
        self.raw_tokens.iter().map(|t| t.text.as_str())
    }
}
