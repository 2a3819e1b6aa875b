//! Signal-word detection of constraint sentences.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{tokenize, Stopwords, TokenizedSentence};

pub const DEFAULT_SIGNALS: &[&str] = &[
    "shall",
    "should",
    "must",
    "may",
    "will",
    "have to",
    "has to",
    "need to",
    "needs to",
    "required to",
    "obliged to",
    "prohibited",
    "ought to",
];

pub const DEFAULT_NEGATORS: &[&str] = &["not", "never", "no"];

pub const DEFAULT_WINDOW: usize = 3;

/// Signal phrases plus the negators that flip polarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalLexicon {
    signals: Vec<Vec<String>>,
    negators: HashSet<String>,
    window: usize,
}

impl SignalLexicon {
    pub fn new<S, N>(signals: S, negators: N, window: usize) -> Result<Self>
    where
        S: IntoIterator,
        S::Item: AsRef<str>,
        N: IntoIterator,
        N::Item: AsRef<str>,
    {
        let mut phrases: Vec<Vec<String>> = Vec::new();
        for s in signals {
            let toks: Vec<String> = tokenize(s.as_ref()).into_iter().map(|t| t.text).collect();
            if toks.is_empty() {
                return Err(Error::config(format!(
                    "signal `{}` contains no word tokens",
                    s.as_ref()
                )));
            }
            if !phrases.contains(&toks) {
                phrases.push(toks);
            }
        }
        if phrases.is_empty() {
            return Err(Error::config("signal lexicon is empty"));
        }
        if window == 0 {
            return Err(Error::config("negation window must be at least 1"));
        }
        Ok(SignalLexicon {
            signals: phrases,
            negators: negators
                .into_iter()
                .map(|n| n.as_ref().trim().to_lowercase())
                .filter(|n| !n.is_empty())
                .collect(),
            window,
        })
    }

    /// Fails if any single-word signal is also a stopword.
    pub fn check_disjoint(&self, stopwords: &Stopwords) -> Result<()> {
        for s in &self.signals {
            if s.len() == 1 && stopwords.contains(&s[0]) {
                return Err(Error::config(format!(
                    "signal word `{}` is also listed as a stopword",
                    s[0]
                )));
            }
        }
        Ok(())
    }

    pub fn signals(&self) -> impl Iterator<Item = String> + '_ {
        self.signals.iter().map(|s| s.join(" "))
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }
}

impl Default for SignalLexicon {
    fn default() -> Self {
        SignalLexicon::new(DEFAULT_SIGNALS, DEFAULT_NEGATORS, DEFAULT_WINDOW)
            .expect("default lexicon is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalHit {
    pub signal: String,
    /// Token index where the signal phrase starts.
    pub position: usize,
    /// Number of tokens in the signal phrase.
    pub len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        })
    }
}

/// Every occurrence of every signal phrase in the raw tokens, ordered by
/// position and then lexicon order. Overlapping hits are all reported.
pub fn find_signal_hits(sentence: &TokenizedSentence, lexicon: &SignalLexicon) -> Vec<SignalHit> {
    let raw: Vec<&str> = sentence.raw_texts().collect();
    let mut hits = Vec::new();
    for pos in 0..raw.len() {
        for signal in &lexicon.signals {
            let end = pos + signal.len();
            if end <= raw.len() && raw[pos..end].iter().zip(signal).all(|(a, b)| *a == b) {
                hits.push(SignalHit {
                    signal: signal.join(" "),
                    position: pos,
                    len: signal.len(),
                });
            }
        }
    }
    hits
}

/// Negative iff some hit is followed by a negator within the window.
pub fn polarity(sentence: &TokenizedSentence, hits: &[SignalHit], lexicon: &SignalLexicon) -> Polarity {
    let raw = &sentence.raw_tokens;
    let negated = hits.iter().any(|h| {
        let last = h.position + h.len - 1;
        (last + 1..=last + lexicon.window)
            .filter_map(|i| raw.get(i))
            .any(|t| lexicon.negators.contains(&t.text))
    });
    if negated {
        Polarity::Negative
    } else {
        Polarity::Positive
    }
}

/// A sentence carrying at least one signal word.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSentence {
    pub tokenized: TokenizedSentence,
    pub signal_hits: Vec<SignalHit>,
    pub polarity: Polarity,
    terms: Vec<String>,
}

impl ConstraintSentence {
    fn new(tokenized: TokenizedSentence, signal_hits: Vec<SignalHit>, polarity: Polarity) -> Self {
        let mut covered = vec![false; tokenized.raw_tokens.len()];
        for h in &signal_hits {
            covered[h.position..h.position + h.len].fill(true);
        }
        let terms = tokenized
            .stems
            .iter()
            .zip(&tokenized.content)
            .zip(&covered)
            .filter(|((_, content), sig)| **content && !**sig)
            .map(|((s, _), _)| s.clone())
            .collect();
        ConstraintSentence {
            tokenized,
            signal_hits,
            polarity,
            terms,
        }
    }

    pub fn sentence_id(&self) -> &str {
        &self.tokenized.sentence_id
    }

    pub fn doc_id(&self) -> &str {
        &self.tokenized.doc_id
    }

    /// Content stems with signal-word tokens removed, in sentence order.
    /// These are the terms used for grouping and similarity.
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn first_signal_position(&self) -> usize {
        self.signal_hits
            .iter()
            .map(|h| h.position)
            .min()
            .expect("constraint sentences have at least one signal hit")
    }
}

/// Keeps the sentences with at least one signal hit, in input order.
pub fn filter_constraints<I>(sentences: I, lexicon: &SignalLexicon) -> Vec<ConstraintSentence>
where
    I: IntoIterator<Item = TokenizedSentence>,
{
    sentences
        .into_iter()
        .filter_map(|s| {
            let hits = find_signal_hits(&s, lexicon);
            if hits.is_empty() {
                return None;
            }
            let pol = polarity(&s, &hits, lexicon);
            Some(ConstraintSentence::new(s, hits, pol))
        })
        .collect()
}
