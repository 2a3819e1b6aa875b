//! Document loading, fragmentation and sentence segmentation.

use std::collections::HashSet;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::tokenize;

/// Sentences with fewer tokens than this are dropped as heading debris.
pub const MIN_SENTENCE_TOKENS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub source_name: String,
    pub raw_text: String,
}

/// Decodes a document and normalizes its line endings to LF.
///
/// Without `lossy`, invalid UTF-8 is an error naming the first bad byte.
/// A document with no non-whitespace content is rejected as empty.
pub fn load_document(source_name: &str, bytes: &[u8], doc_id: &str, lossy: bool) -> Result<Document> {
    validate_doc_id(doc_id)?;
    let text = match std::str::from_utf8(bytes) {
        Ok(s) => s.to_string(),
        Err(_) if lossy => String::from_utf8_lossy(bytes).into_owned(),
        Err(e) => {
            return Err(Error::Encoding {
                source_name: source_name.to_string(),
                offset: e.valid_up_to(),
            })
        }
    };
    if text.trim().is_empty() {
        return Err(Error::EmptyDocument {
            source_name: source_name.to_string(),
        });
    }
    Ok(Document {
        doc_id: doc_id.to_string(),
        source_name: source_name.to_string(),
        raw_text: text.replace("\r\n", "\n").replace('\r', "\n"),
    })
}

pub(crate) fn validate_doc_id(doc_id: &str) -> Result<()> {
    if doc_id.is_empty() || doc_id.contains(':') || doc_id.chars().any(char::is_whitespace) {
        return Err(Error::config(format!(
            "invalid doc_id `{doc_id}`: must be non-empty without ':' or whitespace"
        )));
    }
    Ok(())
}

/// How documents are split into fragments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FragmentationRules {
    /// Regular expressions matched at line starts; each match opens a fragment.
    pub markers: Vec<String>,
    /// A non-blank line after a blank line opens a fragment.
    pub blank_line_paragraphs: bool,
}

impl Default for FragmentationRules {
    fn default() -> Self {
        FragmentationRules {
            markers: Vec::new(),
            blank_line_paragraphs: true,
        }
    }
}

impl FragmentationRules {
    pub fn markers<I, S>(markers: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        FragmentationRules {
            markers: markers.into_iter().map(Into::into).collect(),
            blank_line_paragraphs: false,
        }
    }

    pub fn compile(&self) -> Result<Fragmenter> {
        if self.markers.is_empty() && !self.blank_line_paragraphs {
            return Err(Error::config(
                "fragmentation needs at least one marker pattern or the blank-line rule",
            ));
        }
        let markers = self
            .markers
            .iter()
            .map(|p| {
                Regex::new(p).map_err(|e| Error::InvalidPattern {
                    pattern: p.clone(),
                    message: e.to_string(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Fragmenter {
            markers,
            blank_line_paragraphs: self.blank_line_paragraphs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub doc_id: String,
    pub fragment_index: usize,
    /// The marker text that opened this fragment, if any.
    pub heading: Option<String>,
    pub text: String,
}

/// Compiled fragmentation rules.
///
/// A marker consumes only the text it matched; the rest of the marker line
/// stays in the fragment body. Concatenating `heading + text` over all
/// fragments therefore reproduces the document text exactly.
#[derive(Debug, Clone)]
pub struct Fragmenter {
    markers: Vec<Regex>,
    blank_line_paragraphs: bool,
}

impl Fragmenter {
    fn marker_len(&self, line: &str) -> Option<usize> {
        self.markers
            .iter()
            .filter_map(|re| re.find(line))
            .find(|m| m.start() == 0 && !m.is_empty())
            .map(|m| m.end())
    }

    pub fn fragment(&self, doc: &Document) -> Vec<Fragment> {
        let mut pieces: Vec<(Option<String>, String)> = Vec::new();
        let mut heading: Option<String> = None;
        let mut text = String::new();
        let mut prev_blank = false;

        for (i, line) in doc.raw_text.split_inclusive('\n').enumerate() {
            let content = line.strip_suffix('\n').unwrap_or(line);
            let blank = content.trim().is_empty();
            if let Some(len) = self.marker_len(content) {
                if heading.is_some() || !text.is_empty() {
                    pieces.push((heading.take(), std::mem::take(&mut text)));
                }
                heading = Some(content[..len].to_string());
                text.push_str(&line[len..]);
            } else if self.blank_line_paragraphs && i > 0 && prev_blank && !blank {
                if heading.is_some() || !text.is_empty() {
                    pieces.push((heading.take(), std::mem::take(&mut text)));
                }
                text.push_str(line);
            } else {
                text.push_str(line);
            }
            prev_blank = blank;
        }
        if heading.is_some() || !text.is_empty() {
            pieces.push((heading, text));
        }

        pieces
            .into_iter()
            .enumerate()
            .map(|(fragment_index, (heading, text))| Fragment {
                doc_id: doc.doc_id.clone(),
                fragment_index,
                heading,
                text,
            })
            .collect()
    }
}

pub fn fragment(doc: &Document, rules: &FragmentationRules) -> Result<Vec<Fragment>> {
    Ok(rules.compile()?.fragment(doc))
}

pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "etc.", "cf.", "Art.", "Arts.", "No.", "Nos.", "para.", "p.", "pp.", "Mr.",
    "Mrs.", "Dr.", "vol.", "approx.", "incl.", "viz.",
];

/// Abbreviations that never end a sentence. Matching ignores case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abbreviations(HashSet<String>);

impl Abbreviations {
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = HashSet::new();
        for e in entries {
            let e = e.as_ref().trim();
            if !e.ends_with('.') || e.len() < 2 {
                return Err(Error::config(format!(
                    "abbreviation `{e}` must end with '.'"
                )));
            }
            set.insert(e.to_lowercase());
        }
        Ok(Abbreviations(set))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(&token.to_lowercase())
    }
}

impl Default for Abbreviations {
    fn default() -> Self {
        Abbreviations::new(DEFAULT_ABBREVIATIONS).expect("default abbreviations are valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub sentence_id: String,
    pub doc_id: String,
    pub fragment_index: usize,
    pub sentence_index: usize,
    /// Sentence text with whitespace runs collapsed to single spaces.
    pub text: String,
    /// Byte offsets `[start, end)` into the fragment text.
    pub char_span: (usize, usize),
}

/// Whether `text[i]` (a '.', '?' or '!') ends a sentence.
fn is_boundary(text: &str, i: usize, abbreviations: &Abbreviations) -> bool {
    let bytes = text.as_bytes();
    let after = &text[i + 1..];
    let rest = after.trim_start();
    if rest.len() == after.len() || rest.is_empty() {
        // no whitespace after the terminator, or end of text
        return false;
    }
    let mut next = rest.chars();
    let opens = match next.next() {
        Some(c) if c.is_uppercase() || c.is_ascii_digit() => true,
        Some('(') => next.next().is_some_and(|c| c.is_ascii_digit()),
        _ => false,
    };
    if !opens {
        return false;
    }
    if bytes[i] == b'.' {
        if i > 0 && bytes[i - 1].is_ascii_digit() && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
            return false;
        }
        let word_start = text[..i]
            .rfind(char::is_whitespace)
            .map(|p| p + text[p..].chars().next().map_or(1, char::len_utf8))
            .unwrap_or(0);
        let word = text[word_start..=i].trim_start_matches(['(', '[', '"', '\'', '\u{201C}', '\u{2018}']);
        if abbreviations.contains(word) {
            return false;
        }
    }
    true
}

/// Splits a fragment into sentences at '.', '?' or '!' followed by
/// whitespace and an uppercase letter, a digit or "(digit".
///
/// A period does not split when the word it ends is a known abbreviation or
/// when it sits between two digits. Semicolons never split.
pub fn segment_sentences(fragment: &Fragment, abbreviations: &Abbreviations) -> Vec<Sentence> {
    let text = &fragment.text;
    let mut spans = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if matches!(c, '.' | '?' | '!') && is_boundary(text, i, abbreviations) {
            spans.push((start, i + 1));
            start = i + 1;
        }
    }
    spans.push((start, text.len()));

    let mut sentences = Vec::new();
    for (s, e) in spans {
        let raw = &text[s..e];
        let lead = raw.len() - raw.trim_start().len();
        let trimmed = raw.trim();
        if tokenize(trimmed).len() < MIN_SENTENCE_TOKENS {
            continue;
        }
        let span = (s + lead, s + lead + trimmed.len());
        let sentence_index = sentences.len();
        sentences.push(Sentence {
            sentence_id: format!(
                "{}:{}:{}",
                fragment.doc_id, fragment.fragment_index, sentence_index
            ),
            doc_id: fragment.doc_id.clone(),
            fragment_index: fragment.fragment_index,
            sentence_index,
            text: trimmed.split_whitespace().collect::<Vec<_>>().join(" "),
            char_span: span,
        });
    }
    sentences
}
