//! Word extraction shared by documents and queries.
//!
//! Words are maximal runs of ASCII alphanumerics and underscores. Each run is
//! split into fragments on underscores, lower-to-upper case transitions,
//! acronym boundaries (`IOException` -> `IO`, `Exception`) and letter/digit
//! boundaries. Fragments are lowercased, and fragments shorter than two
//! characters or on the stop list are dropped.

use super::lexer::{strip, Segment};
use super::profile::LanguageProfile;

/// Common English function words. Contraction stems such as `doesn` are kept
/// on purpose: they survive in bug-report titles and carry negation.
pub const ENGLISH_STOP_WORDS: &[&str] = &[
    "a",
    "about",
    "above",
    "after",
    "again",
    "against",
    "all",
    "am",
    "an",
    "and",
    "any",
    "are",
    "as",
    "at",
    "be",
    "because",
    "been",
    "before",
    "being",
    "below",
    "between",
    "both",
    "but",
    "by",
    "can",
    "could",
    "did",
    "do",
    "does",
    "doing",
    "down",
    "during",
    "each",
    "few",
    "for",
    "from",
    "further",
    "had",
    "has",
    "have",
    "having",
    "he",
    "her",
    "here",
    "hers",
    "herself",
    "him",
    "himself",
    "his",
    "how",
    "i",
    "if",
    "in",
    "into",
    "is",
    "it",
    "its",
    "itself",
    "just",
    "me",
    "more",
    "most",
    "my",
    "myself",
    "no",
    "nor",
    "not",
    "now",
    "of",
    "off",
    "on",
    "once",
    "only",
    "or",
    "other",
    "our",
    "ours",
    "ourselves",
    "out",
    "over",
    "own",
    "same",
    "she",
    "should",
    "so",
    "some",
    "such",
    "than",
    "that",
    "the",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "these",
    "they",
    "this",
    "those",
    "through",
    "to",
    "too",
    "under",
    "until",
    "up",
    "very",
    "was",
    "we",
    "were",
    "what",
    "when",
    "where",
    "which",
    "while",
    "who",
    "whom",
    "why",
    "will",
    "with",
    "would",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
];

pub fn is_english_stop_word(word: &str) -> bool {
    ENGLISH_STOP_WORDS.binary_search(&word).is_ok()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Lower,
    Upper,
    Digit,
}

fn class_of(c: char) -> Option<Class> {
    if c.is_ascii_lowercase() {
        Some(Class::Lower)
    } else if c.is_ascii_uppercase() {
        Some(Class::Upper)
    } else if c.is_ascii_digit() {
        Some(Class::Digit)
    } else {
        None
    }
}

/// Splits one identifier-like word into lowercase fragments. No filtering.
pub fn split_identifier(word: &str) -> Vec<String> {
    let mut out = Vec::new();
    for part in word.split(|c: char| !c.is_ascii_alphanumeric()) {
        let chars: Vec<char> = part.chars().collect();
        let mut start = 0;
        for i in 1..chars.len() {
            let (prev, cur) = (class_of(chars[i - 1]), class_of(chars[i]));
            let next = chars.get(i + 1).copied().and_then(class_of);
            let boundary = match (prev, cur) {
                (Some(Class::Lower), Some(Class::Upper)) => true,
                (Some(Class::Upper), Some(Class::Upper)) => next == Some(Class::Lower),
                (Some(Class::Digit), Some(c)) | (Some(c), Some(Class::Digit)) => c != Class::Digit,
                _ => false,
            };
            if boundary {
                out.push(chars[start..i].iter().collect::<String>().to_ascii_lowercase());
                start = i;
            }
        }
        if start < chars.len() {
            out.push(chars[start..].iter().collect::<String>().to_ascii_lowercase());
        }
    }
    out
}

fn keep(fragment: &str) -> bool {
    fragment.len() >= 2 && !is_english_stop_word(fragment)
}

fn word_runs(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .filter(|w| !w.is_empty())
}

/// Tokenizes natural-language text: query text and comment bodies.
pub fn tokenize_text(text: &str) -> Vec<String> {
    word_runs(text).flat_map(split_identifier).filter(|f| keep(f)).collect()
}

/// Tokenizes code with comments and literals already removed. Numeric
/// literals and language keywords are skipped.
pub fn tokenize_code(code: &str, profile: &LanguageProfile) -> Vec<String> {
    word_runs(code)
        .filter(|w| !w.starts_with(|c: char| c.is_ascii_digit()))
        .filter(|w| !profile.is_keyword(w))
        .flat_map(split_identifier)
        .filter(|f| keep(f) && !profile.is_keyword(f))
        .collect()
}

/// Extracts the word tokens of a program: words in comments plus identifier
/// fragments from code. String-literal contents are excluded.
pub fn extract_tokens(source: &str, profile: &LanguageProfile) -> Vec<String> {
    tokens_of_stripped(&strip(source, profile).segments, profile)
}

pub(crate) fn tokens_of_stripped(segments: &[Segment], profile: &LanguageProfile) -> Vec<String> {
    let mut out = Vec::new();
    for seg in segments {
        match seg {
            Segment::Code(c) => out.extend(tokenize_code(c, profile)),
            Segment::Comment(c) => out.extend(tokenize_text(c)),
            Segment::Literal { .. } => {}
        }
    }
    out
}
