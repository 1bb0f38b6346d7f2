//! Seeded Java-like corpora with a planted retrieval signal.
//!
//! Every label owns a small set of query words. Even-numbered labels are
//! text-signaled: their documents mention the query words in comments.
//! Odd-numbered labels are code-signaled: their comments hold only shared
//! noise words, and what ties the documents together is one label-specific
//! snippet. In a few "verbose" documents of such a label the variables
//! declared inside that snippet are named with the query words, so the query
//! words reach the snippet's surface words; in the remaining "terse"
//! documents the same snippet uses meaningless names.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{is_english_stop_word, CodeDocument, LanguageProfile, Query};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlantedConfig {
    pub labels: usize,
    pub docs_per_label: usize,
    /// Documents per code-signaled label whose snippet names use query words.
    pub verbose_per_label: usize,
    pub queries_per_label: usize,
    pub query_words_per_label: usize,
    /// Size of the comment-noise pool shared by all labels.
    pub noise_words: usize,
    pub generic_snippets: usize,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            labels: 20,
            docs_per_label: 4,
            verbose_per_label: 1,
            queries_per_label: 3,
            query_words_per_label: 4,
            noise_words: 40,
            generic_snippets: 12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub documents: Vec<CodeDocument>,
    pub queries: Vec<Query>,
    /// Labels whose only shared signal is a code snippet.
    pub code_signaled: BTreeSet<String>,
    pub query_words: BTreeMap<String, Vec<String>>,
}

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

/// Draws distinct pronounceable words that survive tokenization unchanged.
struct WordSource {
    rng: ChaCha8Rng,
    used: BTreeSet<String>,
}

impl WordSource {
    fn word(&mut self) -> String {
        let profile = LanguageProfile::java();
        loop {
            let mut w = String::new();
            for _ in 0..3 {
                w.push(*CONSONANTS.choose(&mut self.rng).expect("non-empty") as char);
                w.push(*VOWELS.choose(&mut self.rng).expect("non-empty") as char);
            }
            if !is_english_stop_word(&w) && !profile.is_keyword(&w) && self.used.insert(w.clone()) {
                return w;
            }
        }
    }

    fn words(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.word()).collect()
    }
}

fn camel(parts: &[&str]) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(p);
        } else {
            let mut c = p.chars();
            if let Some(f) = c.next() {
                out.extend(f.to_uppercase());
                out.push_str(c.as_str());
            }
        }
    }
    out
}

fn pascal(parts: &[&str]) -> String {
    let c = camel(parts);
    let mut chars = c.chars();
    match chars.next() {
        Some(f) => f.to_uppercase().chain(chars).collect(),
        None => c,
    }
}

/// A generic block shared across labels; `{v}` is the loop variable.
fn generic_snippet(i: usize, words: &[String]) -> String {
    let a = &words[(2 * i) % words.len()];
    let b = &words[(2 * i + 1) % words.len()];
    match i % 3 {
        0 => format!("for (int k = 0; k < limit; k++) {{\n            {a}.{b}(k);\n        }}"),
        1 => format!("while ({a}.hasNext()) {{\n            {b}({a}.next());\n        }}"),
        _ => format!("try {{\n            {a}.{b}();\n        }} catch (Exception e) {{\n            e.printStackTrace();\n        }}"),
    }
}

pub fn planted_corpus(config: &PlantedConfig) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut words = WordSource {
        rng: ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed),
        used: BTreeSet::new(),
    };
    let profile = LanguageProfile::java();
    let noise = words.words(config.noise_words);
    let generic_words = words.words(2 * config.generic_snippets);
    let generic: Vec<String> = (0..config.generic_snippets)
        .map(|i| generic_snippet(i, &generic_words))
        .collect();

    let mut documents = Vec::new();
    let mut queries = Vec::new();
    let mut code_signaled = BTreeSet::new();
    let mut query_words = BTreeMap::new();

    for l in 0..config.labels {
        let label = format!("label{l:02}");
        let qwords = words.words(config.query_words_per_label);
        // label-specific calls forming the planted snippet
        let calls = words.words(2);
        let code_label = l % 2 == 1;
        if code_label {
            code_signaled.insert(label.clone());
        }

        for d in 0..config.docs_per_label {
            let class_words = words.words(2);
            let method_words = words.words(2);
            let mut comment: Vec<String> = (0..4).map(|_| noise.choose(&mut rng).expect("noise").clone()).collect();
            if !code_label {
                let mut q = qwords.clone();
                q.shuffle(&mut rng);
                comment.extend(q.into_iter().take(2 + d % 2));
                comment.shuffle(&mut rng);
            }
            let mut body = Vec::new();
            let picks: Vec<&String> = generic.sample(&mut rng, 2).collect();
            for g in picks {
                body.push(g.clone());
            }
            if code_label {
                let verbose = d < config.verbose_per_label;
                let (first, second) = if verbose {
                    let mut q = qwords.clone();
                    q.shuffle(&mut rng);
                    (camel(&[&q[0], &q[1]]), camel(&[&q[2 % q.len()], &q[3 % q.len()]]))
                } else {
                    let junk = words.words(4);
                    (camel(&[&junk[0], &junk[1]]), camel(&[&junk[2], &junk[3]]))
                };
                body.push(format!(
                    "if (ready) {{\n            int {first} = {}();\n            {}({first});\n            int {second} = {first} + 1;\n        }}",
                    calls[0], calls[1]
                ));
            }
            body.shuffle(&mut rng);
            let source = format!(
                "import java.util.List;\n\n// {}\npublic class {} {{\n    void {}(List items, int limit) {{\n        boolean ready = items.isEmpty();\n        {}\n    }}\n}}\n",
                comment.join(" "),
                pascal(&[&class_words[0], &class_words[1]]),
                camel(&[&method_words[0], &method_words[1]]),
                body.join("\n        ")
            );
            let id = format!("{label}/Doc{d}.java");
            documents.push(CodeDocument::from_source(id, label.clone(), source, &profile));
        }

        for qi in 0..config.queries_per_label {
            let mut q = qwords.clone();
            q.shuffle(&mut rng);
            let mut text: Vec<String> = q.into_iter().take(3).collect();
            if rng.random_range(0..2) == 0 {
                text.push(noise.choose(&mut rng).expect("noise").clone());
            }
            let query = Query::new(format!("{label}-q{qi}"), text.join(" "), Some(label.clone()))
                .expect("query words survive tokenization");
            queries.push(query);
        }
        query_words.insert(label, qwords);
    }

    PlantedCorpus {
        documents,
        queries,
        code_signaled,
        query_words,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let c = PlantedConfig::default();
        let a = planted_corpus(&c);
        let b = planted_corpus(&c);
        assert_eq!(a.documents.len(), 80);
        assert_eq!(a.queries.len(), 60);
        assert_eq!(a.code_signaled.len(), 10);
        assert_eq!(a.documents, b.documents);
        assert_eq!(a.queries, b.queries);
        assert_ne!(planted_corpus(&PlantedConfig { seed: 1, ..c }).documents, a.documents);
    }

    #[test]
    fn code_signaled_comments_avoid_query_words() {
        let p = LanguageProfile::java();
        let corpus = planted_corpus(&PlantedConfig::default());
        for d in &corpus.documents {
            let comments: String = crate::corpus::strip(&d.source, &p)
                .comments()
                .collect::<Vec<_>>()
                .join(" ");
            let qw = &corpus.query_words[&d.label];
            let overlaps = qw.iter().any(|w| comments.contains(w.as_str()));
            assert_eq!(overlaps, !corpus.code_signaled.contains(&d.label), "{}", d.id);
        }
    }

    #[test]
    fn terse_documents_share_no_query_words() {
        let corpus = planted_corpus(&PlantedConfig::default());
        for d in corpus
            .documents
            .iter()
            .filter(|d| corpus.code_signaled.contains(&d.label))
        {
            let verbose = d.id.ends_with("Doc0.java");
            let qw = &corpus.query_words[&d.label];
            assert_eq!(d.tokens.iter().any(|t| qw.contains(t)), verbose, "{}", d.id);
        }
    }
}
