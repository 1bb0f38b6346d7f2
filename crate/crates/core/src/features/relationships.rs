//! Pattern-level extraction of inheritance, implementation and reference
//! links.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;

use crate::corpus::{split_identifier, tokenize::is_english_stop_word, LanguageProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationKind {
    Inherits,
    Implements,
    Refs,
}

impl RelationKind {
    pub fn tag(self) -> &'static str {
        match self {
            RelationKind::Inherits => "inherits",
            RelationKind::Implements => "implements",
            RelationKind::Refs => "refs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relationship {
    pub kind: RelationKind,
    /// Target name as written in the source.
    pub target: String,
}

impl Relationship {
    /// Canonical feature key, e.g. `refs:java.io.inputstream`.
    pub fn key(&self) -> String {
        format!("{}:{}", self.kind.tag(), self.target.to_lowercase())
    }

    /// Word content of the target name: its dot-separated fragments, each
    /// run through the identifier splitter.
    pub fn surface_words(&self, profile: &LanguageProfile) -> BTreeSet<String> {
        self.target
            .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .flat_map(split_identifier)
            .filter(|w| w.len() >= 2 && !is_english_stop_word(w) && !profile.is_keyword(w))
            .collect()
    }
}

static QUALIFIED_TYPE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(?:[a-z_][a-z0-9_]*\.)+[A-Z][A-Za-z0-9_]*\b").expect("valid regex"));

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Name(&'a str),
    Punct(char),
}

fn lex(code: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    let mut iter = code.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if c.is_whitespace() {
            continue;
        }
        if c.is_alphabetic() || c == '_' || c == '$' || c == '#' {
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = iter.peek() {
                let continues_name = d.is_alphanumeric() || d == '_' || d == '$';
                let qualified_dot = d == '.'
                    && code[j + 1..]
                        .chars()
                        .next()
                        .is_some_and(|n| n.is_alphabetic() || n == '_');
                if continues_name || qualified_dot {
                    end = j + d.len_utf8();
                    iter.next();
                } else {
                    break;
                }
            }
            out.push((i, Tok::Name(&code[i..end])));
        } else {
            out.push((i, Tok::Punct(c)));
        }
    }
    out
}

fn skip_generics(toks: &[(usize, Tok<'_>)], mut i: usize) -> usize {
    if !matches!(toks.get(i), Some((_, Tok::Punct('<')))) {
        return i;
    }
    let mut depth = 0usize;
    while let Some((_, t)) = toks.get(i) {
        match t {
            Tok::Punct('<') => depth += 1,
            Tok::Punct('>') => {
                depth -= 1;
                if depth == 0 {
                    return i + 1;
                }
            }
            Tok::Punct('{') | Tok::Punct(';') => return i,
            _ => {}
        }
        i += 1;
    }
    i
}

const ACCESS: &[&str] = &["public", "private", "protected", "virtual"];

/// Parses `Name<...>, Name, ...` starting at `i`.
fn name_list<'a>(toks: &[(usize, Tok<'a>)], mut i: usize, skip: &[&str]) -> Vec<&'a str> {
    let mut names = Vec::new();
    loop {
        while let Some((_, Tok::Name(n))) = toks.get(i) {
            if skip.contains(n) {
                i += 1;
            } else {
                break;
            }
        }
        match toks.get(i) {
            Some((_, Tok::Name(n))) => {
                names.push(*n);
                i = skip_generics(toks, i + 1);
            }
            _ => break,
        }
        match toks.get(i) {
            Some((_, Tok::Punct(','))) => i += 1,
            _ => break,
        }
    }
    names
}

/// Extracts relationships from code whose comments are removed but whose
/// string literals are intact (C includes live in quotes).
pub fn extract_relationships_from_code(code: &str, profile: &LanguageProfile) -> Vec<Relationship> {
    let toks = lex(code);
    let mut out = Vec::new();
    let mut import_spans: Vec<(usize, usize)> = Vec::new();

    for (idx, (pos, tok)) in toks.iter().enumerate() {
        let Tok::Name(word) = tok else { continue };
        if profile.inherit_keywords.iter().any(|k| k == word) {
            for n in name_list(&toks, idx + 1, &[]) {
                out.push(Relationship {
                    kind: RelationKind::Inherits,
                    target: n.to_string(),
                });
            }
        } else if profile.implement_keywords.iter().any(|k| k == word) {
            for n in name_list(&toks, idx + 1, &[]) {
                out.push(Relationship {
                    kind: RelationKind::Implements,
                    target: n.to_string(),
                });
            }
        } else if profile.colon_inheritance && (*word == "class" || *word == "struct") {
            if let (Some((_, Tok::Name(_))), Some((_, Tok::Punct(':')))) = (toks.get(idx + 1), toks.get(idx + 2)) {
                if !matches!(toks.get(idx + 3), Some((_, Tok::Punct(':')))) {
                    for n in name_list(&toks, idx + 3, ACCESS) {
                        out.push(Relationship {
                            kind: RelationKind::Inherits,
                            target: n.to_string(),
                        });
                    }
                }
            }
        } else if let Some(kw) = profile.import_keywords.iter().find(|k| k == word) {
            let start = pos + kw.len();
            let line_end = code[start..].find('\n').map(|p| start + p).unwrap_or(code.len());
            let stmt_end = code[start..]
                .find(profile.statement_terminator.as_str())
                .map(|p| start + p)
                .unwrap_or(code.len())
                .min(line_end.max(start));
            let stmt_end = if kw.starts_with('#') {
                line_end
            } else {
                stmt_end.max(start)
            };
            import_spans.push((*pos, stmt_end));
            let body = code[start..stmt_end].trim();
            let body = body.strip_prefix("static ").map(str::trim).unwrap_or(body);
            let target: String = body
                .trim_matches(|c| c == '<' || c == '>' || c == '"')
                .chars()
                .take_while(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | '/' | '*' | '$' | '-'))
                .collect();
            let target = target.trim_end_matches(".*").trim_end_matches('.');
            if !target.is_empty() && target != "*" {
                out.push(Relationship {
                    kind: RelationKind::Refs,
                    target: target.to_string(),
                });
            }
        }
    }

    // a supertype named with its package is already covered by its clause
    let supertypes: Vec<String> = out
        .iter()
        .filter(|r| r.kind != RelationKind::Refs)
        .map(|r| r.target.clone())
        .collect();
    for m in QUALIFIED_TYPE.find_iter(code) {
        let inside_import = import_spans.iter().any(|&(s, e)| m.start() >= s && m.start() < e);
        if !inside_import && !supertypes.iter().any(|t| t == m.as_str()) {
            out.push(Relationship {
                kind: RelationKind::Refs,
                target: m.as_str().to_string(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(code: &str, profile: &LanguageProfile) -> Vec<String> {
        let mut k: Vec<String> = extract_relationships_from_code(code, profile)
            .iter()
            .map(Relationship::key)
            .collect();
        k.sort();
        k
    }

    #[test]
    fn extends_and_implements() {
        let p = LanguageProfile::java();
        assert_eq!(
            keys("class A extends B implements C { }", &p),
            ["implements:c", "inherits:b"]
        );
        assert_eq!(
            keys(
                "class A<T> extends Base<T> implements Runnable, java.io.Closeable {}",
                &p
            ),
            ["implements:java.io.closeable", "implements:runnable", "inherits:base"]
        );
    }

    #[test]
    fn imports_become_references() {
        let p = LanguageProfile::java();
        assert_eq!(
            keys("import java.io.InputStream;\nclass A {}", &p),
            ["refs:java.io.inputstream"]
        );
        assert_eq!(keys("import static org.junit.Assert.*;", &p), ["refs:org.junit.assert"]);
        assert_eq!(keys("import java.util.*;", &p), ["refs:java.util"]);
    }

    #[test]
    fn qualified_names_in_body() {
        let p = LanguageProfile::java();
        assert_eq!(
            keys(
                "void f() throws java.io.IOException { org.eclipse.swt.SWT.error(1); }",
                &p
            ),
            ["refs:java.io.ioexception", "refs:org.eclipse.swt.swt"]
        );
    }

    #[test]
    fn nothing_to_find() {
        assert!(keys("int x = 1;", &LanguageProfile::java()).is_empty());
    }

    #[test]
    fn c_includes_and_colon_inheritance() {
        let p = LanguageProfile::c_like();
        assert_eq!(
            keys(
                "#include <stdio.h>\n#include \"net/socket.h\"\nclass Server : public Base, private Mixin {};",
                &p
            ),
            ["inherits:base", "inherits:mixin", "refs:net/socket.h", "refs:stdio.h"]
        );
    }

    #[test]
    fn surface_words_split_acronyms() {
        let r = Relationship {
            kind: RelationKind::Refs,
            target: "java.io.IOException".into(),
        };
        let words: Vec<String> = r.surface_words(&LanguageProfile::java()).into_iter().collect();
        assert_eq!(words, ["exception", "io", "java"]);
    }
}
