//! Textual normalization of statements so that structurally identical code
//! gets an identical key.
//!
//! Three rewrites: declared identifiers become `<id:TYPE>`, numeric literals
//! become `<num>`, string literals become `<str>`. Tokens are then joined by
//! single spaces.

use std::collections::HashMap;

use crate::corpus::LanguageProfile;

const NUM: &str = "<num>";
const STR: &str = "<str>";

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Placeholder(String),
    Punct(String),
}

impl Tok {
    fn text(&self) -> &str {
        match self {
            Tok::Ident(s) | Tok::Placeholder(s) | Tok::Punct(s) => s,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

fn lex(stmt: &str, profile: &LanguageProfile) -> Vec<Tok> {
    let chars: Vec<(usize, char)> = stmt.char_indices().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let rest = &stmt[pos..];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        // existing placeholders are atomic so normalization is idempotent
        if c == '<' {
            if let Some(end) = rest.find('>') {
                let cand = &rest[..=end];
                if cand == NUM || cand == STR || (cand.starts_with("<id:") && !cand[4..].contains(char::is_whitespace))
                {
                    toks.push(Tok::Placeholder(cand.to_string()));
                    i += cand.chars().count();
                    continue;
                }
            }
        }
        if let Some(delim) = profile.string_delimiters.iter().find(|d| rest.starts_with(d.as_str())) {
            let body = &rest[delim.len()..];
            let mut len = delim.len();
            let mut escaped = false;
            let mut closed = false;
            for (off, ch) in body.char_indices() {
                if escaped {
                    escaped = false;
                    continue;
                }
                if ch == '\\' {
                    escaped = true;
                    continue;
                }
                if body[off..].starts_with(delim.as_str()) {
                    len += off + delim.len();
                    closed = true;
                    break;
                }
            }
            if !closed {
                len = rest.len();
            }
            toks.push(Tok::Placeholder(STR.into()));
            i += rest[..len].chars().count();
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|(_, n)| n.is_ascii_digit())) {
            let mut j = i + 1;
            while j < chars.len() {
                let ch = chars[j].1;
                let prev = chars[j - 1].1;
                let exponent_sign = (ch == '+' || ch == '-') && (prev == 'e' || prev == 'E') && !rest.starts_with("0x");
                if ch.is_ascii_alphanumeric() || ch == '.' || ch == '_' || exponent_sign {
                    j += 1;
                } else {
                    break;
                }
            }
            toks.push(Tok::Placeholder(NUM.into()));
            i = j;
            continue;
        }
        if is_ident_start(c) {
            let mut j = i + 1;
            while j < chars.len() && is_ident_char(chars[j].1) {
                j += 1;
            }
            let end = chars.get(j).map(|(p, _)| *p).unwrap_or(stmt.len());
            toks.push(Tok::Ident(stmt[pos..end].to_string()));
            i = j;
            continue;
        }
        toks.push(Tok::Punct(c.to_string()));
        i += 1;
    }
    toks
}

/// Per-document normalizer. Remembers declarations so that later uses of a
/// declared name are rewritten too.
#[derive(Debug, Clone)]
pub struct Normalizer<'p> {
    profile: &'p LanguageProfile,
    declared: HashMap<String, String>,
}

impl<'p> Normalizer<'p> {
    pub fn new(profile: &'p LanguageProfile) -> Self {
        Normalizer {
            profile,
            declared: HashMap::new(),
        }
    }

    fn is_type_like(&self, word: &str) -> bool {
        self.profile.is_type_keyword(word)
            || (word.starts_with(|c: char| c.is_uppercase()) && !self.profile.is_keyword(word))
    }

    /// The base type name ending at `idx`, looking through `<...>` and `[]`.
    fn declared_type(&self, toks: &[Tok], idx: usize) -> Option<String> {
        match &toks[idx] {
            Tok::Ident(w) if self.is_type_like(w) => Some(w.clone()),
            Tok::Punct(p) if p == "]" => {
                if idx >= 2 && toks[idx - 1].text() == "[" {
                    self.declared_type(toks, idx - 2)
                } else {
                    None
                }
            }
            Tok::Punct(p) if p == ">" => {
                let mut depth = 0usize;
                let mut j = idx;
                loop {
                    match toks[j].text() {
                        ">" => depth += 1,
                        "<" => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        ";" | "=" | "(" | ")" => return None,
                        _ => {}
                    }
                    if j == 0 {
                        return None;
                    }
                    j -= 1;
                }
                if j == 0 {
                    return None;
                }
                match &toks[j - 1] {
                    Tok::Ident(w) if self.is_type_like(w) => Some(w.clone()),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    pub fn normalize(&mut self, stmt: &str) -> String {
        let mut toks = lex(stmt, self.profile);
        let term = &self.profile.statement_terminator;
        while toks.last().is_some_and(|t| t.text() == term) {
            toks.pop();
        }
        for i in 0..toks.len() {
            let Tok::Ident(name) = &toks[i] else { continue };
            if self.profile.is_keyword(name) || self.is_type_like(name) {
                continue;
            }
            let prev_is_member_access = i > 0 && toks[i - 1].text() == ".";
            if prev_is_member_access {
                continue;
            }
            let declared_here = if i > 0 { self.declared_type(&toks, i - 1) } else { None };
            if let Some(ty) = declared_here {
                self.declared.insert(name.clone(), ty);
            }
            if let Some(ty) = self.declared.get(name) {
                toks[i] = Tok::Placeholder(format!("<id:{ty}>"));
            }
        }
        let parts: Vec<&str> = toks.iter().map(Tok::text).collect();
        parts.join(" ")
    }
}

/// Normalizes a single statement in isolation.
pub fn normalize_statement(stmt: &str, profile: &LanguageProfile) -> String {
    Normalizer::new(profile).normalize(stmt)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn norm(s: &str) -> String {
        normalize_statement(s, &LanguageProfile::java())
    }

    #[test]
    fn declaration_with_literal() {
        assert_eq!(norm("int maxRetry = 5;"), "int <id:int> = <num>");
    }

    #[test]
    fn empty_statement() {
        assert_eq!(norm(";"), "");
        assert_eq!(norm("   "), "");
    }

    #[test]
    fn idempotent_on_normalized_text() {
        let once = norm("int maxRetry = 5;");
        assert_eq!(norm(&once), once);
    }

    #[test]
    fn strings_and_whitespace() {
        assert_eq!(norm("log(  \"x y\" ,'c')"), "log ( <str> , <str> )");
        assert_eq!(norm("log(\"\")"), "log ( <str> )");
    }

    #[test]
    fn generic_and_array_declarations() {
        assert_eq!(
            norm("List<String> names = new ArrayList<>()"),
            "List < String > <id:List> = new ArrayList < > ( )"
        );
        assert_eq!(
            norm("byte[] buf = new byte[1024]"),
            "byte [ ] <id:byte> = new byte [ <num> ]"
        );
    }

    #[test]
    fn numbers_of_all_shapes() {
        assert_eq!(norm("x = 0x1F + 1.5e-3f + 10L"), "x = <num> + <num> + <num>");
    }

    #[test]
    fn declarations_carry_across_statements() {
        let p = LanguageProfile::java();
        let mut n = Normalizer::new(&p);
        assert_eq!(
            n.normalize("InputStream in = open()"),
            "InputStream <id:InputStream> = open ( )"
        );
        assert_eq!(n.normalize("in.close()"), "<id:InputStream> . close ( )");
    }

    #[test]
    fn keywords_do_not_declare() {
        assert_eq!(norm("return count"), "return count");
        assert_eq!(norm("new Reader(path)"), "new Reader ( path )");
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(s in "[a-zA-Z0-9_ =+;(),.\"<>\\[\\]-]{0,40}") {
            let p = LanguageProfile::java();
            let once = normalize_statement(&s, &p);
            prop_assert_eq!(normalize_statement(&once, &p), once.clone());
        }
    }
}
