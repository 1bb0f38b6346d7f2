//! Separates program text into code, comments and string literals.

use super::profile::LanguageProfile;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Code(String),
    Comment(String),
    /// A string literal: its delimiter and raw body.
    Literal {
        delim: String,
        body: String,
    },
}

/// Source text with comments removed and string literals emptied.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stripped {
    pub segments: Vec<Segment>,
    pub warnings: Vec<String>,
}

impl Stripped {
    /// Code with comments replaced by whitespace and every string literal
    /// reduced to an empty pair of delimiters (`""`).
    pub fn code(&self) -> String {
        let mut out = String::new();
        for seg in &self.segments {
            match seg {
                Segment::Code(c) => out.push_str(c),
                Segment::Comment(c) => {
                    out.push(' ');
                    // line structure survives so later diagnostics can count lines
                    for _ in c.matches('\n') {
                        out.push('\n');
                    }
                }
                Segment::Literal { delim, .. } => {
                    out.push_str(delim);
                    out.push_str(delim);
                }
            }
        }
        out
    }

    /// Code with comments replaced by whitespace and literals left intact.
    pub fn code_with_literals(&self) -> String {
        let mut out = String::new();
        for seg in &self.segments {
            match seg {
                Segment::Code(c) => out.push_str(c),
                Segment::Comment(c) => {
                    out.push(' ');
                    for _ in c.matches('\n') {
                        out.push('\n');
                    }
                }
                Segment::Literal { delim, body } => {
                    out.push_str(delim);
                    out.push_str(body);
                    out.push_str(delim);
                }
            }
        }
        out
    }

    pub fn comments(&self) -> impl Iterator<Item = &str> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Comment(c) => Some(c.as_str()),
            _ => None,
        })
    }
}

fn push_code(segments: &mut Vec<Segment>, text: &str) {
    if text.is_empty() {
        return;
    }
    if let Some(Segment::Code(last)) = segments.last_mut() {
        last.push_str(text);
    } else {
        segments.push(Segment::Code(text.to_string()));
    }
}

/// Splits `source` into code, comment and literal segments.
///
/// An unterminated block comment swallows the rest of the file and records a
/// warning. An unterminated string literal ends at the next newline.
pub fn strip(source: &str, profile: &LanguageProfile) -> Stripped {
    let mut out = Stripped::default();
    let mut code_start = 0;
    let mut i = 0;

    'scan: while i < source.len() {
        if !source.is_char_boundary(i) {
            i += 1;
            continue;
        }
        let rest = &source[i..];

        for marker in profile.line_comments.iter().filter(|m| !m.is_empty()) {
            if rest.starts_with(marker.as_str()) {
                push_code(&mut out.segments, &source[code_start..i]);
                let body_start = i + marker.len();
                let end = source[body_start..]
                    .find('\n')
                    .map(|p| body_start + p)
                    .unwrap_or(source.len());
                out.segments.push(Segment::Comment(source[body_start..end].to_string()));
                i = end;
                code_start = end;
                continue 'scan;
            }
        }

        for (open, close) in &profile.block_comments {
            if open.is_empty() || close.is_empty() || !rest.starts_with(open.as_str()) {
                continue;
            }
            push_code(&mut out.segments, &source[code_start..i]);
            let body_start = i + open.len();
            match source[body_start..].find(close.as_str()) {
                Some(p) => {
                    out.segments
                        .push(Segment::Comment(source[body_start..body_start + p].to_string()));
                    i = body_start + p + close.len();
                }
                None => {
                    let line = source[..i].matches('\n').count() + 1;
                    out.warnings.push(format!(
                        "unterminated block comment starting on line {line}; rest of file treated as comment"
                    ));
                    out.segments.push(Segment::Comment(source[body_start..].to_string()));
                    i = source.len();
                }
            }
            code_start = i;
            continue 'scan;
        }

        for delim in &profile.string_delimiters {
            if !rest.starts_with(delim.as_str()) {
                continue;
            }
            push_code(&mut out.segments, &source[code_start..i]);
            let body_start = i + delim.len();
            let mut body_end = source.len();
            let mut end = source.len();
            let mut escaped = false;
            for (off, ch) in source[body_start..].char_indices() {
                let at = body_start + off;
                if escaped {
                    escaped = false;
                } else if ch == '\\' {
                    escaped = true;
                } else if ch == '\n' {
                    body_end = at;
                    end = at;
                    break;
                } else if source[at..].starts_with(delim.as_str()) {
                    body_end = at;
                    end = at + delim.len();
                    break;
                }
            }
            out.segments.push(Segment::Literal {
                delim: delim.clone(),
                body: source[body_start.min(body_end)..body_end].to_string(),
            });
            i = end;
            code_start = i;
            continue 'scan;
        }

        i += rest.chars().next().map(char::len_utf8).unwrap_or(1);
    }
    push_code(&mut out.segments, &source[code_start..]);
    out
}
