//! Language profiles: the lexical conventions the extractors need to know
//! about a source language.
//!
//! A profile is plain configuration. It can be loaded from a TOML file with
//! the schema below; any key that is omitted keeps the value of the built-in
//! Java-like profile.
//!
//! ```toml
//! name = "java"
//! extensions = ["java"]
//! block_open = "{"
//! block_close = "}"
//! statement_terminator = ";"
//! line_comments = ["//"]
//! block_comments = [["/*", "*/"]]
//! string_delimiters = ["\"", "'"]
//! keywords = ["class", "int", "..."]
//! type_keywords = ["int", "long", "..."]
//! inherit_keywords = ["extends"]
//! implement_keywords = ["implements"]
//! import_keywords = ["import"]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LanguageProfile {
    pub name: String,
    /// File extensions (without the dot) picked up during ingestion.
    pub extensions: Vec<String>,
    pub block_open: String,
    pub block_close: String,
    pub statement_terminator: String,
    pub line_comments: Vec<String>,
    pub block_comments: Vec<(String, String)>,
    pub string_delimiters: Vec<String>,
    /// Reserved words. Stop-listed when they appear as code identifiers.
    pub keywords: Vec<String>,
    /// Built-in type names that can head a declaration (`int count`).
    pub type_keywords: Vec<String>,
    pub inherit_keywords: Vec<String>,
    pub implement_keywords: Vec<String>,
    /// Keywords introducing an imported or included name.
    pub import_keywords: Vec<String>,
    /// C++-style `class A : public B` inheritance.
    pub colon_inheritance: bool,
}

impl Default for LanguageProfile {
    fn default() -> Self {
        Self::java()
    }
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

const JAVA_KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
    "var",
];

const JAVA_TYPES: &[&str] = &[
    "boolean", "byte", "char", "double", "float", "int", "long", "short", "void", "var",
];

const C_KEYWORDS: &[&str] = &[
    "auto",
    "break",
    "case",
    "char",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extern",
    "float",
    "for",
    "goto",
    "if",
    "inline",
    "int",
    "long",
    "register",
    "restrict",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "struct",
    "switch",
    "typedef",
    "union",
    "unsigned",
    "void",
    "volatile",
    "while",
    "bool",
    "true",
    "false",
    "include",
    "define",
    "ifdef",
    "ifndef",
    "endif",
    "pragma",
    "class",
    "public",
    "private",
    "protected",
    "virtual",
    "namespace",
    "using",
    "template",
    "typename",
    "new",
    "delete",
    "this",
    "nullptr",
    "const_cast",
    "static_cast",
    "override",
];

const C_TYPES: &[&str] = &[
    "bool", "char", "double", "float", "int", "long", "short", "signed", "unsigned", "void", "size_t", "auto",
    "wchar_t",
];

impl LanguageProfile {
    /// Java-like defaults.
    pub fn java() -> Self {
        LanguageProfile {
            name: "java".into(),
            extensions: strings(&["java"]),
            block_open: "{".into(),
            block_close: "}".into(),
            statement_terminator: ";".into(),
            line_comments: strings(&["//"]),
            block_comments: vec![("/*".into(), "*/".into())],
            string_delimiters: strings(&["\"", "'"]),
            keywords: strings(JAVA_KEYWORDS),
            type_keywords: strings(JAVA_TYPES),
            inherit_keywords: strings(&["extends"]),
            implement_keywords: strings(&["implements"]),
            import_keywords: strings(&["import"]),
            colon_inheritance: false,
        }
    }

    /// C/C++-like defaults.
    pub fn c_like() -> Self {
        LanguageProfile {
            name: "c".into(),
            extensions: strings(&["c", "h", "cc", "cpp", "cxx", "hpp", "hh"]),
            block_open: "{".into(),
            block_close: "}".into(),
            statement_terminator: ";".into(),
            line_comments: strings(&["//"]),
            block_comments: vec![("/*".into(), "*/".into())],
            string_delimiters: strings(&["\"", "'"]),
            keywords: strings(C_KEYWORDS),
            type_keywords: strings(C_TYPES),
            inherit_keywords: Vec::new(),
            implement_keywords: Vec::new(),
            import_keywords: strings(&["#include"]),
            colon_inheritance: true,
        }
    }

    /// Resolves a built-in profile by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "java" => Some(Self::java()),
            "c" | "cpp" | "c++" => Some(Self::c_like()),
            _ => None,
        }
    }

    /// Resolves either a built-in name or a path to a TOML profile.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if let Some(p) = Self::builtin(name_or_path) {
            return Ok(p);
        }
        Self::load(Path::new(name_or_path))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let profile: LanguageProfile = toml::from_str(text).map_err(|e| Error::Profile(e.to_string()))?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_open.is_empty() || self.block_close.is_empty() {
            return Err(Error::Profile("block delimiters must be non-empty".into()));
        }
        if self.block_open == self.block_close {
            return Err(Error::Profile(format!(
                "block delimiters must differ (both are `{}`)",
                self.block_open
            )));
        }
        if self.line_comments.iter().all(|m| m.is_empty())
            && self.block_comments.iter().all(|(o, c)| o.is_empty() || c.is_empty())
        {
            return Err(Error::Profile(
                "at least one line or block comment marker is required".into(),
            ));
        }
        if self.statement_terminator.is_empty() {
            return Err(Error::Profile("statement terminator must be non-empty".into()));
        }
        if self.string_delimiters.iter().any(|d| d.is_empty()) {
            return Err(Error::Profile("string delimiters must be non-empty".into()));
        }
        Ok(())
    }

    pub fn is_keyword(&self, word: &str) -> bool {
        self.keywords.iter().any(|k| k == word)
    }

    pub fn is_type_keyword(&self, word: &str) -> bool {
        self.type_keywords.iter().any(|k| k == word)
    }

    pub(crate) fn matches_extension(&self, path: &Path) -> bool {
        path.extension()
            .and_then(|e| e.to_str())
            .map(|e| self.extensions.iter().any(|x| x.eq_ignore_ascii_case(e)))
            .unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_valid() {
        LanguageProfile::java().validate().unwrap();
        LanguageProfile::c_like().validate().unwrap();
    }

    #[test]
    fn toml_overrides_keep_defaults() {
        let p = LanguageProfile::from_toml("name = \"mini\"\nextensions = [\"mini\"]\n").unwrap();
        assert_eq!(p.name, "mini");
        assert_eq!(p.block_open, "{");
        assert!(p.is_keyword("class"));
    }

    #[test]
    fn rejects_equal_delimiters() {
        let err = LanguageProfile::from_toml("block_open = \"|\"\nblock_close = \"|\"\n");
        assert!(matches!(err, Err(Error::Profile(_))));
    }

    #[test]
    fn rejects_missing_comment_markers() {
        let err = LanguageProfile::from_toml("line_comments = []\nblock_comments = []\n");
        assert!(matches!(err, Err(Error::Profile(_))));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(LanguageProfile::from_toml("colour = \"blue\"\n").is_err());
    }
}
