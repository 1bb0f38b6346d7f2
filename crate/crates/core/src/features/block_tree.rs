//! Delimiter-bounded block structure of a program.

use std::collections::BTreeSet;

use super::normalize::Normalizer;
use crate::corpus::{tokenize_code, LanguageProfile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub raw: String,
    pub normalized: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Statement(Statement),
    Block(BlockNode),
}

/// A block: the statements it owns directly, interleaved with nested blocks
/// in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockNode {
    pub items: Vec<Item>,
    pub depth: usize,
}

impl BlockNode {
    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.items.iter().filter_map(|i| match i {
            Item::Statement(s) => Some(s),
            Item::Block(_) => None,
        })
    }

    pub fn children(&self) -> impl Iterator<Item = &BlockNode> {
        self.items.iter().filter_map(|i| match i {
            Item::Block(b) => Some(b),
            Item::Statement(_) => None,
        })
    }

    pub fn owns_statements(&self) -> bool {
        self.statements().next().is_some()
    }

    /// Normalized statements owned at this level.
    pub fn own_text(&self) -> Vec<&str> {
        self.statements().map(|s| s.normalized.as_str()).collect()
    }

    /// Canonical text of the whole subtree: statements end in ` ;`, nested
    /// blocks are wrapped in `{ ... }`.
    pub fn subtree_key(&self) -> String {
        let mut parts = Vec::new();
        for item in &self.items {
            match item {
                Item::Statement(s) => parts.push(format!("{} ;", s.normalized)),
                Item::Block(b) => parts.push(format!("{{ {} }}", b.subtree_key())),
            }
        }
        parts.join(" ")
    }

    /// Words owned by this node's own statements.
    pub fn own_words(&self, profile: &LanguageProfile) -> BTreeSet<String> {
        self.statements().flat_map(|s| tokenize_code(&s.raw, profile)).collect()
    }

    /// Own words minus every word owned anywhere below this node.
    pub fn surface_words(&self, profile: &LanguageProfile) -> BTreeSet<String> {
        let mut below = BTreeSet::new();
        for child in self.children() {
            child.collect_words(profile, &mut below);
        }
        self.own_words(profile)
            .into_iter()
            .filter(|w| !below.contains(w))
            .collect()
    }

    fn collect_words(&self, profile: &LanguageProfile, out: &mut BTreeSet<String>) {
        out.extend(self.own_words(profile));
        for child in self.children() {
            child.collect_words(profile, out);
        }
    }

    /// Post-order traversal: leaves first, root last.
    pub fn post_order(&self) -> Vec<&BlockNode> {
        let mut out = Vec::new();
        self.visit_post(&mut out);
        out
    }

    fn visit_post<'a>(&'a self, out: &mut Vec<&'a BlockNode>) {
        for child in self.children() {
            child.visit_post(out);
        }
        out.push(self);
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().map(BlockNode::node_count).sum::<usize>()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockTree {
    pub root: BlockNode,
    /// Set when delimiters did not balance and the tree was repaired.
    pub unbalanced: bool,
}

struct Builder<'p> {
    stack: Vec<BlockNode>,
    normalizer: Normalizer<'p>,
    pending: String,
}

impl Builder<'_> {
    fn flush(&mut self) {
        let raw = self.pending.split_whitespace().collect::<Vec<_>>().join(" ");
        self.pending.clear();
        if raw.is_empty() {
            return;
        }
        let normalized = self.normalizer.normalize(&raw);
        if normalized.is_empty() {
            return;
        }
        self.stack
            .last_mut()
            .expect("root is never popped")
            .items
            .push(Item::Statement(Statement { raw, normalized }));
    }

    fn close(&mut self) {
        let node = self.stack.pop().expect("close only called with an open block");
        if node.items.is_empty() {
            return;
        }
        self.stack
            .last_mut()
            .expect("root is never popped")
            .items
            .push(Item::Block(node));
    }
}

/// Builds the block tree of comment-free source.
///
/// Text before an opening delimiter is a statement of the enclosing level
/// (a class or method header). Terminators inside parentheses do not split
/// statements, so `for (;;)` headers stay whole. Empty blocks are dropped.
/// Unbalanced delimiters are repaired: stray closers are ignored and open
/// blocks are closed at end of input, and the tree is flagged.
pub fn build_block_tree(code: &str, profile: &LanguageProfile) -> BlockTree {
    let mut b = Builder {
        stack: vec![BlockNode::default()],
        normalizer: Normalizer::new(profile),
        pending: String::new(),
    };
    let mut unbalanced = false;
    let mut paren_depth = 0usize;
    let open = profile.block_open.as_str();
    let close = profile.block_close.as_str();
    let term = profile.statement_terminator.as_str();

    let mut i = 0;
    while i < code.len() {
        let rest = &code[i..];
        if rest.starts_with(open) {
            b.flush();
            let depth = b.stack.len();
            b.stack.push(BlockNode {
                items: Vec::new(),
                depth,
            });
            paren_depth = 0;
            i += open.len();
        } else if rest.starts_with(close) {
            b.flush();
            if b.stack.len() > 1 {
                b.close();
            } else {
                unbalanced = true;
            }
            paren_depth = 0;
            i += close.len();
        } else if rest.starts_with(term) && paren_depth == 0 {
            b.flush();
            i += term.len();
        } else {
            let c = rest.chars().next().expect("non-empty rest");
            match c {
                '(' => paren_depth += 1,
                ')' => paren_depth = paren_depth.saturating_sub(1),
                _ => {}
            }
            b.pending.push(c);
            i += c.len_utf8();
        }
    }
    b.flush();
    if b.stack.len() > 1 {
        unbalanced = true;
        while b.stack.len() > 1 {
            b.close();
        }
    }
    BlockTree {
        root: b.stack.pop().expect("root"),
        unbalanced,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(code: &str) -> BlockTree {
        build_block_tree(code, &LanguageProfile::java())
    }

    #[test]
    fn nested_statements_land_on_their_level() {
        let t = tree("a; { b; { c; } d; }");
        assert!(!t.unbalanced);
        assert_eq!(t.root.own_text(), ["a"]);
        let child = t.root.children().next().unwrap();
        assert_eq!(child.own_text(), ["b", "d"]);
        assert_eq!(child.depth, 1);
        let grandchild = child.children().next().unwrap();
        assert_eq!(grandchild.own_text(), ["c"]);
        assert_eq!(grandchild.depth, 2);
        assert_eq!(t.root.node_count(), 3);
        assert_eq!(t.root.subtree_key(), "a ; { b ; { c ; } d ; }");
    }

    #[test]
    fn flat_source_is_one_node() {
        let t = tree("a; b; c;");
        assert_eq!(t.root.node_count(), 1);
        assert_eq!(t.root.own_text(), ["a", "b", "c"]);
    }

    #[test]
    fn empty_block_dropped() {
        let t = tree("{ }");
        assert_eq!(t.root.node_count(), 1);
        assert!(t.root.items.is_empty());
    }

    #[test]
    fn headers_belong_to_the_enclosing_level() {
        let t = tree("class Foo { void run() { go(); } }");
        assert_eq!(t.root.own_text(), ["class Foo"]);
        let class_body = t.root.children().next().unwrap();
        assert_eq!(class_body.own_text(), ["void <id:void> ( )"]);
    }

    #[test]
    fn for_header_is_not_split() {
        let t = tree("for (int i = 0; i < n; i++) { work(i); }");
        assert_eq!(
            t.root.own_text(),
            ["for ( int <id:int> = <num> ; <id:int> < n ; <id:int> + + )"]
        );
    }

    #[test]
    fn unbalanced_open_is_closed_at_eof() {
        let t = tree("a; { b; { c;");
        assert!(t.unbalanced);
        assert_eq!(t.root.node_count(), 3);
    }

    #[test]
    fn stray_close_is_ignored() {
        let t = tree("a; } b;");
        assert!(t.unbalanced);
        assert_eq!(t.root.own_text(), ["a", "b"]);
    }

    #[test]
    fn surface_words_exclude_descendants() {
        let p = LanguageProfile::java();
        let t = tree("outerName(); sharedWord(); { innerName(); { sharedWord(); } }");
        let root_surface = t.root.surface_words(&p);
        assert!(root_surface.contains("outer"));
        assert!(!root_surface.contains("shared"));
        let child = t.root.children().next().unwrap();
        assert!(child.surface_words(&p).contains("inner"));
        let grandchild = child.children().next().unwrap();
        assert!(grandchild.surface_words(&p).contains("shared"));
    }
}
