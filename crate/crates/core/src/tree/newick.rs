//! Newick reading and writing.
//!
//! Accepted subset: `tree := subtree ";"`, with optional `:length` after any
//! subtree and optional labels on internal nodes. Branch lengths and internal
//! labels are checked for syntax and then dropped. Labels are either
//! unquoted runs of characters other than `()[]',:;` and whitespace, or
//! single-quoted strings with `''` as the escaped quote. Bracketed comments
//! `[...]` are skipped wherever whitespace is allowed.
//!
//! The output is rooted at the internal node adjacent to the leaf with the
//! smallest label (byte order), and children are listed in order of their
//! smallest descendant label. That string is the canonical form of the tree.

use std::collections::HashSet;
use std::fmt;

use super::Tree;
use crate::error::{Error, Result};

/// Byte encoding that is equal for two trees iff they have the same
/// leaf-labeled topology.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(Box<[u8]>);

impl CanonicalForm {
    pub fn of(tree: &Tree) -> CanonicalForm {
        CanonicalForm(write_newick(tree).into_bytes().into_boxed_slice())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        // Built from a String.
        std::str::from_utf8(&self.0).expect("canonical form is utf-8")
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.as_str())
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

struct RawNode {
    children: Vec<usize>,
    label: Option<String>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) -> Result<()> {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                Some(b'[') => {
                    let start = self.pos;
                    while self.peek().is_some_and(|c| c != b']') {
                        self.pos += 1;
                    }
                    if self.peek().is_none() {
                        return Err(Error::syntax(start, "unterminated comment"));
                    }
                    self.pos += 1;
                }
                _ => return Ok(()),
            }
        }
    }

    /// Reads a label if one starts here; `None` when the next byte cannot
    /// begin a label.
    fn label(&mut self) -> Result<Option<String>> {
        match self.peek() {
            Some(b'\'') => {
                let start = self.pos;
                self.pos += 1;
                let mut out = Vec::new();
                loop {
                    match self.peek() {
                        None => return Err(Error::syntax(start, "unterminated quoted label")),
                        Some(b'\'') if self.src.get(self.pos + 1) == Some(&b'\'') => {
                            out.push(b'\'');
                            self.pos += 2;
                        }
                        Some(b'\'') => {
                            self.pos += 1;
                            break;
                        }
                        Some(c) => {
                            out.push(c);
                            self.pos += 1;
                        }
                    }
                }
                if out.is_empty() {
                    return Err(Error::syntax(start, "empty quoted label"));
                }
                String::from_utf8(out)
                    .map(Some)
                    .map_err(|_| Error::syntax(start, "label is not valid utf-8"))
            }
            _ => {
                let start = self.pos;
                while self.peek().is_some_and(is_label_byte) {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Ok(None);
                }
                std::str::from_utf8(&self.src[start..self.pos])
                    .map(|s| Some(s.to_string()))
                    .map_err(|_| Error::syntax(start, "label is not valid utf-8"))
            }
        }
    }

    fn branch_length(&mut self) -> Result<()> {
        self.skip_ws()?;
        if self.peek() != Some(b':') {
            return Ok(());
        }
        self.pos += 1;
        self.skip_ws()?;
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, b'.' | b'-' | b'+' | b'e' | b'E'))
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        if text.parse::<f64>().is_err() {
            return Err(Error::syntax(start, "expected a decimal branch length"));
        }
        Ok(())
    }
}

fn is_label_byte(c: u8) -> bool {
    !c.is_ascii_whitespace() && !matches!(c, b'(' | b')' | b'[' | b']' | b'\'' | b',' | b':' | b';')
}

/// Parses a Newick string into an unrooted topology. A root of degree two
/// is suppressed; multifurcations are rejected.
pub fn parse_newick(text: &str) -> Result<Tree> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut nodes: Vec<RawNode> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    let mut root: Option<usize> = None;
    let mut expect_subtree = true;

    loop {
        p.skip_ws()?;
        let here = p.pos;
        if expect_subtree {
            let id = nodes.len();
            if let Some(&parent) = open.last() {
                nodes[parent].children.push(id);
            } else if root.is_some() {
                return Err(Error::syntax(here, "expected ';' after the tree"));
            } else {
                root = Some(id);
            }
            if p.peek() == Some(b'(') {
                p.pos += 1;
                nodes.push(RawNode {
                    children: Vec::new(),
                    label: None,
                });
                open.push(id);
            } else {
                let label = p.label()?.ok_or_else(|| match p.peek() {
                    None => Error::syntax(here, "unexpected end of input"),
                    Some(_) => Error::syntax(here, "expected '(' or a leaf label"),
                })?;
                nodes.push(RawNode {
                    children: Vec::new(),
                    label: Some(label),
                });
                p.branch_length()?;
                expect_subtree = false;
            }
            continue;
        }
        match p.peek() {
            Some(b',') if !open.is_empty() => {
                p.pos += 1;
                expect_subtree = true;
            }
            Some(b')') if !open.is_empty() => {
                p.pos += 1;
                open.pop();
                p.skip_ws()?;
                // Internal labels are read and discarded.
                p.label()?;
                p.branch_length()?;
            }
            Some(b';') if open.is_empty() => {
                p.pos += 1;
                p.skip_ws()?;
                if p.pos != p.src.len() {
                    return Err(Error::syntax(p.pos, "trailing characters after ';'"));
                }
                break;
            }
            None => {
                let msg = if open.is_empty() {
                    "missing ';'"
                } else {
                    "unclosed '('"
                };
                return Err(Error::syntax(here, msg));
            }
            Some(c) => {
                return Err(Error::syntax(
                    here,
                    format!("unexpected character {:?}", c as char),
                ));
            }
        }
    }

    unroot(nodes, root.expect("root assigned"))
}

fn unroot(nodes: Vec<RawNode>, root: usize) -> Result<Tree> {
    let mut labels = Vec::new();
    let mut seen = HashSet::new();
    // Old id -> new id; leaves first, in order of appearance.
    let mut new_id = vec![usize::MAX; nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        if node.children.is_empty() {
            let label = node.label.clone().expect("leaves carry labels");
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label));
            }
            new_id[i] = labels.len();
            labels.push(label);
        }
    }
    let n = labels.len();
    if n < 3 {
        return Err(Error::TooFewLeaves { min: 3, got: n });
    }

    let describe = |i: usize| -> String {
        match &nodes[i].label {
            Some(l) => format!("{l:?}"),
            None => format!("#{i} (unlabeled internal)"),
        }
    };
    let root_children = nodes[root].children.len();
    let suppress_root = root_children == 2;
    if root_children != 2 && root_children != 3 {
        return Err(Error::NonBinary {
            node: format!("root {}", describe(root)),
            degree: root_children,
        });
    }
    let mut next = n;
    for (i, node) in nodes.iter().enumerate() {
        if node.children.is_empty() || (i == root && suppress_root) {
            continue;
        }
        if i != root && node.children.len() != 2 {
            return Err(Error::NonBinary {
                node: describe(i),
                degree: node.children.len() + 1,
            });
        }
        new_id[i] = next;
        next += 1;
    }

    let mut edges = Vec::with_capacity(2 * n - 3);
    for (i, node) in nodes.iter().enumerate() {
        if i == root && suppress_root {
            continue;
        }
        for &c in &node.children {
            edges.push((new_id[i], new_id[c]));
        }
    }
    if suppress_root {
        let [a, b] = [nodes[root].children[0], nodes[root].children[1]];
        edges.push((new_id[a], new_id[b]));
    }
    Tree::from_edges(labels, &edges)
}

fn needs_quotes(label: &str) -> bool {
    label.is_empty() || !label.bytes().all(is_label_byte)
}

/// `label` as it must appear in Newick text.
pub(crate) fn quote_label(label: &str) -> String {
    let mut out = String::new();
    push_label(&mut out, label);
    out
}

fn push_label(out: &mut String, label: &str) {
    if needs_quotes(label) {
        out.push('\'');
        out.push_str(&label.replace('\'', "''"));
        out.push('\'');
    } else {
        out.push_str(label);
    }
}

/// Deterministic Newick rendering; see the module docs for the convention.
pub fn write_newick(tree: &Tree) -> String {
    let n = tree.n_leaves();
    let labels = tree.labels();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| labels[a].as_bytes().cmp(labels[b].as_bytes()));
    let mut rank = vec![0usize; n];
    for (r, &leaf) in order.iter().enumerate() {
        rank[leaf] = r;
    }
    let smallest = order[0];
    let root = tree.neighbors(smallest).next().expect("leaf has a neighbor");

    // Preorder from the root, then fill bottom-up.
    let nodes = tree.n_nodes();
    let mut parent = vec![usize::MAX; nodes];
    let mut preorder = Vec::with_capacity(nodes);
    let mut stack = vec![root];
    parent[root] = root;
    while let Some(v) = stack.pop() {
        preorder.push(v);
        for w in tree.neighbors(v) {
            if parent[w] == usize::MAX {
                parent[w] = v;
                stack.push(w);
            }
        }
    }
    let mut min_rank = vec![usize::MAX; nodes];
    let mut text: Vec<String> = vec![String::new(); nodes];
    for &v in preorder.iter().rev() {
        if v < n {
            min_rank[v] = rank[v];
            push_label(&mut text[v], &labels[v]);
            continue;
        }
        let mut kids: Vec<usize> = tree.neighbors(v).filter(|&w| w != parent[v]).collect();
        if v == root {
            kids = tree.neighbors(v).collect();
        }
        kids.sort_by_key(|&w| min_rank[w]);
        min_rank[v] = min_rank[kids[0]];
        let mut s = String::with_capacity(kids.iter().map(|&w| text[w].len() + 1).sum::<usize>() + 2);
        s.push('(');
        for (i, &w) in kids.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&std::mem::take(&mut text[w]));
        }
        s.push(')');
        text[v] = s;
    }
    let mut out = std::mem::take(&mut text[root]);
    out.push(';');
    out
}
