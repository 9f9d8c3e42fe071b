//! Labelled trees in bracketed notation, shared by the benchmark corpus,
//! the frequency model and the evaluation metric.

use std::fmt;

use crate::symbol::Sym;

/// A tree over node labels with word tokens at the leaves, e.g.
/// `(S (NP Sam) (VP (V laughs)))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabelTree {
    pub label: Sym,
    pub children: Vec<LabelChild>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LabelChild {
    Node(LabelTree),
    Leaf(String),
}

impl LabelTree {
    pub fn new(label: impl Into<Sym>, children: Vec<LabelChild>) -> LabelTree {
        LabelTree {
            label: label.into(),
            children,
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                LabelChild::Node(t) => t.leaf_count(),
                LabelChild::Leaf(_) => 1,
            })
            .sum()
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(|c| match c {
                LabelChild::Node(t) => t.node_count(),
                LabelChild::Leaf(_) => 0,
            })
            .sum::<usize>()
    }

    /// Node labels in preorder; token leaves are excluded.
    pub fn preorder_labels(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.walk(&mut out);
        out
    }

    fn walk(&self, out: &mut Vec<Sym>) {
        out.push(self.label);
        for c in &self.children {
            if let LabelChild::Node(t) = c {
                t.walk(out);
            }
        }
    }

    /// Child subtrees (token leaves skipped).
    pub fn subtrees(&self) -> impl Iterator<Item = &LabelTree> {
        self.children.iter().filter_map(|c| match c {
            LabelChild::Node(t) => Some(t),
            LabelChild::Leaf(_) => None,
        })
    }

    /// Rewrites every node label through `map`; structure is unchanged.
    pub fn relabel(&self, map: &dyn Fn(Sym) -> Sym) -> LabelTree {
        LabelTree {
            label: map(self.label),
            children: self
                .children
                .iter()
                .map(|c| match c {
                    LabelChild::Node(t) => LabelChild::Node(t.relabel(map)),
                    LabelChild::Leaf(w) => LabelChild::Leaf(w.clone()),
                })
                .collect(),
        }
    }
}

impl fmt::Display for LabelTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        for c in &self.children {
            match c {
                LabelChild::Node(t) => write!(f, " {t}")?,
                LabelChild::Leaf(w) => write!(f, " {w}")?,
            }
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for TreeParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.message, self.offset)
    }
}

impl std::error::Error for TreeParseError {}

/// Parses one bracketed tree. Atoms are whitespace- and paren-delimited;
/// a parenthesised form is a node whose first atom is the label.
pub fn parse_bracketed(text: &str) -> Result<LabelTree, TreeParseError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    skip_ws(bytes, &mut pos);
    let tree = parse_node(text, bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(TreeParseError {
            offset: pos,
            message: "trailing input after tree".to_owned(),
        });
    }
    Ok(tree)
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn atom<'a>(text: &'a str, bytes: &[u8], pos: &mut usize) -> Option<&'a str> {
    let start = *pos;
    while *pos < bytes.len() {
        let b = bytes[*pos];
        if b.is_ascii_whitespace() || b == b'(' || b == b')' {
            break;
        }
        *pos += 1;
    }
    if *pos > start {
        Some(&text[start..*pos])
    } else {
        None
    }
}

fn parse_node(text: &str, bytes: &[u8], pos: &mut usize) -> Result<LabelTree, TreeParseError> {
    if bytes.get(*pos) != Some(&b'(') {
        return Err(TreeParseError {
            offset: *pos,
            message: "expected `(`".to_owned(),
        });
    }
    *pos += 1;
    skip_ws(bytes, pos);
    let label = atom(text, bytes, pos).ok_or(TreeParseError {
        offset: *pos,
        message: "expected node label".to_owned(),
    })?;
    let mut children = Vec::new();
    loop {
        skip_ws(bytes, pos);
        match bytes.get(*pos) {
            Some(b')') => {
                *pos += 1;
                return Ok(LabelTree::new(label, children));
            }
            Some(b'(') => children.push(LabelChild::Node(parse_node(text, bytes, pos)?)),
            Some(_) => {
                let word = atom(text, bytes, pos).expect("non-delimiter byte starts an atom");
                children.push(LabelChild::Leaf(word.to_owned()));
            }
            None => {
                return Err(TreeParseError {
                    offset: *pos,
                    message: "unbalanced brackets".to_owned(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_classic_example() {
        let t = parse_bracketed("(S (NP Sam) (VP (V laughs)))").unwrap();
        assert_eq!(t.node_count(), 4);
        assert_eq!(t.leaf_count(), 2);
        let labels: Vec<&str> = t.preorder_labels().iter().map(|s| s.as_str()).collect();
        assert_eq!(labels, vec!["S", "NP", "VP", "V"]);
    }

    #[test]
    fn display_round_trips() {
        let text = "(S (NP Sam) (VP (V laughs)))";
        let t = parse_bracketed(text).unwrap();
        assert_eq!(t.to_string(), text);
    }

    #[test]
    fn unbalanced_brackets_fail() {
        assert!(parse_bracketed("(S (NP Sam)").is_err());
        assert!(parse_bracketed("(S (NP Sam)))").is_err());
    }

    #[test]
    fn parser_never_panics_on_garbage() {
        let mut state = 9u64;
        for _ in 0..5000 {
            let len = (state % 16) as usize;
            let text: String = (0..len)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                    let pool = b"(S)NP x";
                    pool[(state >> 33) as usize % pool.len()] as char
                })
                .collect();
            let _ = parse_bracketed(&text);
        }
    }

    #[test]
    fn relabel_rewrites_nodes_only() {
        let t = parse_bracketed("(S (N1 cats) (VP purr))").unwrap();
        let n1 = Sym::new("N1");
        let n = Sym::new("N");
        let mapped = t.relabel(&|l| if l == n1 { n } else { l });
        assert_eq!(mapped.to_string(), "(S (N cats) (VP purr))");
    }
}
