//! Evaluation: the tree-closeness plausibility metric, coverage, and the
//! plausibility aggregate over best-of-k parses.
//!
//! Closeness compares preorder label walks. The longest contiguous sublist
//! common to the test walk and the benchmark walk is repeatedly removed
//! from the test walk (never from the benchmark walk); the score is the
//! mean matched-piece length divided by the benchmark walk length.

use std::collections::BTreeMap;
use std::fmt;

use crate::category::Category;
use crate::chart::{parse, ParseError, ParserBounds, Token};
use crate::grammar::{FileError, Grammar, Lexicon};
use crate::symbol::Sym;
use crate::tree::LabelTree;

/// Label rewriting used to put two trees into one labelling scheme.
/// Unmapped labels map to themselves. File format: `from to` pairs, one
/// per line, `#` comments.
#[derive(Clone, Debug, Default)]
pub struct LabelMap {
    map: BTreeMap<Sym, Sym>,
}

impl LabelMap {
    pub fn identity() -> LabelMap {
        LabelMap::default()
    }

    pub fn insert(&mut self, from: impl Into<Sym>, to: impl Into<Sym>) {
        self.map.insert(from.into(), to.into());
    }

    pub fn apply(&self, label: Sym) -> Sym {
        self.map.get(&label).copied().unwrap_or(label)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn load(text: &str) -> Result<LabelMap, FileError> {
        let mut map = LabelMap::identity();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [from, to] = fields.as_slice() else {
                return Err(FileError {
                    line: lineno + 1,
                    message: "expected `from to`".into(),
                });
            };
            map.insert(*from, *to);
        }
        Ok(map)
    }
}

/// Rewrites node labels through the map; structure is unchanged.
pub fn normalize(tree: &LabelTree, map: &LabelMap) -> LabelTree {
    tree.relabel(&|l| map.apply(l))
}

/// Closeness of a test tree to a benchmark tree, in [0, 1]. 1 means the
/// normalized walks match exactly; 0 means no label in common.
pub fn closeness(test: &LabelTree, bench: &LabelTree, map: &LabelMap) -> f64 {
    let walk_t = normalize(test, map).preorder_labels();
    let walk_b = normalize(bench, map).preorder_labels();
    closeness_of_walks(&walk_t, &walk_b)
}

/// The greedy removal loop over preorder walks. Ties between equally long
/// common sublists are broken by the leftmost start in the test walk, then
/// the leftmost occurrence in the benchmark walk.
pub fn closeness_of_walks(test: &[Sym], bench: &[Sym]) -> f64 {
    let mut remaining: Vec<Sym> = test.to_vec();
    let mut piece_lengths: Vec<usize> = Vec::new();
    while !remaining.is_empty() {
        let Some((start, len)) = longest_common_piece(&remaining, bench) else {
            break;
        };
        piece_lengths.push(len);
        remaining.drain(start..start + len);
    }
    if piece_lengths.is_empty() {
        return 0.0;
    }
    let mean = piece_lengths.iter().sum::<usize>() as f64 / piece_lengths.len() as f64;
    mean / bench.len() as f64
}

/// Longest sublist of `test` occurring contiguously in `bench`; leftmost
/// start on ties. Returns its start offset in `test` and its length.
fn longest_common_piece(test: &[Sym], bench: &[Sym]) -> Option<(usize, usize)> {
    for len in (1..=test.len().min(bench.len())).rev() {
        for start in 0..=test.len() - len {
            let piece = &test[start..start + len];
            if bench.windows(len).any(|w| w == piece) {
                return Some((start, len));
            }
        }
    }
    None
}

/// Percentage of sentences the grammar parses within the bounds, to one
/// decimal place.
pub fn coverage(
    grammar: &Grammar,
    lexicon: &Lexicon,
    sentences: &[Vec<Token>],
    bounds: ParserBounds,
    start: &Category,
) -> Result<f64, ParseError> {
    if sentences.is_empty() {
        return Ok(0.0);
    }
    let mut parsed = 0usize;
    for tokens in sentences {
        let existence = ParserBounds::new(1, bounds.max_edges);
        if !parse(grammar, lexicon, tokens, existence, start)?
            .trees
            .is_empty()
        {
            parsed += 1;
        }
    }
    let pct = 100.0 * parsed as f64 / sentences.len() as f64;
    Ok((pct * 10.0).round() / 10.0)
}

#[derive(Debug, Clone)]
pub enum EvalError {
    Parse(ParseError),
    /// Plausibility is defined only over sentences the grammar generates;
    /// the caller pre-filters, mirroring the construction of the sample.
    Unparseable {
        id: String,
    },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Parse(e) => write!(f, "{e}"),
            EvalError::Unparseable { id } => write!(f, "sentence {id} is not parseable"),
        }
    }
}

impl std::error::Error for EvalError {}

impl From<ParseError> for EvalError {
    fn from(e: ParseError) -> EvalError {
        EvalError::Parse(e)
    }
}

/// Per-sentence best-of-k closeness and the aggregate mean.
#[derive(Clone, Debug)]
pub struct PlausibilityReport {
    pub per_sentence: Vec<(String, f64)>,
    pub mean: f64,
}

/// Enumerates up to `sample_k` parses per sentence in the parser's
/// deterministic order, scores each against the benchmark tree, and keeps
/// the best; returns the arithmetic mean over sentences.
pub fn plausibility(
    grammar: &Grammar,
    lexicon: &Lexicon,
    items: &[(String, Vec<Token>, &LabelTree)],
    bounds: ParserBounds,
    sample_k: usize,
    map: &LabelMap,
    start: &Category,
) -> Result<PlausibilityReport, EvalError> {
    let mut per_sentence = Vec::new();
    let mut total = 0.0;
    for (id, tokens, bench) in items {
        let sample = ParserBounds::new(sample_k.max(1), bounds.max_edges);
        let outcome = parse(grammar, lexicon, tokens, sample, start)?;
        if outcome.trees.is_empty() {
            return Err(EvalError::Unparseable { id: id.clone() });
        }
        let best = outcome
            .trees
            .iter()
            .map(|t| closeness(&t.to_label_tree(), bench, map))
            .fold(0.0f64, f64::max);
        per_sentence.push((id.clone(), best));
        total += best;
    }
    let mean = if per_sentence.is_empty() {
        0.0
    } else {
        total / per_sentence.len() as f64
    };
    Ok(PlausibilityReport { per_sentence, mean })
}
