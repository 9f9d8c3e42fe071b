//! Corpus ingestion: tagged sentences, benchmark parse trees, and
//! deterministic corpus splits.
//!
//! All three formats are line-oriented with `#` starting a comment. A line
//! whose first token is `#` immediately followed by text (no space) carries
//! a sentence id, e.g. `#s012 Sam_NP1 laughs_VVZ`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::chart::Token;
use crate::symbol::Sym;
use crate::tree::{parse_bracketed, LabelTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedSentence {
    pub id: String,
    pub tokens: Vec<(String, Sym)>,
    pub raw: String,
}

impl TaggedSentence {
    pub fn parser_tokens(&self) -> Vec<Token> {
        self.tokens
            .iter()
            .map(|(w, t)| Token::new(w.clone(), *t))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchTree {
    pub id: String,
    pub tree: LabelTree,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusSplit {
    pub pretrain: Vec<String>,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CorpusError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl std::error::Error for CorpusError {}

fn cerr(line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError {
        line,
        message: message.into(),
    }
}

/// Splits an `#id` prefix off a data line. `# ...` (hash then space or end
/// of line) is a comment; `#id ...` names the record.
fn split_id(line: &str) -> Option<(Option<&str>, &str)> {
    if let Some(rest) = line.strip_prefix('#') {
        if rest.is_empty() || rest.starts_with(char::is_whitespace) {
            return None; // comment line
        }
        let (id, body) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        return Some((Some(id), body.trim()));
    }
    Some((None, line))
}

/// Parses `word_TAG` sentences, one per line. Sentences without an `#id`
/// prefix get their 1-based position as id.
pub fn load_tagged(text: &str) -> Result<Vec<TaggedSentence>, CorpusError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let Some((id, body)) = split_id(line) else {
            continue;
        };
        if body.is_empty() {
            return Err(cerr(lineno, "empty sentence"));
        }
        let mut tokens = Vec::new();
        for (col, tok) in body.split_whitespace().enumerate() {
            let Some((word, tag)) = tok.rsplit_once('_') else {
                return Err(cerr(
                    lineno,
                    format!("token {} has no _TAG suffix", col + 1),
                ));
            };
            if word.is_empty() || tag.is_empty() {
                return Err(cerr(lineno, format!("malformed token `{tok}`")));
            }
            tokens.push((word.to_owned(), Sym::new(tag)));
        }
        out.push(TaggedSentence {
            id: id
                .map(str::to_owned)
                .unwrap_or_else(|| (out.len() + 1).to_string()),
            tokens,
            raw: body.to_owned(),
        });
    }
    Ok(out)
}

/// Parses bracketed benchmark trees, one per line, `#id` prefix as above.
pub fn load_trees(text: &str) -> Result<Vec<BenchTree>, CorpusError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let Some((id, body)) = split_id(line) else {
            continue;
        };
        let tree = parse_bracketed(body).map_err(|e| cerr(lineno, e.to_string()))?;
        out.push(BenchTree {
            id: id
                .map(str::to_owned)
                .unwrap_or_else(|| (out.len() + 1).to_string()),
            tree,
        });
    }
    Ok(out)
}

/// Checks that every benchmark tree pairs with a sentence of the same id
/// and has exactly one leaf per token.
pub fn align(
    sentences: &[TaggedSentence],
    trees: &[BenchTree],
) -> Result<BTreeMap<String, LabelTree>, CorpusError> {
    let by_id: BTreeMap<&str, &TaggedSentence> =
        sentences.iter().map(|s| (s.id.as_str(), s)).collect();
    let mut out = BTreeMap::new();
    for bench in trees {
        let Some(sentence) = by_id.get(bench.id.as_str()) else {
            return Err(cerr(
                0,
                format!("tree {} has no matching sentence", bench.id),
            ));
        };
        let leaves = bench.tree.leaf_count();
        if leaves != sentence.len() {
            return Err(cerr(
                0,
                format!(
                    "sentence {}: tree has {} leaves but the sentence has {} tokens",
                    bench.id,
                    leaves,
                    sentence.len()
                ),
            ));
        }
        out.insert(bench.id.clone(), bench.tree.clone());
    }
    Ok(out)
}

pub fn save_tagged(sentences: &[TaggedSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        out.push('#');
        out.push_str(&s.id);
        for (word, tag) in &s.tokens {
            out.push_str(&format!(" {word}_{tag}"));
        }
        out.push('\n');
    }
    out
}

pub fn save_trees(trees: &[BenchTree]) -> String {
    let mut out = String::new();
    for t in trees {
        out.push_str(&format!("#{} {}\n", t.id, t.tree));
    }
    out
}

/// Deterministic pseudo-random disjoint split. The same seed always yields
/// the same split.
pub fn make_split(
    ids: &[String],
    sizes: (usize, usize, usize),
    seed: u64,
) -> Result<CorpusSplit, CorpusError> {
    let (np, nr, nt) = sizes;
    if np + nr + nt > ids.len() {
        return Err(cerr(
            0,
            format!(
                "split sizes sum to {} but only {} sentences exist",
                np + nr + nt,
                ids.len()
            ),
        ));
    }
    let mut shuffled: Vec<String> = ids.to_vec();
    let mut rng = SplitMix64::new(seed);
    for i in (1..shuffled.len()).rev() {
        let j = (rng.next() % (i as u64 + 1)) as usize;
        shuffled.swap(i, j);
    }
    let pretrain = shuffled[..np].to_vec();
    let train = shuffled[np..np + nr].to_vec();
    let test = shuffled[np + nr..np + nr + nt].to_vec();
    Ok(CorpusSplit {
        pretrain,
        train,
        test,
    })
}

/// splitmix64; stable across platforms and releases.
struct SplitMix64(u64);

impl SplitMix64 {
    fn new(seed: u64) -> SplitMix64 {
        SplitMix64(seed)
    }

    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

pub fn load_split(text: &str) -> Result<CorpusSplit, CorpusError> {
    let mut split = CorpusSplit::default();
    let mut section: Option<&'static str> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[pretrain]" => section = Some("pretrain"),
            "[train]" => section = Some("train"),
            "[test]" => section = Some("test"),
            id => {
                let target = match section {
                    Some("pretrain") => &mut split.pretrain,
                    Some("train") => &mut split.train,
                    Some("test") => &mut split.test,
                    _ => return Err(cerr(lineno, "id before any section header")),
                };
                target.push(id.to_owned());
            }
        }
    }
    Ok(split)
}

pub fn save_split(split: &CorpusSplit) -> String {
    let mut out = String::new();
    for (name, ids) in [
        ("pretrain", &split.pretrain),
        ("train", &split.train),
        ("test", &split.test),
    ] {
        out.push_str(&format!("[{name}]\n"));
        for id in ids {
            out.push_str(id);
            out.push('\n');
        }
    }
    out
}

/// A fully loaded corpus directory: one `.tag`, one `.tre`, one `.split`.
pub struct Corpus {
    pub sentences: Vec<TaggedSentence>,
    pub trees: BTreeMap<String, LabelTree>,
    pub split: CorpusSplit,
}

impl Corpus {
    pub fn load_dir(dir: &Path) -> Result<Corpus, CorpusError> {
        let find = |ext: &str| -> Result<String, CorpusError> {
            let mut matches: Vec<std::path::PathBuf> = std::fs::read_dir(dir)
                .map_err(|e| cerr(0, format!("cannot read {}: {e}", dir.display())))?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().and_then(|s| s.to_str()) == Some(ext))
                .collect();
            matches.sort();
            match matches.len() {
                1 => std::fs::read_to_string(&matches[0])
                    .map_err(|e| cerr(0, format!("cannot read {}: {e}", matches[0].display()))),
                0 => Err(cerr(0, format!("no .{ext} file in {}", dir.display()))),
                _ => Err(cerr(
                    0,
                    format!("multiple .{ext} files in {}", dir.display()),
                )),
            }
        };
        let sentences = load_tagged(&find("tag")?)?;
        let bench = load_trees(&find("tre")?)?;
        let trees = align(&sentences, &bench)?;
        let split = load_split(&find("split")?)?;
        let known: BTreeMap<&str, ()> = sentences.iter().map(|s| (s.id.as_str(), ())).collect();
        for id in split.pretrain.iter().chain(&split.train).chain(&split.test) {
            if !known.contains_key(id.as_str()) {
                return Err(cerr(0, format!("split names unknown sentence `{id}`")));
            }
        }
        Ok(Corpus {
            sentences,
            trees,
            split,
        })
    }

    pub fn sentence(&self, id: &str) -> Option<&TaggedSentence> {
        self.sentences.iter().find(|s| s.id == id)
    }
}
