//! Feature-bundle categories and the unification operation the formalism
//! is built on.
//!
//! A category is a flat, finite map from feature names to atomic values.
//! The features `cat` (major class) and `bar` (bar level 0..2) are
//! distinguished only in that the label syntax and the display label are
//! derived from them; unification treats them like any other feature.

use std::collections::BTreeMap;
use std::fmt;

use crate::symbol::Sym;

/// Feature name reserved for the major syntactic class.
pub fn feat_cat() -> Sym {
    Sym::new("cat")
}

/// Feature name reserved for the X-bar level.
pub fn feat_bar() -> Sym {
    Sym::new("bar")
}

/// Display label for a category whose `cat` feature is uninstantiated.
pub const UNKNOWN_LABEL: &str = "?";

/// A syntactic category: a set of feature/value pairs. Immutable after
/// construction; cheap to clone and safe to share across threads.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Category {
    feats: BTreeMap<Sym, Sym>,
}

impl Category {
    /// The empty category, written `[]`. Unification identity.
    pub fn empty() -> Category {
        Category::default()
    }

    pub fn from_pairs<I, F, V>(pairs: I) -> Category
    where
        I: IntoIterator<Item = (F, V)>,
        F: Into<Sym>,
        V: Into<Sym>,
    {
        let feats = pairs
            .into_iter()
            .map(|(f, v)| (f.into(), v.into()))
            .collect();
        Category { feats }
    }

    /// Builder-style copy with one more feature set.
    pub fn with(mut self, feat: impl Into<Sym>, val: impl Into<Sym>) -> Category {
        self.feats.insert(feat.into(), val.into());
        self
    }

    pub fn get(&self, feat: Sym) -> Option<Sym> {
        self.feats.get(&feat).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.feats.is_empty()
    }

    pub fn len(&self) -> usize {
        self.feats.len()
    }

    /// Iterates feature/value pairs in canonical (name-sorted) order.
    pub fn iter(&self) -> impl Iterator<Item = (Sym, Sym)> + '_ {
        self.feats.iter().map(|(f, v)| (*f, *v))
    }

    pub fn cat(&self) -> Option<Sym> {
        self.get(feat_cat())
    }

    /// Bar level, when the `bar` feature holds one of "0", "1", "2".
    pub fn bar(&self) -> Option<u8> {
        self.get(feat_bar()).and_then(|v| match v.as_str() {
            "0" => Some(0),
            "1" => Some(1),
            "2" => Some(2),
            _ => None,
        })
    }

    /// Unifies two categories. Succeeds iff no feature present in both
    /// carries different values; the result is the union of the pairs.
    /// Failure is an ordinary value, not an error.
    pub fn unify(&self, other: &Category) -> Option<Category> {
        // Merge the smaller map into the larger one.
        let (base, add) = if self.feats.len() >= other.feats.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut feats = base.feats.clone();
        for (f, v) in &add.feats {
            match feats.insert(*f, *v) {
                None => {}
                Some(prev) if prev == *v => {}
                Some(_) => return None,
            }
        }
        Some(Category { feats })
    }

    /// True iff every feature/value pair of `self` appears in `other`.
    pub fn subsumes(&self, other: &Category) -> bool {
        self.feats
            .iter()
            .all(|(f, v)| other.feats.get(f) == Some(v))
    }

    /// Display label built from `cat` and `bar` via the projection table:
    /// bar 2 maps to the phrasal label ("NP"), bar 1 to "N1", bar 0 or an
    /// unset bar to the bare class name. Returns `?` when `cat` is
    /// uninstantiated. Minor features never appear in the label.
    pub fn label(&self) -> String {
        match self.cat() {
            None => UNKNOWN_LABEL.to_owned(),
            Some(cat) => display_label(cat.as_str(), self.bar()),
        }
    }

    /// Parses the textual syntax `Label[f1=v1, f2=v2]`, `[f1=v1]` or `[]`.
    /// The label expands to `cat`/`bar` via the projection table; brackets
    /// are whitespace-insensitive. Errors carry a byte offset into `text`.
    pub fn parse(text: &str) -> Result<Category, CategoryParseError> {
        let mut p = CatParser {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        };
        let cat = p.category()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.err("trailing input after category"));
        }
        Ok(cat)
    }
}

impl fmt::Display for Category {
    /// Canonical textual form. The label is used only when it re-parses to
    /// exactly this `cat`/`bar` pair; otherwise both are printed as plain
    /// features inside the brackets, keeping save/load round-trip stable.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut covered: Vec<Sym> = Vec::new();
        let mut label = String::new();
        if let Some(cat) = self.cat() {
            let bar = self.bar();
            let candidate = file_label(cat.as_str(), bar);
            if parse_label(&candidate) == (cat, bar) {
                label = candidate;
                covered.push(feat_cat());
                if bar.is_some() {
                    covered.push(feat_bar());
                }
            }
        }
        write!(f, "{label}[")?;
        let mut first = true;
        for (feat, val) in self.iter() {
            if covered.contains(&feat) {
                continue;
            }
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{feat}={val}")?;
            first = false;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Labels that do not follow the suffix convention. `S` is treated as a
/// maximal projection of its own class.
const SPECIAL_LABELS: &[(&str, &str, u8)] = &[("S", "S", 2)];

/// Builds a display label from a class name and bar level.
fn display_label(cat: &str, bar: Option<u8>) -> String {
    if let Some(b) = bar {
        for (label, c, lb) in SPECIAL_LABELS {
            if *c == cat && *lb == b {
                return (*label).to_owned();
            }
        }
    }
    match bar {
        None | Some(0) => cat.to_owned(),
        Some(1) => format!("{cat}1"),
        Some(2) => format!("{cat}P"),
        Some(_) => cat.to_owned(),
    }
}

/// Like `display_label` but unambiguous about the bar level, for the file
/// syntax: `N0` keeps bar 0 distinct from a bare `N` with no bar at all.
fn file_label(cat: &str, bar: Option<u8>) -> String {
    match bar {
        Some(0) => format!("{cat}0"),
        _ => display_label(cat, bar),
    }
}

/// Inverse of the projection table: expands a label to (cat, bar).
/// `NP` gives (N, 2), `N1` gives (N, 1), `N0` gives (N, 0), a bare name
/// leaves bar unset. Single-letter labels are never read as bar suffixes,
/// so `P` is the class P with no bar.
pub fn parse_label(label: &str) -> (Sym, Option<u8>) {
    for (l, cat, bar) in SPECIAL_LABELS {
        if *l == label {
            return (Sym::new(cat), Some(*bar));
        }
    }
    if label.len() >= 2 {
        let (head, last) = label.split_at(label.len() - 1);
        match last {
            "0" => return (Sym::new(head), Some(0)),
            "1" => return (Sym::new(head), Some(1)),
            "2" => return (Sym::new(head), Some(2)),
            "P" => return (Sym::new(head), Some(2)),
            _ => {}
        }
    }
    (Sym::new(label), None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for CategoryParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.message, self.offset)
    }
}

impl std::error::Error for CategoryParseError {}

struct CatParser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> CatParser<'a> {
    fn err(&self, message: &str) -> CategoryParseError {
        CategoryParseError {
            offset: self.pos,
            message: message.to_owned(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_alphanumeric() || b == b'_' || b == b'-' || b == b'\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos > start {
            Some(&self.text[start..self.pos])
        } else {
            None
        }
    }

    fn category(&mut self) -> Result<Category, CategoryParseError> {
        self.skip_ws();
        let mut cat = Category::empty();
        if let Some(label) = self.ident() {
            if label == UNKNOWN_LABEL {
                return Err(self.err("the label `?` is reserved"));
            }
            let (class, bar) = parse_label(label);
            cat = cat.with(feat_cat(), class);
            if let Some(b) = bar {
                cat = cat.with(feat_bar(), Sym::new(&b.to_string()));
            }
        }
        self.skip_ws();
        if self.pos >= self.bytes.len() || self.bytes[self.pos] != b'[' {
            // A bare label with no bracket is accepted on input.
            if cat.cat().is_some() {
                return Ok(cat);
            }
            return Err(self.err("expected `[`"));
        }
        self.pos += 1;
        loop {
            self.skip_ws();
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b']' {
                self.pos += 1;
                return Ok(cat);
            }
            let feat = self
                .ident()
                .ok_or_else(|| self.err("expected feature name"))?;
            self.skip_ws();
            if self.pos >= self.bytes.len() || self.bytes[self.pos] != b'=' {
                return Err(self.err("expected `=` after feature name"));
            }
            self.pos += 1;
            self.skip_ws();
            let val = self
                .ident()
                .ok_or_else(|| self.err("expected feature value"))?;
            let fsym = Sym::new(feat);
            if fsym == feat_bar() && !matches!(val, "0" | "1" | "2") {
                return Err(self.err("bar level must be 0, 1 or 2"));
            }
            if cat.get(fsym).is_some() {
                return Err(self.err("duplicate feature name"));
            }
            cat = cat.with(fsym, Sym::new(val));
            self.skip_ws();
            match self.bytes.get(self.pos) {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b']') => {}
                _ => return Err(self.err("expected `,` or `]`")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(text: &str) -> Category {
        Category::parse(text).unwrap()
    }

    #[test]
    fn empty_is_identity() {
        let np = cat("NP[]");
        assert_eq!(Category::empty().unify(&np), Some(np.clone()));
        assert_eq!(np.unify(&Category::empty()), Some(np));
    }

    #[test]
    fn disjoint_features_merge() {
        let a = cat("NP[per=3]");
        let b = cat("NP[num=sg]");
        let merged = a.unify(&b).unwrap();
        assert_eq!(merged, cat("NP[per=3, num=sg]"));
    }

    #[test]
    fn conflicting_values_fail() {
        assert_eq!(cat("NP[]").unify(&cat("VP[]")), None);
    }

    #[test]
    fn labels_follow_projection_table() {
        assert_eq!(cat("NP[]").label(), "NP");
        assert_eq!(cat("N1[]").label(), "N1");
        assert_eq!(cat("[cat=V, bar=0, per=3]").label(), "V");
        assert_eq!(Category::empty().label(), "?");
        assert_eq!(cat("S[]").label(), "S");
    }

    #[test]
    fn s_expands_to_maximal_projection() {
        let s = cat("S[]");
        assert_eq!(s.cat(), Some(Sym::new("S")));
        assert_eq!(s.bar(), Some(2));
    }

    #[test]
    fn bar_levels_validated() {
        assert!(Category::parse("[bar=3]").is_err());
        assert!(Category::parse("[bar=2]").is_ok());
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "NP[]",
            "N0[num=sg]",
            "[]",
            "[per=3]",
            "S[]",
            "[cat=S]",
            "V[vform=inf]",
        ] {
            let c = cat(text);
            let printed = c.to_string();
            assert_eq!(cat(&printed), c, "round trip of {text} via {printed}");
            assert_eq!(cat(&printed).to_string(), printed);
        }
    }

    #[test]
    fn reserved_label_rejected() {
        assert!(Category::parse("?[]").is_err());
    }

    #[test]
    fn subsumption() {
        assert!(cat("NP[]").subsumes(&cat("NP[num=sg]")));
        assert!(!cat("NP[num=sg]").subsumes(&cat("NP[]")));
    }

    #[test]
    fn parser_never_panics_on_garbage() {
        let mut state = 3u64;
        for _ in 0..5000 {
            let len = (state % 12) as usize;
            let text: String = (0..len)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                    let pool = b"NPab=,[] 01?~<";
                    pool[(state >> 33) as usize % pool.len()] as char
                })
                .collect();
            let _ = Category::parse(&text);
        }
    }
}
