//! Grammar rules, the lexicon, the two super rules, and persistence.
//!
//! Grammar file format, one rule per line:
//!
//! ```text
//! # comment
//! S[] -> NP[] VP[] {head=2, functor=2}
//! N1[] -> N0[]     {head=1}
//! ```
//!
//! `head` and `functor` are 1-based daughter positions. Lexicon file format:
//!
//! ```text
//! tag NN1 N0[num=sg]
//! tag VVZ V0[num=sg, subcat=main] : <<<e,t>,t>,t>
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::category::Category;
use crate::semtype::{parse_type, SemType};
use crate::symbol::Sym;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum RuleOrigin {
    Seed,
    Learnt,
}

/// A rewrite rule with one or two daughters. `head` and `sem_functor` are
/// 0-based positions into `rhs`; both are optional until refinement fills
/// them in. Equality ignores `origin`.
#[derive(Clone, Debug)]
pub struct Rule {
    pub lhs: Category,
    pub rhs: Vec<Category>,
    pub head: Option<usize>,
    pub sem_functor: Option<usize>,
    pub origin: RuleOrigin,
}

impl Rule {
    pub fn new(
        lhs: Category,
        rhs: Vec<Category>,
        origin: RuleOrigin,
    ) -> Result<Rule, RuleShapeError> {
        if rhs.is_empty() || rhs.len() > 2 {
            return Err(RuleShapeError::Arity(rhs.len()));
        }
        Ok(Rule {
            lhs,
            rhs,
            head: None,
            sem_functor: None,
            origin,
        })
    }

    pub fn with_head(mut self, head: usize) -> Rule {
        debug_assert!(head < self.rhs.len());
        self.head = Some(head);
        self
    }

    pub fn with_functor(mut self, functor: usize) -> Rule {
        debug_assert!(functor < self.rhs.len());
        self.sem_functor = Some(functor);
        self
    }

    pub fn arity(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_binary(&self) -> bool {
        self.rhs.len() == 2
    }
}

impl PartialEq for Rule {
    fn eq(&self, other: &Rule) -> bool {
        self.lhs == other.lhs
            && self.rhs == other.rhs
            && self.head == other.head
            && self.sem_functor == other.sem_functor
    }
}

impl Eq for Rule {}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        for d in &self.rhs {
            write!(f, " {d}")?;
        }
        match (self.head, self.sem_functor) {
            (None, None) => Ok(()),
            (Some(h), None) => write!(f, " {{head={}}}", h + 1),
            (None, Some(s)) => write!(f, " {{functor={}}}", s + 1),
            (Some(h), Some(s)) => write!(f, " {{head={}, functor={}}}", h + 1, s + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleShapeError {
    Arity(usize),
}

impl fmt::Display for RuleShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleShapeError::Arity(n) => write!(f, "rules take 1 or 2 daughters, got {n}"),
        }
    }
}

impl std::error::Error for RuleShapeError {}

/// The two maximally general rules used to complete failed parses. Every
/// category is empty, so they unify with any constituents of matching arity.
pub fn super_rules() -> (Rule, Rule) {
    let binary = Rule::new(
        Category::empty(),
        vec![Category::empty(), Category::empty()],
        RuleOrigin::Learnt,
    )
    .expect("binary super rule is well-formed");
    let unary = Rule::new(
        Category::empty(),
        vec![Category::empty()],
        RuleOrigin::Learnt,
    )
    .expect("unary super rule is well-formed");
    (binary, unary)
}

/// An ordered, duplicate-free set of rules. Snapshots are immutable;
/// `add_rule` returns a new grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub name: String,
    rules: Vec<Rule>,
}

impl Grammar {
    pub fn new(name: impl Into<String>) -> Grammar {
        Grammar {
            name: name.into(),
            rules: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, index: usize) -> &Rule {
        &self.rules[index]
    }

    pub fn contains(&self, rule: &Rule) -> bool {
        self.rules.iter().any(|r| r == rule)
    }

    /// Returns a grammar containing `rule`, and whether it was added.
    /// Adding an equal rule (canonical feature order) is a no-op.
    pub fn add_rule(&self, rule: Rule) -> (Grammar, bool) {
        if self.contains(&rule) {
            return (self.clone(), false);
        }
        let mut next = self.clone();
        next.rules.push(rule);
        (next, true)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Grammar {
        self.name = name.into();
        self
    }

    /// Canonical textual form; `save(load(save(g))) == save(g)`.
    pub fn save(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for FileError {}

fn file_err(line: usize, message: impl Into<String>) -> FileError {
    FileError {
        line,
        message: message.into(),
    }
}

/// Result of loading a grammar file: duplicate rules are dropped with a
/// warning rather than an error.
#[derive(Debug)]
pub struct GrammarLoad {
    pub grammar: Grammar,
    pub warnings: Vec<String>,
}

pub fn load_grammar(text: &str, name: &str) -> Result<GrammarLoad, FileError> {
    let mut grammar = Grammar::new(name);
    let mut warnings = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rule = parse_rule_line(line, lineno)?;
        let (next, added) = grammar.add_rule(rule);
        if !added {
            warnings.push(format!("line {lineno}: duplicate rule ignored: {line}"));
        }
        grammar = next;
    }
    Ok(GrammarLoad { grammar, warnings })
}

fn parse_rule_line(line: &str, lineno: usize) -> Result<Rule, FileError> {
    let (body, annot) = match line.find('{') {
        Some(i) => {
            let rest = &line[i..];
            if !rest.ends_with('}') {
                return Err(file_err(lineno, "expected `}` at end of annotation"));
            }
            (&line[..i], Some(&rest[1..rest.len() - 1]))
        }
        None => (line, None),
    };
    let (lhs_text, rhs_text) = body
        .split_once("->")
        .ok_or_else(|| file_err(lineno, "expected `->`"))?;
    let lhs = Category::parse(lhs_text.trim())
        .map_err(|e| file_err(lineno, format!("bad left-hand side: {e}")))?;
    let rhs = split_categories(rhs_text)
        .into_iter()
        .map(|t| Category::parse(&t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| file_err(lineno, format!("bad right-hand side: {e}")))?;
    let mut rule =
        Rule::new(lhs, rhs, RuleOrigin::Seed).map_err(|e| file_err(lineno, e.to_string()))?;
    if let Some(annot) = annot {
        for part in annot.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| file_err(lineno, format!("bad annotation `{part}`")))?;
            let pos: usize = val
                .trim()
                .parse()
                .map_err(|_| file_err(lineno, format!("bad position in `{part}`")))?;
            if pos < 1 || pos > rule.arity() {
                return Err(file_err(
                    lineno,
                    format!("position out of range in `{part}`"),
                ));
            }
            match key.trim() {
                "head" => rule.head = Some(pos - 1),
                "functor" => rule.sem_functor = Some(pos - 1),
                other => return Err(file_err(lineno, format!("unknown annotation `{other}`"))),
            }
        }
    }
    Ok(rule)
}

/// Splits `NP[] VP[num=sg] PP[]` into category chunks, respecting brackets.
fn split_categories(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
                if depth == 0 {
                    out.push(cur.trim().to_owned());
                    cur.clear();
                }
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push(cur.trim().to_owned());
                }
                cur.clear();
            }
            c => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_owned());
    }
    out
}

/// Maps one part-of-speech tag to its category; tags are the terminal set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexEntry {
    pub tag: Sym,
    pub category: Category,
    pub semtype: Option<SemType>,
}

#[derive(Clone, Debug, Default)]
pub struct Lexicon {
    entries: BTreeMap<Sym, LexEntry>,
}

impl Lexicon {
    pub fn new() -> Lexicon {
        Lexicon::default()
    }

    pub fn insert(&mut self, entry: LexEntry) -> Result<(), FileError> {
        if self.entries.contains_key(&entry.tag) {
            return Err(file_err(0, format!("duplicate tag `{}`", entry.tag)));
        }
        self.entries.insert(entry.tag, entry);
        Ok(())
    }

    pub fn get(&self, tag: Sym) -> Option<&LexEntry> {
        self.entries.get(&tag)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tags(&self) -> impl Iterator<Item = Sym> + '_ {
        self.entries.keys().copied()
    }
}

pub fn load_lexicon(text: &str) -> Result<Lexicon, FileError> {
    let mut lex = Lexicon::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rest = line
            .strip_prefix("tag")
            .ok_or_else(|| file_err(lineno, "expected `tag TAG Category [: semtype]`"))?
            .trim_start();
        let (tag, rest) = rest
            .split_once(char::is_whitespace)
            .ok_or_else(|| file_err(lineno, "expected category after tag"))?;
        let (cat_text, ty_text) = match rest.split_once(':') {
            Some((c, t)) => (c.trim(), Some(t.trim())),
            None => (rest.trim(), None),
        };
        let category = Category::parse(cat_text)
            .map_err(|e| file_err(lineno, format!("bad category: {e}")))?;
        let semtype = match ty_text {
            Some(t) => Some(parse_type(t).map_err(|e| file_err(lineno, format!("bad type: {e}")))?),
            None => None,
        };
        lex.insert(LexEntry {
            tag: Sym::new(tag),
            category,
            semtype,
        })
        .map_err(|e| file_err(lineno, e.message))?;
    }
    Ok(lex)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(text: &str) -> Category {
        Category::parse(text).unwrap()
    }

    #[test]
    fn super_rules_are_vacuous() {
        let (binary, unary) = super_rules();
        assert_eq!(binary.arity(), 2);
        assert_eq!(unary.arity(), 1);
        assert!(binary.lhs.is_empty());
        assert!(binary.rhs.iter().all(Category::is_empty));
        assert!(unary.lhs.is_empty());
        assert!(unary.rhs.iter().all(Category::is_empty));
    }

    #[test]
    fn super_rule_unifies_with_any_binary_rule() {
        let (binary, _) = super_rules();
        let text = "S[] -> NP[] VP[num=sg]";
        let g = load_grammar(text, "t").unwrap().grammar;
        for r in g.rules() {
            assert!(binary.lhs.unify(&r.lhs).is_some());
            for (s, d) in binary.rhs.iter().zip(&r.rhs) {
                assert!(s.unify(d).is_some());
            }
        }
    }

    #[test]
    fn add_rule_dedups() {
        let g = Grammar::new("g");
        let r = Rule::new(
            cat("S[]"),
            vec![cat("NP[]"), cat("VP[]")],
            RuleOrigin::Learnt,
        )
        .unwrap();
        let (g, added) = g.add_rule(r.clone());
        assert!(added);
        assert_eq!(g.len(), 1);
        let (g, added) = g.add_rule(r);
        assert!(!added);
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn sizes_add_up_across_learning() {
        // 97 seed rules plus 32 distinct learnt rules make 129.
        let mut g = Grammar::new("G");
        for i in 0..97 {
            let lhs = cat("S[]").with(Sym::new("idx"), Sym::new(&i.to_string()));
            let (next, added) = g.add_rule(
                Rule::new(lhs, vec![cat("NP[]"), cat("VP[]")], RuleOrigin::Seed).unwrap(),
            );
            assert!(added);
            g = next;
        }
        assert_eq!(g.len(), 97);
        for i in 0..32 {
            let lhs = cat("VP[]").with(Sym::new("idx"), Sym::new(&i.to_string()));
            let (next, added) =
                g.add_rule(Rule::new(lhs, vec![cat("V0[]")], RuleOrigin::Learnt).unwrap());
            assert!(added);
            g = next;
        }
        assert_eq!(g.len(), 129);
    }

    #[test]
    fn head_annotation_is_one_based() {
        let g = load_grammar("S[] -> NP[] VP[] {head=2}", "t")
            .unwrap()
            .grammar;
        assert_eq!(g.rule(0).head, Some(1));
    }

    #[test]
    fn ternary_rhs_rejected() {
        let err = load_grammar("S[] -> NP[] VP[] PP[]", "t").unwrap_err();
        assert!(err.message.contains("1 or 2"));
    }

    #[test]
    fn save_is_a_canonical_fixpoint() {
        let text =
            "S[] -> NP[] VP[] {head=2}\nNP[] -> [cat=D, bar=0] N1[]\nVP[num=sg] -> V0[num=sg]\n";
        let first = load_grammar(text, "t").unwrap().grammar.save();
        let second = load_grammar(&first, "t").unwrap().grammar.save();
        assert_eq!(first, second);
    }

    #[test]
    fn duplicate_rules_warn() {
        let load = load_grammar("S[] -> NP[] VP[]\nS[] -> NP[] VP[]", "t").unwrap();
        assert_eq!(load.grammar.len(), 1);
        assert_eq!(load.warnings.len(), 1);
    }

    #[test]
    fn invalid_bar_level_rejected() {
        assert!(load_grammar("S[] -> NP[bar=7]", "t").is_err());
    }

    #[test]
    fn lexicon_parses_with_optional_type() {
        let lex = load_lexicon("tag NN1 N0[num=sg]\ntag VVZ V0[num=sg] : <<<e,t>,t>,t>").unwrap();
        assert_eq!(lex.len(), 2);
        let v = lex.get(Sym::new("VVZ")).unwrap();
        assert!(v.semtype.is_some());
        assert_eq!(v.category.bar(), Some(0));
    }

    #[test]
    fn lexicon_rejects_duplicate_tags() {
        assert!(load_lexicon("tag NN1 N0[]\ntag NN1 N0[]").is_err());
    }
}
