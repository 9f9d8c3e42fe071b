//! Bottom-up agenda chart parser over unification rules, with hard resource
//! bounds and a completion mode that adds the super rules.
//!
//! The agenda processes spans shortest-first, FIFO within a width. Edges are
//! deduplicated by (span, rule, dot, instantiated daughters) so the edge
//! bound counts distinct hypotheses; alternative derivations accumulate as
//! backpointers on the deduplicated edge. Trees are enumerated lazily from
//! the backpointers so the parse bound prunes enumeration work.

use std::collections::HashMap;
use std::fmt;

use crate::category::Category;
use crate::grammar::{super_rules, Grammar, Lexicon, Rule, RuleOrigin};
use crate::symbol::Sym;
use crate::tree::{LabelChild, LabelTree};

/// One terminal: a surface word and its part-of-speech tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub word: String,
    pub tag: Sym,
}

impl Token {
    pub fn new(word: impl Into<String>, tag: impl Into<Sym>) -> Token {
        Token {
            word: word.into(),
            tag: tag.into(),
        }
    }

    /// A token whose surface form is the tag itself; handy in tests.
    pub fn bare(tag: impl Into<Sym>) -> Token {
        let tag = tag.into();
        Token {
            word: tag.as_str().to_owned(),
            tag,
        }
    }
}

/// Resource bounds: stop after `max_parses` trees or `max_edges` edges.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ParserBounds {
    pub max_parses: usize,
    pub max_edges: usize,
}

impl ParserBounds {
    pub fn new(max_parses: usize, max_edges: usize) -> ParserBounds {
        assert!(max_parses >= 1 && max_edges >= 1);
        ParserBounds {
            max_parses,
            max_edges,
        }
    }

    pub fn unbounded() -> ParserBounds {
        ParserBounds {
            max_parses: usize::MAX,
            max_edges: usize::MAX,
        }
    }
}

impl Default for ParserBounds {
    fn default() -> ParserBounds {
        ParserBounds {
            max_parses: 1,
            max_edges: 3000,
        }
    }
}

/// Which resource constraint ended the parse.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum HaltReason {
    /// The chart was exhausted and every tree enumerated.
    Exhausted,
    /// Edge creation hit `max_edges`; the chart is incomplete.
    EdgeBound,
    /// Tree enumeration stopped at `max_parses` with more derivations left.
    ParseBound,
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HaltReason::Exhausted => write!(f, "exhausted"),
            HaltReason::EdgeBound => write!(f, "edge_bound"),
            HaltReason::ParseBound => write!(f, "parse_bound"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    UnknownTag { tag: Sym, position: usize },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::UnknownTag { tag, position } => {
                write!(f, "unknown tag `{tag}` at token {position}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// Where a parse-tree node came from.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TreeOrigin {
    /// Preterminal built from a lexicon entry.
    Lexical { tag: Sym },
    /// Instantiation of the grammar rule at `index`.
    Rule { index: usize },
    /// Instantiation of a super rule of the given arity.
    Super { arity: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeChild {
    Node(ParseTree),
    Leaf(String),
}

/// A parse tree over categories with token leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseTree {
    pub cat: Category,
    pub children: Vec<TreeChild>,
    pub origin: TreeOrigin,
}

impl ParseTree {
    pub fn leaf_count(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                TreeChild::Node(t) => t.leaf_count(),
                TreeChild::Leaf(_) => 1,
            })
            .sum()
    }

    /// Child subtrees, skipping token leaves.
    pub fn subtrees(&self) -> impl Iterator<Item = &ParseTree> {
        self.children.iter().filter_map(|c| match c {
            TreeChild::Node(t) => Some(t),
            TreeChild::Leaf(_) => None,
        })
    }

    /// Converts to a label tree using the display label of each category.
    pub fn to_label_tree(&self) -> LabelTree {
        LabelTree {
            label: Sym::new(&self.cat.label()),
            children: self
                .children
                .iter()
                .map(|c| match c {
                    TreeChild::Node(t) => LabelChild::Node(t.to_label_tree()),
                    TreeChild::Leaf(w) => LabelChild::Leaf(w.clone()),
                })
                .collect(),
        }
    }

    /// Preorder list of the nodes built by super-rule instantiation.
    pub fn super_nodes(&self) -> Vec<&ParseTree> {
        let mut out = Vec::new();
        self.collect_super(&mut out);
        out
    }

    fn collect_super<'a>(&'a self, out: &mut Vec<&'a ParseTree>) {
        if matches!(self.origin, TreeOrigin::Super { .. }) {
            out.push(self);
        }
        for t in self.subtrees() {
            t.collect_super(out);
        }
    }

    /// The instantiated rule candidate recorded at a super-rule node: the
    /// node's own category as mother and the daughter categories after
    /// unification with the found constituents.
    pub fn candidate_rule(&self) -> Option<Rule> {
        if !matches!(self.origin, TreeOrigin::Super { .. }) {
            return None;
        }
        let rhs: Vec<Category> = self.subtrees().map(|t| t.cat.clone()).collect();
        Rule::new(self.cat.clone(), rhs, RuleOrigin::Learnt).ok()
    }

    /// Indices of the grammar rules used anywhere in this tree.
    pub fn rules_used(&self) -> std::collections::BTreeSet<usize> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_rules(&mut out);
        out
    }

    fn collect_rules(&self, out: &mut std::collections::BTreeSet<usize>) {
        if let TreeOrigin::Rule { index } = self.origin {
            out.insert(index);
        }
        for t in self.subtrees() {
            t.collect_rules(out);
        }
    }

    /// Re-validates the tree: every node's rule unifies with its children
    /// and lexical nodes match the lexicon.
    pub fn validate(&self, grammar: &Grammar, lexicon: &Lexicon) -> bool {
        match self.origin {
            TreeOrigin::Lexical { tag } => {
                let Some(entry) = lexicon.get(tag) else {
                    return false;
                };
                self.cat == entry.category
                    && self.children.len() == 1
                    && matches!(self.children[0], TreeChild::Leaf(_))
            }
            TreeOrigin::Rule { index } => {
                if index >= grammar.len() {
                    return false;
                }
                let rule = grammar.rule(index);
                self.cat == rule.lhs && self.check_children(&rule.rhs, grammar, lexicon)
            }
            TreeOrigin::Super { arity } => {
                let empties = vec![Category::empty(); arity];
                self.check_children(&empties, grammar, lexicon)
            }
        }
    }

    fn check_children(&self, rhs: &[Category], grammar: &Grammar, lexicon: &Lexicon) -> bool {
        let kids: Vec<&ParseTree> = self.subtrees().collect();
        kids.len() == rhs.len()
            && kids.len() == self.children.len()
            && kids
                .iter()
                .zip(rhs)
                .all(|(k, d)| d.unify(&k.cat).is_some() && k.validate(grammar, lexicon))
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_label_tree())
    }
}

/// Result of one parse: complete trees in deterministic order, the number
/// of edges created, and which constraint stopped the run.
#[derive(Clone, Debug)]
pub struct ParseOutcome {
    pub trees: Vec<ParseTree>,
    pub edges: usize,
    pub halted: HaltReason,
}

/// Parses `tokens` with the grammar alone. Complete parses span the whole
/// sentence and have a mother unifying with `start`.
pub fn parse(
    grammar: &Grammar,
    lexicon: &Lexicon,
    tokens: &[Token],
    bounds: ParserBounds,
    start: &Category,
) -> Result<ParseOutcome, ParseError> {
    Chart::new(grammar, lexicon, tokens, bounds, start, SuperMode::Off).run()
}

/// Parses with the grammar plus the binary super rule (plus the unary one
/// when `use_unary`), so constituents of incomplete analyses can always be
/// grouped into larger constituents.
pub fn parse_completing(
    grammar: &Grammar,
    lexicon: &Lexicon,
    tokens: &[Token],
    bounds: ParserBounds,
    start: &Category,
    use_unary: bool,
) -> Result<ParseOutcome, ParseError> {
    let mode = if use_unary {
        SuperMode::BinaryAndUnary
    } else {
        SuperMode::BinaryOnly
    };
    Chart::new(grammar, lexicon, tokens, bounds, start, mode).run()
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum SuperMode {
    Off,
    BinaryOnly,
    BinaryAndUnary,
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
enum RuleKey {
    Lexical(Sym),
    Grammar(usize),
    SuperBinary,
    SuperUnary,
}

/// A derivation backpointer. Binary derivations reference the active edge
/// that covered the left part and the passive edge that completed it; the
/// active edge in turn lists its own first-daughter children.
#[derive(Clone, PartialEq, Eq, Debug)]
enum Deriv {
    Unary(usize),
    Binary(usize, usize),
}

struct Item {
    start: usize,
    end: usize,
    rule: RuleKey,
    /// Daughter categories after unification with the found constituents.
    found: Vec<Category>,
    /// Mother instantiation (the rule's left-hand side).
    lhs: Category,
    derivs: Vec<Deriv>,
}

type ItemKey = (usize, usize, RuleKey, Vec<Category>);

struct Chart<'a> {
    grammar: &'a Grammar,
    lexicon: &'a Lexicon,
    tokens: &'a [Token],
    bounds: ParserBounds,
    start: &'a Category,
    mode: SuperMode,
    super_binary: Rule,
    super_unary: Rule,
    items: Vec<Item>,
    index: HashMap<ItemKey, usize>,
    queues: Vec<std::collections::VecDeque<usize>>,
    actives_by_end: Vec<Vec<usize>>,
    passives_by_start: Vec<Vec<usize>>,
    edge_bound_hit: bool,
}

impl<'a> Chart<'a> {
    fn new(
        grammar: &'a Grammar,
        lexicon: &'a Lexicon,
        tokens: &'a [Token],
        bounds: ParserBounds,
        start: &'a Category,
        mode: SuperMode,
    ) -> Chart<'a> {
        let (super_binary, super_unary) = super_rules();
        let n = tokens.len();
        Chart {
            grammar,
            lexicon,
            tokens,
            bounds,
            start,
            mode,
            super_binary,
            super_unary,
            items: Vec::new(),
            index: HashMap::new(),
            queues: (0..=n).map(|_| std::collections::VecDeque::new()).collect(),
            actives_by_end: vec![Vec::new(); n + 1],
            passives_by_start: vec![Vec::new(); n + 1],
            edge_bound_hit: false,
        }
    }

    fn rule_keys(&self) -> Vec<RuleKey> {
        let mut keys: Vec<RuleKey> = (0..self.grammar.len()).map(RuleKey::Grammar).collect();
        match self.mode {
            SuperMode::Off => {}
            SuperMode::BinaryOnly => keys.push(RuleKey::SuperBinary),
            SuperMode::BinaryAndUnary => {
                keys.push(RuleKey::SuperBinary);
                keys.push(RuleKey::SuperUnary);
            }
        }
        keys
    }

    fn rule_of(&self, key: RuleKey) -> &Rule {
        match key {
            RuleKey::Grammar(i) => self.grammar.rule(i),
            RuleKey::SuperBinary => &self.super_binary,
            RuleKey::SuperUnary => &self.super_unary,
            RuleKey::Lexical(_) => unreachable!("lexical items carry no rule"),
        }
    }

    fn arity(&self, key: RuleKey) -> usize {
        match key {
            RuleKey::Lexical(_) => 0,
            key => self.rule_of(key).arity(),
        }
    }

    fn is_passive(&self, id: usize) -> bool {
        let item = &self.items[id];
        item.found.len() == self.arity(item.rule)
    }

    fn add_item(
        &mut self,
        start: usize,
        end: usize,
        rule: RuleKey,
        found: Vec<Category>,
        lhs: Category,
        deriv: Option<Deriv>,
    ) {
        let key: ItemKey = (start, end, rule, found.clone());
        if let Some(&existing) = self.index.get(&key) {
            if let Some(d) = deriv {
                let self_ref = match d {
                    Deriv::Unary(c) => c == existing,
                    Deriv::Binary(a, p) => a == existing || p == existing,
                };
                if !self_ref && !self.items[existing].derivs.contains(&d) {
                    self.items[existing].derivs.push(d);
                }
            }
            return;
        }
        if self.items.len() >= self.bounds.max_edges {
            self.edge_bound_hit = true;
            return;
        }
        let id = self.items.len();
        self.items.push(Item {
            start,
            end,
            rule,
            found,
            lhs,
            derivs: deriv.into_iter().collect(),
        });
        self.index.insert(key, id);
        self.queues[end - start].push_back(id);
    }

    fn run(mut self) -> Result<ParseOutcome, ParseError> {
        let n = self.tokens.len();
        for (i, tok) in self.tokens.iter().enumerate() {
            let entry = self.lexicon.get(tok.tag).ok_or(ParseError::UnknownTag {
                tag: tok.tag,
                position: i,
            })?;
            let cat = entry.category.clone();
            self.add_item(i, i + 1, RuleKey::Lexical(tok.tag), Vec::new(), cat, None);
            if self.edge_bound_hit {
                break;
            }
        }
        let mut width = 1;
        while width <= n && !self.edge_bound_hit {
            while let Some(id) = self.queues[width].pop_front() {
                self.process(id);
                if self.edge_bound_hit {
                    break;
                }
            }
            if self.queues[width].is_empty() {
                width += 1;
            }
        }
        Ok(self.finish())
    }

    /// A constituent built by a super rule can only fill a daughter slot
    /// that some X-bar refinement of it could occupy: refined mothers carry
    /// one of the found daughters' classes at bar level 1 or 2. Slots that
    /// demand bar 0, or a class no daughter carries, are dead ends the
    /// learner could never verify, so the rejection is interleaved with
    /// completion and such edges are never built. Slots that leave both
    /// `cat` and `bar` open (notably the super rules' own) are unconstrained.
    fn super_fill_feasible(&self, slot: &Category, passive_id: usize) -> bool {
        let p = &self.items[passive_id];
        if !matches!(p.rule, RuleKey::SuperBinary | RuleKey::SuperUnary) {
            return true;
        }
        if slot.bar() == Some(0) {
            return false;
        }
        match slot.cat() {
            None => true,
            Some(class) => p.found.iter().any(|d| d.cat() == Some(class)),
        }
    }

    fn process(&mut self, id: usize) {
        if self.is_passive(id) {
            let (start, end, cat) = {
                let item = &self.items[id];
                (item.start, item.end, item.lhs.clone())
            };
            for key in self.rule_keys() {
                let slot = self.rule_of(key).rhs[0].clone();
                if !self.super_fill_feasible(&slot, id) {
                    continue;
                }
                let Some(d0) = slot.unify(&cat) else {
                    continue;
                };
                let lhs = self.rule_of(key).lhs.clone();
                self.add_item(start, end, key, vec![d0], lhs, Some(Deriv::Unary(id)));
                if self.edge_bound_hit {
                    return;
                }
            }
            let actives = self.actives_by_end[start].clone();
            for aid in actives {
                self.combine(aid, id);
                if self.edge_bound_hit {
                    return;
                }
            }
            self.passives_by_start[start].push(id);
        } else {
            let end = self.items[id].end;
            let passives = self.passives_by_start[end].clone();
            for pid in passives {
                self.combine(id, pid);
                if self.edge_bound_hit {
                    return;
                }
            }
            self.actives_by_end[end].push(id);
        }
    }

    fn combine(&mut self, active_id: usize, passive_id: usize) {
        let (start, rule, dot) = {
            let a = &self.items[active_id];
            (a.start, a.rule, a.found.len())
        };
        if !self.super_fill_feasible(&self.rule_of(rule).rhs[dot], passive_id) {
            return;
        }
        let needed = &self.rule_of(rule).rhs[dot];
        let p = &self.items[passive_id];
        let Some(d) = needed.unify(&p.lhs) else {
            return;
        };
        let end = p.end;
        let mut found = self.items[active_id].found.clone();
        found.push(d);
        let lhs = self.rule_of(rule).lhs.clone();
        self.add_item(
            start,
            end,
            rule,
            found,
            lhs,
            Some(Deriv::Binary(active_id, passive_id)),
        );
    }

    fn finish(self) -> ParseOutcome {
        let n = self.tokens.len();
        let max_parses = self.bounds.max_parses;
        let limit = max_parses.saturating_add(1);
        let msc = self.min_super_counts();
        let mut roots: Vec<usize> = (0..self.items.len())
            .filter(|&id| {
                let item = &self.items[id];
                item.start == 0
                    && item.end == n
                    && self.is_passive(id)
                    && item.lhs.unify(self.start).is_some()
            })
            .collect();
        // Derivations that lean least on the super rules come first, so the
        // parse surviving a tight parse bound is the most grammar-like
        // completion. Without super rules every count is zero and this is
        // plain creation order.
        roots.sort_by_key(|&id| (msc[id], id));
        let mut trees: Vec<ParseTree> = Vec::new();
        for id in roots {
            if trees.len() >= limit {
                break;
            }
            let mut chain = Vec::new();
            let room = limit - trees.len();
            trees.extend(self.trees_for(id, room, &mut chain, &msc));
        }
        let halted = if self.edge_bound_hit {
            HaltReason::EdgeBound
        } else if trees.len() > max_parses {
            HaltReason::ParseBound
        } else {
            HaltReason::Exhausted
        };
        trees.truncate(max_parses);
        ParseOutcome {
            trees,
            edges: self.items.len(),
            halted,
        }
    }

    /// Minimal number of super-rule nodes in any tree derivable from each
    /// item, by fixpoint relaxation (unary derivation cycles never lower a
    /// count, so the iteration converges on the finite-tree minimum).
    fn min_super_counts(&self) -> Vec<usize> {
        const INF: usize = usize::MAX / 4;
        let mut msc = vec![INF; self.items.len()];
        loop {
            let mut changed = false;
            for id in 0..self.items.len() {
                let item = &self.items[id];
                let best = if let RuleKey::Lexical(_) = item.rule {
                    0
                } else {
                    let node_cost = if self.is_passive(id) {
                        match item.rule {
                            RuleKey::SuperBinary | RuleKey::SuperUnary => 1,
                            _ => 0,
                        }
                    } else {
                        0
                    };
                    let through = item
                        .derivs
                        .iter()
                        .map(|d| match d {
                            Deriv::Unary(c) => msc[*c],
                            Deriv::Binary(a, p) => msc[*a].saturating_add(msc[*p]),
                        })
                        .min()
                        .unwrap_or(INF);
                    through.saturating_add(node_cost)
                };
                if best < msc[id] {
                    msc[id] = best;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        msc
    }

    fn origin_of(&self, key: RuleKey) -> TreeOrigin {
        match key {
            RuleKey::Lexical(tag) => TreeOrigin::Lexical { tag },
            RuleKey::Grammar(index) => TreeOrigin::Rule { index },
            RuleKey::SuperBinary => TreeOrigin::Super { arity: 2 },
            RuleKey::SuperUnary => TreeOrigin::Super { arity: 1 },
        }
    }

    /// Enumerates up to `limit` trees for a passive item. Derivations are
    /// visited cheapest-first by minimal super-node count (insertion order
    /// on ties), left subtrees varying slowest. `chain` holds the same-span
    /// ancestors of the current unary expansion, which blocks derivation
    /// cycles introduced by unary rules.
    fn trees_for(
        &self,
        id: usize,
        limit: usize,
        chain: &mut Vec<usize>,
        msc: &[usize],
    ) -> Vec<ParseTree> {
        let mut out = Vec::new();
        if limit == 0 {
            return out;
        }
        let item = &self.items[id];
        if let RuleKey::Lexical(_) = item.rule {
            out.push(ParseTree {
                cat: item.lhs.clone(),
                children: vec![TreeChild::Leaf(self.tokens[item.start].word.clone())],
                origin: self.origin_of(item.rule),
            });
            return out;
        }
        let origin = self.origin_of(item.rule);
        let mut order: Vec<(usize, usize)> = item
            .derivs
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let cost = match d {
                    Deriv::Unary(c) => msc[*c],
                    Deriv::Binary(a, p) => msc[*a].saturating_add(msc[*p]),
                };
                (cost, i)
            })
            .collect();
        order.sort_unstable();
        for (_, di) in order {
            if out.len() >= limit {
                break;
            }
            match &item.derivs[di] {
                Deriv::Unary(child) => {
                    if chain.contains(child) || *child == id {
                        continue;
                    }
                    let same_span =
                        self.items[*child].end - self.items[*child].start == item.end - item.start;
                    let subs = if same_span {
                        chain.push(id);
                        let subs = self.trees_for(*child, limit - out.len(), chain, msc);
                        chain.pop();
                        subs
                    } else {
                        self.trees_for(*child, limit - out.len(), &mut Vec::new(), msc)
                    };
                    for sub in subs {
                        out.push(ParseTree {
                            cat: item.lhs.clone(),
                            children: vec![TreeChild::Node(sub)],
                            origin,
                        });
                    }
                }
                Deriv::Binary(active, passive) => {
                    // Both children of a binary derivation are strictly
                    // narrower, so the unary chain resets.
                    let mut firsts: Vec<(usize, usize)> = self.items[*active]
                        .derivs
                        .iter()
                        .enumerate()
                        .map(|(i, d)| match d {
                            Deriv::Unary(c) => (msc[*c], i),
                            Deriv::Binary(..) => unreachable!("active edges have unary derivs"),
                        })
                        .collect();
                    firsts.sort_unstable();
                    'outer: for (_, fi) in firsts {
                        let Deriv::Unary(first) = self.items[*active].derivs[fi] else {
                            unreachable!("active edges have unary derivs");
                        };
                        let lefts = self.trees_for(first, limit - out.len(), &mut Vec::new(), msc);
                        for left in lefts {
                            let rights =
                                self.trees_for(*passive, limit - out.len(), &mut Vec::new(), msc);
                            for right in rights {
                                out.push(ParseTree {
                                    cat: item.lhs.clone(),
                                    children: vec![
                                        TreeChild::Node(left.clone()),
                                        TreeChild::Node(right),
                                    ],
                                    origin,
                                });
                                if out.len() >= limit {
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{load_grammar, load_lexicon};

    fn toy() -> (Grammar, Lexicon) {
        let g = load_grammar("S[] -> NP[] VP[]", "toy").unwrap().grammar;
        let lex = load_lexicon("tag n NP[]\ntag v VP[]").unwrap();
        (g, lex)
    }

    fn start() -> Category {
        Category::parse("S[]").unwrap()
    }

    fn toks(tags: &[&str]) -> Vec<Token> {
        tags.iter().map(|t| Token::bare(*t)).collect()
    }

    #[test]
    fn unique_derivation() {
        let (g, lex) = toy();
        let out = parse(
            &g,
            &lex,
            &toks(&["n", "v"]),
            ParserBounds::default(),
            &start(),
        )
        .unwrap();
        assert_eq!(out.trees.len(), 1);
        assert_eq!(out.trees[0].to_string(), "(S (NP n) (VP v))");
        assert_eq!(out.halted, HaltReason::Exhausted);
    }

    #[test]
    fn no_derivation_is_exhausted() {
        let (g, lex) = toy();
        let out = parse(
            &g,
            &lex,
            &toks(&["n", "n"]),
            ParserBounds::default(),
            &start(),
        )
        .unwrap();
        assert!(out.trees.is_empty());
        assert_eq!(out.halted, HaltReason::Exhausted);
    }

    #[test]
    fn edge_bound_dominates() {
        let (g, lex) = toy();
        let out = parse(
            &g,
            &lex,
            &toks(&["n", "v"]),
            ParserBounds::new(1, 1),
            &start(),
        )
        .unwrap();
        assert!(out.trees.is_empty());
        assert_eq!(out.halted, HaltReason::EdgeBound);
        assert!(out.edges <= 1);
    }

    #[test]
    fn unknown_tag_is_reported_with_position() {
        let (g, lex) = toy();
        let err = parse(
            &g,
            &lex,
            &toks(&["n", "x"]),
            ParserBounds::default(),
            &start(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownTag {
                tag: Sym::new("x"),
                position: 1
            }
        );
    }

    #[test]
    fn completion_counts_binary_bracketings() {
        let g = Grammar::new("empty");
        let lex = load_lexicon("tag x N0[]").unwrap();
        let anything = Category::empty();
        for (len, expected) in [(2usize, 1usize), (3, 2), (4, 5)] {
            let tokens = vec![Token::bare("x"); len];
            let out = parse_completing(
                &g,
                &lex,
                &tokens,
                ParserBounds::unbounded(),
                &anything,
                false,
            )
            .unwrap();
            assert_eq!(out.trees.len(), expected, "length {len}");
        }
    }

    #[test]
    fn completion_always_finds_a_tree() {
        let (g, lex) = toy();
        let out = parse_completing(
            &g,
            &lex,
            &toks(&["v", "v", "n"]),
            ParserBounds::unbounded(),
            &Category::empty(),
            false,
        )
        .unwrap();
        assert!(!out.trees.is_empty());
        for t in &out.trees {
            assert!(t.validate(&g, &lex));
        }
    }

    #[test]
    fn completion_is_a_superset_of_plain_parse() {
        let (g, lex) = toy();
        let bounds = ParserBounds::unbounded();
        let plain = parse(&g, &lex, &toks(&["n", "v"]), bounds, &start()).unwrap();
        let completed =
            parse_completing(&g, &lex, &toks(&["n", "v"]), bounds, &start(), false).unwrap();
        let rendered: Vec<String> = completed.trees.iter().map(|t| t.to_string()).collect();
        for t in &plain.trees {
            assert!(rendered.contains(&t.to_string()));
        }
    }

    #[test]
    fn parse_bound_truncates_and_reports() {
        let g = Grammar::new("empty");
        let lex = load_lexicon("tag x N0[]").unwrap();
        let tokens = vec![Token::bare("x"); 4];
        let out = parse_completing(
            &g,
            &lex,
            &tokens,
            ParserBounds::new(2, 100000),
            &Category::empty(),
            false,
        )
        .unwrap();
        assert_eq!(out.trees.len(), 2);
        assert_eq!(out.halted, HaltReason::ParseBound);
    }

    #[test]
    fn identical_inputs_yield_identical_output() {
        let (g, lex) = toy();
        let run = || {
            parse_completing(
                &g,
                &lex,
                &toks(&["n", "v", "n"]),
                ParserBounds::new(5, 3000),
                &start(),
                false,
            )
            .unwrap()
            .trees
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn trees_cover_every_token_exactly_once() {
        let (g, lex) = toy();
        let out = parse_completing(
            &g,
            &lex,
            &toks(&["n", "v", "n"]),
            ParserBounds::new(10, 3000),
            &start(),
            false,
        )
        .unwrap();
        assert!(!out.trees.is_empty());
        for tree in &out.trees {
            assert_eq!(tree.leaf_count(), 3);
        }
    }

    #[test]
    fn unary_rule_cycles_terminate() {
        let g = load_grammar("X1[] -> X2[]\nX2[] -> X1[]", "cyclic")
            .unwrap()
            .grammar;
        let lex = load_lexicon("tag x X1[]").unwrap();
        let out = parse(
            &g,
            &lex,
            &toks(&["x"]),
            ParserBounds::unbounded(),
            &Category::empty(),
        )
        .unwrap();
        // The derivation graph is cyclic but the tree set is finite: each
        // chart item appears at most once per unary chain.
        assert!(!out.trees.is_empty());
        assert!(out.trees.len() <= 4);
        for tree in &out.trees {
            assert!(tree.validate(&g, &lex));
        }
    }

    #[test]
    fn unary_super_rule_roots_single_tokens() {
        let g = Grammar::new("empty");
        let lex = load_lexicon("tag x N0[]").unwrap();
        let out = parse_completing(
            &g,
            &lex,
            &toks(&["x"]),
            ParserBounds::unbounded(),
            &Category::empty(),
            true,
        )
        .unwrap();
        assert!(!out.trees.is_empty());
    }

    #[test]
    fn super_nodes_expose_candidates() {
        let (g, lex) = toy();
        let out = parse_completing(
            &g,
            &lex,
            &toks(&["n", "v", "n"]),
            ParserBounds::new(1, 3000),
            &start(),
            false,
        )
        .unwrap();
        let tree = &out.trees[0];
        let supers = tree.super_nodes();
        assert!(!supers.is_empty());
        for node in supers {
            let cand = node.candidate_rule().unwrap();
            assert!(cand.arity() <= 2);
        }
    }
}
