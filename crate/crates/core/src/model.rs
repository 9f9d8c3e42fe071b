//! The model-based learner: reject or refine super-rule instantiations
//! using linear precedence rules, semantic type composition, the Head
//! Feature Convention, and X-bar projection.
//!
//! X-bar and the HFC refine instantiations; LP rules and semantic types
//! filter them. The pipeline runs refinements before filters so the
//! filters see maximally instantiated categories.
//!
//! Model configuration file, line-oriented:
//!
//! ```text
//! lp: [subcat] < ~[subcat]
//! lp: bar=0 < bar=2
//! semtype NP = <<e,t>,t>
//! hfc: num, per, vform
//! xbar: N 1 -> 2
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::category::{feat_bar, feat_cat, Category};
use crate::grammar::{FileError, Rule};
use crate::semtype::{compose, parse_type, SemType};
use crate::symbol::Sym;

/// A condition on one category of a local tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeatPattern {
    /// `[f]`: the feature is instantiated.
    Instantiated(Sym),
    /// `~[f]`: the feature is uninstantiated.
    Uninstantiated(Sym),
    /// `f=v`: the feature carries exactly this value.
    Equals(Sym, Sym),
}

impl FeatPattern {
    pub fn matches(&self, c: &Category) -> bool {
        match self {
            FeatPattern::Instantiated(f) => c.get(*f).is_some(),
            FeatPattern::Uninstantiated(f) => c.get(*f).is_none(),
            FeatPattern::Equals(f, v) => c.get(*f) == Some(*v),
        }
    }

    fn parse(text: &str) -> Result<FeatPattern, String> {
        let text = text.trim();
        if let Some(inner) = text.strip_prefix("~[").and_then(|t| t.strip_suffix(']')) {
            return Ok(FeatPattern::Uninstantiated(Sym::new(inner.trim())));
        }
        if let Some(inner) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            return Ok(FeatPattern::Instantiated(Sym::new(inner.trim())));
        }
        if let Some((f, v)) = text.split_once('=') {
            return Ok(FeatPattern::Equals(Sym::new(f.trim()), Sym::new(v.trim())));
        }
        Err(format!("bad pattern `{text}`"))
    }
}

impl fmt::Display for FeatPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatPattern::Instantiated(s) => write!(f, "[{s}]"),
            FeatPattern::Uninstantiated(s) => write!(f, "~[{s}]"),
            FeatPattern::Equals(s, v) => write!(f, "{s}={v}"),
        }
    }
}

/// A linear precedence rule `left < right`: within a local tree, any sister
/// matching `left` must precede every sister matching `right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpRule {
    pub left: FeatPattern,
    pub right: FeatPattern,
}

impl fmt::Display for LpRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} < {}", self.left, self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpVerdict {
    Ok,
    /// `daughters[earlier]` matches the right pattern of `rules[rule]` while
    /// `daughters[later]` matches its left pattern: an element required to
    /// precede follows.
    Violation {
        rule: usize,
        earlier: usize,
        later: usize,
    },
}

impl LpVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, LpVerdict::Ok)
    }
}

/// Checks the ordered daughters of one local tree against the LP rules.
/// Unary local trees are vacuously ok.
pub fn check_lp(daughters: &[Category], rules: &[LpRule]) -> LpVerdict {
    for (ri, rule) in rules.iter().enumerate() {
        for i in 0..daughters.len() {
            if !rule.right.matches(&daughters[i]) {
                continue;
            }
            for (j, later) in daughters.iter().enumerate().skip(i + 1) {
                if rule.left.matches(later) {
                    return LpVerdict::Violation {
                        rule: ri,
                        earlier: i,
                        later: j,
                    };
                }
            }
        }
    }
    LpVerdict::Ok
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemVerdict {
    /// The daughters compose; the functor daughter is at this position.
    Ok {
        functor: usize,
    },
    Reject,
    /// Some needed type is unmapped; the filter has no verdict.
    Abstain,
}

/// Looks up a category's semantic type by its display label.
fn type_of(c: &Category, map: &BTreeMap<Sym, SemType>) -> Option<SemType> {
    map.get(&Sym::new(&c.label())).cloned()
}

/// Checks whether the daughters of an instantiated rule can be composed.
///
/// Binary rules: the head daughter is tried as functor first, then the
/// other; reject only if neither order composes. Unary rules: ok when the
/// daughter type equals the mother's type or is a functor returning it.
pub fn check_semantics(rule: &Rule, map: &BTreeMap<Sym, SemType>) -> SemVerdict {
    match rule.rhs.len() {
        2 => {
            let Some(t0) = type_of(&rule.rhs[0], map) else {
                return SemVerdict::Abstain;
            };
            let Some(t1) = type_of(&rule.rhs[1], map) else {
                return SemVerdict::Abstain;
            };
            let first = rule.head.unwrap_or(0);
            let second = 1 - first;
            let types = [&t0, &t1];
            if compose(types[first], types[second]).is_some() {
                SemVerdict::Ok { functor: first }
            } else if compose(types[second], types[first]).is_some() {
                SemVerdict::Ok { functor: second }
            } else {
                SemVerdict::Reject
            }
        }
        1 => {
            let Some(d) = type_of(&rule.rhs[0], map) else {
                return SemVerdict::Abstain;
            };
            let Some(l) = type_of(&rule.lhs, map) else {
                return SemVerdict::Abstain;
            };
            if d == l || d.result() == Some(&l) {
                SemVerdict::Ok { functor: 0 }
            } else {
                SemVerdict::Reject
            }
        }
        _ => SemVerdict::Abstain,
    }
}

/// Copies each listed feature that is instantiated on the head daughter and
/// uninstantiated on the mother up to the mother. Returns `None` (a reject
/// signal) when a head value conflicts with an existing mother value.
pub fn apply_hfc(rule: &Rule, head: usize, features: &BTreeSet<Sym>) -> Option<Rule> {
    let head_cat = &rule.rhs[head];
    let mut lhs = rule.lhs.clone();
    for f in features {
        let Some(hv) = head_cat.get(*f) else {
            continue;
        };
        match lhs.get(*f) {
            None => lhs = lhs.with(*f, hv),
            Some(v) if v == hv => {}
            Some(_) => return None,
        }
    }
    let mut out = rule.clone();
    out.lhs = lhs;
    Some(out)
}

/// Permitted mother bar levels per (head class, head bar level). Entries
/// override the built-in convention: the mother's bar level is strictly
/// above the head's, capped at the maximal level 2.
#[derive(Clone, Debug, Default)]
pub struct XbarTable {
    overrides: BTreeMap<(Sym, u8), Vec<u8>>,
}

impl XbarTable {
    pub fn insert(&mut self, cat: Sym, bar: u8, mothers: Vec<u8>) {
        self.overrides.insert((cat, bar), mothers);
    }

    /// Mother bar levels permitted for a head of the given class and level.
    /// A head with no bar feature projects like a level-0 head.
    pub fn permitted(&self, cat: Sym, bar: Option<u8>) -> Vec<u8> {
        let bar = bar.unwrap_or(0);
        if let Some(levels) = self.overrides.get(&(cat, bar)) {
            return levels.clone();
        }
        if bar >= 2 {
            vec![2]
        } else {
            (bar + 1..=2).collect()
        }
    }
}

/// X-bar projection: each daughter with an instantiated `cat` is a head
/// candidate; the mother receives the head's class and a permitted bar
/// level. Candidates that conflict with an already-instantiated mother are
/// dropped. An empty result is a reject.
///
/// A rule that already carries a head index is refined for that head only,
/// which makes the projection idempotent on its own output.
pub fn project_xbar(rule: &Rule, table: &XbarTable) -> Vec<Rule> {
    let mut out = Vec::new();
    let candidates: Vec<usize> = match rule.head {
        Some(h) => vec![h],
        None => (0..rule.rhs.len()).collect(),
    };
    for head in candidates {
        let Some(class) = rule.rhs[head].cat() else {
            continue;
        };
        if let Some(existing) = rule.lhs.cat() {
            if existing != class {
                continue;
            }
        }
        let levels = table.permitted(class, rule.rhs[head].bar());
        match rule.lhs.bar() {
            Some(b) => {
                if levels.contains(&b) {
                    let mut r = rule.clone();
                    r.lhs = r.lhs.with(feat_cat(), class);
                    r.head = Some(head);
                    out.push(r);
                }
            }
            None => {
                for b in levels {
                    let mut r = rule.clone();
                    r.lhs = r
                        .lhs
                        .clone()
                        .with(feat_cat(), class)
                        .with(feat_bar(), Sym::new(&b.to_string()));
                    r.head = Some(head);
                    out.push(r);
                }
            }
        }
    }
    out
}

/// Model configuration with per-component toggles. X-bar projection has no
/// toggle: it is applied unconditionally by the filter pipeline.
#[derive(Clone, Debug)]
pub struct ModelConfig {
    pub lp_rules: Vec<LpRule>,
    pub semtypes: BTreeMap<Sym, SemType>,
    pub hfc_features: BTreeSet<Sym>,
    pub xbar: XbarTable,
    pub lp_on: bool,
    pub sem_on: bool,
    pub hfc_on: bool,
}

impl Default for ModelConfig {
    fn default() -> ModelConfig {
        ModelConfig {
            lp_rules: Vec::new(),
            semtypes: BTreeMap::new(),
            hfc_features: BTreeSet::new(),
            xbar: XbarTable::default(),
            lp_on: true,
            sem_on: true,
            hfc_on: true,
        }
    }
}

impl ModelConfig {
    /// A copy with every optional component switched off; only X-bar
    /// projection remains active.
    pub fn xbar_only(&self) -> ModelConfig {
        ModelConfig {
            lp_on: false,
            sem_on: false,
            hfc_on: false,
            ..self.clone()
        }
    }
}

pub fn load_model(text: &str) -> Result<ModelConfig, FileError> {
    let mut cfg = ModelConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| FileError {
            line: lineno,
            message: m,
        };
        if let Some(rest) = line.strip_prefix("lp:") {
            let (l, r) = rest
                .split_once('<')
                .ok_or_else(|| err("expected `lp: <pattern> < <pattern>`".into()))?;
            cfg.lp_rules.push(LpRule {
                left: FeatPattern::parse(l).map_err(err)?,
                right: FeatPattern::parse(r).map_err(err)?,
            });
        } else if let Some(rest) = line.strip_prefix("semtype") {
            let (label, ty) = rest
                .split_once('=')
                .ok_or_else(|| err("expected `semtype Label = <type>`".into()))?;
            let ty = parse_type(ty.trim()).map_err(|e| err(e.to_string()))?;
            cfg.semtypes.insert(Sym::new(label.trim()), ty);
        } else if let Some(rest) = line.strip_prefix("hfc:") {
            for f in rest.split(',') {
                let f = f.trim();
                if !f.is_empty() {
                    cfg.hfc_features.insert(Sym::new(f));
                }
            }
        } else if let Some(rest) = line.strip_prefix("xbar:") {
            let (head, mothers) = rest
                .split_once("->")
                .ok_or_else(|| err("expected `xbar: cat bar -> bars`".into()))?;
            let mut parts = head.split_whitespace();
            let cat = parts
                .next()
                .ok_or_else(|| err("missing head class".into()))?;
            let bar: u8 = parts
                .next()
                .ok_or_else(|| err("missing head bar level".into()))?
                .parse()
                .map_err(|_| err("bad bar level".into()))?;
            if parts.next().is_some() || bar > 2 {
                return Err(err("expected `xbar: cat bar -> bars`".into()));
            }
            let levels = mothers
                .split_whitespace()
                .map(|b| b.parse::<u8>().map_err(|_| err(format!("bad level `{b}`"))))
                .collect::<Result<Vec<u8>, _>>()?;
            if levels.iter().any(|b| *b > 2) || levels.is_empty() {
                return Err(err("mother bar levels must be 0..2".into()));
            }
            cfg.xbar.insert(Sym::new(cat), bar, levels);
        } else {
            return Err(err(format!("unrecognised directive `{line}`")));
        }
    }
    Ok(cfg)
}

/// Per-filter rejection tallies for one batch of candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FilterTally {
    pub candidates: usize,
    pub survivors: usize,
    pub rejected_xbar: usize,
    pub rejected_hfc: usize,
    pub rejected_lp: usize,
    pub rejected_sem: usize,
}

impl std::ops::AddAssign for FilterTally {
    fn add_assign(&mut self, o: FilterTally) {
        self.candidates += o.candidates;
        self.survivors += o.survivors;
        self.rejected_xbar += o.rejected_xbar;
        self.rejected_hfc += o.rejected_hfc;
        self.rejected_lp += o.rejected_lp;
        self.rejected_sem += o.rejected_sem;
    }
}

/// Runs the full pipeline over super-rule instantiations: X-bar projection
/// (refine), HFC (refine or reject), LP check (reject), semantic
/// composition (reject; abstain passes). Survivors carry head and functor
/// annotations. Refinement only ever adds features.
pub fn filter_instantiations(candidates: &[Rule], cfg: &ModelConfig) -> (Vec<Rule>, FilterTally) {
    let mut tally = FilterTally {
        candidates: candidates.len(),
        ..FilterTally::default()
    };
    let mut out = Vec::new();
    for cand in candidates {
        let refinements = project_xbar(cand, &cfg.xbar);
        if refinements.is_empty() {
            tally.rejected_xbar += 1;
            continue;
        }
        for refined in refinements {
            let refined = if cfg.hfc_on {
                let head = refined.head.expect("x-bar output carries a head");
                match apply_hfc(&refined, head, &cfg.hfc_features) {
                    Some(r) => r,
                    None => {
                        tally.rejected_hfc += 1;
                        continue;
                    }
                }
            } else {
                refined
            };
            if cfg.lp_on && !check_lp(&refined.rhs, &cfg.lp_rules).is_ok() {
                tally.rejected_lp += 1;
                continue;
            }
            let refined = if cfg.sem_on {
                match check_semantics(&refined, &cfg.semtypes) {
                    SemVerdict::Reject => {
                        tally.rejected_sem += 1;
                        continue;
                    }
                    SemVerdict::Ok { functor } => refined.with_functor(functor),
                    SemVerdict::Abstain => refined,
                }
            } else {
                refined
            };
            out.push(refined);
        }
    }
    tally.survivors = out.len();
    (out, tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::RuleOrigin;

    fn cat(text: &str) -> Category {
        Category::parse(text).unwrap()
    }

    fn binary(lhs: &str, d1: &str, d2: &str) -> Rule {
        Rule::new(cat(lhs), vec![cat(d1), cat(d2)], RuleOrigin::Learnt).unwrap()
    }

    fn subcat_rule() -> LpRule {
        LpRule {
            left: FeatPattern::Instantiated(Sym::new("subcat")),
            right: FeatPattern::Uninstantiated(Sym::new("subcat")),
        }
    }

    #[test]
    fn lp_accepts_head_initial_order() {
        let ds = [cat("V0[subcat=2]"), cat("NP[]")];
        assert!(check_lp(&ds, &[subcat_rule()]).is_ok());
    }

    #[test]
    fn lp_rejects_reversed_order() {
        let ds = [cat("NP[]"), cat("V0[subcat=2]")];
        assert_eq!(
            check_lp(&ds, &[subcat_rule()]),
            LpVerdict::Violation {
                rule: 0,
                earlier: 0,
                later: 1
            }
        );
    }

    #[test]
    fn lp_unary_is_vacuous() {
        assert!(check_lp(&[cat("V0[subcat=2]")], &[subcat_rule()]).is_ok());
    }

    fn montague_types() -> BTreeMap<Sym, SemType> {
        let mut map = BTreeMap::new();
        map.insert(Sym::new("VP"), parse_type("<<<e,t>,t>,t>").unwrap());
        map.insert(Sym::new("NP"), parse_type("<<e,t>,t>").unwrap());
        map
    }

    #[test]
    fn s_composes_with_vp_as_functor() {
        let rule = binary("S[]", "NP[]", "VP[]").with_head(1);
        assert_eq!(
            check_semantics(&rule, &montague_types()),
            SemVerdict::Ok { functor: 1 }
        );
    }

    #[test]
    fn vp_over_two_vps_is_rejected() {
        let rule = binary("VP[]", "VP[]", "VP[]").with_head(0);
        assert_eq!(
            check_semantics(&rule, &montague_types()),
            SemVerdict::Reject
        );
    }

    #[test]
    fn unmapped_daughter_abstains() {
        let rule = binary("NP[]", "[cat=D, bar=0]", "N1[]").with_head(1);
        assert_eq!(
            check_semantics(&rule, &montague_types()),
            SemVerdict::Abstain
        );
    }

    #[test]
    fn hfc_copies_head_features_up() {
        let feats: BTreeSet<Sym> = [Sym::new("per")].into();
        let rule = Rule::new(cat("[]"), vec![cat("V0[per=3]")], RuleOrigin::Learnt).unwrap();
        let out = apply_hfc(&rule, 0, &feats).unwrap();
        assert_eq!(out.lhs.get(Sym::new("per")), Some(Sym::new("3")));
    }

    #[test]
    fn hfc_leaves_consistent_mothers_alone() {
        let feats: BTreeSet<Sym> = [Sym::new("per")].into();
        let rule = Rule::new(cat("[per=3]"), vec![cat("V0[per=3]")], RuleOrigin::Learnt).unwrap();
        let out = apply_hfc(&rule, 0, &feats).unwrap();
        assert_eq!(out.lhs, cat("[per=3]"));
    }

    #[test]
    fn hfc_rejects_on_conflict() {
        let feats: BTreeSet<Sym> = [Sym::new("per")].into();
        let rule = Rule::new(cat("[per=1]"), vec![cat("V0[per=3]")], RuleOrigin::Learnt).unwrap();
        assert!(apply_hfc(&rule, 0, &feats).is_none());
    }

    #[test]
    fn xbar_projects_np_over_det_n1() {
        let rule = binary("[]", "[cat=D, bar=0]", "N1[]").with_head(1);
        let out = project_xbar(&rule, &XbarTable::default());
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].lhs, cat("NP[]"));
    }

    #[test]
    fn xbar_unary_head_projects_all_higher_levels() {
        let rule = Rule::new(cat("[]"), vec![cat("N0[]")], RuleOrigin::Learnt).unwrap();
        let out = project_xbar(&rule, &XbarTable::default());
        let lhss: Vec<Category> = out.into_iter().map(|r| r.lhs).collect();
        assert_eq!(lhss, vec![cat("N1[]"), cat("NP[]")]);
    }

    #[test]
    fn xbar_rejects_headless_candidates() {
        let rule = binary("[]", "[num=sg]", "[per=3]");
        assert!(project_xbar(&rule, &XbarTable::default()).is_empty());
    }

    #[test]
    fn pipeline_removes_ill_typed_instantiation() {
        let mut cfg = ModelConfig {
            semtypes: montague_types(),
            ..ModelConfig::default()
        };
        cfg.semtypes
            .insert(Sym::new("V1"), parse_type("<e,t>").unwrap());
        let vp_vp = binary("[]", "VP[]", "VP[]");
        let (survivors, tally) = filter_instantiations(&[vp_vp], &cfg);
        assert!(survivors.is_empty());
        assert!(tally.rejected_sem > 0 || tally.rejected_xbar > 0);
    }

    #[test]
    fn pipeline_is_idempotent_on_survivors() {
        let cfg = ModelConfig {
            semtypes: montague_types(),
            lp_rules: vec![subcat_rule()],
            hfc_features: [Sym::new("num")].into(),
            ..ModelConfig::default()
        };
        let cands = vec![
            binary("[]", "NP[]", "VP[num=sg]"),
            binary("[]", "[cat=D, bar=0, subcat=d]", "N1[]"),
        ];
        let (first, _) = filter_instantiations(&cands, &cfg);
        assert!(!first.is_empty());
        let (second, _) = filter_instantiations(&first, &cfg);
        assert_eq!(first, second);
    }

    #[test]
    fn xbar_only_mode_equals_projection() {
        let cfg = ModelConfig {
            semtypes: montague_types(),
            lp_rules: vec![subcat_rule()],
            ..ModelConfig::default()
        }
        .xbar_only();
        let cands = vec![binary("[]", "NP[]", "V0[subcat=main]")];
        let (survivors, _) = filter_instantiations(&cands, &cfg);
        let direct: Vec<Rule> = cands
            .iter()
            .flat_map(|c| project_xbar(c, &cfg.xbar))
            .collect();
        assert_eq!(survivors, direct);
    }

    #[test]
    fn survivors_subsume_their_candidates() {
        let cfg = ModelConfig {
            semtypes: montague_types(),
            hfc_features: [Sym::new("num")].into(),
            ..ModelConfig::default()
        };
        let cand = binary("[]", "NP[num=pl]", "V0[num=pl, subcat=main]");
        let (survivors, _) = filter_instantiations(std::slice::from_ref(&cand), &cfg);
        assert!(!survivors.is_empty());
        for s in survivors {
            assert!(cand.lhs.subsumes(&s.lhs));
            for (c, r) in cand.rhs.iter().zip(&s.rhs) {
                assert!(c.subsumes(r));
            }
        }
    }

    #[test]
    fn model_file_round_trip() {
        let text = "\
# four LP rules would go here
lp: [subcat] < ~[subcat]
lp: bar=0 < bar=2
semtype NP = <<e,t>,t>
semtype VP = <<<e,t>,t>,t>
hfc: num, per
xbar: N 1 -> 2
";
        let cfg = load_model(text).unwrap();
        assert_eq!(cfg.lp_rules.len(), 2);
        assert_eq!(cfg.semtypes.len(), 2);
        assert_eq!(cfg.hfc_features.len(), 2);
        assert_eq!(cfg.xbar.permitted(Sym::new("N"), Some(1)), vec![2]);
        assert_eq!(cfg.xbar.permitted(Sym::new("V"), Some(0)), vec![1, 2]);
        assert_eq!(cfg.xbar.permitted(Sym::new("V"), Some(2)), vec![2]);
    }

    #[test]
    fn model_file_rejects_nonsense() {
        assert!(load_model("lp: [subcat]").is_err());
        assert!(load_model("xbar: N -> 2").is_err());
        assert!(load_model("nonsense here").is_err());
    }
}
