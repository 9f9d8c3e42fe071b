//! The data-driven learner: mother-daughter-pair frequencies, recursive
//! geometric-mean tree scoring, and the acceptance threshold.
//!
//! Table persistence is line-oriented: one `mother daughter count` record
//! per line and a `TOTAL N` trailer, validated on load.

use std::fmt;

use std::collections::BTreeMap;

use crate::grammar::Rule;
use crate::symbol::Sym;
use crate::tree::LabelTree;

pub const DEFAULT_FLOOR: f64 = 1e-6;

/// One `(mother, daughter)` label pair for a dominance edge in a tree;
/// token leaves contribute no pairs. Pairs are listed in left-to-right
/// preorder, with multiplicity.
pub fn extract_mdps(tree: &LabelTree) -> Vec<(Sym, Sym)> {
    let mut out = Vec::new();
    collect(tree, &mut out);
    out
}

fn collect(tree: &LabelTree, out: &mut Vec<(Sym, Sym)>) {
    for child in tree.subtrees() {
        out.push((tree.label, child.label));
    }
    for child in tree.subtrees() {
        collect(child, out);
    }
}

/// Frequency table over mother-daughter pairs. `score_pair` is n/N for a
/// seen pair and the floor for an unseen one, so every tree can be scored.
#[derive(Clone, Debug, PartialEq)]
pub struct MdpTable {
    counts: BTreeMap<(Sym, Sym), u64>,
    total: u64,
    floor: f64,
}

impl MdpTable {
    pub fn new(floor: f64) -> MdpTable {
        assert!(floor > 0.0 && floor <= 1.0);
        MdpTable {
            counts: BTreeMap::new(),
            total: 0,
            floor,
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn count(&self, mother: Sym, daughter: Sym) -> u64 {
        self.counts.get(&(mother, daughter)).copied().unwrap_or(0)
    }

    pub fn distinct_pairs(&self) -> usize {
        self.counts.len()
    }

    /// Adds the pair frequencies of each tree. Training is cumulative.
    pub fn train<'a>(&mut self, trees: impl IntoIterator<Item = &'a LabelTree>) {
        for tree in trees {
            for pair in extract_mdps(tree) {
                *self.counts.entry(pair).or_insert(0) += 1;
                self.total += 1;
            }
        }
    }

    /// Count-wise addition of another table, for merging parallel runs.
    pub fn merge(&mut self, other: &MdpTable) {
        for (pair, n) in &other.counts {
            *self.counts.entry(*pair).or_insert(0) += n;
        }
        self.total += other.total;
    }

    /// The score f of one pair: n/N when seen, the floor when unseen
    /// (including when the table is empty).
    pub fn score_pair(&self, mother: Sym, daughter: Sym) -> f64 {
        match self.counts.get(&(mother, daughter)) {
            Some(&n) if self.total > 0 => n as f64 / self.total as f64,
            _ => self.floor,
        }
    }

    /// Recursive tree score. A preterminal (all children are tokens)
    /// scores 1; otherwise the score is the geometric mean over the
    /// subtree daughters D of `score(D) * f(mother, D)`.
    pub fn score_tree(&self, tree: &LabelTree) -> f64 {
        let factors: Vec<f64> = tree
            .subtrees()
            .map(|d| self.score_tree(d) * self.score_pair(tree.label, d.label))
            .collect();
        geometric_mean(&factors)
    }

    pub fn save(&self) -> String {
        let mut out = String::new();
        for ((m, d), n) in &self.counts {
            out.push_str(&format!("{m} {d} {n}\n"));
        }
        out.push_str(&format!("TOTAL {}\n", self.total));
        out
    }

    pub fn load(text: &str, floor: f64) -> Result<MdpTable, TableError> {
        let mut table = MdpTable::new(floor);
        let mut declared_total: Option<u64> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["TOTAL", n] => {
                    let n = n.parse().map_err(|_| TableError {
                        line: lineno,
                        message: "bad total".into(),
                    })?;
                    declared_total = Some(n);
                }
                [m, d, n] => {
                    let n: u64 = n.parse().map_err(|_| TableError {
                        line: lineno,
                        message: "bad count".into(),
                    })?;
                    if n == 0 {
                        return Err(TableError {
                            line: lineno,
                            message: "counts must be positive".into(),
                        });
                    }
                    table.counts.insert((Sym::new(m), Sym::new(d)), n);
                    table.total += n;
                }
                _ => {
                    return Err(TableError {
                        line: lineno,
                        message: "expected `mother daughter count` or `TOTAL N`".into(),
                    })
                }
            }
        }
        match declared_total {
            Some(n) if n != table.total => Err(TableError {
                line: 0,
                message: format!("declared total {n} but counts sum to {}", table.total),
            }),
            None => Err(TableError {
                line: 0,
                message: "missing TOTAL trailer".into(),
            }),
            Some(_) => Ok(table),
        }
    }
}

pub fn geometric_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 1.0;
    }
    let product: f64 = values.iter().product();
    product.powf(1.0 / values.len() as f64)
}

/// A candidate survives iff every daughter subtree of its local tree scores
/// strictly above the threshold. With θ = 0 every candidate survives, since
/// scores are positive.
pub fn threshold_filter<'a>(
    candidates: Vec<(Rule, &'a LabelTree)>,
    table: &MdpTable,
    theta: f64,
) -> Vec<(Rule, &'a LabelTree)> {
    candidates
        .into_iter()
        .filter(|(_, local)| daughters_exceed(table, local, theta))
        .collect()
}

/// True iff every daughter subtree's score strictly exceeds `theta`.
pub fn daughters_exceed(table: &MdpTable, local: &LabelTree, theta: f64) -> bool {
    local.subtrees().all(|d| table.score_tree(d) > theta)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl std::error::Error for TableError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_bracketed;

    fn sam() -> LabelTree {
        parse_bracketed("(S (NP Sam) (VP (V laughs)))").unwrap()
    }

    fn pair(m: &str, d: &str) -> (Sym, Sym) {
        (Sym::new(m), Sym::new(d))
    }

    #[test]
    fn mdps_of_the_example_tree() {
        let pairs = extract_mdps(&sam());
        assert_eq!(
            pairs,
            vec![pair("S", "NP"), pair("S", "VP"), pair("VP", "V")]
        );
    }

    #[test]
    fn single_lexical_node_has_no_pairs() {
        let t = parse_bracketed("(NP Sam)").unwrap();
        assert!(extract_mdps(&t).is_empty());
    }

    #[test]
    fn multiset_counts_duplicates() {
        let t = parse_bracketed("(A (B x) (B y))").unwrap();
        assert_eq!(extract_mdps(&t), vec![pair("A", "B"), pair("A", "B")]);
    }

    #[test]
    fn training_counts_and_totals() {
        let mut table = MdpTable::new(DEFAULT_FLOOR);
        table.train([&sam()]);
        assert_eq!(table.total(), 3);
        for (m, d) in [("S", "NP"), ("S", "VP"), ("VP", "V")] {
            assert_eq!(table.count(Sym::new(m), Sym::new(d)), 1);
            assert!((table.score_pair(Sym::new(m), Sym::new(d)) - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn unseen_pairs_fall_to_the_floor() {
        let mut table = MdpTable::new(DEFAULT_FLOOR);
        table.train([&sam()]);
        assert_eq!(
            table.score_pair(Sym::new("S"), Sym::new("PP")),
            DEFAULT_FLOOR
        );
        let empty = MdpTable::new(DEFAULT_FLOOR);
        assert_eq!(
            empty.score_pair(Sym::new("S"), Sym::new("NP")),
            DEFAULT_FLOOR
        );
    }

    #[test]
    fn degenerate_single_pair_scores_one() {
        let mut table = MdpTable::new(DEFAULT_FLOOR);
        let t = parse_bracketed("(A (B x))").unwrap();
        table.train([&t]);
        assert_eq!(table.score_pair(Sym::new("A"), Sym::new("B")), 1.0);
    }

    #[test]
    fn seen_frequencies_sum_to_one() {
        let mut table = MdpTable::new(DEFAULT_FLOOR);
        table.train([
            &sam(),
            &parse_bracketed("(S (NP Kim) (VP (V ran) (NP home)))").unwrap(),
        ]);
        let sum: f64 = [("S", "NP"), ("S", "VP"), ("VP", "V"), ("VP", "NP")]
            .iter()
            .map(|(m, d)| table.count(Sym::new(m), Sym::new(d)) as f64 / table.total() as f64)
            .sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn score_of_the_example_tree() {
        let mut table = MdpTable::new(DEFAULT_FLOOR);
        table.train([&sam()]);
        let expected = (1.0f64 / 27.0).sqrt();
        assert!((table.score_tree(&sam()) - expected).abs() < 1e-12);
    }

    #[test]
    fn doubling_counts_leaves_scores_unchanged() {
        let mut once = MdpTable::new(DEFAULT_FLOOR);
        once.train([&sam()]);
        let mut twice = MdpTable::new(DEFAULT_FLOOR);
        twice.train([&sam(), &sam()]);
        assert_eq!(twice.total(), 2 * once.total());
        assert!((once.score_tree(&sam()) - twice.score_tree(&sam())).abs() < 1e-15);
    }

    #[test]
    fn equal_factors_make_the_mean_trivial() {
        for k in 1..=5 {
            let vals = vec![0.37; k];
            assert!((geometric_mean(&vals) - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_table_scores_are_floor_powers() {
        let table = MdpTable::new(DEFAULT_FLOOR);
        let t = parse_bracketed("(A (B x) (C y))").unwrap();
        // Both daughters are preterminals: gm(eps, eps) = eps.
        assert!((table.score_tree(&t) - DEFAULT_FLOOR).abs() < 1e-18);
    }

    #[test]
    fn merging_adds_counts() {
        let mut a = MdpTable::new(DEFAULT_FLOOR);
        a.train([&sam()]);
        let mut b = MdpTable::new(DEFAULT_FLOOR);
        b.train([&parse_bracketed("(S (NP Kim) (VP (V ran)))").unwrap()]);
        a.merge(&b);
        assert_eq!(a.total(), 6);
        assert_eq!(a.count(Sym::new("S"), Sym::new("NP")), 2);
    }

    #[test]
    fn save_load_round_trip_validates_total() {
        let mut table = MdpTable::new(DEFAULT_FLOOR);
        table.train([&sam()]);
        let text = table.save();
        let back = MdpTable::load(&text, DEFAULT_FLOOR).unwrap();
        assert_eq!(back, table);
        let broken = text.replace("TOTAL 3", "TOTAL 4");
        assert!(MdpTable::load(&broken, DEFAULT_FLOOR).is_err());
    }

    #[test]
    fn threshold_zero_accepts_and_one_rejects() {
        let mut table = MdpTable::new(DEFAULT_FLOOR);
        table.train([&sam()]);
        let tree = sam();
        assert!(daughters_exceed(&table, &tree, 0.0));
        assert!(!daughters_exceed(&table, &tree, 1.0));
    }

    #[test]
    fn threshold_uses_daughter_scores_strictly() {
        let mut table = MdpTable::new(DEFAULT_FLOOR);
        table.train([&sam()]);
        // The VP daughter of the root scores 1/3; the NP daughter scores 1.
        let tree = sam();
        assert!(daughters_exceed(&table, &tree, 0.3));
        assert!(!daughters_exceed(&table, &tree, 1.0 / 3.0));
    }
}
