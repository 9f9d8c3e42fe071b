//! Interleaved parsing and learning over sentences, and the A-D
//! configuration matrix.
//!
//! Per sentence: try the current grammar; on failure complete the parse
//! with the binary super rule (optionally the unary one), filter each
//! super-rule instantiation through the model pipeline (X-bar always, the
//! rest when model-based learning is on) and through the daughter-score
//! threshold (when data-driven learning is on). A completed parse whose
//! super nodes all have survivors is accepted if the sentence then
//! reparses under the extended grammar without super rules; only the rules
//! that derivation exercises are kept. Otherwise the sentence is deemed
//! ungrammatical and the grammar is unchanged.

use crate::category::Category;
use crate::chart::{parse, parse_completing, HaltReason, ParseError, ParserBounds};
use crate::corpus::TaggedSentence;
use crate::grammar::{Grammar, Lexicon, Rule, RuleOrigin};
use crate::mdp::{daughters_exceed, MdpTable, DEFAULT_FLOOR};
use crate::metrics::{normalize, LabelMap};
use crate::model::{filter_instantiations, FilterTally, ModelConfig};
use crate::tree::LabelTree;

/// Where the pretraining frequencies come from: the benchmark trees of the
/// pretraining sentences, or the system's own parses of them.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MdpSource {
    BenchTrees,
    OwnParses,
}

#[derive(Clone, Debug)]
pub struct LearnerConfig {
    pub model_on: bool,
    pub data_on: bool,
    pub theta: f64,
    pub bounds: ParserBounds,
    pub use_unary: bool,
    pub epsilon: f64,
    pub mdp_source: MdpSource,
}

impl Default for LearnerConfig {
    fn default() -> LearnerConfig {
        LearnerConfig {
            model_on: true,
            data_on: true,
            theta: 0.0,
            bounds: ParserBounds::default(),
            use_unary: false,
            epsilon: DEFAULT_FLOOR,
            mdp_source: MdpSource::BenchTrees,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// The grammar already generated the sentence.
    ParsedWithG,
    /// The sentence was completed and these rules were added.
    Learnt { rules: Vec<Rule> },
    /// Every instantiation was rejected; the grammar is unchanged.
    Ungrammatical,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::ParsedWithG => "parsed_with_g",
            Verdict::Learnt { .. } => "learnt",
            Verdict::Ungrammatical => "ungrammatical",
        }
    }
}

/// Per-sentence learning diagnostics.
#[derive(Clone, Debug)]
pub struct LearnOutcome {
    pub verdict: Verdict,
    pub edges: usize,
    pub halted: HaltReason,
    pub tally: FilterTally,
    pub rejected_threshold: usize,
    pub rejected_verify: usize,
}

/// One trained configuration: the grammar produced, its table, and the
/// per-sentence outcome log.
#[derive(Clone, Debug)]
pub struct TrainResult {
    pub grammar: Grammar,
    pub table: MdpTable,
    pub outcomes: Vec<(String, LearnOutcome)>,
}

/// The experiment's learner configurations.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConfigId {
    /// No learning; the grammar G is used as-is.
    A,
    /// Data-driven learning only, producing G1.
    B,
    /// Model-based learning only, producing G2.
    C,
    /// Both learning styles together, producing G3.
    D,
}

impl ConfigId {
    pub fn grammar_name(self) -> &'static str {
        match self {
            ConfigId::A => "G",
            ConfigId::B => "G1",
            ConfigId::C => "G2",
            ConfigId::D => "G3",
        }
    }

    pub fn letter(self) -> char {
        match self {
            ConfigId::A => 'A',
            ConfigId::B => 'B',
            ConfigId::C => 'C',
            ConfigId::D => 'D',
        }
    }

    /// (model_on, data_on); X-bar projection is applied regardless.
    fn toggles(self) -> (bool, bool) {
        match self {
            ConfigId::A => (false, false),
            ConfigId::B => (false, true),
            ConfigId::C => (true, false),
            ConfigId::D => (true, true),
        }
    }

    pub fn parse_list(text: &str) -> Result<Vec<ConfigId>, String> {
        let mut out = Vec::new();
        for part in text.split(',') {
            let id = match part.trim() {
                "A" | "a" => ConfigId::A,
                "B" | "b" => ConfigId::B,
                "C" | "c" => ConfigId::C,
                "D" | "d" => ConfigId::D,
                other => return Err(format!("unknown configuration `{other}`")),
            };
            if !out.contains(&id) {
                out.push(id);
            }
        }
        if out.is_empty() {
            return Err("no configurations requested".to_owned());
        }
        Ok(out)
    }
}

/// How many completed parses the learner will examine while looking for
/// ones whose instantiations survive filtering.
const COMPLETION_SCAN_BUDGET: usize = 50;

/// A completed parse whose super nodes all survived filtering, with the
/// survivors in preorder position order.
struct AcceptedParse {
    tree_index: usize,
    survivors: Vec<Rule>,
    score: f64,
}

/// Processes one sentence, returning the (possibly extended) grammar and
/// the outcome. The table is trained on the accepted parse only when
/// data-driven learning is on, which keeps model-only runs table-free.
pub fn learn_sentence(
    grammar: &Grammar,
    lexicon: &Lexicon,
    cfg: &LearnerConfig,
    model: &ModelConfig,
    table: &mut MdpTable,
    sentence: &TaggedSentence,
    start: &Category,
) -> Result<(Grammar, LearnOutcome), ParseError> {
    let tokens = sentence.parser_tokens();
    let plain = parse(grammar, lexicon, &tokens, cfg.bounds, start)?;
    if !plain.trees.is_empty() {
        return Ok((
            grammar.clone(),
            LearnOutcome {
                verdict: Verdict::ParsedWithG,
                edges: plain.edges,
                halted: plain.halted,
                tally: FilterTally::default(),
                rejected_threshold: 0,
                rejected_verify: 0,
            },
        ));
    }

    let effective_model = if cfg.model_on {
        model.clone()
    } else {
        model.xbar_only()
    };
    // Rejection is interleaved with completion: parses whose instantiations
    // are all rejected do not count against the n-parse bound, so the scan
    // walks the completion enumeration until n parses survive filtering or
    // the enumeration budget runs out. The edge bound still caps the chart.
    let scan_bounds = ParserBounds::new(
        COMPLETION_SCAN_BUDGET.max(cfg.bounds.max_parses),
        cfg.bounds.max_edges,
    );
    let completed = parse_completing(grammar, lexicon, &tokens, scan_bounds, start, cfg.use_unary)?;

    let mut tally = FilterTally::default();
    let mut rejected_threshold = 0usize;
    let mut rejected_verify = 0usize;
    let mut accepted: Vec<AcceptedParse> = Vec::new();

    for (tree_index, tree) in completed.trees.iter().enumerate() {
        if accepted.len() >= cfg.bounds.max_parses {
            break;
        }
        let mut survivors: Vec<Rule> = Vec::new();
        let mut all_nodes_survive = true;
        for node in tree.super_nodes() {
            let candidate = node
                .candidate_rule()
                .expect("super nodes expose their instantiation");
            let (mut node_survivors, node_tally) =
                filter_instantiations(std::slice::from_ref(&candidate), &effective_model);
            tally += node_tally;
            if cfg.data_on && !node_survivors.is_empty() {
                let local = node.to_label_tree();
                if !daughters_exceed(table, &local, cfg.theta) {
                    rejected_threshold += node_survivors.len();
                    node_survivors.clear();
                }
            }
            if node_survivors.is_empty() {
                all_nodes_survive = false;
                break;
            }
            survivors.extend(node_survivors);
        }
        if all_nodes_survive {
            let score = table.score_tree(&tree.to_label_tree());
            accepted.push(AcceptedParse {
                tree_index,
                survivors,
                score,
            });
        }
    }

    // With several completed parses in play, the highest-scoring one is
    // tried first; enumeration order breaks ties.
    accepted.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.tree_index.cmp(&b.tree_index))
    });

    for parse_candidate in &accepted {
        let mut extended = grammar.clone();
        for rule in &parse_candidate.survivors {
            let mut learnt = rule.clone();
            learnt.origin = RuleOrigin::Learnt;
            let (next, _) = extended.add_rule(learnt);
            extended = next;
        }
        let verify_bounds = ParserBounds::new(1, cfg.bounds.max_edges);
        let reparse = parse(&extended, lexicon, &tokens, verify_bounds, start)?;
        let Some(accepted_tree) = reparse.trees.first() else {
            rejected_verify += parse_candidate.survivors.len();
            continue;
        };
        // Keep only the learnt rules the accepted derivation exercises.
        let used = accepted_tree.rules_used();
        let kept: Vec<Rule> = (grammar.len()..extended.len())
            .filter(|i| used.contains(i))
            .map(|i| extended.rule(i).clone())
            .collect();
        if kept.is_empty() {
            // The reparse got by on the old rules alone; nothing to learn.
            return Ok((
                grammar.clone(),
                LearnOutcome {
                    verdict: Verdict::ParsedWithG,
                    edges: completed.edges,
                    halted: completed.halted,
                    tally,
                    rejected_threshold,
                    rejected_verify,
                },
            ));
        }
        let mut final_grammar = grammar.clone();
        for rule in &kept {
            let (next, _) = final_grammar.add_rule(rule.clone());
            final_grammar = next;
        }
        if cfg.data_on {
            table.train([&accepted_tree.to_label_tree()]);
        }
        return Ok((
            final_grammar,
            LearnOutcome {
                verdict: Verdict::Learnt { rules: kept },
                edges: completed.edges,
                halted: completed.halted,
                tally,
                rejected_threshold,
                rejected_verify,
            },
        ));
    }

    Ok((
        grammar.clone(),
        LearnOutcome {
            verdict: Verdict::Ungrammatical,
            edges: completed.edges,
            halted: completed.halted,
            tally,
            rejected_threshold,
            rejected_verify,
        },
    ))
}

/// Builds the pretraining table for one configuration.
pub fn pretrain_table(
    grammar: &Grammar,
    lexicon: &Lexicon,
    cfg: &LearnerConfig,
    pretrain: &[(&TaggedSentence, Option<&LabelTree>)],
    map: &LabelMap,
    start: &Category,
) -> Result<MdpTable, ParseError> {
    let mut table = MdpTable::new(cfg.epsilon);
    match cfg.mdp_source {
        MdpSource::BenchTrees => {
            for (_, tree) in pretrain {
                if let Some(tree) = tree {
                    table.train([&normalize(tree, map)]);
                }
            }
        }
        MdpSource::OwnParses => {
            for (sentence, _) in pretrain {
                let tokens = sentence.parser_tokens();
                let outcome = parse(grammar, lexicon, &tokens, cfg.bounds, start)?;
                if let Some(tree) = outcome.trees.first() {
                    table.train([&tree.to_label_tree()]);
                }
            }
        }
    }
    Ok(table)
}

/// Runs the requested configurations over the training sentences in corpus
/// order. A returns the seed grammar unchanged; B and D pretrain the table
/// first.
#[allow(clippy::too_many_arguments)]
pub fn run_training(
    seed: &Grammar,
    lexicon: &Lexicon,
    model: &ModelConfig,
    base: &LearnerConfig,
    configs: &[ConfigId],
    pretrain: &[(&TaggedSentence, Option<&LabelTree>)],
    train: &[&TaggedSentence],
    map: &LabelMap,
    start: &Category,
) -> Result<Vec<(ConfigId, TrainResult)>, ParseError> {
    let mut out = Vec::new();
    for &config in configs {
        let (model_on, data_on) = config.toggles();
        let cfg = LearnerConfig {
            model_on,
            data_on,
            ..base.clone()
        };
        let mut grammar = seed.clone().renamed(config.grammar_name());
        let mut table = if data_on {
            pretrain_table(seed, lexicon, &cfg, pretrain, map, start)?
        } else {
            MdpTable::new(cfg.epsilon)
        };
        let mut outcomes = Vec::new();
        if config != ConfigId::A {
            for sentence in train {
                let (next, outcome) =
                    learn_sentence(&grammar, lexicon, &cfg, model, &mut table, sentence, start)?;
                grammar = next.renamed(config.grammar_name());
                outcomes.push((sentence.id.clone(), outcome));
            }
        }
        out.push((
            config,
            TrainResult {
                grammar,
                table,
                outcomes,
            },
        ));
    }
    Ok(out)
}
