//! End-to-end experiment driver: split, pretrain, interleaved training,
//! coverage, derivation of the plausible/yardstick subsets, and the
//! plausibility table.

use std::fmt::Write as _;

use crate::category::Category;
use crate::chart::{parse, ParserBounds, Token};
use crate::corpus::{Corpus, TaggedSentence};
use crate::grammar::{Grammar, Lexicon};
use crate::learner::{run_training, ConfigId, LearnerConfig, MdpSource, TrainResult, Verdict};
use crate::metrics::{coverage, plausibility, LabelMap};
use crate::model::ModelConfig;
use crate::tree::LabelTree;

#[derive(Clone, Debug)]
pub struct ExperimentOptions {
    pub configs: Vec<ConfigId>,
    pub theta: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub bounds: ParserBounds,
    pub use_unary: bool,
    pub mdp_source: MdpSource,
    /// Parses sampled per sentence when scoring plausibility.
    pub sample_k: usize,
    /// Target size of the plausible and yardstick subsets.
    pub subset_size: usize,
    pub start: Category,
}

impl Default for ExperimentOptions {
    fn default() -> ExperimentOptions {
        ExperimentOptions {
            configs: vec![ConfigId::A, ConfigId::B, ConfigId::C, ConfigId::D],
            theta: 0.0,
            epsilon: crate::mdp::DEFAULT_FLOOR,
            seed: 0,
            bounds: ParserBounds::default(),
            use_unary: false,
            mdp_source: MdpSource::BenchTrees,
            sample_k: 10,
            subset_size: 15,
            start: Category::parse("S[]").expect("default start category"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConfigRow {
    pub config: ConfigId,
    pub grammar_name: String,
    pub size: usize,
    pub coverage: f64,
    pub plausibility: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub options: ExperimentOptions,
    pub rows: Vec<ConfigRow>,
    pub plausible: Vec<String>,
    pub yardstick: Vec<String>,
    pub warnings: Vec<String>,
    pub results: Vec<(ConfigId, TrainResult)>,
}

pub type ExperimentError = Box<dyn std::error::Error + Send + Sync + 'static>;

fn tokens_of(s: &TaggedSentence) -> Vec<Token> {
    s.parser_tokens()
}

/// Runs the full protocol on a loaded corpus and returns the report.
pub fn run_experiment(
    corpus: &Corpus,
    seed_grammar: &Grammar,
    lexicon: &Lexicon,
    model: &ModelConfig,
    map: &LabelMap,
    options: &ExperimentOptions,
) -> Result<ExperimentReport, ExperimentError> {
    let sentence = |id: &String| -> Result<&TaggedSentence, ExperimentError> {
        corpus
            .sentence(id)
            .ok_or_else(|| format!("split names unknown sentence `{id}`").into())
    };
    let mut pretrain: Vec<(&TaggedSentence, Option<&LabelTree>)> = Vec::new();
    for id in &corpus.split.pretrain {
        pretrain.push((sentence(id)?, corpus.trees.get(id)));
    }
    let mut train: Vec<&TaggedSentence> = Vec::new();
    for id in &corpus.split.train {
        train.push(sentence(id)?);
    }
    let mut test: Vec<&TaggedSentence> = Vec::new();
    for id in &corpus.split.test {
        test.push(sentence(id)?);
    }

    let base = LearnerConfig {
        model_on: true,
        data_on: true,
        theta: options.theta,
        bounds: options.bounds,
        use_unary: options.use_unary,
        epsilon: options.epsilon,
        mdp_source: options.mdp_source,
    };
    let results = run_training(
        seed_grammar,
        lexicon,
        model,
        &base,
        &options.configs,
        &pretrain,
        &train,
        map,
        &options.start,
    )?;

    let mut warnings = Vec::new();

    // Coverage of the test set per configuration, and per-grammar
    // parseability used to derive the subsets.
    let test_tokens: Vec<Vec<Token>> = test.iter().map(|s| tokens_of(s)).collect();
    let existence = ParserBounds::new(1, options.bounds.max_edges);
    let mut parseable_by_seed: Vec<bool> = Vec::new();
    for toks in &test_tokens {
        let out = parse(seed_grammar, lexicon, toks, existence, &options.start)?;
        parseable_by_seed.push(!out.trees.is_empty());
    }
    let learnt_results: Vec<&(ConfigId, TrainResult)> =
        results.iter().filter(|(c, _)| *c != ConfigId::A).collect();
    let mut parseable_by_all_learnt: Vec<bool> = vec![!learnt_results.is_empty(); test.len()];
    for (_, r) in &learnt_results {
        for (i, toks) in test_tokens.iter().enumerate() {
            if parseable_by_all_learnt[i] {
                let out = parse(&r.grammar, lexicon, toks, existence, &options.start)?;
                if out.trees.is_empty() {
                    parseable_by_all_learnt[i] = false;
                }
            }
        }
    }

    // The plausible set needs at least one learnt rule per sentence; the
    // yardstick set is generated by the seed grammar.
    let plausible_pool: Vec<usize> = (0..test.len())
        .filter(|&i| parseable_by_all_learnt[i] && !parseable_by_seed[i])
        .collect();
    let yardstick_pool: Vec<usize> = (0..test.len()).filter(|&i| parseable_by_seed[i]).collect();
    let k = options.subset_size.min(plausible_pool.len());
    let plausible_idx: Vec<usize> = plausible_pool.into_iter().take(k).collect();
    // Yardstick size tracks the plausible size so the comparison stays
    // balanced on small corpora.
    let ky = k.min(yardstick_pool.len());
    let yardstick_idx: Vec<usize> = yardstick_pool.into_iter().take(ky).collect();
    let plausible: Vec<String> = plausible_idx.iter().map(|&i| test[i].id.clone()).collect();
    let yardstick: Vec<String> = yardstick_idx.iter().map(|&i| test[i].id.clone()).collect();

    if plausible.is_empty() {
        warnings.push(
            "plausible set is empty: no test sentence is generated by every learnt grammar \
             while escaping the seed grammar; plausibility column omitted"
                .to_owned(),
        );
    }

    let subset_items = |idx: &[usize]| -> Vec<(String, Vec<Token>, &LabelTree)> {
        idx.iter()
            .filter_map(|&i| {
                corpus
                    .trees
                    .get(&test[i].id)
                    .map(|tree| (test[i].id.clone(), test_tokens[i].clone(), tree))
            })
            .collect()
    };
    let plausible_items = subset_items(&plausible_idx);
    let yardstick_items = subset_items(&yardstick_idx);
    if plausible_items.len() < plausible_idx.len() || yardstick_items.len() < yardstick_idx.len() {
        warnings.push("some subset sentences lack benchmark trees and were skipped".to_owned());
    }

    let mut rows = Vec::new();
    for (config, result) in &results {
        let cov = coverage(
            &result.grammar,
            lexicon,
            &test_tokens,
            options.bounds,
            &options.start,
        )?;
        let items = if *config == ConfigId::A {
            &yardstick_items
        } else {
            &plausible_items
        };
        let plaus = if plausible.is_empty() || items.is_empty() {
            None
        } else {
            Some(
                plausibility(
                    &result.grammar,
                    lexicon,
                    items,
                    options.bounds,
                    options.sample_k,
                    map,
                    &options.start,
                )?
                .mean,
            )
        };
        rows.push(ConfigRow {
            config: *config,
            grammar_name: result.grammar.name.clone(),
            size: result.grammar.len(),
            coverage: cov,
            plausibility: plaus,
        });
    }

    Ok(ExperimentReport {
        options: options.clone(),
        rows,
        plausible,
        yardstick,
        warnings,
        results,
    })
}

impl ExperimentReport {
    /// Human-readable aligned table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Configuration  Grammar  Size  Coverage  Plausibility");
        for row in &self.rows {
            let plaus = match row.plausibility {
                Some(p) => format!("{p:.3}"),
                None => "-".to_owned(),
            };
            let _ = writeln!(
                out,
                "{:<13}  {:<7}  {:<4}  {:<8.1}  {}",
                row.config.letter(),
                row.grammar_name,
                row.size,
                row.coverage,
                plaus
            );
        }
        if !self.plausible.is_empty() {
            let _ = writeln!(out, "plausible: {}", self.plausible.join(", "));
        }
        if !self.yardstick.is_empty() {
            let _ = writeln!(out, "yardstick: {}", self.yardstick.join(", "));
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }

    /// Line-oriented key-value records; byte-identical across runs with
    /// identical inputs and seed.
    pub fn render_machine(&self) -> String {
        let mut out = String::new();
        let o = &self.options;
        let _ = writeln!(out, "report=experiment");
        let _ = writeln!(out, "seed={}", o.seed);
        let _ = writeln!(out, "theta={}", o.theta);
        let _ = writeln!(out, "epsilon={:e}", o.epsilon);
        let _ = writeln!(out, "max_parses={}", o.bounds.max_parses);
        let _ = writeln!(out, "max_edges={}", o.bounds.max_edges);
        let _ = writeln!(out, "use_unary={}", o.use_unary);
        let _ = writeln!(
            out,
            "mdp_source={}",
            match o.mdp_source {
                MdpSource::BenchTrees => "bench",
                MdpSource::OwnParses => "parses",
            }
        );
        let _ = writeln!(out, "sample_k={}", o.sample_k);
        let _ = writeln!(out, "subset_size={}", o.subset_size);
        let configs: Vec<String> = o.configs.iter().map(|c| c.letter().to_string()).collect();
        let _ = writeln!(out, "configs={}", configs.join(","));
        let _ = writeln!(out, "plausible={}", self.plausible.join(","));
        let _ = writeln!(out, "yardstick={}", self.yardstick.join(","));
        for row in &self.rows {
            let plaus = match row.plausibility {
                Some(p) => format!("{p:.3}"),
                None => "absent".to_owned(),
            };
            let _ = writeln!(
                out,
                "config={} grammar={} size={} coverage={:.1} plausibility={}",
                row.config.letter(),
                row.grammar_name,
                row.size,
                row.coverage,
                plaus
            );
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning={w}");
        }
        out
    }

    /// Per-sentence outcome log, one record per line.
    pub fn render_log(&self) -> String {
        let mut out = String::new();
        for (config, result) in &self.results {
            for (id, o) in &result.outcomes {
                let added = match &o.verdict {
                    Verdict::Learnt { rules } => rules.len(),
                    _ => 0,
                };
                let _ = writeln!(
                    out,
                    "config={} sentence={} verdict={} added={} edges={} halted={} \
                     rej_xbar={} rej_hfc={} rej_lp={} rej_sem={} rej_threshold={} rej_verify={}",
                    config.letter(),
                    id,
                    o.verdict.name(),
                    added,
                    o.edges,
                    o.halted,
                    o.tally.rejected_xbar,
                    o.tally.rejected_hfc,
                    o.tally.rejected_lp,
                    o.tally.rejected_sem,
                    o.rejected_threshold,
                    o.rejected_verify
                );
                if let Verdict::Learnt { rules } = &o.verdict {
                    for rule in rules {
                        let _ = writeln!(out, "  rule: {rule}");
                    }
                }
            }
        }
        out
    }
}
