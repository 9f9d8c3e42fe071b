//! Command-line driver: parse, pretrain, learn, eval, and the full A-D
//! experiment.
//!
//! Exit codes: 0 on success, 1 when some sentence fails to parse, 2 on
//! usage or file-format errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use uglearn::category::Category;
use uglearn::chart::{parse, parse_completing, ParserBounds};
use uglearn::corpus::{load_tagged, make_split, Corpus, TaggedSentence};
use uglearn::experiment::{run_experiment, ExperimentOptions, ExperimentReport};
use uglearn::grammar::{load_grammar, load_lexicon, Grammar, Lexicon};
use uglearn::learner::{
    learn_sentence, pretrain_table, ConfigId, LearnerConfig, MdpSource, Verdict,
};
use uglearn::mdp::MdpTable;
use uglearn::metrics::{coverage, plausibility, LabelMap};
use uglearn::model::load_model;
use uglearn::tree::LabelTree;

#[derive(Parser)]
#[command(
    name = "uglearn",
    version,
    about = "Learns unification-based grammar rules from tagged corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse tagged sentences and print bracketed trees
    Parse(ParseArgs),
    /// Build a mother-daughter-pair frequency table from the pretrain split
    Pretrain(PretrainArgs),
    /// Run interleaved parsing and learning over a sentence file
    Learn(LearnArgs),
    /// Measure coverage (and optionally plausibility) over the test split
    Eval(EvalArgs),
    /// Run the experiment protocol over configurations A-D
    Experiment(ExperimentArgs),
}

#[derive(Args, Clone)]
struct GrammarArgs {
    /// Grammar file
    #[arg(long)]
    grammar: PathBuf,
    /// Lexicon file (tag to category map)
    #[arg(long)]
    lexicon: PathBuf,
    /// Start category, e.g. `S[]`
    #[arg(long, default_value = "S[]")]
    start: String,
}

#[derive(Args, Clone, Copy)]
struct BoundArgs {
    /// Halt after this many parses
    #[arg(long, default_value_t = 1)]
    max_parses: usize,
    /// Halt after this many edges
    #[arg(long, default_value_t = 3000)]
    max_edges: usize,
}

impl BoundArgs {
    fn bounds(self) -> ParserBounds {
        ParserBounds::new(self.max_parses.max(1), self.max_edges.max(1))
    }
}

#[derive(Args)]
struct ParseArgs {
    #[command(flatten)]
    grammar: GrammarArgs,
    /// Tagged sentence file (`word_TAG` tokens, one sentence per line)
    #[arg(long)]
    sentences: PathBuf,
    #[command(flatten)]
    bounds: BoundArgs,
    /// Add the binary super rule (parse completion mode)
    #[arg(long)]
    complete: bool,
    /// Also add the unary super rule (implies --complete)
    #[arg(long)]
    use_unary: bool,
    /// Emit one structured record per sentence on stderr
    #[arg(long)]
    diagnostics: bool,
}

#[derive(Args)]
struct PretrainArgs {
    /// Corpus directory holding one .tag, .tre and .split file
    #[arg(long)]
    corpus: PathBuf,
    /// Label map applied to benchmark trees before counting
    #[arg(long)]
    labelmap: Option<PathBuf>,
    /// Output table file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Floor score for unseen pairs
    #[arg(long, default_value_t = uglearn::mdp::DEFAULT_FLOOR)]
    epsilon: f64,
    /// Count pairs from benchmark trees or from the system's own parses
    #[arg(long, default_value = "bench")]
    source: String,
    /// Grammar file (required with --source parses)
    #[arg(long)]
    grammar: Option<PathBuf>,
    /// Lexicon file (required with --source parses)
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Start category for --source parses
    #[arg(long, default_value = "S[]")]
    start: String,
    #[command(flatten)]
    bounds: BoundArgs,
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    grammar: GrammarArgs,
    /// Model configuration file (LP rules, semantic types, HFC, X-bar)
    #[arg(long)]
    model: PathBuf,
    /// Tagged sentences to learn from, in order
    #[arg(long)]
    sentences: PathBuf,
    /// Learner configuration: B (data only), C (model only) or D (both)
    #[arg(long, default_value = "D")]
    config: String,
    /// Pretrained table file to start from
    #[arg(long)]
    table: Option<PathBuf>,
    /// Where to write the updated table
    #[arg(long)]
    table_out: Option<PathBuf>,
    /// Where to write the learnt grammar (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Acceptance threshold on daughter scores
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    /// Floor score for unseen pairs
    #[arg(long, default_value_t = uglearn::mdp::DEFAULT_FLOOR)]
    epsilon: f64,
    /// Also use the unary super rule during completion
    #[arg(long)]
    use_unary: bool,
    /// Per-sentence outcome log file (stderr when omitted)
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    bounds: BoundArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    grammar: GrammarArgs,
    /// Corpus directory holding one .tag, .tre and .split file
    #[arg(long)]
    corpus: PathBuf,
    /// Label map for tree normalisation
    #[arg(long)]
    labelmap: Option<PathBuf>,
    /// Also score plausibility (best of --sample parses per sentence)
    #[arg(long)]
    plausibility: bool,
    /// Parses sampled per sentence
    #[arg(long, default_value_t = 10)]
    sample: usize,
    #[command(flatten)]
    bounds: BoundArgs,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Corpus directory holding one .tag, .tre and .split file
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    grammar: GrammarArgs,
    /// Model configuration file
    #[arg(long)]
    model: PathBuf,
    /// Label map for tree normalisation
    #[arg(long)]
    labelmap: Option<PathBuf>,
    /// Configurations to run, e.g. `A,B,C,D`
    #[arg(long, default_value = "A,B,C,D")]
    configs: String,
    /// Acceptance threshold on daughter scores
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    /// Floor score for unseen pairs
    #[arg(long, default_value_t = uglearn::mdp::DEFAULT_FLOOR)]
    epsilon: f64,
    /// Split seed; echoed into the report, used with --resplit
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ignore the .split file and draw a fresh `pretrain,train,test` split
    #[arg(long, value_name = "P,T,E")]
    resplit: Option<String>,
    /// Also use the unary super rule during completion
    #[arg(long)]
    use_unary: bool,
    /// Pretraining source: `bench` trees or own `parses`
    #[arg(long, default_value = "bench")]
    mdp_source: String,
    /// Parses sampled per sentence for plausibility
    #[arg(long, default_value_t = 10)]
    sample: usize,
    /// Target size of the plausible and yardstick subsets
    #[arg(long, default_value_t = 15)]
    subset: usize,
    /// Write the human-readable table here as well as stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the machine-readable key-value report here
    #[arg(long)]
    machine_out: Option<PathBuf>,
    /// Write the per-sentence outcome log here
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    bounds: BoundArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Parse(args) => cmd_parse(args),
        Command::Pretrain(args) => cmd_pretrain(args),
        Command::Learn(args) => cmd_learn(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type CmdError = Box<dyn std::error::Error + Send + Sync + 'static>;

fn read(path: &Path) -> Result<String, CmdError> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()).into())
}

fn write_out(path: Option<&PathBuf>, content: &str) -> Result<(), CmdError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| format!("cannot write {}: {e}", p.display()).into()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_grammar_args(args: &GrammarArgs) -> Result<(Grammar, Lexicon, Category), CmdError> {
    let name = args
        .grammar
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("grammar")
        .to_owned();
    let load = load_grammar(&read(&args.grammar)?, &name)?;
    for w in &load.warnings {
        eprintln!("warning: {w}");
    }
    let lexicon = load_lexicon(&read(&args.lexicon)?)?;
    let start = Category::parse(&args.start)?;
    Ok((load.grammar, lexicon, start))
}

fn load_labelmap(path: Option<&PathBuf>) -> Result<LabelMap, CmdError> {
    match path {
        Some(p) => Ok(LabelMap::load(&read(p)?)?),
        None => Ok(LabelMap::identity()),
    }
}

fn cmd_parse(args: ParseArgs) -> Result<ExitCode, CmdError> {
    let (grammar, lexicon, start) = load_grammar_args(&args.grammar)?;
    let sentences = load_tagged(&read(&args.sentences)?)?;
    let bounds = args.bounds.bounds();
    let complete = args.complete || args.use_unary;
    let mut all_parsed = true;
    for sentence in &sentences {
        let tokens = sentence.parser_tokens();
        let outcome = if complete {
            parse_completing(&grammar, &lexicon, &tokens, bounds, &start, args.use_unary)?
        } else {
            parse(&grammar, &lexicon, &tokens, bounds, &start)?
        };
        if outcome.trees.is_empty() {
            println!("NO PARSE {}", sentence.id);
            all_parsed = false;
        } else {
            for tree in &outcome.trees {
                println!("{} {}", sentence.id, tree);
            }
        }
        if args.diagnostics {
            eprintln!(
                "diag sentence={} edges={} halted={}",
                sentence.id, outcome.edges, outcome.halted
            );
        }
    }
    Ok(if all_parsed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn mdp_source_of(text: &str) -> Result<MdpSource, CmdError> {
    match text {
        "bench" => Ok(MdpSource::BenchTrees),
        "parses" => Ok(MdpSource::OwnParses),
        other => Err(format!("unknown --mdp-source `{other}` (use bench|parses)").into()),
    }
}

fn cmd_pretrain(args: PretrainArgs) -> Result<ExitCode, CmdError> {
    let corpus = Corpus::load_dir(&args.corpus)?;
    let map = load_labelmap(args.labelmap.as_ref())?;
    let source = mdp_source_of(&args.source)?;
    let mut cfg = LearnerConfig {
        epsilon: args.epsilon,
        mdp_source: source,
        bounds: args.bounds.bounds(),
        ..LearnerConfig::default()
    };
    cfg.bounds = ParserBounds::new(1, cfg.bounds.max_edges);
    let pretrain: Vec<(&TaggedSentence, Option<&LabelTree>)> = corpus
        .split
        .pretrain
        .iter()
        .filter_map(|id| corpus.sentence(id).map(|s| (s, corpus.trees.get(id))))
        .collect();
    let table = match source {
        MdpSource::BenchTrees => {
            let dummy = Grammar::new("unused");
            let lexicon = Lexicon::new();
            let start = Category::empty();
            pretrain_table(&dummy, &lexicon, &cfg, &pretrain, &map, &start)?
        }
        MdpSource::OwnParses => {
            let grammar_path = args
                .grammar
                .as_ref()
                .ok_or("--source parses needs --grammar")?;
            let lexicon_path = args
                .lexicon
                .as_ref()
                .ok_or("--source parses needs --lexicon")?;
            let load = load_grammar(&read(grammar_path)?, "G")?;
            let lexicon = load_lexicon(&read(lexicon_path)?)?;
            let start = Category::parse(&args.start)?;
            pretrain_table(&load.grammar, &lexicon, &cfg, &pretrain, &map, &start)?
        }
    };
    eprintln!(
        "pretrained on {} sentences: {} distinct pairs, {} total",
        pretrain.len(),
        table.distinct_pairs(),
        table.total()
    );
    write_out(args.out.as_ref(), &table.save())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_learn(args: LearnArgs) -> Result<ExitCode, CmdError> {
    let (grammar, lexicon, start) = load_grammar_args(&args.grammar)?;
    let model = load_model(&read(&args.model)?)?;
    let sentences = load_tagged(&read(&args.sentences)?)?;
    let (model_on, data_on) = match args.config.as_str() {
        "B" | "b" => (false, true),
        "C" | "c" => (true, false),
        "D" | "d" => (true, true),
        other => return Err(format!("--config must be B, C or D, got `{other}`").into()),
    };
    let cfg = LearnerConfig {
        model_on,
        data_on,
        theta: args.threshold,
        bounds: args.bounds.bounds(),
        use_unary: args.use_unary,
        epsilon: args.epsilon,
        mdp_source: MdpSource::BenchTrees,
    };
    let mut table = match &args.table {
        Some(p) => MdpTable::load(&read(p)?, args.epsilon)?,
        None => MdpTable::new(args.epsilon),
    };
    let mut current = grammar.clone();
    let mut log = String::new();
    let mut learnt_sentences = 0usize;
    for sentence in &sentences {
        let (next, outcome) = learn_sentence(
            &current, &lexicon, &cfg, &model, &mut table, sentence, &start,
        )?;
        current = next;
        if matches!(outcome.verdict, Verdict::Learnt { .. }) {
            learnt_sentences += 1;
        }
        log.push_str(&format!(
            "sentence={} verdict={} edges={} halted={}\n",
            sentence.id,
            outcome.verdict.name(),
            outcome.edges,
            outcome.halted
        ));
        if let Verdict::Learnt { rules } = &outcome.verdict {
            for rule in rules {
                log.push_str(&format!("  rule: {rule}\n"));
            }
        }
    }
    match &args.log {
        Some(p) => {
            std::fs::write(p, &log).map_err(|e| format!("cannot write {}: {e}", p.display()))?
        }
        None => eprint!("{log}"),
    }
    eprintln!(
        "learnt from {learnt_sentences} of {} sentences; grammar {} -> {} rules",
        sentences.len(),
        grammar.len(),
        current.len()
    );
    if let Some(p) = &args.table_out {
        std::fs::write(p, table.save())
            .map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    write_out(args.out.as_ref(), &current.save())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode, CmdError> {
    let (grammar, lexicon, start) = load_grammar_args(&args.grammar)?;
    let corpus = Corpus::load_dir(&args.corpus)?;
    let map = load_labelmap(args.labelmap.as_ref())?;
    let bounds = args.bounds.bounds();
    let test: Vec<&TaggedSentence> = corpus
        .split
        .test
        .iter()
        .filter_map(|id| corpus.sentence(id))
        .collect();
    let token_lists: Vec<Vec<uglearn::Token>> = test.iter().map(|s| s.parser_tokens()).collect();
    let cov = coverage(&grammar, &lexicon, &token_lists, bounds, &start)?;
    println!("sentences={}", test.len());
    println!("coverage={cov:.1}");
    if args.plausibility {
        let existence = ParserBounds::new(1, bounds.max_edges);
        let mut items = Vec::new();
        for (s, toks) in test.iter().zip(&token_lists) {
            let Some(bench) = corpus.trees.get(&s.id) else {
                continue;
            };
            if !parse(&grammar, &lexicon, toks, existence, &start)?
                .trees
                .is_empty()
            {
                items.push((s.id.clone(), toks.clone(), bench));
            }
        }
        let report = plausibility(
            &grammar,
            &lexicon,
            &items,
            bounds,
            args.sample,
            &map,
            &start,
        )?;
        for (id, score) in &report.per_sentence {
            println!("sentence={id} closeness={score:.3}");
        }
        println!("plausibility={:.3}", report.mean);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_experiment(args: ExperimentArgs) -> Result<ExitCode, CmdError> {
    let (grammar, lexicon, start) = load_grammar_args(&args.grammar)?;
    let model = load_model(&read(&args.model)?)?;
    let map = load_labelmap(args.labelmap.as_ref())?;
    let mut corpus = Corpus::load_dir(&args.corpus)?;
    if let Some(spec) = &args.resplit {
        let sizes: Vec<usize> = spec
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("bad --resplit `{spec}`, expected `P,T,E`"))?;
        let [p, t, e] = sizes.as_slice() else {
            return Err(format!("bad --resplit `{spec}`, expected three sizes").into());
        };
        let ids: Vec<String> = corpus.sentences.iter().map(|s| s.id.clone()).collect();
        corpus.split = make_split(&ids, (*p, *t, *e), args.seed)?;
    }
    let options = ExperimentOptions {
        configs: ConfigId::parse_list(&args.configs)?,
        theta: args.threshold,
        epsilon: args.epsilon,
        seed: args.seed,
        bounds: args.bounds.bounds(),
        use_unary: args.use_unary,
        mdp_source: mdp_source_of(&args.mdp_source)?,
        sample_k: args.sample,
        subset_size: args.subset,
        start,
    };
    let report: ExperimentReport =
        run_experiment(&corpus, &grammar, &lexicon, &model, &map, &options)?;
    let table_text = report.render_table();
    print!("{table_text}");
    if let Some(p) = &args.out {
        std::fs::write(p, &table_text).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    if let Some(p) = &args.machine_out {
        std::fs::write(p, report.render_machine())
            .map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    if let Some(p) = &args.log {
        std::fs::write(p, report.render_log())
            .map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}
