//! A grammar-induction toolkit that learns unification-based grammar rules
//! from a tagged, parsed corpus.
//!
//! Failed parses are completed with maximally general *super rules*; the
//! resulting instantiations are vetted by a linguistic model (linear
//! precedence, semantic type composition, head feature propagation, X-bar
//! projection) and by mother-daughter-pair frequency scoring. Learnt
//! grammars are evaluated with a tree-closeness metric against benchmark
//! parses.
//!
//! ```
//! use uglearn::*;
//!
//! let grammar = load_grammar("S[] -> NP[] VP[] {head=2}", "toy")?.grammar;
//! let lexicon = load_lexicon("tag n NP[]\ntag v VP[]")?;
//! let start = Category::parse("S[]")?;
//!
//! // The grammar covers "n v" outright.
//! let tokens = [Token::bare("n"), Token::bare("v")];
//! let out = parse(&grammar, &lexicon, &tokens, ParserBounds::default(), &start)?;
//! assert_eq!(out.trees[0].to_string(), "(S (NP n) (VP v))");
//!
//! // "n v n" needs a new rule, which one learning step provides.
//! let sentence = corpus::load_tagged("n_n v_v n_n")?.remove(0);
//! let mut table = MdpTable::new(mdp::DEFAULT_FLOOR);
//! let cfg = LearnerConfig { data_on: false, ..LearnerConfig::default() };
//! let (learnt, outcome) = learn_sentence(
//!     &grammar, &lexicon, &cfg, &ModelConfig::default(), &mut table, &sentence, &start,
//! )?;
//! assert!(matches!(outcome.verdict, Verdict::Learnt { .. }));
//! assert!(learnt.len() > grammar.len());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod category;
pub mod chart;
pub mod corpus;
pub mod experiment;
pub mod grammar;
pub mod learner;
pub mod mdp;
pub mod metrics;
pub mod model;
pub mod semtype;
pub mod symbol;
pub mod tree;

pub use category::Category;
pub use chart::{
    parse, parse_completing, HaltReason, ParseOutcome, ParseTree, ParserBounds, Token,
};
pub use grammar::{load_grammar, load_lexicon, super_rules, Grammar, LexEntry, Lexicon, Rule};
pub use learner::{learn_sentence, run_training, ConfigId, LearnerConfig, Verdict};
pub use mdp::MdpTable;
pub use metrics::{closeness, coverage, plausibility, LabelMap};
pub use model::ModelConfig;
pub use semtype::{compose, parse_type, SemType};
pub use symbol::Sym;
pub use tree::{parse_bracketed, LabelChild, LabelTree};
