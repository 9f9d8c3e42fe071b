//! C ABI for the grammar-induction toolkit: opaque handles, status codes,
//! and string-based exchange formats (grammar files, bracketed trees).
//!
//! Every function that can fail returns a [`UglStatus`]; the most recent
//! failure message is available from `ugl_last_error`. Strings returned by
//! the library are owned by the caller and must be released with
//! `ugl_string_free`. Handles are freed by their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use uglearn::category::Category;
use uglearn::chart::{parse, parse_completing, HaltReason, ParserBounds, Token};
use uglearn::grammar::{load_grammar, load_lexicon, Grammar, Lexicon};
use uglearn::learner::{learn_sentence, LearnerConfig, MdpSource, Verdict};
use uglearn::mdp::MdpTable;
use uglearn::metrics::{closeness, LabelMap};
use uglearn::model::{load_model, ModelConfig};
use uglearn::tree::parse_bracketed;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum UglStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Input text failed to parse; see `ugl_last_error`.
    SyntaxError = 3,
    /// A token carried a tag missing from the lexicon.
    UnknownTag = 4,
    /// The sentence has no parse within the bounds.
    NoParse = 5,
}

/// Opaque grammar handle.
pub struct UglGrammar(Grammar);
/// Opaque lexicon handle.
pub struct UglLexicon(Lexicon);
/// Opaque model-configuration handle.
pub struct UglModel(ModelConfig);
/// Opaque mother-daughter-pair table handle. Not thread-safe; confine each
/// handle to one thread.
pub struct UglTable(MdpTable);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', "?");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).unwrap_or_default();
    });
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ugl_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string; never freed.
#[no_mangle]
pub extern "C" fn ugl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by one of the `_save`,
/// `ugl_parse` or similar string-returning functions, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ugl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn text_arg<'a>(ptr: *const c_char) -> Result<&'a str, UglStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(UglStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        UglStatus::InvalidUtf8
    })
}

fn give_string(text: String) -> *mut c_char {
    CString::new(text.replace('\0', "?"))
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Parses a grammar from its textual form into a new handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ugl_grammar_parse(
    text: *const c_char,
    out: *mut *mut UglGrammar,
) -> UglStatus {
    if out.is_null() {
        set_error("null output pointer");
        return UglStatus::NullArgument;
    }
    let text = match text_arg(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match load_grammar(text, "grammar") {
        Ok(load) => {
            *out = Box::into_raw(Box::new(UglGrammar(load.grammar)));
            UglStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            UglStatus::SyntaxError
        }
    }
}

/// # Safety
/// `g` must be a handle from `ugl_grammar_parse` or `ugl_learn_sentence`,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ugl_grammar_free(g: *mut UglGrammar) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of rules in the grammar; 0 for a null handle.
///
/// # Safety
/// `g` must be a live grammar handle or null.
#[no_mangle]
pub unsafe extern "C" fn ugl_grammar_size(g: *const UglGrammar) -> usize {
    g.as_ref().map_or(0, |g| g.0.len())
}

/// Canonical textual form of the grammar; free with `ugl_string_free`.
///
/// # Safety
/// `g` must be a live grammar handle.
#[no_mangle]
pub unsafe extern "C" fn ugl_grammar_save(g: *const UglGrammar) -> *mut c_char {
    match g.as_ref() {
        Some(g) => give_string(g.0.save()),
        None => ptr::null_mut(),
    }
}

/// Parses a lexicon (`tag TAG Category` lines) into a new handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ugl_lexicon_parse(
    text: *const c_char,
    out: *mut *mut UglLexicon,
) -> UglStatus {
    if out.is_null() {
        set_error("null output pointer");
        return UglStatus::NullArgument;
    }
    let text = match text_arg(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match load_lexicon(text) {
        Ok(lex) => {
            *out = Box::into_raw(Box::new(UglLexicon(lex)));
            UglStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            UglStatus::SyntaxError
        }
    }
}

/// # Safety
/// `lex` must be a handle from `ugl_lexicon_parse`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ugl_lexicon_free(lex: *mut UglLexicon) {
    if !lex.is_null() {
        drop(Box::from_raw(lex));
    }
}

/// Parses a model configuration (lp/semtype/hfc/xbar sections).
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ugl_model_parse(
    text: *const c_char,
    out: *mut *mut UglModel,
) -> UglStatus {
    if out.is_null() {
        set_error("null output pointer");
        return UglStatus::NullArgument;
    }
    let text = match text_arg(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match load_model(text) {
        Ok(model) => {
            *out = Box::into_raw(Box::new(UglModel(model)));
            UglStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            UglStatus::SyntaxError
        }
    }
}

/// # Safety
/// `model` must be a handle from `ugl_model_parse`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ugl_model_free(model: *mut UglModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Creates an empty frequency table with the given unseen-pair floor.
#[no_mangle]
pub extern "C" fn ugl_table_new(epsilon: f64) -> *mut UglTable {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        set_error("epsilon must lie in (0, 1]");
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(UglTable(MdpTable::new(epsilon))))
}

/// # Safety
/// `table` must be a handle from `ugl_table_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ugl_table_free(table: *mut UglTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Adds the mother-daughter pairs of one bracketed tree to the table.
///
/// # Safety
/// `table` must be a live table handle and `tree` a valid string.
#[no_mangle]
pub unsafe extern "C" fn ugl_table_train(table: *mut UglTable, tree: *const c_char) -> UglStatus {
    let Some(table) = table.as_mut() else {
        set_error("null table handle");
        return UglStatus::NullArgument;
    };
    let text = match text_arg(tree) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match parse_bracketed(text) {
        Ok(tree) => {
            table.0.train([&tree]);
            UglStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            UglStatus::SyntaxError
        }
    }
}

/// Scores one bracketed tree against the table.
///
/// # Safety
/// All pointers must be valid; `score` receives the result on success.
#[no_mangle]
pub unsafe extern "C" fn ugl_table_score_tree(
    table: *const UglTable,
    tree: *const c_char,
    score: *mut f64,
) -> UglStatus {
    let Some(table) = table.as_ref() else {
        set_error("null table handle");
        return UglStatus::NullArgument;
    };
    if score.is_null() {
        set_error("null output pointer");
        return UglStatus::NullArgument;
    }
    let text = match text_arg(tree) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match parse_bracketed(text) {
        Ok(tree) => {
            *score = table.0.score_tree(&tree);
            UglStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            UglStatus::SyntaxError
        }
    }
}

/// Table persistence format (`mother daughter count` lines plus a TOTAL
/// trailer); free with `ugl_string_free`.
///
/// # Safety
/// `table` must be a live table handle.
#[no_mangle]
pub unsafe extern "C" fn ugl_table_save(table: *const UglTable) -> *mut c_char {
    match table.as_ref() {
        Some(t) => give_string(t.0.save()),
        None => ptr::null_mut(),
    }
}

unsafe fn tokens_arg(tags: *const *const c_char, n_tags: usize) -> Result<Vec<Token>, UglStatus> {
    if tags.is_null() {
        set_error("null tag array");
        return Err(UglStatus::NullArgument);
    }
    let mut tokens = Vec::with_capacity(n_tags);
    for i in 0..n_tags {
        let tag = text_arg(*tags.add(i))?;
        tokens.push(Token::bare(tag));
    }
    Ok(tokens)
}

unsafe fn start_arg(start: *const c_char) -> Result<Category, UglStatus> {
    let text = if start.is_null() {
        "S[]"
    } else {
        text_arg(start)?
    };
    Category::parse(text).map_err(|e| {
        set_error(e.to_string());
        UglStatus::SyntaxError
    })
}

/// Parses a tag sequence. On success `out_trees` receives the bracketed
/// parses joined by newlines (free with `ugl_string_free`), `out_edges` the
/// number of edges built, and `out_halt` 0 for exhausted, 1 for the edge
/// bound, 2 for the parse bound. Returns `NoParse` when no tree exists
/// within the bounds; the out-parameters are still filled.
///
/// # Safety
/// Handles must be live; `tags` must point to `n_tags` valid strings;
/// `start` may be null for the default `S[]`.
#[no_mangle]
pub unsafe extern "C" fn ugl_parse(
    grammar: *const UglGrammar,
    lexicon: *const UglLexicon,
    tags: *const *const c_char,
    n_tags: usize,
    start: *const c_char,
    max_parses: usize,
    max_edges: usize,
    complete: bool,
    use_unary: bool,
    out_trees: *mut *mut c_char,
    out_edges: *mut usize,
    out_halt: *mut c_int,
) -> UglStatus {
    let (Some(grammar), Some(lexicon)) = (grammar.as_ref(), lexicon.as_ref()) else {
        set_error("null grammar or lexicon handle");
        return UglStatus::NullArgument;
    };
    let tokens = match tokens_arg(tags, n_tags) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let start = match start_arg(start) {
        Ok(c) => c,
        Err(s) => return s,
    };
    let bounds = ParserBounds::new(max_parses.max(1), max_edges.max(1));
    let outcome = if complete || use_unary {
        parse_completing(&grammar.0, &lexicon.0, &tokens, bounds, &start, use_unary)
    } else {
        parse(&grammar.0, &lexicon.0, &tokens, bounds, &start)
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            set_error(e.to_string());
            return UglStatus::UnknownTag;
        }
    };
    if !out_edges.is_null() {
        *out_edges = outcome.edges;
    }
    if !out_halt.is_null() {
        *out_halt = match outcome.halted {
            HaltReason::Exhausted => 0,
            HaltReason::EdgeBound => 1,
            HaltReason::ParseBound => 2,
        };
    }
    if !out_trees.is_null() {
        let rendered: Vec<String> = outcome.trees.iter().map(|t| t.to_string()).collect();
        *out_trees = give_string(rendered.join("\n"));
    }
    if outcome.trees.is_empty() {
        set_error("no parse within the bounds");
        UglStatus::NoParse
    } else {
        UglStatus::Ok
    }
}

/// Closeness of a bracketed test tree to a bracketed benchmark tree, with
/// an optional `from to`-per-line label map applied to both.
///
/// # Safety
/// `test` and `bench` must be valid strings; `labelmap` may be null;
/// `score` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ugl_closeness(
    test: *const c_char,
    bench: *const c_char,
    labelmap: *const c_char,
    score: *mut f64,
) -> UglStatus {
    if score.is_null() {
        set_error("null output pointer");
        return UglStatus::NullArgument;
    }
    let test = match text_arg(test) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let bench = match text_arg(bench) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let map = if labelmap.is_null() {
        LabelMap::identity()
    } else {
        let text = match text_arg(labelmap) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match LabelMap::load(text) {
            Ok(m) => m,
            Err(e) => {
                set_error(e.to_string());
                return UglStatus::SyntaxError;
            }
        }
    };
    let (test, bench) = match (parse_bracketed(test), parse_bracketed(bench)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            set_error(e.to_string());
            return UglStatus::SyntaxError;
        }
    };
    *score = closeness(&test, &bench, &map);
    UglStatus::Ok
}

/// Runs one interleaved parse-and-learn step over a tag sequence. The
/// grammar handle is not modified; `out_grammar` receives a new handle to
/// the (possibly extended) grammar. `out_verdict` is 0 when the grammar
/// already parsed the sentence, 1 when rules were learnt, 2 when every
/// instantiation was rejected. The table is trained in place when
/// data-driven learning is on.
///
/// # Safety
/// Handles must be live; `tags` must point to `n_tags` valid strings;
/// `start` may be null for the default; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ugl_learn_sentence(
    grammar: *const UglGrammar,
    lexicon: *const UglLexicon,
    model: *const UglModel,
    table: *mut UglTable,
    tags: *const *const c_char,
    n_tags: usize,
    start: *const c_char,
    model_on: bool,
    data_on: bool,
    theta: f64,
    max_parses: usize,
    max_edges: usize,
    use_unary: bool,
    out_grammar: *mut *mut UglGrammar,
    out_verdict: *mut c_int,
) -> UglStatus {
    let (Some(grammar), Some(lexicon), Some(model), Some(table)) = (
        grammar.as_ref(),
        lexicon.as_ref(),
        model.as_ref(),
        table.as_mut(),
    ) else {
        set_error("null handle argument");
        return UglStatus::NullArgument;
    };
    if out_grammar.is_null() || out_verdict.is_null() {
        set_error("null output pointer");
        return UglStatus::NullArgument;
    }
    let tokens = match tokens_arg(tags, n_tags) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let start = match start_arg(start) {
        Ok(c) => c,
        Err(s) => return s,
    };
    let sentence = uglearn::corpus::TaggedSentence {
        id: "ffi".to_owned(),
        tokens: tokens.iter().map(|t| (t.word.clone(), t.tag)).collect(),
        raw: String::new(),
    };
    let cfg = LearnerConfig {
        model_on,
        data_on,
        theta,
        bounds: ParserBounds::new(max_parses.max(1), max_edges.max(1)),
        use_unary,
        epsilon: table.0.floor(),
        mdp_source: MdpSource::BenchTrees,
    };
    match learn_sentence(
        &grammar.0,
        &lexicon.0,
        &cfg,
        &model.0,
        &mut table.0,
        &sentence,
        &start,
    ) {
        Ok((next, outcome)) => {
            *out_grammar = Box::into_raw(Box::new(UglGrammar(next)));
            *out_verdict = match outcome.verdict {
                Verdict::ParsedWithG => 0,
                Verdict::Learnt { .. } => 1,
                Verdict::Ungrammatical => 2,
            };
            UglStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            UglStatus::UnknownTag
        }
    }
}
