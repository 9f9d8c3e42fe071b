//! Exercises the C ABI exactly as a foreign caller would: through raw
//! pointers and status codes.

use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use uglearn_capi::*;

fn c(text: &str) -> CString {
    CString::new(text).unwrap()
}

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(ugl_last_error())
            .to_string_lossy()
            .into_owned()
    }
}

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let text = unsafe { CStr::from_ptr(ptr).to_string_lossy().into_owned() };
    unsafe { ugl_string_free(ptr) };
    text
}

const GRAMMAR: &str = "S[] -> NP[] VP[]\nVP[] -> V0[] {head=1}\n";
const LEXICON: &str = "tag n NP[]\ntag v V0[]\n";
const MODEL: &str = "hfc: num\n";

unsafe fn handles() -> (*mut UglGrammar, *mut UglLexicon, *mut UglModel) {
    let mut grammar: *mut UglGrammar = ptr::null_mut();
    assert_eq!(
        ugl_grammar_parse(c(GRAMMAR).as_ptr(), &mut grammar),
        UglStatus::Ok,
        "{}",
        last_error()
    );
    let mut lexicon: *mut UglLexicon = ptr::null_mut();
    assert_eq!(
        ugl_lexicon_parse(c(LEXICON).as_ptr(), &mut lexicon),
        UglStatus::Ok
    );
    let mut model: *mut UglModel = ptr::null_mut();
    assert_eq!(
        ugl_model_parse(c(MODEL).as_ptr(), &mut model),
        UglStatus::Ok
    );
    (grammar, lexicon, model)
}

#[test]
fn version_and_errors_are_strings() {
    let version = unsafe { CStr::from_ptr(ugl_version()) }.to_str().unwrap();
    assert!(!version.is_empty());
    let mut out: *mut UglGrammar = ptr::null_mut();
    let status = unsafe { ugl_grammar_parse(c("S[] -> A[] B[] C[]").as_ptr(), &mut out) };
    assert_eq!(status, UglStatus::SyntaxError);
    assert!(last_error().contains("1 or 2"), "{}", last_error());
}

#[test]
fn grammar_round_trips_through_the_abi() {
    unsafe {
        let (grammar, lexicon, model) = handles();
        assert_eq!(ugl_grammar_size(grammar), 2);
        let saved = take_string(ugl_grammar_save(grammar));
        assert!(saved.contains("S[] -> NP[] VP[]"));
        ugl_grammar_free(grammar);
        ugl_lexicon_free(lexicon);
        ugl_model_free(model);
    }
}

#[test]
fn parse_returns_trees_and_bounds_info() {
    unsafe {
        let (grammar, lexicon, model) = handles();
        let tags = [c("n"), c("v")];
        let tag_ptrs: Vec<*const c_char> = tags.iter().map(|t| t.as_ptr()).collect();
        let mut trees: *mut c_char = ptr::null_mut();
        let mut edges = 0usize;
        let mut halt: c_int = -1;
        let status = ugl_parse(
            grammar,
            lexicon,
            tag_ptrs.as_ptr(),
            tag_ptrs.len(),
            ptr::null(),
            10,
            3000,
            false,
            false,
            &mut trees,
            &mut edges,
            &mut halt,
        );
        assert_eq!(status, UglStatus::Ok, "{}", last_error());
        let rendered = take_string(trees);
        assert_eq!(rendered, "(S (NP n) (VP (V v)))");
        assert!(edges > 0);
        assert_eq!(halt, 0);

        // An uncovered sentence reports NoParse but still fills the stats.
        let tags = [c("v"), c("n")];
        let tag_ptrs: Vec<*const c_char> = tags.iter().map(|t| t.as_ptr()).collect();
        let mut trees: *mut c_char = ptr::null_mut();
        let status = ugl_parse(
            grammar,
            lexicon,
            tag_ptrs.as_ptr(),
            tag_ptrs.len(),
            ptr::null(),
            1,
            3000,
            false,
            false,
            &mut trees,
            &mut edges,
            &mut halt,
        );
        assert_eq!(status, UglStatus::NoParse);
        assert_eq!(take_string(trees), "");

        // Unknown tags are distinguished from no-parse.
        let tags = [c("zzz")];
        let tag_ptrs: Vec<*const c_char> = tags.iter().map(|t| t.as_ptr()).collect();
        let status = ugl_parse(
            grammar,
            lexicon,
            tag_ptrs.as_ptr(),
            tag_ptrs.len(),
            ptr::null(),
            1,
            3000,
            false,
            false,
            ptr::null_mut(),
            ptr::null_mut(),
            ptr::null_mut(),
        );
        assert_eq!(status, UglStatus::UnknownTag);

        ugl_grammar_free(grammar);
        ugl_lexicon_free(lexicon);
        ugl_model_free(model);
    }
}

#[test]
fn table_scores_and_persists() {
    unsafe {
        let table = ugl_table_new(1e-6);
        assert!(!table.is_null());
        assert_eq!(
            ugl_table_train(table, c("(S (NP Sam) (VP (V laughs)))").as_ptr()),
            UglStatus::Ok
        );
        let mut score = 0.0f64;
        assert_eq!(
            ugl_table_score_tree(
                table,
                c("(S (NP Sam) (VP (V laughs)))").as_ptr(),
                &mut score
            ),
            UglStatus::Ok
        );
        assert!((score - (1.0f64 / 27.0).sqrt()).abs() < 1e-12);
        let saved = take_string(ugl_table_save(table));
        assert!(saved.contains("TOTAL 3"));
        assert_eq!(
            ugl_table_train(table, c("(S (NP Sam").as_ptr()),
            UglStatus::SyntaxError
        );
        ugl_table_free(table);
    }
}

#[test]
fn closeness_matches_the_library() {
    unsafe {
        let mut score = -1.0f64;
        let status = ugl_closeness(
            c("(S (NG Sam) (VG laughs))").as_ptr(),
            c("(S (NP Sam) (VP laughs))").as_ptr(),
            c("NG NP\nVG VP\n").as_ptr(),
            &mut score,
        );
        assert_eq!(status, UglStatus::Ok);
        assert_eq!(score, 1.0);
    }
}

#[test]
fn learning_through_the_abi_extends_the_grammar() {
    unsafe {
        let (grammar, lexicon, model) = handles();
        let table = ugl_table_new(1e-6);
        let tags = [c("n"), c("v"), c("n")];
        let tag_ptrs: Vec<*const c_char> = tags.iter().map(|t| t.as_ptr()).collect();
        let mut learnt: *mut UglGrammar = ptr::null_mut();
        let mut verdict: c_int = -1;
        let status = ugl_learn_sentence(
            grammar,
            lexicon,
            model,
            table,
            tag_ptrs.as_ptr(),
            tag_ptrs.len(),
            ptr::null(),
            true,
            false,
            0.0,
            5,
            3000,
            false,
            &mut learnt,
            &mut verdict,
        );
        assert_eq!(status, UglStatus::Ok, "{}", last_error());
        assert_eq!(verdict, 1, "expected a learnt verdict");
        assert!(ugl_grammar_size(learnt) > ugl_grammar_size(grammar));
        ugl_grammar_free(learnt);
        ugl_grammar_free(grammar);
        ugl_lexicon_free(lexicon);
        ugl_model_free(model);
        ugl_table_free(table);
    }
}
