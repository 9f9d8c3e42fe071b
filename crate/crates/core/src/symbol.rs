//! Interned symbols for feature names, values, tags and node labels.
//!
//! Symbols are compared by identity (the interner guarantees one allocation
//! per distinct string) and ordered by their text, so collections keyed by
//! `Sym` iterate in a stable, run-independent order.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// An interned string. Copyable; equality is pointer identity, ordering is
/// lexicographic on the text.
#[derive(Copy, Clone)]
pub struct Sym(&'static str);

static INTERNER: OnceLock<Mutex<HashMap<&'static str, &'static str>>> = OnceLock::new();

impl Sym {
    pub fn new(text: &str) -> Sym {
        let mut table = INTERNER
            .get_or_init(|| Mutex::new(HashMap::new()))
            .lock()
            .unwrap();
        if let Some(&interned) = table.get(text) {
            return Sym(interned);
        }
        let interned: &'static str = Box::leak(text.to_owned().into_boxed_str());
        table.insert(interned, interned);
        Sym(interned)
    }

    pub fn as_str(self) -> &'static str {
        self.0
    }
}

impl PartialEq for Sym {
    fn eq(&self, other: &Sym) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Sym {}

impl PartialOrd for Sym {
    fn partial_cmp(&self, other: &Sym) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sym {
    fn cmp(&self, other: &Sym) -> std::cmp::Ordering {
        self.0.cmp(other.0)
    }
}

impl std::hash::Hash for Sym {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.0.as_ptr() as usize).hash(state);
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sym({})", self.0)
    }
}

impl From<&str> for Sym {
    fn from(text: &str) -> Sym {
        Sym::new(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_dedups() {
        let a = Sym::new("num");
        let b = Sym::new("num");
        assert_eq!(a, b);
        assert!(std::ptr::eq(a.as_str(), b.as_str()));
    }

    #[test]
    fn ordering_is_lexicographic() {
        let mut syms = [Sym::new("per"), Sym::new("bar"), Sym::new("cat")];
        syms.sort();
        let texts: Vec<&str> = syms.iter().map(|s| s.as_str()).collect();
        assert_eq!(texts, vec!["bar", "cat", "per"]);
    }

    #[test]
    fn case_sensitive() {
        assert_ne!(Sym::new("NP"), Sym::new("np"));
    }
}
