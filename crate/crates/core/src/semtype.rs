//! Extensional semantic types and the function-application check used to
//! reject rules whose daughters cannot compose.

use std::fmt;

/// A type of the simply typed lambda calculus with base types `e` and `t`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SemType {
    E,
    T,
    Fun(Box<SemType>, Box<SemType>),
}

impl SemType {
    pub fn fun(arg: SemType, result: SemType) -> SemType {
        SemType::Fun(Box::new(arg), Box::new(result))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, SemType::E | SemType::T)
    }

    /// Result type of a function type, if any.
    pub fn result(&self) -> Option<&SemType> {
        match self {
            SemType::Fun(_, r) => Some(r),
            _ => None,
        }
    }
}

/// Function application: if `functor` is `<a,b>` and `argument` equals `a`
/// structurally, the composition has type `b`. Base types are never
/// functors. Failure is a value, not an error.
pub fn compose(functor: &SemType, argument: &SemType) -> Option<SemType> {
    match functor {
        SemType::Fun(arg, result) if **arg == *argument => Some((**result).clone()),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for TypeParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.message, self.offset)
    }
}

impl std::error::Error for TypeParseError {}

/// Parses the type syntax `T ::= e | t | <T,T>`. Whitespace is ignored.
pub fn parse_type(text: &str) -> Result<SemType, TypeParseError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let ty = parse_at(bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(TypeParseError {
            offset: pos,
            message: "trailing input after type".to_owned(),
        });
    }
    Ok(ty)
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_at(bytes: &[u8], pos: &mut usize) -> Result<SemType, TypeParseError> {
    skip_ws(bytes, pos);
    match bytes.get(*pos) {
        Some(b'e') => {
            *pos += 1;
            Ok(SemType::E)
        }
        Some(b't') => {
            *pos += 1;
            Ok(SemType::T)
        }
        Some(b'<') => {
            *pos += 1;
            let arg = parse_at(bytes, pos)?;
            skip_ws(bytes, pos);
            if bytes.get(*pos) != Some(&b',') {
                return Err(TypeParseError {
                    offset: *pos,
                    message: "expected `,`".to_owned(),
                });
            }
            *pos += 1;
            let result = parse_at(bytes, pos)?;
            skip_ws(bytes, pos);
            if bytes.get(*pos) != Some(&b'>') {
                return Err(TypeParseError {
                    offset: *pos,
                    message: "expected `>`".to_owned(),
                });
            }
            *pos += 1;
            Ok(SemType::fun(arg, result))
        }
        _ => Err(TypeParseError {
            offset: *pos,
            message: "expected `e`, `t` or `<`".to_owned(),
        }),
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemType::E => write!(f, "e"),
            SemType::T => write!(f, "t"),
            SemType::Fun(a, r) => write!(f, "<{a},{r}>"),
        }
    }
}
