//! Exact combinatorics for expanding the structure-sheaf class of a reduced
//! union of irreducible varieties in a basis of the irreducibles themselves.
//!
//! The expansion coefficients are the values of a one-variable Möbius function
//! on the poset of varieties below the union, and the same class can be
//! computed independently by an inclusion–exclusion recursion on components.
//! Both routes are implemented and can be cross-verified exactly:
//!
//! * [`poset`] — finite posets, order ideals, greatest lower bounds, and the
//!   Möbius function defined by `Σ_{q ≥ p} μ(q) = 1`.
//! * [`universe`] — families of irreducibles with containment and a
//!   "components of the pairwise intersection" operation, including a
//!   table-driven file format and the intersect-decompose closure.
//! * [`bruhat`] — type-A permutations, Bruhat order, parabolic quotients, and
//!   the Schubert-variety universe where meets are ideal-intersection maxima.
//! * [`kclass`] — the Möbius expansion, the inclusion–exclusion expansion,
//!   support prediction, and the verification report tying them together.
//!
//! All arithmetic is exact (checked `i64`); all iteration orders and output
//! formats are deterministic.

pub mod bruhat;
pub mod kclass;
pub mod poset;
pub mod universe;

pub use kclass::KClassExpansion;
pub use poset::{FinitePoset, MobiusAssignment};
pub use universe::{Antichain, TableData, TableUniverse, VarietyUniverse};

use std::fmt;

/// Error from the line-oriented text formats, carrying a 1-based line number
/// when the problem is attributable to a single line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    pub(crate) fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line: Some(line),
            message: message.into(),
        }
    }

    pub(crate) fn global(message: impl Into<String>) -> Self {
        ParseError {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {}: {}", n, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ParseError {}

/// Split a text file into whitespace token lines, dropping blank lines and
/// everything after a `#`. Yields 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            None
        } else {
            Some((i + 1, tokens))
        }
    })
}
