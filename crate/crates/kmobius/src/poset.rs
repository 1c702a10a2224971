//! Finite posets over string labels, with the Möbius function normalized by
//! the criterion `Σ_{q ≥ p} μ(q) = 1` for every element `p`.
//!
//! Elements are opaque labels; the order relation is stored as a dense
//! reflexive-transitive matrix, so everything here is meant for small,
//! exactly-checked posets rather than bulk data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ParseError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("duplicate label '{0}'")]
    DuplicateLabel(String),
    #[error("unknown label '{0}'")]
    UnknownLabel(String),
    #[error("cycle: '{0}' and '{1}' are each below the other")]
    Cycle(String, String),
    #[error("assignment domain mismatch: '{0}' is not an element of the poset")]
    DomainMismatch(String),
    #[error("{count} minimal elements above '{element}'; the subset is not glb-closed")]
    NotUniqueMinimum { element: String, count: usize },
}

/// A finite partially ordered set of labeled elements.
///
/// Labels are kept sorted; `leq` is the full reflexive-transitive relation.
/// Construction takes arbitrary relation generators (not only covers) and
/// closes them, rejecting anything that would break antisymmetry.
#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoset {
    labels: Vec<String>,
    /// Row-major: `leq[i * len + j]` means `labels[i] <= labels[j]`.
    leq: Vec<bool>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinitePoset{{{}}}", self.labels.join(","))
    }
}

impl FinitePoset {
    /// Build a poset from element labels and `(lower, upper)` relation
    /// generators. The stored order is the reflexive-transitive closure.
    pub fn build<S: Into<String>>(
        elements: impl IntoIterator<Item = S>,
        relations: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self, PosetError> {
        let mut labels: Vec<String> = elements.into_iter().map(Into::into).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(PosetError::DuplicateLabel(w[0].clone()));
        }
        let n = labels.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in relations {
            let (a, b) = (a.into(), b.into());
            let i = index_in(&labels, &a)?;
            let j = index_in(&labels, &b)?;
            leq[i * n + j] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(PosetError::Cycle(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        Ok(FinitePoset { labels, leq })
    }

    /// Parse the poset text format: `elem <label>` and `rel <a> <b>` lines
    /// (declaring `a < b`), with `#` comments. Declarations may appear in any
    /// order; references to undeclared labels are errors.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let lines: Vec<(usize, Vec<&str>)> = crate::content_lines(text).collect();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut elements: Vec<String> = Vec::new();
        for (ln, tokens) in &lines {
            if tokens[0] == "elem" {
                if tokens.len() != 2 {
                    return Err(ParseError::at(*ln, "expected 'elem <label>'"));
                }
                if !seen.insert(tokens[1]) {
                    return Err(ParseError::at(
                        *ln,
                        format!("duplicate element '{}'", tokens[1]),
                    ));
                }
                elements.push(tokens[1].to_string());
            }
        }
        let mut relations: Vec<(String, String)> = Vec::new();
        for (ln, tokens) in &lines {
            match tokens[0] {
                "elem" => {}
                "rel" => {
                    if tokens.len() != 3 {
                        return Err(ParseError::at(*ln, "expected 'rel <a> <b>'"));
                    }
                    for t in &tokens[1..] {
                        if !seen.contains(t) {
                            return Err(ParseError::at(*ln, format!("unknown element '{t}'")));
                        }
                    }
                    relations.push((tokens[1].to_string(), tokens[2].to_string()));
                }
                other => {
                    return Err(ParseError::at(*ln, format!("unknown directive '{other}'")));
                }
            }
        }
        FinitePoset::build(elements, relations).map_err(|e| ParseError::global(e.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// All labels, sorted.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .is_ok()
    }

    /// Whether `a <= b`. Panics on unknown labels; use [`Self::contains_label`]
    /// to screen untrusted input.
    pub fn leq(&self, a: &str, b: &str) -> bool {
        let i = self
            .idx(a)
            .unwrap_or_else(|_| panic!("unknown label '{a}'"));
        let j = self
            .idx(b)
            .unwrap_or_else(|_| panic!("unknown label '{b}'"));
        self.leq_idx(i, j)
    }

    fn idx(&self, label: &str) -> Result<usize, PosetError> {
        index_in(&self.labels, label)
    }

    fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.labels.len() + j]
    }

    /// `{q : q >= p}`, including `p` itself.
    pub fn upper_set(&self, p: &str) -> Result<BTreeSet<String>, PosetError> {
        let i = self.idx(p)?;
        Ok((0..self.len())
            .filter(|&q| self.leq_idx(i, q))
            .map(|q| self.labels[q].clone())
            .collect())
    }

    pub fn maximal_elements(&self) -> BTreeSet<String> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.leq_idx(i, j)))
            .map(|i| self.labels[i].clone())
            .collect()
    }

    pub fn minimal_elements(&self) -> BTreeSet<String> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.leq_idx(j, i)))
            .map(|i| self.labels[i].clone())
            .collect()
    }

    /// Cover relations `(a, b)` with `a < b` and nothing strictly between,
    /// sorted by label pair.
    pub fn covers(&self) -> Vec<(String, String)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq_idx(i, j) {
                    continue;
                }
                let direct =
                    (0..n).all(|k| k == i || k == j || !(self.leq_idx(i, k) && self.leq_idx(k, j)));
                if direct {
                    out.push((self.labels[i].clone(), self.labels[j].clone()));
                }
            }
        }
        out.sort();
        out
    }

    /// Induced subposet on an arbitrary subset of the elements.
    pub fn induced<S: AsRef<str>>(
        &self,
        subset: impl IntoIterator<Item = S>,
    ) -> Result<FinitePoset, PosetError> {
        let mut idxs = BTreeSet::new();
        for s in subset {
            idxs.insert(self.idx(s.as_ref())?);
        }
        Ok(self.induced_by_indices(&idxs))
    }

    fn induced_by_indices(&self, idxs: &BTreeSet<usize>) -> FinitePoset {
        let order: Vec<usize> = idxs.iter().copied().collect();
        let m = order.len();
        let labels: Vec<String> = order.iter().map(|&i| self.labels[i].clone()).collect();
        let mut leq = vec![false; m * m];
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                leq[a * m + b] = self.leq_idx(i, j);
            }
        }
        // `order` is ascending and `labels` is sorted, so this is already canonical.
        FinitePoset { labels, leq }
    }

    /// The downward order ideal generated by `tops`: the induced subposet on
    /// `{q : q <= t for some t in tops}`.
    pub fn order_ideal<S: AsRef<str>>(
        &self,
        tops: impl IntoIterator<Item = S>,
    ) -> Result<FinitePoset, PosetError> {
        let mut top_idxs = Vec::new();
        for t in tops {
            top_idxs.push(self.idx(t.as_ref())?);
        }
        let idxs: BTreeSet<usize> = (0..self.len())
            .filter(|&q| top_idxs.iter().any(|&t| self.leq_idx(q, t)))
            .collect();
        Ok(self.induced_by_indices(&idxs))
    }

    /// Whether `subset` is a downward order ideal.
    pub fn is_order_ideal<S: AsRef<str>>(
        &self,
        subset: impl IntoIterator<Item = S>,
    ) -> Result<bool, PosetError> {
        let mut idxs = BTreeSet::new();
        for s in subset {
            idxs.insert(self.idx(s.as_ref())?);
        }
        Ok(idxs
            .iter()
            .all(|&i| (0..self.len()).all(|q| !self.leq_idx(q, i) || idxs.contains(&q))))
    }

    /// Maximal elements of the common lower bounds of `s`. For `s = {}` every
    /// element is vacuously a common lower bound, so this returns the maximal
    /// elements of the whole poset.
    pub fn greatest_lower_bounds<S: AsRef<str>>(
        &self,
        s: impl IntoIterator<Item = S>,
    ) -> Result<BTreeSet<String>, PosetError> {
        let mut s_idxs = Vec::new();
        for x in s {
            s_idxs.push(self.idx(x.as_ref())?);
        }
        let common: Vec<usize> = (0..self.len())
            .filter(|&x| s_idxs.iter().all(|&si| self.leq_idx(x, si)))
            .collect();
        Ok(common
            .iter()
            .filter(|&&x| common.iter().all(|&y| y == x || !self.leq_idx(x, y)))
            .map(|&x| self.labels[x].clone())
            .collect())
    }

    /// Whether every subset of `q` has all of its greatest lower bounds inside
    /// `q`. Exhaustive over all `2^|q|` subsets; intended for test-scale posets
    /// (|q| <= 20).
    pub fn is_glb_closed<S: AsRef<str>>(
        &self,
        q: impl IntoIterator<Item = S>,
    ) -> Result<bool, PosetError> {
        let mut q_idxs = BTreeSet::new();
        for x in q {
            q_idxs.insert(self.idx(x.as_ref())?);
        }
        let q_vec: Vec<usize> = q_idxs.iter().copied().collect();
        assert!(
            q_vec.len() <= 20,
            "is_glb_closed is exhaustive; subset too large"
        );
        for mask in 0u64..(1u64 << q_vec.len()) {
            let chosen: Vec<&str> = q_vec
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &i)| self.labels[i].as_str())
                .collect();
            let glbs = self.greatest_lower_bounds(chosen)?;
            if !glbs.iter().all(|g| q_idxs.contains(&self.idx(g).unwrap())) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The unique minimal element of `{q in Q : q >= p}`. Requires `Q` to be
    /// glb-closed; if that precondition fails the minimal element need not be
    /// unique (or exist) and an error reports the count found.
    pub fn unique_min_above<S: AsRef<str>>(
        &self,
        q: impl IntoIterator<Item = S>,
        p: &str,
    ) -> Result<String, PosetError> {
        let p_idx = self.idx(p)?;
        let mut q_idxs = BTreeSet::new();
        for x in q {
            q_idxs.insert(self.idx(x.as_ref())?);
        }
        let above: Vec<usize> = q_idxs
            .iter()
            .copied()
            .filter(|&i| self.leq_idx(p_idx, i))
            .collect();
        let minimal: Vec<usize> = above
            .iter()
            .copied()
            .filter(|&i| above.iter().all(|&j| j == i || !self.leq_idx(j, i)))
            .collect();
        match minimal.as_slice() {
            [only] => Ok(self.labels[*only].clone()),
            other => Err(PosetError::NotUniqueMinimum {
                element: p.to_string(),
                count: other.len(),
            }),
        }
    }

    /// The Möbius assignment: the unique integer function with
    /// `Σ_{q >= p} μ(q) = 1` for every `p`. Computed down a reverse linear
    /// extension via `μ(p) = 1 − Σ_{q > p} μ(q)`; ties in the extension are
    /// broken by label order, which does not affect the (unique) result.
    pub fn mobius(&self) -> MobiusAssignment {
        let order = self.linear_extension();
        let n = self.len();
        let mut mu = vec![0i64; n];
        for &p in order.iter().rev() {
            let mut sum = 0i64;
            for (q, &mu_q) in mu.iter().enumerate() {
                if q != p && self.leq_idx(p, q) {
                    sum = checked_add(sum, mu_q);
                }
            }
            mu[p] = checked_sub(1, sum);
        }
        let values = self
            .labels
            .iter()
            .cloned()
            .zip(mu.iter().copied())
            .collect();
        MobiusAssignment { values }
    }

    /// A linear extension (minimal elements first), lexicographic among ties.
    fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut placed = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            // Labels are sorted, so the first ready index is the lex-least.
            let next = (0..n)
                .find(|&i| !placed[i] && (0..n).all(|j| j == i || placed[j] || !self.leq_idx(j, i)))
                .expect("partial order always has a minimal unplaced element");
            placed[next] = true;
            out.push(next);
        }
        out
    }

    /// Extend a Möbius assignment on a subset of this poset's elements by zero.
    /// The subset is the assignment's domain; it must consist of elements of
    /// this poset. When the domain is a downward order ideal, the extension's
    /// upper-set sums are 1 inside the ideal and 0 outside.
    pub fn extend_by_zero(
        &self,
        mu_q: &MobiusAssignment,
    ) -> Result<BTreeMap<String, i64>, PosetError> {
        for label in mu_q.values.keys() {
            if !self.contains_label(label) {
                return Err(PosetError::DomainMismatch(label.clone()));
            }
        }
        Ok(self
            .labels
            .iter()
            .map(|l| (l.clone(), mu_q.values.get(l).copied().unwrap_or(0)))
            .collect())
    }

    /// `Σ_{q >= p} f(q)` for an arbitrary integer assignment on all elements.
    pub fn upper_sum(&self, f: &BTreeMap<String, i64>, p: &str) -> Result<i64, PosetError> {
        let i = self.idx(p)?;
        let mut sum = 0i64;
        for q in 0..self.len() {
            if self.leq_idx(i, q) {
                sum = checked_add(sum, *f.get(&self.labels[q]).unwrap_or(&0));
            }
        }
        Ok(sum)
    }
}

fn index_in(sorted: &[String], label: &str) -> Result<usize, PosetError> {
    sorted
        .binary_search_by(|l| l.as_str().cmp(label))
        .map_err(|_| PosetError::UnknownLabel(label.to_string()))
}

fn checked_add(a: i64, b: i64) -> i64 {
    a.checked_add(b)
        .expect("integer overflow in exact Mobius arithmetic")
}

fn checked_sub(a: i64, b: i64) -> i64 {
    a.checked_sub(b)
        .expect("integer overflow in exact Mobius arithmetic")
}

/// The value table of a Möbius function: every element of the originating
/// poset mapped to an exact integer. Satisfies `Σ_{q >= p} μ(q) = 1` for all
/// `p`; in particular every maximal element carries 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusAssignment {
    values: BTreeMap<String, i64>,
}

impl MobiusAssignment {
    pub fn value(&self, label: &str) -> Option<i64> {
        self.values.get(label).copied()
    }

    /// Entries in label order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.values.iter().map(|(l, &v)| (l.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}
