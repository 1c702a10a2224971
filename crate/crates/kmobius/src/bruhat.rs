//! Type-A Weyl group combinatorics: permutations in one-line notation,
//! Bruhat order via sorted-prefix dominance, minimal coset representatives of
//! parabolic quotients, and the Schubert-variety universe on a quotient.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::universe::{Antichain, VarietyUniverse};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BruhatError {
    #[error("not a permutation of 1..={n}: {reason}")]
    NotAPermutation { n: usize, reason: String },
    #[error("cannot parse permutation '{0}'")]
    Unparseable(String),
    #[error("parabolic generator index {index} out of range 1..{n}")]
    InvalidGenerator { index: usize, n: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

/// A permutation of `{1..n}` in one-line notation, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    one_line: Vec<usize>,
}

impl Permutation {
    pub fn new(one_line: Vec<usize>) -> Result<Self, BruhatError> {
        let n = one_line.len();
        let mut seen = vec![false; n + 1];
        for &v in &one_line {
            if v == 0 || v > n {
                return Err(BruhatError::NotAPermutation {
                    n,
                    reason: format!("value {v} out of range"),
                });
            }
            if seen[v] {
                return Err(BruhatError::NotAPermutation {
                    n,
                    reason: format!("value {v} repeated"),
                });
            }
            seen[v] = true;
        }
        Ok(Permutation { one_line })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            one_line: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.one_line.len()
    }

    /// `w(i)` for 1-based `i`.
    pub fn at(&self, i: usize) -> usize {
        self.one_line[i - 1]
    }

    pub fn one_line(&self) -> &[usize] {
        &self.one_line
    }

    /// The number of inversions `#{i < j : w(i) > w(j)}`.
    pub fn length(&self) -> usize {
        let w = &self.one_line;
        let mut count = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Parse `"2413"` (digits, n <= 9) or `"2,4,1,3"`.
    pub fn parse(s: &str) -> Result<Self, BruhatError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(BruhatError::Unparseable(s.to_string()));
        }
        let values: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| BruhatError::Unparseable(s.to_string()))
                })
                .collect::<Result<_, _>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| BruhatError::Unparseable(s.to_string()))
                })
                .collect::<Result<_, _>>()?
        };
        Permutation::new(values)
    }
}

impl fmt::Display for Permutation {
    /// Comma-free digit string for n <= 9, comma-separated beyond.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for v in &self.one_line {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.one_line.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// Bruhat comparison by sorted-prefix dominance: `u <= v` iff for every
/// prefix length `i`, the increasing sort of `{u(1..i)}` is entrywise `<=`
/// the increasing sort of `{v(1..i)}`. Agrees with reachability through
/// length-increasing transpositions.
pub fn bruhat_leq(u: &Permutation, v: &Permutation) -> bool {
    assert_eq!(u.n(), v.n(), "rank mismatch in Bruhat comparison");
    let n = u.n();
    let mut u_prefix: Vec<usize> = Vec::with_capacity(n);
    let mut v_prefix: Vec<usize> = Vec::with_capacity(n);
    for i in 1..=n {
        let ui = u.at(i);
        let vi = v.at(i);
        let pos = u_prefix.partition_point(|&x| x < ui);
        u_prefix.insert(pos, ui);
        let pos = v_prefix.partition_point(|&x| x < vi);
        v_prefix.insert(pos, vi);
        if u_prefix.iter().zip(&v_prefix).any(|(a, b)| a > b) {
            return false;
        }
    }
    true
}

/// Minimal-length coset representatives of `W / W_P`, where `W_P` is
/// generated by the simple transpositions with the given indices. A
/// representative is exactly a permutation that increases across each
/// generator position.
#[derive(Clone, Debug)]
pub struct ParabolicQuotient {
    n: usize,
    generators: BTreeSet<usize>,
    reps: Vec<Permutation>,
}

impl ParabolicQuotient {
    pub fn new(n: usize, generators: &BTreeSet<usize>) -> Result<Self, BruhatError> {
        assert!(n >= 1, "rank must be at least 1");
        for &g in generators {
            if g == 0 || g >= n {
                return Err(BruhatError::InvalidGenerator { index: g, n });
            }
        }
        // Positions glued by generators form blocks on which a representative
        // must increase; enumerate by distributing values into the blocks.
        let mut blocks: Vec<usize> = Vec::new();
        let mut current = 1usize;
        for i in 1..n {
            if generators.contains(&i) {
                current += 1;
            } else {
                blocks.push(current);
                current = 1;
            }
        }
        blocks.push(current);

        let mut reps = Vec::new();
        let available: Vec<usize> = (1..=n).collect();
        distribute(&blocks, &available, &mut Vec::with_capacity(n), &mut reps);
        reps.sort();
        debug_assert_eq!(reps.len(), quotient_size(n, &blocks));
        Ok(ParabolicQuotient {
            n,
            generators: generators.clone(),
            reps,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &BTreeSet<usize> {
        &self.generators
    }

    /// Representatives in lexicographic one-line order.
    pub fn reps(&self) -> &[Permutation] {
        &self.reps
    }

    pub fn is_rep(&self, w: &Permutation) -> bool {
        w.n() == self.n && self.reps.binary_search(w).is_ok()
    }

    /// Induced Bruhat order on representatives: restriction of the order on
    /// the full group.
    pub fn leq(&self, u: &Permutation, v: &Permutation) -> bool {
        bruhat_leq(u, v)
    }
}

fn distribute(
    blocks: &[usize],
    available: &[usize],
    prefix: &mut Vec<usize>,
    out: &mut Vec<Permutation>,
) {
    match blocks.split_first() {
        None => out.push(Permutation {
            one_line: prefix.clone(),
        }),
        Some((&size, rest)) => {
            let mut chosen = Vec::with_capacity(size);
            choose_into(available, size, 0, &mut chosen, &mut |combo, remaining| {
                let start = prefix.len();
                prefix.extend_from_slice(combo);
                distribute(rest, remaining, prefix, out);
                prefix.truncate(start);
            });
        }
    }
}

/// Enumerate ascending `k`-subsets of `available[from..]`, handing each
/// subset and its complement to the callback.
fn choose_into(
    available: &[usize],
    k: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize], &[usize]),
) {
    if chosen.len() == k {
        let rest: Vec<usize> = available
            .iter()
            .copied()
            .filter(|v| !chosen.contains(v))
            .collect();
        f(chosen, &rest);
        return;
    }
    for i in from..available.len() {
        chosen.push(available[i]);
        choose_into(available, k, i + 1, chosen, f);
        chosen.pop();
    }
}

fn quotient_size(n: usize, blocks: &[usize]) -> usize {
    let factorial = |k: usize| (1..=k).product::<usize>();
    factorial(n) / blocks.iter().map(|&b| factorial(b)).product::<usize>()
}

/// The Schubert varieties indexed by a parabolic quotient, as a variety
/// universe: containment is Bruhat order, and the components of
/// `X_u ∩ X_v` are the maximal elements of the shared lower ideal (every
/// Borel-invariant subvariety is a union of orbit closures, so that is
/// exactly what the intersection decomposes into).
#[derive(Clone, Debug)]
pub struct SchubertUniverse {
    quotient: ParabolicQuotient,
    labels: Vec<String>,
    perms: Vec<Permutation>,
    /// Row-major: `leq[i * len + j]` iff `perms[i] <= perms[j]` in Bruhat order.
    leq: Vec<bool>,
}

impl SchubertUniverse {
    pub fn new(quotient: ParabolicQuotient) -> Self {
        let mut labeled: Vec<(String, Permutation)> = quotient
            .reps()
            .iter()
            .map(|w| (w.to_string(), w.clone()))
            .collect();
        labeled.sort_by(|a, b| a.0.cmp(&b.0));
        let labels: Vec<String> = labeled.iter().map(|(l, _)| l.clone()).collect();
        let perms: Vec<Permutation> = labeled.into_iter().map(|(_, w)| w).collect();
        let m = perms.len();
        let mut leq = vec![false; m * m];
        for i in 0..m {
            for j in 0..m {
                leq[i * m + j] = bruhat_leq(&perms[i], &perms[j]);
            }
        }
        SchubertUniverse {
            quotient,
            labels,
            perms,
            leq,
        }
    }

    pub fn quotient(&self) -> &ParabolicQuotient {
        &self.quotient
    }

    pub fn perm_of(&self, label: &str) -> Option<&Permutation> {
        self.index_of(label).map(|i| &self.perms[i])
    }

    fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    fn idx(&self, label: &str) -> usize {
        self.index_of(label)
            .unwrap_or_else(|| panic!("'{label}' is not a minimal coset representative"))
    }
}

impl VarietyUniverse for SchubertUniverse {
    fn labels(&self) -> Vec<String> {
        self.labels.clone()
    }

    fn contains(&self, a: &str, b: &str) -> bool {
        let (i, j) = (self.idx(a), self.idx(b));
        self.leq[i * self.labels.len() + j]
    }

    fn meet_components(&self, a: &str, b: &str) -> Antichain {
        let m = self.labels.len();
        let (i, j) = (self.idx(a), self.idx(b));
        let below: Vec<usize> = (0..m)
            .filter(|&w| self.leq[w * m + i] && self.leq[w * m + j])
            .collect();
        let comps: Vec<String> = below
            .iter()
            .filter(|&&w| below.iter().all(|&x| x == w || !self.leq[w * m + x]))
            .map(|&w| self.labels[w].clone())
            .collect();
        Antichain::from_sorted_unchecked(comps)
    }

    fn is_label(&self, label: &str) -> bool {
        self.index_of(label).is_some()
    }
}

/// If the quotient is a Grassmannian `Gr(k, n)` — generators are all of
/// `1..n-1` except a single `k` — return `k`.
pub fn grassmannian_column(n: usize, generators: &BTreeSet<usize>) -> Option<usize> {
    if n < 2 || generators.len() + 2 != n {
        return None;
    }
    (1..n).find(|k| !generators.contains(k))
}

/// Encode a partition inside the `k x (n-k)` box as the corresponding
/// minimal coset representative: the representative sends `j` to
/// `λ_{k+1-j} + j` on the first `k` positions and lists the leftover values
/// ascending.
pub fn partition_to_rep(n: usize, k: usize, lambda: &[usize]) -> Result<Permutation, BruhatError> {
    if lambda.len() > k {
        return Err(BruhatError::InvalidPartition(format!(
            "more than {k} parts"
        )));
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(BruhatError::InvalidPartition(
            "parts must be weakly decreasing".to_string(),
        ));
    }
    if lambda.first().copied().unwrap_or(0) > n - k {
        return Err(BruhatError::InvalidPartition(format!(
            "first part exceeds {}",
            n - k
        )));
    }
    let mut padded = lambda.to_vec();
    padded.resize(k, 0);
    let mut one_line: Vec<usize> = (1..=k).map(|j| padded[k - j] + j).collect();
    let used: BTreeSet<usize> = one_line.iter().copied().collect();
    one_line.extend((1..=n).filter(|v| !used.contains(v)));
    Permutation::new(one_line)
}

/// Inverse of [`partition_to_rep`]: read the partition off the first `k`
/// values of a Grassmannian representative.
pub fn rep_to_partition(k: usize, w: &Permutation) -> Vec<usize> {
    let mut lambda: Vec<usize> = (1..=k).map(|j| w.at(k + 1 - j) - (k + 1 - j)).collect();
    while lambda.last() == Some(&0) {
        lambda.pop();
    }
    lambda
}

/// Parse `"(2,1)"`, `"(2)"`, or `"()"` into a partition.
pub fn parse_partition(s: &str) -> Result<Vec<usize>, BruhatError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|rest| rest.strip_suffix(')'))
        .ok_or_else(|| BruhatError::InvalidPartition(format!("'{s}' is not parenthesized")))?;
    let inner = inner.trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| BruhatError::InvalidPartition(format!("bad part '{t}'")))
        })
        .collect()
}

pub fn partition_label(lambda: &[usize]) -> String {
    let parts: Vec<String> = lambda.iter().map(|p| p.to_string()).collect();
    format!("({})", parts.join(","))
}
