//! Families of irreducible varieties known only through containment and a
//! "components of the pairwise intersection" table, plus the closure that
//! generates the minimal intersect-decompose family from a set of seeds.
//!
//! Nothing here touches equations: reducedness of intersections is an axiom
//! of the abstraction, and the meet table is taken as ground truth for what
//! the geometric components of an intersection are.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::poset::{FinitePoset, PosetError};
use crate::ParseError;

/// Default cap on how many labels a closure may materialize before giving up.
pub const DEFAULT_CEILING: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniverseError {
    #[error("unknown label '{0}'")]
    UnknownLabel(String),
    #[error("'{0}' and '{1}' are comparable; not an antichain")]
    NotAntichain(String, String),
    #[error("closure exceeded the element ceiling of {0}")]
    CeilingExceeded(usize),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A family of irreducibles: containment is a partial order on labels, and
/// `meet_components(a, b)` lists the components of the intersection `a ∩ b`
/// as an antichain. Requirements on implementors:
///
/// * `meet_components` is symmetric and `meet_components(a, a) = {a}`;
/// * every component of `meet_components(a, b)` is contained in both `a`
///   and `b`, and the components are pairwise incomparable;
/// * if `contains(a, b)` then `meet_components(a, b) = {a}`.
///
/// `contains(a, b)` means the variety `a` is a subvariety of `b`, so it is
/// the `a <= b` of the containment order. The component antichain of an
/// intersection may be empty (disjoint varieties).
pub trait VarietyUniverse {
    /// Every label, sorted and without duplicates.
    fn labels(&self) -> Vec<String>;

    /// Whether the variety `a` is contained in the variety `b`.
    fn contains(&self, a: &str, b: &str) -> bool;

    /// The components of `a ∩ b`.
    fn meet_components(&self, a: &str, b: &str) -> Antichain;

    fn is_label(&self, label: &str) -> bool {
        self.labels().iter().any(|l| l == label)
    }
}

/// A reduced union of irreducibles, represented by its pairwise-incomparable
/// components in label order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Antichain {
    components: Vec<String>,
}

impl Antichain {
    /// Validating constructor: labels must exist in the universe and be
    /// pairwise incomparable. Duplicates collapse.
    pub fn new<U: VarietyUniverse + ?Sized>(
        universe: &U,
        labels: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, UniverseError> {
        let set: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        for l in &set {
            if !universe.is_label(l) {
                return Err(UniverseError::UnknownLabel(l.clone()));
            }
        }
        let components: Vec<String> = set.into_iter().collect();
        for (i, a) in components.iter().enumerate() {
            for b in &components[i + 1..] {
                if universe.contains(a, b) || universe.contains(b, a) {
                    return Err(UniverseError::NotAntichain(a.clone(), b.clone()));
                }
            }
        }
        Ok(Antichain { components })
    }

    pub fn singleton(label: impl Into<String>) -> Self {
        Antichain {
            components: vec![label.into()],
        }
    }

    pub(crate) fn from_sorted_unchecked(components: Vec<String>) -> Self {
        debug_assert!(components.windows(2).all(|w| w[0] < w[1]));
        Antichain { components }
    }

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.components.iter().map(String::as_str)
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.components.join(","))
    }
}

/// Keep only the labels not strictly contained in another listed label.
fn maximal_labels<U: VarietyUniverse + ?Sized>(
    universe: &U,
    labels: &BTreeSet<String>,
) -> Vec<String> {
    labels
        .iter()
        .filter(|a| !labels.iter().any(|b| b != *a && universe.contains(a, b)))
        .cloned()
        .collect()
}

/// Component antichain of `(∪ x1) ∩ (∪ x2)`: the maximal elements across the
/// pairwise meet components. Unions distribute over intersection, so this is
/// exactly the set of components of the intersection of the two unions.
pub fn antichain_meet<U: VarietyUniverse + ?Sized>(
    universe: &U,
    x1: &Antichain,
    x2: &Antichain,
) -> Antichain {
    let mut all: BTreeSet<String> = BTreeSet::new();
    for a in x1.iter() {
        for b in x2.iter() {
            for c in universe.meet_components(a, b).iter() {
                all.insert(c.to_string());
            }
        }
    }
    Antichain::from_sorted_unchecked(maximal_labels(universe, &all))
}

/// The minimal label family containing `seeds` and closed under taking
/// components of pairwise meets, as a poset ordered by containment.
///
/// Pairwise closure suffices for closure under arbitrary subset
/// intersections: a component of `∩(S ∪ {s})` is a component of `C ∩ s` for
/// some component `C` of `∩S`. The `ceiling` aborts inconsistent or runaway
/// universes.
pub fn intersect_decompose_closure<U: VarietyUniverse + ?Sized>(
    universe: &U,
    seeds: &Antichain,
    ceiling: usize,
) -> Result<FinitePoset, UniverseError> {
    let mut set: BTreeSet<String> = seeds.iter().map(str::to_string).collect();
    if set.len() > ceiling {
        return Err(UniverseError::CeilingExceeded(ceiling));
    }
    loop {
        let mut fresh: BTreeSet<String> = BTreeSet::new();
        let members: Vec<&String> = set.iter().collect();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                for c in universe.meet_components(a, b).iter() {
                    if !set.contains(c) {
                        fresh.insert(c.to_string());
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        set.extend(fresh);
        if set.len() > ceiling {
            return Err(UniverseError::CeilingExceeded(ceiling));
        }
    }
    let labels: Vec<String> = set.iter().cloned().collect();
    let mut relations = Vec::new();
    for a in &labels {
        for b in &labels {
            if a != b && universe.contains(a, b) {
                relations.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(FinitePoset::build(labels, relations)?)
}

/// Whether every subset of `p`'s elements has all components of its
/// intersection inside `p`. The empty subset stands for the ambient union,
/// whose components are `p`'s maximal elements. Exhaustive over `2^|p|`
/// subsets; test scale only (|p| <= 20).
pub fn check_subset_closure<U: VarietyUniverse + ?Sized>(
    universe: &U,
    p: &FinitePoset,
) -> Result<bool, UniverseError> {
    let labels = p.labels();
    for l in labels {
        if !universe.is_label(l) {
            return Err(UniverseError::UnknownLabel(l.clone()));
        }
    }
    assert!(
        labels.len() <= 20,
        "check_subset_closure is exhaustive; poset too large"
    );
    for mask in 0u64..(1u64 << labels.len()) {
        let chosen: Vec<&String> = labels
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, l)| l)
            .collect();
        let components = if chosen.is_empty() {
            Antichain::from_sorted_unchecked(p.maximal_elements().into_iter().collect())
        } else {
            let mut acc = Antichain::singleton(chosen[0].clone());
            for l in &chosen[1..] {
                acc = antichain_meet(universe, &acc, &Antichain::singleton((*l).clone()));
            }
            acc
        };
        if components.iter().any(|c| !p.contains_label(c)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All nonempty antichains of the universe, by depth-first extension in label
/// order with incomparability pruning.
pub fn enumerate_antichains<U: VarietyUniverse + ?Sized>(universe: &U) -> Vec<Antichain> {
    let labels = universe.labels();
    let mut out = Vec::new();
    let mut current: Vec<String> = Vec::new();
    fn dfs<U: VarietyUniverse + ?Sized>(
        universe: &U,
        labels: &[String],
        start: usize,
        current: &mut Vec<String>,
        out: &mut Vec<Antichain>,
    ) {
        for j in start..labels.len() {
            let candidate = &labels[j];
            let compatible = current
                .iter()
                .all(|c| !universe.contains(c, candidate) && !universe.contains(candidate, c));
            if compatible {
                current.push(candidate.clone());
                out.push(Antichain::from_sorted_unchecked(current.clone()));
                dfs(universe, labels, j + 1, current, out);
                current.pop();
            }
        }
    }
    dfs(universe, &labels, 0, &mut current, &mut out);
    out
}

/// Severity of a [`ValidationReport`] entry. `Error` makes the table
/// unusable; `Warning` flags defaults or conventions worth a second look.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationEntry {
    pub severity: Severity,
    pub message: String,
}

/// Outcome of checking a [`TableData`] against the universe invariants.
/// Violations are entries, not hard errors; callers decide severity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    fn error(&mut self, message: impl Into<String>) {
        self.entries.push(ValidationEntry {
            severity: Severity::Error,
            message: message.into(),
        });
    }

    fn warning(&mut self, message: impl Into<String>) {
        self.entries.push(ValidationEntry {
            severity: Severity::Warning,
            message: message.into(),
        });
    }

    pub fn is_valid(&self) -> bool {
        !self.entries.iter().any(|e| e.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &ValidationEntry> {
        self.entries
            .iter()
            .filter(|e| e.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationEntry> {
        self.entries
            .iter()
            .filter(|e| e.severity == Severity::Warning)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let tag = match e.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{tag}: {}", e.message)?;
        }
        Ok(())
    }
}

/// Declared meet entry: the components of `a ∩ b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeetDecl {
    pub a: String,
    pub b: String,
    pub components: Vec<String>,
}

/// Raw table-universe data as written in the file format, before validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableData {
    pub elements: Vec<String>,
    /// Containment generators `(a, b)` meaning `a ⊆ b`.
    pub containments: Vec<(String, String)>,
    pub meets: Vec<MeetDecl>,
    pub seeds: Vec<String>,
}

impl TableData {
    /// Parse the universe text format: `elem <label>`, `contain <a> <b>`
    /// (meaning `a ⊆ b`), `meet <a> <b> = <c>...`, and `seed <label>...`
    /// lines, with `#` comments. Labels must be declared somewhere in the
    /// file before the data is accepted (order within the file is free).
    pub fn parse(text: &str) -> Result<TableData, ParseError> {
        let lines: Vec<(usize, Vec<&str>)> = crate::content_lines(text).collect();
        let mut data = TableData::default();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
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
                data.elements.push(tokens[1].to_string());
            }
        }
        let known = |ln: usize, t: &str| -> Result<String, ParseError> {
            if seen.contains(t) {
                Ok(t.to_string())
            } else {
                Err(ParseError::at(ln, format!("unknown element '{t}'")))
            }
        };
        for (ln, tokens) in &lines {
            match tokens[0] {
                "elem" => {}
                "contain" => {
                    if tokens.len() != 3 {
                        return Err(ParseError::at(*ln, "expected 'contain <a> <b>'"));
                    }
                    data.containments
                        .push((known(*ln, tokens[1])?, known(*ln, tokens[2])?));
                }
                "meet" => {
                    if tokens.len() < 4 || tokens[3] != "=" {
                        return Err(ParseError::at(*ln, "expected 'meet <a> <b> = <c>...'"));
                    }
                    let mut components = Vec::new();
                    for t in &tokens[4..] {
                        components.push(known(*ln, t)?);
                    }
                    data.meets.push(MeetDecl {
                        a: known(*ln, tokens[1])?,
                        b: known(*ln, tokens[2])?,
                        components,
                    });
                }
                "seed" => {
                    if tokens.len() < 2 {
                        return Err(ParseError::at(*ln, "expected 'seed <label>...'"));
                    }
                    for t in &tokens[1..] {
                        data.seeds.push(known(*ln, t)?);
                    }
                }
                other => {
                    return Err(ParseError::at(*ln, format!("unknown directive '{other}'")));
                }
            }
        }
        Ok(data)
    }

    /// Check every table invariant, reporting each violation. Errors are
    /// genuine invariant breaks; warnings flag meet entries that had to be
    /// defaulted for an incomparable pair, where containment data alone
    /// cannot determine the components.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        self.validate_and_build(&mut report);
        report
    }

    /// Validate and, if no errors were found, construct the usable universe.
    pub fn build(&self) -> Result<TableUniverse, ValidationReport> {
        let mut report = ValidationReport::default();
        match self.validate_and_build(&mut report) {
            Some(u) if report.is_valid() => Ok(u),
            _ => Err(report),
        }
    }

    fn validate_and_build(&self, report: &mut ValidationReport) -> Option<TableUniverse> {
        let order = match FinitePoset::build(self.elements.clone(), self.containments.clone()) {
            Ok(p) => p,
            Err(e) => {
                report.error(format!("containment: {e}"));
                return None;
            }
        };
        let idx = |l: &str| order.labels().iter().position(|x| x == l).unwrap();

        // Declared meets, keyed on the unordered pair.
        let mut declared: BTreeMap<(usize, usize), BTreeSet<String>> = BTreeMap::new();
        for decl in &self.meets {
            for l in [&decl.a, &decl.b].into_iter().chain(&decl.components) {
                if !order.contains_label(l) {
                    report.error(format!("meet entry references unknown element '{l}'"));
                    return None;
                }
            }
            let (i, j) = (idx(&decl.a), idx(&decl.b));
            let key = (i.min(j), i.max(j));
            let comps: BTreeSet<String> = decl.components.iter().cloned().collect();
            if comps.len() != decl.components.len() {
                report.warning(format!(
                    "meet {} {} lists a component twice",
                    decl.a, decl.b
                ));
            }
            match declared.get(&key) {
                Some(existing) if *existing != comps => {
                    report.error(format!(
                        "conflicting declarations for meet {} {}",
                        decl.a, decl.b
                    ));
                }
                _ => {
                    declared.insert(key, comps);
                }
            }
        }

        let labels = order.labels().to_vec();
        let n = labels.len();
        let mut meets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                let (a, b) = (&labels[i], &labels[j]);
                let comparable = order.leq(a, b) || order.leq(b, a);
                let components: Vec<String> = match declared.get(&(i, j)) {
                    Some(set) => {
                        let comps: Vec<String> = set.iter().cloned().collect();
                        // Absorption: a comparable pair meets in its smaller member.
                        if comparable {
                            let lower = if order.leq(a, b) { a } else { b };
                            if comps != [lower.clone()] {
                                report.error(format!(
                                    "meet {a} {b}: '{lower}' is contained in the other, so the meet must be exactly '{lower}'"
                                ));
                            }
                        }
                        for c in &comps {
                            if !(order.leq(c, a) && order.leq(c, b)) {
                                report.error(format!(
                                    "meet {a} {b}: component '{c}' is not contained in both"
                                ));
                            }
                        }
                        for (k, c) in comps.iter().enumerate() {
                            for d in &comps[k + 1..] {
                                if order.leq(c, d) || order.leq(d, c) {
                                    report.error(format!(
                                        "meet {a} {b}: components '{c}' and '{d}' are comparable"
                                    ));
                                }
                            }
                        }
                        comps
                    }
                    None if comparable => {
                        let lower = if order.leq(a, b) { a } else { b };
                        vec![lower.clone()]
                    }
                    None => {
                        // Default: maximal common lower bounds. Containment
                        // alone cannot pin down the components of an
                        // incomparable pair, so flag the guess.
                        let glbs = order
                            .greatest_lower_bounds([a.as_str(), b.as_str()])
                            .expect("labels come from the poset");
                        report.warning(format!(
                            "meet {a} {b} not declared; defaulting to maximal common lower bounds ({})",
                            if glbs.is_empty() {
                                "empty".to_string()
                            } else {
                                glbs.iter().cloned().collect::<Vec<_>>().join(",")
                            }
                        ));
                        glbs.into_iter().collect()
                    }
                };
                meets.insert((i, j), components.iter().map(|c| idx(c)).collect());
            }
        }

        // Seeds must name declared elements and form an antichain.
        let mut seed_set: BTreeSet<String> = BTreeSet::new();
        for s in &self.seeds {
            if !order.contains_label(s) {
                report.error(format!("seed references unknown element '{s}'"));
                return None;
            }
            seed_set.insert(s.clone());
        }
        let seed_vec: Vec<String> = seed_set.into_iter().collect();
        for (i, a) in seed_vec.iter().enumerate() {
            for b in &seed_vec[i + 1..] {
                if order.leq(a, b) || order.leq(b, a) {
                    report.error(format!("seeds '{a}' and '{b}' are comparable"));
                }
            }
        }

        Some(TableUniverse {
            order,
            meets,
            seeds: Antichain::from_sorted_unchecked(seed_vec),
        })
    }
}

/// A validated, fully tabulated universe: containment closed into a poset and
/// a meet entry materialized for every unordered pair.
#[derive(Clone, Debug)]
pub struct TableUniverse {
    order: FinitePoset,
    meets: BTreeMap<(usize, usize), Vec<usize>>,
    seeds: Antichain,
}

impl TableUniverse {
    /// The seed components declared in the table (the components of the
    /// ambient union). May be empty if the table declares none.
    pub fn seeds(&self) -> &Antichain {
        &self.seeds
    }

    pub fn containment_order(&self) -> &FinitePoset {
        &self.order
    }

    fn idx(&self, label: &str) -> usize {
        self.order
            .labels()
            .binary_search_by(|l| l.as_str().cmp(label))
            .unwrap_or_else(|_| panic!("unknown label '{label}'"))
    }
}

impl VarietyUniverse for TableUniverse {
    fn labels(&self) -> Vec<String> {
        self.order.labels().to_vec()
    }

    fn contains(&self, a: &str, b: &str) -> bool {
        self.order.leq(a, b)
    }

    fn meet_components(&self, a: &str, b: &str) -> Antichain {
        let (i, j) = (self.idx(a), self.idx(b));
        let key = (i.min(j), i.max(j));
        let comps = &self.meets[&key];
        Antichain::from_sorted_unchecked(
            comps
                .iter()
                .map(|&c| self.order.labels()[c].clone())
                .collect(),
        )
    }

    fn is_label(&self, label: &str) -> bool {
        self.order.contains_label(label)
    }
}

/// Coordinate-subspace universe for stress tests: a label is the set of
/// vanishing coordinate indices out of `1..=n` ("e" for none, digit strings
/// otherwise), containment is reverse inclusion of index sets, and every
/// meet is irreducible: the subspace where the union of the index sets
/// vanishes.
#[derive(Clone, Copy, Debug)]
pub struct CoordinateUniverse {
    n: usize,
}

impl CoordinateUniverse {
    pub fn new(n: usize) -> Self {
        assert!((1..=9).contains(&n), "digit labels support n in 1..=9");
        CoordinateUniverse { n }
    }

    fn label_of(set: &BTreeSet<usize>) -> String {
        if set.is_empty() {
            "e".to_string()
        } else {
            set.iter().map(|d| d.to_string()).collect()
        }
    }

    fn set_of(&self, label: &str) -> BTreeSet<usize> {
        if label == "e" {
            return BTreeSet::new();
        }
        label
            .chars()
            .map(|c| {
                let d = c.to_digit(10).map(|d| d as usize);
                match d {
                    Some(d) if (1..=self.n).contains(&d) => d,
                    _ => panic!("unknown label '{label}'"),
                }
            })
            .collect()
    }
}

impl VarietyUniverse for CoordinateUniverse {
    fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = (0u32..1 << self.n)
            .map(|mask| {
                let set: BTreeSet<usize> =
                    (1..=self.n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                Self::label_of(&set)
            })
            .collect();
        out.sort();
        out
    }

    fn contains(&self, a: &str, b: &str) -> bool {
        // More vanishing coordinates = smaller subspace.
        self.set_of(a).is_superset(&self.set_of(b))
    }

    fn meet_components(&self, a: &str, b: &str) -> Antichain {
        let union: BTreeSet<usize> = self.set_of(a).union(&self.set_of(b)).copied().collect();
        Antichain::singleton(Self::label_of(&union))
    }

    fn is_label(&self, label: &str) -> bool {
        if label == "e" {
            return true;
        }
        let mut last = 0usize;
        for c in label.chars() {
            match c.to_digit(10).map(|d| d as usize) {
                Some(d) if d > last && d <= self.n => last = d,
                _ => return false,
            }
        }
        !label.is_empty()
    }
}
