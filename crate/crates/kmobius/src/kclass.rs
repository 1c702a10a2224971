//! The two expansions of the class of a reduced union `X = ∪_{d∈D} X_d` in
//! the structure-sheaf basis `{[A]}` of a variety universe:
//!
//! * [`mobius_kclass`] — coefficients are the Möbius function of the
//!   downward order ideal generated by `D`;
//! * [`inclusion_exclusion_kclass`] — recursion on the number of
//!   components via `[X] = [A] + [X'] − [A ∩ X']`.
//!
//! The two agree exactly on every consistent universe, the Möbius
//! coefficients vanish outside the intersect-decompose closure of `D`, and
//! on the closure they equal the closure poset's own Möbius function;
//! [`verify_expansion`] checks all three claims and is the backbone of the
//! `verify` subcommand.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::poset::FinitePoset;
use crate::universe::{
    antichain_meet, intersect_decompose_closure, Antichain, UniverseError, VarietyUniverse,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KClassError {
    #[error("no components specified")]
    EmptyComponents,
    #[error("unknown label '{0}'")]
    UnknownLabel(String),
    #[error("order ideal of {size} elements exceeds the ceiling of {ceiling}")]
    IdealTooLarge { size: usize, ceiling: usize },
    #[error(transparent)]
    Universe(#[from] UniverseError),
}

/// A finitely supported integer combination of structure-sheaf basis classes.
/// Zero coefficients are kept (vanishing is something callers assert, not
/// something the container hides); equality is coefficientwise with missing
/// entries read as zero.
#[derive(Clone, Debug, Default, Eq)]
pub struct KClassExpansion {
    coefficients: BTreeMap<String, i64>,
}

impl PartialEq for KClassExpansion {
    fn eq(&self, other: &Self) -> bool {
        let keys: BTreeSet<&String> = self
            .coefficients
            .keys()
            .chain(other.coefficients.keys())
            .collect();
        keys.into_iter().all(|k| self.get(k) == other.get(k))
    }
}

impl KClassExpansion {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The class of a single irreducible: coefficient 1 on its label.
    pub fn unit(label: impl Into<String>) -> Self {
        let mut coefficients = BTreeMap::new();
        coefficients.insert(label.into(), 1);
        KClassExpansion { coefficients }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (String, i64)>) -> Self {
        KClassExpansion {
            coefficients: entries.into_iter().collect(),
        }
    }

    pub fn get(&self, label: &str) -> i64 {
        self.coefficients.get(label).copied().unwrap_or(0)
    }

    /// Entries in label order, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.coefficients.iter().map(|(l, &v)| (l.as_str(), v))
    }

    /// Number of retained entries (zeros included).
    pub fn support_len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn nonzero_len(&self) -> usize {
        self.coefficients.values().filter(|&&v| v != 0).count()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        let mut coefficients = self.coefficients.clone();
        for (label, &v) in &other.coefficients {
            let entry = coefficients.entry(label.clone()).or_insert(0);
            *entry = entry
                .checked_add(sign * v)
                .expect("integer overflow in class expansion");
        }
        KClassExpansion { coefficients }
    }

    /// The line-oriented output format: `<label>\t<integer>` sorted by label,
    /// then a `# support=<k> nonzero=<m>` trailer. With `include_zeros`
    /// false, zero-coefficient lines are left out (the trailer still counts
    /// them in `support`).
    pub fn to_output_string(&self, include_zeros: bool) -> String {
        let mut out = String::new();
        for (label, value) in self.iter() {
            if include_zeros || value != 0 {
                writeln!(out, "{label}\t{value}").unwrap();
            }
        }
        writeln!(
            out,
            "# support={} nonzero={}",
            self.support_len(),
            self.nonzero_len()
        )
        .unwrap();
        out
    }
}

/// Which component of the antichain plays the split-off role `A` at each
/// step of the inclusion-exclusion recursion. The result is provably the
/// same either way; exposing the choice lets tests confirm that.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pivot {
    LexLeast,
    LexGreatest,
}

/// Drop duplicate labels and labels contained in another listed label,
/// returning the resulting antichain and whether anything was dropped.
/// Dominated input usually signals user error, so the flag is for reporting.
pub fn normalize_components<U: VarietyUniverse + ?Sized>(
    universe: &U,
    labels: &[String],
) -> Result<(Antichain, bool), KClassError> {
    if labels.is_empty() {
        return Err(KClassError::EmptyComponents);
    }
    for l in labels {
        if !universe.is_label(l) {
            return Err(KClassError::UnknownLabel(l.clone()));
        }
    }
    let set: BTreeSet<&String> = labels.iter().collect();
    let kept: Vec<String> = set
        .iter()
        .filter(|a| !set.iter().any(|b| b != *a && universe.contains(a, b)))
        .map(|l| (*l).clone())
        .collect();
    let dropped = kept.len() != labels.len();
    Ok((Antichain::from_sorted_unchecked(kept), dropped))
}

/// The downward order ideal `{e : e <= some d in D}` under containment, as a
/// poset.
fn ideal_poset<U: VarietyUniverse + ?Sized>(
    universe: &U,
    d: &Antichain,
    ceiling: usize,
) -> Result<FinitePoset, KClassError> {
    let members: Vec<String> = universe
        .labels()
        .into_iter()
        .filter(|e| d.iter().any(|top| universe.contains(e, top)))
        .collect();
    if members.len() > ceiling {
        return Err(KClassError::IdealTooLarge {
            size: members.len(),
            ceiling,
        });
    }
    let mut relations = Vec::new();
    for a in &members {
        for b in &members {
            if a != b && universe.contains(a, b) {
                relations.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(FinitePoset::build(members, relations).map_err(UniverseError::from)?)
}

/// Expansion of `[∪ D]` by Möbius inversion: build the order ideal generated
/// by `D`, take its Möbius function, and read the values off as
/// coefficients. Zero coefficients are retained.
pub fn mobius_kclass<U: VarietyUniverse + ?Sized>(
    universe: &U,
    d: &Antichain,
    ceiling: usize,
) -> Result<KClassExpansion, KClassError> {
    let ideal = ideal_poset(universe, d, ceiling)?;
    let mu = ideal.mobius();
    Ok(KClassExpansion::from_entries(
        mu.iter().map(|(l, v)| (l.to_string(), v)),
    ))
}

/// Expansion of `[∪ D]` by inclusion-exclusion on the number of components:
/// `[A ∪ X'] = [A] + [X'] − [A ∩ X']`, recursing into the component
/// antichain of each intersection. Memoized on the component label sets.
pub fn inclusion_exclusion_kclass<U: VarietyUniverse + ?Sized>(
    universe: &U,
    d: &Antichain,
    ceiling: usize,
) -> Result<KClassExpansion, KClassError> {
    inclusion_exclusion_kclass_with(universe, d, Pivot::LexLeast, ceiling)
}

/// [`inclusion_exclusion_kclass`] with an explicit pivot policy.
pub fn inclusion_exclusion_kclass_with<U: VarietyUniverse + ?Sized>(
    universe: &U,
    d: &Antichain,
    pivot: Pivot,
    ceiling: usize,
) -> Result<KClassExpansion, KClassError> {
    let mut memo: HashMap<Vec<String>, KClassExpansion> = HashMap::new();
    expand(universe, d.components(), pivot, ceiling, 0, &mut memo)
}

fn expand<U: VarietyUniverse + ?Sized>(
    universe: &U,
    components: &[String],
    pivot: Pivot,
    ceiling: usize,
    depth: usize,
    memo: &mut HashMap<Vec<String>, KClassExpansion>,
) -> Result<KClassExpansion, KClassError> {
    if depth > ceiling {
        return Err(UniverseError::CeilingExceeded(ceiling).into());
    }
    match components {
        [] => return Ok(KClassExpansion::zero()),
        [single] => return Ok(KClassExpansion::unit(single.clone())),
        _ => {}
    }
    if let Some(hit) = memo.get(components) {
        return Ok(hit.clone());
    }
    // Components are stored sorted, so the pivot is an end of the slice.
    let (a, rest): (&String, Vec<String>) = match pivot {
        Pivot::LexLeast => (&components[0], components[1..].to_vec()),
        Pivot::LexGreatest => {
            let (last, front) = components.split_last().unwrap();
            (last, front.to_vec())
        }
    };
    let a_chain = Antichain::singleton(a.clone());
    let rest_chain = Antichain::from_sorted_unchecked(rest.clone());
    let meet = antichain_meet(universe, &a_chain, &rest_chain);

    let rest_part = expand(universe, &rest, pivot, ceiling, depth + 1, memo)?;
    let meet_part = expand(universe, meet.components(), pivot, ceiling, depth + 1, memo)?;
    let result = KClassExpansion::unit(a.clone())
        .add(&rest_part)
        .sub(&meet_part);
    memo.insert(components.to_vec(), result.clone());
    Ok(result)
}

/// The predicted support of the Möbius expansion: the element set of the
/// intersect-decompose closure of `D`.
pub fn closure_support<U: VarietyUniverse + ?Sized>(
    universe: &U,
    d: &Antichain,
    ceiling: usize,
) -> Result<BTreeSet<String>, KClassError> {
    let closure = intersect_decompose_closure(universe, d, ceiling)?;
    Ok(closure.labels().iter().cloned().collect())
}

/// Outcome of cross-checking the two expansions of one antichain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    /// Möbius and inclusion-exclusion agree coefficientwise.
    pub expansions_agree: bool,
    /// Möbius coefficients vanish on ideal elements outside the closure.
    pub vanishing_outside_closure: bool,
    /// On the closure, the coefficients equal the closure poset's Möbius
    /// function.
    pub closure_mobius_agrees: bool,
    /// Human-readable detail for each failed comparison.
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.expansions_agree && self.vanishing_outside_closure && self.closure_mobius_agrees
    }
}

/// Run all three consistency checks for the union indexed by `d`.
pub fn verify_expansion<U: VarietyUniverse + ?Sized>(
    universe: &U,
    d: &Antichain,
    ceiling: usize,
) -> Result<VerificationReport, KClassError> {
    let mobius = mobius_kclass(universe, d, ceiling)?;
    let incl_excl = inclusion_exclusion_kclass(universe, d, ceiling)?;
    let closure = intersect_decompose_closure(universe, d, ceiling)?;
    let support: BTreeSet<&String> = closure.labels().iter().collect();

    let mut failures = Vec::new();

    let mut expansions_agree = true;
    let labels: BTreeSet<&str> = mobius
        .iter()
        .map(|(l, _)| l)
        .chain(incl_excl.iter().map(|(l, _)| l))
        .collect();
    for label in labels {
        let (m, i) = (mobius.get(label), incl_excl.get(label));
        if m != i {
            expansions_agree = false;
            failures.push(format!(
                "mobius vs inclusion-exclusion mismatch at '{label}' ({m} vs {i})"
            ));
        }
    }

    let mut vanishing_outside_closure = true;
    for (label, value) in mobius.iter() {
        if !support.contains(&label.to_string()) && value != 0 {
            vanishing_outside_closure = false;
            failures.push(format!(
                "nonzero coefficient {value} at '{label}' outside the closure"
            ));
        }
    }

    let mut closure_mobius_agrees = true;
    let closure_mu = closure.mobius();
    for (label, value) in closure_mu.iter() {
        if mobius.get(label) != value {
            closure_mobius_agrees = false;
            failures.push(format!(
                "closure Mobius {value} at '{label}' but expansion has {}",
                mobius.get(label)
            ));
        }
    }

    Ok(VerificationReport {
        expansions_agree,
        vanishing_outside_closure,
        closure_mobius_agrees,
        failures,
    })
}
