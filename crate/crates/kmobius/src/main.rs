//! `kmob`: exact Möbius-inversion expansions for reduced unions of
//! varieties, with an inclusion-exclusion cross-check.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 invalid input.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kmobius::bruhat::{
    grassmannian_column, parse_partition, partition_label, partition_to_rep, rep_to_partition,
    ParabolicQuotient, Permutation, SchubertUniverse,
};
use kmobius::kclass::{mobius_kclass, normalize_components, verify_expansion, KClassExpansion};
use kmobius::universe::{
    enumerate_antichains, intersect_decompose_closure, Antichain, TableData, TableUniverse,
    VarietyUniverse, DEFAULT_CEILING,
};
use kmobius::FinitePoset;

#[derive(Parser)]
#[command(
    name = "kmob",
    version,
    about = "Exact Mobius-inversion class expansions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Mobius function of a poset file (elem/rel lines).
    Mobius { file: PathBuf },
    /// Close the seeds of a universe file under intersect-decompose and
    /// print the closure with its Mobius function.
    Closure { file: PathBuf },
    /// Expand the class of a union of Schubert varieties in W/W_P.
    Kclass {
        /// Rank: permutations of 1..=n.
        #[arg(long)]
        n: usize,
        /// Parabolic generator indices, e.g. "1,3"; empty for the full flag.
        #[arg(long, default_value = "")]
        parabolic: String,
        /// Union components: permutations ("231,312") or, on a Grassmannian
        /// quotient, partitions ("(2),(1,1)"). Separate with ";" when the
        /// permutations themselves contain commas (n >= 10).
        #[arg(long)]
        components: String,
    },
    /// Cross-check the Mobius expansion against inclusion-exclusion.
    Verify {
        /// Rank of the Schubert universe (alternative: --universe).
        #[arg(long)]
        n: Option<usize>,
        /// Parabolic generator indices for the Schubert universe.
        #[arg(long, default_value = "")]
        parabolic: String,
        /// Verify over a table-universe file instead of a Schubert universe.
        #[arg(long)]
        universe: Option<PathBuf>,
        /// Verify a single union, given by its components.
        #[arg(long)]
        components: Option<String>,
        /// Verify every nonempty antichain of the universe.
        #[arg(long)]
        all_antichains: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("kmob: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let ceiling = ceiling_from_env()?;
    match cli.command {
        Command::Mobius { file } => run_mobius(&file),
        Command::Closure { file } => run_closure(&file, ceiling),
        Command::Kclass {
            n,
            parabolic,
            components,
        } => run_kclass(n, &parabolic, &components, ceiling),
        Command::Verify {
            n,
            parabolic,
            universe,
            components,
            all_antichains,
        } => run_verify(n, &parabolic, universe, components, all_antichains, ceiling),
    }
}

fn ceiling_from_env() -> Result<usize, String> {
    match std::env::var("KMOB_CEILING") {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&c| c >= 1)
            .ok_or_else(|| format!("KMOB_CEILING must be a positive integer, got '{raw}'")),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_CEILING),
        Err(e) => Err(format!("KMOB_CEILING: {e}")),
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn run_mobius(file: &Path) -> Result<u8, String> {
    let text = read_file(file)?;
    let poset = FinitePoset::parse(&text).map_err(|e| format!("{}: {e}", file.display()))?;
    if poset.is_empty() {
        return Err(format!("{}: no elements declared", file.display()));
    }
    let mu = poset.mobius();
    let expansion = KClassExpansion::from_entries(mu.iter().map(|(l, v)| (l.to_string(), v)));
    print!("{}", expansion.to_output_string(true));
    Ok(0)
}

fn load_universe(file: &Path) -> Result<TableUniverse, String> {
    let text = read_file(file)?;
    let data = TableData::parse(&text).map_err(|e| format!("{}: {e}", file.display()))?;
    let report = data.validate();
    for warning in report.warnings() {
        eprintln!("kmob: {}: warning: {}", file.display(), warning.message);
    }
    if !report.is_valid() {
        for error in report.errors() {
            eprintln!("kmob: {}: error: {}", file.display(), error.message);
        }
        return Err(format!("{}: invalid universe table", file.display()));
    }
    data.build()
        .map_err(|_| format!("{}: invalid universe table", file.display()))
}

fn run_closure(file: &Path, ceiling: usize) -> Result<u8, String> {
    let universe = load_universe(file)?;
    if universe.seeds().is_empty() {
        return Err(format!("{}: no seed components declared", file.display()));
    }
    let closure = intersect_decompose_closure(&universe, universe.seeds(), ceiling)
        .map_err(|e| e.to_string())?;
    for label in closure.labels() {
        println!("elem {label}");
    }
    for (a, b) in closure.covers() {
        println!("rel {a} {b}");
    }
    println!("# mobius");
    let mu = closure.mobius();
    let expansion = KClassExpansion::from_entries(mu.iter().map(|(l, v)| (l.to_string(), v)));
    print!("{}", expansion.to_output_string(true));
    Ok(0)
}

fn parse_generators(raw: &str, n: usize) -> Result<BTreeSet<usize>, String> {
    let mut out = BTreeSet::new();
    for token in raw.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let index: usize = token
            .parse()
            .map_err(|_| format!("bad parabolic generator '{token}'"))?;
        if index == 0 || index >= n {
            return Err(format!("parabolic generator {index} out of range 1..{n}"));
        }
        out.insert(index);
    }
    Ok(out)
}

/// Split a component list on commas that are not inside parentheses, so
/// partition syntax like "(2),(1,1)" survives. A semicolon anywhere makes
/// ";" the separator instead, which keeps comma-form permutations (n >= 10)
/// expressible.
fn split_components(raw: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    let comma_splits = !raw.contains(';');
    for c in raw.chars() {
        match c {
            '(' => {
                depth += 1;
                current.push(c);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| format!("unbalanced ')' in '{raw}'"))?;
                current.push(c);
            }
            ',' if depth == 0 && comma_splits => {
                out.push(std::mem::take(&mut current));
            }
            ';' if depth == 0 => {
                out.push(std::mem::take(&mut current));
            }
            _ => current.push(c),
        }
    }
    out.push(current);
    if depth != 0 {
        return Err(format!("unbalanced '(' in '{raw}'"));
    }
    let out: Vec<String> = out.into_iter().map(|t| t.trim().to_string()).collect();
    if out.iter().any(String::is_empty) {
        return Err(format!("empty component in '{raw}'"));
    }
    Ok(out)
}

/// Resolve one component token against a Schubert universe, returning the
/// universe label and whether the token used partition syntax.
fn resolve_schubert_token(
    universe: &SchubertUniverse,
    token: &str,
) -> Result<(String, bool), String> {
    let quotient = universe.quotient();
    let n = quotient.n();
    let (perm, is_partition) = if token.starts_with('(') {
        let k = grassmannian_column(n, quotient.generators())
            .ok_or_else(|| format!("partition syntax '{token}' needs a Grassmannian quotient"))?;
        let lambda = parse_partition(token).map_err(|e| e.to_string())?;
        (
            partition_to_rep(n, k, &lambda).map_err(|e| e.to_string())?,
            true,
        )
    } else {
        (Permutation::parse(token).map_err(|e| e.to_string())?, false)
    };
    if perm.n() != n {
        return Err(format!("'{token}' is not a permutation of 1..={n}"));
    }
    if !quotient.is_rep(&perm) {
        return Err(format!("'{token}' is not a minimal coset representative"));
    }
    Ok((perm.to_string(), is_partition))
}

/// Resolve a component list against a Schubert universe. Returns the
/// universe labels plus whether every token used partition syntax (in which
/// case output should speak partitions too). A string that resolves as a
/// single component whole is taken as one — that is what makes a lone
/// comma-form permutation or a partition like "(1,1)" work without quoting
/// games.
fn resolve_schubert_components(
    universe: &SchubertUniverse,
    raw: &str,
) -> Result<(Vec<String>, bool), String> {
    if !raw.contains(';') {
        if let Ok((label, is_partition)) = resolve_schubert_token(universe, raw) {
            return Ok((vec![label], is_partition));
        }
    }
    let tokens = split_components(raw)?;
    let mut labels = Vec::new();
    let mut all_partitions = true;
    for token in &tokens {
        let (label, is_partition) = resolve_schubert_token(universe, token)?;
        all_partitions &= is_partition;
        labels.push(label);
    }
    Ok((labels, all_partitions))
}

/// Resolve a component list of table-universe labels; a string that is a
/// label as a whole counts as a single component.
fn resolve_table_components(universe: &TableUniverse, raw: &str) -> Result<Vec<String>, String> {
    if !raw.contains(';') && universe.is_label(raw) {
        return Ok(vec![raw.to_string()]);
    }
    split_components(raw)
}

fn run_kclass(n: usize, parabolic: &str, components: &str, ceiling: usize) -> Result<u8, String> {
    if n == 0 {
        return Err("rank must be at least 1".to_string());
    }
    let generators = parse_generators(parabolic, n)?;
    let quotient = ParabolicQuotient::new(n, &generators).map_err(|e| e.to_string())?;
    let universe = SchubertUniverse::new(quotient);
    let (labels, partition_output) = resolve_schubert_components(&universe, components)?;

    let (antichain, dropped) =
        normalize_components(&universe, &labels).map_err(|e| e.to_string())?;
    if dropped {
        let kept: BTreeSet<&str> = antichain.iter().collect();
        let lost: Vec<&str> = {
            let mut lost: Vec<&str> = labels
                .iter()
                .map(String::as_str)
                .filter(|l| !kept.contains(*l))
                .collect();
            lost.sort_unstable();
            lost.dedup();
            lost
        };
        println!(
            "# dropped components contained in others: {}",
            lost.join(",")
        );
    }

    let expansion = mobius_kclass(&universe, &antichain, ceiling).map_err(|e| e.to_string())?;
    let expansion = if partition_output {
        let k = grassmannian_column(universe.quotient().n(), universe.quotient().generators())
            .expect("partition output implies a Grassmannian quotient");
        KClassExpansion::from_entries(expansion.iter().map(|(label, v)| {
            let w = universe.perm_of(label).expect("expansion labels are reps");
            (partition_label(&rep_to_partition(k, w)), v)
        }))
    } else {
        expansion
    };
    print!("{}", expansion.to_output_string(false));
    Ok(0)
}

fn run_verify(
    n: Option<usize>,
    parabolic: &str,
    universe_file: Option<PathBuf>,
    components: Option<String>,
    all_antichains: bool,
    ceiling: usize,
) -> Result<u8, String> {
    if components.is_some() == all_antichains {
        return Err("choose exactly one of --components and --all-antichains".to_string());
    }
    match (n, universe_file) {
        (Some(_), Some(_)) => Err("choose exactly one of --n and --universe".to_string()),
        (None, None) => Err("one of --n or --universe is required".to_string()),
        (Some(n), None) => {
            if n == 0 {
                return Err("rank must be at least 1".to_string());
            }
            let generators = parse_generators(parabolic, n)?;
            let quotient = ParabolicQuotient::new(n, &generators).map_err(|e| e.to_string())?;
            let universe = SchubertUniverse::new(quotient);
            let antichains = match &components {
                Some(raw) => {
                    let (labels, _) = resolve_schubert_components(&universe, raw)?;
                    vec![normalized(&universe, &labels)?]
                }
                None => enumerate_antichains(&universe),
            };
            verify_antichains(&universe, &antichains, ceiling)
        }
        (None, Some(file)) => {
            let universe = load_universe(&file)?;
            let antichains = match &components {
                Some(raw) => {
                    let labels = resolve_table_components(&universe, raw)?;
                    vec![normalized(&universe, &labels)?]
                }
                None => enumerate_antichains(&universe),
            };
            verify_antichains(&universe, &antichains, ceiling)
        }
    }
}

fn normalized<U: VarietyUniverse>(universe: &U, labels: &[String]) -> Result<Antichain, String> {
    let (antichain, dropped) = normalize_components(universe, labels).map_err(|e| e.to_string())?;
    if dropped {
        println!("# dropped components contained in others");
    }
    Ok(antichain)
}

fn verify_antichains<U: VarietyUniverse>(
    universe: &U,
    antichains: &[Antichain],
    ceiling: usize,
) -> Result<u8, String> {
    let mut failures = 0usize;
    for antichain in antichains {
        let report = verify_expansion(universe, antichain, ceiling).map_err(|e| e.to_string())?;
        if report.pass() {
            println!("pass\t{antichain}");
        } else {
            failures += 1;
            println!(
                "FAIL\t{antichain}\t{}",
                report.failures.first().map(String::as_str).unwrap_or("")
            );
        }
    }
    println!(
        "# antichains={} pass={} fail={}",
        antichains.len(),
        antichains.len() - failures,
        failures
    );
    Ok(if failures == 0 { 0 } else { 1 })
}
