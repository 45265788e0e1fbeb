//! The `qforge` command line: identity grids, relation derivation, shift
//! normalization, telescoping pipelines and pattern checks, reported as
//! JSON or a text table.

pub mod grid;
pub mod report;

use std::collections::BTreeMap;
use std::fmt;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qforge::exact_arith::ExactScalar;
use qforge::forge::{
    binomial_family, conjecture_check, gauss_family, kummer_family, root_of_unity_family, sample_bindings, solution_families, telescoped_check,
    verify_identity_in, Constraint, IdentityRecord, Mode, Pattern, Registry, DEFAULT_SEED,
};
use qforge::qseries::Bindings;
use qforge::relations::{qr_derive, qr_lookup, ParamFamily, ShiftVector, DEFAULT_DEGREE_BUDGET};
use qforge::symmetry::{canonical_representative, orbit_enumerate};
use qforge::Error;

use grid::{grid_cells, parse_bindings, parse_grid, parse_scalar_list};
use report::{CaseRecord, ReportDocument, Status};

/// A request that cannot be run as given; exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(name = "qforge", version, about = "Three-term relations for 2phi1 series and the identities they produce")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
    /// Seed for sampled points.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Numeric,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a registered identity over a grid of integer symbols and q values.
    Verify(VerifyArgs),
    /// Derive Q and R for a shift vector.
    Derive(DeriveArgs),
    /// Canonical representative of a shift under the symmetry group.
    Normalize(NormalizeArgs),
    /// Check the telescoped equation for N = 1..n_max at a point.
    Pipeline(PipelineArgs),
    /// Run the checks predicted for a shift pattern.
    Conjecture(ConjectureArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub identity: String,
    /// Integer ranges, e.g. `M=0..6,N=0..6`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Comma-separated values of q.
    #[arg(long)]
    pub q: Option<String>,
    /// Fixed scalar bindings, e.g. `a=2,b=zeta3`.
    #[arg(long)]
    pub bind: Option<String>,
    /// Defaults to the identity's registered mode.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Random points per grid cell when scalar symbols are left unbound.
    #[arg(long, default_value_t = 25)]
    pub samples: usize,
    /// Identity registry file; the built-in registry otherwise.
    #[arg(long)]
    pub registry: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct DeriveArgs {
    /// Shift as `k,l,m,n`.
    #[arg(long, allow_hyphen_values = true)]
    pub shift: ShiftVector,
    #[arg(long, default_value_t = DEFAULT_DEGREE_BUDGET)]
    pub degree_budget: u32,
    /// Compare with the tabulated pair (shift must be tabulated).
    #[arg(long)]
    pub check_against_table: bool,
}

#[derive(Args, Debug)]
pub struct NormalizeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub shift: ShiftVector,
    /// Also list the orbit.
    #[arg(long)]
    pub orbit: bool,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub shift: ShiftVector,
    /// binomial, gauss, kummer, root-of-unity, or auto (first family known
    /// for the shift).
    #[arg(long, default_value = "auto")]
    pub family: String,
    #[arg(long, default_value_t = 5)]
    pub n_max: u32,
    /// Values of the family's free symbols and q, e.g. `a=3,b=5,c=1/7,q=1/2`.
    #[arg(long)]
    pub point: String,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct ConjectureArgs {
    /// even-binomial, balanced, kummer or root-of-unity.
    #[arg(long)]
    pub pattern: Pattern,
    #[arg(long, allow_hyphen_values = true)]
    pub shift: ShiftVector,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

/// `k,l,m,n`, the command-line form of a shift.
pub fn shift_text(s: ShiftVector) -> String {
    format!("{},{},{},{}", s.k, s.l, s.m, s.n)
}

/// Applies `QFORGE_PRECISION` (bits) when set.
pub fn apply_precision_env() -> Result<(), UsageError> {
    if let Ok(v) = std::env::var("QFORGE_PRECISION") {
        let bits: usize = v.trim().parse().map_err(|_| UsageError(format!("QFORGE_PRECISION must be a bit count, got `{v}`")))?;
        qforge::exact_arith::set_default_precision(bits);
    }
    Ok(())
}

/// Runs one command; `command` is echoed into the report.
pub fn execute(cli: &Cli, command: String) -> Result<ReportDocument, UsageError> {
    let records = match &cli.command {
        Command::Verify(a) => verify(a, cli.seed)?,
        Command::Derive(a) => derive(a)?,
        Command::Normalize(a) => normalize(a)?,
        Command::Pipeline(a) => pipeline(a)?,
        Command::Conjecture(a) => conjecture(a, cli.seed)?,
    };
    Ok(ReportDocument::new(command, cli.seed, records))
}

fn check_tol(tol: f64) -> Result<(), UsageError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(UsageError(format!("--tol must be positive, got {tol}")))
    }
}

fn load_registry(path: &Option<std::path::PathBuf>) -> Result<Option<Registry>, UsageError> {
    let Some(p) = path else { return Ok(None) };
    let text = std::fs::read_to_string(p).map_err(|e| UsageError(format!("cannot read registry {}: {e}", p.display())))?;
    Registry::from_json(&text).map(Some).map_err(|e| UsageError(format!("invalid registry {}: {e}", p.display())))
}

fn case_of(b: &Bindings<ExactScalar>) -> BTreeMap<String, String> {
    let mut case: BTreeMap<String, String> = b.ints.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
    case.extend(b.scalars.iter().map(|(k, v)| (k.clone(), v.to_string())));
    case
}

/// Scalar symbols that must come from somewhere: not bound on the command
/// line and not a defaulted root of unity.
fn unbound_scalars(rec: &IdentityRecord, fixed: &BTreeMap<String, ExactScalar>) -> Vec<String> {
    let roots: Vec<&String> = rec
        .constraints
        .iter()
        .filter_map(|c| match c {
            Constraint::PrimitiveRoot { symbol, .. } => Some(symbol),
            _ => None,
        })
        .collect();
    rec.scalar_symbols.iter().filter(|s| !fixed.contains_key(*s) && !roots.contains(s)).cloned().collect()
}

fn cell_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn verify(a: &VerifyArgs, seed: u64) -> Result<Vec<CaseRecord>, UsageError> {
    check_tol(a.tol)?;
    let owned = load_registry(&a.registry)?;
    let registry = owned.as_ref().unwrap_or_else(|| Registry::builtin());
    let rec = registry.get(&a.identity).map_err(|e| UsageError(e.to_string()))?;
    let mode = match a.mode {
        Some(ModeArg::Exact) => Mode::ExactTerminating,
        Some(ModeArg::Numeric) => Mode::Numeric,
        None => rec.mode,
    };
    let grid = match &a.grid {
        Some(g) => parse_grid(g)?,
        None => Vec::new(),
    };
    if let Some((name, _, _)) = grid.iter().find(|(n, _, _)| !rec.int_symbols.contains(n)) {
        return Err(UsageError(format!("`{name}` is not an integer symbol of {} (has {:?})", rec.id, rec.int_symbols)));
    }
    let fixed = match &a.bind {
        Some(b) => parse_bindings(b)?,
        None => BTreeMap::new(),
    };
    let qs = match &a.q {
        Some(q) => parse_scalar_list(q)?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let mut bound = fixed.clone();
    if a.q.is_some() {
        bound.insert("q".into(), ExactScalar::one());
    }
    let sampled = !unbound_scalars(rec, &bound).is_empty();
    let repeats = if sampled { a.samples } else { 1 };
    if repeats == 0 {
        return Err(UsageError("--samples must be at least 1".into()));
    }

    let mut jobs = Vec::new();
    for cell in grid_cells(&grid) {
        for q in &qs {
            for _ in 0..repeats {
                jobs.push((cell.clone(), q.clone()));
            }
        }
    }
    let tol = if mode == Mode::ExactTerminating { 0.0 } else { a.tol };
    Ok(jobs
        .into_par_iter()
        .enumerate()
        .map(|(index, (ints, q))| {
            let mut b = if sampled {
                match sample_bindings(rec, &mut cell_rng(seed, index), &ints) {
                    Ok(b) => b,
                    Err(e) => return CaseRecord::error(index, ints.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(), e.to_string()),
                }
            } else {
                Bindings { ints, scalars: BTreeMap::new() }
            };
            b.scalars.extend(fixed.clone());
            if let Some(q) = q {
                b.scalars.insert("q".into(), q);
            }
            let case = case_of(&b);
            match verify_identity_in(rec, &b, tol, mode) {
                Ok(r) => CaseRecord {
                    lhs: Some(r.lhs),
                    rhs: Some(r.rhs),
                    abs_err: Some(r.abs_err),
                    terms_used: Some(r.terms_used),
                    ..CaseRecord::new(index, case, Status::from_passed(r.passed))
                },
                Err(e) => CaseRecord::error(index, case, e.to_string()),
            }
        })
        .collect())
}

fn shift_case(s: ShiftVector) -> BTreeMap<String, String> {
    BTreeMap::from([("shift".to_string(), shift_text(s))])
}

fn derive(a: &DeriveArgs) -> Result<Vec<CaseRecord>, UsageError> {
    let table = if a.check_against_table {
        match qr_lookup(a.shift) {
            Ok(t) => Some(t),
            Err(Error::NotInTable(_)) => return Err(UsageError(format!("{} has no tabulated relation", shift_text(a.shift)))),
            Err(e) => return Err(UsageError(e.to_string())),
        }
    } else {
        None
    };
    let case = shift_case(a.shift);
    let rel = match qr_derive(a.shift, a.degree_budget) {
        Ok(r) => r,
        Err(e) => return Ok(vec![CaseRecord::error(0, case, e.to_string())]),
    };
    let mut rec = CaseRecord::new(0, case, Status::Pass);
    rec.values.insert("Q".into(), rel.q.to_string());
    rec.values.insert("R".into(), rel.r.to_string());
    if let Some(t) = table {
        let same = |f: &qforge::relations::RationalFunction, g: &qforge::relations::RationalFunction| f.num().mul(g.den()) == g.num().mul(f.den());
        let agrees = same(&t.q, &rel.q) && same(&t.r, &rel.r);
        rec.status = Status::from_passed(agrees);
        rec.note = Some(if agrees { "matches the tabulated pair".into() } else { format!("tabulated Q = {}, R = {}", t.q, t.r) });
    }
    Ok(vec![rec])
}

fn normalize(a: &NormalizeArgs) -> Result<Vec<CaseRecord>, UsageError> {
    let case = shift_case(a.shift);
    let (rep, word) = match canonical_representative(a.shift) {
        Ok(r) => r,
        Err(e) => return Ok(vec![CaseRecord::error(0, case, e.to_string())]),
    };
    let orbit = orbit_enumerate(a.shift);
    let mut rec = CaseRecord::new(0, case, Status::Pass);
    rec.values.insert("representative".into(), shift_text(rep));
    rec.values.insert("word".into(), word.to_string());
    rec.values.insert("orbit_size".into(), orbit.len().to_string());
    if a.orbit {
        rec.values.insert("orbit".into(), orbit.iter().map(|s| format!("({})", shift_text(*s))).collect::<Vec<_>>().join(" "));
    }
    Ok(vec![rec])
}

fn family_by_name(name: &str, shift: ShiftVector) -> Result<ParamFamily, UsageError> {
    match name {
        "binomial" => Ok(binomial_family()),
        "gauss" => Ok(gauss_family()),
        "kummer" => Ok(kummer_family()),
        "root-of-unity" if shift.l >= 1 => Ok(root_of_unity_family(shift.l as u32)),
        "auto" => solution_families(shift).into_iter().next().ok_or_else(|| UsageError(format!("no known family for {}", shift_text(shift)))),
        _ => Err(UsageError(format!("unknown family `{name}`"))),
    }
}

fn pipeline(a: &PipelineArgs) -> Result<Vec<CaseRecord>, UsageError> {
    check_tol(a.tol)?;
    let fam = family_by_name(&a.family, a.shift)?;
    let point = parse_bindings(&a.point)?;
    let mut base = shift_case(a.shift);
    base.insert("family".into(), fam.to_string());
    base.extend(point.iter().map(|(k, v)| (k.clone(), v.to_string())));
    let run = match telescoped_check(a.shift, &fam, a.n_max, &point, a.tol) {
        Ok(r) => r,
        Err(e) => return Ok(vec![CaseRecord::error(0, base, e.to_string())]),
    };
    Ok(run
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut case = base.clone();
            case.insert("N".into(), s.n.to_string());
            let mut rec = CaseRecord::new(i, case, Status::from_passed(s.passed));
            rec.lhs = Some(s.lhs.clone());
            rec.rhs = Some(s.telescoped.clone());
            rec.abs_err = Some(s.residual);
            rec.values.insert("product".into(), s.product.clone());
            rec.values.insert("exact".into(), s.exact.to_string());
            if run.trivial {
                rec.note = Some("trivial: the series equals 1".into());
            }
            rec
        })
        .collect())
}

fn conjecture(a: &ConjectureArgs, seed: u64) -> Result<Vec<CaseRecord>, UsageError> {
    if !a.pattern.matches(a.shift) {
        return Err(UsageError(format!("{} does not have the shape of pattern {}", shift_text(a.shift), a.pattern)));
    }
    let mut base = shift_case(a.shift);
    base.insert("pattern".into(), a.pattern.to_string());
    let report = match conjecture_check(a.pattern, a.shift, a.trials, seed) {
        Ok(r) => r,
        Err(e) => return Ok(vec![CaseRecord::error(0, base, e.to_string())]),
    };
    base.insert("family".into(), report.family.clone());
    Ok(report
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut case = base.clone();
            case.insert("check".into(), s.name.clone());
            CaseRecord { note: Some(s.detail.clone()), ..CaseRecord::new(i, case, Status::from_passed(s.passed)) }
        })
        .collect())
}
