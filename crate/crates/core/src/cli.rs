//! Command-line front end. Exit codes: 0 ok, 1 usage/parse/spec errors,
//! 2 a small-norm certificate above the gap tolerance, 3 an inconsistent
//! norm bracket (lower above upper).
//!
//! Resolved settings come from flags, then the config file, then defaults,
//! and are echoed under `"config"` in every JSON report.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{Automorphism, GroupSpec};
use crate::multipliers::{apply, apply_oracle, MultiplierParams, Symbol, SymbolDoc};
use crate::norms::{grand_norm, lp_norm, small_norm, GrandParams, GridSpec, SmallParams, SolverOptions};
use crate::opnorm::{bound_upper, estimate_lower, EstimateOptions, NormBound};
use crate::spectral::GFunction;
use crate::verify::{self, check_ids, check_kind, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "grandsmall", version, about = "Grand/small Lebesgue norms and bilinear multipliers on finite abelian groups")]
struct Cli {
    /// JSON or TOML config file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Library version, check ids and (with --group) facts about a group.
    Info {
        #[arg(long)]
        group: Option<String>,
    },
    /// Lebesgue, grand or small norm of a function file.
    Norm {
        #[arg(value_enum)]
        kind: NormKind,
        /// Function file: `[[re, im], ...]` or `{"group": .., "values": [...]}`.
        input: PathBuf,
        /// Exponent of the space: q for lp, p for grand, p' for small.
        #[arg(long)]
        p: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Writes `B_m(f, g)` as a function file.
    Apply {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(long = "f")]
        f: PathBuf,
        #[arg(long = "g")]
        g: PathBuf,
        /// Literal triple sum instead of the fast path.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Lower and upper bounds on the multiplier norm.
    Opnorm {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        exps: ExponentArgs,
        #[arg(long)]
        restarts: Option<usize>,
        /// Skip the lower estimate; fails when no bound rule applies.
        #[arg(long)]
        upper_only: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs the selected checks; `--all` selects every id.
    Verify {
        ids: Vec<String>,
        #[arg(long)]
        all: bool,
        /// Comma separated, e.g. `Z8,Z4xZ4`.
        #[arg(long, value_delimiter = ',')]
        groups: Option<Vec<String>>,
        /// Number of seeds, starting at --seed.
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        jsonl: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        exps: ExponentArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum NormKind {
    Lp,
    Grand,
    Small,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Group for bare value arrays; defaults to `Z<len>`.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    grid_count: Option<usize>,
    #[arg(long)]
    min_fraction: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Iteration budget (solver steps for norms, alternating rounds for opnorm).
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug, Default)]
struct ExponentArgs {
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    p3: Option<f64>,
}

#[derive(Args, Debug)]
struct SymbolArgs {
    /// Symbol file (`{spec, structure, values?}`).
    #[arg(long, conflicts_with = "constant")]
    symbol: Option<PathBuf>,
    /// Constant symbol `a` or `re,im`; needs a group from the inputs or --group.
    #[arg(long, allow_hyphen_values = true)]
    constant: Option<String>,
}

/// Config file contents. Every field is optional; `verify` holds suite settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub group: Option<String>,
    pub p: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub p3: Option<f64>,
    pub theta: Option<f64>,
    pub grid_count: Option<usize>,
    pub min_fraction: Option<f64>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub restarts: Option<usize>,
    pub tolerance: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub verify: Option<SuiteConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let toml_ext = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        if toml_ext {
            toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        } else {
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        }
    }
}

/// Settings after precedence is applied.
#[derive(Debug, Clone, Serialize)]
struct Resolved {
    group: Option<String>,
    theta: f64,
    grid: GridSpec,
    seed: u64,
    budget: Option<usize>,
    tolerance: Option<f64>,
    output: Option<PathBuf>,
    format: Format,
}

fn resolve(c: &CommonArgs, file: &RunConfig) -> Resolved {
    let d = GridSpec::default();
    Resolved {
        group: c.group.clone().or_else(|| file.group.clone()),
        theta: c.theta.or(file.theta).unwrap_or(1.0),
        grid: GridSpec {
            count: c.grid_count.or(file.grid_count).unwrap_or(d.count),
            min_fraction: c.min_fraction.or(file.min_fraction).unwrap_or(d.min_fraction),
        },
        seed: c.seed.or(file.seed).unwrap_or(0),
        budget: c.budget.or(file.budget),
        tolerance: c.tolerance.or(file.tolerance),
        output: c.output.clone().or_else(|| file.output.clone()),
        format: c.format.or(file.format).unwrap_or(Format::Json),
    }
}

fn exponents(e: &ExponentArgs, file: &RunConfig, theta: f64, grid: GridSpec) -> Result<MultiplierParams> {
    let ex = MultiplierParams::example1(theta, grid);
    MultiplierParams::new(
        e.p1.or(file.p1).unwrap_or(ex.p1),
        e.p2.or(file.p2).unwrap_or(ex.p2),
        e.p3.or(file.p3).unwrap_or(ex.p3),
        theta,
        grid,
    )
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FunctionFile {
    Bare(Vec<Entry>),
    Tagged { group: GroupSpec, values: Vec<Entry> },
}

#[derive(Serialize)]
struct FunctionOut<'a> {
    group: String,
    values: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a Resolved>,
}

/// Reads a function file; `group` is used for bare arrays and checked against tagged ones.
pub fn read_function(path: &Path, group: Option<&GroupSpec>) -> Result<GFunction> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let doc: FunctionFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let to_c = |v: Vec<Entry>| -> Vec<Complex64> {
        v.into_iter()
            .map(|e| match e {
                Entry::Pair([re, im]) => Complex64::new(re, im),
                Entry::Real(re) => Complex64::new(re, 0.0),
            })
            .collect()
    };
    match doc {
        FunctionFile::Bare(v) => {
            let spec = match group {
                Some(g) => g.clone(),
                None => GroupSpec::cyclic(v.len())?,
            };
            GFunction::new(&spec, to_c(v))
        }
        FunctionFile::Tagged { group: g, values } => {
            if let Some(want) = group {
                if *want != g {
                    return Err(Error::SpecMismatch(want.to_string(), g.to_string()));
                }
            }
            GFunction::new(&g, to_c(values))
        }
    }
}

fn parse_group(s: &Option<String>) -> Result<Option<GroupSpec>> {
    s.as_deref().map(str::parse).transpose()
}

fn parse_exponent(s: &str) -> Result<f64> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t.parse().map_err(|_| Error::Parse(format!("bad exponent '{s}'"))),
    }
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad complex number '{s}'"));
    let mut it = s.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad()));
    let re = it.next().ok_or_else(bad)??;
    let im = it.next().transpose()?.unwrap_or(0.0);
    if it.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn load_symbol(args: &SymbolArgs, group: Option<&GroupSpec>) -> Result<Symbol> {
    match (&args.symbol, &args.constant) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let doc: SymbolDoc =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let m = doc.to_symbol()?;
            if let Some(g) = group {
                if g != m.spec() {
                    return Err(Error::SpecMismatch(g.to_string(), m.spec().to_string()));
                }
            }
            Ok(m)
        }
        (None, Some(a)) => {
            let spec = group.ok_or_else(|| Error::InvalidParameter("--constant needs a group".into()))?;
            Ok(Symbol::constant(spec, parse_complex(a)?))
        }
        (None, None) => Err(Error::InvalidParameter("give --symbol FILE or --constant A".into())),
    }
}

fn emit(report: &serde_json::Value, output: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))?;
    match output {
        Some(p) => fs::write(p, text + "\n").map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => writeln!(out, "{text}").map_err(|e| Error::Parse(e.to_string())),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{e}");
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match cli.cmd {
        Command::Info { group } => info(group.or(file.group.clone()), out),
        Command::Norm { kind, input, p, common } => norm(kind, &input, p, &common, &file, out),
        Command::Apply { symbol, f, g, oracle, common } => cmd_apply(&symbol, &f, &g, oracle, &common, &file, out),
        Command::Opnorm { symbol, exps, restarts, upper_only, common } => {
            opnorm(&symbol, &exps, restarts, upper_only, &common, &file, out, err)
        }
        Command::Verify { ids, all, groups, seeds, trials, jobs, jsonl, csv, timing, exps, common } => {
            let flags = VerifyFlags { ids, all, groups, seeds, trials, jobs, jsonl, csv, timing };
            cmd_verify(flags, &exps, &common, &file, out, err)
        }
    }
}

fn info(group: Option<String>, out: &mut dyn Write) -> Result<i32> {
    let checks: Vec<_> = check_ids()
        .into_iter()
        .map(|id| json!({ "id": id, "kind": check_kind(id).expect("known") }))
        .collect();
    let mut report = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "record_schema": verify::SCHEMA_VERSION,
        "checks": checks,
    });
    if let Some(g) = group {
        let spec: GroupSpec = g.parse()?;
        let autos = Automorphism::all(&spec);
        report["group"] = json!({
            "spec": spec.to_string(),
            "factors": spec.factors(),
            "order": spec.order(),
            "automorphisms": autos.len(),
            "max_modulus_deviation": autos.iter().map(|a| (a.modulus() - 1.0).abs()).fold(0.0, f64::max),
        });
    }
    emit(&report, None, out)?;
    Ok(EXIT_OK)
}

fn norm(
    kind: NormKind,
    input: &Path,
    p: Option<String>,
    common: &CommonArgs,
    file: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let r = resolve(common, file);
    let group = parse_group(&r.group)?;
    let f = read_function(input, group.as_ref())?;
    let p = match p {
        Some(s) => parse_exponent(&s)?,
        None => file.p.unwrap_or(2.0),
    };
    let mut report = json!({ "kind": kind, "group": f.spec().to_string(), "p": p });
    let mut code = EXIT_OK;
    match kind {
        NormKind::Lp => report["value"] = json!(lp_norm(&f, p)?),
        NormKind::Grand => {
            let params = GrandParams::geometric(p, r.theta, r.grid)?;
            report["value"] = json!(grand_norm(&f, &params));
            report["grid"] = json!(params.grid());
        }
        NormKind::Small => {
            let params = SmallParams::geometric(p, r.theta, r.grid)?;
            let mut opts = SolverOptions::default();
            if let Some(b) = r.budget {
                opts.max_iter = b.max(1);
            }
            if let Some(t) = r.tolerance {
                opts.tol_rel = t;
            }
            let cert = small_norm(&f, &params, &opts);
            if !cert.converged {
                code = EXIT_FLAGGED;
            }
            report["value"] = json!(cert.value);
            report["certificate"] = serde_json::to_value(&cert).map_err(|e| Error::Parse(e.to_string()))?;
        }
    }
    report["config"] = serde_json::to_value(&r).map_err(|e| Error::Parse(e.to_string()))?;
    emit(&report, r.output.as_deref(), out)?;
    Ok(code)
}

fn cmd_apply(
    symbol: &SymbolArgs,
    f: &Path,
    g: &Path,
    oracle: bool,
    common: &CommonArgs,
    file: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32> {
    let r = resolve(common, file);
    let group = parse_group(&r.group)?;
    let f = read_function(f, group.as_ref())?;
    let g = read_function(g, group.as_ref())?;
    f.same_spec(&g)?;
    let m = load_symbol(symbol, Some(f.spec()))?;
    let b = if oracle { apply_oracle(&m, &f, &g)? } else { apply(&m, &f, &g)? };
    let doc = FunctionOut {
        group: b.spec().to_string(),
        values: b.values().iter().map(|z| [z.re, z.im]).collect(),
        config: None,
    };
    let text = serde_json::to_string(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    match &r.output {
        Some(p) => fs::write(p, text + "\n").map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?,
        None => writeln!(out, "{text}").map_err(|e| Error::Parse(e.to_string()))?,
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn opnorm(
    symbol: &SymbolArgs,
    exps: &ExponentArgs,
    restarts: Option<usize>,
    upper_only: bool,
    common: &CommonArgs,
    file: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let r = resolve(common, file);
    let group = parse_group(&r.group)?;
    let m = load_symbol(symbol, group.as_ref())?;
    let params = exponents(exps, file, r.theta, r.grid)?;
    let upper = bound_upper(&m, &params)?;
    if upper_only && upper.value.is_none() {
        let why = upper.diagnostic.clone().unwrap_or_default();
        writeln!(err, "error: --upper-only needs a structured symbol; {why}").map_err(|e| Error::Parse(e.to_string()))?;
        return Ok(EXIT_ERROR);
    }
    let opts = EstimateOptions {
        budget: r.budget.unwrap_or(EstimateOptions::default().budget),
        restarts: restarts.or(file.restarts).unwrap_or(EstimateOptions::default().restarts),
        seed: r.seed,
        solver: SolverOptions::default(),
    };
    let lower = if upper_only { None } else { Some(estimate_lower(&m, &params, &opts)?) };
    let bound = NormBound { lower, upper, params };
    let tol = r.tolerance.unwrap_or(1e-6);
    let mut report = serde_json::to_value(&bound).map_err(|e| Error::Parse(e.to_string()))?;
    report["estimate"] = serde_json::to_value(opts).map_err(|e| Error::Parse(e.to_string()))?;
    report["config"] = serde_json::to_value(&r).map_err(|e| Error::Parse(e.to_string()))?;
    emit(&report, r.output.as_deref(), out)?;
    Ok(if bound.inconsistent(tol) { EXIT_INCONSISTENT } else { EXIT_OK })
}

struct VerifyFlags {
    ids: Vec<String>,
    all: bool,
    groups: Option<Vec<String>>,
    seeds: Option<u64>,
    trials: Option<usize>,
    jobs: Option<usize>,
    jsonl: Option<PathBuf>,
    csv: Option<PathBuf>,
    timing: bool,
}

fn cmd_verify(
    v: VerifyFlags,
    exps: &ExponentArgs,
    common: &CommonArgs,
    file: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let r = resolve(common, file);
    let mut cfg = file.verify.clone().unwrap_or_default();
    if let Some(gs) = &v.groups {
        cfg.groups = gs.iter().map(|g| g.parse()).collect::<Result<_>>()?;
    } else if let Some(g) = parse_group(&r.group)? {
        cfg.groups = vec![g];
    }
    let params_given = [exps.p1, exps.p2, exps.p3, file.p1, file.p2, file.p3].iter().any(Option::is_some)
        || common.theta.is_some()
        || file.theta.is_some()
        || common.grid_count.is_some()
        || file.grid_count.is_some()
        || common.min_fraction.is_some()
        || file.min_fraction.is_some();
    if params_given {
        cfg.params = vec![exponents(exps, file, r.theta, r.grid)?];
    }
    let start = common.seed.or(file.seed);
    match (v.seeds, start) {
        (Some(n), s) => cfg.seeds = (s.unwrap_or(0)..s.unwrap_or(0) + n).collect(),
        (None, Some(s)) => cfg.seeds = vec![s],
        (None, None) => {}
    }
    if let Some(t) = v.trials {
        cfg.trials = t;
    }
    if let Some(t) = r.tolerance {
        cfg.tolerance = t;
    }
    if let Some(b) = r.budget {
        cfg.solver.max_iter = b.max(1);
    }
    if v.jobs.is_some() {
        cfg.jobs = v.jobs;
    }
    cfg.timing |= v.timing;

    let selection: Vec<String> =
        if v.all { check_ids().iter().map(|s| s.to_string()).collect() } else { v.ids.clone() };
    let records = verify::run_suite(&selection, &cfg)?;

    let (mut jsonl, mut csv) = (v.jsonl.clone(), v.csv.clone());
    if let Some(o) = &r.output {
        match r.format {
            Format::Json => jsonl = jsonl.or(Some(o.clone())),
            Format::Csv => csv = csv.or(Some(o.clone())),
        }
    }
    if let Some(p) = &jsonl {
        let f = fs::File::create(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
        verify::write_jsonl(&records, std::io::BufWriter::new(f)).map_err(|e| Error::Parse(e.to_string()))?;
    }
    if let Some(p) = &csv {
        let f = fs::File::create(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
        verify::write_csv(&records, f)?;
    }

    let count = |s| records.iter().filter(|r| r.status == s).count();
    let failed: Vec<_> = records
        .iter()
        .filter(|r| r.status == verify::Status::Fail)
        .map(|r| format!("{} {} seed {}: {}", r.check_id, r.group, r.seed, r.detail))
        .collect();
    for line in &failed {
        writeln!(err, "FAIL {line}").map_err(|e| Error::Parse(e.to_string()))?;
    }
    let report = json!({
        "selected": selection,
        "records": records.len(),
        "pass": count(verify::Status::Pass),
        "fail": count(verify::Status::Fail),
        "flagged": count(verify::Status::Flagged),
        "jsonl": jsonl,
        "csv": csv,
        "config": cfg,
    });
    emit(&report, None, out)?;
    Ok(if verify::all_passed(&records) { EXIT_OK } else { EXIT_ERROR })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("grandsmall").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn complex_flags() {
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex("1,-0.5").unwrap(), Complex64::new(1.0, -0.5));
        assert!(parse_complex("1,2,3").is_err());
        assert_eq!(parse_exponent("inf").unwrap(), f64::INFINITY);
    }

    #[test]
    fn info_and_usage_errors() {
        let (code, out, _) = run_str(&["info", "--group", "Z4xZ4"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"order\": 16") && out.contains("eq2.26-variant"));
        assert_eq!(run_str(&["info", "--group", "Q8"]).0, 1);
        assert_eq!(run_str(&["frobnicate"]).0, 1);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn config_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        fs::write(&cfg, "theta = 0.0\ngrid_count = 5\nseed = 7\n").unwrap();
        let file = RunConfig::load(&cfg).unwrap();
        let flags = CommonArgs { theta: Some(2.0), ..Default::default() };
        let r = resolve(&flags, &file);
        assert_eq!((r.theta, r.grid.count, r.seed), (2.0, 5, 7));
        let r = resolve(&CommonArgs::default(), &RunConfig::default());
        assert_eq!((r.theta, r.grid, r.seed), (1.0, GridSpec::default(), 0));
        fs::write(&cfg, "colour = 1\n").unwrap();
        assert!(RunConfig::load(&cfg).is_err());
    }
}
