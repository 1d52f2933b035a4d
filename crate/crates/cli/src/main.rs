//! `nahm`: catalog queries, series expansion, identity verification,
//! central-charge checks and duality for Dynkin-pair Nahm sums.

mod cache;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nahm_core::analysis::{saddle_central_charge, saddle_growth, solve_nahm_equation, DEFAULT_TOL};
use nahm_core::rational::{fmt_rational, parse_rational};
use nahm_core::registry::{export_registry, import_registry, select};
use nahm_core::{
    build_quadruple, cartan_data, central_charge, dual_quadruple, load_registry,
    permutation_equivalent, run_suite, CharacterSpec, DiagramKind, Error, LatticeConstraint,
    NahmQuadruple, QSeries, Rational, RationalMatrix,
};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "nahm", version, about = "Nahm sums of Dynkin diagram pairs as exact q-series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cartan matrix, root lengths and Coxeter number.
    Catalog {
        /// Diagram kinds such as A3, B3, T2 (default: a standard list).
        kinds: Vec<String>,
    },
    /// Expand a Nahm sum or a character below q^order.
    Expand(ExpandArgs),
    /// Check registry identities to a truncation order.
    Verify(VerifyArgs),
    /// Dilogarithm central charge against the closed formula.
    Ceff(QuadSource),
    /// The dual quadruple.
    Dual(QuadSource),
}

#[derive(Args, Debug)]
struct QuadSource {
    /// Dynkin pair, e.g. T1,E8.
    #[arg(long, value_parser = parse_pair)]
    pair: Option<(DiagramKind, DiagramKind)>,
    /// Explicit quadruple as JSON ({"A":[[[n,d],..],..],"B":..,"C":..,"D":..}).
    #[arg(long, conflicts_with = "pair")]
    quadruple: Option<String>,
    /// Explicit A as JSON rows of [num,den] pairs (ceff only).
    #[arg(long, conflicts_with_all = ["pair", "quadruple"])]
    matrix: Option<String>,
    /// Diagonal D for --matrix, comma separated (default all ones).
    #[arg(long, value_delimiter = ',', requires = "matrix")]
    d: Vec<u64>,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[command(flatten)]
    quad: QuadSource,
    /// Character spec as JSON, e.g. {"family":"u1","k":3,"m":0}.
    #[arg(long = "char", conflicts_with_all = ["pair", "quadruple", "matrix"])]
    character: Option<String>,
    /// Override B, comma separated rationals.
    #[arg(long, value_delimiter = ',', value_parser = parse_rat, allow_hyphen_values = true)]
    b: Option<Vec<Rational>>,
    /// Override C.
    #[arg(long, value_parser = parse_rat, allow_hyphen_values = true)]
    c: Option<Rational>,
    /// Congruence constraint WEIGHTS:MODULUS:RESIDUE, e.g. 1,0,1:2:0.
    #[arg(long, value_parser = parse_constraint)]
    constraint: Option<LatticeConstraint>,
    /// Drop the overall power of q: C = 0 for Nahm sums, leading power for characters.
    #[arg(long)]
    no_prefactor: bool,
    /// Truncation order (exponents below this are kept).
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(i64).range(1..))]
    order: i64,
    /// Cache directory (also NAHM_CACHE_DIR).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Record id (repeatable).
    #[arg(long)]
    id: Vec<String>,
    /// Source tag, status or record tag (repeatable).
    #[arg(long)]
    tag: Vec<String>,
    /// Override every record's default order.
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    order: Option<i64>,
    /// Worker threads.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    /// Read records from this file instead of the built-in table.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// List the selected records without checking them.
    #[arg(long)]
    list: bool,
    /// Write the selected records as JSON and exit.
    #[arg(long)]
    export: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(DiagramKind, DiagramKind), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    Ok((x.parse().map_err(|e: Error| e.to_string())?, y.parse().map_err(|e: Error| e.to_string())?))
}

fn parse_rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("not a rational: {s:?}"))
}

fn parse_constraint(s: &str) -> Result<LatticeConstraint, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [w, m, r] = parts[..] else {
        return Err(format!("expected WEIGHTS:MODULUS:RESIDUE, got {s:?}"));
    };
    let weights = w
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let m = m.trim().parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
    let r = r.trim().parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
    LatticeConstraint::new(weights, m, r).map_err(|e| e.to_string())
}

/// Failure of a subcommand: a computation error or a failed verification.
enum Failure {
    Compute(Error),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

fn io_err(e: std::io::Error) -> Failure {
    Failure::Compute(Error::InvalidArgument(e.to_string()))
}

fn json_err(e: serde_json::Error) -> Failure {
    Failure::Compute(Error::Parse(e.to_string()))
}

const DEFAULT_CATALOG: &[&str] = &[
    "A1", "A2", "A3", "A4", "B3", "B4", "C2", "C3", "C4", "D4", "D5", "E6", "E7", "E8", "F4", "G2",
    "T1", "T2", "T3", "T4",
];

fn catalog(kinds: &[String], format: Format) -> Result<String, Failure> {
    let names: Vec<String> = if kinds.is_empty() {
        DEFAULT_CATALOG.iter().map(|s| s.to_string()).collect()
    } else {
        kinds.to_vec()
    };
    let data = names
        .iter()
        .map(|k| cartan_data(k.parse()?))
        .collect::<nahm_core::Result<Vec<_>>>()?;
    if format == Format::Json {
        return serde_json::to_string_pretty(&data).map_err(json_err);
    }
    let mut out = String::new();
    for c in &data {
        let alias = c.aliased_from.map(|a| format!(" (from {a})")).unwrap_or_default();
        let _ = writeln!(out, "{}{alias}: rank {}, h = {}, D = {:?}", c.kind, c.rank(), c.coxeter, c.dvec);
        for row in &c.cartan {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
            let _ = writeln!(out, "  {}", cells.join(""));
        }
    }
    Ok(out)
}

fn quadruple_from(src: &QuadSource) -> Result<Option<NahmQuadruple>, Failure> {
    if let Some((x, y)) = src.pair {
        return Ok(Some(build_quadruple(x, y)?));
    }
    if let Some(text) = &src.quadruple {
        let q: NahmQuadruple = serde_json::from_str(text).map_err(json_err)?;
        q.validate()?;
        return Ok(Some(q));
    }
    Ok(None)
}

fn series_text(s: &QSeries) -> String {
    let mut out = format!(
        "# below q^{}, exponent step 1/{}\n",
        fmt_rational(&s.order()),
        s.grain()
    );
    for (e, c) in s.terms() {
        let _ = writeln!(out, "{} {c}", fmt_rational(&e));
    }
    out
}

fn expand(args: &ExpandArgs, format: Format) -> Result<String, Failure> {
    let order = Rational::from_integer(args.order.into());
    let series = if let Some(text) = &args.character {
        let spec: CharacterSpec = serde_json::from_str(text).map_err(json_err)?;
        spec.validate()?;
        let s = spec.expand(&order)?;
        match s.leading_exponent() {
            Some(lead) if args.no_prefactor && lead != Rational::from_integer(0.into()) => {
                spec.expand(&(&order + &lead))?.shift(&-lead).truncate(&order)
            }
            _ => s,
        }
    } else {
        let Some(mut q) = quadruple_from(&args.quad)? else {
            return Err(Error::InvalidArgument("expand needs --pair, --quadruple or --char".into()).into());
        };
        if let Some(b) = &args.b {
            q = q.with_b(b.clone())?;
        }
        if let Some(c) = &args.c {
            q = q.with_c(c.clone());
        }
        if args.no_prefactor {
            q = q.with_c(Rational::from_integer(0.into()));
        }
        let dir = if args.no_cache { None } else { cache::resolve_dir(args.cache_dir.clone()) };
        cache::nahm_sum_cached(dir.as_deref(), &q, args.constraint.as_ref(), &order)?
    };
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&series.to_record()).map_err(json_err)? + "\n",
        Format::Text => series_text(&series),
    })
}

fn verify(args: &VerifyArgs, format: Format) -> Result<(String, bool), Failure> {
    let records = match &args.registry {
        Some(path) => import_registry(&std::fs::read_to_string(path).map_err(io_err)?)?,
        None => load_registry(),
    };
    let filter: Vec<String> = args.id.iter().chain(&args.tag).cloned().collect();
    if let Some(path) = &args.export {
        let chosen: Vec<_> = select(&records, &filter).into_iter().cloned().collect();
        std::fs::write(path, export_registry(&chosen)? + "\n").map_err(io_err)?;
        return Ok((format!("wrote {} records to {}\n", chosen.len(), path.display()), true));
    }
    if args.list {
        let mut out = String::new();
        for r in select(&records, &filter) {
            let _ = writeln!(out, "{:<20} {:<12} {:>4}  {}", r.id, r.status.as_str(), r.default_order, r.source.tag);
        }
        return Ok((out, true));
    }
    let jobs = args.jobs.map(|j| j as usize).unwrap_or_else(|| {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    });
    let reports = run_suite(&records, &filter, args.order, jobs)?;
    let ok = reports.iter().all(|r| !r.is_failure());
    if format == Format::Json {
        let body = json!({ "passed": ok, "reports": reports });
        return Ok((serde_json::to_string_pretty(&body).map_err(json_err)? + "\n", ok));
    }
    let mut out = String::new();
    let (mut failed, mut provisional) = (0, 0);
    for r in &reports {
        let word = match (r.equal, r.status) {
            (true, nahm_core::registry::Status::Conjectural) => "conjecture-consistent",
            (true, _) => "ok",
            (false, nahm_core::registry::Status::Provisional) => {
                provisional += 1;
                "mismatch (provisional)"
            }
            (false, _) => {
                failed += 1;
                "FAIL"
            }
        };
        let _ = write!(out, "{:<20} order {:>4}  {word}", r.id, r.order);
        if let Some(m) = &r.first_mismatch {
            let _ = write!(out, " at q^{}", fmt_rational(m));
        }
        if let Some(e) = &r.error {
            let _ = write!(out, ": {e}");
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "{} checked, {failed} failed, {provisional} provisional mismatches",
        reports.len()
    );
    Ok((out, ok))
}

fn ceff(src: &QuadSource, format: Format) -> Result<String, Failure> {
    let (a, d) = if let Some(text) = &src.matrix {
        let a: RationalMatrix = serde_json::from_str(text).map_err(json_err)?;
        let d = if src.d.is_empty() { vec![1; a.rows()] } else { src.d.clone() };
        (a, d)
    } else {
        let Some(q) = quadruple_from(src)? else {
            return Err(Error::InvalidArgument("ceff needs --pair, --quadruple or --matrix".into()).into());
        };
        (q.a, q.d)
    };
    let sol = solve_nahm_equation(&a.transpose(), DEFAULT_TOL)?;
    let saddle = saddle_central_charge(&a, &d)?;
    let growth = saddle_growth(&a, &d)?;
    let formula = src.pair.map(|(x, y)| central_charge(x, y)).transpose()?;
    let formula_f = formula.as_ref().map(nahm_core::rational::to_f64);
    if format == Format::Json {
        let body = json!({
            "x": sol.x,
            "residual": sol.residual,
            "saddle": saddle,
            "growth": growth,
            "formula": formula.as_ref().map(fmt_rational),
            "diff": formula_f.map(|f| (saddle - f).abs()),
        });
        return Ok(serde_json::to_string_pretty(&body).map_err(json_err)? + "\n");
    }
    let mut out = String::new();
    let xs: Vec<String> = sol.x.iter().map(|x| format!("{x:.12}")).collect();
    let _ = writeln!(out, "x        {}", xs.join(" "));
    let _ = writeln!(out, "saddle   {saddle:.12}");
    let _ = writeln!(out, "growth   {growth:.12}");
    if let (Some(f), Some(ff)) = (&formula, formula_f) {
        let _ = writeln!(out, "formula  {} = {ff:.12}", fmt_rational(f));
        let _ = writeln!(out, "diff     {:.3e}", (saddle - ff).abs());
    }
    Ok(out)
}

fn dual(src: &QuadSource, format: Format) -> Result<String, Failure> {
    let Some(q) = quadruple_from(src)? else {
        return Err(Error::InvalidArgument("dual needs --pair or --quadruple".into()).into());
    };
    let dq = dual_quadruple(&q)?;
    let swapped = match src.pair {
        Some((x, y)) => Some(permutation_equivalent(&dq.a, &build_quadruple(y, x)?.a)),
        None => None,
    };
    if format == Format::Json {
        let body = json!({ "dual": dq, "matches_swapped_pair": swapped });
        return Ok(serde_json::to_string_pretty(&body).map_err(json_err)? + "\n");
    }
    let b: Vec<String> = dq.b.iter().map(fmt_rational).collect();
    let mut out = format!("A =\n{}\nB = ({})\nC = {}\nD = {:?}\n", dq.a, b.join(", "), fmt_rational(&dq.c), dq.d);
    if let (Some(m), Some((x, y))) = (swapped, src.pair) {
        let _ = writeln!(out, "A equals A({y},{x}) up to permutation: {}", if m { "yes" } else { "no" });
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    match &cli.command {
        Command::Catalog { kinds } => catalog(kinds, cli.format).map(|s| (s, true)),
        Command::Expand(a) => expand(a, cli.format).map(|s| (s, true)),
        Command::Verify(a) => verify(a, cli.format),
        Command::Ceff(a) => ceff(a, cli.format).map(|s| (s, true)),
        Command::Dual(a) => dual(a, cli.format).map(|s| (s, true)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(text, ok)| {
        match &cli.output {
            Some(p) => std::fs::write(p, &text).map_err(io_err)?,
            None => std::io::stdout().write_all(text.as_bytes()).map_err(io_err)?,
        }
        if ok { Ok(()) } else { Err(Failure::Mismatch) }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Compute(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
    }
}
