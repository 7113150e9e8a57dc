use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use smartgame_core::closed_form::closed_form_equilibrium;
use smartgame_core::figures::figure;
use smartgame_core::oracle::{reconcile, stackelberg_solve, ReconciliationReport, SolveOptions};
use smartgame_core::poly::{poly_root, PolySpec};
use smartgame_core::statics::{proposition_suite, GridSpec, PropositionReport, SuiteVerdict};
use smartgame_core::{EquilibriumOutcome, ModelParams, Scenario};

use crate::config::{MethodChoice, RunConfig};
use crate::format::{fmt_g, write_ledger, write_outcomes, write_table};

#[derive(Debug, Parser)]
#[command(name = "smartgame", version, about = "Manufacturer/platform innovation game solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve each scenario once and print one CSV row per scenario and method.
    Solve(RunArgs),
    /// Solve along one parameter axis.
    Sweep(RunArgs),
    /// Data behind figure 3, 4 or 5.
    Figure {
        /// 3, 4 or 5
        #[arg(long)]
        id: u8,
        /// Output CSV path; stdout by default
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run proposition suites and print a report.
    Props {
        /// Comma-separated proposition ids (1..6).
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        id: Vec<u8>,
        /// Points per grid axis.
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Override the ε′ axis as start:stop.
        #[arg(long)]
        eps_range: Option<String>,
        /// Report path; stdout by default
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Real root of a polynomial given by ascending coefficients.
    Roots {
        /// Comma-separated coefficients, constant term first.
        #[arg(long, allow_hyphen_values = true)]
        coefficients: String,
        /// 1-based index among the ascending real roots.
        #[arg(long)]
        index: usize,
        /// Restrict to roots in lo:hi.
        #[arg(long)]
        bracket: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Comma-separated scenarios (un, rn, uo, ro); `un` by default.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Parameter assignment name=value; repeatable.
    #[arg(long = "set")]
    pub set: Vec<String>,
    /// Sweep axis name=start:stop:count.
    #[arg(long)]
    pub vary: Option<String>,
    /// closed, oracle or both.
    #[arg(long)]
    pub method: Option<String>,
    /// Key=value file; command-line flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path; stdout by default
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reconciliation ledger path when method is both.
    #[arg(long)]
    pub ledger: Option<PathBuf>,
}

/// Input the user must fix: exit status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct InvalidInput(pub String);

/// A proposition suite came back violated: exit status 1.
#[derive(Debug, thiserror::Error)]
#[error("proposition violated: {0}")]
pub struct Violation(pub String);

fn invalid<E: std::fmt::Display>(e: E) -> anyhow::Error {
    InvalidInput(e.to_string()).into()
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p).map_err(invalid)?,
            None => RunConfig::default(),
        };
        if let Some(s) = &self.scenario {
            cfg.apply("scenario", s).map_err(invalid)?;
        }
        for a in &self.set {
            let (k, v) = a
                .split_once('=')
                .ok_or_else(|| invalid(format!("--set expects name=value, got `{a}`")))?;
            cfg.apply(k, v).map_err(invalid)?;
        }
        if let Some(v) = &self.vary {
            cfg.apply("vary", v).map_err(invalid)?;
        }
        if let Some(m) = &self.method {
            cfg.apply("method", m).map_err(invalid)?;
        }
        Ok(cfg)
    }
}

/// Writes the whole buffer to `path` through a temporary file in the same
/// directory, or to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write {}", p.display()))?;
            tmp.write_all(bytes)?;
            tmp.persist(p).with_context(|| format!("cannot write {}", p.display()))?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn solve_point(
    scenarios: &[Scenario],
    params: &ModelParams,
    method: MethodChoice,
    opts: &SolveOptions,
) -> Result<(Vec<EquilibriumOutcome>, Vec<ReconciliationReport>)> {
    let mut rows = Vec::new();
    let mut ledger = Vec::new();
    for &sc in scenarios {
        let closed = match method {
            MethodChoice::Closed | MethodChoice::Both => Some(closed_form_equilibrium(sc, params).map_err(invalid)?),
            MethodChoice::Oracle => None,
        };
        let oracle = match method {
            MethodChoice::Oracle | MethodChoice::Both => Some(stackelberg_solve(sc, params, opts).map_err(invalid)?),
            MethodChoice::Closed => None,
        };
        if let (Some(c), Some(o)) = (&closed, &oracle) {
            ledger.push(reconcile(c, o)?);
        }
        rows.extend(closed);
        rows.extend(oracle);
    }
    Ok((rows, ledger))
}

fn ledger_path(args: &RunArgs) -> Option<PathBuf> {
    args.ledger
        .clone()
        .or_else(|| args.out.as_ref().map(|p| p.with_extension("ledger.csv")))
}

pub fn run_solve(args: &RunArgs, sweep: bool) -> Result<()> {
    let cfg = args.resolve()?;
    let base = cfg.params().map_err(invalid)?;
    let opts = SolveOptions::default();
    let points: Vec<ModelParams> = match (sweep, cfg.axis) {
        (true, Some(axis)) => axis
            .values()
            .into_iter()
            .map(|v| {
                let p = base.with(axis.name, v);
                p.validate()
                    .map_err(|e| invalid(format!("{} = {}: {e}", axis.name.as_str(), fmt_g(v))))?;
                Ok(p)
            })
            .collect::<Result<_>>()?,
        (true, None) => bail!(InvalidInput("sweep needs --vary name=start:stop:count".into())),
        (false, _) => vec![base],
    };
    let solved: Vec<_> = points
        .par_iter()
        .map(|p| solve_point(&cfg.scenarios, p, cfg.method, &opts))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut ledger = Vec::new();
    for (r, l) in solved {
        rows.extend(r);
        ledger.extend(l);
    }
    let mut csv = Vec::new();
    write_outcomes(&mut csv, &rows)?;
    let mut ledger_csv = Vec::new();
    if cfg.method == MethodChoice::Both {
        write_ledger(&mut ledger_csv, &ledger)?;
    }
    emit(args.out.as_deref(), &csv)?;
    if cfg.method == MethodChoice::Both {
        match ledger_path(args) {
            Some(p) => emit(Some(&p), &ledger_csv)?,
            None => std::io::stderr().write_all(&ledger_csv)?,
        }
    }
    Ok(())
}

pub fn figure_csv(id: u8) -> Result<Vec<u8>> {
    // Figure series are plotted, not certified.
    let data = figure(id, &SolveOptions::fast()).map_err(invalid)?;
    let header: Vec<&str> = data.columns.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = data.rows.iter().map(|r| r.iter().map(|v| fmt_g(*v)).collect()).collect();
    let mut out = Vec::new();
    write_table(&mut out, &header, &rows)?;
    Ok(out)
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| invalid(format!("expected lo:hi, got `{s}`")))?;
    let a: f64 = a.trim().parse().map_err(|_| invalid(format!("bad number `{a}`")))?;
    let b: f64 = b.trim().parse().map_err(|_| invalid(format!("bad number `{b}`")))?;
    if !(a < b) {
        bail!(InvalidInput(format!("empty range {s}")));
    }
    Ok((a, b))
}

pub fn render_report(r: &PropositionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "proposition {}: {}", r.id, r.verdict.as_str());
    let _ = writeln!(s, "  grid: {}", r.grid);
    for c in &r.claims {
        let _ = write!(
            s,
            "  [{}] {}{}: checked {}, passed {}, violations {}, unstable {}, failed {}, out of domain {}",
            c.evaluator.as_str(),
            c.name,
            if c.governing { "" } else { " (reported only)" },
            c.checked,
            c.passed,
            c.violations.len(),
            c.unstable.len(),
            c.failed.len(),
            c.out_of_domain,
        );
        if let Some(n) = c.closed_form_violations {
            let _ = write!(s, ", closed-form violations {n}");
        }
        s.push('\n');
        for v in c.violations.iter().take(5) {
            let coords: Vec<String> = v.coords.iter().map(|(k, x)| format!("{}={}", k.as_str(), fmt_g(*x))).collect();
            let _ = writeln!(s, "      at {}{}", coords.join(" "), v.note.map(|n| format!(" ({n})")).unwrap_or_default());
        }
    }
    for n in &r.notes {
        let _ = writeln!(s, "  note: {n}");
    }
    s
}

pub fn run_props(ids: &[u8], points: usize, eps_range: Option<&str>, out: Option<&Path>) -> Result<()> {
    if let Some(bad) = ids.iter().find(|i| !(1..=6).contains(*i)) {
        bail!(InvalidInput(format!("unknown proposition {bad} (expected 1..6)")));
    }
    let grid = GridSpec {
        points,
        epsilon_range: eps_range.map(parse_range).transpose()?,
        ..GridSpec::default()
    };
    let reports: Vec<PropositionReport> = ids
        .par_iter()
        .map(|id| proposition_suite(*id, &grid).map_err(invalid))
        .collect::<Result<_>>()?;
    let text: String = reports.iter().map(render_report).collect();
    emit(out, text.as_bytes())?;
    let violated: Vec<String> = reports
        .iter()
        .filter(|r| r.verdict == SuiteVerdict::Violated)
        .map(|r| r.id.to_string())
        .collect();
    if !violated.is_empty() {
        bail!(Violation(violated.join(",")));
    }
    Ok(())
}

pub fn run_roots(coefficients: &str, index: usize, bracket: Option<&str>) -> Result<String> {
    let coeffs: Vec<f64> = coefficients
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| invalid(format!("bad coefficient `{c}`"))))
        .collect::<Result<_>>()?;
    let mut spec = PolySpec::new(coeffs, index).map_err(invalid)?;
    if let Some(b) = bracket {
        let (lo, hi) = parse_range(b)?;
        spec = spec.with_bracket(lo, hi);
    }
    Ok(fmt_g(poly_root(&spec).map_err(invalid)?))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(a) => run_solve(&a, false),
        Command::Sweep(a) => run_solve(&a, true),
        Command::Figure { id, out } => emit(out.as_deref(), &figure_csv(id)?),
        Command::Props {
            id,
            points,
            eps_range,
            out,
        } => run_props(&id, points, eps_range.as_deref(), out.as_deref()),
        Command::Roots {
            coefficients,
            index,
            bracket,
        } => {
            println!("{}", run_roots(&coefficients, index, bracket.as_deref())?);
            Ok(())
        }
    }
}

/// 0 success, 1 proposition violation, 2 invalid input.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.is::<Violation>() {
        1
    } else {
        2
    }
}
