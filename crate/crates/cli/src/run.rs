//! Command dispatch, report rendering and exit codes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lawvere_core::bridge::{
    check_projection_compat, cl, compare_csystems, compare_lawvere, compare_lawvere_with, lc,
    roundtrip_csystem, roundtrip_lawvere,
};
use lawvere_core::csystem::{check_csystem, term_csystem};
use lawvere_core::models::telescope::{const_family, telescope_csystem, TelescopeSpec};
use lawvere_core::models::{clone, enumerate_models};
use lawvere_core::subsystem::{check_closure, generate_subsystem, Tower};
use lawvere_core::term::TheoryPresentation;
use lawvere_core::term_model::TermModel;
use lawvere_core::theory::{term_lawvere, verify_lawvere};
use lawvere_core::{Category, CheckReport, Error, LBijective, Lawvere, ProbeSpec, Status};

use crate::parse::{parse_sub, parse_theory};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lawvere", version, about = "Check Lawvere theories and C-systems")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Args)]
struct Flags {
    /// Largest object length probed
    #[arg(long, global = true, default_value_t = 3)]
    max_n: usize,
    /// Largest finite-function domain and codomain probed
    #[arg(long, global = true, default_value_t = 3)]
    max_fun: usize,
    /// Depth bound for random terms
    #[arg(long, global = true, default_value_t = 2)]
    depth: usize,
    /// Random samples per probe instance
    #[arg(long, global = true, default_value_t = 50)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit a JSON report
    #[arg(long, global = true)]
    json: bool,
    /// Enumeration budget in candidates
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: u64,
    /// Rewrite steps allowed per term
    #[arg(long, global = true, default_value_t = 10_000)]
    rewrite_budget: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lawvere and C-system laws of a theory file
    CheckTheory { file: PathBuf },
    /// C-system axioms A1-A8 of FILE, clone:K or telescope:B[:T]
    CheckCsystem { target: String },
    /// The C-system of a theory's Lawvere structure, checked and compared
    Lc { target: String },
    /// The Lawvere structure of a C-system, checked and compared
    Cl { target: String },
    /// Both round trips
    Roundtrip { target: String },
    /// Enumerate models on a finite carrier
    Models {
        file: PathBuf,
        #[arg(long)]
        size: usize,
    },
    /// The subsystem generated by a constant fiber over a telescope system
    Subsystem {
        target: String,
        #[arg(long)]
        fiber: usize,
    },
    /// Size of a hom-set
    Homcount { target: String, m: usize, n: usize },
    /// Diagrammatic composite of two substitutions written [M](T,...)
    Compose { file: PathBuf, sub1: String, sub2: String },
}

/// What a command returns before rendering.
struct Response {
    report: CheckReport,
    /// Primary human-readable output, shown instead of the report.
    text: Option<String>,
}

impl Response {
    fn report(report: CheckReport) -> Self {
        Response { report, text: None }
    }
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

enum Target {
    File(PathBuf),
    Clone(usize),
    Telescope(TelescopeSpec),
}

fn parse_target(s: &str) -> Result<Target, Failure> {
    let bad = |what: &str| Failure::Usage(format!("invalid target `{s}`: {what}"));
    if let Some(k) = s.strip_prefix("clone:") {
        let k: usize = k.parse().map_err(|_| bad("expected clone:K"))?;
        return Ok(Target::Clone(k));
    }
    if let Some(rest) = s.strip_prefix("telescope:") {
        let mut parts = rest.split(':');
        let b: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| bad("expected telescope:B or telescope:B:T"))?;
        let mut spec = TelescopeSpec::new(b);
        if let Some(t) = parts.next() {
            spec.max_total = t.parse().map_err(|_| bad("expected telescope:B:T"))?;
        }
        if parts.next().is_some() {
            return Err(bad("too many fields"));
        }
        return Ok(Target::Telescope(spec));
    }
    Ok(Target::File(PathBuf::from(s)))
}

fn load(path: &Path, flags: &Flags) -> Result<TheoryPresentation, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut pres =
        parse_theory(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    pres.rewrites = pres.rewrites.map(|r| r.with_budget(flags.rewrite_budget));
    Ok(pres)
}

fn term_model(path: &Path, flags: &Flags) -> Result<TermModel, Failure> {
    Ok(TermModel::new(load(path, flags)?)?)
}

fn combine(parts: Vec<CheckReport>) -> CheckReport {
    let mut out = CheckReport::new();
    for p in parts {
        out.extend(p);
    }
    out.sorted()
}

/// `cl` suite for a system that carries both structures directly.
fn cl_suite<C>(c: &C, probe: &ProbeSpec) -> Result<CheckReport, Failure>
where
    C: LBijective<Ob = usize> + Lawvere<Cat = C> + Clone,
{
    let back = cl(c.clone());
    Ok(combine(vec![
        verify_lawvere(&back, probe)?,
        compare_lawvere(c, &back, probe)?,
        check_projection_compat(c, probe.max_fun)?,
    ]))
}

fn lc_suite<C>(c: &C, probe: &ProbeSpec) -> Result<CheckReport, Failure>
where
    C: LBijective<Ob = usize> + Lawvere<Cat = C> + Clone,
{
    let built = lc(c.clone());
    Ok(combine(vec![check_csystem(&built, probe)?, compare_csystems(c, &built, probe)?]))
}

fn roundtrip_suite<C>(c: &C, probe: &ProbeSpec) -> Result<CheckReport, Failure>
where
    C: LBijective<Ob = usize> + Lawvere<Cat = C> + Clone,
{
    Ok(combine(vec![roundtrip_lawvere(c, probe)?, roundtrip_csystem(c, probe)?]))
}

fn execute(cmd: &Command, flags: &Flags, probe: &ProbeSpec) -> Result<Response, Failure> {
    match cmd {
        Command::CheckTheory { file } => {
            let pres = load(file, flags)?;
            Ok(Response::report(combine(vec![
                verify_lawvere(&term_lawvere(pres.clone())?, probe)?,
                check_csystem(&term_csystem(pres)?, probe)?,
            ])))
        }
        Command::CheckCsystem { target } => {
            let report = match parse_target(target)? {
                Target::File(path) => check_csystem(&term_model(&path, flags)?, probe)?,
                Target::Clone(k) => check_csystem(&clone(k)?, probe)?,
                Target::Telescope(spec) => check_csystem(&telescope_csystem(spec)?, probe)?,
            };
            Ok(Response::report(report))
        }
        Command::Lc { target } | Command::Cl { target } | Command::Roundtrip { target } => {
            let suite = match cmd {
                Command::Lc { .. } => lc_suite::<TermModel> as fn(&TermModel, &ProbeSpec) -> _,
                Command::Cl { .. } => cl_suite::<TermModel>,
                _ => roundtrip_suite::<TermModel>,
            };
            let report = match parse_target(target)? {
                Target::File(path) => suite(&term_model(&path, flags)?, probe)?,
                Target::Clone(k) => {
                    let c = clone(k)?;
                    match cmd {
                        Command::Lc { .. } => lc_suite(&c, probe)?,
                        Command::Cl { .. } => cl_suite(&c, probe)?,
                        _ => roundtrip_suite(&c, probe)?,
                    }
                }
                Target::Telescope(_) => {
                    return Err(Failure::Usage(
                        "telescope systems are not l-bijective; use `subsystem`".into(),
                    ))
                }
            };
            Ok(Response::report(report))
        }
        Command::Models { file, size } => {
            let pres = load(file, flags)?;
            let models = enumerate_models(&pres, *size, flags.budget)?;
            let mut report = CheckReport::new();
            let mut text = format!(
                "{} model{}\n",
                models.len(),
                if models.len() == 1 { "" } else { "s" }
            );
            for (i, m) in models.iter().enumerate() {
                report.pass("model", format!("#{i} {m}"));
                let _ = writeln!(text, "  {m}");
            }
            Ok(Response {
                report,
                text: Some(text.trim_end().to_string()),
            })
        }
        Command::Subsystem { target, fiber } => {
            let Target::Telescope(spec) = parse_target(target)? else {
                return Err(Failure::Usage("subsystem expects telescope:B".into()));
            };
            let base = telescope_csystem(spec)?;
            let sub = generate_subsystem(Tower::new(base, const_family(*fiber, 1))?);
            let k = clone(*fiber)?;
            let against_clone = compare_lawvere_with(&k, &cl(sub.clone()), probe, |f| {
                k.from_table(
                    f.dom().len(),
                    f.cod().len(),
                    f.map().iter().map(|&v| v as u32).collect(),
                )
            })?;
            Ok(Response::report(combine(vec![
                check_csystem(&sub, probe)?,
                check_closure(&sub, probe)?,
                against_clone,
            ])))
        }
        Command::Homcount { target, m, n } => {
            let count = match parse_target(target)? {
                Target::File(path) => term_model(&path, flags)?.hom_count(m, n),
                Target::Clone(k) => clone(k)?.hom_count(m, n),
                Target::Telescope(_) => {
                    return Err(Failure::Usage(
                        "homcount takes FILE or clone:K".into(),
                    ))
                }
            };
            let shown = count.map_or_else(|| "infinite".to_string(), |c| c.to_string());
            let mut report = CheckReport::new();
            report.pass("homcount", format!("Hom({m},{n}) = {shown}"));
            Ok(Response {
                report,
                text: Some(shown),
            })
        }
        Command::Compose { file, sub1, sub2 } => {
            let model = term_model(file, flags)?;
            let sig = &model.presentation().signature;
            let f = parse_sub(sub1, sig).map_err(|e| Failure::Usage(format!("SUB1: {e}")))?;
            let g = parse_sub(sub2, sig).map_err(|e| Failure::Usage(format!("SUB2: {e}")))?;
            let h = model.canon(&model.compose(&f, &g)?)?;
            let mut report = CheckReport::new();
            report.pass("compose", format!("{f} ; {g} = {h}"));
            Ok(Response {
                report,
                text: Some(h.to_string()),
            })
        }
    }
}

#[derive(Serialize)]
struct JsonBounds {
    max_n: usize,
    max_fun: usize,
    depth: usize,
    samples: usize,
    budget: u64,
    rewrite_budget: u64,
}

#[derive(Serialize)]
struct JsonEntry<'a> {
    check: &'a str,
    instance: &'a str,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a str>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    command: String,
    seed: u64,
    bounds: JsonBounds,
    entries: Vec<JsonEntry<'a>>,
}

fn command_line(cmd: &Command) -> String {
    match cmd {
        Command::CheckTheory { file } => format!("check-theory {}", file.display()),
        Command::CheckCsystem { target } => format!("check-csystem {target}"),
        Command::Lc { target } => format!("lc {target}"),
        Command::Cl { target } => format!("cl {target}"),
        Command::Roundtrip { target } => format!("roundtrip {target}"),
        Command::Models { file, size } => format!("models {} --size {size}", file.display()),
        Command::Subsystem { target, fiber } => format!("subsystem {target} --fiber {fiber}"),
        Command::Homcount { target, m, n } => format!("homcount {target} {m} {n}"),
        Command::Compose { file, sub1, sub2 } => {
            format!("compose {} {sub1} {sub2}", file.display())
        }
    }
}

fn render_json(cli: &Cli, report: &CheckReport) -> String {
    let f = &cli.flags;
    let doc = JsonReport {
        command: command_line(&cli.command),
        seed: f.seed,
        bounds: JsonBounds {
            max_n: f.max_n,
            max_fun: f.max_fun,
            depth: f.depth,
            samples: f.samples,
            budget: f.budget,
            rewrite_budget: f.rewrite_budget,
        },
        entries: report
            .entries()
            .iter()
            .map(|e| JsonEntry {
                check: &e.check,
                instance: &e.instance,
                status: e.status.to_string(),
                witness: e.witness.as_deref(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
}

fn render_human(response: &Response) -> String {
    if let Some(text) = &response.text {
        return format!("{text}\n");
    }
    let report = &response.report;
    let failed = report.failures().count();
    format!(
        "{report}{} checks, {} failed\n",
        report.entries().len(),
        failed
    )
}

fn exit_code(report: &CheckReport) -> i32 {
    if report.entries().iter().any(|e| e.status == Status::Fail) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            return if code == EXIT_PASS {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let f = &cli.flags;
    let probe = ProbeSpec::default()
        .with_max_n(f.max_n)
        .with_max_fun(f.max_fun)
        .with_depth(f.depth)
        .with_samples(f.samples)
        .with_seed(f.seed)
        .with_budget(f.budget);

    match execute(&cli.command, f, &probe) {
        Ok(response) => {
            let code = exit_code(&response.report);
            let stdout = if f.json {
                render_json(&cli, &response.report)
            } else {
                render_human(&response)
            };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(Failure::Usage(msg)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Budget(msg)) => Outcome {
            code: EXIT_BUDGET,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}
