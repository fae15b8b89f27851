//! Command-line driver: argument parsing, report emission and exit codes.
//!
//! Exit codes: 0 pass or success, 1 fail, 2 undefined or degenerate,
//! 3 usage or input error, 4 size cap or budget exhausted.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gkk_tau::assignment::{fit_matrix_to_minors, hf_feasibility, FitConfig, TargetMinorTable};
use gkk_tau::interlacing::{interlace, InterlaceMethod, InterlaceReport};
use gkk_tau::search::{
    approximate_by_strict_gkk, dispersal_profile, extremal_search, random_matrix_in_class,
    MatrixClass, Objective, SearchConfig, SearchResult,
};
use gkk_tau::{
    classify, dispersal_sign_check, eigenvalues, hadamard_fischer_check, load_matrix,
    m_matrix_check, min_real_eigenvalue, newton_check, omega_tau_check, p_matrix_check,
    principal_minor_table, stability_check, varga_cone_check, ClassReport, Error, Matrix,
    MatrixFormat, MinorMode, RealPolynomial, Tolerances, Verdict,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNDEFINED: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;

/// Environment variable naming the default tolerance profile.
pub const PROFILE_ENV: &str = "GKK_TOLERANCE_PROFILE";

#[derive(Debug, Parser)]
#[command(name = "gkk-tau", version, about = "Certify and search P, GKK, omega and tau matrices")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Auto,
    Json,
    Text,
}

impl From<InputFormat> for MatrixFormat {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Auto => MatrixFormat::Auto,
            InputFormat::Json => MatrixFormat::Json,
            InputFormat::Text => MatrixFormat::Text,
        }
    }
}

#[derive(Debug, Args)]
struct Global {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Matrix file format.
    #[arg(long, global = true, value_enum, default_value = "auto")]
    input_format: InputFormat,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Tolerance profile: default, loose or tight.
    #[arg(long, global = true, env = PROFILE_ENV, default_value = "default")]
    tolerance_profile: String,
    #[arg(long, global = true)]
    tol_zero: Option<f64>,
    #[arg(long, global = true)]
    tol_real: Option<f64>,
    #[arg(long, global = true)]
    tol_rel: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckName {
    P,
    Gkk,
    StrictGkk,
    SignSym,
    Omega,
    Tau,
    Stable,
    Varga,
    Hf,
    Newton,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    RootsDirect,
    HermiteBiehler,
    Hurwitz,
    All,
}

#[derive(Debug, Args)]
struct ChainArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    iters: usize,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long)]
    step_init: Option<f64>,
    #[arg(long)]
    step_decay: Option<f64>,
}

impl ChainArgs {
    fn config(&self, n: usize) -> SearchConfig {
        let mut cfg = SearchConfig::new(n, self.seed, self.iters).with_restarts(self.restarts);
        if let Some(s) = self.step_init {
            cfg.step_init = s;
        }
        if let Some(d) = self.step_decay {
            cfg.step_decay = d;
        }
        cfg
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Every certifier on one matrix.
    Classify { file: PathBuf },
    /// The principal minor table.
    Minors {
        file: PathBuf,
        /// Rational arithmetic, rounded once at the end.
        #[arg(long)]
        exact: bool,
    },
    /// A single certifier.
    Check {
        #[arg(value_enum)]
        name: CheckName,
        file: PathBuf,
    },
    /// The dispersal sign check at one bound, or the profile over all bounds.
    Dispersal {
        file: PathBuf,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        strict: bool,
    },
    /// Extremal search inside a class.
    Search {
        #[arg(long)]
        class: String,
        #[arg(long)]
        objective: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// A random member of a class.
    Sample {
        #[arg(long)]
        class: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Strict GKK matrices within a max-entry ball around the input.
    ApproxStrict {
        file: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Also require the τ property.
        #[arg(long)]
        tau: bool,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Fit a matrix to prescribed principal minors.
    Assign {
        #[arg(long)]
        targets: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[arg(long, default_value_t = 400)]
        max_iter: usize,
    },
    /// Root interlacing of two polynomials.
    Interlace {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long, value_enum, default_value = "roots-direct")]
        method: MethodArg,
    },
}

/// Reproducibility record echoed in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Vec<String>,
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
    pub format: &'static str,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: String) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: message,
        }
    }
}

pub fn exit_code_for_error(e: &Error) -> i32 {
    if e.is_capacity() {
        EXIT_CAPACITY
    } else if matches!(e, Error::ConvergenceFailure { .. }) {
        EXIT_UNDEFINED
    } else {
        EXIT_USAGE
    }
}

pub fn exit_code_for_verdict(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Undefined => EXIT_UNDEFINED,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::usage(text)
            } else {
                Outcome {
                    code: EXIT_PASS,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let tol = match tolerances(&cli.global) {
        Ok(t) => t,
        Err(e) => return Outcome::usage(format!("error: {e}\n")),
    };
    let exec = || execute(&cli, &tol);
    let result = match cli.global.jobs {
        Some(0) => return Outcome::usage("error: --jobs must be at least 1\n".into()),
        Some(jobs) => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(exec),
            Err(e) => return Outcome::usage(format!("error: {e}\n")),
        },
        None => exec(),
    };
    match result {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: exit_code_for_error(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn tolerances(g: &Global) -> gkk_tau::Result<Tolerances> {
    let mut t = Tolerances::profile(&g.tolerance_profile)?;
    if let Some(v) = g.tol_zero {
        t.tol_zero = v;
    }
    if let Some(v) = g.tol_real {
        t.tol_real = v;
    }
    if let Some(v) = g.tol_rel {
        t.tol_rel = v;
    }
    t.validate()?;
    Ok(t)
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

struct Emitter {
    manifest: RunManifest,
    format: OutputFormat,

}

#[derive(Serialize)]
struct WithManifest<'a, T: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    manifest: &'a RunManifest,
}

impl Emitter {
    /// JSON: the body's fields followed by `manifest`. Text: manifest lines,
    /// then the rendered body.
    fn emit<T: Serialize>(&self, body: &T, text: impl FnOnce(&mut String)) -> String {
        match self.format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string(&WithManifest {
                    body,
                    manifest: &self.manifest,
                })
                .expect("reports serialize");
                s.push('\n');
                s
            }
            OutputFormat::Text => {
                let m = &self.manifest;
                let mut s = String::new();
                let _ = writeln!(s, "# {} {} {}", m.tool, m.version, m.command);
                for i in &m.inputs {
                    let _ = writeln!(s, "# input: {i}");
                }
                let t = &m.tolerances;
                let _ = writeln!(
                    s,
                    "# tolerances: zero={:e} real={:e} rel={:e}",
                    t.tol_zero, t.tol_real, t.tol_rel
                );
                if let Some(seed) = m.seed {
                    let _ = writeln!(s, "# seed: {seed}");
                }
                text(&mut s);
                s
            }
        }
    }
}

fn load(cli: &Cli, path: &Path) -> gkk_tau::Result<Matrix> {
    load_matrix(path, cli.global.input_format.into())
}

fn fmt_margin(v: f64) -> String {
    if v.is_nan() {
        "undefined".into()
    } else {
        format!("{v:.6e}")
    }
}

fn report_line(s: &mut String, name: &str, r: &ClassReport) {
    let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
    let _ = write!(
        s,
        "{:<16} {:<9} margin {:>14}",
        name,
        verdict.as_str().unwrap_or(""),
        fmt_margin(r.margin)
    );
    if r.marginal {
        s.push_str("  (marginal)");
    }
    if let Some(w) = &r.witness {
        let _ = write!(s, "  witness {}", serde_json::to_string(w).expect("witness serializes"));
    }
    if let Some(n) = &r.note {
        let _ = write!(s, "  note: {n}");
    }
    s.push('\n');
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    check: &'a str,
    report: &'a ClassReport,
}

fn check_name(c: CheckName) -> &'static str {
    match c {
        CheckName::P => "p",
        CheckName::Gkk => "gkk",
        CheckName::StrictGkk => "strict-gkk",
        CheckName::SignSym => "sign-sym",
        CheckName::Omega => "omega",
        CheckName::Tau => "tau",
        CheckName::Stable => "stable",
        CheckName::Varga => "varga",
        CheckName::Hf => "hf",
        CheckName::Newton => "newton",
        CheckName::M => "m",
    }
}

fn run_check(name: CheckName, a: &Matrix, tol: &Tolerances) -> gkk_tau::Result<ClassReport> {
    let table = || principal_minor_table(a, MinorMode::Float);
    Ok(match name {
        CheckName::P => p_matrix_check(&table()?, tol),
        CheckName::Gkk => p_matrix_check(&table()?, tol).and(dispersal_sign_check(a, 1, false, tol)?),
        CheckName::StrictGkk => {
            p_matrix_check(&table()?, tol).and(dispersal_sign_check(a, 1, true, tol)?)
        }
        CheckName::SignSym => dispersal_sign_check(a, a.order(), false, tol)?,
        CheckName::Omega => omega_tau_check(a, tol)?.omega,
        CheckName::Tau => omega_tau_check(a, tol)?.tau,
        CheckName::Stable => stability_check(&eigenvalues(a, tol)?, tol),
        CheckName::Varga => {
            let s = eigenvalues(a, tol)?;
            let l = min_real_eigenvalue(&s, tol);
            varga_cone_check(&s, l, a.order(), tol)
        }
        CheckName::Hf => hadamard_fischer_check(&table()?, tol)?,
        CheckName::Newton => newton_check(table()?.c(), tol),
        CheckName::M => m_matrix_check(a, &table()?, tol),
    })
}

fn search_text(s: &mut String, r: &SearchResult) {
    let _ = writeln!(s, "class      {}", r.class);
    let _ = writeln!(s, "objective  {}", r.objective);
    let _ = writeln!(s, "best       {}", fmt_margin(r.best_objective));
    let _ = writeln!(s, "restart    {}", r.best_restart);
    let _ = writeln!(s, "accepted   {}  rejected {}", r.accepted, r.rejected);
    if r.oracle_violations > 0 {
        let _ = writeln!(s, "oracle violations {}", r.oracle_violations);
    }
    if let Some(a) = &r.approximation {
        let _ = writeln!(
            s,
            "found      {}  distance {:.6e}  margin {}",
            a.found,
            a.distance,
            fmt_margin(a.margin)
        );
    }
    if !r.marginal_labels.is_empty() {
        let _ = writeln!(s, "marginal   {}", r.marginal_labels.join(", "));
    }
    let _ = write!(s, "{}", r.best);
}

fn execute(cli: &Cli, tol: &Tolerances) -> gkk_tau::Result<(i32, String)> {
    let (command, inputs, seed): (&str, Vec<String>, Option<u64>) = match &cli.command {
        Command::Classify { file } => ("classify", vec![display(file)], None),
        Command::Minors { file, .. } => ("minors", vec![display(file)], None),
        Command::Check { file, .. } => ("check", vec![display(file)], None),
        Command::Dispersal { file, .. } => ("dispersal", vec![display(file)], None),
        Command::Search { chain, .. } => ("search", vec![], Some(chain.seed)),
        Command::Sample { seed, .. } => ("sample", vec![], Some(*seed)),
        Command::ApproxStrict { file, chain, .. } => {
            ("approx-strict", vec![display(file)], Some(chain.seed))
        }
        Command::Assign { targets, seed, .. } => ("assign", vec![display(targets)], Some(*seed)),
        Command::Interlace { p, q, .. } => ("interlace", vec![display(p), display(q)], None),
    };
    let em = Emitter {
        manifest: RunManifest {
            tool: "gkk-tau",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            inputs,
            tolerances: *tol,
            seed,
            format: match cli.global.format {
                OutputFormat::Json => "json",
                OutputFormat::Text => "text",
            },
        },
        format: cli.global.format,

    };
    match &cli.command {
        Command::Classify { file } => {
            let c = classify(&load(cli, file)?, tol)?;
            let out = em.emit(&c, |s| {
                let r = &c.reports;
                for (name, rep) in [
                    ("p", &r.p),
                    ("gkk", &r.gkk),
                    ("strict_gkk", &r.strict_gkk),
                    ("sign_symmetric", &r.sign_symmetric),
                    ("omega", &r.omega),
                    ("tau", &r.tau),
                    ("gkk_tau", &r.gkk_tau),
                    ("m", &r.m),
                    ("stable", &r.stable),
                    ("varga", &r.varga),
                    ("hf", &r.hf),
                    ("newton", &r.newton),
                ] {
                    report_line(s, name, rep);
                }
            });
            Ok((EXIT_PASS, out))
        }
        Command::Minors { file, exact } => {
            let mode = if *exact { MinorMode::Exact } else { MinorMode::Float };
            let t = principal_minor_table(&load(cli, file)?, mode)?;
            let out = em.emit(&t, |s| {
                let n = t.order();
                for alpha in gkk_tau::IndexSet::all(n) {
                    let _ = writeln!(s, "{:<24} {:>24e}", alpha.to_string(), t.get(&alpha));
                }
                let c: Vec<String> = t.c().iter().map(|v| format!("{v:e}")).collect();
                let _ = writeln!(s, "c {}", c.join(" "));
            });
            Ok((EXIT_PASS, out))
        }
        Command::Check { name, file } => {
            let r = run_check(*name, &load(cli, file)?, tol)?;
            let body = CheckOutput {
                check: check_name(*name),
                report: &r,
            };
            let out = em.emit(&body, |s| report_line(s, check_name(*name), &r));
            Ok((exit_code_for_verdict(r.verdict), out))
        }
        Command::Dispersal { file, d, strict } => {
            let a = load(cli, file)?;
            match d {
                Some(d) => {
                    let r = dispersal_sign_check(&a, *d, *strict, tol)?;
                    let name = format!("dispersal<={d}");
                    let body = CheckOutput {
                        check: &name,
                        report: &r,
                    };
                    let out = em.emit(&body, |s| report_line(s, &name, &r));
                    Ok((exit_code_for_verdict(r.verdict), out))
                }
                None => {
                    let p = dispersal_profile(&a, tol)?;
                    let out = em.emit(&p, |s| {
                        for l in &p.levels {
                            report_line(s, &format!("d<={}", l.d), &l.report);
                        }
                        report_line(s, "stable", &p.stability);
                        let _ = writeln!(s, "largest d {}", p.largest_d);
                    });
                    Ok((EXIT_PASS, out))
                }
            }
        }
        Command::Search {
            class,
            objective,
            n,
            chain,
        } => {
            let class: MatrixClass = class.parse()?;
            let objective: Objective = objective.parse()?;
            let r = extremal_search(class, objective, &chain.config(*n), tol)?;
            Ok((EXIT_PASS, em.emit(&r, |s| search_text(s, &r))))
        }
        Command::Sample {
            class,
            n,
            seed,
            budget,
        } => {
            let class: MatrixClass = class.parse()?;
            let a = random_matrix_in_class(class, *n, *seed, *budget, tol)?;
            #[derive(Serialize)]
            struct Sample<'a> {
                class: MatrixClass,
                matrix: &'a Matrix,
            }
            let body = Sample { class, matrix: &a };
            Ok((EXIT_PASS, em.emit(&body, |s| {
                let _ = write!(s, "{a}");
            })))
        }
        Command::ApproxStrict {
            file,
            eps,
            tau,
            chain,
        } => {
            let a = load(cli, file)?;
            let r = approximate_by_strict_gkk(&a, *eps, *tau, &chain.config(a.order()), tol)?;
            let found = r.approximation.as_ref().is_some_and(|a| a.found);
            let code = if found { EXIT_PASS } else { EXIT_FAIL };
            Ok((code, em.emit(&r, |s| search_text(s, &r))))
        }
        Command::Assign {
            targets,
            seed,
            starts,
            max_iter,
        } => {
            let t = TargetMinorTable::from_json(&fs::read_to_string(targets)?)?;
            let hf = hf_feasibility(&t, tol)?;
            let fit = fit_matrix_to_minors(
                &t,
                &FitConfig {
                    starts: *starts,
                    seed: *seed,
                    max_iterations: *max_iter,
                },
            )?;
            #[derive(Serialize)]
            struct Assign<'a> {
                hf_feasibility: &'a ClassReport,
                fit: &'a gkk_tau::AssignmentResult,
            }
            let body = Assign {
                hf_feasibility: &hf,
                fit: &fit,
            };
            let code = if fit.converged { EXIT_PASS } else { EXIT_FAIL };
            Ok((code, em.emit(&body, |s| {
                report_line(s, "hf_feasibility", &hf);
                let _ = writeln!(
                    s,
                    "fit residual {:.6e}  converged {}  starts used {}",
                    fit.residual, fit.converged, fit.starts_used
                );
                let _ = write!(s, "{}", fit.matrix);
            })))
        }
        Command::Interlace { p, q, method } => {
            let read = |path: &Path| -> gkk_tau::Result<RealPolynomial> {
                Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
            };
            let (p, q) = (read(p)?, read(q)?);
            let methods: Vec<InterlaceMethod> = match method {
                MethodArg::RootsDirect => vec![InterlaceMethod::RootsDirect],
                MethodArg::HermiteBiehler => vec![InterlaceMethod::HermiteBiehler],
                MethodArg::Hurwitz => vec![InterlaceMethod::Hurwitz],
                MethodArg::All => InterlaceMethod::ALL.to_vec(),
            };
            let reports = methods
                .into_iter()
                .map(|m| interlace(&p, &q, m, tol))
                .collect::<gkk_tau::Result<Vec<InterlaceReport>>>()?;
            let verdict = combined_verdict(reports.iter().map(|r| r.verdict));
            #[derive(Serialize)]
            struct Interlace<'a> {
                verdict: Verdict,
                reports: &'a [InterlaceReport],
            }
            let body = Interlace {
                verdict,
                reports: &reports,
            };
            Ok((exit_code_for_verdict(verdict), em.emit(&body, |s| {
                for r in &reports {
                    let m = serde_json::to_value(r.method).expect("method serializes");
                    let v = serde_json::to_value(r.verdict).expect("verdict serializes");
                    let _ = write!(
                        s,
                        "{:<16} {}",
                        m.as_str().unwrap_or(""),
                        v.as_str().unwrap_or("")
                    );
                    if let Some(side) = r.side {
                        let _ = write!(s, "  side {side:?}");
                    }
                    if let Some(n) = &r.details.note {
                        let _ = write!(s, "  note: {n}");
                    }
                    s.push('\n');
                }
            })))
        }
    }
}

/// Fail if any method fails, otherwise undefined if any is undefined.
fn combined_verdict(vs: impl Iterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::Pass;
    for v in vs {
        out = match (out, v) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Undefined, _) | (_, Verdict::Undefined) => Verdict::Undefined,
            _ => Verdict::Pass,
        };
    }
    out
}
