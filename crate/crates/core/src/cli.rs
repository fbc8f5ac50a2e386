//! Command-line front end. `run` does the work so tests can drive it in-process.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
//! 3 when an extension of the base field would be needed.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::acceptance::{self, SuiteConfig, ELEMENT_LOSS, LALPHA_VALUE_LOSS, MOTIVE_FLOOR_DIVISOR};
use crate::carlitz::{carlitz_action, carlitz_exp, carlitz_log, l_alpha, omega, pi_tilde, reduce_log_with};
use crate::error::{Error, Result};
use crate::expr::{parse, Context};
use crate::field::{Field, FieldConfig, LocalElement};
use crate::motive::{MotivePresentation, PresentationJson};
use crate::poly::TPoly;
use crate::relations::{relation_report, NormJson, SearchBounds};
use crate::tate::TateSeries;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EXTENSION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "carlitz", version, about = "Carlitz-module special functions over F_q((pi))")]
pub struct Cli {
    /// Characteristic.
    #[arg(long, global = true, env = "CARLITZ_P", default_value_t = 3)]
    pub p: u32,
    /// q = p^m.
    #[arg(long, global = true, env = "CARLITZ_M", default_value_t = 1)]
    pub m: u32,
    /// Residue field degree over F_q.
    #[arg(long, global = true, env = "CARLITZ_E", default_value_t = 1)]
    pub e: u32,
    /// theta = -pi^{-ram}; must be divisible by q - 1.
    #[arg(long, global = true, env = "CARLITZ_RAM", default_value_t = 2)]
    pub ram: i64,
    /// Absolute pi-adic precision.
    #[arg(long, global = true, env = "CARLITZ_PREC", default_value_t = 200)]
    pub prec: i64,
    /// Number of stored t-coefficients.
    #[arg(long, global = true, env = "CARLITZ_TDEG", default_value_t = 40)]
    pub tdeg: usize,
    /// Seed for the randomized checks in selftest.
    #[arg(long, global = true, env = "CARLITZ_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true, env = "CARLITZ_JSON")]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The Carlitz period.
    Pitilde,
    /// Anderson-Thakur Omega as a series in t.
    Omega {
        /// t-coefficients to print in text mode.
        #[arg(long, default_value_t = 4)]
        terms: usize,
    },
    /// Carlitz exponential of an element ("-" reads stdin).
    Cexp { z: String },
    /// Carlitz logarithm of an element ("-" reads stdin).
    Clog { z: String },
    /// The series L_alpha and its value at theta.
    #[command(alias = "laplha")]
    Lalpha {
        alpha: String,
        #[arg(long, default_value_t = 4)]
        terms: usize,
    },
    /// C_a(x) for a in F_q[t].
    Caction { a: String, x: String },
    /// Pull beta into the logarithm domain by t-division.
    ReduceLog {
        beta: String,
        /// Division steps to take even when beta is already small.
        #[arg(long, default_value_t = 0)]
        min_steps: u32,
    },
    /// Check an identity or a motive presentation.
    Verify {
        #[arg(value_enum)]
        target: Target,
        /// Presentation JSON for the `presentation` target ("-" reads stdin).
        #[arg(long)]
        presentation: Option<PathBuf>,
        /// alpha for the `lalpha` target.
        #[arg(long, default_value = "z")]
        alpha: String,
    },
    /// Search for F_q[t]-linear relations among 1, pi_tilde and log_C(alpha_i).
    Relations {
        /// Comma-separated element expressions.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alphas: Vec<String>,
        #[arg(long, default_value_t = 1)]
        dt: usize,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        vlo: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        vhi: i64,
        /// Certification reruns at margin times the precision and t-degree.
        #[arg(long, default_value_t = 2)]
        margin: i64,
    },
    /// Run the acceptance suite with the current configuration.
    Selftest {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u8>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    OmegaFe,
    Period,
    TorsionLog,
    ExpKernel,
    Lalpha,
    Presentation,
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl Io<'_> {
    fn text(&mut self, arg: &str) -> Result<String> {
        if arg != "-" {
            return Ok(arg.to_string());
        }
        if self.stdin_used {
            return Err(Error::Format("stdin can only be read once".into()));
        }
        self.stdin_used = true;
        let mut s = String::new();
        self.stdin.read_to_string(&mut s).map_err(|e| Error::Format(e.to_string()))?;
        Ok(s.trim().to_string())
    }
}

/// What a command produced: a text rendering, a JSON value and the exit code.
struct Report {
    text: String,
    json: Value,
    code: i32,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, code: EXIT_OK }
    }
}

fn element(field: &Field, io: &mut Io, arg: &str) -> Result<LocalElement> {
    parse(&io.text(arg)?, Context::Field)?.eval_element(field)
}

fn norm_text(n: &NormJson) -> String {
    match n.valuation {
        Some(v) => format!("valuation {v} (q^{})", n.log_q),
        None => format!("zero, below q^{}", n.log_q),
    }
}

fn series_text(s: &TateSeries, terms: usize) -> String {
    let mut out = String::new();
    for (k, c) in s.coeffs().iter().take(terms).enumerate() {
        out.push_str(&format!("t^{k}: {c}\n"));
    }
    if s.t_deg() > terms {
        out.push_str(&format!("... {} more t-coefficients\n", s.t_deg() - terms));
    }
    out
}

/// A residual check: zero at precision at least `floor`.
fn residual_report(target: &str, r: &LocalElement, floor: i64) -> Report {
    let n = NormJson::from(&r.norm());
    let pass = r.is_zero() && r.prec() >= floor;
    let status = if pass { "PASS" } else { "FAIL" };
    Report {
        text: format!(
            "{status} {target}: residual {}, certified to O(pi^{}), floor {floor}\n",
            norm_text(&n),
            r.prec()
        ),
        json: json!({"target": target, "pass": pass, "residual": n, "certified_prec": r.prec(), "floor": floor}),
        code: if pass { EXIT_OK } else { EXIT_FAIL },
    }
}

fn verify(
    cli: &Cli,
    field: &Field,
    io: &mut Io,
    target: Target,
    file: Option<&PathBuf>,
    alpha: &str,
) -> Result<Report> {
    let (p, td) = (cli.prec, cli.tdeg);
    let floor = p - ELEMENT_LOSS;
    let th = LocalElement::theta(field);
    let tq = || TateSeries::from_poly(&TPoly::t_minus(&LocalElement::theta_pow(field, field.q() as i64)), td);
    Ok(match target {
        Target::OmegaFe => {
            let o = omega(field, td, p);
            let r = o.sub(&tq().mul(&o.twist(1)?));
            series_report("omega-fe", &r, floor)
        }
        Target::Period => {
            let w = omega(field, td, p).eval_entire(&th)?;
            residual_report("period", &pi_tilde(field, p).mul_ref(&w).add_ref(&LocalElement::one(field)), floor)
        }
        Target::TorsionLog => {
            let l = carlitz_log(&LocalElement::zeta(field), p)?;
            residual_report("torsion-log", &th.mul_ref(&l).sub_ref(&pi_tilde(field, p)), floor)
        }
        Target::ExpKernel => residual_report("exp-kernel", &carlitz_exp(&pi_tilde(field, p), p), floor),
        Target::Lalpha => {
            let a = element(field, io, alpha)?;
            let l = l_alpha(&a, td, p)?;
            let fe = series_report("lalpha-fe", &tq().mul(&l).sub(&tq().scale(&a).add(&l.twist(1)?)), floor);
            let d = l.eval_entire(&th)?.sub_ref(&carlitz_log(&a, p)?);
            let at = residual_report("lalpha-value", &d, p - LALPHA_VALUE_LOSS);
            Report {
                text: format!("{}{}", fe.text, at.text),
                json: json!({"target": "lalpha", "checks": [fe.json, at.json]}),
                code: fe.code.max(at.code),
            }
        }
        Target::Presentation => {
            let path = file.ok_or_else(|| Error::Format("verify presentation needs --presentation FILE".into()))?;
            let raw = match path.to_str() {
                Some("-") => io.text("-")?,
                _ => std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?,
            };
            let pj: PresentationJson = serde_json::from_str(&raw).map_err(|e| Error::Format(e.to_string()))?;
            let m = MotivePresentation::from_json(field, &pj)?;
            let floor = m.prec / MOTIVE_FLOOR_DIVISOR;
            let r = m.check_trivialization(floor)?;
            let n = NormJson::from(&r.residual);
            let status = if r.pass { "PASS" } else { "FAIL" };
            Report {
                text: format!(
                    "{status} {}: residual {}, certified to O(pi^{}), floor {floor}\n",
                    m.name,
                    norm_text(&n),
                    r.certified_prec
                ),
                json: json!({"target": "presentation", "name": m.name, "pass": r.pass, "residual": n,
                             "certified_prec": r.certified_prec, "floor": floor}),
                code: if r.pass { EXIT_OK } else { EXIT_FAIL },
            }
        }
    })
}

fn series_report(target: &str, r: &TateSeries, floor: i64) -> Report {
    let n = NormJson::from(&r.gauss_norm());
    let pass = n.upper_bound && r.min_prec() >= floor;
    let status = if pass { "PASS" } else { "FAIL" };
    Report {
        text: format!(
            "{status} {target}: Gauss norm {}, certified to O(pi^{}), floor {floor}\n",
            norm_text(&n),
            r.min_prec()
        ),
        json: json!({"target": target, "pass": pass, "residual": n, "certified_prec": r.min_prec(), "floor": floor}),
        code: if pass { EXIT_OK } else { EXIT_FAIL },
    }
}

fn dispatch(cli: &Cli, io: &mut Io) -> Result<Report> {
    let field = FieldConfig::new(cli.p, cli.m, cli.e, cli.ram, cli.prec)?;
    let f = &field;
    let p = cli.prec;
    let elem = |x: &LocalElement| (format!("{x}\n"), serde_json::to_value(x.to_json()).expect("serializable"));
    Ok(match &cli.command {
        Command::Pitilde => {
            let (t, j) = elem(&pi_tilde(f, p));
            Report::ok(t, j)
        }
        Command::Omega { terms } => {
            let o = omega(f, cli.tdeg, p);
            Report::ok(series_text(&o, *terms), serde_json::to_value(o.to_json()).expect("serializable"))
        }
        Command::Cexp { z } => {
            let (t, j) = elem(&carlitz_exp(&element(f, io, z)?, p));
            Report::ok(t, j)
        }
        Command::Clog { z } => {
            let (t, j) = elem(&carlitz_log(&element(f, io, z)?, p)?);
            Report::ok(t, j)
        }
        Command::Lalpha { alpha, terms } => {
            let a = element(f, io, alpha)?;
            let l = l_alpha(&a, cli.tdeg, p)?;
            let v = l.eval_entire(&LocalElement::theta(f))?;
            let text = format!("{}value at theta: {v}\n", series_text(&l, *terms));
            Report::ok(text, json!({"series": l.to_json(), "value_at_theta": v.to_json()}))
        }
        Command::Caction { a, x } => {
            let pa = parse(&io.text(a)?, Context::TPoly)?.eval_poly(f)?;
            let fa = pa.to_fq().ok_or_else(|| Error::Context(format!("{pa}: coefficients must lie in F_q")))?;
            let (t, j) = elem(&carlitz_action(&fa, &element(f, io, x)?));
            Report::ok(t, j)
        }
        Command::ReduceLog { beta, min_steps } => {
            let b = element(f, io, beta)?;
            let r = reduce_log_with(&b, p, *min_steps)?;
            let floor = p - ELEMENT_LOSS;
            let ok = |x: &LocalElement| x.is_zero() && x.prec() >= floor;
            let pass = ok(&r.action_residual) && ok(&r.exp_residual);
            let (na, ne) = (NormJson::from(&r.action_residual.norm()), NormJson::from(&r.exp_residual.norm()));
            let text = format!(
                "{} n = {}\nalpha = {}\nC_t^n(alpha) - beta: {}\nexp(theta^n log alpha) - beta: {}\n",
                if pass { "PASS" } else { "FAIL" },
                r.n,
                r.alpha,
                norm_text(&na),
                norm_text(&ne)
            );
            let j = json!({"n": r.n, "alpha": r.alpha.to_json(), "action_residual": na,
                           "exp_residual": ne, "pass": pass});
            Report { text, json: j, code: if pass { EXIT_OK } else { EXIT_FAIL } }
        }
        Command::Verify { target, presentation, alpha } => verify(cli, f, io, *target, presentation.as_ref(), alpha)?,
        Command::Relations { alphas, dt, vlo, vhi, margin } => {
            let alphas = alphas
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| element(f, io, s))
                .collect::<Result<Vec<_>>>()?;
            let bounds = SearchBounds::new(*dt, *vlo, *vhi, p, cli.tdeg).with_margin(*margin);
            let rep = relation_report(f, &alphas, &bounds)?;
            let mut text =
                format!("kernel dimension {}, {} certified relation(s)", rep.kernel_dim, rep.relations.len());
            if rep.rejected > 0 {
                text.push_str(&format!(", {} rejected", rep.rejected));
            }
            text.push('\n');
            for (i, rel) in rep.relations.iter().enumerate() {
                let slots: Vec<String> = rel.slots.iter().map(|s| format!("({s})")).collect();
                text.push_str(&format!("relation {i}: {}\n", slots.join(", ")));
            }
            text.push_str(&format!("gamma dim {} ({})\n", rep.gamma.dim, crate::relations::GAMMA_DIM_LABEL));
            for g in &rep.gamma.polys {
                let xi: Vec<String> = g.xi.iter().map(|x| format!("({x})")).collect();
                text.push_str(&format!("  X0: ({}), Xi: {}, const: ({})\n", g.x0, xi.join(" "), g.constant));
            }
            Report::ok(text, serde_json::to_value(rep.to_json()).expect("serializable"))
        }
        Command::Selftest { only } => {
            let cfg = SuiteConfig { field: field.clone(), prec: p, t_deg: cli.tdeg, seed: cli.seed };
            let outcomes = match only {
                Some(id @ 1..=12) => vec![acceptance::run_one(&cfg, *id)],
                Some(id) => return Err(Error::Format(format!("criterion {id} does not exist; use 1..=12"))),
                None => acceptance::run_all(&cfg),
            };
            let pass = outcomes.iter().all(|o| o.pass);
            let text: String = outcomes.iter().map(|o| o.line() + "\n").collect();
            // timings stay out of the JSON so identical runs give identical bytes
            let j: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({"id": o.id, "name": o.name, "pass": o.pass, "detail": o.detail,
                                "known_failure": o.known_failure()})
                })
                .collect();
            Report { text, json: json!({"pass": pass, "criteria": j}), code: if pass { EXIT_OK } else { EXIT_FAIL } }
        }
    })
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ExtensionRequired(_) => EXIT_EXTENSION,
        _ => EXIT_USAGE,
    }
}

/// Parse `args` (program name first), run, and write the report; returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut io = Io { stdin, stdin_used: false };
    match dispatch(&cli, &mut io) {
        Ok(r) => {
            let written = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&r.json).expect("serializable"))
            } else {
                write!(out, "{}", r.text)
            };
            if written.is_err() {
                return EXIT_USAGE;
            }
            r.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
