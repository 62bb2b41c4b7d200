//! The `robba` command line: argument parsing, dispatch, and the
//! `robba-report/1` JSON report.
//!
//! Exit codes: 0 success, 1 a check failed, 2 ambiguous at precision,
//! 3 parse or configuration error.

use std::ffi::OsString;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{parse_window, Config};
use crate::error::Error;
use crate::herr::{cup, h2_pairing, h2_reduce, H2Reduction, HerrCochain, ModulePresentation, ReduceOptions};
use crate::induction::verify_shapiro;
use crate::parse::{parse_character, parse_cochain, parse_cochain_at, parse_fiber, parse_series, SeriesContext};
use crate::rankone::{cohomology_dims, euler_characteristic};
use crate::suite::{self, Check, Suite};
use crate::torsion::{torsion_cohomology, twisted_family, TorsionFiber};

pub const SCHEMA: &str = "robba-report/1";

const GRAMMAR: &str = "\
Expressions share one grammar: integers, + - * /, integer powers ^, parentheses.
  scalars     5^-1*3, -7, 2/3
  series      T, t (= log(1+T)), q, one_plus_T_over_T, t*(1+T)/T^2, T^-3;
              or deg:coeff pairs such as \"-1:1 0:0 1:5^1*1\" (division by monomials only)
  characters  x, x^-2, |x|, w (= x|x|), w*x^3, ur(5^-1*2)*x, char(dp=.., te=.., du=..)
  cochains    a series (degree 0 or 2) or a pair (a, b) (degree 1), optionally cochain@character
  fibers      R/t^k or R/t^k@character
Environment variables ROBBA_PRIME, ROBBA_PRECISION, ROBBA_WINDOW, ROBBA_SEED, ROBBA_JSON,
ROBBA_CHI_GAMMA, ROBBA_SEARCH_LIMIT, ROBBA_MARGIN, ROBBA_SAMPLES override the defaults.";

#[derive(Parser, Debug)]
#[command(name = "robba", version, about = "Cohomology of rank-one and torsion (φ,Γ)-modules over the Robba ring", after_help = GRAMMAR)]
pub struct Cli {
    /// Odd prime p.
    #[arg(long, global = true, env = "ROBBA_PRIME", default_value_t = 5)]
    pub prime: u32,
    /// Absolute precision N of input data.
    #[arg(long, global = true, env = "ROBBA_PRECISION", default_value_t = 12)]
    pub precision: i32,
    /// Series window lo:hi.
    #[arg(long, global = true, env = "ROBBA_WINDOW", default_value = "-10:80", allow_hyphen_values = true)]
    pub window: String,
    #[arg(long, global = true, env = "ROBBA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Emit the JSON report instead of text.
    #[arg(long, global = true, env = "ROBBA_JSON")]
    pub json: bool,
    /// χ(γ), an integer generating (Z/p^2)^×.
    #[arg(long, global = true, env = "ROBBA_CHI_GAMMA", allow_hyphen_values = true)]
    pub chi_gamma: Option<i64>,
    #[arg(long, global = true, env = "ROBBA_SEARCH_LIMIT", default_value_t = 10)]
    pub search_limit: u32,
    /// Digits a pivot must keep above its precision floor.
    #[arg(long, global = true, env = "ROBBA_MARGIN", default_value_t = 3)]
    pub margin: i32,
    /// Random samples per identity in the batteries.
    #[arg(long, global = true, env = "ROBBA_SAMPLES", default_value_t = 20)]
    pub samples: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SuiteArg {
    Operators,
    Residues,
    Herr,
    Torsion,
    Shapiro,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Operators => Suite::Operators,
            SuiteArg::Residues => Suite::Residues,
            SuiteArg::Herr => Suite::Herr,
            SuiteArg::Torsion => Suite::Torsion,
            SuiteArg::Shapiro => Suite::Shapiro,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a character and print the dimensions of H^0, H^1, H^2.
    Classify {
        #[arg(allow_hyphen_values = true)]
        character: String,
    },
    /// Run a battery of identities.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
    },
    /// Run every battery (same as `verify all`).
    VerifyIdentities,
    /// Cup product of two cochains over R(δ1) and R(δ2).
    Cup {
        #[arg(long, allow_hyphen_values = true)]
        char1: String,
        #[arg(long, allow_hyphen_values = true)]
        char2: String,
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        #[arg(long, allow_hyphen_values = true)]
        c2: String,
        /// Degree of a single-series c1.
        #[arg(long, default_value_t = 0)]
        deg1: u8,
        /// Degree of a single-series c2.
        #[arg(long, default_value_t = 0)]
        deg2: u8,
    },
    /// Res of the cup product of cochain@δ1 and cochain@δ2 with δ1δ2 = ω.
    Pair {
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        #[arg(long, allow_hyphen_values = true)]
        c2: String,
        #[arg(long, default_value_t = 0)]
        deg1: u8,
        #[arg(long, default_value_t = 2)]
        deg2: u8,
    },
    /// Reduce a 2-cochain of R(δ) to a coboundary or a canonical class.
    H2reduce {
        #[arg(long = "char", allow_hyphen_values = true)]
        character: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Cohomology of R(δ)/t^k from its fibers at levels 1..=nmax.
    Torsion {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        twist: String,
        #[arg(long, default_value_t = 3)]
        nmax: u32,
    },
    /// Shapiro's lemma for an index-m subgroup on a fiber.
    Shapiro {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "R/t", allow_hyphen_values = true)]
        fiber: String,
        #[arg(long, default_value_t = 1)]
        level: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Ambiguous,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Ambiguous => 2,
            Status::Error => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config: Config,
    pub status: Status,
    pub result: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// What the binary prints and returns.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::Parse(_) | Error::Config(_) => Status::Error,
        Error::RankAmbiguous { .. } | Error::PrecisionExhausted { .. } | Error::Ambiguous(_) => Status::Ambiguous,
        _ => Status::Fail,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let report = execute(&cli);
    let stdout = if cli.json { serde_json::to_string_pretty(&report).expect("report serializes") + "\n" } else { render_text(&report) };
    Outcome { code: report.status.exit_code(), stdout, stderr: String::new() }
}

pub fn config_from(cli: &Cli) -> Result<Config, Error> {
    let (lo, hi) = parse_window(&cli.window)?;
    let cfg = Config {
        p: cli.prime,
        prec: cli.precision,
        lo,
        hi,
        chi_gamma: cli.chi_gamma,
        search_limit: cli.search_limit,
        margin: cli.margin,
        seed: cli.seed,
        samples: cli.samples,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify { .. } => "classify",
        Command::Verify { .. } => "verify",
        Command::VerifyIdentities => "verify-identities",
        Command::Cup { .. } => "cup",
        Command::Pair { .. } => "pair",
        Command::H2reduce { .. } => "h2reduce",
        Command::Torsion { .. } => "torsion",
        Command::Shapiro { .. } => "shapiro",
    }
}

pub fn execute(cli: &Cli) -> Report {
    let command = command_name(&cli.command).to_string();
    let cfg = match config_from(cli) {
        Ok(c) => c,
        Err(e) => {
            let fallback = Config { p: cli.prime, prec: cli.precision, seed: cli.seed, ..Config::default() };
            return Report { schema: SCHEMA, command, config: fallback, status: Status::Error, result: Value::Null, checks: vec![], error: Some(e.to_string()) };
        }
    };
    match dispatch(&cli.command, &cfg) {
        Ok((result, checks)) => {
            let status = if checks.iter().all(|c| c.pass) { Status::Pass } else { Status::Fail };
            Report { schema: SCHEMA, command, config: cfg, status, result, checks, error: None }
        }
        Err(e) => Report { schema: SCHEMA, command, config: cfg, status: status_of(&e), result: Value::Null, checks: vec![], error: Some(e.to_string()) },
    }
}

type Dispatched = Result<(Value, Vec<Check>), Error>;

fn dispatch(cmd: &Command, cfg: &Config) -> Dispatched {
    let ctx = SeriesContext { p: cfg.p, prec: cfg.prec, hi: cfg.hi };
    let g = cfg.gamma()?;
    match cmd {
        Command::Classify { character } => {
            let d = parse_character(character, cfg.p)?;
            let c = d.classify(cfg.search_limit, cfg.margin)?;
            let (h0, h1, h2) = cohomology_dims(c.class);
            let euler = euler_characteristic((h0, h1, h2));
            let m = d.module();
            Ok((
                json!({
                    "character": d.to_string(), "class": c.class.to_string(),
                    "h0": h0, "h1": h1, "h2": h2, "euler": euler,
                    "degree": m.degree, "slope": m.slope().to_string(), "warning": c.warning,
                }),
                vec![Check::flag("χ = -1", euler == -1, None)],
            ))
        }
        Command::Verify { suite } => verify((*suite).into(), cfg),
        Command::VerifyIdentities => verify(Suite::All, cfg),
        Command::Cup { char1, char2, c1, c2, deg1, deg2 } => {
            let d1 = parse_character(char1, cfg.p)?;
            let d2 = parse_character(char2, cfg.p)?;
            let x = parse_cochain(c1, ctx, *deg1)?;
            let y = parse_cochain(c2, ctx, *deg2)?;
            let n = ModulePresentation::rank_one(&d2, g)?;
            let z = cup(&n, &x, &y)?;
            Ok((
                json!({ "character": d1.mul(&d2).to_string(), "degree": z.degree, "parts": cochain_strings(&z) }),
                vec![],
            ))
        }
        Command::Pair { c1, c2, deg1, deg2 } => {
            let (x, d1) = parse_cochain_at(c1, ctx, *deg1)?;
            let (y, d2) = parse_cochain_at(c2, ctx, *deg2)?;
            let v = h2_pairing(&d1, &x, &d2, &y, g)?;
            Ok((json!({ "value": v.to_string(), "value_int": v.to_i128(), "prec": v.prec() }), vec![Check::flag("pairing computed", true, None)]))
        }
        Command::H2reduce { character, f } => {
            let d = parse_character(character, cfg.p)?;
            let f = parse_series(f, ctx)?;
            let opts = ReduceOptions { margin: cfg.margin, search_limit: cfg.search_limit, ..ReduceOptions::default() };
            let (red, rep) = h2_reduce(&d, g, &f, opts)?;
            let required = rep.prec - cfg.margin;
            let check = Check {
                name: "re-substitution residual".into(),
                pass: rep.residual_val >= required,
                residual_val: Some(rep.residual_val),
                required_val: Some(required),
                samples: 1,
                detail: None,
            };
            let body = match &red {
                H2Reduction::Trivialization { a, b } => json!({ "kind": "Trivialization", "a": a.to_string(), "b": b.to_string() }),
                H2Reduction::CanonicalClass { c, k, a, b } => {
                    json!({ "kind": "CanonicalClass", "c": c.to_string(), "k": k, "a": a.to_string(), "b": b.to_string() })
                }
            };
            Ok((json!({ "reduction": body, "report": rep }), vec![check]))
        }
        Command::Torsion { k, twist, nmax } => {
            let d = parse_character(twist, cfg.p)?;
            let fam = twisted_family(*nmax, *k, &[d], &g, cfg.prec)?;
            let c = torsion_cohomology(&fam, cfg.margin)?;
            let mut checks: Vec<Check> = c
                .levels
                .iter()
                .map(|l| Check::flag(&format!("level {}: dim_fix = dim_coinv", l.n), l.dims.dim_fix == l.dims.dim_coinv, None))
                .collect();
            checks.push(Check::flag("connecting maps are equivariant", c.levels.iter().all(|l| l.equivariance_defect_val.is_none()), None));
            checks.push(Check::flag("χ = 0", c.euler_characteristic == 0, None));
            Ok((
                json!({ "levels": c.levels, "h0": c.h0, "h1": c.h1, "chi": c.euler_characteristic, "stabilized_at": c.stabilized_at }),
                checks,
            ))
        }
        Command::Shapiro { m, fiber, level } => {
            let (k, d) = parse_fiber(fiber, cfg.p)?;
            let base = TorsionFiber::twisted(*level, k, &[d], &g, cfg.prec)?.restrict(*m as u32);
            let rep = verify_shapiro(&base, *m, cfg.margin)?;
            let checks = vec![
                Check::flag("dims agree", rep.base_dims == rep.induced_dims, None),
                Check::flag("Q̃ iso on fixed points", rep.q_tilde_iso_on_fixed, None),
                Check::flag("Q iso on coinvariants", rep.q_iso_on_coinvariants, None),
                Check {
                    name: "reconstruction".into(),
                    pass: rep.reconstruction_residual_val.is_none(),
                    residual_val: rep.reconstruction_residual_val,
                    required_val: None,
                    samples: rep.m * base.dim(),
                    detail: None,
                },
            ];
            Ok((serde_json::to_value(&rep).expect("report serializes"), checks))
        }
    }
}

fn verify(s: Suite, cfg: &Config) -> Dispatched {
    let checks = suite::run(s, cfg);
    let passed = checks.iter().filter(|c| c.pass).count();
    Ok((json!({ "suite": s, "passed": passed, "total": checks.len() }), checks))
}

fn cochain_strings(c: &HerrCochain) -> Vec<Vec<String>> {
    c.parts.iter().map(|v| v.iter().map(|f| f.to_string()).collect()).collect()
}

fn render_text(r: &Report) -> String {
    let mut out = format!("{} [{}] p={} N={} window=[{}, {}] seed={}\n", r.command, format!("{:?}", r.status).to_lowercase(), r.config.p, r.config.prec, r.config.lo, r.config.hi, r.config.seed);
    if let Some(e) = &r.error {
        out += &format!("error: {e}\n");
    }
    if let Value::Object(map) = &r.result {
        for (k, v) in map {
            let s = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out += &format!("{k}: {s}\n");
        }
    }
    for c in &r.checks {
        let res = match (c.residual_val, c.required_val) {
            (Some(v), Some(q)) => format!(" (residual valuation {v}, need {q})"),
            (Some(v), None) => format!(" (residual valuation {v})"),
            _ => String::new(),
        };
        out += &format!("{}: {}{}\n", c.name, if c.pass { "pass" } else { "FAIL" }, res);
        if let (false, Some(d)) = (c.pass, &c.detail) {
            out += &format!("  {d}\n");
        }
    }
    out
}
