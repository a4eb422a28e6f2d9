//! Command runners behind the `greenfac` binary. Each returns an exit code and
//! one JSON document; the binary only parses flags and writes the document.

use crate::error::Error;
use crate::factor::{fit_unit_power, gamma_exponents, validate_pair};
use crate::greens::{green_kf_at_cycle, CMCycle, GreenParams, GreenValue};
use crate::mforms::{check_principal_part, PrincipalCheck, PrincipalPart};
use serde_json::{json, Map, Value};
use std::path::PathBuf;

mod selftest;

pub use selftest::{run_suites, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_DIGITS: u32 = 30;
pub const DEFAULT_SEED: u64 = 20_240_901;
pub const DIGITS_ENV: &str = "GREENFAC_DIGITS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Greens,
    Factor,
    Verify,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Greens => "greens",
            Command::Factor => "factor",
            Command::Verify => "verify",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub k: u32,
    pub d1: i64,
    pub d2: i64,
    pub pp: String,
    pub tol: f64,
    pub digits: u32,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub quick: bool,
}

impl RunConfig {
    pub fn new(command: Command, k: u32, d1: i64, d2: i64, pp: &str) -> Self {
        RunConfig {
            command,
            k,
            d1,
            d2,
            pp: pp.to_string(),
            tol: DEFAULT_TOL,
            digits: DEFAULT_DIGITS,
            output: None,
            seed: DEFAULT_SEED,
            quick: false,
        }
    }

    pub fn selftest(seed: u64, quick: bool) -> Self {
        RunConfig {
            seed,
            quick,
            ..RunConfig::new(Command::Selftest, 4, -7, -23, "1=1")
        }
    }

    fn precision(&self) -> Value {
        json!({ "digits": self.digits, "tol": self.tol, "float_digits": 17 })
    }
}

/// Exit code and JSON document of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::VerificationFailed(_) => EXIT_FAILED,
        _ => EXIT_INVALID,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid-input",
        Error::SingularInput(_) => "singular-input",
        Error::SingularConfiguration(_) => "singular-configuration",
        Error::Unsupported(_) => "unsupported",
        Error::SearchExhausted(_) => "search-exhausted",
        Error::VerificationFailed(_) => "verification-failed",
    }
}

fn failure(cfg: &RunConfig, e: &Error, extra: Option<(&str, Value)>) -> Outcome {
    let mut v = json!({
        "command": cfg.command.name(),
        "status": "error",
        "error": { "kind": error_kind(e), "message": e.to_string() },
        "precision": cfg.precision(),
    });
    if let Some((key, val)) = extra {
        v.as_object_mut().unwrap().insert(key.into(), val);
    }
    Outcome {
        code: exit_code(e),
        report: v,
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match cfg.command {
        Command::Greens => run_greens(cfg),
        Command::Factor => run_factor(cfg),
        Command::Verify => run_verify(cfg),
        Command::Selftest => run_selftest(cfg),
    }
}

struct Prepared {
    pp: PrincipalPart,
    params: GreenParams,
}

/// Parses and checks everything shared by greens, factor and verify.
fn prepare(cfg: &RunConfig) -> std::result::Result<Prepared, Outcome> {
    let pp: PrincipalPart = cfg.pp.parse().map_err(|e| failure(cfg, &e, None))?;
    let params =
        GreenParams::new(cfg.k, cfg.tol, cfg.digits).map_err(|e| failure(cfg, &e, None))?;
    validate_pair(cfg.d1, cfg.d2).map_err(|e| failure(cfg, &e, None))?;
    match check_principal_part(i64::from(cfg.k), &pp) {
        Err(e) => return Err(failure(cfg, &e, None)),
        Ok(PrincipalCheck::Obstruction(v)) => {
            let e = Error::InvalidInput(format!(
                "principal part {pp} is obstructed by cusp forms of weight {}",
                2 * cfg.k
            ));
            let vec: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            return Err(failure(cfg, &e, Some(("obstruction", json!(vec)))));
        }
        Ok(PrincipalCheck::Valid) => {}
    }
    Ok(Prepared { pp, params })
}

fn green_json(cfg: &RunConfig, v: &GreenValue) -> Value {
    json!({
        "value": v.to_f64(),
        "value_str": v.value.to_sci(cfg.digits as usize),
        "converged": v.converged,
        "radius_cosh": v.radius,
        "terms": v.terms,
        "doublings": v.doublings,
        "last_change": v.last_change,
    })
}

pub fn run_greens(cfg: &RunConfig) -> Outcome {
    let p = match prepare(cfg) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let cycle = match CMCycle::new(cfg.d1, cfg.d2) {
        Ok(c) => c,
        Err(e) => return failure(cfg, &e, None),
    };
    let v = match green_kf_at_cycle(&p.pp, cfg.d1, cfg.d2, &p.params) {
        Ok(v) => v,
        Err(e) => return failure(cfg, &e, None),
    };
    let mut report = json!({
        "command": "greens",
        "status": if v.converged { "ok" } else { "not-converged" },
        "k": cfg.k,
        "d1": cfg.d1,
        "d2": cfg.d2,
        "pp": p.pp.to_string(),
        "cycle": { "pairs": cycle.pairs.len(), "weight_num": cycle.weight.0, "weight_den": cycle.weight.1 },
        "precision": cfg.precision(),
    });
    merge(&mut report, green_json(cfg, &v));
    Outcome {
        code: if v.converged { EXIT_OK } else { EXIT_FAILED },
        report,
    }
}

fn merge(into: &mut Value, from: Value) {
    if let (Some(a), Value::Object(b)) = (into.as_object_mut(), from) {
        a.extend(b);
    }
}

/// Shared by factor and verify: exponents, the cycle value and the unit fit.
fn factor_and_fit(cfg: &RunConfig, command: &str) -> Outcome {
    let p = match prepare(cfg) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let report = match gamma_exponents(cfg.k, &p.pp, cfg.d1, cfg.d2) {
        Ok(r) => r,
        Err(e) => return failure(cfg, &e, None),
    };
    let v = match green_kf_at_cycle(&p.pp, cfg.d1, cfg.d2, &p.params) {
        Ok(v) => v,
        Err(e) => return failure(cfg, &e, None),
    };
    let fit = fit_unit_power(&report, v.to_f64(), cfg.tol);
    let ok = fit.ok() && v.converged;
    let status = if !v.converged {
        "not-converged"
    } else if fit.ok() {
        "ok"
    } else {
        "verification-failed"
    };
    let mut full = report.clone();
    full.unit = Some(fit.clone());
    let mut out = full.to_json();
    let m = out.as_object_mut().unwrap();
    m.insert("command".into(), json!(command));
    m.insert("status".into(), json!(status));
    m.insert("pp".into(), json!(p.pp.to_string()));
    m.insert("converged".into(), json!(v.converged));
    m.insert("lhs".into(), json!(v.to_f64()));
    m.insert("lhs_str".into(), json!(v.value.to_sci(cfg.digits as usize)));
    m.insert("precision".into(), cfg.precision());
    if command == "verify" {
        let mut diag = Map::new();
        diag.insert("principal_part".into(), json!("valid"));
        diag.insert("class_number".into(), json!(report.class_number));
        diag.insert("log_eps".into(), json!(report.log_eps));
        diag.insert("unit_power_fit".into(), json!(fit.unit_power_fit));
        diag.insert("threshold".into(), json!(fit.threshold));
        diag.insert("rhs_value".into(), json!(fit.rhs_value));
        diag.insert("greens".into(), green_json(cfg, &v));
        m.insert("diagnostics".into(), Value::Object(diag));
    }
    Outcome {
        code: if ok { EXIT_OK } else { EXIT_FAILED },
        report: out,
    }
}

pub fn run_factor(cfg: &RunConfig) -> Outcome {
    factor_and_fit(cfg, "factor")
}

pub fn run_verify(cfg: &RunConfig) -> Outcome {
    factor_and_fit(cfg, "verify")
}

pub fn run_selftest(cfg: &RunConfig) -> Outcome {
    let suites = run_suites(cfg.seed, cfg.quick);
    let passed: usize = suites.iter().map(|s| s.passed).sum();
    let failed: usize = suites.iter().map(|s| s.failed).sum();
    Outcome {
        code: if failed == 0 { EXIT_OK } else { EXIT_FAILED },
        report: json!({
            "command": "selftest",
            "status": if failed == 0 { "ok" } else { "failed" },
            "seed": cfg.seed,
            "quick": cfg.quick,
            "passed": passed,
            "failed": failed,
            "suites": suites,
            "precision": cfg.precision(),
        }),
    }
}
