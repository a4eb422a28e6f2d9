use clap::{Args, Parser, Subcommand};
use greenfac::cli::{
    run, Command, RunConfig, DEFAULT_DIGITS, DEFAULT_SEED, DEFAULT_TOL, EXIT_INVALID,
};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Averaged CM-values of higher Green's functions and the factorization of γ_f.
#[derive(Parser)]
#[command(name = "greenfac", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Evaluate G_{k,f} on the CM cycle of (d1, d2).
    Greens(CycleArgs),
    /// Predict the factorization of γ_f and fit its unit part.
    Factor(CycleArgs),
    /// Run the full check: principal part, exponents, cycle value, reconciliation.
    Verify(CycleArgs),
    /// Seeded property suites.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct CycleArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, allow_hyphen_values = true)]
    d1: i64,
    #[arg(long, allow_hyphen_values = true)]
    d2: i64,
    /// Principal part as "m=c[,m=c...]", c an integer or p/q.
    #[arg(long, default_value = "1=1", allow_hyphen_values = true)]
    pp: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, env = "GREENFAC_DIGITS", default_value_t = DEFAULT_DIGITS)]
    digits: u32,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Reduced instance counts.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn config(cli: Cli) -> RunConfig {
    let (command, a) = match cli.command {
        Sub::Greens(a) => (Command::Greens, a),
        Sub::Factor(a) => (Command::Factor, a),
        Sub::Verify(a) => (Command::Verify, a),
        Sub::Selftest(s) => {
            let mut c = RunConfig::selftest(s.seed, s.quick);
            c.output = s.output;
            return c;
        }
    };
    RunConfig {
        tol: a.tol,
        digits: a.digits,
        output: a.output,
        ..RunConfig::new(command, a.k, a.d1, a.d2, &a.pp)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let cfg = config(cli);
    let out = run(&cfg);
    let text = serde_json::to_string_pretty(&out.report).expect("reports serialize");
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INVALID as u8);
            }
        }
        None => {
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    if let Some(msg) = out.report["error"]["message"].as_str() {
        eprintln!("error: {msg}");
    }
    ExitCode::from(out.code as u8)
}
