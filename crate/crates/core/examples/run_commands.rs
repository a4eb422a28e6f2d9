//! The command runners used by the binary, called in-process.
use greenfac::cli::{run, Command, RunConfig};

fn main() {
    for cfg in [
        RunConfig::new(Command::Verify, 4, -7, -23, "1=1"),
        RunConfig::new(Command::Verify, 12, -4, -7, "1=1"),
        RunConfig::selftest(7, true),
    ] {
        let out = run(&cfg);
        println!(
            "{} -> exit {}: {}",
            cfg.command.name(),
            out.code,
            out.report["status"]
        );
    }
}
