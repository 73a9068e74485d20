//! Experiment driver. Usage:
//!   bklab <subcommand> [--key value]... [--config file]
//! Flags override the config file, which overrides built-in defaults; every
//! resolved value is echoed into the report. Exit status: 0 when the run's
//! invariant holds, 1 when it fails, 2 on configuration errors.

mod commands;
mod config;
mod report;
mod shard;

use commands::CmdError;

const USAGE: &str = "usage: bklab <subcommand> [--key value]...
subcommands:
  relation-check   solve and verify the defining congruence on random pairs
  fiber-count      exact chart fiber counts over the requested field sizes
  strata-scan      decompose random pairs into their relative positions
  conv-enumerate   enumerate convolution chains below a monomial pair
  mv-verify        the xz = 0 membership criterion, exhaustively
  dimpoly-oracle   the congruence codimension bound over small shapes
  claim-verify     the integer inequalities backing the unbalanced bound
  splocus-sweep    exhaustive locus/flag sweep over V_2 lattices
  degen-move       the one-parameter move between torus-fixed chains
  chars-span       induced-character rank on p-regular classes
  orbit-count      Galois orbit formula against enumeration
common flags: --p --k --e --f --mu --c --q --budget --seed --shards --workers --out --config";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.first().map(|a| a.as_str()) == Some("--help") || args.is_empty() {
        eprintln!("{USAGE}");
        std::process::exit(2);
    }
    let started = std::time::Instant::now();
    let (sub, cfg) = match config::Config::from_args(&args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("config error: {}", e.0);
            eprintln!("{USAGE}");
            std::process::exit(2);
        }
    };
    match commands::dispatch(&sub, &cfg) {
        Ok(mut report) => {
            report.wall_clock_ms = started.elapsed().as_millis();
            let json = report.to_json();
            println!("{json}");
            let out = cfg.get("out");
            if !out.is_empty() {
                if let Err(e) = std::fs::write(format!("{out}.json"), &json) {
                    eprintln!("cannot write {out}.json: {e}");
                    std::process::exit(2);
                }
                if let Err(e) = std::fs::write(format!("{out}.csv"), report.to_csv()) {
                    eprintln!("cannot write {out}.csv: {e}");
                    std::process::exit(2);
                }
            }
            std::process::exit(if report.pass { 0 } else { 1 });
        }
        Err(CmdError::Config(msg)) => {
            eprintln!("config error: {msg}");
            std::process::exit(2);
        }
        Err(CmdError::Run(msg)) => {
            eprintln!("run failed: {msg}");
            std::process::exit(1);
        }
    }
}
