use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use frobperf::{render, run_script, Config};
use serde_json::json;

#[derive(Parser)]
#[command(name = "frobperf", version, about = "Frobenius image chains, preperfections, components and groupoid closures")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a script and print its JSON report.
    Run {
        script: PathBuf,
        #[arg(long)]
        max_pairs: Option<usize>,
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long)]
        max_steps: Option<u32>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let Cmd::Run { script, max_pairs, max_degree, max_steps, threads, seed, json: out } = Cli::parse().command;
    let mut cfg = Config { seed, threads: threads.max(1), ..Config::default() };
    if let Some(n) = max_pairs {
        cfg.budgets.max_pairs = n;
    }
    if let Some(d) = max_degree {
        cfg.budgets.max_degree = d;
    }
    if let Some(k) = max_steps {
        cfg.max_steps = k.max(1);
    }
    let src = match std::fs::read_to_string(&script) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("frobperf: cannot read {}: {e}", script.display());
            return ExitCode::from(1);
        }
    };
    let dir = script.parent().map(PathBuf::from).unwrap_or_default();
    let (doc, code) = match run_script(&src, &dir, &cfg) {
        Ok(out) => (out.document, out.exit_code),
        Err(e) => {
            eprintln!("{}:{e}", script.display());
            (json!({ "error": e.json(), "exit": 1 }), 1)
        }
    };
    let text = render(&doc);
    print!("{text}");
    if let Some(path) = out {
        if let Err(e) = std::fs::write(&path, &text) {
            eprintln!("frobperf: cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code as u8)
}
