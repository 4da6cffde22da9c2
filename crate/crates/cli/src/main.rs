use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stab_core::scenario::{self, Overrides, ScenarioError};
use stab_core::suite;

/// Stabilization experiments for finitely presented modules.
#[derive(Parser)]
#[command(name = "stab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its CSV and JSON reports.
    Run {
        file: PathBuf,
        #[arg(long)]
        horizon: Option<u32>,
        #[arg(long)]
        window: Option<usize>,
        /// Directory for the reports.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// One-shot computation: snf, hnf, ass, depth, hom or eval.
    Compute { sub: String, args: String },
    /// Run the curated scenario corpus and the functor battery.
    Suite {
        #[arg(long)]
        horizon: Option<u32>,
        #[arg(long)]
        window: Option<usize>,
        /// Also run randomized functor-law checks from this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn fail(e: &ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn run(file: PathBuf, ov: Overrides, out: PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return ExitCode::from(1);
        }
    };
    let (sc, report) = match scenario::run_text(&text, ov) {
        Ok(x) => x,
        Err(e) => return fail(&e),
    };
    let (csv, json) = match report.write(&sc, &out) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot write reports to {}: {e}", out.display());
            return ExitCode::from(1);
        }
    };
    let s = &report.summary;
    println!("{}: {} under {} over {}", s.scenario, s.family, s.functor, s.backend);
    println!("  ass   {} (n0 = {})", s.ass.status, show(s.ass.n0));
    if let Some(dp) = &s.depth {
        println!("  depth {} (n0 = {})", dp.status, show(dp.n0));
    }
    println!("  artin-rees exponent {}", show(s.artin_rees));
    if !s.ann_monotone {
        println!("  annihilator monotonicity FAILED");
    }
    if let Some(v) = &s.expectation {
        if v.matched {
            println!("  expectation met");
        } else {
            for f in &v.failures {
                println!("  expectation failed: {f}");
            }
        }
    }
    println!("  wrote {} and {}", csv.display(), json.display());
    ExitCode::from(report.exit_code() as u8)
}

fn show(v: Option<u32>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

fn compute(sub: &str, args: &str) -> ExitCode {
    match scenario::compute(sub, args) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json value"));
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn run_suite(ov: Overrides, seed: Option<u64>, trials: usize) -> ExitCode {
    let results = suite::run_all(ov);
    let mut failed = 0;
    for r in &results {
        let tag = if r.passed() { "PASS" } else { "FAIL" };
        match &r.outcome {
            Ok(s) => println!(
                "{tag} {:<52} ass {} depth {}",
                r.label,
                s.ass.status,
                s.depth.as_ref().map_or("-".into(), |d| d.status.to_string())
            ),
            Err(e) => println!("{tag} {:<52} {e}", r.label),
        }
        failed += !r.passed() as usize;
    }
    println!("{} of {} runs passed", results.len() - failed, results.len());
    if let Some(seed) = seed {
        match suite::law_checks(seed, trials) {
            Ok(rep) => {
                for f in &rep.failures {
                    println!("FAIL {f}");
                }
                println!(
                    "functor laws: {} trials, {} evaluations, {} failures (seed {seed})",
                    rep.trials,
                    rep.evaluations,
                    rep.failures.len()
                );
                failed += rep.failures.len();
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn init_threads() {
    let Ok(v) = std::env::var("STAB_THREADS") else { return };
    match v.parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring STAB_THREADS={v}"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    init_threads();
    match cli.command {
        Command::Run { file, horizon, window, out } => run(file, Overrides { horizon, window }, out),
        Command::Compute { sub, args } => compute(&sub, &args),
        Command::Suite { horizon, window, seed, trials } => run_suite(Overrides { horizon, window }, seed, trials),
    }
}
