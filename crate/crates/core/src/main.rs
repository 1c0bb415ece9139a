use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twistlab::ackermann::{alpha, g};
use twistlab::centralizer::CentralizerSpec;
use twistlab::harness::{self, Params, ReportFormat, ScenarioResult};
use twistlab::spaces::{self, SpaceSpec};
use twistlab::{Error, RealVector, Result};

#[derive(Parser)]
#[command(name = "twistlab", version, about = "Norms, centralizers and checks on finitely supported sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a norm.
    Norm {
        #[arg(long)]
        space: SpaceSpec,
        /// JSON array (dense) or object {"index": value} (sparse).
        #[arg(long)]
        vector: String,
    },
    /// Evaluate a dual norm with certified bounds.
    Dual {
        #[arg(long)]
        space: SpaceSpec,
        #[arg(long)]
        vector: String,
        #[arg(long, default_value_t = spaces::DEFAULT_TOL)]
        tol: f64,
    },
    /// Apply a centralizer.
    Centralizer {
        /// kp, scaled:<n>, couple:<space>
        #[arg(long)]
        spec: CentralizerSpec,
        #[arg(long)]
        vector: String,
    },
    /// Print the g_n(k) table or the α thresholds as CSV.
    Ackermann {
        #[arg(long, default_value_t = 4)]
        max_n: u32,
        #[arg(long, default_value_t = 6)]
        max_k: u64,
        /// Print α at the given points instead of the table.
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<u64>,
    },
    /// Run a scenario, or `all` for the default suite.
    Verify {
        scenario: String,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u64>>,
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io { path: path.clone(), message: e.to_string() }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io { path: "<stdout>".into(), message: e.to_string() }),
    }
}

fn verify(scenario: &str, params: &Params, format: ReportFormat, out: Option<&PathBuf>) -> Result<bool> {
    let pool = harness::thread_pool()?;
    let results: Vec<ScenarioResult> = pool.install(|| {
        if scenario == "all" {
            harness::run_suite(params)
        } else {
            harness::run_scenario(scenario, params).map(|r| vec![r])
        }
    })?;
    for r in &results {
        let failed: Vec<&str> = r.cells.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let status = if failed.is_empty() { "pass".to_string() } else { format!("FAIL {}", failed.join(" ")) };
        eprintln!("{:<20} {:>4} cells {:>7} ms  {status}", r.name, r.cells.len(), r.runtime_ms);
    }
    let text = match (format, scenario) {
        (ReportFormat::Json, "all") => harness::render_suite_json(params.seed, &results),
        (ReportFormat::Json, _) => harness::render_json(&results[0]),
        (ReportFormat::Csv, _) => harness::render_csv(&results)?,
    };
    emit(&text, out)?;
    Ok(results.iter().all(ScenarioResult::passed))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Norm { space, vector } => {
            let x = RealVector::parse_literal(&vector)?;
            println!("{}", spaces::norm(&space, &x)?);
        }
        Command::Dual { space, vector, tol } => {
            let y = RealVector::parse_literal(&vector)?;
            let d = spaces::dual_norm(&space, &y, tol)?;
            println!("value {}", d.value);
            println!("lower {}", d.lower);
            println!("upper {}", d.upper);
            println!("gap {}", d.relative_gap());
            if let Some(x) = &d.primal {
                println!("primal {}", x.to_literal());
            }
        }
        Command::Centralizer { spec, vector } => {
            let y = RealVector::parse_literal(&vector)?;
            println!("{}", spec.apply(&y)?.to_literal());
        }
        Command::Ackermann { max_n, max_k, alpha: points } => {
            if points.is_empty() {
                println!("n,k,g");
                for n in 0..=max_n {
                    for k in 0..=max_k {
                        println!("{n},{k},{}", g(n, k));
                    }
                }
            } else {
                println!("n,alpha");
                for m in points {
                    println!("{m},{}", alpha(m));
                }
            }
        }
        Command::Verify { scenario, n, limit, seed, eta, lambda, format, out } => {
            let params = Params { n, limit, seed, eta, lambda };
            return verify(&scenario, &params, format, out.as_ref());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
