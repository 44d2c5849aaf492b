use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semijulia::pipeline::SATURATION_NOTE;
use semijulia::{render, run_scenario, verify, RenderSet, Scenario, ScenarioConfig};

#[derive(Parser)]
#[command(name = "semijulia", version, about = "Fatou, Julia and completely invariant Julia sets of holomorphic semigroups")]
struct Cli {
    /// Worker threads (the SJ_THREADS environment variable takes precedence).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage listed in a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Write one set of a preset scenario as a PGM image.
    Render {
        #[arg(long)]
        scenario: Scenario,
        /// jf, jg (generator Julia sets), js (semigroup), e or j (hulls).
        #[arg(long)]
        set: RenderSet,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariance, subset and perfectness suite; exit 0 iff all pass.
    Verify {
        #[arg(long)]
        scenario: Scenario,
        /// Optional config overriding the preset defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "verify-out")]
        out_dir: PathBuf,
    },
}

fn thread_count(flag: Option<usize>) -> Option<usize> {
    std::env::var("SJ_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .or(flag)
        .filter(|&n| n > 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = thread_count(cli.threads) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not configure {n} threads: {e}");
        }
    }
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cmd: Command) -> semijulia::Result<ExitCode> {
    match cmd {
        Command::Run { config, out_dir } => {
            let cfg = ScenarioConfig::from_file(&config)?;
            let manifest = run_scenario(&cfg, &out_dir)?;
            for st in &manifest.stages {
                println!("{}: {:?} ({:.1}s)", st.name, st.status, st.seconds);
            }
            for a in &manifest.artifacts {
                println!("wrote {}", a.display());
            }
            let failed = manifest.failed_stages();
            if failed.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("failed stages: {}", failed.join(", "));
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Render { scenario, set, out } => {
            let cfg = ScenarioConfig::preset(scenario);
            let path = out.unwrap_or_else(|| PathBuf::from(format!("{}-{:?}.pgm", scenario.name(), set).to_lowercase()));
            let m = render(&cfg, set, &path)?;
            println!("wrote {} ({} marked cells)", path.display(), m.count());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { scenario, config, out_dir } => {
            let cfg = match config {
                Some(p) => ScenarioConfig::from_file(&p)?,
                None => ScenarioConfig::preset(scenario),
            };
            if cfg.scenario != scenario {
                return Err(semijulia::Error::InvalidParameter {
                    field: "scenario".into(),
                    reason: format!("config describes {}, not {}", cfg.scenario.name(), scenario.name()),
                });
            }
            let outcome = verify(&cfg, &out_dir)?;
            for c in &outcome.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("{SATURATION_NOTE}");
            Ok(if outcome.all_passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
