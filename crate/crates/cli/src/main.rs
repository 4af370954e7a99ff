use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qbattery::scenario::ScenarioOptions;
use qbattery_cli::analytic_cmd::{write_series, AnalyticModel};
use qbattery_cli::figures::{emit_figure_dataset, Figure};
use qbattery_cli::verify::{Level, Suite, CRITERIA};
use qbattery_cli::{CliError, CliResult, Override, ScenarioConfig};

#[derive(Parser)]
#[command(name = "qbattery", version, about = "Work and power fluctuations of quantum batteries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a TOML config file.
    Simulate {
        config: PathBuf,
        /// Override a config value, e.g. `--set grid.steps=200`.
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<Override>,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Dataset name (overrides `output.name`).
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        t_final: Option<f64>,
        /// Evaluate grid points sequentially.
        #[arg(long)]
        sequential: bool,
    },
    /// Write the CSV datasets behind a figure.
    Figure {
        #[arg(value_enum)]
        figure: Figure,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sequential: bool,
    },
    /// Run the acceptance criteria and write a JSON report.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: Level,
        /// Report path; defaults to `verify_<level>.json`.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Run only these criteria.
        #[arg(long = "only", value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Print closed-form series as CSV.
    Analytic {
        #[command(subcommand)]
        model: AnalyticCommand,
    },
}

#[derive(Subcommand)]
enum AnalyticCommand {
    Single {
        #[arg(long, default_value_t = 1.0)]
        omega0: f64,
        #[arg(long, default_value_t = 1.0)]
        drive: f64,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long, default_value_t = 101)]
        steps: usize,
    },
    Kbody {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        omega0: f64,
        #[arg(long, default_value_t = 1.0)]
        drive: f64,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Add the small-angle approximations (`undef` outside their regime).
        #[arg(long)]
        scaling: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { config, mut set, out, name, steps, t_final, sequential } => {
            if let Some(out) = out {
                set.push(flag("output", "dir", toml::Value::String(out.display().to_string())));
            }
            if let Some(name) = name {
                set.push(flag("output", "name", toml::Value::String(name)));
            }
            if let Some(steps) = steps {
                let steps = i64::try_from(steps).map_err(|_| CliError::Config("steps too large".into()))?;
                set.push(flag("grid", "steps", toml::Value::Integer(steps)));
            }
            if let Some(t) = t_final {
                set.push(flag("grid", "t_final", toml::Value::Float(t)));
            }
            if sequential {
                set.push(flag("options", "execution", toml::Value::String("sequential".into())));
            }
            let config = ScenarioConfig::load(&config, &set)?;
            let (csv, manifest) = qbattery_cli::run::simulate_to_dir(&config)?;
            println!("{}", csv.display());
            println!("{}", manifest.display());
        }
        Command::Figure { figure, out, sequential } => {
            let mut options = ScenarioOptions::default();
            if sequential {
                options.execution = qbattery::Execution::Sequential;
            }
            for p in emit_figure_dataset(figure, &out, &options)? {
                println!("{}", p.display());
            }
        }
        Command::Verify { level, report, only } => {
            if let Some(bad) = only.iter().find(|id| !CRITERIA.iter().any(|(c, _)| c == *id)) {
                return Err(CliError::Config(format!("no criterion {bad}")));
            }
            let suite = Suite::new(level);
            let full = suite.run_all_filtered(&only);
            for c in &full.criteria {
                println!("{}", c.line());
                for note in &c.notes {
                    println!("    {note}");
                }
            }
            let path = report.unwrap_or_else(|| PathBuf::from(format!("verify_{}.json", level_tag(level))));
            let json = serde_json::to_string_pretty(&full).expect("report serializes");
            std::fs::write(&path, json).map_err(|e| CliError::io(&path, e))?;
            println!("report: {}", path.display());
            if !full.passed {
                let failed: Vec<String> = full.criteria.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
                return Err(CliError::Verification(format!("criteria {} failed", failed.join(", "))));
            }
        }
        Command::Analytic { model } => {
            let (model, t_final, steps) = match model {
                AnalyticCommand::Single { omega0, drive, t_final, steps } => (AnalyticModel::Single { omega0, drive }, t_final, steps),
                AnalyticCommand::Kbody { n, k, omega0, drive, t_final, steps, scaling } => {
                    (AnalyticModel::Kbody { n, k, omega0, drive, scaling }, t_final, steps)
                }
            };
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_series(&mut lock, &model, t_final, steps)?;
            lock.flush().map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })?;
        }
    }
    Ok(())
}

fn flag(section: &str, key: &str, value: toml::Value) -> Override {
    Override { section: section.into(), key: key.into(), value }
}

fn level_tag(level: Level) -> &'static str {
    match level {
        Level::Fast => "fast",
        Level::Full => "full",
    }
}
