use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thermolind::models::{figure, FIGURES};

mod config;
mod run;
mod verify;

use config::Plan;

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(
    name = "thermolind",
    version,
    about = "Thermodynamically consistent master equations for small open quantum systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML or JSON config and write CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        jobs: Option<usize>,
        /// Output file; overrides the config. `-` writes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the laws of thermodynamics for a model or figure preset.
    Verify {
        #[arg(long)]
        model: String,
        /// Total excitation cap for the bosonic models.
        #[arg(long, default_value_t = 5)]
        cutoff: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the sweep data of a figure (or `all`) as CSV into a directory.
    Figures {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

enum Failure {
    Config(String),
    Solver(String),
    Io(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (msg, code) = match self {
            Failure::Config(m) => (format!("config error: {m}"), EXIT_CONFIG),
            Failure::Solver(m) => (format!("error: {m}"), EXIT_SOLVER),
            Failure::Io(m) => (format!("error: {m}"), 1),
        };
        eprintln!("{msg}");
        ExitCode::from(code)
    }
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn jobs(n: Option<usize>) -> usize {
    n.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) if p == Path::new("-") => Ok(Box::new(io::stdout().lock())),
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p).map_err(io_err(p))?))),
    }
}

fn run_plan(plan: &Plan, jobs: usize, out: Option<&Path>) -> Result<(), Failure> {
    let rows = run::execute(plan, jobs).map_err(|e| Failure::Solver(e.to_string()))?;
    let w = open_output(out)?;
    run::write_csv(plan, &rows, w).map_err(|e| Failure::Io(e.to_string()))
}

fn cmd_run(config: &Path, n: Option<usize>, out: Option<PathBuf>) -> Result<(), Failure> {
    let plan = config::load(config).and_then(|c| c.plan()).map_err(Failure::Config)?;
    let out = out.or_else(|| plan.output.clone());
    log::info!("{} points × {} approaches", plan.values.len(), plan.methods.len());
    run_plan(&plan, jobs(n), out.as_deref())
}

fn cmd_verify(name: &str, cutoff: usize, out: Option<PathBuf>) -> Result<bool, Failure> {
    let (model, methods) = verify::preset(name).map_err(Failure::Config)?;
    let report = verify::verify(name, model, &methods, cutoff).map_err(Failure::Solver)?;
    let mut w = open_output(out.as_deref())?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    writeln!(w, "{text}").map_err(|e| Failure::Io(e.to_string()))?;
    Ok(report.pass)
}

fn cmd_figures(name: &str, dir: &Path, n: Option<usize>) -> Result<(), Failure> {
    let names: Vec<&str> = if name == "all" { FIGURES.to_vec() } else { vec![name] };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    for name in names {
        let fig = figure(name).map_err(|e| Failure::Config(e.to_string()))?;
        let values = fig.sweep.values().map_err(|e| Failure::Config(e.to_string()))?;
        let plan = Plan {
            model: fig.model,
            sweep: fig.sweep,
            values,
            methods: fig.methods,
            outputs: fig.outputs.iter().map(|s| s.to_string()).collect(),
            output: None,
            options: Default::default(),
        };
        let path = dir.join(format!("{name}.csv"));
        log::info!("{name} -> {}", path.display());
        run_plan(&plan, jobs(n), Some(&path))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("THERMOLIND_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, jobs, out } => cmd_run(&config, jobs, out).map(|_| true),
        Command::Verify { model, cutoff, out } => cmd_verify(&model, cutoff, out),
        Command::Figures { name, out, jobs } => cmd_figures(&name, &out, jobs).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(f) => f.report(),
    }
}
