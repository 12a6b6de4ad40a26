use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use fracture_ls::model::PRESET_NAMES;
use fracture_ls_bench::{emit_csv, format_table, run_sweep, FileConfig};

#[derive(Debug, Parser)]
#[command(name = "fls-bench", version, about = "Compare Newton line-search strategies on fracture contact models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a sweep and print the iteration table.
    Sweep(Box<SweepArgs>),
    /// List the model presets.
    Presets,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// TOML file with sweep keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// none, residual, constraint-const, constraint-adaptive
    #[arg(long, value_delimiter = ',')]
    strategy: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    model: Option<Vec<String>>,
    /// Dilation angles in radians.
    #[arg(long, value_delimiter = ',')]
    phi: Option<Vec<f64>>,
    /// Characteristic displacements.
    #[arg(long, value_delimiter = ',')]
    uc: Option<Vec<f64>>,
    /// Cells per side of the single fracture.
    #[arg(long, value_delimiter = ',')]
    cells: Option<Vec<usize>>,
    /// Geometry seeds of the multi-fracture models.
    #[arg(long, value_delimiter = ',')]
    seed: Option<Vec<u64>>,
    /// increment or residual; defaults per model.
    #[arg(long)]
    criterion: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn flags(&self) -> FileConfig {
        FileConfig {
            strategies: self.strategy.clone(),
            models: self.model.clone(),
            phi: self.phi.clone(),
            cells: self.cells.clone(),
            u_c: self.uc.clone(),
            seeds: self.seed.clone(),
            criterion: self.criterion.clone(),
            max_iter: self.max_iter,
            jobs: self.jobs,
            output: self.out.clone(),
        }
    }
}

fn sweep(args: &SweepArgs) -> fracture_ls_bench::Result<()> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let spec = file.overridden_by(args.flags()).into_spec()?;
    let result = run_sweep(&spec)?;
    print!("{}", format_table(&result.rows));
    let total: f64 = result.wall_times.iter().map(|t| t.as_secs_f64()).sum();
    eprintln!("{} runs, {total:.2} s of solver time", result.rows.len());
    if let Some(path) = &spec.output {
        emit_csv(&result.rows, path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::FAILURE,
            };
        }
    };
    match cli.command {
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Sweep(args) => match sweep(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
    }
}
