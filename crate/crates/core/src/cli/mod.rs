//! Command-line driver: heatmap sweeps, optimization runs and result reports.
//!
//! Exit codes: 0 on success, 1 on runtime or validation failure, 2 on usage
//! errors.

mod manifest;
mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::heatmap::{export_grid, sweep_grid, FixedParams, MetricKind};
use crate::optimizer::{iterative_search, SearchParams};
use crate::scenario::{load_config, ScenarioConfig};

pub use manifest::RunManifest;
pub use report::{render_table, ResultDocument, RESULT_SCHEMA};

#[derive(Debug, Parser)]
#[command(
    name = "ris-isac",
    version,
    about = "RIS deployment simulator and optimizer for secure ISAC scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep RIS positions over the deployment area with the other parameters fixed.
    Heatmap {
        /// Scenario JSON file.
        config: PathBuf,
        /// RIS orientation in radians.
        #[arg(long, allow_negative_numbers = true)]
        fixed_theta: f64,
        /// Number of RIS elements.
        #[arg(long)]
        fixed_n: u32,
        /// ISAC weight in [0, 1].
        #[arg(long)]
        fixed_alpha: f64,
        /// Cell edge length in meters; must divide both area extents.
        #[arg(long, default_value_t = 2.0)]
        cell_size: f64,
        /// Comma-separated subset of delta_snr_b, sensing_gain, security_gap, scalar_objective.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "delta_snr_b,sensing_gain,security_gap,scalar_objective"
        )]
        metrics: Vec<MetricKind>,
        /// Directory for the grid files and the run manifest.
        #[arg(long)]
        out_dir: PathBuf,
        /// Overrides the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the coarse-to-fine search and write the full result as JSON.
    Optimize {
        /// Scenario JSON file.
        config: PathBuf,
        /// Search parameter JSON; defaults are used for omitted fields.
        #[arg(long)]
        search_params: Option<PathBuf>,
        /// Result JSON path. A table and a manifest are written next to it.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Validate a saved result and print its representatives.
    Report {
        /// Result JSON written by `optimize`.
        result: PathBuf,
    },
}

/// Runs the CLI on explicit arguments (first element is the program name).
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    let command: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let outcome = match cli.command {
        Command::Heatmap {
            config,
            fixed_theta,
            fixed_n,
            fixed_alpha,
            cell_size,
            metrics,
            out_dir,
            seed,
        } => cmd_heatmap(
            &config,
            FixedParams {
                theta: fixed_theta,
                num_elements: fixed_n,
                alpha: fixed_alpha,
            },
            cell_size,
            &metrics,
            &out_dir,
            seed,
            command,
        ),
        Command::Optimize {
            config,
            search_params,
            out,
            seed,
        } => cmd_optimize(&config, search_params.as_deref(), &out, seed, command),
        Command::Report { result } => cmd_report(&result),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

pub fn main() -> ExitCode {
    run(std::env::args_os())
}

fn load_with_seed(path: &Path, seed: Option<u64>) -> Result<ScenarioConfig> {
    let mut cfg = load_config(path)?;
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn display(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}

pub fn cmd_heatmap(
    config: &Path,
    fixed: FixedParams,
    cell_size: f64,
    metrics: &[MetricKind],
    out_dir: &Path,
    seed: Option<u64>,
    command: Vec<String>,
) -> Result<()> {
    let cfg = load_with_seed(config, seed)?;
    if metrics.is_empty() {
        return Err(Error::InvalidInput("no metrics requested".into()));
    }
    let grids = sweep_grid(&cfg, fixed, cell_size, metrics)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut outputs = Vec::new();
    for grid in &grids {
        let (csv, side) = export_grid(grid, out_dir.join(format!("{}.csv", grid.metric)))?;
        outputs.push(display(&csv));
        outputs.push(display(&side));
    }
    let manifest_path = out_dir.join("manifest.json");
    RunManifest::new(cfg.config_hash(), cfg.master_seed, command, outputs.clone()).write(&manifest_path)?;
    for o in &outputs {
        println!("wrote {o}");
    }
    Ok(())
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

pub fn cmd_optimize(
    config: &Path,
    search_params: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
    command: Vec<String>,
) -> Result<()> {
    let cfg = load_with_seed(config, seed)?;
    let params = match search_params {
        Some(p) => SearchParams::from_json_str(&fs::read_to_string(p).map_err(|e| Error::io(p, e))?)?,
        None => SearchParams::default(),
    };
    let result = iterative_search(&cfg, &params)?;
    let doc = ResultDocument::new(&cfg, &params, result);
    let table = render_table(&doc.representatives);

    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(out, doc.to_json_string()).map_err(|e| Error::io(out, e))?;
    let table_path = sibling(out, "table.txt");
    fs::write(&table_path, &table).map_err(|e| Error::io(&table_path, e))?;
    let outputs = vec![display(out), display(&table_path)];
    RunManifest::new(cfg.config_hash(), cfg.master_seed, command, outputs).write(&sibling(out, "manifest.json"))?;

    println!(
        "evaluated {} candidates in {} rounds (converged: {})",
        doc.candidates.len(),
        doc.rounds_executed,
        doc.converged
    );
    print!("{table}");
    Ok(())
}

pub fn cmd_report(result: &Path) -> Result<()> {
    let doc = ResultDocument::load(result)?;
    doc.validate()?;
    print!("{}", render_table(&doc.representatives));
    Ok(())
}
