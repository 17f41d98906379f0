//! Argument parsing and subcommand dispatch.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use radpol::acceptance::{run_all, AcceptanceConfig};
use radpol::fields::{emit_map, render_decomposition, Decomposition, MapFormat, MapLayer};

use crate::config::{parse_config, ConfigError, ExperimentConfig, SampleSpec, Scheme};
use crate::error::CliError;
use crate::output::{render_outcomes, render_result, render_sweep, write_output, Format};
use crate::run::{render_output, run, sweep};

#[derive(Debug, Parser)]
#[command(name = "radpol", version, about = "Single-shot Mueller polarimetry with radially polarized beams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Overrides the number of noisy trials.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// oracle, conventional, two_dof_bench or all.
    #[arg(long, global = true)]
    pub scheme: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the configured schemes and report Mueller estimates and errors.
    Simulate,
    /// Write the transverse field behind the sample (CSV, or a P6 pixmap with --layer).
    Render(RenderArgs),
    /// Noise sweep over the configured relative noise levels.
    Sweep,
    /// Run the acceptance checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Write a pixmap of this layer instead of CSV.
    #[arg(long, value_enum)]
    pub layer: Option<LayerArg>,
    /// Render the bare radial beam through one of its equivalent decompositions.
    #[arg(long, value_enum)]
    pub decomposition: Option<DecompositionArg>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Smaller sample counts, same tolerances.
    #[arg(long)]
    pub quick: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LayerArg {
    Intensity,
    PhaseX,
    PhaseY,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DecompositionArg {
    Hg,
    Diagonal,
    Circular,
}

fn load(common: &Common, required: bool) -> Result<Option<ExperimentConfig>, CliError> {
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None if required => {
            return Err(ConfigError::Validation { field: "--config".into(), message: "a config file is required".into() }.into())
        }
        None => return Ok(None),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(trials) = common.trials {
        if trials < 1 {
            return Err(ConfigError::Validation { field: "--trials".into(), message: "must be >= 1".into() }.into());
        }
        config.trials = trials;
    }
    if let Some(name) = &common.scheme {
        config.scheme = Scheme::parse(name).ok_or_else(|| ConfigError::Validation {
            field: "--scheme".into(),
            message: format!("unknown scheme `{name}`"),
        })?;
    }
    Ok(Some(config))
}

fn identity_config() -> ExperimentConfig {
    ExperimentConfig {
        sample: SampleSpec::Elements(vec![]),
        scheme: Scheme::All,
        noise: None,
        trials: 1,
        seed: 0,
        render: None,
        sweep_sigmas: vec![],
    }
}

fn do_render(common: &Common, args: &RenderArgs) -> Result<(), CliError> {
    let config = load(common, false)?;
    let map = match args.decomposition {
        Some(d) => {
            let d = match d {
                DecompositionArg::Hg => Decomposition::HermiteGauss,
                DecompositionArg::Diagonal => Decomposition::Diagonal,
                DecompositionArg::Circular => Decomposition::Circular,
            };
            render_decomposition(d, &config.as_ref().and_then(|c| c.render).unwrap_or_default())
        }
        None => render_output(config.as_ref().unwrap_or(&identity_config()))?,
    };
    if common.format == Some(Format::Json) {
        return Err(ConfigError::Validation { field: "--format".into(), message: "field maps are written as csv or pixmap".into() }.into());
    }
    match args.layer {
        Some(layer) => {
            let layer = match layer {
                LayerArg::Intensity => MapLayer::Intensity,
                LayerArg::PhaseX => MapLayer::PhaseX,
                LayerArg::PhaseY => MapLayer::PhaseY,
            };
            let out = common.out.as_deref().ok_or_else(|| ConfigError::Validation {
                field: "--out".into(),
                message: "pixmaps need an output path".into(),
            })?;
            emit_map(&map, out, MapFormat::Pixmap(layer))?;
        }
        None => match common.out.as_deref() {
            Some(out) => emit_map(&map, out, MapFormat::Csv)?,
            None => radpol::fields::write_csv(&map, std::io::stdout().lock())?,
        },
    }
    Ok(())
}

fn do_selftest(common: &Common, args: &SelftestArgs) -> Result<bool, CliError> {
    let mut cfg = AcceptanceConfig::default();
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if args.quick {
        cfg.samples = 500;
        cfg.coherency_samples = 200;
        cfg.haar_members = 20_000;
    }
    let outcomes = run_all(&cfg);
    for o in &outcomes {
        println!("{o}");
    }
    if let Some(out) = &common.out {
        write_output(Some(out), &render_outcomes(&outcomes, common.format.unwrap_or(Format::Json)))?;
    }
    Ok(outcomes.iter().all(|o| o.passed))
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let common = &cli.common;
    let format = common.format.unwrap_or(Format::Json);
    let out: Option<&Path> = common.out.as_deref();
    match &cli.command {
        Command::Simulate => {
            let config = load(common, true)?.expect("required");
            write_output(out, &render_result(&run(&config)?, format))?;
        }
        Command::Sweep => {
            let config = load(common, true)?.expect("required");
            write_output(out, &render_sweep(&sweep(&config)?, format))?;
        }
        Command::Render(args) => do_render(common, args)?,
        Command::Selftest(args) => {
            if !do_selftest(common, args)? {
                eprintln!("selftest: some criteria failed");
                return Ok(3);
            }
        }
    }
    Ok(0)
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("radpol: {e}");
            e.exit_code()
        }
    }
}
