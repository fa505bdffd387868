//! `seba`: spectra, mode fields, localization tables and sweeps for a point
//! scatterer on a unit-area rectangle.
//!
//! Exit codes: 0 success, 1 usage, 2 numerical failure, 3 I/O failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use seba::config::{ConfigError, RunConfig};
use seba::output;
use seba::{
    amplitude_curve, mode_field, scan_alpha, solve, sweep_eccentricity, table, SebaError,
};

#[derive(Parser, Debug)]
#[command(name = "seba", version, about = "Point scatterer on a unit-area Dirichlet rectangle")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Eccentricity of the plate (a = sqrt(E), b = 1/sqrt(E))
    #[arg(long = "E", alias = "e-ratio", global = true, allow_hyphen_values = true)]
    eccentricity: Option<String>,
    /// Coupling constant; `inf` means no scatterer
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Number of modes
    #[arg(long, global = true)]
    count: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    x0_ratio: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    y0_ratio: Option<String>,
    /// Basis cutoff, or `auto`
    #[arg(long, global = true, allow_hyphen_values = true)]
    cutoff: Option<String>,
    /// Spectral cutoff for the amplitude at the scatterer, or `basis`
    #[arg(long, global = true, allow_hyphen_values = true)]
    amplitude_cutoff: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    threshold_low: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    threshold_high: Option<String>,
    /// Field grid as NXxNY
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Mode index for `field`
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Explicit coupling grid, comma separated
    #[arg(long, global = true, allow_hyphen_values = true)]
    alphas: Option<String>,
    /// Size of the default tan-spaced coupling grid
    #[arg(long, global = true)]
    alpha_samples: Option<String>,
    /// Clip of the default tan-spaced coupling grid
    #[arg(long, global = true)]
    alpha_clip: Option<String>,
    /// Eccentricities for `sweep-ecc`, comma separated
    #[arg(long = "E-grid", global = true)]
    eccentricity_grid: Option<String>,
    /// Mode indices for `amp-curve`, comma separated
    #[arg(long, global = true)]
    modes: Option<String>,
    /// Coupling range for `amp-curve` as LO,HI
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha_range: Option<String>,
    /// Number of couplings for `amp-curve`
    #[arg(long, global = true)]
    samples: Option<String>,
    /// Count unperturbed modes as localized too
    #[arg(long, global = true)]
    include_unperturbed: bool,
    /// Disable the Weyl tail correction of F
    #[arg(long, global = true)]
    no_tail: bool,
    /// Output file (default: standard output)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write the field as a binary PGM image
    #[arg(long, global = true)]
    pgm: Option<PathBuf>,
    /// Flat key=value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Eigenvalues with their Dirichlet brackets
    Spectrum,
    /// |psi|^2 of one mode on a grid
    Field,
    /// R1, amplitude and localization flag per mode
    Table,
    /// Localized mode count over a coupling grid
    SweepAlpha,
    /// Best localized count per eccentricity
    SweepEcc,
    /// Amplitude at the scatterer against the coupling
    AmpCurve,
}

enum Failure {
    Usage(String),
    Numerical(SebaError),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<SebaError> for Failure {
    fn from(err: SebaError) -> Self {
        Failure::Numerical(err)
    }
}

impl From<ConfigError> for Failure {
    fn from(err: ConfigError) -> Self {
        Failure::Usage(err.to_string())
    }
}

fn io_failure(path: &Path, err: io::Error) -> Failure {
    Failure::Io(format!("{}: {err}", path.display()))
}

fn flag_settings(cli: &Cli) -> Vec<(&'static str, String)> {
    let optional = [
        ("E", &cli.eccentricity),
        ("alpha", &cli.alpha),
        ("count", &cli.count),
        ("x0_ratio", &cli.x0_ratio),
        ("y0_ratio", &cli.y0_ratio),
        ("basis_cutoff", &cli.cutoff),
        ("amplitude_cutoff", &cli.amplitude_cutoff),
        ("threshold_low", &cli.threshold_low),
        ("threshold_high", &cli.threshold_high),
        ("grid", &cli.grid),
        ("mode", &cli.mode),
        ("alpha_samples", &cli.alpha_samples),
        ("alpha_clip", &cli.alpha_clip),
        ("alphas", &cli.alphas),
        ("E_grid", &cli.eccentricity_grid),
        ("modes", &cli.modes),
        ("alpha_range", &cli.alpha_range),
        ("samples", &cli.samples),
    ];
    let mut settings: Vec<_> = optional
        .into_iter()
        .filter_map(|(key, value)| value.clone().map(|v| (key, v)))
        .collect();
    if cli.include_unperturbed {
        settings.push(("include_unperturbed", "true".into()));
    }
    if cli.no_tail {
        settings.push(("tail_correction", "false".into()));
    }
    settings
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut config = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
        config.apply_text(&text)?;
    }
    for (key, value) in flag_settings(cli) {
        config.set(key, &value)?;
    }
    Ok(config)
}

fn configure_threads() -> Result<(), Failure> {
    let threads = match std::env::var("SEBA_THREADS") {
        Ok(value) => value
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure::Usage(format!("SEBA_THREADS: malformed value {value:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("SEBA_THREADS: {e}")))
}

fn run(command: Command, config: &RunConfig, pgm: Option<&Path>) -> Result<Vec<u8>, Failure> {
    let params = config.experiment();
    let e = config.eccentricity;
    let mut out = Vec::new();
    let write_err = |e: io::Error| Failure::Io(e.to_string());
    match command {
        Command::Spectrum => {
            let (_, spectrum) = solve(e, config.alpha, &params)?;
            output::write_spectrum(&mut out, &spectrum).map_err(write_err)?;
        }
        Command::Table => {
            let (_, records) = table(e, config.alpha, &params)?;
            output::write_table(&mut out, &records).map_err(write_err)?;
        }
        Command::Field => {
            let params = seba::ExperimentParams {
                count: config.mode,
                ..params
            };
            let (basis, spectrum) = solve(e, config.alpha, &params)?;
            let mode = &spectrum.modes[config.mode - 1];
            let (nx, ny) = config.grid;
            let intensity = mode_field(mode, &basis, nx, ny)?.map(|v| v * v);
            output::write_field(&mut out, &intensity).map_err(write_err)?;
            if let Some(path) = pgm {
                let mut image = Vec::new();
                output::write_pgm(&mut image, &intensity).map_err(write_err)?;
                fs::write(path, image).map_err(|e| io_failure(path, e))?;
            }
        }
        Command::SweepAlpha => {
            let grid = config.alpha_grid.values();
            if grid.is_empty() {
                return Err(Failure::Usage("alpha grid is empty".into()));
            }
            let sweep = scan_alpha(params.geometry(e)?, &grid, &params)?;
            output::write_alpha_sweep(&mut out, &sweep).map_err(write_err)?;
        }
        Command::SweepEcc => {
            let grid = config.alpha_grid.values();
            if grid.is_empty() || config.eccentricity_grid.is_empty() {
                return Err(Failure::Usage("sweep grid is empty".into()));
            }
            let sweep = sweep_eccentricity(&config.eccentricity_grid, &grid, &params)?;
            output::write_eccentricity_sweep(&mut out, &sweep).map_err(write_err)?;
        }
        Command::AmpCurve => {
            let rows = amplitude_curve(
                params.geometry(e)?,
                &config.modes,
                config.alpha_range,
                config.samples,
                &params,
            )?;
            output::write_amplitude_curve(&mut out, &rows).map_err(write_err)?;
        }
    }
    Ok(out)
}

fn main_inner() -> Result<(), Failure> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if !err.use_stderr() => {
            let _ = err.print();
            return Ok(());
        }
        Err(err) => return Err(Failure::Usage(err.render().to_string())),
    };
    if cli.pgm.is_some() && !matches!(cli.command, Command::Field) {
        return Err(Failure::Usage("--pgm only applies to `field`".into()));
    }
    configure_threads()?;
    let config = resolve_config(&cli)?;
    eprint!("{}", config.emit());

    let bytes = run(cli.command, &config, cli.pgm.as_deref())?;
    match &cli.out {
        Some(path) => fs::write(path, &bytes).map_err(|e| io_failure(path, e)),
        None => io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("usage error: {}", msg.trim_end()),
                Failure::Numerical(err) => eprintln!("numerical error: {err}"),
                Failure::Io(msg) => eprintln!("i/o error: {msg}"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
