use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pbg_core::scenario::{parse_config, reproduce_figure, run_scenario, OutputFormat};
use pbg_core::Error;
use serde_json::json;

/// Emission spectra, probe susceptibility and amplitude dynamics of a
/// three-level atom near a photonic band gap.
#[derive(Parser, Debug)]
#[command(name = "spectra", version)]
struct Cli {
    /// emission, susceptibility, dynamics, crosscheck or reproduce
    command: String,
    /// Preset or figure name for `reproduce`
    name: Option<String>,

    /// Key/value configuration file; flags override its entries
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// none, single or double
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dg1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dg2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dg: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    chi0: Option<String>,
    /// Probe Rabi frequency
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    /// Probe detuning
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Detuning grid as MIN:MAX:N
    #[arg(long, value_name = "MIN:MAX:N", allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tmax: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    /// b2 (emission) or c2 (probe) amplitude for `dynamics`
    #[arg(long)]
    amplitude: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Output file, or output directory for `reproduce`
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl Cli {
    fn overrides(&self) -> Result<Vec<(String, String)>, Error> {
        let mut pairs = vec![("task".to_string(), self.command.clone())];
        let flags = [
            ("model", &self.model),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("dg1", &self.dg1),
            ("dg2", &self.dg2),
            ("dg", &self.dg),
            ("chi0", &self.chi0),
            ("omega", &self.omega),
            ("delta", &self.delta),
            ("t_max", &self.tmax),
            ("steps", &self.steps),
            ("amplitude", &self.amplitude),
            ("output_format", &self.format),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                pairs.push((key.to_string(), v.clone()));
            }
        }
        if let Some(grid) = &self.grid {
            let parts: Vec<&str> = grid.split(':').collect();
            let [min, max, n] = parts.as_slice() else {
                return Err(Error::config("grid", "expected MIN:MAX:N"));
            };
            pairs.push(("grid_min".into(), min.to_string()));
            pairs.push(("grid_max".into(), max.to_string()));
            pairs.push(("grid_points".into(), n.to_string()));
        }
        if let Some(out) = &self.out {
            pairs.push(("output_path".into(), out.display().to_string()));
        }
        Ok(pairs)
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("SPECTRA_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::config("SPECTRA_THREADS", "must be a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::config("SPECTRA_THREADS", e.to_string()))
}

fn reproduce(cli: &Cli) -> Result<(), Error> {
    let name = cli
        .name
        .as_deref()
        .ok_or_else(|| Error::config("name", "reproduce needs a preset or figure name"))?;
    let format: OutputFormat = match &cli.format {
        Some(f) => f.parse()?,
        None => OutputFormat::Csv,
    };
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    for path in reproduce_figure(name, &dir, format)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    configure_threads()?;
    if cli.command == "reproduce" {
        return reproduce(cli);
    }
    if cli.name.is_some() {
        return Err(Error::config("name", "only `reproduce` takes a name"));
    }
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    let config = parse_config(&text, &cli.overrides()?)?;
    let outcome = run_scenario(&config)?;
    if outcome.written.is_none() {
        print!("{}", outcome.text);
    }
    match outcome.contract_failure {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let record = json!({
                "error": err.kind(),
                "message": err.to_string(),
                "exit_code": err.exit_code(),
            });
            eprintln!("{record}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
