use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{Amplitude, OutputFormat, ScenarioConfig, Task};
use super::output::{render, write_atomic, Table};
use super::presets::select;
use crate::dynamics::{solve_b2, solve_c2, spectrum_from_trajectory, steady_state_c2};
use crate::emission::{spectrum_eval, EmissionParams};
use crate::error::{Error, Result};
use crate::susceptibility::{chi_eval, group_slope_report, ProbeParams};

/// Maximum deviation between time- and frequency-domain spectra, relative to
/// the spectrum maximum.
pub const CROSSCHECK_TOLERANCE: f64 = 0.02;

#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    /// Rendered output in the configured format.
    pub text: String,
    pub written: Option<PathBuf>,
    /// A numerical contract that failed after the series was produced.
    pub contract_failure: Option<Error>,
}

fn pairs(points: &[(f64, f64)]) -> Value {
    Value::from(points.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>())
}

/// Computes the configured series without writing anything.
pub fn execute(config: &ScenarioConfig) -> Result<(Table, Option<Error>)> {
    let edges = config.model.band_edges();
    match config.task {
        Task::Emission => {
            let params = EmissionParams::new(config.gamma, config.model);
            let spectrum = spectrum_eval(&params, &config.grid.samples_snapped(&edges))?;
            let mut table = Table::new(vec!["delta", "S"]);
            table.rows = spectrum
                .grid
                .iter()
                .zip(&spectrum.values)
                .map(|(&d, &s)| vec![d, s])
                .collect();
            table.metadata.insert(
                "dark_lines".into(),
                Value::from(spectrum.dark_lines.clone()),
            );
            table
                .metadata
                .insert("peaks".into(), pairs(&spectrum.peaks));
            Ok((table, None))
        }
        Task::Susceptibility => {
            let params = ProbeParams::new(config.gamma, config.model).with_chi0(config.chi0);
            let response = chi_eval(&params, &config.grid.samples_snapped(&edges))?;
            let mut table = Table::new(vec![
                "delta",
                "re_chi",
                "im_chi",
                "absorption",
                "dispersion",
                "slope",
            ]);
            table.rows = (0..response.grid.len())
                .map(|i| {
                    vec![
                        response.grid[i],
                        response.chi[i].re,
                        response.chi[i].im,
                        response.absorption[i],
                        response.dispersion[i],
                        response.slope[i],
                    ]
                })
                .collect();
            table.metadata.insert(
                "transparency_points".into(),
                Value::from(response.transparency_points.clone()),
            );
            table
                .metadata
                .insert("group_slopes".into(), pairs(&group_slope_report(&response)));
            Ok((table, None))
        }
        Task::Dynamics => {
            let traj = match config.amplitude {
                Amplitude::B2 => solve_b2(
                    &EmissionParams::new(config.gamma, config.model),
                    &config.solver,
                )?,
                Amplitude::C2 => {
                    let params =
                        ProbeParams::new(config.gamma, config.model).with_chi0(config.chi0);
                    let omega = config
                        .omega_rabi
                        .ok_or_else(|| Error::config("omega", "required for amplitude = c2"))?;
                    let delta = config
                        .delta
                        .ok_or_else(|| Error::config("delta", "required for amplitude = c2"))?;
                    solve_c2(&params, omega, delta, &config.solver)?
                }
            };
            let mut table = Table::new(vec!["t", "re", "im", "abs"]);
            table.rows = traj
                .times
                .iter()
                .zip(&traj.values)
                .map(|(&t, z)| vec![t, z.re, z.im, z.norm()])
                .collect();
            table
                .metadata
                .insert("notes".into(), Value::from(traj.notes.clone()));
            if let (Amplitude::C2, Some(omega), Some(delta)) =
                (config.amplitude, config.omega_rabi, config.delta)
            {
                if config.gamma > 0.0 {
                    let params = ProbeParams::new(config.gamma, config.model);
                    let steady = steady_state_c2(&params, omega, delta)?;
                    table.metadata.insert(
                        "steady_state".into(),
                        json!({
                            "re": steady.value.re,
                            "im": steady.value.im,
                            "divergent_kernel": steady.divergent_kernel,
                        }),
                    );
                }
            }
            Ok((table, None))
        }
        Task::Crosscheck => {
            let params = EmissionParams::new(config.gamma, config.model);
            let grid = config.grid.samples_snapped(&edges);
            let frequency = spectrum_eval(&params, &grid)?;
            let traj = solve_b2(&params, &config.solver)?;
            let time = spectrum_from_trajectory(&traj, &params, &grid)?;
            let max = frequency.max_value();
            let deviation = frequency
                .values
                .iter()
                .zip(&time.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / max;
            let passed = deviation < CROSSCHECK_TOLERANCE;

            let mut table = Table::new(vec!["delta", "S_frequency", "S_time"]);
            table.rows = (0..grid.len())
                .map(|i| vec![grid[i], frequency.values[i], time.values[i]])
                .collect();
            table
                .metadata
                .insert("max_rel_dev".into(), Value::from(deviation));
            table
                .metadata
                .insert("tail_abs_b2".into(), Value::from(traj.tail_magnitude()));
            table.metadata.insert("passed".into(), Value::from(passed));
            table.csv_trailer = vec!["max_rel_dev".into(), "tail_abs_b2".into(), "passed".into()];
            let failure = (!passed).then_some(Error::CrossCheck {
                deviation,
                tolerance: CROSSCHECK_TOLERANCE,
            });
            Ok((table, failure))
        }
    }
}

/// Executes `config`, renders the series and writes it atomically when an
/// output path is configured.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Outcome> {
    let (table, contract_failure) = execute(config)?;
    let text = render(config, &table)?;
    let written = match &config.output_path {
        Some(path) => {
            write_atomic(path, &text)?;
            Some(path.clone())
        }
        None => None,
    };
    Ok(Outcome {
        table,
        text,
        written,
        contract_failure,
    })
}

/// Runs every curve of a figure (or a single curve) and writes one file per
/// curve into `out_dir`. Curves are computed in parallel.
pub fn reproduce_figure(name: &str, out_dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    let curves = select(name)?;
    let rendered = curves
        .par_iter()
        .map(|preset| {
            let mut config = preset.config.clone();
            config.output_format = format;
            let (table, failure) = execute(&config)?;
            if let Some(err) = failure {
                return Err(err);
            }
            let path = out_dir.join(format!("{}.{}", preset.file_stem(), format.extension()));
            Ok((path, render(&config, &table)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut written = Vec::with_capacity(rendered.len());
    for (path, text) in rendered {
        write_atomic(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}
