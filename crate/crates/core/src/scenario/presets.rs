//! Parameter sets of the published figure curves. All are in units of beta with
//! gamma = 1; detuning grids default to [-5, 5] with 2001 points since the
//! plotted ranges are not stated.

use super::config::{
    Amplitude, OutputFormat, ScenarioConfig, Task, DEFAULT_STEPS, DEFAULT_T_MAX_GAMMA,
};
use crate::dynamics::SolverGrid;
use crate::error::{Error, Result};
use crate::grid::DetuningGrid;
use crate::reservoir::ReservoirModel;

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub name: &'static str,
    pub config: ScenarioConfig,
}

impl FigurePreset {
    /// Output file stem built from the curve name and its caption parameters.
    pub fn file_stem(&self) -> String {
        match self.config.model {
            ReservoirModel::None => format!("{}_markov", self.name),
            ReservoirModel::SingleBand { edge, .. } => format!("{}_dg={edge}", self.name),
            ReservoirModel::DoubleBand {
                lower_edge,
                upper_edge,
                ..
            } => format!("{}_dg1={lower_edge}_dg2={upper_edge}", self.name),
        }
    }
}

fn base(task: Task, model: ReservoirModel) -> ScenarioConfig {
    ScenarioConfig {
        task,
        model,
        gamma: 1.0,
        chi0: 1.0,
        amplitude: Amplitude::B2,
        omega_rabi: None,
        delta: None,
        grid: DetuningGrid::default(),
        solver: SolverGrid {
            t_max: DEFAULT_T_MAX_GAMMA,
            steps: DEFAULT_STEPS,
        },
        output_path: None,
        output_format: OutputFormat::Csv,
    }
}

fn double(lower_edge: f64, upper_edge: f64) -> ReservoirModel {
    ReservoirModel::DoubleBand {
        beta: 1.0,
        lower_edge,
        upper_edge,
    }
}

fn single(edge: f64) -> ReservoirModel {
    ReservoirModel::SingleBand { beta: 1.0, edge }
}

pub fn presets() -> Vec<FigurePreset> {
    use Task::{Emission, Susceptibility};
    let table: [(&'static str, Task, ReservoirModel); 16] = [
        ("fig2a_1", Emission, double(-1.0, 0.0)),
        ("fig2a_2", Emission, double(-2.0, 0.0)),
        ("fig2a_3", Emission, double(-3.0, 0.0)),
        ("fig2b_1", Emission, double(-1.0, 1.0)),
        ("fig2b_2", Emission, double(-2.0, 2.0)),
        ("fig2b_3", Emission, double(-3.0, 3.0)),
        ("fig3_1", Emission, single(0.0)),
        ("fig3_2", Emission, single(1.0)),
        ("fig3_3", Emission, single(-1.0)),
        ("fig4a", Susceptibility, double(-1.0, 0.0)),
        ("fig4b", Susceptibility, double(-2.0, 0.0)),
        ("fig4c", Susceptibility, double(-3.0, 0.0)),
        ("fig5", Susceptibility, single(0.0)),
        ("fig6a", Susceptibility, double(-1.0, 1.0)),
        ("fig6b", Susceptibility, double(-2.0, 2.0)),
        ("fig6c", Susceptibility, double(-3.0, 3.0)),
    ];
    table
        .into_iter()
        .map(|(name, task, model)| FigurePreset {
            name,
            config: base(task, model),
        })
        .collect()
}

/// Accepted request names: every curve plus the figure groups they belong to.
pub fn valid_names() -> Vec<String> {
    let mut names: Vec<String> = ["fig2", "fig2a", "fig2b", "fig3", "fig4", "fig5", "fig6"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for p in presets() {
        if !names.iter().any(|n| n == p.name) {
            names.push(p.name.to_string());
        }
    }
    names
}

/// Curves named by `name`, either one curve or a whole figure/panel.
pub fn select(name: &str) -> Result<Vec<FigurePreset>> {
    if !valid_names().iter().any(|n| n == name) {
        return Err(Error::config(
            "preset",
            format!(
                "unknown preset '{name}'; valid names: {}",
                valid_names().join(", ")
            ),
        ));
    }
    Ok(presets()
        .into_iter()
        .filter(|p| p.name.starts_with(name))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(name: &str) -> Vec<Vec<f64>> {
        select(name)
            .unwrap()
            .iter()
            .map(|p| p.config.model.band_edges())
            .collect()
    }

    #[test]
    fn fig2a_curves() {
        assert_eq!(
            edges("fig2a"),
            vec![vec![-1.0, 0.0], vec![-2.0, 0.0], vec![-3.0, 0.0]]
        );
    }

    #[test]
    fn fig3_curves() {
        assert_eq!(edges("fig3"), vec![vec![0.0], vec![1.0], vec![-1.0]]);
    }

    #[test]
    fn fig6c_single_curve() {
        let curves = select("fig6c").unwrap();
        assert_eq!(curves.len(), 1);
        assert_eq!(curves[0].config.task, Task::Susceptibility);
        assert_eq!(curves[0].config.model.band_edges(), vec![-3.0, 3.0]);
        assert_eq!(curves[0].file_stem(), "fig6c_dg1=-3_dg2=3");
    }

    #[test]
    fn all_presets_use_unit_rates() {
        let all = presets();
        assert_eq!(all.len(), 16);
        for p in all {
            assert_eq!(p.config.gamma, 1.0);
            assert_eq!(p.config.model.beta(), 1.0);
        }
    }

    #[test]
    fn unknown_preset_lists_names() {
        let err = select("fig7").unwrap_err();
        assert!(err.to_string().contains("fig2a"));
        assert!(select("fig").is_err());
    }
}
