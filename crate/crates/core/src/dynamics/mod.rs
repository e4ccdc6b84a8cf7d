//! Time-domain solver for the memory-kernel amplitude equations
//!
//! ```text
//! b2'(t) = -(gamma/2) b2 - int_0^t K(t - t') b2(t') dt'                      b2(0) = 1
//! c2'(t) = -i Omega + (i delta - gamma/2) c2 - int_0^t K'(t - t') c2(t') dt'   c2(0) = 0
//! ```
//!
//! with `K'(tau) = K(tau) exp(i delta tau)`. The convolution uses product
//! integration: the amplitude is interpolated linearly on each panel and the
//! singular factor `exp(-i a tau)/sqrt(pi tau)` is integrated exactly against
//! it. Time stepping is an integrating-factor trapezoidal rule, implicit in the
//! newest value, so the kernel-free equation is integrated exactly.

mod convergence;
mod moments;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emission::{find_peaks, EmissionParams, EmissionSpectrum};
use crate::error::{Error, Result};
use crate::grid::check_increasing;
use crate::reservoir::ReservoirModel;
use crate::susceptibility::{probe_resolvent, ProbeParams};

pub use convergence::{convergence_check, ConvergenceReport};

/// Largest tolerated `|b2|` over the last percent of a trajectory before its
/// Fourier transform is trusted as the long-time spectrum.
pub const TAIL_LIMIT: f64 = 1e-3;
/// Slack on the `|b2| <= 1` bound before a step is rejected.
pub const NORM_SLACK: f64 = 1e-6;
pub const SLOW_RELAXATION_NOTE: &str = "band-edge: slow relaxation";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverGrid {
    /// Final time in units of `1/beta`.
    pub t_max: f64,
    pub steps: usize,
}

impl SolverGrid {
    pub fn new(t_max: f64, steps: usize) -> Result<Self> {
        let grid = SolverGrid { t_max, steps };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::invalid("t_max", "must be > 0"));
        }
        if self.steps < 2 {
            return Err(Error::invalid("steps", "must be >= 2"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.steps as f64
    }

    pub fn refined(&self, factor: usize) -> SolverGrid {
        SolverGrid {
            t_max: self.t_max,
            steps: self.steps * factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeKind {
    B2Emission,
    C2Probe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum TrajectoryParams {
    Emission {
        params: EmissionParams,
        grid: SolverGrid,
    },
    Probe {
        params: ProbeParams,
        omega_rabi: f64,
        delta: f64,
        grid: SolverGrid,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub kind: AmplitudeKind,
    pub params_echo: TrajectoryParams,
    pub notes: Vec<String>,
}

impl AmplitudeTrajectory {
    pub fn final_value(&self) -> Complex64 {
        *self
            .values
            .last()
            .expect("trajectory has at least two samples")
    }

    /// Largest modulus over the last percent of samples.
    pub fn tail_magnitude(&self) -> f64 {
        let n = self.values.len();
        let window = (n / 100).max(1);
        self.values[n - window..]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Convolution weights for one combined kernel on a uniform grid.
struct ConvolutionWeights {
    /// Weight of the newest sample.
    diagonal: Complex64,
    /// `interior[j]` multiplies `y[n - j]` for `1 <= j < n` (index 0 unused).
    interior: Vec<Complex64>,
    /// `first[n - 1]` multiplies `y[0]`.
    first: Vec<Complex64>,
}

impl ConvolutionWeights {
    fn new(terms: &[(Complex64, f64)], h: f64, steps: usize) -> Self {
        let mut near = vec![Complex64::new(0.0, 0.0); steps];
        let mut far = vec![Complex64::new(0.0, 0.0); steps];
        for &(weight, frequency) in terms {
            let panel = moments::panel_weights(frequency, h, steps);
            for m in 0..steps {
                near[m] += weight * panel.near[m];
                far[m] += weight * panel.far[m];
            }
        }
        let mut interior = vec![Complex64::new(0.0, 0.0); steps];
        for j in 1..steps {
            interior[j] = near[j] + far[j - 1];
        }
        ConvolutionWeights {
            diagonal: near[0],
            interior,
            first: far,
        }
    }

    /// Convolution history at step `n`, excluding the newest sample.
    fn history(&self, y: &[Complex64], n: usize) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (w, v) in self.interior[1..n].iter().zip(y[1..n].iter().rev()) {
            re += w.re * v.re - w.im * v.im;
            im += w.re * v.im + w.im * v.re;
        }
        Complex64::new(re, im) + self.first[n - 1] * y[0]
    }
}

/// Solves `y' = source + linear * y - int_0^t K(t-t') y(t') dt'` on `grid`.
fn integrate(
    terms: &[(Complex64, f64)],
    linear: Complex64,
    source: Complex64,
    initial: Complex64,
    grid: &SolverGrid,
    norm_bound: Option<f64>,
) -> Result<Vec<Complex64>> {
    let steps = grid.steps;
    let h = grid.dt();
    let weights = ConvolutionWeights::new(terms, h, steps);
    let propagator = (linear * h).exp();
    let half = 0.5 * h;
    let denom = Complex64::new(1.0, 0.0) + half * weights.diagonal;
    let failure = Error::NonConvergent {
        dt: h,
        suggested_dt: 0.5 * h,
    };
    if denom.norm() < 1e-12 {
        return Err(failure);
    }

    let mut y = Vec::with_capacity(steps + 1);
    y.push(initial);
    // forcing g = source - convolution; the convolution vanishes at t = 0
    let mut forcing_prev = source;
    for n in 1..=steps {
        let history = weights.history(&y, n);
        let rhs = propagator * y[n - 1] + half * (propagator * forcing_prev + source - history);
        let next = rhs / denom;
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(failure);
        }
        if let Some(bound) = norm_bound {
            if next.norm() > bound {
                return Err(failure);
            }
        }
        forcing_prev = source - weights.diagonal * next - history;
        y.push(next);
    }
    Ok(y)
}

fn time_samples(grid: &SolverGrid) -> Vec<f64> {
    let h = grid.dt();
    (0..=grid.steps).map(|i| i as f64 * h).collect()
}

/// Excited-state amplitude `b2(t)` for spontaneous emission from `|2>`.
pub fn solve_b2(params: &EmissionParams, grid: &SolverGrid) -> Result<AmplitudeTrajectory> {
    grid.validate()?;
    if !(params.gamma.is_finite() && params.gamma >= 0.0) {
        return Err(Error::invalid("gamma", "must be >= 0"));
    }
    if params.gamma == 0.0 && params.reservoir == ReservoirModel::None {
        return Err(Error::invalid(
            "gamma",
            "must be > 0 when no reservoir is configured",
        ));
    }
    let values = integrate(
        &params.reservoir.kernel_terms(),
        Complex64::new(-0.5 * params.gamma, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        grid,
        Some(1.0 + NORM_SLACK),
    )?;
    let mut notes = Vec::new();
    if params.gamma == 0.0 {
        notes.push("gamma = 0: steady-state contracts do not apply".to_string());
    }
    Ok(AmplitudeTrajectory {
        times: time_samples(grid),
        values,
        kind: AmplitudeKind::B2Emission,
        params_echo: TrajectoryParams::Emission {
            params: *params,
            grid: *grid,
        },
        notes,
    })
}

/// Weakly probed excited amplitude `c2(t)` with the ground amplitude frozen at one.
pub fn solve_c2(
    params: &ProbeParams,
    omega_rabi: f64,
    delta: f64,
    grid: &SolverGrid,
) -> Result<AmplitudeTrajectory> {
    grid.validate()?;
    if !(params.gamma.is_finite() && params.gamma >= 0.0) {
        return Err(Error::invalid("gamma", "must be >= 0"));
    }
    if !(omega_rabi.is_finite() && omega_rabi > 0.0) {
        return Err(Error::invalid("omega", "Rabi frequency must be > 0"));
    }
    if !delta.is_finite() {
        return Err(Error::invalid("delta", "must be finite"));
    }
    // K'(tau) = K(tau) exp(i delta tau) shifts every kernel frequency by -delta.
    let terms: Vec<(Complex64, f64)> = params
        .reservoir
        .kernel_terms()
        .into_iter()
        .map(|(weight, frequency)| (weight, frequency - delta))
        .collect();
    let values = integrate(
        &terms,
        Complex64::new(-0.5 * params.gamma, delta),
        Complex64::new(0.0, -omega_rabi),
        Complex64::new(0.0, 0.0),
        grid,
        None,
    )?;

    let mut notes = Vec::new();
    let weak_scale = match params.reservoir {
        ReservoirModel::None => params.gamma,
        _ => params.reservoir.beta().min(params.gamma),
    };
    if omega_rabi > 0.1 * weak_scale {
        notes.push("probe is not weak compared with beta and gamma".to_string());
    }
    if params.gamma == 0.0 {
        notes.push("gamma = 0: steady-state contracts do not apply".to_string());
    }
    let at_edge = params.reservoir.band_edges().contains(&delta);
    let last = values[grid.steps];
    let midway = values[grid.steps / 2];
    let drift = (last - midway).norm() / last.norm().max(1e-12 * omega_rabi);
    if at_edge || drift > 1e-2 {
        notes.push(SLOW_RELAXATION_NOTE.to_string());
    }

    Ok(AmplitudeTrajectory {
        times: time_samples(grid),
        values,
        kind: AmplitudeKind::C2Probe,
        params_echo: TrajectoryParams::Probe {
            params: *params,
            omega_rabi,
            delta,
            grid: *grid,
        },
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub value: Complex64,
    /// Set when `delta` sits on a band edge; the value is then the
    /// continuity limit zero.
    pub divergent_kernel: bool,
}

/// Closed-form `c2(t -> infinity) = Omega / (delta + i gamma/2 + i K~(-i delta))`.
pub fn steady_state_c2(params: &ProbeParams, omega_rabi: f64, delta: f64) -> Result<SteadyState> {
    if !(params.gamma.is_finite() && params.gamma > 0.0) {
        return Err(Error::invalid("gamma", "must be > 0"));
    }
    Ok(
        match probe_resolvent(params.gamma, &params.reservoir, delta) {
            Some(r) => SteadyState {
                value: omega_rabi * r,
                divergent_kernel: false,
            },
            None => SteadyState {
                value: Complex64::new(0.0, 0.0),
                divergent_kernel: true,
            },
        },
    )
}

/// `gamma |int_0^{t_max} b2(t) exp(i delta t) dt|^2` by the trapezoidal rule.
pub fn spectrum_from_trajectory(
    traj: &AmplitudeTrajectory,
    params: &EmissionParams,
    grid: &[f64],
) -> Result<EmissionSpectrum> {
    if traj.kind != AmplitudeKind::B2Emission {
        return Err(Error::invalid(
            "trajectory",
            "expected a b2 emission trajectory",
        ));
    }
    check_increasing(grid)?;
    params.check_gamma()?;
    let tail = traj.tail_magnitude();
    if tail >= TAIL_LIMIT {
        return Err(Error::TailNotDecayed {
            tail,
            limit: TAIL_LIMIT,
        });
    }
    let times = &traj.times;
    let values = &traj.values;
    let last = times.len() - 1;
    let spectrum_values: Vec<f64> = grid
        .par_iter()
        .map(|&delta| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..=last {
                let dt_weight = if i == 0 {
                    0.5 * (times[1] - times[0])
                } else if i == last {
                    0.5 * (times[last] - times[last - 1])
                } else {
                    0.5 * (times[i + 1] - times[i - 1])
                };
                acc += values[i] * Complex64::from_polar(dt_weight, delta * times[i]);
            }
            params.gamma * acc.norm_sqr()
        })
        .collect();

    let mut spectrum = EmissionSpectrum {
        grid: grid.to_vec(),
        values: spectrum_values,
        dark_lines: Vec::new(),
        peaks: Vec::new(),
    };
    let max = spectrum.max_value();
    spectrum.dark_lines = params
        .reservoir
        .band_edges()
        .into_iter()
        .filter(|&edge| {
            nearest(&spectrum.grid, edge)
                .map(|i| (spectrum.grid[i] - edge).abs() < 1e-12 && spectrum.values[i] < 1e-2 * max)
                .unwrap_or(false)
        })
        .collect();
    spectrum.peaks = find_peaks(&spectrum);
    Ok(spectrum)
}

fn nearest(grid: &[f64], x: f64) -> Option<usize> {
    (0..grid.len()).min_by(|&a, &b| (grid[a] - x).abs().total_cmp(&(grid[b] - x).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double(d1: f64, d2: f64) -> ReservoirModel {
        ReservoirModel::double_band(1.0, d1, d2).unwrap()
    }

    #[test]
    fn markovian_decay_is_exact() {
        let params = EmissionParams::new(1.0, ReservoirModel::None);
        let grid = SolverGrid::new(40.0, 4000).unwrap();
        let traj = solve_b2(&params, &grid).unwrap();
        for (t, b) in traj.times.iter().zip(&traj.values) {
            assert!((b - Complex64::new((-0.5 * t).exp(), 0.0)).norm() < 1e-10);
        }
        let at_two = traj.values[200];
        assert!((at_two.norm() - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn initial_conditions() {
        let grid = SolverGrid::new(5.0, 100).unwrap();
        let b2 = solve_b2(&EmissionParams::new(1.0, double(-1.0, 1.0)), &grid).unwrap();
        assert_eq!(b2.values[0], Complex64::new(1.0, 0.0));
        let c2 = solve_c2(&ProbeParams::new(1.0, double(-1.0, 1.0)), 0.01, 0.0, &grid).unwrap();
        assert_eq!(c2.values[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn norm_stays_bounded() {
        let grid = SolverGrid::new(20.0, 4000).unwrap();
        for &(d1, d2) in &[(-1.0, 1.0), (-3.0, 0.0)] {
            let traj = solve_b2(&EmissionParams::new(1.0, double(d1, d2)), &grid).unwrap();
            assert!(traj.values.iter().all(|b| b.norm() <= 1.0 + NORM_SLACK));
        }
    }

    #[test]
    fn reservoir_backflow_is_resolved_not_numerical() {
        // |b2| rises briefly near t ~ 2.7 for the (-1, 1) gap; the rise per unit
        // time is the same at two step sizes.
        let params = EmissionParams::new(1.0, double(-1.0, 1.0));
        let rise_rate = |steps: usize| {
            let grid = SolverGrid::new(10.0, steps).unwrap();
            let traj = solve_b2(&params, &grid).unwrap();
            let max_rise = traj
                .values
                .windows(2)
                .map(|w| w[1].norm() - w[0].norm())
                .fold(f64::MIN, f64::max);
            max_rise / grid.dt()
        };
        let coarse = rise_rate(1000);
        let fine = rise_rate(4000);
        assert!(coarse > 0.0);
        assert!((coarse - fine).abs() < 0.05 * fine);
    }

    #[test]
    fn markovian_probe_steady_state() {
        let params = ProbeParams::new(1.0, ReservoirModel::None);
        let grid = SolverGrid::new(60.0, 6000).unwrap();
        for &delta in &[-1.0, 0.0, 2.0] {
            let traj = solve_c2(&params, 0.01, delta, &grid).unwrap();
            let exact = 0.01 / Complex64::new(delta, 0.5);
            assert!((traj.final_value() - exact).norm() < 1e-3 * exact.norm());
        }
    }

    #[test]
    fn steady_state_closed_form() {
        let none = ProbeParams::new(1.0, ReservoirModel::None);
        let s = steady_state_c2(&none, 0.01, 0.0).unwrap();
        assert!((s.value - Complex64::new(0.0, -0.02)).norm() < 1e-17);
        let gap = ProbeParams::new(1.0, double(-1.0, 1.0));
        let s = steady_state_c2(&gap, 0.01, 0.0).unwrap();
        assert!((s.value - Complex64::new(0.0, -0.02)).norm() < 1e-17);
        let edge = steady_state_c2(&gap, 0.01, -1.0).unwrap();
        assert_eq!(edge.value, Complex64::new(0.0, 0.0));
        assert!(edge.divergent_kernel);
    }

    #[test]
    fn band_edge_probe_is_flagged() {
        let params = ProbeParams::new(1.0, double(-1.0, 1.0));
        let grid = SolverGrid::new(40.0, 2000).unwrap();
        let traj = solve_c2(&params, 0.01, 1.0, &grid).unwrap();
        assert!(traj.notes.iter().any(|n| n == SLOW_RELAXATION_NOTE));
        // tail still creeping towards zero: later |c2| is smaller
        let long = solve_c2(&params, 0.01, 1.0, &SolverGrid::new(160.0, 8000).unwrap()).unwrap();
        assert!(long.final_value().norm() < traj.final_value().norm());
        let away = solve_c2(&params, 0.01, 0.0, &SolverGrid::new(200.0, 10000).unwrap()).unwrap();
        assert!(away.notes.is_empty(), "{:?}", away.notes);
    }

    #[test]
    fn time_domain_centre_of_spectrum() {
        let params = EmissionParams::new(1.0, double(-1.0, 1.0));
        let traj = solve_b2(&params, &SolverGrid::new(100.0, 10000).unwrap()).unwrap();
        let s = spectrum_from_trajectory(&traj, &params, &[0.0]).unwrap();
        assert!((s.values[0] - 4.0).abs() < 0.04, "S(0) = {}", s.values[0]);
    }

    #[test]
    fn undecayed_tail_is_rejected() {
        let params = EmissionParams::new(1.0, ReservoirModel::None);
        let traj = solve_b2(&params, &SolverGrid::new(5.0, 500).unwrap()).unwrap();
        let err = spectrum_from_trajectory(&traj, &params, &[0.0]).unwrap_err();
        assert!(err.to_string().contains("increase t_max"));
    }

    #[test]
    fn rejects_probe_trajectory_for_spectrum() {
        let params = ProbeParams::new(1.0, ReservoirModel::None);
        let traj = solve_c2(&params, 0.01, 0.0, &SolverGrid::new(40.0, 400).unwrap()).unwrap();
        let emission = EmissionParams::new(1.0, ReservoirModel::None);
        assert!(spectrum_from_trajectory(&traj, &emission, &[0.0]).is_err());
    }

    #[test]
    fn invalid_solver_input() {
        assert!(SolverGrid::new(0.0, 10).is_err());
        assert!(SolverGrid::new(1.0, 1).is_err());
        let grid = SolverGrid::new(1.0, 10).unwrap();
        assert!(solve_b2(&EmissionParams::new(0.0, ReservoirModel::None), &grid).is_err());
        assert!(solve_c2(
            &ProbeParams::new(1.0, ReservoirModel::None),
            0.0,
            0.0,
            &grid
        )
        .is_err());
    }
}
