//! Long-time spontaneous emission spectrum of the free-space |2> -> |0>
//! transition, `S(delta) = gamma / |-i delta + gamma/2 + K~(-i delta)|^2`
//! (proportionality constant 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::check_increasing;
use crate::reservoir::{kernel_laplace_on_axis, AxisKernel, ReservoirModel};

/// Offset from a band edge at which dark lines are verified.
pub const EDGE_PROBE_OFFSET: f64 = 1e-6;
/// Dark-line threshold relative to the spectrum maximum.
pub const DARK_LINE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionParams {
    /// Free-space decay rate, in units of beta.
    pub gamma: f64,
    pub reservoir: ReservoirModel,
}

impl EmissionParams {
    pub fn new(gamma: f64, reservoir: ReservoirModel) -> Self {
        EmissionParams { gamma, reservoir }
    }

    pub(crate) fn check_gamma(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::invalid("gamma", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionSpectrum {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub dark_lines: Vec<f64>,
    pub peaks: Vec<(f64, f64)>,
}

impl EmissionSpectrum {
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Spectrum value at one detuning. Exactly zero on a band edge.
pub fn emission_value(params: &EmissionParams, delta: f64) -> f64 {
    match kernel_laplace_on_axis(&params.reservoir, delta) {
        AxisKernel::BandEdge => 0.0,
        AxisKernel::Finite(k) => {
            let denom = num_complex::Complex64::new(0.5 * params.gamma, -delta) + k;
            params.gamma / denom.norm_sqr()
        }
    }
}

/// Evaluates the spectrum on `grid`, then fills in dark lines and peaks.
///
/// The dark-line list is the verified band-edge set from [`find_dark_lines`];
/// a verification failure is returned as an error.
pub fn spectrum_eval(params: &EmissionParams, grid: &[f64]) -> Result<EmissionSpectrum> {
    check_increasing(grid)?;
    params.check_gamma()?;
    let values: Vec<f64> = grid.iter().map(|&d| emission_value(params, d)).collect();
    let mut spectrum = EmissionSpectrum {
        grid: grid.to_vec(),
        values,
        dark_lines: Vec::new(),
        peaks: Vec::new(),
    };
    spectrum.dark_lines = find_dark_lines(&spectrum, params)?;
    spectrum.peaks = find_peaks(&spectrum);
    Ok(spectrum)
}

/// Returns the band edges of the model after checking that the spectrum
/// vanishes there, and that it has no other zero on the grid.
pub fn find_dark_lines(spectrum: &EmissionSpectrum, params: &EmissionParams) -> Result<Vec<f64>> {
    let edges = params.reservoir.band_edges();
    let max = spectrum.max_value();
    if max <= 0.0 {
        return Err(Error::DarkLineContract(
            "spectrum is identically zero".into(),
        ));
    }
    let threshold = DARK_LINE_TOLERANCE * max;

    for &edge in &edges {
        if emission_value(params, edge) != 0.0 {
            return Err(Error::DarkLineContract(format!(
                "S({edge}) is not exactly zero"
            )));
        }
        for offset in [-EDGE_PROBE_OFFSET, EDGE_PROBE_OFFSET] {
            let s = emission_value(params, edge + offset);
            if s > threshold {
                return Err(Error::DarkLineContract(format!(
                    "S({edge} {offset:+e}) = {s:.3e} exceeds {threshold:.3e}"
                )));
            }
        }
    }

    // Any other interior minimum that drops to the dark-line level is a zero the
    // model does not predict.
    let grid = &spectrum.grid;
    let values = &spectrum.values;
    for i in 1..values.len().saturating_sub(1) {
        let is_min = values[i] <= values[i - 1] && values[i] <= values[i + 1];
        if !is_min || values[i] > threshold {
            continue;
        }
        let spacing = local_spacing(grid, i);
        let near_edge = edges.iter().any(|&e| (grid[i] - e).abs() <= spacing);
        if !near_edge {
            return Err(Error::DarkLineContract(format!(
                "unexpected zero near delta = {}",
                grid[i]
            )));
        }
    }
    Ok(edges)
}

fn local_spacing(grid: &[f64], i: usize) -> f64 {
    (grid[i] - grid[i - 1]).max(grid[i + 1] - grid[i])
}

/// Strict discrete local maxima, refined by a parabola through the three
/// bracketing samples.
pub fn find_peaks(spectrum: &EmissionSpectrum) -> Vec<(f64, f64)> {
    local_maxima(&spectrum.grid, &spectrum.values)
}

pub(crate) fn local_maxima(x: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let mut peaks = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        if y[i] > y[i - 1] && y[i] > y[i + 1] {
            peaks.push(parabolic_vertex(
                (x[i - 1], y[i - 1]),
                (x[i], y[i]),
                (x[i + 1], y[i + 1]),
            ));
        }
    }
    peaks
}

fn parabolic_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> (f64, f64) {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let a = x1 - x0;
    let b = x1 - x2;
    let num = a * a * (y1 - y2) - b * b * (y1 - y0);
    let den = a * (y1 - y2) - b * (y1 - y0);
    if den == 0.0 {
        return p1;
    }
    let xv = x1 - 0.5 * num / den;
    // Lagrange form of the interpolant evaluated at the vertex.
    let l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
    (xv, y0 * l0 + y1 * l1 + y2 * l2)
}
