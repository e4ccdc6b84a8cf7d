//! Weak-probe linear susceptibility on the |0> <-> |2> transition.
//!
//! With the ground amplitude frozen at one, the steady-state excited amplitude
//! is `c2 = Omega * R(delta)` where
//! `R(delta) = 1 / (delta + i gamma/2 + i K~(-i delta))`, and
//! `chi = -chi0 * conj(c2) / Omega = -chi0 / (delta - i gamma/2 - i conj K~(-i delta))`.
//!
//! The group velocity is `c / (1 + (omega/2) dRe(chi)/domega)`; only the
//! dimensionless slope `dRe(chi)/d delta` is computed here because the optical
//! carrier frequency is not part of the model.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::check_increasing;
use crate::reservoir::{
    kernel_laplace_on_axis, kernel_laplace_on_axis_derivative, AxisKernel, ReservoirModel,
};

/// Offset from a band edge at which transparency is verified.
pub const EDGE_PROBE_OFFSET: f64 = 1e-6;
/// Transparency threshold relative to `max |chi|`.
pub const TRANSPARENCY_TOLERANCE: f64 = 1e-3;
/// Slack on the leading-order edge asymptote `chi0 sqrt(eps) / strength`.
const EDGE_ASYMPTOTE_SLACK: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    pub gamma: f64,
    pub reservoir: ReservoirModel,
    /// Stands for `4 pi N |mu_02|^2`; arbitrary units.
    pub chi0: f64,
}

impl ProbeParams {
    pub fn new(gamma: f64, reservoir: ReservoirModel) -> Self {
        ProbeParams {
            gamma,
            reservoir,
            chi0: 1.0,
        }
    }

    pub fn with_chi0(mut self, chi0: f64) -> Self {
        self.chi0 = chi0;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::invalid("gamma", "must be > 0"));
        }
        if !(self.chi0.is_finite() && self.chi0 > 0.0) {
            return Err(Error::invalid("chi0", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResponse {
    pub grid: Vec<f64>,
    pub chi: Vec<Complex64>,
    /// `-Im chi`
    pub absorption: Vec<f64>,
    /// `Re chi`
    pub dispersion: Vec<f64>,
    /// `dRe(chi)/d delta` by second-order finite differences.
    pub slope: Vec<f64>,
    pub transparency_points: Vec<f64>,
}

impl ProbeResponse {
    pub fn max_abs_chi(&self) -> f64 {
        self.chi.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Slope at the grid point nearest to `delta`.
    pub fn slope_at(&self, delta: f64) -> Option<f64> {
        nearest_index(&self.grid, delta).map(|i| self.slope[i])
    }
}

fn nearest_index(grid: &[f64], x: f64) -> Option<usize> {
    (0..grid.len()).min_by(|&a, &b| (grid[a] - x).abs().total_cmp(&(grid[b] - x).abs()))
}

/// Steady-state resolvent `1 / (delta + i gamma/2 + i K~(-i delta))`.
/// `None` on a band edge, where the kernel diverges and the limit is zero.
pub(crate) fn probe_resolvent(
    gamma: f64,
    reservoir: &ReservoirModel,
    delta: f64,
) -> Option<Complex64> {
    match kernel_laplace_on_axis(reservoir, delta) {
        AxisKernel::BandEdge => None,
        AxisKernel::Finite(k) => {
            let denom = Complex64::new(delta, 0.5 * gamma) + Complex64::i() * k;
            Some(denom.inv())
        }
    }
}

/// Susceptibility at one detuning; exactly zero on a band edge.
pub fn chi_value(params: &ProbeParams, delta: f64) -> Complex64 {
    match probe_resolvent(params.gamma, &params.reservoir, delta) {
        None => Complex64::new(0.0, 0.0),
        Some(r) => -params.chi0 * r.conj(),
    }
}

/// Closed-form `d chi / d delta`; `None` on a band edge.
pub fn chi_derivative(params: &ProbeParams, delta: f64) -> Option<Complex64> {
    let k = kernel_laplace_on_axis(&params.reservoir, delta).finite()?;
    let dk = kernel_laplace_on_axis_derivative(&params.reservoir, delta).finite()?;
    let i = Complex64::i();
    let denom = Complex64::new(delta, -0.5 * params.gamma) - i * k.conj();
    let ddenom = Complex64::new(1.0, 0.0) - i * dk.conj();
    Some(params.chi0 * ddenom / (denom * denom))
}

pub fn chi_eval(params: &ProbeParams, grid: &[f64]) -> Result<ProbeResponse> {
    check_increasing(grid)?;
    params.validate()?;
    let chi: Vec<Complex64> = grid.iter().map(|&d| chi_value(params, d)).collect();
    let absorption = chi.iter().map(|z| -z.im).collect();
    let dispersion: Vec<f64> = chi.iter().map(|z| z.re).collect();
    let slope = finite_difference_slope(grid, &dispersion);
    let mut response = ProbeResponse {
        grid: grid.to_vec(),
        chi,
        absorption,
        dispersion,
        slope,
        transparency_points: Vec::new(),
    };
    response.transparency_points = transparency_windows(&response, params)?;
    Ok(response)
}

/// Second-order three-point derivative on a possibly non-uniform grid; the
/// end points use one-sided stencils.
pub(crate) fn finite_difference_slope(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    if n == 2 {
        let d = (y[1] - y[0]) / (x[1] - x[0]);
        return vec![d, d];
    }
    let interior = |i: usize| {
        let hl = x[i] - x[i - 1];
        let hr = x[i + 1] - x[i];
        (hl * hl * y[i + 1] - hr * hr * y[i - 1] + (hr * hr - hl * hl) * y[i])
            / (hl * hr * (hl + hr))
    };
    let mut slope = Vec::with_capacity(n);
    {
        let h1 = x[1] - x[0];
        let h2 = x[2] - x[1];
        slope.push(
            -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1]
                - h1 / (h2 * (h1 + h2)) * y[2],
        );
    }
    slope.extend((1..n - 1).map(interior));
    {
        let h1 = x[n - 2] - x[n - 3];
        let h2 = x[n - 1] - x[n - 2];
        slope.push(
            h2 / (h1 * (h1 + h2)) * y[n - 3] - (h1 + h2) / (h1 * h2) * y[n - 2]
                + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * y[n - 1],
        );
    }
    slope
}

/// Band-edge detunings where the medium is transparent.
///
/// Each edge must give `chi(edge) = 0` exactly, and `|chi(edge +- 1e-6)|` must
/// be below `1e-3 max|chi|` or within twice the leading-order asymptote
/// `chi0 sqrt(1e-6) / strength`. Near an edge the ratio to `max|chi|` tends to
/// `gamma sqrt(eps) / beta^{3/2}`, which equals the relative threshold itself
/// for `beta = gamma = 1`.
pub fn transparency_windows(response: &ProbeResponse, params: &ProbeParams) -> Result<Vec<f64>> {
    let relative = TRANSPARENCY_TOLERANCE * response.max_abs_chi();
    for term in params.reservoir.edge_terms() {
        let edge = term.edge;
        if chi_value(params, edge) != Complex64::new(0.0, 0.0) {
            return Err(Error::TransparencyContract(format!(
                "chi({edge}) is not exactly zero"
            )));
        }
        let asymptote =
            EDGE_ASYMPTOTE_SLACK * params.chi0 * EDGE_PROBE_OFFSET.sqrt() / term.strength;
        let threshold = relative.max(asymptote);
        for offset in [-EDGE_PROBE_OFFSET, EDGE_PROBE_OFFSET] {
            let magnitude = chi_value(params, edge + offset).norm();
            if magnitude >= threshold {
                return Err(Error::TransparencyContract(format!(
                    "|chi({edge} {offset:+e})| = {magnitude:.3e} is not below {threshold:.3e}"
                )));
            }
        }
    }
    Ok(params.reservoir.band_edges())
}

/// `(transparency point, dRe(chi)/d delta)` pairs. Large positive slopes mean
/// a strongly reduced group velocity. Points outside the response grid are
/// skipped.
pub fn group_slope_report(response: &ProbeResponse) -> Vec<(f64, f64)> {
    let (Some(&lo), Some(&hi)) = (response.grid.first(), response.grid.last()) else {
        return Vec::new();
    };
    response
        .transparency_points
        .iter()
        .filter(|&&p| lo <= p && p <= hi)
        .filter_map(|&p| response.slope_at(p).map(|s| (p, s)))
        .collect()
}
