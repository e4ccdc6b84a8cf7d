//! Reservoir models for the |2> <-> |1> transition.
//!
//! All frequencies are detunings from the |2> <-> |1> transition, expressed in
//! units of the resonant coupling `beta`. An isotropic band edge at detuning
//! `d` contributes a square-root singular density of modes and a kernel term
//!
//! ```text
//! K~(s) = w * phase / sqrt(s + i d),     K(t) = w * phase * exp(-i d t) / sqrt(pi t)
//! ```
//!
//! where `phase = e^{+i pi/4}` for the upper edge of a lower band (modes below
//! `d`) and `e^{-i pi/4}` for the lower edge of an upper band (modes above `d`).
//! Square roots are principal, so on the imaginary axis the kernel is the
//! boundary value approached from `Re s > 0`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReservoirKind {
    None,
    SingleBandIsotropic,
    DoubleBandIsotropic,
}

/// The non-Markovian reservoir seen by the |2> <-> |1> transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReservoirModel {
    /// No modified reservoir; every kernel evaluation is exactly zero.
    None,
    /// A single allowed band above the edge `edge` (the gap is `delta < edge`).
    SingleBand { beta: f64, edge: f64 },
    /// A lower band below `lower_edge` and an upper band above `upper_edge`.
    DoubleBand {
        beta: f64,
        lower_edge: f64,
        upper_edge: f64,
    },
}

/// Which side of the edge carries the propagating modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Band {
    /// Modes below the edge.
    Lower,
    /// Modes above the edge.
    Upper,
}

/// One square-root band-edge contribution to the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EdgeTerm {
    pub band: Band,
    pub edge: f64,
    /// Real magnitude `beta^{3/2}` times the band weight.
    pub strength: f64,
}

impl EdgeTerm {
    pub fn phase(&self) -> Complex64 {
        match self.band {
            Band::Lower => Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            Band::Upper => Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        }
    }

    /// Complex prefactor multiplying `exp(-i d t) / sqrt(pi t)`.
    pub fn weight(&self) -> Complex64 {
        self.phase() * self.strength
    }

    /// Boundary value of `phase / sqrt(s + i d)` at `s = -i delta`, in closed
    /// form. `None` exactly at the edge.
    fn on_axis(&self, delta: f64) -> Option<Complex64> {
        let x = self.edge - delta;
        if x == 0.0 {
            return None;
        }
        let magnitude = self.strength / x.abs().sqrt();
        // sqrt(i x) = sqrt|x| e^{+i pi/4} for x > 0 and sqrt|x| e^{-i pi/4} for x < 0.
        let value = match (self.band, x > 0.0) {
            (Band::Lower, true) | (Band::Upper, false) => Complex64::new(magnitude, 0.0),
            (Band::Lower, false) => Complex64::new(0.0, magnitude),
            (Band::Upper, true) => Complex64::new(0.0, -magnitude),
        };
        Some(value)
    }

    /// Closed-form `d/d delta` of [`EdgeTerm::on_axis`].
    fn on_axis_derivative(&self, delta: f64) -> Option<Complex64> {
        let x = self.edge - delta;
        if x == 0.0 {
            return None;
        }
        let magnitude = 0.5 * self.strength / x.abs().powf(1.5);
        let value = match (self.band, x > 0.0) {
            (Band::Lower, true) => Complex64::new(magnitude, 0.0),
            (Band::Lower, false) => Complex64::new(0.0, -magnitude),
            (Band::Upper, false) => Complex64::new(-magnitude, 0.0),
            (Band::Upper, true) => Complex64::new(0.0, -magnitude),
        };
        Some(value)
    }
}

/// Boundary value of the Laplace-domain kernel on the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisKernel {
    Finite(Complex64),
    /// The detuning sits exactly on a band edge where `K~` diverges. Spectra
    /// take the continuity value there (`S = 0`, `chi = 0`).
    BandEdge,
}

impl AxisKernel {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            AxisKernel::Finite(z) => Some(z),
            AxisKernel::BandEdge => None,
        }
    }

    pub fn is_band_edge(self) -> bool {
        matches!(self, AxisKernel::BandEdge)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::invalid("beta", "must be finite and >= 0"));
    }
    Ok(())
}

impl ReservoirModel {
    pub fn single_band(beta: f64, edge: f64) -> Result<Self> {
        check_beta(beta)?;
        if !edge.is_finite() {
            return Err(Error::invalid("dg", "band edge must be finite"));
        }
        Ok(ReservoirModel::SingleBand { beta, edge })
    }

    pub fn double_band(beta: f64, lower_edge: f64, upper_edge: f64) -> Result<Self> {
        check_beta(beta)?;
        if !(lower_edge.is_finite() && upper_edge.is_finite()) {
            return Err(Error::invalid("dg1/dg2", "band edges must be finite"));
        }
        if lower_edge >= upper_edge {
            return Err(Error::invalid(
                "dg1/dg2",
                "gap width must be positive (dg1 < dg2)",
            ));
        }
        Ok(ReservoirModel::DoubleBand {
            beta,
            lower_edge,
            upper_edge,
        })
    }

    pub fn kind(&self) -> ReservoirKind {
        match self {
            ReservoirModel::None => ReservoirKind::None,
            ReservoirModel::SingleBand { .. } => ReservoirKind::SingleBandIsotropic,
            ReservoirModel::DoubleBand { .. } => ReservoirKind::DoubleBandIsotropic,
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            ReservoirModel::None => 0.0,
            ReservoirModel::SingleBand { beta, .. } | ReservoirModel::DoubleBand { beta, .. } => {
                beta
            }
        }
    }

    /// Band-edge detunings in increasing order.
    pub fn band_edges(&self) -> Vec<f64> {
        match *self {
            ReservoirModel::None => Vec::new(),
            ReservoirModel::SingleBand { edge, .. } => vec![edge],
            ReservoirModel::DoubleBand {
                lower_edge,
                upper_edge,
                ..
            } => vec![lower_edge, upper_edge],
        }
    }

    /// True when `delta` lies strictly inside the forbidden gap.
    pub fn in_gap(&self, delta: f64) -> bool {
        match *self {
            ReservoirModel::None => false,
            ReservoirModel::SingleBand { edge, .. } => delta < edge,
            ReservoirModel::DoubleBand {
                lower_edge,
                upper_edge,
                ..
            } => lower_edge < delta && delta < upper_edge,
        }
    }

    pub(crate) fn edge_terms(&self) -> Vec<EdgeTerm> {
        match *self {
            ReservoirModel::None => Vec::new(),
            ReservoirModel::SingleBand { beta, edge } => vec![EdgeTerm {
                band: Band::Upper,
                edge,
                strength: beta.powf(1.5),
            }],
            ReservoirModel::DoubleBand {
                beta,
                lower_edge,
                upper_edge,
            } => {
                let strength = 0.5 * beta.powf(1.5);
                vec![
                    EdgeTerm {
                        band: Band::Lower,
                        edge: lower_edge,
                        strength,
                    },
                    EdgeTerm {
                        band: Band::Upper,
                        edge: upper_edge,
                        strength,
                    },
                ]
            }
        }
    }

    /// `(weight, frequency)` pairs such that
    /// `K(t) = sum weight * exp(-i frequency t) / sqrt(pi t)`.
    pub fn kernel_terms(&self) -> Vec<(Complex64, f64)> {
        self.edge_terms()
            .iter()
            .map(|term| (term.weight(), term.edge))
            .collect()
    }
}

/// Density of modes at detuning `omega_detuning = omega - omega_21`.
///
/// Returns `f64::INFINITY` exactly on a band edge and `0` inside the gap.
pub fn density_of_modes(model: &ReservoirModel, omega_detuning: f64) -> Result<f64> {
    let terms = model.edge_terms();
    if terms.is_empty() {
        return Err(Error::NoReservoir);
    }
    let mut rho = 0.0;
    for term in &terms {
        let distance = match term.band {
            Band::Lower => term.edge - omega_detuning,
            Band::Upper => omega_detuning - term.edge,
        };
        if distance == 0.0 {
            return Ok(f64::INFINITY);
        }
        if distance > 0.0 {
            rho += 1.0 / distance.sqrt();
        }
    }
    Ok(rho / (2.0 * PI))
}

/// Laplace transform `K~(s)` of the memory kernel for `Re s >= 0`.
pub fn kernel_laplace(model: &ReservoirModel, s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) || s.re < 0.0 {
        return Err(Error::invalid(
            "s",
            "Laplace variable must be finite with Re(s) >= 0",
        ));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for term in model.edge_terms() {
        let shifted = s + Complex64::new(0.0, term.edge);
        if shifted.re == 0.0 && shifted.im == 0.0 {
            return Err(Error::BandEdgeDivergence { re: s.re, im: s.im });
        }
        sum += term.weight() / shifted.sqrt();
    }
    Ok(sum)
}

/// Boundary value `lim_{eps -> 0+} K~(eps - i delta)`.
pub fn kernel_laplace_on_axis(model: &ReservoirModel, delta: f64) -> AxisKernel {
    let mut sum = Complex64::new(0.0, 0.0);
    for term in model.edge_terms() {
        match term.on_axis(delta) {
            Some(value) => sum += value,
            None => return AxisKernel::BandEdge,
        }
    }
    AxisKernel::Finite(sum)
}

/// `d/d delta` of [`kernel_laplace_on_axis`], in closed form.
pub fn kernel_laplace_on_axis_derivative(model: &ReservoirModel, delta: f64) -> AxisKernel {
    let mut sum = Complex64::new(0.0, 0.0);
    for term in model.edge_terms() {
        match term.on_axis_derivative(delta) {
            Some(value) => sum += value,
            None => return AxisKernel::BandEdge,
        }
    }
    AxisKernel::Finite(sum)
}

/// Time-domain memory kernel `K(t)` for `t > 0`.
pub fn kernel_time(model: &ReservoirModel, t: f64) -> Result<Complex64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid("t", "kernel time argument must be > 0"));
    }
    let norm = 1.0 / (PI * t).sqrt();
    Ok(model
        .edge_terms()
        .iter()
        .map(|term| term.weight() * Complex64::from_polar(norm, -term.edge * t))
        .sum())
}
