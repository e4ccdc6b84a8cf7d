//! Numerical engine for a three-level Lambda atom whose |2> <-> |1> transition
//! couples to an isotropic photonic band gap reservoir while |2> <-> |0> decays
//! into free space.
//!
//! The crate evaluates, in units of the resonant coupling `beta`:
//!
//! * the memory kernel `K(t)`, its Laplace transform and the density of modes
//!   ([`reservoir`]);
//! * the long-time spontaneous emission spectrum into the free-space channel,
//!   including its dark lines and peaks ([`emission`]);
//! * the weak-probe linear susceptibility, transparency points and the
//!   dispersion slope that controls the group velocity ([`susceptibility`]);
//! * an independent time-domain solver for the memory-kernel amplitude
//!   equations, used to cross-check every frequency-domain result
//!   ([`dynamics`]);
//! * scenario configuration, figure presets and CSV/JSON export
//!   ([`scenario`]).

pub mod dynamics;
pub mod emission;
pub mod error;
pub mod grid;
pub mod reservoir;
pub mod scenario;
pub mod susceptibility;

pub use num_complex::Complex64;

pub use crate::dynamics::{
    convergence_check, solve_b2, solve_c2, spectrum_from_trajectory, steady_state_c2,
    AmplitudeKind, AmplitudeTrajectory, ConvergenceReport, SolverGrid, SteadyState,
};
pub use crate::emission::{
    find_dark_lines, find_peaks, spectrum_eval, EmissionParams, EmissionSpectrum,
};
pub use crate::error::{Error, Result};
pub use crate::grid::DetuningGrid;
pub use crate::reservoir::{AxisKernel, ReservoirKind, ReservoirModel};
pub use crate::susceptibility::{
    chi_eval, group_slope_report, transparency_windows, ProbeParams, ProbeResponse,
};
