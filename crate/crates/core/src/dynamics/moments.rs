//! Exact panel moments of the weakly singular kernel factor
//! `exp(-i a tau) / sqrt(pi tau)`.
//!
//! With `w = i a T` the cumulative moments are
//!
//! ```text
//! F0(T) = int_0^T exp(-i a tau) / sqrt(pi tau) dtau     = sqrt(T/pi)   * h0(w)
//! F1(T) = int_0^T tau exp(-i a tau) / sqrt(pi tau) dtau = T^{3/2}/sqrt(pi) * h1(w)
//! h0(w) = int_0^1 exp(-w v) v^{-1/2} dv = sqrt(pi) erf(sqrt w) / sqrt w
//! h1(w) = int_0^1 exp(-w v) v^{+1/2} dv = (h0(w)/2 - exp(-w)) / w
//! ```
//!
//! `h0` and `h1` are entire in `w`; power series are used for `|w| < 1` and the
//! closed forms (complex error function from the `errorfunctions` crate, a
//! Faddeeva-based implementation accurate to roughly 1e-13 relative) elsewhere.

use std::f64::consts::PI;

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;

const SERIES_RADIUS: f64 = 1.0;
const SERIES_TERMS: usize = 40;

fn series(w: Complex64, offset: f64) -> Complex64 {
    // sum_n (-w)^n / (n! (n + offset))
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for n in 0..SERIES_TERMS {
        sum += term / (n as f64 + offset);
        term *= -w / (n as f64 + 1.0);
    }
    sum
}

pub(crate) fn h0(w: Complex64) -> Complex64 {
    if w.norm() < SERIES_RADIUS {
        return series(w, 0.5);
    }
    let z = w.sqrt();
    PI.sqrt() * z.erf() / z
}

pub(crate) fn h1(w: Complex64) -> Complex64 {
    if w.norm() < SERIES_RADIUS {
        return series(w, 1.5);
    }
    (0.5 * h0(w) - (-w).exp()) / w
}

/// Cumulative moments `(F0(T), F1(T))` for kernel frequency `a`.
pub(crate) fn cumulative(a: f64, t: f64) -> (Complex64, Complex64) {
    if t == 0.0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let w = Complex64::new(0.0, a * t);
    let root = (t / PI).sqrt();
    (root * h0(w), root * t * h1(w))
}

/// Product-integration weights on a uniform step `h`.
///
/// For panel `m` covering `tau in [m h, (m+1) h]`, with the smooth factor
/// interpolated linearly between its values at `tau = m h` (`near`) and
/// `tau = (m+1) h` (`far`), the panel integral is
/// `near_weight[m] * y(m h) + far_weight[m] * y((m+1) h)`.
pub(crate) struct PanelWeights {
    pub near: Vec<Complex64>,
    pub far: Vec<Complex64>,
}

pub(crate) fn panel_weights(a: f64, h: f64, panels: usize) -> PanelWeights {
    let mut near = Vec::with_capacity(panels);
    let mut far = Vec::with_capacity(panels);
    let mut prev = cumulative(a, 0.0);
    for m in 0..panels {
        let lo = m as f64 * h;
        let hi = (m + 1) as f64 * h;
        let next = cumulative(a, hi);
        let p0 = next.0 - prev.0;
        let p1 = next.1 - prev.1;
        near.push((hi * p0 - p1) / h);
        far.push((p1 - lo * p0) / h);
        prev = next;
    }
    PanelWeights { near, far }
}
