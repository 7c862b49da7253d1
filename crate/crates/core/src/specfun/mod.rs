//! Special functions, the outgoing 2D Helmholtz kernel and quadrature rules.
//!
//! The whole crate uses the `exp(+iωt)` time factor. Outgoing waves are
//! therefore `H^(2)` Hankel functions and lossy media have `Im ε_r ≤ 0`.

mod bessel;
mod quadrature;

pub use bessel::{
    bessel_j, bessel_j_seq, bessel_jy_seq, bessel_y, hankel2, hankel2_01_real, j01y01_real,
    MAX_ARG, MAX_ORDER,
};
pub use quadrature::{quad_rule, QuadKind, QuadratureRule};

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Free-space wave impedance in ohms.
pub const Z0: f64 = 376.730313668;

/// Speed of light in vacuum, m/s.
pub const C0: f64 = 299_792_458.0;

/// Euler–Mascheroni constant.
pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("argument outside the function domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, SpecfunError>;

/// Time-harmonic factor. Only one convention is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum TimeFactor {
    #[default]
    ExpPlusIOmegaT,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WaveConvention {
    pub time_factor: TimeFactor,
    /// Free-space wavenumber in 1/m.
    pub k0: f64,
}

impl WaveConvention {
    pub fn new(k0: f64) -> Result<Self> {
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(SpecfunError::Domain(format!("wavenumber must be positive, got {k0}")));
        }
        Ok(Self { time_factor: TimeFactor::ExpPlusIOmegaT, k0 })
    }

    pub fn from_frequency(freq_hz: f64) -> Result<Self> {
        Self::new(2.0 * PI * freq_hz / C0)
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k0
    }

    /// Under `exp(+iωt)` a passive material has non-positive imaginary part.
    pub fn is_passive(value: Complex64) -> bool {
        value.im <= 0.0
    }
}

/// Outgoing 2D Green kernel `G(r) = H0^(2)(kr) / (4i)`, which solves
/// `(Δ + k²) G = −δ`.
pub fn green2d(k: f64, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(SpecfunError::Domain(format!("green2d needs r > 0, got {r}")));
    }
    if !(k > 0.0) {
        return Err(SpecfunError::Domain(format!("green2d needs k > 0, got {k}")));
    }
    let (h0, _) = hankel2_01_real(k * r);
    Ok(h0 / Complex64::new(0.0, 4.0))
}

/// Radial derivative `dG/dr = −k H1^(2)(kr) / (4i)`.
pub fn green2d_dr(k: f64, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(SpecfunError::Domain(format!("green2d_dr needs r > 0, got {r}")));
    }
    let (_, h1) = hankel2_01_real(k * r);
    Ok(-k * h1 / Complex64::new(0.0, 4.0))
}

/// Gradient of `G(|x − y|)` with respect to `y`.
pub fn green2d_grad_y(k: f64, x: [f64; 2], y: [f64; 2]) -> Result<[Complex64; 2]> {
    let d = [y[0] - x[0], y[1] - x[1]];
    let r = d[0].hypot(d[1]);
    let g = green2d_dr(k, r)?;
    Ok([g * (d[0] / r), g * (d[1] / r)])
}

/// Kernel values used by singular quadrature: `G` and `G'(r)/r` together with
/// the coefficients of `ln r` in each, so callers can integrate the
/// logarithmic parts with a log-weighted rule.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KernelSplit {
    pub g: Complex64,
    pub g_log: f64,
    pub dg_over_r: Complex64,
    pub dg_over_r_log: f64,
}

/// `G = g_log·ln r + smooth` and `G'(r)/r = −1/(2πr²) + dg_over_r_log·ln r + smooth`.
#[inline]
pub(crate) fn kernel_split(k: f64, r: f64) -> KernelSplit {
    let x = k * r;
    let [j0, j1, y0, y1] = j01y01_real(x);
    let h0 = Complex64::new(j0, -y0);
    let h1 = Complex64::new(j1, -y1);
    let quarter_i = Complex64::new(0.0, 4.0);
    KernelSplit {
        g: h0 / quarter_i,
        g_log: -j0 / (2.0 * PI),
        dg_over_r: -k * h1 / quarter_i / r,
        dg_over_r_log: k * j1 / (2.0 * PI * r),
    }
}
