//! Planar-layer impedance, rational IBC fits and coefficient checks.
//!
//! Coefficients are stored against the dimensionless spectral variable
//! `ξ = −sin²θ`, in the reactance form in which the exact impedance of a
//! lossless layer is real. [`IbcCoefficients::physical`] returns the surface
//! impedance used by the solver (`i` times the stored `a` coefficients).

mod fit;
mod suc;
mod table;

pub use fit::{
    collocation_ibc1, collocation_ibc2, fit_coefficients, leontovich_ibc0, pade_ibc1,
    pade_ibc1_from_taylor, pade_ibc2, pade_ibc2_from_taylor, taylor_c2_te, taylor_coefficients,
    taylor_ibc1, FitMethod, DEFAULT_IBC1_NODES_DEG, DEFAULT_IBC2_NODES_DEG,
};
pub use suc::{
    default_tolerance, suc_check_ibc1, suc_check_ibc2, wellposedness_check, ClauseStatus,
    SucClause, SucReport,
};
pub use table::{impedance_table, max_fit_error, write_impedance_csv, ImpedanceRow};

use crate::specfun::Z0;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImpedanceError {
    #[error("invalid coating: {0}")]
    InvalidCoating(String),
    #[error("layer resonance: tan pole of order n = {n}")]
    Resonance { n: i64 },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("collocation system is singular")]
    CollinearCollocation,
    #[error("collocation system is ill-conditioned (condition estimate {cond:.3e})")]
    IllConditioned { cond: f64 },
    #[error("rational impedance has a pole at xi = {xi}")]
    Pole { xi: f64 },
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, ImpedanceError>;

/// Single homogeneous layer on a perfect conductor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoatingSpec {
    pub eps_r: Complex64,
    pub mu_r: Complex64,
    /// Layer thickness in metres.
    pub thickness: f64,
}

impl CoatingSpec {
    pub fn new(eps_r: Complex64, mu_r: Complex64, thickness: f64) -> Result<Self> {
        let c = Self { eps_r, mu_r, thickness };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        if !(self.thickness.is_finite() && self.thickness >= 0.0) {
            return Err(ImpedanceError::InvalidCoating(format!("thickness must be non-negative, got {}", self.thickness)));
        }
        if !finite(self.eps_r) || !finite(self.mu_r) || self.eps_r == Complex64::new(0.0, 0.0) || self.mu_r == Complex64::new(0.0, 0.0) {
            return Err(ImpedanceError::InvalidCoating("eps_r and mu_r must be finite and non-zero".into()));
        }
        Ok(())
    }

    /// Passive under `exp(+iωt)`.
    pub fn is_passive(&self) -> bool {
        self.eps_r.im <= 0.0 && self.mu_r.im <= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    #[serde(alias = "TE")]
    Te,
    #[serde(alias = "TM")]
    Tm,
}

impl Polarization {
    /// Coefficient index `j`: TE → 1, TM → 2.
    pub fn index(self) -> u8 {
        match self {
            Polarization::Te => 1,
            Polarization::Tm => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Polarization::Te => "TE",
            Polarization::Tm => "TM",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IbcOrder {
    Ibc0,
    Ibc1,
    Ibc2,
}

impl IbcOrder {
    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            0 => Some(IbcOrder::Ibc0),
            1 => Some(IbcOrder::Ibc1),
            2 => Some(IbcOrder::Ibc2),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    /// Auxiliary fields carried by the full system.
    pub fn aux_fields(self) -> usize {
        2 * self.index() as usize
    }
}

/// The spectral variable is `ξ = −sin²θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralConvention {
    #[default]
    Xi,
}

/// `Z(ξ) = (a0 + a ξ + a' ξ²) / (1 + b ξ + b' ξ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IbcCoefficients {
    pub order: IbcOrder,
    pub pol: Polarization,
    pub a0: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub a_prime: Complex64,
    pub b_prime: Complex64,
    #[serde(default)]
    pub convention: SpectralConvention,
    /// Layer the coefficients were fitted to, if any.
    #[serde(default)]
    pub material: Option<CoatingSpec>,
}

const CZERO: Complex64 = Complex64::new(0.0, 0.0);

impl IbcCoefficients {
    pub fn ibc0(pol: Polarization, a0: Complex64) -> Self {
        Self { order: IbcOrder::Ibc0, pol, a0, a: CZERO, b: CZERO, a_prime: CZERO, b_prime: CZERO, convention: SpectralConvention::Xi, material: None }
    }

    pub fn ibc1(pol: Polarization, a0: Complex64, a: Complex64, b: Complex64) -> Self {
        Self { order: IbcOrder::Ibc1, a, b, ..Self::ibc0(pol, a0) }
    }

    pub fn ibc2(pol: Polarization, a0: Complex64, a: Complex64, b: Complex64, a_prime: Complex64, b_prime: Complex64) -> Self {
        Self { order: IbcOrder::Ibc2, a, b, a_prime, b_prime, ..Self::ibc0(pol, a0) }
    }

    pub fn with_material(mut self, coating: CoatingSpec) -> Self {
        self.material = Some(coating);
        self
    }

    /// Checks the order invariants (unused coefficients are zero, `a0 ≠ 0`).
    pub fn validate(&self) -> Result<()> {
        if self.a0 == CZERO {
            return Err(ImpedanceError::Usage("a0 must be non-zero".into()));
        }
        let extra_ok = match self.order {
            IbcOrder::Ibc0 => self.a == CZERO && self.b == CZERO && self.a_prime == CZERO && self.b_prime == CZERO,
            IbcOrder::Ibc1 => self.a_prime == CZERO && self.b_prime == CZERO,
            IbcOrder::Ibc2 => true,
        };
        if !extra_ok {
            return Err(ImpedanceError::Usage(format!("coefficients not allowed for {:?}", self.order)));
        }
        Ok(())
    }

    /// Surface impedance under `exp(+iωt)`: every `a` coefficient times `i`.
    pub fn physical(&self) -> Self {
        let i = Complex64::new(0.0, 1.0);
        Self { a0: i * self.a0, a: i * self.a, a_prime: i * self.a_prime, ..*self }
    }

    /// Evaluates the rational impedance at `ξ`.
    pub fn eval(&self, xi: f64) -> Result<Complex64> {
        eval_rational(self, xi)
    }
}

pub fn eval_rational(c: &IbcCoefficients, xi: f64) -> Result<Complex64> {
    let num = c.a0 + c.a * xi + c.a_prime * xi * xi;
    let den = Complex64::new(1.0, 0.0) + c.b * xi + c.b_prime * xi * xi;
    let scale = 1.0 + (c.b * xi).norm() + (c.b_prime * xi * xi).norm();
    if den.norm() <= 1e-14 * scale {
        return Err(ImpedanceError::Pole { xi });
    }
    Ok(num / den)
}

/// `ξ = −sin²θ`.
pub fn xi_of_theta(theta: f64) -> f64 {
    -theta.sin().powi(2)
}

/// Tolerance on `|s k0 d − (π/2 + nπ)|` below which the layer is resonant.
const RESONANCE_TOL: f64 = 1e-9;

/// Complex `ξ`, used by the contour-integral Taylor coefficients.
pub(crate) fn exact_impedance_complex(pol: Polarization, xi: Complex64, coating: &CoatingSpec, k0: f64) -> Result<Complex64> {
    let s = (coating.mu_r * coating.eps_r + xi).sqrt();
    let arg = s * (k0 * coating.thickness);
    let n = (arg.re / PI - 0.5).round();
    let pole = Complex64::new(PI / 2.0 + n * PI, 0.0);
    if (arg - pole).norm() < RESONANCE_TOL {
        return Err(ImpedanceError::Resonance { n: n as i64 });
    }
    let t = arg.tan();
    Ok(match pol {
        Polarization::Te => Z0 * s * t / coating.eps_r,
        Polarization::Tm => {
            if s == CZERO {
                Z0 * coating.mu_r * k0 * coating.thickness
            } else {
                Z0 * coating.mu_r * t / s
            }
        }
    })
}

/// Exact impedance of a conductor-backed layer at `ξ ∈ (−1, 0]`.
pub fn exact_impedance(pol: Polarization, xi: f64, coating: &CoatingSpec, k0: f64) -> Result<Complex64> {
    coating.validate()?;
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(ImpedanceError::Usage(format!("k0 must be positive, got {k0}")));
    }
    exact_impedance_complex(pol, Complex64::new(xi, 0.0), coating, k0)
}

/// Normal-incidence (Leontovich) impedance; identical for TE and TM.
pub fn leontovich_a0(coating: &CoatingSpec, k0: f64) -> Result<Complex64> {
    exact_impedance(Polarization::Te, 0.0, coating, k0)
}

/// Number of terms of the `tan(x)/x` series used for divided differences.
const TAN_SERIES_TERMS: usize = 64;

/// `tan(x)/x = Σ β_k x^{2k}`, from `T' = 1 + T²`.
fn tan_over_x_coeffs() -> [f64; TAN_SERIES_TERMS] {
    let mut t = [0.0; TAN_SERIES_TERMS];
    t[0] = 1.0;
    for n in 1..TAN_SERIES_TERMS {
        let conv: f64 = (0..n).map(|i| t[i] * t[n - 1 - i]).sum();
        t[n] = conv / (2 * n + 1) as f64;
    }
    t
}

/// Divided difference `(Z^ex(ξ) − Z^ex(0)) / ξ` for `ξ ≠ 0`, evaluated
/// without the cancellation of the direct difference.
pub(crate) fn exact_impedance_slope(pol: Polarization, xi: f64, coating: &CoatingSpec, k0: f64) -> Result<Complex64> {
    // Both endpoints must be regular.
    exact_impedance(pol, xi, coating, k0)?;
    exact_impedance(pol, 0.0, coating, k0)?;
    let me = coating.mu_r * coating.eps_r;
    let t = k0 * coating.thickness;
    if t == 0.0 {
        return Ok(CZERO);
    }
    // With u = (s t)², TE: Z = (z0 / (ε t)) u ψ(u) and TM: Z = z0 μ t ψ(u),
    // ψ(u) = tan(√u)/√u. Divided differences of u^k need no subtraction.
    let u0 = me * t * t;
    let u = (me + xi) * t * t;
    if u.norm() <= 1.0 && u0.norm() <= 1.0 {
        let beta = tan_over_x_coeffs();
        // h_k = (u^{k+1} − u0^{k+1}) / (u − u0)
        let mut h = Complex64::new(1.0, 0.0);
        let mut u0k = Complex64::new(1.0, 0.0);
        let mut d_upsi = CZERO;
        let mut d_psi = CZERO;
        for k in 0..TAN_SERIES_TERMS {
            d_upsi += beta[k] * h;
            if k + 1 < TAN_SERIES_TERMS {
                d_psi += beta[k + 1] * h;
            }
            u0k *= u0;
            h = u * h + u0k;
        }
        return Ok(match pol {
            Polarization::Te => Z0 * t / coating.eps_r * d_upsi,
            Polarization::Tm => Z0 * coating.mu_r * t * t * t * d_psi,
        });
    }
    let s0 = me.sqrt();
    let s = (me + xi).sqrt();
    // s − s0 = ξ / (s + s0);  tan a − tan b = sin(a − b) / (cos a cos b)
    let ds = xi / (s + s0);
    let (ts, ts0) = ((s * t).tan(), (s0 * t).tan());
    let dtan_over_xi = (ds * t).sin() / xi / ((s * t).cos() * (s0 * t).cos());
    Ok(match pol {
        Polarization::Te => Z0 / coating.eps_r * (ts / (s + s0) + s0 * dtan_over_xi),
        Polarization::Tm => Z0 * coating.mu_r * (s0 * dtan_over_xi - ts0 / (s + s0)) / (s * s0),
    })
}
