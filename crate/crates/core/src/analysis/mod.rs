//! Far field, echo width, the coated-cylinder series oracle and RCS
//! comparison metrics.

mod pattern;
mod series;
mod sweep;

pub use pattern::{compare_rcs, read_rcs_csv, Abscissa, RcsComparison, RcsPattern};
pub use series::{series_coated_cylinder, series_coefficients, truncation_order, SeriesCoefficients, SeriesMode, SeriesSolutionSpec, TAIL_TOLERANCE};
pub use sweep::{monostatic_sweep, solve_bistatic, BistaticResult, GeometrySpec, SolverSetup, Sweep};

use crate::assembly::{AssemblyError, SurfaceCurrents};
use crate::geometry::{Contour, SpaceKind};
use crate::impedance::{ImpedanceError, Polarization};
use crate::specfun::{quad_rule, QuadKind, SpecfunError, Z0};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

type C64 = Complex64;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("angle grids differ: {0}")]
    GridMismatch(String),
    #[error("series did not converge: tail ratio {tail:.3e} at order {n_max}")]
    Truncation { n_max: usize, tail: f64 },
    #[error("malformed RCS file: {0}")]
    Parse(String),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Impedance(#[from] ImpedanceError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Linsolve(#[from] crate::linsolve::LinsolveError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;

/// `F(φ)` with `E^sc ~ F(φ) e^{−i k r} / √r`, for observation angles in radians.
pub fn far_field(currents: &SurfaceCurrents, contour: &Contour, k0: f64, angles: &[f64]) -> Result<Vec<C64>> {
    let nn = contour.n_nodes();
    let nm = match currents.m_space {
        SpaceKind::P1Nodal => nn,
        SpaceKind::P0Elementwise => contour.n_elements(),
    };
    if currents.j.len() != nn || currents.m.len() != nm {
        return Err(AnalysisError::Usage("currents do not match the contour".into()));
    }
    let rule = quad_rule(QuadKind::GaussLegendre, 8)?.unit_interval();
    // Large-argument form of G: H0(kr)/(4i) ≈ c e^{−ikr}/√r · e^{ik x̂·y}
    let c = C64::from_polar((2.0 / (PI * k0)).sqrt() / 4.0, PI / 4.0 - PI / 2.0);
    let ik = C64::new(0.0, k0);
    let out = angles
        .iter()
        .map(|&phi| {
            let xh = [phi.cos(), phi.sin()];
            let mut acc = C64::new(0.0, 0.0);
            for (e, &[i, j]) in contour.elements().iter().enumerate() {
                let h = contour.length(e);
                let n = contour.normal(e);
                let nx = n[0] * xh[0] + n[1] * xh[1];
                for &(t, w) in &rule {
                    let y = contour.point(e, t);
                    let jv = currents.j[i] * (1.0 - t) + currents.j[j] * t;
                    let mv = match currents.m_space {
                        SpaceKind::P1Nodal => currents.m[i] * (1.0 - t) + currents.m[j] * t,
                        SpaceKind::P0Elementwise => currents.m[e],
                    };
                    let integrand = match currents.pol {
                        Polarization::Tm => ik * nx * mv - ik * Z0 * jv,
                        Polarization::Te => -ik * nx * jv - ik / Z0 * mv,
                    };
                    acc += integrand * C64::new(0.0, k0 * (xh[0] * y[0] + xh[1] * y[1])).exp() * (w * h);
                }
            }
            match currents.pol {
                Polarization::Tm => c * acc,
                Polarization::Te => c * acc * Z0,
            }
        })
        .collect();
    Ok(out)
}

/// `σ = 2π |F|² / |E0|²` in linear scale (metres).
pub fn echo_width_linear(field: &[C64], amplitude: C64) -> Vec<f64> {
    let a2 = amplitude.norm_sqr();
    field.iter().map(|f| 2.0 * PI * f.norm_sqr() / a2).collect()
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Echo width pattern in dB(m) over the given angles in degrees.
pub fn echo_width(field: &[C64], amplitude: C64, angles_deg: &[f64]) -> Result<RcsPattern> {
    let sigma = echo_width_linear(field, amplitude).into_iter().map(to_db).collect();
    RcsPattern::new(Abscissa::AngleDeg, angles_deg.to_vec(), sigma)
}
