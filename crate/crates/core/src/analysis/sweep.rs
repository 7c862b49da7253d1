use super::pattern::{Abscissa, RcsPattern};
use super::{echo_width, echo_width_linear, far_field, to_db, AnalysisError, Result};
use crate::assembly::{
    build_full_system, factor_reduced, recover_aux, reduce_system_with, AssemblyOptions, IncidentWave, SurfaceCurrents,
    SystemMeta,
};
use crate::geometry::{mesh_circle, mesh_plate, Contour};
use crate::impedance::{fit_coefficients, CoatingSpec, FitMethod, IbcCoefficients, IbcOrder, Polarization};
use crate::specfun::C0;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeometrySpec {
    /// Circle of the given radius; for a coated cylinder this is the outer radius.
    Circle { radius: f64, n_elements: usize },
    Plate { length: f64, n_elements: usize },
}

impl GeometrySpec {
    pub fn mesh(&self) -> Result<Contour> {
        Ok(match *self {
            GeometrySpec::Circle { radius, n_elements } => mesh_circle(radius, n_elements)?,
            GeometrySpec::Plate { length, n_elements } => mesh_plate(length, n_elements)?,
        })
    }
}

/// Everything needed to go from a frequency to a solved system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSetup {
    pub geometry: GeometrySpec,
    pub coating: CoatingSpec,
    pub pol: Polarization,
    pub order: IbcOrder,
    pub fit: FitMethod,
    pub collocation_deg: Option<Vec<f64>>,
    pub assembly: AssemblyOptions,
}

impl SolverSetup {
    pub fn coefficients(&self, k0: f64) -> Result<IbcCoefficients> {
        Ok(fit_coefficients(&self.coating, self.pol, k0, self.order, self.fit, self.collocation_deg.as_deref())?)
    }

    fn tag(&self) -> String {
        format!("ibc{}", self.order.index())
    }
}

#[derive(Debug, Clone)]
pub struct BistaticResult {
    pub pattern: RcsPattern,
    pub currents: SurfaceCurrents,
    pub coefficients: IbcCoefficients,
    pub rcond: f64,
    pub meta: SystemMeta,
    pub contour: Contour,
}

fn backscatter_angle(phi_inc_deg: f64) -> f64 {
    (phi_inc_deg + 180.0).to_radians()
}

/// Fit, assemble, reduce, solve and evaluate the echo width at `angles_deg`.
pub fn solve_bistatic(setup: &SolverSetup, k0: f64, phi_inc_deg: f64, angles_deg: &[f64]) -> Result<BistaticResult> {
    let contour = setup.geometry.mesh()?;
    let coefficients = setup.coefficients(k0)?;
    let wave = IncidentWave::new(setup.pol, k0, phi_inc_deg.to_radians());
    let exec = setup.assembly.exec;
    let sys = reduce_system_with(build_full_system(&contour, &coefficients, &wave, &setup.assembly)?, exec)?;
    let lu = factor_reduced(&sys, exec)?;
    if lu.rcond_estimate < 1e-12 {
        log::warn!("reduced system is ill-conditioned: rcond ~ {:.3e}", lu.rcond_estimate);
    }
    let x = lu.solve(sys.reduced_rhs())?;
    let aux = recover_aux(&sys, &x, exec)?;
    let currents = SurfaceCurrents::from_parts(&sys.meta, &x, aux);
    let rad: Vec<f64> = angles_deg.iter().map(|a| a.to_radians()).collect();
    let field = far_field(&currents, &contour, k0, &rad)?;
    let pattern = echo_width(&field, wave.amplitude, angles_deg)?
        .with_meta("source", setup.tag())
        .with_meta("pol", setup.pol.name())
        .with_meta("k0", k0)
        .with_meta("phi_inc_deg", phi_inc_deg)
        .with_meta("geometry", &sys.meta.geometry)
        .with_meta("n_elements", contour.n_elements())
        .with_meta("rcond", format!("{:.3e}", lu.rcond_estimate));
    Ok(BistaticResult { pattern, currents, coefficients, rcond: lu.rcond_estimate, meta: sys.meta, contour })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    /// Incidence angles at one frequency; one factorization serves all.
    Angles { k0: f64, phi_inc_deg: Vec<f64> },
    /// Frequencies at one incidence angle; each point is assembled anew.
    Frequencies { freqs_hz: Vec<f64>, phi_inc_deg: f64 },
}

/// Backscatter echo width (observation at `φ_inc + 180°`) per sweep point.
pub fn monostatic_sweep(setup: &SolverSetup, sweep: &Sweep) -> Result<RcsPattern> {
    match sweep {
        Sweep::Angles { k0, phi_inc_deg } => {
            let Some(&first) = phi_inc_deg.first() else {
                return Err(AnalysisError::Usage("empty sweep".into()));
            };
            let exec = setup.assembly.exec;
            let contour = setup.geometry.mesh()?;
            let coefficients = setup.coefficients(*k0)?;
            let wave0 = IncidentWave::new(setup.pol, *k0, first.to_radians());
            let sys = reduce_system_with(build_full_system(&contour, &coefficients, &wave0, &setup.assembly)?, exec)?;
            let lu = factor_reduced(&sys, exec)?;
            let nr = sys.meta.reduced_dim();
            let waves: Vec<IncidentWave> = phi_inc_deg.iter().map(|p| IncidentWave::new(setup.pol, *k0, p.to_radians())).collect();
            let rhs = waves
                .iter()
                .map(|w| Ok(sys.rhs_for(&contour, w)?[..nr].to_vec()))
                .collect::<Result<Vec<_>>>()?;
            let sols = lu.solve_many(&rhs, exec)?;
            let mut sigma = Vec::with_capacity(sols.len());
            for (x, (w, phi)) in sols.iter().zip(waves.iter().zip(phi_inc_deg)) {
                let aux = recover_aux(&sys, x, exec)?;
                let currents = SurfaceCurrents::from_parts(&sys.meta, x, aux);
                let f = far_field(&currents, &contour, *k0, &[backscatter_angle(*phi)])?;
                sigma.push(to_db(echo_width_linear(&f, w.amplitude)[0]));
            }
            Ok(RcsPattern::new(Abscissa::AngleDeg, phi_inc_deg.clone(), sigma)?
                .with_meta("source", setup.tag())
                .with_meta("mode", "monostatic")
                .with_meta("pol", setup.pol.name())
                .with_meta("k0", k0)
                .with_meta("geometry", &sys.meta.geometry)
                .with_meta("rcond", format!("{:.3e}", lu.rcond_estimate)))
        }
        Sweep::Frequencies { freqs_hz, phi_inc_deg } => {
            let back = backscatter_angle(*phi_inc_deg).to_degrees();
            let mut sigma = Vec::with_capacity(freqs_hz.len());
            let mut geometry = String::new();
            for &f in freqs_hz {
                let k0 = 2.0 * PI * f / C0;
                let r = solve_bistatic(setup, k0, *phi_inc_deg, &[back])?;
                geometry = r.meta.geometry.clone();
                sigma.push(r.pattern.sigma_db[0]);
            }
            Ok(RcsPattern::new(Abscissa::FreqGhz, freqs_hz.iter().map(|f| f * 1e-9).collect(), sigma)?
                .with_meta("source", setup.tag())
                .with_meta("mode", "monostatic")
                .with_meta("pol", setup.pol.name())
                .with_meta("phi_inc_deg", phi_inc_deg)
                .with_meta("geometry", geometry))
        }
    }
}
