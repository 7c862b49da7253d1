//! Run configuration: JSON file in metric units, validated into [`RunConfig`].

use hoibc::analysis::GeometrySpec;
use hoibc::assembly::AssemblyOptions;
use hoibc::impedance::{CoatingSpec, FitMethod, IbcCoefficients, IbcOrder, Polarization};
use hoibc::specfun::C0;
use num_complex::Complex64;
use serde::Deserialize;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// A length in metres, or a multiple of `lambda0_reference`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Length {
    Meters(f64),
    Lambda { lambda0: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawGeometry {
    Circle { radius: Length, n_elements: usize },
    Plate { length: Option<Length>, n_elements: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoating {
    eps_r: Complex64,
    #[serde(default = "unit")]
    mu_r: Complex64,
    thickness: Length,
}

fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolSelection {
    Te,
    Tm,
    Both,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIbc {
    order: Option<u8>,
    fit_method: Option<FitMethod>,
    collocation_angles: Option<Vec<f64>>,
    /// Explicit coefficients, checked exactly as given (`check` only).
    coefficients: Option<IbcCoefficients>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawSweep {
    Angles { phi_inc_deg: Grid },
    Frequencies { freqs_hz: Grid, #[serde(default)] phi_inc_deg: f64 },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    inner_radius: Option<Length>,
    n_max: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    lambda0_reference: Option<f64>,
    frequency_hz: Option<f64>,
    k0: Option<f64>,
    geometry: Option<RawGeometry>,
    coating: RawCoating,
    polarization: Option<PolSelection>,
    #[serde(default)]
    ibc: RawIbc,
    #[serde(default)]
    incidence_deg: f64,
    angles_deg: Option<Grid>,
    sweep: Option<RawSweep>,
    #[serde(default)]
    oracle: RawOracle,
    table_angles_deg: Option<Grid>,
    #[serde(default)]
    solver: AssemblyOptions,
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    Angles(Vec<f64>),
    Frequencies { freqs_hz: Vec<f64>, phi_inc_deg: f64 },
}

/// Validated configuration. Every length is in metres.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub k0: f64,
    pub geometry: Option<GeometrySpec>,
    pub coating: CoatingSpec,
    pub pols: Vec<Polarization>,
    pub order: IbcOrder,
    pub fit: FitMethod,
    pub collocation_deg: Option<Vec<f64>>,
    pub coefficients: Option<IbcCoefficients>,
    pub incidence_deg: f64,
    pub angles_deg: Vec<f64>,
    pub sweep: Option<SweepSpec>,
    pub inner_radius: Option<f64>,
    pub n_max: Option<usize>,
    pub table_deg: Vec<f64>,
    pub assembly: AssemblyOptions,
    pub output_dir: Option<PathBuf>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub pol: Option<PolSelection>,
    pub order: Option<u8>,
    pub fit: Option<FitMethod>,
}

impl Grid {
    fn expand(&self, field: &str, errs: &mut Vec<String>) -> Vec<f64> {
        match *self {
            Grid::List(ref v) => v.clone(),
            Grid::Range { start, stop, step } => {
                if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite() && stop >= start) {
                    errs.push(format!("{field}: range needs finite start <= stop and step > 0"));
                    return Vec::new();
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| start + i as f64 * step).collect()
            }
        }
    }
}

fn increasing(field: &str, v: &[f64], errs: &mut Vec<String>) {
    if v.is_empty() {
        errs.push(format!("{field}: must not be empty"));
    } else if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[1] <= w[0]) {
        errs.push(format!("{field}: values must be finite and strictly increasing"));
    }
}

pub fn load(path: &Path, ov: &Overrides) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(vec![format!("{}: {e}", path.display())]))?;
    parse(&text, ov)
}

pub fn parse(text: &str, ov: &Overrides) -> Result<RunConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Validation(vec![format!("config: {e}")]))?;
    let mut errs = Vec::new();

    let lambda_ref = raw.lambda0_reference;
    if let Some(l) = lambda_ref {
        if !(l > 0.0 && l.is_finite()) {
            errs.push("lambda0_reference: must be positive".to_string());
        }
    }
    let length = |field: &str, l: Length, errs: &mut Vec<String>| -> f64 {
        match l {
            Length::Meters(v) => v,
            Length::Lambda { lambda0 } => match lambda_ref {
                Some(r) => lambda0 * r,
                None => {
                    errs.push(format!("{field}: wavelength-relative length needs lambda0_reference"));
                    f64::NAN
                }
            },
        }
    };

    let k0 = match (raw.frequency_hz, raw.k0) {
        (Some(f), None) if f > 0.0 && f.is_finite() => 2.0 * PI * f / C0,
        (None, Some(k)) if k > 0.0 && k.is_finite() => k,
        (Some(_), None) => {
            errs.push("frequency_hz: must be positive".into());
            f64::NAN
        }
        (None, Some(_)) => {
            errs.push("k0: must be positive".into());
            f64::NAN
        }
        _ => {
            errs.push("frequency_hz, k0: exactly one must be given".into());
            f64::NAN
        }
    };

    let thickness = length("coating.thickness", raw.coating.thickness, &mut errs);
    let (eps_r, mu_r) = (raw.coating.eps_r, raw.coating.mu_r);
    if !(thickness >= 0.0 && thickness.is_finite()) {
        errs.push("coating.thickness: must be non-negative".into());
    }
    // exp(+iωt): passive media have non-positive imaginary parts.
    if eps_r.im > 0.0 {
        errs.push("coating.eps_r: imaginary part must be <= 0".into());
    }
    if mu_r.im > 0.0 {
        errs.push("coating.mu_r: imaginary part must be <= 0".into());
    }
    if eps_r.norm() == 0.0 || !eps_r.re.is_finite() || !eps_r.im.is_finite() {
        errs.push("coating.eps_r: must be finite and non-zero".into());
    }
    if mu_r.norm() == 0.0 || !mu_r.re.is_finite() || !mu_r.im.is_finite() {
        errs.push("coating.mu_r: must be finite and non-zero".into());
    }

    let geometry = raw.geometry.map(|g| match g {
        RawGeometry::Circle { radius, n_elements } => {
            let radius = length("geometry.radius", radius, &mut errs);
            if !(radius > 0.0 && radius.is_finite()) {
                errs.push("geometry.radius: must be positive".into());
            }
            GeometrySpec::Circle { radius, n_elements }
        }
        RawGeometry::Plate { length: l, n_elements } => {
            let l = match l {
                Some(l) => length("geometry.length", l, &mut errs),
                None => 5.0 * lambda_ref.unwrap_or(2.0 * PI / k0),
            };
            if !(l > 0.0 && l.is_finite()) {
                errs.push("geometry.length: must be positive".into());
            }
            GeometrySpec::Plate { length: l, n_elements }
        }
    });

    let pols = match ov.pol.or(raw.polarization).unwrap_or(PolSelection::Both) {
        PolSelection::Te => vec![Polarization::Te],
        PolSelection::Tm => vec![Polarization::Tm],
        PolSelection::Both => vec![Polarization::Te, Polarization::Tm],
    };

    let order_index = ov.order.or(raw.ibc.order).unwrap_or(1);
    let order = IbcOrder::from_index(order_index).unwrap_or_else(|| {
        errs.push(format!("ibc.order: must be 0, 1 or 2, got {order_index}"));
        IbcOrder::Ibc0
    });
    let fit = ov.fit.or(raw.ibc.fit_method).unwrap_or(FitMethod::Pade);
    if let Some(nodes) = &raw.ibc.collocation_angles {
        let want = order.aux_fields();
        if fit == FitMethod::Collocation && want > 0 && nodes.len() != want {
            errs.push(format!("ibc.collocation_angles: {:?} collocation needs {want} angles, got {}", order, nodes.len()));
        }
        if nodes.iter().any(|t| !(0.0..90.0).contains(t)) {
            errs.push("ibc.collocation_angles: angles must lie in [0, 90) degrees".into());
        }
    }
    if let Some(c) = &raw.ibc.coefficients {
        if let Err(e) = c.validate() {
            errs.push(format!("ibc.coefficients: {e}"));
        }
    }

    let angles_deg = raw.angles_deg.as_ref().map(|g| g.expand("angles_deg", &mut errs)).unwrap_or_else(|| (0..360).map(f64::from).collect());
    increasing("angles_deg", &angles_deg, &mut errs);
    let table_deg = raw.table_angles_deg.as_ref().map(|g| g.expand("table_angles_deg", &mut errs)).unwrap_or_else(|| (0..90).map(f64::from).collect());
    increasing("table_angles_deg", &table_deg, &mut errs);
    if table_deg.iter().any(|t| !(0.0..90.0).contains(t)) {
        errs.push("table_angles_deg: angles must lie in [0, 90) degrees".into());
    }
    if !raw.incidence_deg.is_finite() {
        errs.push("incidence_deg: must be finite".into());
    }

    let sweep = raw.sweep.map(|s| match s {
        RawSweep::Angles { phi_inc_deg } => {
            let v = phi_inc_deg.expand("sweep.phi_inc_deg", &mut errs);
            increasing("sweep.phi_inc_deg", &v, &mut errs);
            SweepSpec::Angles(v)
        }
        RawSweep::Frequencies { freqs_hz, phi_inc_deg } => {
            let v = freqs_hz.expand("sweep.freqs_hz", &mut errs);
            increasing("sweep.freqs_hz", &v, &mut errs);
            if v.iter().any(|f| *f <= 0.0) {
                errs.push("sweep.freqs_hz: frequencies must be positive".into());
            }
            SweepSpec::Frequencies { freqs_hz: v, phi_inc_deg }
        }
    });

    let inner_radius = raw.oracle.inner_radius.map(|l| {
        let a = length("oracle.inner_radius", l, &mut errs);
        if !(a > 0.0 && a.is_finite()) {
            errs.push("oracle.inner_radius: must be positive".into());
        }
        a
    });

    if !errs.is_empty() {
        return Err(CliError::Validation(errs));
    }
    Ok(RunConfig {
        k0,
        geometry,
        coating: CoatingSpec { eps_r, mu_r, thickness },
        pols,
        order,
        fit,
        collocation_deg: raw.ibc.collocation_angles,
        coefficients: raw.ibc.coefficients,
        incidence_deg: raw.incidence_deg,
        angles_deg,
        sweep,
        inner_radius,
        n_max: raw.oracle.n_max,
        table_deg,
        assembly: raw.solver,
        output_dir: raw.output_dir,
    })
}
