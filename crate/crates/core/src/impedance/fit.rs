use super::{
    exact_impedance_complex, exact_impedance_slope, leontovich_a0, xi_of_theta, CoatingSpec,
    IbcCoefficients, IbcOrder, ImpedanceError, Polarization, Result,
};
use crate::linsolve::{lu_factor, CMatrix, LinsolveError};
use crate::specfun::Z0;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DEFAULT_IBC1_NODES_DEG: [f64; 2] = [30.0, 60.0];
pub const DEFAULT_IBC2_NODES_DEG: [f64; 4] = [20.0, 40.0, 60.0, 80.0];

/// Collocation systems with a larger condition estimate are rejected.
const MAX_COLLOCATION_COND: f64 = 1e12;

/// Sample count of the contour integral for Taylor coefficients.
const CAUCHY_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Taylor,
    Pade,
    Collocation,
}

fn check_k0(k0: f64) -> Result<()> {
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(ImpedanceError::Usage(format!("k0 must be positive, got {k0}")));
    }
    Ok(())
}

pub fn leontovich_ibc0(coating: &CoatingSpec, pol: Polarization, k0: f64) -> Result<IbcCoefficients> {
    Ok(IbcCoefficients::ibc0(pol, leontovich_a0(coating, k0)?).with_material(*coating))
}

/// First-order Taylor fit: `a0` plus the slope at normal incidence, `b = 0`.
pub fn taylor_ibc1(coating: &CoatingSpec, pol: Polarization, k0: f64) -> Result<IbcCoefficients> {
    let a0 = leontovich_a0(coating, k0)?;
    let s = (coating.mu_r * coating.eps_r).sqrt();
    let t = k0 * coating.thickness;
    let tn = (s * t).tan();
    let a1 = match pol {
        Polarization::Te => {
            Z0 * t / (2.0 * coating.eps_r) + Z0 * tn / (2.0 * s * coating.eps_r) + Z0 * t * tn * tn / (2.0 * coating.eps_r)
        }
        Polarization::Tm => {
            let sec2 = 1.0 + tn * tn;
            Z0 * coating.mu_r * (t * sec2 / (2.0 * s * s) - tn / (2.0 * s * s * s))
        }
    };
    Ok(IbcCoefficients::ibc1(pol, a0, a1, Complex64::new(0.0, 0.0)).with_material(*coating))
}

/// Second Taylor coefficient of the TE impedance in closed form.
pub fn taylor_c2_te(coating: &CoatingSpec, k0: f64) -> Result<Complex64> {
    leontovich_a0(coating, k0)?;
    let (eps, mu) = (coating.eps_r, coating.mu_r);
    let s = (mu * eps).sqrt();
    let t = k0 * coating.thickness;
    let tn = (s * t).tan();
    let sec2 = 1.0 + tn * tn;
    Ok(-Z0 * tn / (8.0 * eps * s * s * s) + Z0 * t * sec2 / (8.0 * eps * eps * mu) + Z0 * t * t * tn * sec2 / (4.0 * eps * s))
}

/// Taylor coefficients `c0..c4` of `Z^ex(ξ)` about `ξ = 0`.
///
/// `c0` is the exact normal-incidence value. The others come from the
/// trapezoidal rule for the Cauchy integral on a circle well inside the
/// nearest layer resonance, which is spectrally accurate.
pub fn taylor_coefficients(coating: &CoatingSpec, pol: Polarization, k0: f64) -> Result<[Complex64; 5]> {
    check_k0(k0)?;
    let c0 = leontovich_a0(coating, k0)?;
    let t = k0 * coating.thickness;
    if t == 0.0 {
        return Ok([c0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
    }
    let me = coating.mu_r * coating.eps_r;
    // tan(s t) has poles at s = (n + 1/2)π / t, i.e. ξ_n = s_n² − με.
    let nearest = (0..4)
        .map(|n| {
            let sn = (n as f64 + 0.5) * PI / t;
            (sn * sn - me).norm()
        })
        .fold(f64::INFINITY, f64::min);
    let r = 0.25 * nearest;
    let n = CAUCHY_POINTS;
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let w = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        samples.push((w, exact_impedance_complex(pol, w * r, coating, k0)?));
    }
    let mut c = [c0; 5];
    for (m, cm) in c.iter_mut().enumerate().skip(1) {
        let sum: Complex64 = samples.iter().map(|(w, f)| f * w.powu(m as u32).conj()).sum();
        *cm = sum / (n as f64 * r.powi(m as i32));
    }
    Ok(c)
}

/// `[1/1]` Padé approximant from `c0, c1, c2`.
pub fn pade_ibc1_from_taylor(pol: Polarization, c: [Complex64; 3]) -> Result<IbcCoefficients> {
    let [c0, c1, c2] = c;
    if c1.norm() == 0.0 {
        return Err(ImpedanceError::DegenerateFit("Padé IBC1 needs c1 != 0".into()));
    }
    let b = -c2 / c1;
    let a = c1 - c0 * c2 / c1;
    if !(a.is_finite() && b.is_finite()) {
        return Err(ImpedanceError::DegenerateFit("Padé IBC1 coefficients are not finite".into()));
    }
    Ok(IbcCoefficients::ibc1(pol, c0, a, b))
}

pub fn pade_ibc1(coating: &CoatingSpec, pol: Polarization, k0: f64) -> Result<IbcCoefficients> {
    let c = taylor_coefficients(coating, pol, k0)?;
    Ok(pade_ibc1_from_taylor(pol, [c[0], c[1], c[2]])?.with_material(*coating))
}

/// `[2/2]` Padé approximant from `c0..c4`.
pub fn pade_ibc2_from_taylor(pol: Polarization, c: [Complex64; 5]) -> Result<IbcCoefficients> {
    let [c0, c1, c2, c3, c4] = c;
    // [[c2, c1], [c3, c2]] (b, b') = −(c3, c4)
    let det = c2 * c2 - c1 * c3;
    let scale = (c2 * c2).norm() + (c1 * c3).norm();
    if scale == 0.0 || det.norm() <= 1e-14 * scale {
        return Err(ImpedanceError::DegenerateFit("Padé IBC2 Hankel system is singular".into()));
    }
    let b = (-c3 * c2 + c1 * c4) / det;
    let bp = (-c4 * c2 + c3 * c3) / det;
    let a = c1 + b * c0;
    let ap = c2 + b * c1 + bp * c0;
    Ok(IbcCoefficients::ibc2(pol, c0, a, b, ap, bp))
}

pub fn pade_ibc2(coating: &CoatingSpec, pol: Polarization, k0: f64) -> Result<IbcCoefficients> {
    let c = taylor_coefficients(coating, pol, k0)?;
    Ok(pade_ibc2_from_taylor(pol, c)?.with_material(*coating))
}

fn check_nodes(thetas: &[f64]) -> Result<()> {
    for (i, &t) in thetas.iter().enumerate() {
        if !(t > 0.0 && t < PI / 2.0) {
            return Err(ImpedanceError::Usage(format!("collocation angle {t} rad outside (0, π/2)")));
        }
        if thetas[..i].iter().any(|&u| u == t) {
            return Err(ImpedanceError::Usage(format!("collocation angles must be distinct, {t} repeated")));
        }
    }
    Ok(())
}

// Collocation works with the divided difference w(ξ) = (Z(ξ) − a0)/ξ. The
// interpolation conditions Z (1 + b ξ + b' ξ²) = a0 + a ξ + a' ξ² become
//     w = α + α' ξ − b ξ w − b' ξ² w,   α = a − b a0,  α' = a' − b' a0,
// which removes the near-dependency on the constant a0 and the cancellation
// in Z − a0.

/// Interpolates `Z^ex` at `ξ = 0` and at the two angles (radians).
pub fn collocation_ibc1(coating: &CoatingSpec, pol: Polarization, k0: f64, theta1: f64, theta2: f64) -> Result<IbcCoefficients> {
    check_nodes(&[theta1, theta2])?;
    let a0 = leontovich_a0(coating, k0)?;
    let (x1, x2) = (xi_of_theta(theta1), xi_of_theta(theta2));
    let w1 = exact_impedance_slope(pol, x1, coating, k0)?;
    let w2 = exact_impedance_slope(pol, x2, coating, k0)?;
    // [[1, −ξ1 w1], [1, −ξ2 w2]] (α, b) = (w1, w2)
    let det = x1 * w1 - x2 * w2;
    let scale = (x1 * w1).norm() + (x2 * w2).norm();
    if scale == 0.0 || det.norm() <= 1e-13 * scale {
        return Err(ImpedanceError::CollinearCollocation);
    }
    let b = (w2 - w1) / det;
    let alpha = (w1 * (-x2 * w2) + x1 * w1 * w2) / det;
    Ok(IbcCoefficients::ibc1(pol, a0, alpha + b * a0, b).with_material(*coating))
}

/// Interpolates `Z^ex` at `ξ = 0` and at four angles (radians).
pub fn collocation_ibc2(coating: &CoatingSpec, pol: Polarization, k0: f64, thetas: [f64; 4]) -> Result<IbcCoefficients> {
    check_nodes(&thetas)?;
    let a0 = leontovich_a0(coating, k0)?;
    let mut m = CMatrix::zeros(4, 4);
    let mut rhs = Vec::with_capacity(4);
    for (i, &t) in thetas.iter().enumerate() {
        let x = xi_of_theta(t);
        let w = exact_impedance_slope(pol, x, coating, k0)?;
        // unknowns (α, α', b, b')
        let row = [Complex64::new(1.0, 0.0), Complex64::new(x, 0.0), -x * w, -x * x * w];
        let rs = row.iter().fold(0.0, |acc: f64, v| acc.max(v.norm()));
        if rs == 0.0 {
            return Err(ImpedanceError::CollinearCollocation);
        }
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = v / rs;
        }
        rhs.push(w / rs);
    }
    let mut col_scale = [1.0; 4];
    for (j, s) in col_scale.iter_mut().enumerate() {
        let mx = (0..4).map(|i| m[(i, j)].norm()).fold(0.0, f64::max);
        if mx == 0.0 {
            return Err(ImpedanceError::CollinearCollocation);
        }
        *s = 1.0 / mx;
        for i in 0..4 {
            m[(i, j)] *= *s;
        }
    }
    let f = match lu_factor(&m) {
        Ok(f) => f,
        Err(LinsolveError::Singular { .. }) => return Err(ImpedanceError::CollinearCollocation),
        Err(e) => return Err(ImpedanceError::DegenerateFit(e.to_string())),
    };
    let cond = 1.0 / f.rcond_estimate;
    if !(cond <= MAX_COLLOCATION_COND) {
        return Err(ImpedanceError::IllConditioned { cond });
    }
    let y = f.solve(&rhs).map_err(|e| ImpedanceError::DegenerateFit(e.to_string()))?;
    let v: Vec<Complex64> = y.iter().zip(&col_scale).map(|(v, s)| v * s).collect();
    let (b, bp) = (v[2], v[3]);
    Ok(IbcCoefficients::ibc2(pol, a0, v[0] + b * a0, b, v[1] + bp * a0, bp).with_material(*coating))
}

/// Fits coefficients of the requested order. `nodes_deg` overrides the
/// default collocation angles (degrees).
pub fn fit_coefficients(
    coating: &CoatingSpec,
    pol: Polarization,
    k0: f64,
    order: IbcOrder,
    method: FitMethod,
    nodes_deg: Option<&[f64]>,
) -> Result<IbcCoefficients> {
    check_k0(k0)?;
    match (order, method) {
        (IbcOrder::Ibc0, _) => leontovich_ibc0(coating, pol, k0),
        (IbcOrder::Ibc1, FitMethod::Taylor) => taylor_ibc1(coating, pol, k0),
        (IbcOrder::Ibc1, FitMethod::Pade) => pade_ibc1(coating, pol, k0),
        (IbcOrder::Ibc1, FitMethod::Collocation) => {
            let nodes = nodes_deg.unwrap_or(&DEFAULT_IBC1_NODES_DEG);
            if nodes.len() != 2 {
                return Err(ImpedanceError::Usage(format!("IBC1 collocation needs 2 angles, got {}", nodes.len())));
            }
            collocation_ibc1(coating, pol, k0, nodes[0].to_radians(), nodes[1].to_radians())
        }
        (IbcOrder::Ibc2, FitMethod::Taylor) => {
            let c = taylor_coefficients(coating, pol, k0)?;
            let zero = Complex64::new(0.0, 0.0);
            Ok(IbcCoefficients::ibc2(pol, c[0], c[1], zero, c[2], zero).with_material(*coating))
        }
        (IbcOrder::Ibc2, FitMethod::Pade) => pade_ibc2(coating, pol, k0),
        (IbcOrder::Ibc2, FitMethod::Collocation) => {
            let nodes = nodes_deg.unwrap_or(&DEFAULT_IBC2_NODES_DEG);
            if nodes.len() != 4 {
                return Err(ImpedanceError::Usage(format!("IBC2 collocation needs 4 angles, got {}", nodes.len())));
            }
            let r = [nodes[0].to_radians(), nodes[1].to_radians(), nodes[2].to_radians(), nodes[3].to_radians()];
            collocation_ibc2(coating, pol, k0, r)
        }
    }
}
