use super::{exact_impedance, xi_of_theta, CoatingSpec, IbcCoefficients, Polarization, Result};
use num_complex::Complex64;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedanceRow {
    pub theta_deg: f64,
    pub exact: Complex64,
    pub ibc0: Complex64,
    pub ibc1: Complex64,
    pub ibc2: Complex64,
}

/// Exact and fitted impedances over the given angles (degrees).
pub fn impedance_table(
    coating: &CoatingSpec,
    pol: Polarization,
    k0: f64,
    thetas_deg: &[f64],
    fits: [&IbcCoefficients; 3],
) -> Result<Vec<ImpedanceRow>> {
    thetas_deg
        .iter()
        .map(|&t| {
            let xi = xi_of_theta(t.to_radians());
            Ok(ImpedanceRow {
                theta_deg: t,
                exact: exact_impedance(pol, xi, coating, k0)?,
                ibc0: fits[0].eval(xi)?,
                ibc1: fits[1].eval(xi)?,
                ibc2: fits[2].eval(xi)?,
            })
        })
        .collect()
}

/// `max |Z_fit − Z^ex|` over the given angles (degrees).
pub fn max_fit_error(coeffs: &IbcCoefficients, coating: &CoatingSpec, k0: f64, thetas_deg: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in thetas_deg {
        let xi = xi_of_theta(t.to_radians());
        let e = (coeffs.eval(xi)? - exact_impedance(coeffs.pol, xi, coating, k0)?).norm();
        worst = worst.max(e);
    }
    Ok(worst)
}

pub fn write_impedance_csv<W: Write>(mut w: W, rows: &[ImpedanceRow]) -> std::io::Result<()> {
    writeln!(
        w,
        "theta_deg,Re_Zexact,Im_Zexact,Re_Zibc0,Im_Zibc0,Re_Zibc1,Im_Zibc1,Re_Zibc2,Im_Zibc2,err_ibc0,err_ibc1,err_ibc2"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.theta_deg,
            r.exact.re,
            r.exact.im,
            r.ibc0.re,
            r.ibc0.im,
            r.ibc1.re,
            r.ibc1.im,
            r.ibc2.re,
            r.ibc2.im,
            (r.ibc0 - r.exact).norm(),
            (r.ibc1 - r.exact).norm(),
            (r.ibc2 - r.exact).norm(),
        )?;
    }
    Ok(())
}
