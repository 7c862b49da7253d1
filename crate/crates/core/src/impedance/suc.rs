use super::{IbcCoefficients, IbcOrder, ImpedanceError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClauseStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SucClause {
    pub name: String,
    pub lhs: f64,
    pub tolerance: f64,
    pub status: ClauseStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SucReport {
    pub passed: bool,
    pub clauses: Vec<SucClause>,
    pub tolerance: f64,
    /// Auxiliary quantities (Δ, α, β for IBC2).
    pub values: Vec<(String, f64)>,
}

impl SucReport {
    fn new(clauses: Vec<SucClause>, tolerance: f64, values: Vec<(String, f64)>) -> Self {
        let passed = clauses.iter().all(|c| c.status != ClauseStatus::Fail);
        Self { passed, clauses, tolerance, values }
    }

    pub fn clause(&self, name: &str) -> Option<&SucClause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    /// `key=value` lines.
    pub fn to_key_values(&self, prefix: &str) -> String {
        let mut out = format!("{prefix}passed={}\n{prefix}tolerance={:e}\n", self.passed, self.tolerance);
        for c in &self.clauses {
            let status = match c.status {
                ClauseStatus::Pass => "pass",
                ClauseStatus::Fail => "fail",
                ClauseStatus::NotApplicable => "n/a",
            };
            out += &format!("{prefix}clause[{}]={} lhs={:e}\n", c.name, status, c.lhs);
        }
        for (k, v) in &self.values {
            out += &format!("{prefix}{k}={v:e}\n");
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Rel {
    NonZero,
    Zero,
    Ge0,
    Le0,
}

fn clause(name: &str, lhs: f64, rel: Rel, tol: f64) -> SucClause {
    let ok = match rel {
        Rel::NonZero => lhs.abs() > tol,
        Rel::Zero => lhs.abs() <= tol,
        Rel::Ge0 => lhs >= -tol,
        Rel::Le0 => lhs <= tol,
    };
    SucClause { name: name.to_string(), lhs, tolerance: tol, status: if ok { ClauseStatus::Pass } else { ClauseStatus::Fail } }
}

fn material_clauses(c: &IbcCoefficients) -> Vec<SucClause> {
    match c.material {
        Some(m) => vec![clause("Im(mu) <= 0", m.mu_r.im, Rel::Le0, 0.0), clause("Im(eps) <= 0", m.eps_r.im, Rel::Le0, 0.0)],
        None => ["Im(mu) <= 0", "Im(eps) <= 0"]
            .iter()
            .map(|n| SucClause { name: n.to_string(), lhs: 0.0, tolerance: 0.0, status: ClauseStatus::NotApplicable })
            .collect(),
    }
}

/// Default absolute tolerance, `1e-9 |a0|`.
pub fn default_tolerance(c: &IbcCoefficients) -> f64 {
    1e-9 * c.a0.norm()
}

/// Sufficient uniqueness conditions for first-order coefficients. The
/// clauses are evaluated on the coefficient values exactly as given.
pub fn suc_check_ibc1(c: &IbcCoefficients, tol: f64) -> Result<SucReport> {
    if c.order != IbcOrder::Ibc1 {
        return Err(ImpedanceError::Usage(format!("suc_check_ibc1 needs IBC1 coefficients, got {:?}", c.order)));
    }
    let d = c.a - c.b.conj() * c.a0;
    let mut clauses = material_clauses(c);
    clauses.push(clause("a_j - b_j* a0 != 0", d.norm(), Rel::NonZero, tol));
    clauses.push(clause("Re(a_j - b_j* a0) = 0", d.re, Rel::Zero, tol));
    clauses.push(clause("Im(a0* a_j) Im(a_j - b_j* a0) >= 0", (c.a0.conj() * c.a).im * d.im, Rel::Ge0, tol));
    clauses.push(clause("Im(b_j) Im(a_j - b_j* a0) >= 0", c.b.im * d.im, Rel::Ge0, tol));
    Ok(SucReport::new(clauses, tol, vec![("re_a_minus_bconj_a0".into(), d.re), ("im_a_minus_bconj_a0".into(), d.im)]))
}

/// Sufficient uniqueness conditions for second-order coefficients.
pub fn suc_check_ibc2(c: &IbcCoefficients, tol: f64) -> Result<SucReport> {
    if c.order != IbcOrder::Ibc2 {
        return Err(ImpedanceError::Usage(format!("suc_check_ibc2 needs IBC2 coefficients, got {:?}", c.order)));
    }
    let (a0, a, b, ap, bp) = (c.a0, c.a, c.b, c.a_prime, c.b_prime);
    let p = a * bp.conj() - ap * b.conj();
    let q = ap - a0 * bp.conj();
    let delta: Complex64 = (a0 * b.conj() - a) * p - q * q;
    let alpha = (delta.conj() * p).im;
    let beta = (delta.conj() * (a0 * bp.conj() - ap)).im;
    let mut clauses = material_clauses(c);
    clauses.push(clause("Delta != 0", delta.norm(), Rel::NonZero, tol));
    clauses.push(clause("Re[Delta* (a_j b'_j* - a'_j b_j*)] = 0", (delta.conj() * p).re, Rel::Zero, tol));
    clauses.push(clause("Re[Delta* (a'_j - a0 b'_j*)] = 0", (delta.conj() * q).re, Rel::Zero, tol));
    clauses.push(clause("alpha Im(b'_j) + beta Im(b_j b'_j*) <= 0", alpha * bp.im + beta * (b * bp.conj()).im, Rel::Le0, tol));
    clauses.push(clause("alpha Im(a'_j a0*) - beta Im(a'_j a_j*) <= 0", alpha * (ap * a0.conj()).im - beta * (ap * a.conj()).im, Rel::Le0, tol));
    clauses.push(clause("-alpha Im(b_j) + beta Im(b'_j) <= 0", -alpha * b.im + beta * bp.im, Rel::Le0, tol));
    clauses.push(clause("alpha Im(a_j a0*) - beta Im(a'_j a0*) >= 0", alpha * (a * a0.conj()).im - beta * (ap * a0.conj()).im, Rel::Ge0, tol));
    let values = vec![
        ("delta_re".into(), delta.re),
        ("delta_im".into(), delta.im),
        ("alpha".into(), alpha),
        ("beta".into(), beta),
    ];
    Ok(SucReport::new(clauses, tol, values))
}

/// Coercivity condition of the 2D variational problem,
/// `Re(a_j) + |a0| |b_j + a_j*/a0*| / 2 = 0`.
pub fn wellposedness_check(c: &IbcCoefficients, tol: f64) -> Result<SucReport> {
    if c.order == IbcOrder::Ibc0 {
        return Err(ImpedanceError::Usage("well-posedness check needs IBC1 or IBC2 coefficients".into()));
    }
    if c.a0.norm() == 0.0 {
        return Err(ImpedanceError::Usage("a0 = 0".into()));
    }
    let lhs = c.a.re + c.a0.norm() * (c.b + c.a.conj() / c.a0.conj()).norm() / 2.0;
    let name = format!("Re(a_{0}) + |a0| |b_{0} + a_{0}*/a0*| / 2 = 0", c.pol.index());
    Ok(SucReport::new(vec![clause(&name, lhs, Rel::Zero, tol)], tol, vec![("lhs".into(), lhs)]))
}
