use super::pairs::{pair_integrals, PairIntegrals, QuadratureOptions, Rules};
use super::{AssemblyError, Result};
use crate::exec::Execution;
use crate::geometry::{Contour, SpaceKind};
use crate::impedance::Polarization;
use crate::linsolve::CMatrix;
use crate::specfun::{quad_rule, QuadKind, Z0};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C64 = Complex64;

/// Largest admissible `k0·h` for any element (about three elements per wavelength).
pub const RESOLUTION_LIMIT: f64 = 2.0;

pub fn check_resolution(contour: &Contour, k0: f64) -> Result<()> {
    if !(k0 > 0.0 && k0.is_finite()) {
        return Err(AssemblyError::Usage(format!("k0 must be positive and finite, got {k0}")));
    }
    for (e, &h) in contour.lengths().iter().enumerate() {
        if k0 * h >= RESOLUTION_LIMIT {
            return Err(AssemblyError::Resolution { element: e, kh: k0 * h });
        }
    }
    Ok(())
}

/// Kernel matrices. `*_p1` are P1 × P1; the P0 variants are only filled
/// when requested.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBlocks {
    /// `i ∬ (k G φ_i φ_j τ_i·τ_j − G φ_i' φ_j' / k)`
    pub bs_p1: CMatrix,
    /// `i k ∬ G φ_i φ_j`
    pub b_p1: CMatrix,
    /// `∬ φ_i(x) φ_j(y) n(x)·∇_y G`
    pub q_p1: CMatrix,
    pub b_p0: Option<CMatrix>,
    /// P1 test × P0 trial.
    pub q_p0: Option<CMatrix>,
}

pub fn assemble_kernels(
    contour: &Contour,
    k0: f64,
    opts: &QuadratureOptions,
    exec: Execution,
    with_p0: bool,
) -> Result<KernelBlocks> {
    check_resolution(contour, k0)?;
    let rules = Rules::new(opts)?;
    let ne = contour.n_elements();
    let nn = contour.n_nodes();
    let pairs: Vec<Vec<PairIntegrals>> =
        exec.map_collect(ne, |e| (e..ne).map(|f| pair_integrals(contour, k0, e, f, &rules)).collect());

    let i = C64::new(0.0, 1.0);
    let ik = C64::new(0.0, k0);
    let mut bs = CMatrix::zeros(nn, nn);
    let mut b = CMatrix::zeros(nn, nn);
    let mut q = CMatrix::zeros(nn, nn);
    let mut b0 = with_p0.then(|| CMatrix::zeros(ne, ne));
    let mut q0 = with_p0.then(|| CMatrix::zeros(nn, ne));
    let els = contour.elements();
    for (e, row) in pairs.iter().enumerate() {
        for (off, p) in row.iter().enumerate() {
            let f = e + off;
            let (ie, jf) = (els[e], els[f]);
            let (te, tf) = (contour.tangent(e), contour.tangent(f));
            let tt = te[0] * tf[0] + te[1] * tf[1];
            let (he, hf) = (contour.length(e), contour.length(f));
            let de = [-1.0 / he, 1.0 / he];
            let df = [-1.0 / hf, 1.0 / hf];
            for a in 0..2 {
                for c in 0..2 {
                    let bval = ik * p.g[a][c];
                    let bsval = i * (p.g[a][c] * (k0 * tt) - p.g0 * (de[a] * df[c] / k0));
                    b[(ie[a], jf[c])] += bval;
                    bs[(ie[a], jf[c])] += bsval;
                    q[(ie[a], jf[c])] += p.q_ef[a][c];
                    if e != f {
                        b[(jf[c], ie[a])] += bval;
                        bs[(jf[c], ie[a])] += bsval;
                        q[(jf[c], ie[a])] += p.q_fe[c][a];
                    }
                }
            }
            if let (Some(b0), Some(q0)) = (b0.as_mut(), q0.as_mut()) {
                let gsum = ik * p.g0;
                b0[(e, f)] += gsum;
                if e != f {
                    b0[(f, e)] += gsum;
                }
                for a in 0..2 {
                    q0[(ie[a], f)] += p.q_ef[a][0] + p.q_ef[a][1];
                    if e != f {
                        q0[(jf[a], e)] += p.q_fe[a][0] + p.q_fe[a][1];
                    }
                }
            }
        }
    }
    Ok(KernelBlocks { bs_p1: bs, b_p1: b, q_p1: q, b_p0: b0, q_p0: q0 })
}

/// The `(B − S)` matrix on P1.
pub fn assemble_bs(contour: &Contour, k0: f64) -> Result<CMatrix> {
    Ok(assemble_kernels(contour, k0, &QuadratureOptions::default(), Execution::default(), false)?.bs_p1)
}

/// The double-layer coupling `Q` on P1 × P1.
pub fn assemble_q(contour: &Contour, k0: f64) -> Result<CMatrix> {
    Ok(assemble_kernels(contour, k0, &QuadratureOptions::default(), Execution::default(), false)?.q_p1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassMode {
    #[default]
    Consistent,
    /// Row-sum lumped `I2`.
    Lumped,
}

/// Mass and first-derivative matrices. `I1` lives on P1; `I2`, `D3` on the
/// M space; `D1` is P1 × M, `D5` is M × P1. `ks` is the P1 stiffness matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MassAndDerivative {
    pub i1: CMatrix,
    pub i2: CMatrix,
    pub d1: CMatrix,
    pub d3: CMatrix,
    pub d5: CMatrix,
    pub ks: CMatrix,
    pub m_space: SpaceKind,
}

fn p1_mass(contour: &Contour) -> CMatrix {
    let n = contour.n_nodes();
    let mut m = CMatrix::zeros(n, n);
    for (e, &[i, j]) in contour.elements().iter().enumerate() {
        let h = contour.length(e);
        m[(i, i)] += C64::from(h / 3.0);
        m[(j, j)] += C64::from(h / 3.0);
        m[(i, j)] += C64::from(h / 6.0);
        m[(j, i)] += C64::from(h / 6.0);
    }
    m
}

fn lump(m: &CMatrix) -> CMatrix {
    let n = m.rows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = m.row(i).iter().sum();
    }
    out
}

pub fn assemble_mass_and_d(contour: &Contour, m_space: SpaceKind, mass: MassMode) -> Result<MassAndDerivative> {
    let nn = contour.n_nodes();
    let els = contour.elements();
    let i1 = p1_mass(contour);
    // D_ij = ∫ φ_i φ_j' ; K_ij = ∫ φ_i' φ_j'
    let mut d = CMatrix::zeros(nn, nn);
    let mut ks = CMatrix::zeros(nn, nn);
    for (e, &[i, j]) in els.iter().enumerate() {
        let h = contour.length(e);
        for r in [i, j] {
            d[(r, i)] -= C64::from(0.5);
            d[(r, j)] += C64::from(0.5);
        }
        ks[(i, i)] += C64::from(1.0 / h);
        ks[(j, j)] += C64::from(1.0 / h);
        ks[(i, j)] -= C64::from(1.0 / h);
        ks[(j, i)] -= C64::from(1.0 / h);
    }
    match m_space {
        SpaceKind::P1Nodal => {
            let i2 = match mass {
                MassMode::Consistent => i1.clone(),
                MassMode::Lumped => lump(&i1),
            };
            Ok(MassAndDerivative { i1, i2, d1: d.clone(), d3: d.clone(), d5: d, ks, m_space })
        }
        SpaceKind::P0Elementwise => {
            if !contour.is_closed() {
                return Err(AssemblyError::Usage("P0 currents need a closed contour".into()));
            }
            let ne = contour.n_elements();
            let mut i2 = CMatrix::zeros(ne, ne);
            let mut d5 = CMatrix::zeros(ne, nn);
            for (e, &[i, j]) in els.iter().enumerate() {
                i2[(e, e)] = C64::from(contour.length(e));
                d5[(e, i)] = C64::from(-1.0);
                d5[(e, j)] = C64::from(1.0);
            }
            let d1 = d5.transpose().scaled(C64::from(-1.0));
            // ψ_f' = δ(start of f) − δ(end of f); ψ_e takes the value ½ at its end nodes.
            let mut d3 = CMatrix::zeros(ne, ne);
            for f in 0..ne {
                let (prev, next) = ((f + ne - 1) % ne, (f + 1) % ne);
                d3[(prev, f)] += C64::from(0.5);
                d3[(next, f)] -= C64::from(0.5);
            }
            Ok(MassAndDerivative { i1, i2, d1, d3, d5, ks, m_space })
        }
    }
}

/// Plane wave `E0 · exp(−i k0 d̂·x)` with `d̂ = (cos φ_inc, sin φ_inc)`.
/// The amplitude is that of the electric field in both polarizations; in
/// TE the scalar field is `H_z = E0/Z0 · exp(−i k0 d̂·x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentWave {
    pub phi_inc: f64,
    pub amplitude: C64,
    pub pol: Polarization,
    pub k0: f64,
}

impl IncidentWave {
    pub fn new(pol: Polarization, k0: f64, phi_inc: f64) -> Self {
        Self { phi_inc, amplitude: C64::new(1.0, 0.0), pol, k0 }
    }

    pub fn with_amplitude(mut self, amplitude: C64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn direction(&self) -> [f64; 2] {
        [self.phi_inc.cos(), self.phi_inc.sin()]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k0 > 0.0 && self.k0.is_finite()) {
            return Err(AssemblyError::Usage(format!("k0 must be positive and finite, got {}", self.k0)));
        }
        if !self.phi_inc.is_finite() || !self.amplitude.is_finite() {
            return Err(AssemblyError::Usage("incident wave has non-finite parameters".into()));
        }
        Ok(())
    }
}

/// `[E; H]`: tangential incident traces tested against P1 (E rows) and the
/// M space (H rows).
pub fn assemble_rhs(contour: &Contour, wave: &IncidentWave, m_space: SpaceKind) -> Result<Vec<C64>> {
    wave.validate()?;
    let rule = quad_rule(QuadKind::GaussLegendre, 8)?.unit_interval();
    let nn = contour.n_nodes();
    let nm = match m_space {
        SpaceKind::P1Nodal => nn,
        SpaceKind::P0Elementwise => contour.n_elements(),
    };
    let mut out = vec![C64::new(0.0, 0.0); nn + nm];
    let d = wave.direction();
    for (e, &[i, j]) in contour.elements().iter().enumerate() {
        let h = contour.length(e);
        let n = contour.normal(e);
        let dn = d[0] * n[0] + d[1] * n[1];
        for &(t, w) in &rule {
            let x = contour.point(e, t);
            let u = wave.amplitude * C64::new(0.0, -wave.k0 * (d[0] * x[0] + d[1] * x[1])).exp();
            let (fe, fh) = match wave.pol {
                Polarization::Tm => (u, -u * dn / Z0),
                Polarization::Te => (u * dn, u / Z0),
            };
            let wh = w * h;
            out[i] += fe * (wh * (1.0 - t));
            out[j] += fe * (wh * t);
            match m_space {
                SpaceKind::P1Nodal => {
                    out[nn + i] += fh * (wh * (1.0 - t));
                    out[nn + j] += fh * (wh * t);
                }
                SpaceKind::P0Elementwise => out[nn + e] += fh * wh,
            }
        }
    }
    Ok(out)
}
