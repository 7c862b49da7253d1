use super::blocks::{assemble_kernels, assemble_mass_and_d, assemble_rhs, IncidentWave, KernelBlocks, MassAndDerivative, MassMode};
use super::pairs::QuadratureOptions;
use super::{AssemblyError, Result};
use crate::exec::Execution;
use crate::geometry::{Contour, DofSpace, SpaceKind};
use crate::impedance::{IbcCoefficients, IbcOrder, Polarization};
use crate::linsolve::{lu_factor_with, CMatrix, Factorization};
use crate::specfun::Z0;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

type C64 = Complex64;
const CZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceMode {
    /// Every field on P1.
    #[default]
    AllP1,
    /// `J` on P1, `M` and the auxiliaries on P0. TE with IBC0/IBC1 on closed contours only.
    P0Currents,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AssemblyOptions {
    pub quadrature: QuadratureOptions,
    pub mass: MassMode,
    pub space: SpaceMode,
    #[serde(skip)]
    pub exec: Execution,
}

/// Physical (`exp(+iωt)`) coefficients with the spatial scaling applied:
/// `a1 = i a / k0²`, `b1 = b / k0²`, `a2 = i a' / k0⁴`, `b2 = b' / k0⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledCoefficients {
    pub a0: C64,
    pub a1: C64,
    pub b1: C64,
    pub a2: C64,
    pub b2: C64,
}

impl ScaledCoefficients {
    pub fn new(c: &IbcCoefficients, k0: f64) -> Self {
        let p = c.physical();
        let (k2, k4) = (k0 * k0, k0.powi(4));
        Self { a0: p.a0, a1: p.a / k2, b1: p.b / k2, a2: p.a_prime / k4, b2: p.b_prime / k4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemMeta {
    pub pol: Polarization,
    pub order: IbcOrder,
    pub k0: f64,
    pub coefficients: ScaledCoefficients,
    /// Unknown counts for `J` and `M`; each auxiliary field has `n_m` unknowns.
    pub n_j: usize,
    pub n_m: usize,
    pub aux_fields: usize,
    pub mass: MassMode,
    pub space: SpaceMode,
    /// Endpoint DOFs held at zero in both `J` and `M`.
    pub constrained: Vec<usize>,
    pub geometry: String,
    pub phi_inc: f64,
}

impl SystemMeta {
    pub fn reduced_dim(&self) -> usize {
        self.n_j + self.n_m
    }

    pub fn full_dim(&self) -> usize {
        self.n_j + self.n_m * (1 + self.aux_fields)
    }

    pub fn m_space(&self) -> SpaceKind {
        match self.space {
            SpaceMode::AllP1 => SpaceKind::P1Nodal,
            SpaceMode::P0Currents => SpaceKind::P0Elementwise,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Blocks {
    pub kernels: KernelBlocks,
    pub mass: MassAndDerivative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub blocks: Blocks,
    /// Unknown order `[J, M, X, Y, X', Y']`, truncated to the IBC order.
    pub full_matrix: CMatrix,
    pub reduced_matrix: Option<CMatrix>,
    pub rhs: Vec<C64>,
    pub meta: SystemMeta,
}

impl AssembledSystem {
    pub fn reduced_rhs(&self) -> &[C64] {
        &self.rhs[..self.meta.reduced_dim()]
    }

    /// Full-length right-hand side for another incident wave on the same system.
    pub fn rhs_for(&self, contour: &Contour, wave: &IncidentWave) -> Result<Vec<C64>> {
        if wave.pol != self.meta.pol || wave.k0 != self.meta.k0 {
            return Err(AssemblyError::Usage("incident wave does not match the assembled system".into()));
        }
        let mut rhs = assemble_rhs(contour, wave, self.meta.m_space())?;
        rhs.resize(self.meta.full_dim(), CZERO);
        for &c in &self.meta.constrained {
            rhs[c] = CZERO;
            rhs[self.meta.n_j + c] = CZERO;
        }
        Ok(rhs)
    }
}

pub fn build_full_system(
    contour: &Contour,
    coeffs: &IbcCoefficients,
    wave: &IncidentWave,
    opts: &AssemblyOptions,
) -> Result<AssembledSystem> {
    coeffs.validate()?;
    wave.validate()?;
    if coeffs.pol != wave.pol {
        return Err(AssemblyError::Usage(format!(
            "coefficients are for {} but the incident wave is {}",
            coeffs.pol.name(),
            wave.pol.name()
        )));
    }
    let (pol, order, k0) = (coeffs.pol, coeffs.order, wave.k0);
    if opts.space == SpaceMode::P0Currents && (pol == Polarization::Tm || order == IbcOrder::Ibc2 || !contour.is_closed()) {
        return Err(AssemblyError::Usage("P0 currents support TE with IBC0/IBC1 on closed contours only".into()));
    }
    let m_space = match opts.space {
        SpaceMode::AllP1 => SpaceKind::P1Nodal,
        SpaceMode::P0Currents => SpaceKind::P0Elementwise,
    };
    let kernels = assemble_kernels(contour, k0, &opts.quadrature, opts.exec, m_space == SpaceKind::P0Elementwise)?;
    let mass = assemble_mass_and_d(contour, m_space, opts.mass)?;
    let sc = ScaledCoefficients::new(coeffs, k0);

    let nj = contour.n_nodes();
    let nm = mass.i2.rows();
    let m = order.aux_fields();
    let dim = nj + nm * (1 + m);
    let (om, ox, oy, oxp, oyp) = (nj, nj + nm, nj + 2 * nm, nj + 3 * nm, nj + 4 * nm);
    let c = |z: f64| C64::from(z);
    let half = c(0.5);
    let inv2a0 = C64::from(1.0) / (c(2.0) * sc.a0);

    let (bs_j, b_m, q_jm) = match m_space {
        SpaceKind::P1Nodal => (&kernels.bs_p1, &kernels.b_p1, &kernels.q_p1),
        SpaceKind::P0Elementwise => (&kernels.bs_p1, kernels.b_p0.as_ref().unwrap(), kernels.q_p0.as_ref().unwrap()),
    };

    let mut a = CMatrix::zeros(dim, dim);
    let (jj, jm, mj, mm, sb, sa) = match pol {
        Polarization::Te => {
            let mut jj = bs_j.scaled(c(Z0));
            jj.add_scaled(half * sc.a0, &mass.i1);
            let mut mm = b_m.scaled(c(1.0 / Z0));
            mm.add_scaled(inv2a0, &mass.i2);
            (jj, q_jm.clone(), q_jm.transpose().scaled(c(-1.0)), mm, 1.0, 1.0)
        }
        Polarization::Tm => {
            let mut jj = kernels.b_p1.scaled(c(Z0));
            jj.add_scaled(half * sc.a0, &mass.i1);
            let mut mm = kernels.bs_p1.scaled(c(1.0 / Z0));
            mm.add_scaled(inv2a0, &mass.i2);
            (jj, kernels.q_p1.transpose(), kernels.q_p1.scaled(c(-1.0)), mm, -1.0, -1.0)
        }
    };
    a.set_block(0, 0, &jj);
    a.set_block(0, om, &jm);
    a.set_block(om, 0, &mj);
    a.set_block(om, om, &mm);
    if m >= 2 {
        a.set_block(0, ox, &mass.d1.scaled(half * sc.a1));
        a.set_block(0, oy, &mass.d1.scaled(half * sc.b1 * sb));
        a.set_block(om, ox, &mass.d3.scaled(inv2a0 * sc.a1 * sa));
        a.set_block(om, oy, &mass.d3.scaled(inv2a0 * sc.b1));
        a.set_block(ox, 0, &mass.d5.scaled(c(-1.0)));
        a.set_block(ox, ox, &mass.i2);
        a.set_block(oy, om, &mass.d3.scaled(c(-1.0)));
        a.set_block(oy, oy, &mass.i2);
    }
    if m >= 4 {
        a.set_block(0, oxp, &mass.ks.scaled(-half * sc.a2));
        a.set_block(0, oyp, &mass.ks.scaled(-half * sc.b2 * sb));
        a.set_block(om, oxp, &mass.ks.scaled(-inv2a0 * sc.a2 * sa));
        a.set_block(om, oyp, &mass.ks.scaled(-inv2a0 * sc.b2));
        a.set_block(oxp, ox, &mass.d3.scaled(c(-1.0)));
        a.set_block(oxp, oxp, &mass.i2);
        a.set_block(oyp, oy, &mass.d3.scaled(c(-1.0)));
        a.set_block(oyp, oyp, &mass.i2);
    }

    let constrained: Vec<usize> = DofSpace::p1(contour).constrained.into_iter().collect();
    for &cdof in &constrained {
        for idx in [cdof, om + cdof] {
            for col in 0..dim {
                a[(idx, col)] = CZERO;
            }
            for row in 0..dim {
                a[(row, idx)] = CZERO;
            }
            a[(idx, idx)] = c(1.0);
        }
    }

    let meta = SystemMeta {
        pol,
        order,
        k0,
        coefficients: sc,
        n_j: nj,
        n_m: nm,
        aux_fields: m,
        mass: opts.mass,
        space: opts.space,
        constrained,
        geometry: contour.fingerprint(),
        phi_inc: wave.phi_inc,
    };
    let mut sys = AssembledSystem { blocks: Blocks { kernels, mass }, full_matrix: a, reduced_matrix: None, rhs: Vec::new(), meta };
    sys.rhs = sys.rhs_for(contour, wave)?;
    if m == 0 {
        sys.reduced_matrix = Some(sys.full_matrix.clone());
    }
    Ok(sys)
}

/// `Z = D⁻¹ C` for the auxiliary rows, by block forward substitution; the
/// auxiliary diagonal block `D` must be block lower triangular.
fn aux_solve(full: &CMatrix, nr: usize, nb: usize, m: usize, c: &CMatrix, exec: Execution) -> Result<Vec<CMatrix>> {
    let mut z: Vec<CMatrix> = Vec::with_capacity(m);
    for k in 0..m {
        let r0 = nr + k * nb;
        for j in k + 1..m {
            if full.block(r0, nr + j * nb, nb, nb).max_abs() != 0.0 {
                return Err(AssemblyError::Usage("auxiliary block is not lower triangular".into()));
            }
        }
        let mut rhs = c.block(k * nb, 0, nb, c.cols());
        for (j, zj) in z.iter().enumerate() {
            let dkj = full.block(r0, nr + j * nb, nb, nb);
            if dkj.max_abs() != 0.0 {
                rhs.add_scaled(C64::from(-1.0), &dkj.matmul_with(zj, exec));
            }
        }
        let lu = lu_factor_with(&full.block(r0, r0, nb, nb), exec)?;
        z.push(lu.solve_matrix(&rhs, exec)?);
    }
    Ok(z)
}

/// Eliminates the auxiliary fields by nested Schur complements.
pub fn reduce_system_with(mut sys: AssembledSystem, exec: Execution) -> Result<AssembledSystem> {
    let meta = &sys.meta;
    let (nr, nb, m) = (meta.reduced_dim(), meta.n_m, meta.aux_fields);
    let full = &sys.full_matrix;
    let mut reduced = full.block(0, 0, nr, nr);
    if m > 0 {
        let c = full.block(nr, 0, m * nb, nr);
        let z = aux_solve(full, nr, nb, m, &c, exec)?;
        for (k, zk) in z.iter().enumerate() {
            let bk = full.block(0, nr + k * nb, nr, nb);
            if bk.max_abs() != 0.0 {
                reduced.add_scaled(C64::from(-1.0), &bk.matmul_with(zk, exec));
            }
        }
    }
    sys.reduced_matrix = Some(reduced);
    Ok(sys)
}

pub fn reduce_system(sys: AssembledSystem) -> Result<AssembledSystem> {
    reduce_system_with(sys, Execution::default())
}

/// Surface unknowns. `aux` holds `X, Y` (and `X', Y'`) in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCurrents {
    pub pol: Polarization,
    pub j: Vec<C64>,
    pub m: Vec<C64>,
    pub aux: Vec<Vec<C64>>,
    pub m_space: SpaceKind,
}

impl SurfaceCurrents {
    pub fn from_parts(meta: &SystemMeta, x: &[C64], aux: Vec<Vec<C64>>) -> Self {
        Self {
            pol: meta.pol,
            j: x[..meta.n_j].to_vec(),
            m: x[meta.n_j..meta.reduced_dim()].to_vec(),
            aux,
            m_space: meta.m_space(),
        }
    }

    /// `[J; M]` stacked.
    pub fn stacked(&self) -> Vec<C64> {
        self.j.iter().chain(&self.m).copied().collect()
    }
}

/// Auxiliary fields implied by `[J; M]` through the auxiliary rows.
pub fn recover_aux(sys: &AssembledSystem, jm: &[C64], exec: Execution) -> Result<Vec<Vec<C64>>> {
    let meta = &sys.meta;
    let (nr, nb, m) = (meta.reduced_dim(), meta.n_m, meta.aux_fields);
    if jm.len() != nr {
        return Err(AssemblyError::Usage(format!("expected {nr} unknowns, got {}", jm.len())));
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let cx = sys.full_matrix.block(nr, 0, m * nb, nr).matvec(jm);
    let rhs: Vec<C64> = sys.rhs[nr..].iter().zip(&cx).map(|(r, c)| r - c).collect();
    let z = aux_solve(&sys.full_matrix, nr, nb, m, &CMatrix::from_vec(m * nb, 1, rhs), exec)?;
    Ok(z.iter().map(|v| v.column(0)).collect())
}

pub fn solve_full(sys: &AssembledSystem, exec: Execution) -> Result<SurfaceCurrents> {
    let lu = lu_factor_with(&sys.full_matrix, exec)?;
    let x = lu.solve(&sys.rhs)?;
    let (nr, nb) = (sys.meta.reduced_dim(), sys.meta.n_m);
    let aux = (0..sys.meta.aux_fields).map(|k| x[nr + k * nb..nr + (k + 1) * nb].to_vec()).collect();
    Ok(SurfaceCurrents::from_parts(&sys.meta, &x, aux))
}

/// Factorization of the reduced matrix, for reuse across right-hand sides.
pub fn factor_reduced(sys: &AssembledSystem, exec: Execution) -> Result<Factorization> {
    let red = sys
        .reduced_matrix
        .as_ref()
        .ok_or_else(|| AssemblyError::Usage("system has not been reduced".into()))?;
    let lu = lu_factor_with(red, exec)?;
    log::debug!("reduced system {}x{}, rcond ~ {:.3e}", red.rows(), red.cols(), lu.rcond_estimate);
    Ok(lu)
}

pub fn solve_reduced(sys: &AssembledSystem, exec: Execution) -> Result<SurfaceCurrents> {
    let lu = factor_reduced(sys, exec)?;
    let x = lu.solve(sys.reduced_rhs())?;
    let aux = recover_aux(sys, &x, exec)?;
    Ok(SurfaceCurrents::from_parts(&sys.meta, &x, aux))
}

/// Writes `matrix` to `path` (row-major, little-endian f64 pairs re, im) and
/// a JSON sidecar next to it with the dimensions and `meta`.
pub fn write_matrix_dump(matrix: &CMatrix, meta: &SystemMeta, path: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(matrix.as_slice().len() * 16);
    for z in matrix.as_slice() {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    std::fs::File::create(path)?.write_all(&bytes)?;
    let sidecar = serde_json::json!({
        "rows": matrix.rows(),
        "cols": matrix.cols(),
        "layout": "row-major",
        "endianness": "little",
        "element": "complex128 interleaved re,im",
        "meta": meta,
    });
    let mut side = path.as_os_str().to_owned();
    side.push(".json");
    std::fs::write(Path::new(&side), serde_json::to_string_pretty(&sidecar).map_err(std::io::Error::other)?)?;
    Ok(())
}
