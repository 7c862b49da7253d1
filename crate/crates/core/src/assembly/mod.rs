//! Galerkin assembly of the boundary-element blocks, the full system with
//! auxiliary derivative fields, and its reduction to the `(J, M)` unknowns.

mod blocks;
mod pairs;
mod system;

pub use blocks::{
    assemble_bs, assemble_kernels, assemble_mass_and_d, assemble_q, assemble_rhs, check_resolution, IncidentWave,
    KernelBlocks, MassAndDerivative, MassMode, RESOLUTION_LIMIT,
};
pub use pairs::QuadratureOptions;
pub use system::{
    build_full_system, factor_reduced, recover_aux, reduce_system, reduce_system_with, solve_full, solve_reduced, write_matrix_dump,
    AssembledSystem, AssemblyOptions, Blocks, ScaledCoefficients, SpaceMode, SurfaceCurrents, SystemMeta,
};

use crate::impedance::ImpedanceError;
use crate::linsolve::LinsolveError;
use crate::specfun::SpecfunError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("mesh too coarse: element {element} has k0*h = {kh:.4}, limit is {RESOLUTION_LIMIT}")]
    Resolution { element: usize, kh: f64 },
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Linsolve(#[from] LinsolveError),
    #[error(transparent)]
    Impedance(#[from] ImpedanceError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AssemblyError>;
