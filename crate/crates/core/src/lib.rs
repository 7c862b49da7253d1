//! Two-dimensional boundary-element scattering from coated conductors with
//! standard, first- and second-order impedance boundary conditions.

pub mod analysis;
pub mod assembly;
pub mod exec;
pub mod geometry;
pub mod impedance;
pub mod linsolve;
pub mod specfun;
