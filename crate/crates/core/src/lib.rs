//! Multipoint flux mixed finite elements with mass lumping for Darcy flow
//! `K^{-1} u + grad p = 0`, `div u = f`, `p = g` on the boundary, on
//! conforming hybrid affine meshes in two and three dimensions.
//!
//! The velocity space is discretized with bases whose lumped mass matrix is
//! block diagonal (one block per quadrature node cluster), so the velocity
//! can be eliminated locally and the pressure solved from a sparse SPD
//! cell-centered system.

pub mod assembly;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod mesh;
pub mod postprocess;
pub mod poly;
pub mod quadrature;
pub mod reduce_solve;
pub mod refelem;

pub use error::{Error, Result};
