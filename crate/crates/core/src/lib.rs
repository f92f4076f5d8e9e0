//! Lattice-level toolkit for elliptic root systems of tubular weighted
//! projective lines: Weyl and braid actions, central-charge domains and
//! wall-crossing for spherical and radical classes.

pub mod charge_domains;
pub mod cli;
pub mod error;
pub mod hyperbolic_ext;
pub mod k_model;
pub mod linalg;
pub mod oracle;
pub mod rational;
pub mod root_lattice;
pub mod verify;
pub mod walls;
pub mod weyl_action;

pub use error::{Error, Result};
pub use root_lattice::{build_system, BasisLabel, LatticeVector, RootClass, RootSystemData, WeightSignature};
