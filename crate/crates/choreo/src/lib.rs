//! Symmetric periodic orbits of the (1+N)-body problem with α-homogeneous
//! potentials, found by minimizing the action over symmetric loop spaces.
//!
//! ```text
//! cargo run --release --example groups
//! cargo run --release --example tables
//! cargo run --release --example certify
//! cargo run --release --example hiphop
//! cargo run --release --example klein_convergence
//! cargo run --release --example octahedral_gamma_limit
//! cargo run --release --example marchal_arcs
//! cargo run --release --example homotopy_classes
//! ```

pub mod action;
pub mod arcs;
pub mod cli;
pub mod error;
pub mod estimates;
pub mod gamma;
pub mod groups;
pub mod homotopy;
pub mod minimize;
pub mod quadrature;
pub mod reference;

pub use error::{Error, Result};
pub use groups::{builtin_group, GroupTag, Mat3, RotationGroup, Vec3};
