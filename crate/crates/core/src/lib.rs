//! Two-dimensional MLS-MPM with a secant macro-step wrapper.
//!
//! The crate runs an ordinary explicit MLS-MPM/APIC integrator and wraps it so
//! that a large step `Δt` can be taken as `S` explicit substeps followed by a
//! reconstruction of a single grid velocity field on the grid of the *start*
//! configuration. That field is what a large-step solver (or a coupling
//! partner) expects to see, and it is reconstructed either
//!
//! - in closed form, as an APIC transfer of the secant particle velocities and
//!   velocity gradients (`ReconstructionMode::Lumped`), or
//! - by solving the full weighted least-squares normal equations with
//!   Jacobi-preconditioned conjugate gradients (`ReconstructionMode::FullLeastSquares`).
//!
//! # Module organization
//!
//! - [`kernel`]: quadratic B-spline weights and 3×3 stencils
//! - [`grid`]: dense background grid and wall projection
//! - [`material`]: fixed-corotated hyperelasticity and the 2×2 SVD
//! - [`explicit`]: particles, P2G / grid update / G2P, CFL step control
//! - [`secant`]: secant targets, both reconstructions, the macro step
//! - [`scene`], [`diagnostics`], [`output`], [`driver`]: scene files, seeding,
//!   energy bookkeeping, CSV frames, and the run/diff drivers behind the CLI
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod explicit;
pub mod grid;
pub mod kernel;
pub mod material;
pub mod output;
pub mod scene;
pub mod secant;

pub use error::{MpmError, Result};
pub use explicit::{Particle, SimState};
pub use grid::{BoundaryKind, Grid, GridSpec, WallConditions};
pub use material::Material;
pub use secant::{
    LambdaPolicy, MacroStepConfig, MacroStepReport, ReconstructionMode, SecantTargets,
    SubstepPolicy,
};

/// 2-vector used for positions and velocities.
pub type Vec2 = nalgebra::Vector2<f64>;
/// 2×2 matrix used for deformation gradients, stresses and affine fields.
pub type Mat2 = nalgebra::Matrix2<f64>;
