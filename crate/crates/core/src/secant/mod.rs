//! Secant macro step: S explicit substeps wrapped into one large step.
//!
//! Starting from the configuration at `t^n` (the reference configuration),
//! the wrapper
//!
//! 1. runs `S` explicit substeps of size `Δt / S`,
//! 2. turns the net particle motion into secant targets
//!    `v* = (x^{n+1,S} - x^n) / Δt` and `C* = (F^{n+1,S} (F^n)^{-1} - I) / Δt`,
//! 3. reconstructs a grid velocity field on the grid of `t^n` that best
//!    reproduces those targets, and
//! 4. advects the `t^n` particles with that field over `Δt`.
//!
//! Step 3 has two modes. The lumped mode is the closed-form APIC transfer of
//! `(v*, C*)`; the full mode solves the weighted least-squares normal
//! equations with exact kernel gradients. The grid field is handed back to
//! the caller, and [`reconstruct`] / [`Reconstruction::finish`] expose the
//! split form for callers that want to edit the field before the particle
//! update.

mod least_squares;
mod lumped;
mod macro_step;
mod targets;

pub use least_squares::{
    assemble_ls_system, assemble_ls_system_with, ls_objective, solve_cg, CgSolution, GradientModel,
    LsSystem,
};
pub use lumped::{reconstruct_lumped, scatter_lumped, scattered_kinetic_energy};
pub use macro_step::{
    finish_transfer, macro_step, reconstruct, run_substeps, CflPolicy, LambdaPolicy,
    MacroStepConfig, MacroStepReport, Reconstruction, ReconstructionMode, SubstepPolicy,
};
pub use targets::{secant_targets, ReferenceConfig, SecantTargets};
