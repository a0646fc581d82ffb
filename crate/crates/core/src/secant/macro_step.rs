use serde::{Deserialize, Serialize};

use crate::error::{MpmError, Result};
use crate::explicit::{gather, stable_dt, substep, SimState};
use crate::grid::Grid;
use crate::kernel::inertia_scalar;
use crate::Mat2;

use super::least_squares::{assemble_ls_system, ls_objective, solve_cg};
use super::lumped::{reconstruct_lumped, scattered_kinetic_energy};
use super::targets::{secant_targets, ReferenceConfig, SecantTargets};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconstructionMode {
    /// Closed-form APIC transfer of the secant targets.
    #[default]
    Lumped,
    /// CG solve of the full normal equations.
    FullLeastSquares,
}

/// Weight of the gradient-match term.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum LambdaPolicy {
    /// `λ = D = dx² / 4`.
    #[default]
    NaturalD,
    Explicit(f64),
}

impl LambdaPolicy {
    pub fn resolve(&self, dx: f64) -> f64 {
        match *self {
            LambdaPolicy::NaturalD => inertia_scalar(dx),
            LambdaPolicy::Explicit(l) => l,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SubstepPolicy {
    Fixed(usize),
    /// `S = ceil(Δt / stable_dt(cfl))`, recomputed at every macro step.
    AutoCfl {
        cfl: f64,
    },
}

impl Default for SubstepPolicy {
    fn default() -> Self {
        SubstepPolicy::AutoCfl { cfl: 0.5 }
    }
}

impl SubstepPolicy {
    pub fn resolve(&self, state: &SimState, macro_dt: f64) -> Result<usize> {
        match *self {
            SubstepPolicy::Fixed(0) => Err(MpmError::Contract(
                "substep count must be at least 1".into(),
            )),
            SubstepPolicy::Fixed(s) => Ok(s),
            SubstepPolicy::AutoCfl { cfl } => {
                if !(cfl > 0.0 && cfl <= 1.0) {
                    return Err(MpmError::Contract(format!(
                        "cfl must lie in (0, 1], got {cfl}"
                    )));
                }
                // shave a few ulps so Δt = k·stable_dt maps to exactly k substeps
                let ratio = macro_dt / stable_dt(state, cfl) * (1.0 - 1e-12);
                Ok((ratio.ceil() as usize).max(1))
            }
        }
    }
}

/// What to do when `Δt / S` exceeds the CFL limit `dx / (c + v_max)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CflPolicy {
    Ignore,
    #[default]
    Warn,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MacroStepConfig {
    pub mode: ReconstructionMode,
    pub lambda: LambdaPolicy,
    pub substeps: SubstepPolicy,
    pub cfl_policy: CflPolicy,
    pub cg_tol: f64,
    /// Defaults to ten times the number of active nodes.
    pub cg_max_iter: Option<usize>,
}

impl Default for MacroStepConfig {
    fn default() -> Self {
        MacroStepConfig {
            mode: ReconstructionMode::Lumped,
            lambda: LambdaPolicy::NaturalD,
            substeps: SubstepPolicy::default(),
            cfl_policy: CflPolicy::Warn,
            cg_tol: 1e-10,
            cg_max_iter: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacroStepReport {
    pub substeps: usize,
    pub substep_dt: f64,
    pub mode: ReconstructionMode,
    pub lambda: f64,
    /// Least-squares objective at the returned grid field.
    pub objective: f64,
    pub cg_iterations: Option<[usize; 2]>,
    pub cg_residual: Option<f64>,
    /// `Σ_p Σ_k ½ m_p w_kp |v*_p + C*_p (x_k - x_p)|²`.
    pub target_kinetic_energy: f64,
    /// `Σ_k ½ m_k |v_k|²` of the returned field.
    pub grid_kinetic_energy: f64,
    /// Particle kinetic energy after the macro-step transfer.
    pub particle_kinetic_energy: f64,
    /// `target_kinetic_energy - particle_kinetic_energy`.
    pub dissipation: f64,
    pub cfl_violation: bool,
}

/// Runs `substeps` explicit steps of `macro_dt / substeps` from `state`.
///
/// Returns the substepped state and the snapshot of the start configuration.
pub fn run_substeps(
    state: &SimState,
    macro_dt: f64,
    substeps: usize,
    policy: CflPolicy,
) -> Result<(SimState, ReferenceConfig)> {
    run_substeps_checked(state, macro_dt, substeps, policy).map(|(a, r, _)| (a, r))
}

fn run_substeps_checked(
    state: &SimState,
    macro_dt: f64,
    substeps: usize,
    policy: CflPolicy,
) -> Result<(SimState, ReferenceConfig, bool)> {
    if substeps == 0 {
        return Err(MpmError::Contract(
            "substep count must be at least 1".into(),
        ));
    }
    if !(macro_dt > 0.0) {
        return Err(MpmError::Contract(format!(
            "macro step must be positive, got {macro_dt}"
        )));
    }
    let dt = macro_dt / substeps as f64;
    let limit = stable_dt(state, 1.0);
    let violation = dt > limit;
    if violation {
        match policy {
            CflPolicy::Ignore => {}
            CflPolicy::Warn => log::warn!(
                "t = {:.6}: substep {dt:e} s exceeds the CFL limit {limit:e} s",
                state.time
            ),
            CflPolicy::Error => {
                return Err(MpmError::CflViolation {
                    substep_dt: dt,
                    stable_dt: limit,
                })
            }
        }
    }
    let reference = ReferenceConfig::capture(state);
    let mut after = state.clone();
    for _ in 0..substeps {
        substep(&mut after, dt)?;
    }
    Ok((after, reference, violation))
}

/// Reconstructed macro-step field, before the particle update.
///
/// `grid` may be replaced or edited (for instance by a coupled solver)
/// before calling [`Reconstruction::finish`].
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub reference: ReferenceConfig,
    pub targets: SecantTargets,
    pub grid: Grid,
    pub macro_dt: f64,
    pub mode: ReconstructionMode,
    pub lambda: f64,
    pub substeps: usize,
    pub cg_iterations: Option<[usize; 2]>,
    pub cg_residual: Option<f64>,
    pub cfl_violation: bool,
}

/// Substeps, secant targets and grid reconstruction for one macro step.
pub fn reconstruct(
    state: &SimState,
    macro_dt: f64,
    config: &MacroStepConfig,
) -> Result<Reconstruction> {
    let substeps = config.substeps.resolve(state, macro_dt)?;
    let (after, reference, cfl_violation) =
        run_substeps_checked(state, macro_dt, substeps, config.cfl_policy)?;
    let targets = secant_targets(&reference, &after, macro_dt)?;
    let lambda = config.lambda.resolve(state.spec.dx);

    let (grid, cg_iterations, cg_residual) = match config.mode {
        ReconstructionMode::Lumped => (reconstruct_lumped(&targets, &reference)?, None, None),
        ReconstructionMode::FullLeastSquares => {
            let system = assemble_ls_system(&targets, &reference, lambda)?;
            let max_iter = config.cg_max_iter.unwrap_or(10 * system.len());
            let sol = solve_cg(&system, config.cg_tol, max_iter)?;
            (sol.grid, Some(sol.iterations), Some(sol.residual))
        }
    };

    Ok(Reconstruction {
        reference,
        targets,
        grid,
        macro_dt,
        mode: config.mode,
        lambda,
        substeps,
        cg_iterations,
        cg_residual,
        cfl_violation,
    })
}

impl Reconstruction {
    /// Advects the start particles with `self.grid` and reports on the step.
    pub fn finish(self) -> Result<(SimState, Grid, MacroStepReport)> {
        let state = finish_transfer(&self.reference, &self.grid, self.macro_dt)?;
        let objective = ls_objective(&self.grid, &self.targets, &self.reference, self.lambda)?;
        let target_kinetic_energy = scattered_kinetic_energy(&self.targets, &self.reference)?;
        let particle_kinetic_energy = state.kinetic_energy();
        let report = MacroStepReport {
            substeps: self.substeps,
            substep_dt: self.macro_dt / self.substeps as f64,
            mode: self.mode,
            lambda: self.lambda,
            objective,
            cg_iterations: self.cg_iterations,
            cg_residual: self.cg_residual,
            target_kinetic_energy,
            grid_kinetic_energy: self.grid.kinetic_energy(),
            particle_kinetic_energy,
            dissipation: target_kinetic_energy - particle_kinetic_energy,
            cfl_violation: self.cfl_violation,
        };
        Ok((state, self.grid, report))
    }
}

/// APIC update of the start particles from a field on the reference grid:
/// `x = x^n + Δt v_p`, `F = (I + Δt C_p) F^n`.
pub fn finish_transfer(
    reference: &ReferenceConfig,
    grid: &Grid,
    macro_dt: f64,
) -> Result<SimState> {
    let mut state = reference.start.clone();
    if grid.spec != state.spec {
        return Err(MpmError::Contract(
            "grid does not match the reference grid".to_string(),
        ));
    }
    for (p, particle) in state.particles.iter_mut().enumerate() {
        let (v, c) = gather(grid, particle.x).map_err(|e| e.for_particle(p))?;
        particle.v = v;
        particle.c = c;
        particle.f = (Mat2::identity() + macro_dt * c) * particle.f;
        particle.x += macro_dt * v;
        if !state.spec.in_domain(particle.x) {
            return Err(MpmError::OutOfDomain {
                particle: Some(p),
                position: particle.x,
            });
        }
    }
    state.time = reference.start.time + macro_dt;
    Ok(state)
}

/// One full secant macro step of size `macro_dt`.
///
/// Returns the advanced state, the reconstructed field on the start grid,
/// and the step report.
pub fn macro_step(
    state: &SimState,
    macro_dt: f64,
    config: &MacroStepConfig,
) -> Result<(SimState, Grid, MacroStepReport)> {
    reconstruct(state, macro_dt, config)?.finish()
}
