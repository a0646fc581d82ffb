//! Scene runner used by the `secant-mpm` binary.

use std::fs;
use std::path::Path;

use crate::diagnostics::compute_diagnostics;
use crate::error::{MpmError, Result};
use crate::explicit::{substep, SimState};
use crate::output::{frame_file_name, write_frame, Frame, Manifest, ManifestFrame};
use crate::scene::{Integrator, SceneConfig, SubstepConfig};
use crate::secant::{macro_step, run_substeps};

/// Command-line overrides applied on top of a scene file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOverrides {
    pub integrator: Option<Integrator>,
    pub macro_dt: Option<f64>,
    pub substeps: Option<usize>,
    pub cfl: Option<f64>,
    pub frames: Option<usize>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
    pub cg_tol: Option<f64>,
}

impl RunOverrides {
    pub fn apply(&self, config: &mut SceneConfig) {
        if let Some(i) = self.integrator {
            config.integrator = i;
        }
        if let Some(dt) = self.macro_dt {
            config.macro_dt = Some(dt);
            config.frame_dt = None;
        }
        if let Some(s) = self.substeps {
            config.substeps = SubstepConfig::Fixed(s);
        }
        if let Some(c) = self.cfl {
            config.substeps = SubstepConfig::AutoCfl(c);
        }
        if let Some(f) = self.frames {
            config.frames = f;
        }
        if let Some(l) = self.lambda {
            config.lambda = Some(l);
        }
        if let Some(s) = self.seed {
            config.rng_seed = s;
        }
        if let Some(t) = self.cg_tol {
            config.cg_tol = Some(t);
        }
    }
}

/// Parses a scene, applies overrides, validates and seeds it.
pub fn prepare_scene(text: &str, overrides: &RunOverrides) -> Result<(SceneConfig, SimState)> {
    let mut config = SceneConfig::parse(text)?;
    overrides.apply(&mut config);
    config.validate()?;
    let state = config.initial_state()?;
    Ok((config, state))
}

/// Advances `state` by one frame with the configured integrator and returns
/// the frame diagnostics.
pub fn advance_frame(
    config: &SceneConfig,
    state: &mut SimState,
) -> Result<crate::diagnostics::Diagnostics> {
    let dt = config.step()?;
    let step_cfg = config.macro_step_config();
    let start = state.time;
    let report = match config.integrator {
        Integrator::Explicit => {
            let s = step_cfg.substeps.resolve(state, dt)?;
            // CFL policy check plus the substeps themselves
            let (after, _) = run_substeps(state, dt, s, step_cfg.cfl_policy)?;
            *state = after;
            None
        }
        Integrator::SecantLumped | Integrator::SecantFullLs => {
            let (next, _grid, report) = macro_step(state, dt, &step_cfg)?;
            *state = next;
            Some(report)
        }
    };
    state.time = start + dt;
    let mut diagnostics = compute_diagnostics(state);
    diagnostics.macro_step = report;
    Ok(diagnostics)
}

/// Runs all frames of a scene, writing one CSV per frame and a manifest.
///
/// Frame `k` holds the state after `k + 1` steps, at time `(k + 1) Δt`.
pub fn run_scene(config: &SceneConfig, mut state: SimState, out_dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(out_dir).map_err(|e| MpmError::io(out_dir, e))?;
    let dt = config.step()?;
    let t0 = state.time;
    let mut manifest = Manifest {
        config: config.clone(),
        frames: Vec::with_capacity(config.frames),
    };
    for k in 0..config.frames {
        let outcome = advance_frame(config, &mut state);
        let diagnostics = match outcome {
            Ok(d) => d,
            Err(e) => {
                // keep what was produced so far inspectable
                manifest.write(out_dir)?;
                return Err(e);
            }
        };
        state.time = t0 + (k + 1) as f64 * dt;
        let frame = Frame::from_state(k, &state, diagnostics.clone());
        write_frame(&frame, out_dir)?;
        manifest.frames.push(ManifestFrame {
            index: k,
            time: state.time,
            file: frame_file_name(k),
            diagnostics,
        });
        log::info!("frame {k}: t = {:.6}", state.time);
    }
    manifest.write(out_dir)?;
    Ok(manifest)
}

/// Explicit integration of `state` for `steps` substeps of `dt`, used by the
/// examples and tests as a reference trajectory.
pub fn run_explicit(state: &mut SimState, dt: f64, steps: usize) -> Result<()> {
    for _ in 0..steps {
        substep(state, dt)?;
    }
    Ok(())
}
