//! One macro step of the block-drop scene reconstructed both ways, with the
//! step report of each.
//!
//! ```bash
//! cargo run --release --example macro_step_modes
//! ```

use secant_mpm::driver::{prepare_scene, RunOverrides};
use secant_mpm::secant::{macro_step, ReconstructionMode, SubstepPolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenes/block_drop.toml"
    ))?;
    let (config, mut state) = prepare_scene(&text, &RunOverrides::default())?;
    let dt = config.step()?;
    // let the block fall for a while so the targets are not trivial
    let mut cfg = config.macro_step_config();
    for _ in 0..30 {
        state = macro_step(&state, dt, &cfg)?.0;
    }

    for s in [1, 4, 10] {
        cfg.substeps = SubstepPolicy::Fixed(s);
        for mode in [
            ReconstructionMode::Lumped,
            ReconstructionMode::FullLeastSquares,
        ] {
            cfg.mode = mode;
            let (next, grid, report) = macro_step(&state, dt, &cfg)?;
            println!(
                "S = {s:>2} {mode:?}: objective {:.3e}, active nodes {}, cg {:?}, KE target/grid/particle {:.5} / {:.5} / {:.5}, momentum y {:.5}",
                report.objective,
                grid.active_count(),
                report.cg_iterations,
                report.target_kinetic_energy,
                report.grid_kinetic_energy,
                report.particle_kinetic_energy,
                next.momentum().y
            );
        }
    }
    Ok(())
}
