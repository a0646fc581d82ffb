//! Uses the split macro step to let an outside solver act on the
//! reconstructed grid field before the particles are updated. Here the
//! "solver" is a rigid wall moving left that overwrites grid velocities
//! to its right.
//!
//! ```bash
//! cargo run --release --example grid_coupling
//! ```

use secant_mpm::driver::{prepare_scene, RunOverrides};
use secant_mpm::scene::SubstepConfig;
use secant_mpm::secant::reconstruct;
use secant_mpm::Vec2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenes/colliding_blobs.toml"
    ))?;
    let overrides = RunOverrides {
        macro_dt: Some(0.01),
        ..Default::default()
    };
    let (mut config, mut state) = prepare_scene(&text, &overrides)?;
    config.substeps = SubstepConfig::AutoCfl(0.5);
    let cfg = config.macro_step_config();
    let dt = config.step()?;

    let wall_speed: f64 = -0.3;
    let mut wall = 0.72;
    println!("step,time,wall,max_x,kinetic");
    for step in 0..40 {
        let mut rec = reconstruct(&state, dt, &cfg)?;
        let spec = rec.grid.spec;
        for k in 0..spec.node_count() {
            let (i, j) = spec.coords(k);
            if rec.grid.active[k] && spec.node_position(i, j).x >= wall {
                rec.grid.velocity[k] = Vec2::new(
                    wall_speed.min(rec.grid.velocity[k].x),
                    rec.grid.velocity[k].y,
                );
            }
        }
        let (next, _, report) = rec.finish()?;
        state = next;
        wall += wall_speed * dt;
        let max_x = state
            .particles
            .iter()
            .map(|p| p.x.x)
            .fold(f64::MIN, f64::max);
        println!(
            "{step},{:.3},{wall:.4},{max_x:.4},{:.5e}",
            state.time, report.particle_kinetic_energy
        );
    }
    Ok(())
}
