//! Drops the elastic block with ten substeps per macro step and tracks how
//! far the secant trajectory drifts from the explicit one at the same times.
//!
//! ```bash
//! cargo run --release --example block_drop
//! ```

use std::time::Instant;

use secant_mpm::driver::{advance_frame, prepare_scene, RunOverrides};
use secant_mpm::output::{position_deviation, Frame};
use secant_mpm::scene::Integrator;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenes/block_drop.toml").into());
    let text = std::fs::read_to_string(&path)?;
    let run = |integrator| {
        prepare_scene(
            &text,
            &RunOverrides {
                integrator: Some(integrator),
                ..Default::default()
            },
        )
    };
    let (explicit_cfg, mut explicit) = run(Integrator::Explicit)?;
    let (secant_cfg, mut secant) = run(Integrator::SecantLumped)?;
    eprintln!(
        "{} particles, macro_dt {:e}, {} frames",
        secant.particles.len(),
        secant_cfg.step()?,
        secant_cfg.frames
    );

    let mut secant_time = 0.0;
    println!("frame,time,rms,max,E_explicit,E_secant");
    for k in 0..secant_cfg.frames {
        let de = advance_frame(&explicit_cfg, &mut explicit)?;
        let clock = Instant::now();
        let ds = advance_frame(&secant_cfg, &mut secant)?;
        secant_time += clock.elapsed().as_secs_f64();
        let a = Frame::from_state(k, &explicit, de.clone());
        let b = Frame::from_state(k, &secant, ds.clone());
        let (rms, max) = position_deviation(&a.particles, &b.particles)?;
        println!(
            "{k},{:.6},{rms:e},{max:e},{:.6e},{:.6e}",
            secant.time,
            de.total_energy(),
            ds.total_energy()
        );
    }
    eprintln!("secant run: {secant_time:.2} s");
    Ok(())
}
