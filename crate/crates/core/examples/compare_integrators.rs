//! Runs a scene with the explicit integrator and both secant modes and prints
//! per-frame position deviation and total energy.
//!
//! ```bash
//! cargo run --release --example compare_integrators -- scenes/colliding_blobs.toml
//! ```

use secant_mpm::diagnostics::Diagnostics;
use secant_mpm::driver::{advance_frame, prepare_scene, RunOverrides};
use secant_mpm::scene::Integrator;
use secant_mpm::SimState;

fn rms(a: &SimState, b: &SimState) -> f64 {
    let sum: f64 = a
        .particles
        .iter()
        .zip(&b.particles)
        .map(|(p, q)| (p.x - q.x).norm_squared())
        .sum();
    (sum / a.particles.len() as f64).sqrt()
}

fn extent(s: &SimState) -> [f64; 4] {
    s.particles
        .iter()
        .fold([f64::MAX, f64::MAX, f64::MIN, f64::MIN], |e, p| {
            [
                e[0].min(p.x.x),
                e[1].min(p.x.y),
                e[2].max(p.x.x),
                e[3].max(p.x.y),
            ]
        })
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenes/colliding_blobs.toml").into()
    });
    let text = std::fs::read_to_string(&path)?;

    let integrators = [
        Integrator::Explicit,
        Integrator::SecantLumped,
        Integrator::SecantFullLs,
    ];
    let mut runs = Vec::new();
    for integrator in integrators {
        let overrides = RunOverrides {
            integrator: Some(integrator),
            substeps: std::env::args().nth(2).map(|s| s.parse()).transpose()?,
            macro_dt: std::env::args().nth(3).map(|s| s.parse()).transpose()?,
            ..Default::default()
        };
        runs.push(prepare_scene(&text, &overrides)?);
    }
    let frames = runs[0].0.frames;
    println!("frame,rms_lumped,rms_full,E_explicit,E_lumped,E_full,S,objective_lumped,objective_full,extent_lumped");
    for k in 0..frames {
        let mut diags: Vec<Diagnostics> = Vec::new();
        for (config, state) in runs.iter_mut() {
            diags.push(advance_frame(config, state)?);
        }
        let report = |d: &Diagnostics| d.macro_step.as_ref().map_or(f64::NAN, |r| r.objective);
        println!(
            "{k},{:.3e},{:.3e},{:.6e},{:.6e},{:.6e},{},{:.3e},{:.3e},{:?}",
            rms(&runs[0].1, &runs[1].1),
            rms(&runs[0].1, &runs[2].1),
            diags[0].total_energy(),
            diags[1].total_energy(),
            diags[2].total_energy(),
            diags[1].macro_step.as_ref().map_or(0, |r| r.substeps),
            report(&diags[1]),
            report(&diags[2]),
            extent(&runs[1].1),
        );
    }
    Ok(())
}
