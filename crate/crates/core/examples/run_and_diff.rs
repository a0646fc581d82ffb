//! Library-level equivalent of `secant-mpm run` twice plus `secant-mpm diff`:
//! writes the rigid-translation scene with the explicit and the lumped
//! secant integrator and compares the frames.
//!
//! ```bash
//! cargo run --example run_and_diff -- /tmp/secant-runs
//! ```

use std::path::PathBuf;

use secant_mpm::driver::{prepare_scene, run_scene, RunOverrides};
use secant_mpm::output::{diff_runs, Manifest};
use secant_mpm::scene::Integrator;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("secant-mpm-runs"));
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenes/rigid_translation.toml"
    ))?;

    let mut dirs = Vec::new();
    for (name, integrator) in [
        ("explicit", Integrator::Explicit),
        ("secant", Integrator::SecantLumped),
    ] {
        let overrides = RunOverrides {
            integrator: Some(integrator),
            substeps: Some(20),
            ..Default::default()
        };
        let (config, state) = prepare_scene(&text, &overrides)?;
        let dir = root.join(name);
        let manifest = run_scene(&config, state, &dir)?;
        println!(
            "{name}: {} frames in {}",
            manifest.frames.len(),
            dir.display()
        );
        dirs.push(dir);
    }

    let manifest = Manifest::read(&dirs[1])?;
    let last = manifest.frames.last().ok_or("no frames")?;
    println!(
        "last secant frame t = {:.4}: momentum ({:.6}, {:.6}), substeps {}",
        last.time,
        last.diagnostics.momentum[0],
        last.diagnostics.momentum[1],
        last.diagnostics
            .macro_step
            .as_ref()
            .map_or(0, |r| r.substeps)
    );
    let worst = diff_runs(&dirs[0], &dirs[1])?
        .into_iter()
        .map(|d| d.rms)
        .fold(0.0, f64::max);
    println!("largest per-frame RMS deviation: {worst:.2e}");
    Ok(())
}
