//! Plain explicit MLS-MPM on the colliding-blobs scene with the step size
//! chosen from the CFL condition at every step.
//!
//! ```bash
//! cargo run --release --example explicit_stepping
//! ```

use secant_mpm::diagnostics::compute_diagnostics;
use secant_mpm::explicit::{stable_dt, substep};
use secant_mpm::scene::load_scene;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenes/colliding_blobs.toml").into()
    });
    let (_, mut state) = load_scene(&std::fs::read_to_string(&path)?)?;
    let end = 0.3;
    let cfl = 0.5;
    let mut steps = 0;
    let start = compute_diagnostics(&state);
    println!("step,time,dt,kinetic,elastic,total");
    while state.time < end {
        let dt = stable_dt(&state, cfl).min(end - state.time);
        substep(&mut state, dt)?;
        steps += 1;
        if steps % 25 == 0 {
            let d = compute_diagnostics(&state);
            println!(
                "{steps},{:.5},{dt:.3e},{:.5e},{:.5e},{:.5e}",
                state.time,
                d.kinetic_energy,
                d.elastic_energy,
                d.total_energy()
            );
        }
    }
    let d = compute_diagnostics(&state);
    eprintln!(
        "{steps} steps to t = {:.3}; momentum drift {:.2e}, energy {:.4} -> {:.4}",
        state.time,
        ((d.momentum[0] - start.momentum[0]).powi(2) + (d.momentum[1] - start.momentum[1]).powi(2))
            .sqrt(),
        start.total_energy(),
        d.total_energy()
    );
    Ok(())
}
