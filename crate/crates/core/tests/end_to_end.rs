mod common;

use common::{relative, scene_text};
use secant_mpm::driver::{advance_frame, prepare_scene, run_scene, RunOverrides};
use secant_mpm::output::{diff_runs, Manifest};
use secant_mpm::scene::Integrator;

fn overrides(integrator: Integrator, substeps: Option<usize>, frames: usize) -> RunOverrides {
    RunOverrides {
        integrator: Some(integrator),
        substeps,
        frames: Some(frames),
        ..Default::default()
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let text = scene_text("colliding_blobs.toml");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let (config, state) =
            prepare_scene(&text, &overrides(Integrator::SecantFullLs, None, 4)).unwrap();
        run_scene(&config, state, dir.path()).unwrap();
    }
    for k in 0..4 {
        let name = format!("frame_{k:04}.csv");
        let a = std::fs::read(dirs[0].path().join(&name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(&name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let a = std::fs::read(dirs[0].path().join("manifest.json")).unwrap();
    let b = std::fs::read(dirs[1].path().join("manifest.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_changes_the_particle_set() {
    let text = scene_text("rigid_translation.toml");
    let (_, a) = prepare_scene(&text, &RunOverrides::default()).unwrap();
    let seeded = RunOverrides {
        seed: Some(4),
        ..Default::default()
    };
    let (_, b) = prepare_scene(&text, &seeded).unwrap();
    assert_eq!(a.particles.len(), b.particles.len());
    assert!(a
        .particles
        .iter()
        .zip(&b.particles)
        .any(|(p, q)| p.x != q.x));
}

#[test]
fn rigid_translation_matches_explicit() {
    let text = scene_text("rigid_translation.toml");
    for s in [1, 5, 20] {
        let explicit = tempfile::tempdir().unwrap();
        let secant = tempfile::tempdir().unwrap();
        let (config, state) =
            prepare_scene(&text, &overrides(Integrator::Explicit, Some(s), 10)).unwrap();
        run_scene(&config, state, explicit.path()).unwrap();
        let (config, state) =
            prepare_scene(&text, &overrides(Integrator::SecantLumped, Some(s), 10)).unwrap();
        run_scene(&config, state, secant.path()).unwrap();
        for d in diff_runs(explicit.path(), secant.path()).unwrap() {
            assert!(d.rms < 1e-10, "S = {s}, frame {}: rms {}", d.frame, d.rms);
        }
    }
}

#[test]
fn manifest_tracks_every_frame() {
    let text = scene_text("block_drop.toml");
    let dir = tempfile::tempdir().unwrap();
    let (config, state) =
        prepare_scene(&text, &overrides(Integrator::SecantLumped, Some(3), 3)).unwrap();
    let dt = config.step().unwrap();
    let manifest = run_scene(&config, state, dir.path()).unwrap();
    let read = Manifest::read(dir.path()).unwrap();
    assert_eq!(manifest, read);
    assert_eq!(read.frames.len(), 3);
    for (k, f) in read.frames.iter().enumerate() {
        assert_eq!(f.index, k);
        assert!((f.time - (k + 1) as f64 * dt).abs() < 1e-15);
        let report = f.diagnostics.macro_step.as_ref().unwrap();
        assert_eq!(report.substeps, 3);
        assert!(report.dissipation >= -1e-10);
    }
}

#[test]
fn mass_and_momentum_are_conserved_without_contact() {
    let text = scene_text("colliding_blobs.toml");
    for integrator in [
        Integrator::Explicit,
        Integrator::SecantLumped,
        Integrator::SecantFullLs,
    ] {
        let (config, mut state) = prepare_scene(&text, &overrides(integrator, None, 30)).unwrap();
        let m0 = state.total_mass();
        let p0 = state.momentum();
        for _ in 0..config.frames {
            let d = advance_frame(&config, &mut state).unwrap();
            assert!(relative(d.total_mass, m0) < 1e-12);
            let p = secant_mpm::Vec2::new(d.momentum[0], d.momentum[1]);
            assert!(
                (p - p0).norm() / p0.norm() < 1e-9,
                "{integrator:?}: {p:?} vs {p0:?}"
            );
        }
    }
}
