#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secant_mpm::explicit::{Particle, SimState};
use secant_mpm::grid::{GridSpec, WallConditions};
use secant_mpm::material::Material;
use secant_mpm::secant::{ReferenceConfig, SecantTargets};
use secant_mpm::{Mat2, Vec2};

pub fn scene_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenes")
        .join(name)
}

pub fn scene_text(name: &str) -> String {
    std::fs::read_to_string(scene_path(name)).expect("scene file")
}

pub fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
        .join(name)
}

pub fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_secant-mpm"))
        .args(args)
        .output()
        .expect("spawn secant-mpm")
}

fn random_matrix(rng: &mut ChaCha8Rng, scale: f64) -> Mat2 {
    Mat2::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

/// `n` particles scattered uniformly over the middle of a `cells²` unit
/// grid, well clear of the boundary band, with mildly perturbed F and C.
pub fn random_state(cells: usize, n: usize, seed: u64) -> SimState {
    let spec = GridSpec::unit_square(cells, 3, WallConditions::sticky()).unwrap();
    let material = Material::new(1e4, 0.3, 1000.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let volume = 0.25 / n as f64;
    let particles = (0..n)
        .map(|_| {
            let x = Vec2::new(rng.random_range(0.25..0.75), rng.random_range(0.25..0.75));
            let v = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let mut p = Particle::new(
                x,
                v,
                material.rho * volume * rng.random_range(0.5..1.5),
                volume,
            );
            p.f = Mat2::identity() + random_matrix(&mut rng, 0.1);
            p.c = random_matrix(&mut rng, 2.0);
            p
        })
        .collect();
    SimState::new(particles, spec, material, Vec2::zeros())
}

/// Random reference configuration with unrelated random secant targets.
pub fn random_problem(cells: usize, n: usize, seed: u64) -> (ReferenceConfig, SecantTargets) {
    let state = random_state(cells, n, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let targets = SecantTargets {
        v_star: (0..n)
            .map(|_| Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
        c_star: (0..n).map(|_| random_matrix(&mut rng, 4.0)).collect(),
    };
    (ReferenceConfig::capture(&state), targets)
}

/// Targets sampled from the affine field `v(x) = c + A (x - x0)`.
pub fn affine_targets(reference: &ReferenceConfig, c: Vec2, a: Mat2, x0: Vec2) -> SecantTargets {
    SecantTargets {
        v_star: reference
            .start
            .particles
            .iter()
            .map(|p| c + a * (p.x - x0))
            .collect(),
        c_star: vec![a; reference.len()],
    }
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
