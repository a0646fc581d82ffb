//! Scene files and particle seeding.
//!
//! A scene is a TOML document:
//!
//! ```toml
//! integrator = "secant_lumped"      # explicit | secant_lumped | secant_full_ls
//! frame_dt = 0.01                   # or macro_dt
//! frames = 120
//! rng_seed = 1
//! gravity = [0.0, -9.8]
//! substeps = { auto_cfl = 0.5 }     # or { fixed = 10 }
//!
//! [grid]
//! dx = 0.015625
//! nx = 65
//! ny = 65
//! origin = [0.0, 0.0]
//! boundary_band = 3
//! bc = { left = "sticky", right = "sticky", bottom = "sticky", top = "slip" }
//!
//! [material]
//! E = 1e4
//! nu = 0.3
//! rho = 1000.0
//!
//! [[regions]]
//! min = [0.4, 0.5]
//! max = [0.6, 0.7]
//! ppc = 4
//! velocity = [0.0, 0.0]
//! affine = [[0.0, 0.0], [0.0, 0.0]]  # optional, row-major
//! ```
//!
//! Optional keys: `lambda`, `cg_tol`, `cfl_policy` (`ignore | warn | error`).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MpmError, Result};
use crate::explicit::{Particle, SimState};
use crate::grid::GridSpec;
use crate::material::Material;
use crate::secant::{CflPolicy, LambdaPolicy, MacroStepConfig, ReconstructionMode, SubstepPolicy};
use crate::{Mat2, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Explicit,
    SecantLumped,
    SecantFullLs,
}

impl std::str::FromStr for Integrator {
    type Err = MpmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(Integrator::Explicit),
            "secant_lumped" => Ok(Integrator::SecantLumped),
            "secant_full_ls" => Ok(Integrator::SecantFullLs),
            other => Err(MpmError::Config(format!(
                "integrator: unknown value `{other}` (expected explicit, secant_lumped or secant_full_ls)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SubstepConfig {
    AutoCfl(f64),
    Fixed(usize),
}

impl Default for SubstepConfig {
    fn default() -> Self {
        SubstepConfig::AutoCfl(0.5)
    }
}

impl From<SubstepConfig> for SubstepPolicy {
    fn from(c: SubstepConfig) -> Self {
        match c {
            SubstepConfig::AutoCfl(cfl) => SubstepPolicy::AutoCfl { cfl },
            SubstepConfig::Fixed(s) => SubstepPolicy::Fixed(s),
        }
    }
}

/// Axis-aligned box of material.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub ppc: usize,
    #[serde(default)]
    pub velocity: [f64; 2],
    /// Initial affine velocity, row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<[[f64; 2]; 2]>,
}

impl Region {
    pub fn center(&self) -> Vec2 {
        Vec2::new(
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
        )
    }

    pub fn affine_matrix(&self) -> Option<Mat2> {
        self.affine
            .map(|a| Mat2::new(a[0][0], a[0][1], a[1][0], a[1][1]))
    }

    fn contains(&self, x: Vec2) -> bool {
        x.x >= self.min[0] && x.x < self.max[0] && x.y >= self.min[1] && x.y < self.max[1]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub grid: GridSpec,
    pub material: Material,
    pub gravity: [f64; 2],
    pub regions: Vec<Region>,
    pub integrator: Integrator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub macro_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_dt: Option<f64>,
    #[serde(default)]
    pub substeps: SubstepConfig,
    pub frames: usize,
    pub rng_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cg_tol: Option<f64>,
    #[serde(default)]
    pub cfl_policy: CflPolicy,
}

impl SceneConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| MpmError::Config(e.to_string()))
    }

    /// Step per frame; `macro_dt` and `frame_dt` are synonyms.
    pub fn step(&self) -> Result<f64> {
        match (self.macro_dt, self.frame_dt) {
            (Some(dt), None) | (None, Some(dt)) => Ok(dt),
            (Some(_), Some(_)) => Err(MpmError::Config(
                "macro_dt and frame_dt are mutually exclusive".into(),
            )),
            (None, None) => Err(MpmError::Config(
                "missing field `macro_dt` (or `frame_dt`)".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.material.validate()?;
        let dt = self.step()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(MpmError::Config(format!(
                "macro_dt must be positive, got {dt}"
            )));
        }
        if self.frames == 0 {
            return Err(MpmError::Config("frames must be at least 1".into()));
        }
        if !self.gravity.iter().all(|g| g.is_finite()) {
            return Err(MpmError::Config("gravity must be finite".into()));
        }
        match self.substeps {
            SubstepConfig::Fixed(0) => {
                return Err(MpmError::Config("substeps.fixed must be at least 1".into()))
            }
            SubstepConfig::AutoCfl(c) if !(c > 0.0 && c <= 1.0) => {
                return Err(MpmError::Config(format!(
                    "substeps.auto_cfl must lie in (0, 1], got {c}"
                )))
            }
            _ => {}
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(MpmError::Config(format!(
                    "lambda must be non-negative, got {l}"
                )));
            }
        }
        if let Some(t) = self.cg_tol {
            if !(t > 0.0) {
                return Err(MpmError::Config(format!(
                    "cg_tol must be positive, got {t}"
                )));
            }
        }
        if self.regions.is_empty() {
            return Err(MpmError::Config(
                "regions: at least one region is required".into(),
            ));
        }
        let lo = self.grid.interior_min();
        let hi = self.grid.interior_max();
        for (i, r) in self.regions.iter().enumerate() {
            if r.ppc == 0 {
                return Err(MpmError::Config(format!(
                    "regions[{i}].ppc must be at least 1"
                )));
            }
            if !(r.min[0] < r.max[0] && r.min[1] < r.max[1]) {
                return Err(MpmError::Config(format!(
                    "regions[{i}]: min must be below max"
                )));
            }
            if r.min[0] < lo.x || r.min[1] < lo.y || r.max[0] > hi.x || r.max[1] > hi.y {
                return Err(MpmError::Config(format!(
                    "regions[{i}] [{:?}, {:?}] leaves the valid interior [{:?}, {:?}] (overlaps the boundary band)",
                    r.min, r.max, [lo.x, lo.y], [hi.x, hi.y]
                )));
            }
        }
        Ok(())
    }

    pub fn macro_step_config(&self) -> MacroStepConfig {
        let defaults = MacroStepConfig::default();
        MacroStepConfig {
            mode: match self.integrator {
                Integrator::SecantFullLs => ReconstructionMode::FullLeastSquares,
                _ => ReconstructionMode::Lumped,
            },
            lambda: self
                .lambda
                .map_or(LambdaPolicy::NaturalD, LambdaPolicy::Explicit),
            substeps: self.substeps.into(),
            cfl_policy: self.cfl_policy,
            cg_tol: self.cg_tol.unwrap_or(defaults.cg_tol),
            cg_max_iter: None,
        }
    }

    /// Seeds all regions into an initial state.
    pub fn initial_state(&self) -> Result<SimState> {
        let mut particles = Vec::new();
        for (i, region) in self.regions.iter().enumerate() {
            let seeded = sample_particles(region, i, &self.grid, self.material.rho, self.rng_seed);
            if let Some(p) = seeded.iter().find(|p| !self.grid.in_interior(p.x)) {
                return Err(MpmError::Config(format!(
                    "regions[{i}] seeds a particle at ({}, {}) outside the valid interior",
                    p.x.x, p.x.y
                )));
            }
            particles.extend(seeded);
        }
        Ok(SimState::new(
            particles,
            self.grid,
            self.material,
            Vec2::new(self.gravity[0], self.gravity[1]),
        ))
    }
}

/// Parses, validates and seeds a scene.
pub fn load_scene(text: &str) -> Result<(SceneConfig, SimState)> {
    let config = SceneConfig::parse(text)?;
    config.validate()?;
    let state = config.initial_state()?;
    Ok((config, state))
}

/// Stratified jittered sampling of one region.
///
/// Every cell whose center lies in the region receives `ppc` particles, one
/// per stratum of a `rows × cols` subdivision of the cell. Jitter comes from
/// a ChaCha stream keyed by `(seed, region, cell)` at a word offset given by
/// the particle slot, so the result does not depend on iteration order.
pub fn sample_particles(
    region: &Region,
    region_index: usize,
    spec: &GridSpec,
    rho: f64,
    seed: u64,
) -> Vec<Particle> {
    let ppc = region.ppc.max(1);
    let rows = (ppc as f64).sqrt().floor().max(1.0) as usize;
    let cols = ppc.div_ceil(rows);
    let dx = spec.dx;
    let area = dx * dx / ppc as f64;
    let affine = region.affine_matrix();
    let center = region.center();
    let base_v = Vec2::new(region.velocity[0], region.velocity[1]);

    let mut out = Vec::new();
    for cj in 0..spec.ny - 1 {
        for ci in 0..spec.nx - 1 {
            let corner = spec.node_position(ci, cj);
            if !region.contains(corner + Vec2::new(0.5 * dx, 0.5 * dx)) {
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((region_index as u64) << 32) | spec.index(ci, cj) as u64);
            for slot in 0..ppc {
                rng.set_word_pos(4 * slot as u128);
                let jx: f64 = rng.random();
                let jy: f64 = rng.random();
                let (sx, sy) = (slot % cols, slot / cols);
                let x = corner
                    + Vec2::new(
                        (sx as f64 + jx) / cols as f64 * dx,
                        (sy as f64 + jy) / rows as f64 * dx,
                    );
                let mut p = Particle::new(x, base_v, rho * area, area);
                if let Some(a) = affine {
                    p.v += a * (x - center);
                    p.c = a;
                }
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
integrator = "explicit"
frame_dt = 0.01
frames = 3
rng_seed = 42
gravity = [0.0, -9.8]

[grid]
dx = 0.0625
nx = 17
ny = 17
origin = [0.0, 0.0]
boundary_band = 3

[material]
E = 1e4
nu = 0.3
rho = 1000.0

[[regions]]
min = [0.25, 0.25]
max = [0.5, 0.375]
ppc = 4
"#;

    #[test]
    fn minimal_scene_seeds_ppc_per_cell() {
        let (config, state) = load_scene(MINIMAL).unwrap();
        // 4 x 2 cells
        assert_eq!(state.particles.len(), 32);
        assert_eq!(config.step().unwrap(), 0.01);
        assert_eq!(config.substeps, SubstepConfig::AutoCfl(0.5));
        assert_eq!(state.gravity, Vec2::new(0.0, -9.8));
    }

    #[test]
    fn region_in_boundary_band_is_rejected() {
        let text = MINIMAL.replace("min = [0.25, 0.25]", "min = [0.1, 0.25]");
        let err = load_scene(&text).unwrap_err().to_string();
        assert!(err.contains("regions[0]"), "{err}");
    }

    #[test]
    fn missing_key_is_named() {
        let text = MINIMAL.replace("frames = 3\n", "");
        let err = load_scene(&text).unwrap_err().to_string();
        assert!(err.contains("frames"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = MINIMAL.replace("ppc = 4", "ppc = 4\ncolour = 3");
        let err = load_scene(&text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn out_of_range_values() {
        let bad = [
            ("nu = 0.3", "nu = 0.6"),
            ("frames = 3", "frames = 0"),
            ("ppc = 4", "ppc = 0"),
            ("frame_dt = 0.01", "frame_dt = -0.01"),
            ("boundary_band = 3", "boundary_band = 1"),
        ];
        for (from, to) in bad {
            assert!(load_scene(&MINIMAL.replace(from, to)).is_err(), "{to}");
        }
        let both = MINIMAL.replace("frame_dt = 0.01", "frame_dt = 0.01\nmacro_dt = 0.01");
        assert!(load_scene(&both).is_err());
    }

    #[test]
    fn substep_and_bc_forms() {
        let text = MINIMAL.replace("frames = 3", "frames = 3\nsubsteps = { fixed = 10 }")
            .replace("boundary_band = 3", "boundary_band = 3\nbc = { left = \"slip\", right = \"sticky\", bottom = \"sticky\", top = \"slip\" }");
        let (config, _) = load_scene(&text).unwrap();
        assert_eq!(config.substeps, SubstepConfig::Fixed(10));
        assert_eq!(config.grid.bc.left, crate::grid::BoundaryKind::Slip);
    }

    fn region(ppc: usize) -> Region {
        Region {
            min: [0.25, 0.25],
            max: [0.875, 0.375],
            ppc,
            velocity: [1.0, 0.0],
            affine: None,
        }
    }

    fn spec() -> GridSpec {
        GridSpec::unit_square(16, 3, Default::default()).unwrap()
    }

    #[test]
    fn sampling_is_deterministic_and_counted() {
        let a = sample_particles(&region(4), 0, &spec(), 1000.0, 7);
        let b = sample_particles(&region(4), 0, &spec(), 1000.0, 7);
        assert_eq!(a, b);
        // 10 x 2 cells
        assert_eq!(a.len(), 80);
        let c = sample_particles(&region(4), 0, &spec(), 1000.0, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn sampled_mass_matches_area() {
        for ppc in [1, 2, 3, 4, 5, 9] {
            let r = region(ppc);
            let ps = sample_particles(&r, 0, &spec(), 1000.0, 3);
            let mass: f64 = ps.iter().map(|p| p.mass).sum();
            let area = (r.max[0] - r.min[0]) * (r.max[1] - r.min[1]);
            let dx = spec().dx;
            assert!((mass - 1000.0 * area).abs() <= 1000.0 * dx * dx * 1.000001);
            assert_eq!(ps.len(), 20 * ppc);
        }
    }

    #[test]
    fn particles_stay_in_their_cells_and_region() {
        let r = region(5);
        for p in sample_particles(&r, 0, &spec(), 1.0, 11) {
            assert!(p.x.x >= r.min[0] && p.x.x <= r.max[0]);
            assert!(p.x.y >= r.min[1] && p.x.y <= r.max[1]);
            assert_eq!(p.f, Mat2::identity());
        }
    }

    #[test]
    fn affine_region_velocity() {
        let mut r = region(1);
        r.affine = Some([[0.0, 1.0], [-1.0, 0.0]]);
        for p in sample_particles(&r, 0, &spec(), 1.0, 11) {
            let expected =
                Vec2::new(1.0, 0.0) + Mat2::new(0.0, 1.0, -1.0, 0.0) * (p.x - r.center());
            assert!((p.v - expected).norm() < 1e-15);
            assert_eq!(p.c, Mat2::new(0.0, 1.0, -1.0, 0.0));
        }
    }
}
