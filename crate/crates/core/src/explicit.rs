//! One explicit MLS-MPM/APIC substep.
//!
//! The pipeline is P2G (mass, APIC momentum and the fused MLS stress term),
//! grid update (gravity and wall projection), then APIC G2P with advection
//! and `F ← (I + dt C) F`.

use crate::error::{MpmError, Result};
use crate::grid::{mass_threshold, Grid, GridSpec};
use crate::kernel::{inertia_scalar, stencil};
use crate::material::{pk1_fixed_corotated, Material};
use crate::{Mat2, Vec2};

#[derive(Clone, Debug, PartialEq)]
pub struct Particle {
    pub x: Vec2,
    pub v: Vec2,
    pub mass: f64,
    /// Initial area (m²).
    pub volume0: f64,
    /// Deformation gradient.
    pub f: Mat2,
    /// APIC affine velocity matrix (1/s).
    pub c: Mat2,
}

impl Particle {
    /// Undeformed particle with zero affine velocity.
    pub fn new(x: Vec2, v: Vec2, mass: f64, volume0: f64) -> Self {
        Particle {
            x,
            v,
            mass,
            volume0,
            f: Mat2::identity(),
            c: Mat2::zeros(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub particles: Vec<Particle>,
    pub spec: GridSpec,
    pub material: Material,
    pub gravity: Vec2,
    pub time: f64,
}

impl SimState {
    pub fn new(
        particles: Vec<Particle>,
        spec: GridSpec,
        material: Material,
        gravity: Vec2,
    ) -> Self {
        SimState {
            particles,
            spec,
            material,
            gravity,
            time: 0.0,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.particles.iter().map(|p| p.mass).sum()
    }

    pub fn momentum(&self) -> Vec2 {
        self.particles
            .iter()
            .fold(Vec2::zeros(), |acc, p| acc + p.mass * p.v)
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.particles
            .iter()
            .map(|p| 0.5 * p.mass * p.v.norm_squared())
            .sum()
    }

    pub fn max_speed(&self) -> f64 {
        self.particles
            .iter()
            .map(|p| p.v.norm())
            .fold(0.0, f64::max)
    }

    /// Fails with the first particle that lies outside the valid interior.
    pub fn check_domain(&self) -> Result<()> {
        match self
            .particles
            .iter()
            .position(|p| !self.spec.in_domain(p.x))
        {
            Some(i) => Err(MpmError::OutOfDomain {
                particle: Some(i),
                position: self.particles[i].x,
            }),
            None => Ok(()),
        }
    }
}

/// Scatters mass, APIC momentum and the MLS-MPM internal force impulse.
pub fn p2g(state: &SimState, dt: f64) -> Result<Grid> {
    if !(dt > 0.0) {
        return Err(MpmError::Contract(format!(
            "substep size must be positive, got {dt}"
        )));
    }
    let spec = &state.spec;
    let inv_d = 1.0 / inertia_scalar(spec.dx);
    let mut grid = Grid::new(*spec);

    for (p, particle) in state.particles.iter().enumerate() {
        let st = stencil(particle.x, spec).map_err(|e| e.for_particle(p))?;
        let stress =
            pk1_fixed_corotated(&particle.f, &state.material).map_err(|e| e.for_particle(p))?;
        let affine = particle.mass * particle.c
            - (dt * inv_d * particle.volume0) * stress * particle.f.transpose();
        let momentum = particle.mass * particle.v;
        for n in st.nodes() {
            let k = spec.index(n.node.0, n.node.1);
            grid.mass[k] += n.weight * particle.mass;
            grid.momentum[k] += n.weight * (momentum + affine * n.offset);
        }
    }
    grid.normalize(mass_threshold(state.total_mass(), spec.node_count()));
    Ok(grid)
}

/// Adds gravity to active node velocities and projects the walls.
pub fn grid_update(grid: &mut Grid, dt: f64, gravity: Vec2) {
    for k in 0..grid.mass.len() {
        if grid.active[k] {
            grid.velocity[k] = grid.momentum[k] / grid.mass[k] + dt * gravity;
        }
    }
    grid.apply_boundary();
}

/// APIC gather of `(v_p, C_p)` at `x` from a finalized grid field.
pub fn gather(grid: &Grid, x: Vec2) -> Result<(Vec2, Mat2)> {
    let spec = &grid.spec;
    let inv_d = 1.0 / inertia_scalar(spec.dx);
    let st = stencil(x, spec)?;
    let mut v = Vec2::zeros();
    let mut b = Mat2::zeros();
    for n in st.nodes() {
        let vk = grid.velocity[spec.index(n.node.0, n.node.1)];
        v += n.weight * vk;
        b += n.weight * vk * n.offset.transpose();
    }
    Ok((v, b * inv_d))
}

/// Gathers velocities back to the particles and advects them.
pub fn g2p(state: &mut SimState, grid: &Grid, dt: f64) -> Result<()> {
    for (p, particle) in state.particles.iter_mut().enumerate() {
        let (v, c) = gather(grid, particle.x).map_err(|e| e.for_particle(p))?;
        particle.v = v;
        particle.c = c;
        particle.f = (Mat2::identity() + dt * c) * particle.f;
        particle.x += dt * v;
        if !state.spec.in_domain(particle.x) {
            return Err(MpmError::OutOfDomain {
                particle: Some(p),
                position: particle.x,
            });
        }
    }
    Ok(())
}

/// `cfl dx / (c + v_max)` with `c` the P-wave speed of the material.
pub fn stable_dt(state: &SimState, cfl: f64) -> f64 {
    cfl * state.spec.dx / (state.material.wave_speed() + state.max_speed())
}

/// One explicit step of size `dt`. Returns the grid used for the step.
pub fn substep(state: &mut SimState, dt: f64) -> Result<Grid> {
    let mut grid = p2g(state, dt)?;
    grid_update(&mut grid, dt, state.gravity);
    g2p(state, &grid, dt)?;
    state.time += dt;
    Ok(grid)
}
