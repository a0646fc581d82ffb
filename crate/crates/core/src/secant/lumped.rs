use crate::error::Result;
use crate::grid::{mass_threshold, Grid};
use crate::kernel::stencil;

use super::targets::{ReferenceConfig, SecantTargets};

/// APIC scatter of the secant targets onto the reference grid, divided by the
/// lumped node mass but not yet wall-projected.
///
/// `m_k v_k = Σ_p m_p w_kp (v*_p + C*_p (x_k - x_p))`
pub fn scatter_lumped(targets: &SecantTargets, reference: &ReferenceConfig) -> Result<Grid> {
    let start = &reference.start;
    targets.check_len(start.particles.len())?;
    let spec = &start.spec;
    let mut grid = Grid::new(*spec);
    for (p, particle) in start.particles.iter().enumerate() {
        let st = stencil(particle.x, spec).map_err(|e| e.for_particle(p))?;
        let (v, c) = (targets.v_star[p], targets.c_star[p]);
        for n in st.nodes() {
            let k = spec.index(n.node.0, n.node.1);
            let wm = n.weight * particle.mass;
            grid.mass[k] += wm;
            grid.momentum[k] += wm * (v + c * n.offset);
        }
    }
    grid.normalize(mass_threshold(start.total_mass(), spec.node_count()));
    Ok(grid)
}

/// Closed-form lumped reconstruction followed by wall projection.
pub fn reconstruct_lumped(targets: &SecantTargets, reference: &ReferenceConfig) -> Result<Grid> {
    let mut grid = scatter_lumped(targets, reference)?;
    grid.apply_boundary();
    Ok(grid)
}

/// `Σ_p Σ_k ½ m_p w_kp |v*_p + C*_p (x_k - x_p)|²`, the kinetic energy of the
/// individual contributions before they are averaged on the nodes.
pub fn scattered_kinetic_energy(
    targets: &SecantTargets,
    reference: &ReferenceConfig,
) -> Result<f64> {
    let start = &reference.start;
    targets.check_len(start.particles.len())?;
    let mut energy = 0.0;
    for (p, particle) in start.particles.iter().enumerate() {
        let st = stencil(particle.x, &start.spec).map_err(|e| e.for_particle(p))?;
        for n in st.nodes() {
            let u = targets.v_star[p] + targets.c_star[p] * n.offset;
            energy += 0.5 * particle.mass * n.weight * u.norm_squared();
        }
    }
    Ok(energy)
}
