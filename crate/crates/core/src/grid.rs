//! Dense uniform background grid.

use serde::{Deserialize, Serialize};

use crate::error::{MpmError, Result};
use crate::Vec2;

/// Wall condition applied to the nodes of the boundary band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// Zero the full velocity.
    Sticky,
    /// Zero the wall-normal component only.
    Slip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallConditions {
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    pub bottom: BoundaryKind,
    pub top: BoundaryKind,
}

impl WallConditions {
    pub fn uniform(kind: BoundaryKind) -> Self {
        WallConditions {
            left: kind,
            right: kind,
            bottom: kind,
            top: kind,
        }
    }

    pub fn sticky() -> Self {
        Self::uniform(BoundaryKind::Sticky)
    }

    pub fn slip() -> Self {
        Self::uniform(BoundaryKind::Slip)
    }
}

impl Default for WallConditions {
    fn default() -> Self {
        Self::sticky()
    }
}

/// Geometry of the background grid.
///
/// Node `(i, j)` sits at `origin + (i dx, j dx)`. Nodes closer than
/// `boundary_band` to a wall belong to that wall's band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dx: f64,
    pub nx: usize,
    pub ny: usize,
    pub origin: Vec2,
    pub boundary_band: usize,
    #[serde(default)]
    pub bc: WallConditions,
}

impl GridSpec {
    pub fn new(
        dx: f64,
        nx: usize,
        ny: usize,
        origin: Vec2,
        boundary_band: usize,
        bc: WallConditions,
    ) -> Result<Self> {
        let spec = GridSpec {
            dx,
            nx,
            ny,
            origin,
            boundary_band,
            bc,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Square grid of `cells` cells per side over `[0, cells dx]^2`.
    pub fn unit_square(cells: usize, boundary_band: usize, bc: WallConditions) -> Result<Self> {
        Self::new(
            1.0 / cells as f64,
            cells + 1,
            cells + 1,
            Vec2::zeros(),
            boundary_band,
            bc,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dx.is_finite() && self.dx > 0.0) {
            return Err(MpmError::Config(format!(
                "grid.dx must be positive, got {}",
                self.dx
            )));
        }
        if self.nx < 8 || self.ny < 8 {
            return Err(MpmError::Config(format!(
                "grid.nx and grid.ny must be at least 8, got {}x{}",
                self.nx, self.ny
            )));
        }
        if self.boundary_band < 2 {
            return Err(MpmError::Config(format!(
                "grid.boundary_band must be at least 2, got {}",
                self.boundary_band
            )));
        }
        if 2 * self.boundary_band + 1 >= self.nx.min(self.ny) {
            return Err(MpmError::Config(
                "grid.boundary_band leaves no interior".to_string(),
            ));
        }
        if !(self.origin.x.is_finite() && self.origin.y.is_finite()) {
            return Err(MpmError::Config("grid.origin must be finite".to_string()));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + j * self.nx
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.nx, index / self.nx)
    }

    #[inline]
    pub fn node_position(&self, i: usize, j: usize) -> Vec2 {
        self.origin + Vec2::new(i as f64 * self.dx, j as f64 * self.dx)
    }

    /// Lower-left corner of the region scenes may seed particles in.
    pub fn interior_min(&self) -> Vec2 {
        self.node_position(self.boundary_band, self.boundary_band)
    }

    /// Upper-right corner of the region scenes may seed particles in.
    pub fn interior_max(&self) -> Vec2 {
        self.node_position(
            self.nx - 1 - self.boundary_band,
            self.ny - 1 - self.boundary_band,
        )
    }

    pub fn in_interior(&self, x: Vec2) -> bool {
        let lo = self.interior_min();
        let hi = self.interior_max();
        x.x >= lo.x && x.x <= hi.x && x.y >= lo.y && x.y <= hi.y
    }

    /// Whether a particle at `x` keeps its whole stencil on the grid with a
    /// half-cell margin. Particles may drift into the boundary band but not
    /// past its outermost cell.
    pub fn in_domain(&self, x: Vec2) -> bool {
        let rel = (x - self.origin) / self.dx;
        rel.x >= 1.0
            && rel.y >= 1.0
            && rel.x <= (self.nx - 2) as f64
            && rel.y <= (self.ny - 2) as f64
    }

    /// Whether node `(i, j)` lies in the band of any wall.
    pub fn in_boundary_band(&self, i: usize, j: usize) -> bool {
        let b = self.boundary_band;
        i < b || j < b || i >= self.nx - b || j >= self.ny - b
    }
}

/// Active-node threshold relative to the mean particle mass per node.
pub fn mass_threshold(total_mass: f64, node_count: usize) -> f64 {
    1e-12 * total_mass / node_count as f64
}

/// Node-wise grid storage. Velocity is only meaningful where `active` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub spec: GridSpec,
    pub mass: Vec<f64>,
    pub momentum: Vec<Vec2>,
    pub velocity: Vec<Vec2>,
    pub active: Vec<bool>,
}

impl Grid {
    pub fn new(spec: GridSpec) -> Self {
        let n = spec.node_count();
        Grid {
            spec,
            mass: vec![0.0; n],
            momentum: vec![Vec2::zeros(); n],
            velocity: vec![Vec2::zeros(); n],
            active: vec![false; n],
        }
    }

    /// Marks nodes with mass above `threshold` active and sets their velocity
    /// to momentum / mass. Inactive nodes get zero velocity.
    pub fn normalize(&mut self, threshold: f64) {
        for k in 0..self.mass.len() {
            self.active[k] = self.mass[k] > threshold;
            self.velocity[k] = if self.active[k] {
                self.momentum[k] / self.mass[k]
            } else {
                Vec2::zeros()
            };
        }
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    /// Projects node velocities in the boundary band onto the wall conditions.
    /// Interior nodes are untouched; the projection is idempotent.
    pub fn apply_boundary(&mut self) {
        let spec = self.spec;
        let b = spec.boundary_band;
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let walls = [
                    (i < b, spec.bc.left, 0),
                    (i >= spec.nx - b, spec.bc.right, 0),
                    (j < b, spec.bc.bottom, 1),
                    (j >= spec.ny - b, spec.bc.top, 1),
                ];
                let v = &mut self.velocity[spec.index(i, j)];
                for (hit, kind, axis) in walls {
                    if !hit {
                        continue;
                    }
                    match kind {
                        BoundaryKind::Sticky => *v = Vec2::zeros(),
                        BoundaryKind::Slip => v[axis] = 0.0,
                    }
                }
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Σ m_k v_k over active nodes.
    pub fn total_momentum(&self) -> Vec2 {
        self.mass
            .iter()
            .zip(&self.velocity)
            .zip(&self.active)
            .filter(|(_, a)| **a)
            .fold(Vec2::zeros(), |acc, ((m, v), _)| acc + *m * v)
    }

    /// Σ ½ m_k |v_k|² over active nodes.
    pub fn kinetic_energy(&self) -> f64 {
        self.mass
            .iter()
            .zip(&self.velocity)
            .zip(&self.active)
            .filter(|(_, a)| **a)
            .map(|((m, v), _)| 0.5 * m * v.norm_squared())
            .sum()
    }
}
