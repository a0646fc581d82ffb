use crate::error::{MpmError, Result};
use crate::explicit::SimState;
use crate::material::MIN_DETERMINANT;
use crate::{Mat2, Vec2};

/// Snapshot of the state at the start of a macro step.
///
/// Every reconstruction evaluates kernel weights at these particle positions
/// on this grid, never at the substepped ones.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceConfig {
    pub start: SimState,
}

impl ReferenceConfig {
    pub fn capture(state: &SimState) -> Self {
        ReferenceConfig {
            start: state.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.start.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.start.particles.is_empty()
    }
}

/// Per-particle secant velocity and velocity gradient over a macro step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SecantTargets {
    pub v_star: Vec<Vec2>,
    pub c_star: Vec<Mat2>,
}

impl SecantTargets {
    pub fn zeros(n: usize) -> Self {
        SecantTargets {
            v_star: vec![Vec2::zeros(); n],
            c_star: vec![Mat2::zeros(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.v_star.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v_star.is_empty()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.v_star.len() != n || self.c_star.len() != n {
            return Err(MpmError::Contract(format!(
                "{} velocity / {} gradient targets for {n} particles",
                self.v_star.len(),
                self.c_star.len()
            )));
        }
        Ok(())
    }
}

/// Secant targets from the start snapshot and the substepped state.
pub fn secant_targets(
    before: &ReferenceConfig,
    after: &SimState,
    macro_dt: f64,
) -> Result<SecantTargets> {
    if !(macro_dt > 0.0) {
        return Err(MpmError::Contract(format!(
            "macro step must be positive, got {macro_dt}"
        )));
    }
    let start = &before.start.particles;
    if start.len() != after.particles.len() {
        return Err(MpmError::Contract(format!(
            "particle count changed across substeps: {} -> {}",
            start.len(),
            after.particles.len()
        )));
    }
    let inv_dt = 1.0 / macro_dt;
    let mut targets = SecantTargets {
        v_star: Vec::with_capacity(start.len()),
        c_star: Vec::with_capacity(start.len()),
    };
    for (p, (p0, p1)) in start.iter().zip(&after.particles).enumerate() {
        let det = p0.f.determinant();
        if !(det > MIN_DETERMINANT) {
            return Err(MpmError::DegenerateDeformation {
                particle: Some(p),
                det,
            });
        }
        let f0_inv = Mat2::new(p0.f[(1, 1)], -p0.f[(0, 1)], -p0.f[(1, 0)], p0.f[(0, 0)]) / det;
        targets.v_star.push((p1.x - p0.x) * inv_dt);
        // (F1 - F0) F0^{-1} is exactly zero when F is unchanged
        targets.c_star.push((p1.f - p0.f) * f0_inv * inv_dt);
    }
    Ok(targets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explicit::Particle;
    use crate::grid::{GridSpec, WallConditions};
    use crate::material::Material;

    fn state() -> SimState {
        let spec = GridSpec::unit_square(16, 2, WallConditions::sticky()).unwrap();
        let particles = (0..5)
            .map(|i| {
                let mut p = Particle::new(
                    Vec2::new(0.3 + 0.05 * i as f64, 0.5),
                    Vec2::zeros(),
                    1.0,
                    1.0,
                );
                p.f = Mat2::new(1.0 + 0.1 * i as f64, 0.2, -0.1, 0.9);
                p
            })
            .collect();
        SimState::new(
            particles,
            spec,
            Material::new(1e3, 0.2, 1.0).unwrap(),
            Vec2::zeros(),
        )
    }

    #[test]
    fn unchanged_state_gives_zero_targets() {
        let s = state();
        let t = secant_targets(&ReferenceConfig::capture(&s), &s, 0.1).unwrap();
        assert!(t.v_star.iter().all(|v| *v == Vec2::zeros()));
        assert!(t.c_star.iter().all(|c| *c == Mat2::zeros()));
    }

    #[test]
    fn translation_gives_constant_velocity() {
        let s = state();
        let mut after = s.clone();
        let d = Vec2::new(0.02, -0.01);
        for p in &mut after.particles {
            p.x += d;
        }
        let t = secant_targets(&ReferenceConfig::capture(&s), &after, 0.5).unwrap();
        for (v, c) in t.v_star.iter().zip(&t.c_star) {
            assert!((v - d / 0.5).norm() < 1e-14);
            assert!(c.norm() < 1e-14);
        }
    }

    #[test]
    fn singular_start_deformation_is_rejected() {
        let mut s = state();
        s.particles[3].f = Mat2::new(1.0, 1.0, 1.0, 1.0);
        let err = secant_targets(&ReferenceConfig::capture(&s), &s, 0.1).unwrap_err();
        assert!(matches!(
            err,
            MpmError::DegenerateDeformation {
                particle: Some(3),
                ..
            }
        ));
    }
}
