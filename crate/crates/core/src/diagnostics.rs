//! Energy and momentum bookkeeping for a simulation state.

use serde::{Deserialize, Serialize};

use crate::explicit::SimState;
use crate::material::energy_density_unchecked;
use crate::secant::MacroStepReport;
use crate::Vec2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub total_mass: f64,
    pub momentum: [f64; 2],
    pub kinetic_energy: f64,
    /// Σ V0 Ψ(F).
    pub elastic_energy: f64,
    /// -Σ m g·x, zero at the grid origin.
    pub gravitational_energy: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub macro_step: Option<MacroStepReport>,
}

impl Diagnostics {
    pub fn total_energy(&self) -> f64 {
        self.kinetic_energy + self.elastic_energy + self.gravitational_energy
    }
}

pub fn compute_diagnostics(state: &SimState) -> Diagnostics {
    let origin = state.spec.origin;
    let mut momentum = Vec2::zeros();
    let mut gravitational = 0.0;
    let mut elastic = 0.0;
    for p in &state.particles {
        momentum += p.mass * p.v;
        gravitational -= p.mass * state.gravity.dot(&(p.x - origin));
        elastic += p.volume0 * energy_density_unchecked(&p.f, &state.material);
    }
    Diagnostics {
        total_mass: state.total_mass(),
        momentum: [momentum.x, momentum.y],
        kinetic_energy: state.kinetic_energy(),
        elastic_energy: elastic,
        gravitational_energy: gravitational,
        macro_step: None,
    }
}
