//! Quadratic B-spline interpolation on the background grid.
//!
//! A particle at normalized offset `fx = (x_p - x_base) / dx` from the
//! leftmost node of its stencil touches three nodes per axis with weights
//!
//! ```text
//! N0 = 0.5 (1.5 - fx)^2,  N1 = 0.75 - (fx - 1)^2,  N2 = 0.5 (fx - 0.5)^2
//! ```
//!
//! For this kernel the APIC inertia scalar is `D = dx^2 / 4`.

use crate::error::{MpmError, Result};
use crate::grid::GridSpec;
use crate::Vec2;

/// APIC inertia scalar `D = dx^2 / 4` for quadratic B-splines.
pub fn inertia_scalar(dx: f64) -> f64 {
    0.25 * dx * dx
}

/// Weights and derivatives (with respect to `fx`) of the three nodes in one
/// axis. `fx` must lie in `[0.5, 1.5)`.
pub fn bspline_weights_1d(fx: f64) -> Result<([f64; 3], [f64; 3])> {
    if !(0.5..1.5).contains(&fx) {
        return Err(MpmError::Contract(format!(
            "normalized stencil offset {fx} outside [0.5, 1.5)"
        )));
    }
    let a = 1.5 - fx;
    let b = fx - 1.0;
    let c = fx - 0.5;
    Ok(([0.5 * a * a, 0.75 - b * b, 0.5 * c * c], [-a, -2.0 * b, c]))
}

/// The 3×3 footprint of one particle.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    /// Node index `(i, j)` of the lower-left stencil node.
    pub base: (usize, usize),
    /// `w[a][b]` is the weight of node `base + (a, b)`.
    pub w: [[f64; 3]; 3],
    /// Exact weight gradients with respect to the particle position (1/m).
    pub grad: [[Vec2; 3]; 3],
    /// Node position minus particle position (m).
    pub offsets: [[Vec2; 3]; 3],
}

/// One node touched by a stencil.
#[derive(Clone, Copy, Debug)]
pub struct StencilNode {
    pub node: (usize, usize),
    pub weight: f64,
    pub grad: Vec2,
    pub offset: Vec2,
}

impl Stencil {
    pub fn nodes(&self) -> impl Iterator<Item = StencilNode> + '_ {
        (0..3).flat_map(move |a| {
            (0..3).map(move |b| StencilNode {
                node: (self.base.0 + a, self.base.1 + b),
                weight: self.w[a][b],
                grad: self.grad[a][b],
                offset: self.offsets[a][b],
            })
        })
    }

    /// Gradient approximation `(1/D) w (x_k - x_p)` used by MLS-MPM.
    pub fn affine_gradient(&self, a: usize, b: usize, inv_d: f64) -> Vec2 {
        self.offsets[a][b] * (self.w[a][b] * inv_d)
    }
}

fn axis_base(rel: f64) -> (usize, f64) {
    let mut base = (rel - 0.5).floor();
    let mut fx = rel - base;
    // rounding can land exactly on the upper knot
    if fx >= 1.5 {
        base += 1.0;
        fx -= 1.0;
    }
    (base as usize, fx)
}

/// Evaluates the stencil of a particle at `x_p`.
///
/// Fails with [`MpmError::OutOfDomain`] unless the whole stencil, with a
/// half-cell margin, lies on the grid (see [`GridSpec::in_domain`]).
pub fn stencil(x_p: Vec2, spec: &GridSpec) -> Result<Stencil> {
    if !spec.in_domain(x_p) {
        return Err(MpmError::OutOfDomain {
            particle: None,
            position: x_p,
        });
    }
    let inv_dx = 1.0 / spec.dx;
    let rel = (x_p - spec.origin) * inv_dx;
    let (bi, fx) = axis_base(rel.x);
    let (bj, fy) = axis_base(rel.y);
    let (wx, dwx) = bspline_weights_1d(fx)?;
    let (wy, dwy) = bspline_weights_1d(fy)?;

    let mut w = [[0.0; 3]; 3];
    let mut grad = [[Vec2::zeros(); 3]; 3];
    let mut offsets = [[Vec2::zeros(); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            w[a][b] = wx[a] * wy[b];
            grad[a][b] = Vec2::new(dwx[a] * wy[b] * inv_dx, wx[a] * dwy[b] * inv_dx);
            offsets[a][b] = spec.node_position(bi + a, bj + b) - x_p;
        }
    }
    Ok(Stencil {
        base: (bi, bj),
        w,
        grad,
        offsets,
    })
}
