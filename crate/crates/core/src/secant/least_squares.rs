//! Full weighted least-squares reconstruction.
//!
//! Minimizing
//!
//! ```text
//! Σ_p m_p |Σ_i w_ip v_i - v*_p|² + λ Σ_p m_p ‖Σ_i v_i ∇w_ipᵀ - C*_p‖_F²
//! ```
//!
//! over the active nodes gives the normal equations `A v = b` with the scalar
//! coefficient `a_kj = Σ_p m_p (w_kp w_jp + λ ∇w_kp·∇w_jp)` shared by both
//! velocity components and `b_k = Σ_p m_p (w_kp v*_p + λ C*_p ∇w_kp)`.

use crate::error::{MpmError, Result};
use crate::grid::{mass_threshold, Grid, GridSpec};
use crate::kernel::{inertia_scalar, stencil};
use crate::Vec2;

use super::targets::{ReferenceConfig, SecantTargets};

const BAND: usize = 5;
const NO_ROW: usize = usize::MAX;

/// Which kernel gradient enters the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientModel {
    /// Analytic B-spline gradients.
    Exact,
    /// The MLS approximation `(1/D) w_kp (x_k - x_p)`.
    Affine,
}

#[inline]
fn slot(di: isize, dj: isize) -> usize {
    ((di + 2) as usize) * BAND + (dj + 2) as usize
}

/// Normal equations restricted to the active nodes of the reference grid.
///
/// Row `r` belongs to grid node `nodes[r]`; each row stores its coefficients
/// against the 5×5 node neighborhood it can couple to.
#[derive(Clone, Debug)]
pub struct LsSystem {
    pub lambda: f64,
    spec: GridSpec,
    nodes: Vec<usize>,
    row_of: Vec<usize>,
    coeffs: Vec<[f64; BAND * BAND]>,
    rhs: Vec<Vec2>,
    /// Lumped reconstruction on the reference grid; its velocities seed CG.
    template: Grid,
}

impl LsSystem {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Grid node index of each row.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn row_of(&self, node: usize) -> Option<usize> {
        match self.row_of[node] {
            NO_ROW => None,
            r => Some(r),
        }
    }

    pub fn rhs(&self) -> &[Vec2] {
        &self.rhs
    }

    /// Lumped node masses of the reference configuration.
    pub fn lumped_mass(&self) -> &[f64] {
        &self.template.mass
    }

    /// Coefficient `a_kj` between two grid nodes; zero outside the band or
    /// for inactive nodes.
    pub fn coefficient(&self, k: usize, j: usize) -> f64 {
        let (Some(r), Some(_)) = (self.row_of(k), self.row_of(j)) else {
            return 0.0;
        };
        let (ki, kj) = self.spec.coords(k);
        let (ji, jj) = self.spec.coords(j);
        let di = ji as isize - ki as isize;
        let dj = jj as isize - kj as isize;
        if di.abs() > 2 || dj.abs() > 2 {
            return 0.0;
        }
        self.coeffs[r][slot(di, dj)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c[slot(0, 0)]).collect()
    }

    /// Neighbors of row `r` as `(column row, coefficient)`.
    fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (i, j) = self.spec.coords(self.nodes[r]);
        let spec = self.spec;
        let row = &self.coeffs[r];
        (-2isize..=2).flat_map(move |di| {
            (-2isize..=2).filter_map(move |dj| {
                let (ni, nj) = (i as isize + di, j as isize + dj);
                if ni < 0 || nj < 0 || ni >= spec.nx as isize || nj >= spec.ny as isize {
                    return None;
                }
                let col = self.row_of[spec.index(ni as usize, nj as usize)];
                (col != NO_ROW).then(|| (col, row[slot(di, dj)]))
            })
        })
    }

    /// `y = A x` for one scalar component.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|r| self.row_entries(r).map(|(c, a)| a * x[c]).sum())
            .collect()
    }

    /// Places a row-indexed solution on a copy of the reference grid.
    fn to_grid(&self, u: &[f64], v: &[f64]) -> Grid {
        let mut grid = self.template.clone();
        for (r, &k) in self.nodes.iter().enumerate() {
            grid.velocity[k] = Vec2::new(u[r], v[r]);
            grid.momentum[k] = grid.mass[k] * grid.velocity[k];
        }
        grid
    }
}

/// Assembles the normal equations with exact kernel gradients.
pub fn assemble_ls_system(
    targets: &SecantTargets,
    reference: &ReferenceConfig,
    lambda: f64,
) -> Result<LsSystem> {
    assemble_ls_system_with(targets, reference, lambda, GradientModel::Exact)
}

pub fn assemble_ls_system_with(
    targets: &SecantTargets,
    reference: &ReferenceConfig,
    lambda: f64,
    gradients: GradientModel,
) -> Result<LsSystem> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(MpmError::Contract(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    let start = &reference.start;
    targets.check_len(start.particles.len())?;
    let spec = start.spec;

    let mut template = Grid::new(spec);
    let mut stencils = Vec::with_capacity(start.particles.len());
    for (p, particle) in start.particles.iter().enumerate() {
        let st = stencil(particle.x, &spec).map_err(|e| e.for_particle(p))?;
        let (v_star, c_star) = (targets.v_star[p], targets.c_star[p]);
        for n in st.nodes() {
            let k = spec.index(n.node.0, n.node.1);
            template.mass[k] += n.weight * particle.mass;
            template.momentum[k] += (n.weight * particle.mass) * (v_star + c_star * n.offset);
        }
        stencils.push(st);
    }
    template.normalize(mass_threshold(start.total_mass(), spec.node_count()));

    let mut nodes = Vec::new();
    let mut row_of = vec![NO_ROW; spec.node_count()];
    for k in 0..spec.node_count() {
        if template.active[k] {
            row_of[k] = nodes.len();
            nodes.push(k);
        }
    }
    if nodes.is_empty() {
        return Err(MpmError::EmptySystem);
    }

    let inv_d = 1.0 / inertia_scalar(spec.dx);
    let mut coeffs = vec![[0.0; BAND * BAND]; nodes.len()];
    let mut rhs = vec![Vec2::zeros(); nodes.len()];
    for (p, (particle, st)) in start.particles.iter().zip(&stencils).enumerate() {
        let m = particle.mass;
        let (v_star, c_star) = (targets.v_star[p], targets.c_star[p]);
        let local: Vec<_> = st
            .nodes()
            .map(|n| {
                let grad = match gradients {
                    GradientModel::Exact => n.grad,
                    GradientModel::Affine => n.offset * (n.weight * inv_d),
                };
                (
                    n.node,
                    row_of[spec.index(n.node.0, n.node.1)],
                    n.weight,
                    grad,
                )
            })
            .collect();
        for (a, &(node_a, row_a, w_a, g_a)) in local.iter().enumerate() {
            if row_a == NO_ROW {
                continue;
            }
            rhs[row_a] += m * (w_a * v_star + lambda * (c_star * g_a));
            for &(node_b, row_b, w_b, g_b) in &local[a..] {
                if row_b == NO_ROW {
                    continue;
                }
                let value = m * (w_a * w_b + lambda * g_a.dot(&g_b));
                let di = node_b.0 as isize - node_a.0 as isize;
                let dj = node_b.1 as isize - node_a.1 as isize;
                coeffs[row_a][slot(di, dj)] += value;
                if row_a != row_b {
                    coeffs[row_b][slot(-di, -dj)] += value;
                }
            }
        }
    }

    Ok(LsSystem {
        lambda,
        spec,
        nodes,
        row_of,
        coeffs,
        rhs,
        template,
    })
}

/// Solution of [`solve_cg`] with convergence statistics.
#[derive(Clone, Debug)]
pub struct CgSolution {
    /// Reconstructed field on the reference grid, wall-projected.
    pub grid: Grid,
    /// Iterations used per velocity component.
    pub iterations: [usize; 2],
    /// Largest final relative residual `‖A v - b‖ / ‖b‖` over both components.
    pub residual: f64,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Jacobi-preconditioned CG on one component. Restarts from the true
/// residual if the recursive one drifted below tolerance first.
fn pcg(
    sys: &LsSystem,
    inv_diag: &[f64],
    b: &[f64],
    guess: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize, f64)> {
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((vec![0.0; n], 0, 0.0));
    }
    let mut x = guess;
    let mut iterations = 0;
    let ax = sys.apply(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    loop {
        let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(a, d)| a * d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while norm(&r) > tol * b_norm && iterations < max_iter {
            let ap = sys.apply(&p);
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iterations += 1;
            z = r.iter().zip(inv_diag).map(|(a, d)| a * d).collect();
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        let ax = sys.apply(&x);
        r = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let residual = norm(&r) / b_norm;
        if residual <= tol {
            return Ok((x, iterations, residual));
        }
        if iterations >= max_iter {
            return Err(MpmError::NonConvergence {
                iterations,
                residual,
            });
        }
    }
}

/// Solves both velocity components with Jacobi-preconditioned conjugate
/// gradients to relative residual `tol`, then wall-projects the result.
///
/// Iteration starts from the lumped reconstruction of the same targets.
pub fn solve_cg(system: &LsSystem, tol: f64, max_iter: usize) -> Result<CgSolution> {
    if system.is_empty() {
        return Err(MpmError::EmptySystem);
    }
    let inv_diag: Vec<f64> = system.diagonal().iter().map(|d| 1.0 / d).collect();
    let bx: Vec<f64> = system.rhs.iter().map(|b| b.x).collect();
    let by: Vec<f64> = system.rhs.iter().map(|b| b.y).collect();
    let guess = |c: usize| -> Vec<f64> {
        system
            .nodes
            .iter()
            .map(|&k| system.template.velocity[k][c])
            .collect()
    };
    let (u, iu, ru) = pcg(system, &inv_diag, &bx, guess(0), tol, max_iter)?;
    let (v, iv, rv) = pcg(system, &inv_diag, &by, guess(1), tol, max_iter)?;
    let mut grid = system.to_grid(&u, &v);
    grid.apply_boundary();
    Ok(CgSolution {
        grid,
        iterations: [iu, iv],
        residual: ru.max(rv),
    })
}

/// Value of the least-squares objective for a grid field, using exact
/// kernel gradients at the reference positions.
pub fn ls_objective(
    grid: &Grid,
    targets: &SecantTargets,
    reference: &ReferenceConfig,
    lambda: f64,
) -> Result<f64> {
    let start = &reference.start;
    targets.check_len(start.particles.len())?;
    let spec = &start.spec;
    if grid.spec != *spec {
        return Err(MpmError::Contract(
            "grid does not match the reference grid".to_string(),
        ));
    }
    let mut velocity_term = 0.0;
    let mut gradient_term = 0.0;
    for (p, particle) in start.particles.iter().enumerate() {
        let st = stencil(particle.x, spec).map_err(|e| e.for_particle(p))?;
        let mut v = Vec2::zeros();
        let mut grad_v = crate::Mat2::zeros();
        for n in st.nodes() {
            let vk = grid.velocity[spec.index(n.node.0, n.node.1)];
            v += n.weight * vk;
            grad_v += vk * n.grad.transpose();
        }
        velocity_term += particle.mass * (v - targets.v_star[p]).norm_squared();
        gradient_term += particle.mass * (grad_v - targets.c_star[p]).norm_squared();
    }
    Ok(velocity_term + lambda * gradient_term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explicit::{Particle, SimState};
    use crate::grid::WallConditions;
    use crate::material::Material;
    use crate::Mat2;

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    fn scene(n: usize, seed: u64) -> (ReferenceConfig, SecantTargets) {
        let spec = GridSpec::unit_square(32, 3, WallConditions::sticky()).unwrap();
        let mut rng = Lcg(seed);
        let particles: Vec<_> = (0..n)
            .map(|_| {
                let x = Vec2::new(0.3 + 0.4 * rng.next(), 0.3 + 0.4 * rng.next());
                Particle::new(x, Vec2::zeros(), 0.5 + rng.next(), 1e-3)
            })
            .collect();
        let targets = SecantTargets {
            v_star: (0..n)
                .map(|_| Vec2::new(rng.next() - 0.5, rng.next() - 0.5))
                .collect(),
            c_star: (0..n)
                .map(|_| {
                    Mat2::new(
                        rng.next() - 0.5,
                        rng.next() - 0.5,
                        rng.next() - 0.5,
                        rng.next() - 0.5,
                    ) * 4.0
                })
                .collect(),
        };
        let r = ReferenceConfig::capture(&SimState::new(
            particles,
            spec,
            Material::new(1e3, 0.2, 1.0).unwrap(),
            Vec2::zeros(),
        ));
        (r, targets)
    }

    fn natural_lambda(r: &ReferenceConfig) -> f64 {
        inertia_scalar(r.start.spec.dx)
    }

    #[test]
    fn matrix_is_exactly_symmetric_and_banded() {
        let (r, t) = scene(200, 1);
        let sys = assemble_ls_system(&t, &r, natural_lambda(&r)).unwrap();
        for &k in sys.nodes() {
            for &j in sys.nodes() {
                assert_eq!(
                    sys.coefficient(k, j).to_bits(),
                    sys.coefficient(j, k).to_bits()
                );
            }
        }
        let spec = *sys.spec();
        let k = spec.index(16, 16);
        assert_eq!(sys.coefficient(k, spec.index(19, 16)), 0.0);
    }

    #[test]
    fn matrix_is_positive_semidefinite() {
        let (r, t) = scene(150, 2);
        let sys = assemble_ls_system(&t, &r, natural_lambda(&r)).unwrap();
        let mut rng = Lcg(7);
        for _ in 0..100 {
            let x: Vec<f64> = (0..sys.len()).map(|_| rng.next() - 0.5).collect();
            assert!(dot(&x, &sys.apply(&x)) >= 0.0);
        }
    }

    #[test]
    fn zero_lambda_gives_consistent_mass_matrix() {
        let (r, t) = scene(100, 3);
        let sys = assemble_ls_system(&t, &r, 0.0).unwrap();
        let lumped = sys.lumped_mass().to_vec();
        for (row, &k) in sys.nodes().iter().enumerate() {
            let row_sum: f64 = sys.row_entries(row).map(|(_, a)| a).sum();
            assert!((row_sum - lumped[k]).abs() < 1e-12);
        }
        // consistent mass entry from the definition
        let spec = *sys.spec();
        let (k, j) = (spec.index(15, 15), spec.index(16, 14));
        let mut expected = 0.0;
        for particle in &r.start.particles {
            let st = stencil(particle.x, &spec).unwrap();
            let w = |node: usize| {
                st.nodes()
                    .find(|n| spec.index(n.node.0, n.node.1) == node)
                    .map_or(0.0, |n| n.weight)
            };
            expected += particle.mass * w(k) * w(j);
        }
        assert!((sys.coefficient(k, j) - expected).abs() < 1e-14);
    }

    #[test]
    fn zero_rhs_solves_in_zero_iterations() {
        let (r, _) = scene(50, 4);
        let sys = assemble_ls_system(&SecantTargets::zeros(50), &r, natural_lambda(&r)).unwrap();
        let sol = solve_cg(&sys, 1e-10, 100).unwrap();
        assert_eq!(sol.iterations, [0, 0]);
        assert!(sol.grid.velocity.iter().all(|v| *v == Vec2::zeros()));
    }

    #[test]
    fn diagonal_system_converges_in_one_iteration() {
        let (r, t) = scene(30, 5);
        let mut sys = assemble_ls_system(&t, &r, natural_lambda(&r)).unwrap();
        for row in sys.coeffs.iter_mut() {
            let d = row[slot(0, 0)];
            *row = [0.0; BAND * BAND];
            row[slot(0, 0)] = d;
        }
        let sol = solve_cg(&sys, 1e-12, 10).unwrap();
        assert!(sol.iterations[0] <= 1 && sol.iterations[1] <= 1);
    }

    #[test]
    fn non_convergence_reports_residual() {
        let (r, t) = scene(200, 6);
        let sys = assemble_ls_system(&t, &r, natural_lambda(&r)).unwrap();
        match solve_cg(&sys, 1e-14, 2) {
            Err(MpmError::NonConvergence {
                iterations,
                residual,
            }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 1e-14);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn solution_minimizes_objective() {
        let (r, t) = scene(300, 8);
        let lambda = natural_lambda(&r);
        let sys = assemble_ls_system(&t, &r, lambda).unwrap();
        let sol = solve_cg(&sys, 1e-12, 10 * sys.len()).unwrap();
        let best = ls_objective(&sol.grid, &t, &r, lambda).unwrap();
        let mut rng = Lcg(11);
        for _ in 0..20 {
            let mut g = sol.grid.clone();
            for &k in sys.nodes() {
                g.velocity[k] += 1e-3 * Vec2::new(rng.next() - 0.5, rng.next() - 0.5);
            }
            assert!(ls_objective(&g, &t, &r, lambda).unwrap() >= best);
        }
        let lumped = super::super::reconstruct_lumped(&t, &r).unwrap();
        assert!(best <= ls_objective(&lumped, &t, &r, lambda).unwrap());
    }

    #[test]
    fn objective_of_zero_field_and_targets_is_zero() {
        let (r, _) = scene(40, 9);
        let g = Grid::new(r.start.spec);
        assert_eq!(
            ls_objective(&g, &SecantTargets::zeros(40), &r, 0.3).unwrap(),
            0.0
        );
    }

    #[test]
    fn empty_scene_is_an_error() {
        let (mut r, _) = scene(1, 10);
        r.start.particles.clear();
        assert!(matches!(
            assemble_ls_system(&SecantTargets::zeros(0), &r, 0.1),
            Err(MpmError::EmptySystem)
        ));
    }
}
