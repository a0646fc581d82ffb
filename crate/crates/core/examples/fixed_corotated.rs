//! Stress and energy of the fixed-corotated model along a uniaxial stretch,
//! with a finite-difference check of P = dΨ/dF.
//!
//! ```bash
//! cargo run --example fixed_corotated
//! ```

use secant_mpm::material::{elastic_energy_density, pk1_fixed_corotated, svd2x2, Material};
use secant_mpm::Mat2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mat = Material::new(1e4, 0.3, 1000.0)?;
    println!(
        "E = {:e}, nu = {}, mu = {:.2}, lambda = {:.2}, wave speed {:.3} m/s",
        mat.youngs_modulus,
        mat.nu,
        mat.mu(),
        mat.lambda(),
        mat.wave_speed()
    );

    let rotation = |theta: f64| Mat2::new(theta.cos(), -theta.sin(), theta.sin(), theta.cos());
    println!("stretch  energy      P_xx        P_yy        fd error");
    for stretch in [0.6, 0.8, 1.0, 1.2, 1.5] {
        // rotated so the SVD has real work to do
        let f = rotation(0.4) * Mat2::new(stretch, 0.0, 0.0, 1.0);
        let p = pk1_fixed_corotated(&f, &mat)?;
        let psi = elastic_energy_density(&f, &mat)?;

        let h = 1e-6;
        let mut fd_err: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut fp = f;
                let mut fm = f;
                fp[(i, j)] += h;
                fm[(i, j)] -= h;
                let fd = (elastic_energy_density(&fp, &mat)? - elastic_energy_density(&fm, &mat)?)
                    / (2.0 * h);
                fd_err = fd_err.max((fd - p[(i, j)]).abs() / p.norm().max(1.0));
            }
        }
        let local = rotation(0.4).transpose() * p;
        println!(
            "{stretch:>6.2}  {psi:>10.3}  {:>10.3}  {:>10.3}  {fd_err:.1e}",
            local[(0, 0)],
            local[(1, 1)]
        );
    }

    let f = Mat2::new(1.1, 0.3, -0.2, 0.9);
    let svd = svd2x2(&f)?;
    println!(
        "svd of {f:?}: sigma = {:?}, det U = {:.3}, det V = {:.3}, |U S Vt - F| = {:.1e}",
        svd.sigma,
        svd.u.determinant(),
        svd.v.determinant(),
        (svd.reconstruct() - f).norm()
    );
    Ok(())
}
