//! Prints the quadratic B-spline stencil of one particle and checks the
//! identities the transfers rely on.
//!
//! ```bash
//! cargo run --example kernel_stencil -- 0.3172 0.5519
//! ```

use secant_mpm::grid::{GridSpec, WallConditions};
use secant_mpm::kernel::{inertia_scalar, stencil};
use secant_mpm::{Mat2, Vec2};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let x = match args.as_slice() {
        [x, y] => Vec2::new(*x, *y),
        _ => Vec2::new(0.3172, 0.5519),
    };
    let spec = GridSpec::unit_square(64, 3, WallConditions::sticky())?;
    let st = stencil(x, &spec)?;
    let inv_d = 1.0 / inertia_scalar(spec.dx);

    println!(
        "particle at ({:.4}, {:.4}), base node {:?}",
        x.x, x.y, st.base
    );
    println!("node      weight      exact gradient          affine gradient");
    let mut sum_w = 0.0;
    let mut sum_grad = Vec2::zeros();
    let mut reproduced = Vec2::zeros();
    let mut inertia = Mat2::zeros();
    for n in st.nodes() {
        let affine = n.offset * (n.weight * inv_d);
        println!(
            "{:>3},{:<3}  {:.6}  ({:+9.4}, {:+9.4})  ({:+9.4}, {:+9.4})",
            n.node.0, n.node.1, n.weight, n.grad.x, n.grad.y, affine.x, affine.y
        );
        sum_w += n.weight;
        sum_grad += n.grad;
        reproduced += n.weight * (x + n.offset);
        inertia += inv_d * n.weight * n.offset * n.offset.transpose();
    }
    println!("sum w - 1            = {:.2e}", sum_w - 1.0);
    println!("|sum grad w|         = {:.2e}", sum_grad.norm());
    println!("|sum w x_k - x_p|    = {:.2e}", (reproduced - x).norm());
    println!(
        "|inertia - I|        = {:.2e}",
        (inertia - Mat2::identity()).norm()
    );
    Ok(())
}
