//! Fixed-corotated hyperelasticity.
//!
//! `Ψ(F) = μ Σ (σ_i - 1)^2 + λ/2 (J - 1)^2` with first Piola-Kirchhoff stress
//! `P = 2μ (F - R) + λ (J - 1) J F^{-T}`, where `R = U V^T` is the rotation
//! from the polar decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{MpmError, Result};
use crate::Mat2;

/// Smallest admissible `det(F)` before a deformation is considered inverted.
pub const MIN_DETERMINANT: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    /// Young's modulus (Pa).
    #[serde(rename = "E")]
    pub youngs_modulus: f64,
    /// Poisson ratio.
    pub nu: f64,
    /// Areal density (kg/m²).
    pub rho: f64,
}

impl Material {
    pub fn new(youngs_modulus: f64, nu: f64, rho: f64) -> Result<Self> {
        let m = Material {
            youngs_modulus,
            nu,
            rho,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.youngs_modulus.is_finite() && self.youngs_modulus > 0.0) {
            return Err(MpmError::Config(format!(
                "material.E must be positive, got {}",
                self.youngs_modulus
            )));
        }
        if !(0.0..0.5).contains(&self.nu) {
            return Err(MpmError::Config(format!(
                "material.nu must lie in [0, 0.5), got {}",
                self.nu
            )));
        }
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(MpmError::Config(format!(
                "material.rho must be positive, got {}",
                self.rho
            )));
        }
        Ok(())
    }

    /// Shear modulus μ.
    pub fn mu(&self) -> f64 {
        self.youngs_modulus / (2.0 * (1.0 + self.nu))
    }

    /// First Lamé parameter λ.
    pub fn lambda(&self) -> f64 {
        self.youngs_modulus * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))
    }

    /// P-wave speed `sqrt((λ + 2μ) / ρ)`.
    pub fn wave_speed(&self) -> f64 {
        ((self.lambda() + 2.0 * self.mu()) / self.rho).sqrt()
    }
}

/// `F = U diag(sigma) V^T` with `U`, `V` proper rotations and
/// `sigma[0] >= sigma[1]`. For inverted `F` the sign lands in `sigma[1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Svd2 {
    pub u: Mat2,
    pub sigma: [f64; 2],
    pub v: Mat2,
}

impl Svd2 {
    pub fn rotation(&self) -> Mat2 {
        self.u * self.v.transpose()
    }

    pub fn reconstruct(&self) -> Mat2 {
        self.u * Mat2::new(self.sigma[0], 0.0, 0.0, self.sigma[1]) * self.v.transpose()
    }
}

fn rotation(c: f64, s: f64) -> Mat2 {
    Mat2::new(c, -s, s, c)
}

/// Closed-form 2×2 SVD: polar rotation first, then a symmetric eigensolve.
pub fn svd2x2(f: &Mat2) -> Result<Svd2> {
    if f.iter().any(|x| !x.is_finite()) {
        return Err(MpmError::NonFinite(format!("deformation gradient {f:?}")));
    }
    let a = f[(0, 0)] + f[(1, 1)];
    let b = f[(1, 0)] - f[(0, 1)];
    let r = a.hypot(b);
    let polar = if r > 0.0 {
        rotation(a / r, b / r)
    } else {
        Mat2::identity()
    };
    let s = polar.transpose() * f;
    let s01 = 0.5 * (s[(0, 1)] + s[(1, 0)]);
    let (s00, s11) = (s[(0, 0)], s[(1, 1)]);
    let theta = 0.5 * (2.0 * s01).atan2(s00 - s11);
    let (sn, cs) = theta.sin_cos();
    let sigma0 = cs * cs * s00 + 2.0 * cs * sn * s01 + sn * sn * s11;
    let sigma1 = sn * sn * s00 - 2.0 * cs * sn * s01 + cs * cs * s11;
    let v = rotation(cs, sn);
    Ok(Svd2 {
        u: polar * v,
        sigma: [sigma0, sigma1],
        v,
    })
}

fn cofactor(f: &Mat2) -> Mat2 {
    Mat2::new(f[(1, 1)], -f[(1, 0)], -f[(0, 1)], f[(0, 0)])
}

fn check_determinant(f: &Mat2) -> Result<f64> {
    let det = f.determinant();
    if !(det > MIN_DETERMINANT) {
        return Err(MpmError::DegenerateDeformation {
            particle: None,
            det,
        });
    }
    Ok(det)
}

/// First Piola-Kirchhoff stress of the fixed-corotated model.
pub fn pk1_fixed_corotated(f: &Mat2, mat: &Material) -> Result<Mat2> {
    let j = check_determinant(f)?;
    let svd = svd2x2(f)?;
    Ok(2.0 * mat.mu() * (f - svd.rotation()) + mat.lambda() * (j - 1.0) * cofactor(f))
}

/// Elastic energy density Ψ(F) (J/m²).
pub fn elastic_energy_density(f: &Mat2, mat: &Material) -> Result<f64> {
    check_determinant(f)?;
    Ok(energy_density_unchecked(f, mat))
}

/// Ψ(F) without the inversion guard; used for diagnostics.
pub(crate) fn energy_density_unchecked(f: &Mat2, mat: &Material) -> f64 {
    let Ok(svd) = svd2x2(f) else {
        return f64::NAN;
    };
    let j = f.determinant();
    let stretch: f64 = svd.sigma.iter().map(|s| (s - 1.0) * (s - 1.0)).sum();
    mat.mu() * stretch + 0.5 * mat.lambda() * (j - 1.0) * (j - 1.0)
}
