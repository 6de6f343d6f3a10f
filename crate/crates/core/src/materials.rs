//! Constitutive laws: small-strain linear elasticity (1D bar or plane strain)
//! and compressible Neo-Hookean hyperelasticity in plane strain.

use serde::{Deserialize, Serialize};

use crate::error::{MpmError, Result};
use crate::Mat2;

/// Kinematic setting of the linear law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearMode {
    /// Uniaxial stress along `x`; only the `xx` components are used.
    Bar,
    PlaneStrain,
}

impl LinearMode {
    pub fn for_dim(dim: usize) -> Self {
        if dim == 1 {
            LinearMode::Bar
        } else {
            LinearMode::PlaneStrain
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearElastic {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
}

impl LinearElastic {
    pub fn lame(&self) -> (f64, f64) {
        let (e, nu) = (self.youngs_modulus, self.poisson_ratio);
        let mu = e / (2.0 * (1.0 + nu));
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        (mu, lambda)
    }

    pub fn stress(&self, strain: &Mat2, mode: LinearMode) -> Mat2 {
        match mode {
            LinearMode::Bar => Mat2::new(self.youngs_modulus * strain[(0, 0)], 0.0, 0.0, 0.0),
            LinearMode::PlaneStrain => {
                let (mu, lambda) = self.lame();
                strain * (2.0 * mu) + Mat2::identity() * (lambda * strain.trace())
            }
        }
    }

    /// Adds the strain increment and returns the new strain and stress.
    pub fn update(&self, strain: &Mat2, increment: &Mat2, mode: LinearMode) -> (Mat2, Mat2) {
        let eps = strain + increment;
        let sigma = self.stress(&eps, mode);
        (eps, sigma)
    }

    /// Strain energy density `0.5 sigma : eps` (per current volume).
    pub fn energy_density(&self, strain: &Mat2, mode: LinearMode) -> f64 {
        0.5 * self.stress(strain, mode).component_mul(strain).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeoHookean {
    pub mu: f64,
    pub lambda: f64,
}

impl NeoHookean {
    /// Small-strain Young's modulus and Poisson ratio implied by the Lamé pair.
    pub fn equivalent_linear(&self) -> LinearElastic {
        let (mu, lambda) = (self.mu, self.lambda);
        LinearElastic {
            youngs_modulus: mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu),
            poisson_ratio: lambda / (2.0 * (lambda + mu)),
        }
    }

    fn jacobian(f: &Mat2) -> Result<f64> {
        let j = f.determinant();
        if j > 0.0 && j.is_finite() {
            Ok(j)
        } else {
            Err(MpmError::ElementInversion { point: usize::MAX, step: usize::MAX, det: j })
        }
    }

    pub fn stress(&self, f: &Mat2) -> Result<Mat2> {
        let j = Self::jacobian(f)?;
        let b = f * f.transpose();
        Ok(((b - Mat2::identity()) * self.mu + Mat2::identity() * (self.lambda * j.ln())) / j)
    }

    /// Stored energy per unit reference volume.
    pub fn energy_density(&self, f: &Mat2) -> Result<f64> {
        let j = Self::jacobian(f)?;
        let ic = (f.transpose() * f).trace();
        let lnj = j.ln();
        Ok(0.5 * self.mu * (ic - 2.0) - self.mu * lnj + 0.5 * self.lambda * lnj * lnj)
    }

    /// Advances `F` with the velocity gradient and evaluates stress and energy.
    pub fn update(&self, f: &Mat2, velocity_gradient: &Mat2, dt: f64) -> Result<(Mat2, Mat2, f64)> {
        let f_new = (Mat2::identity() + velocity_gradient * dt) * f;
        let sigma = self.stress(&f_new)?;
        let psi = self.energy_density(&f_new)?;
        Ok((f_new, sigma, psi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Material {
    LinearElastic(LinearElastic),
    NeoHookean(NeoHookean),
}

impl Material {
    /// Young's modulus used for wave speeds and penalty defaults.
    pub fn youngs_modulus(&self) -> f64 {
        match self {
            Material::LinearElastic(m) => m.youngs_modulus,
            Material::NeoHookean(m) => m.equivalent_linear().youngs_modulus,
        }
    }

    /// Bar wave speed `sqrt(E / rho)`.
    pub fn wave_speed(&self, density: f64) -> f64 {
        (self.youngs_modulus() / density).sqrt()
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        match self {
            Material::LinearElastic(m) => {
                if !(m.youngs_modulus > 0.0) {
                    return Err(format!("youngs_modulus must be positive, got {}", m.youngs_modulus));
                }
                if !(m.poisson_ratio > -1.0 && m.poisson_ratio < 0.5) {
                    return Err(format!("poisson_ratio must lie in (-1, 0.5), got {}", m.poisson_ratio));
                }
            }
            Material::NeoHookean(m) => {
                if !(m.mu > 0.0) || !(m.lambda >= 0.0) {
                    return Err(format!(
                        "neo-Hookean requires mu > 0 and lambda >= 0, got mu={} lambda={}",
                        m.mu, m.lambda
                    ));
                }
            }
        }
        Ok(())
    }
}
