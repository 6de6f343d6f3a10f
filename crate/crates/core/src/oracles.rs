//! Closed-form reference solutions and error measures for the benchmarks.

use crate::Mat2;

/// Stress along a column compressed by its own weight, `x` measured from the
/// supported end. `g` is signed (negative pulls toward the support).
pub fn bar_stress(x: f64, l0: f64, rho: f64, g: f64, area: f64, youngs: f64) -> f64 {
    let s0 = rho * g * area * l0;
    let alpha = s0 / (2.0 * youngs);
    let r = x / l0;
    s0 * ((1.0 - r) + alpha * r) / (1.0 - alpha * (1.0 - alpha) * r)
}

/// Volume-weighted absolute stress error normalised by `|W| l0`.
///
/// `samples` yields `(numerical, analytical, volume)` triples.
pub fn bar_error<I>(samples: I, weight: f64, l0: f64) -> f64
where
    I: IntoIterator<Item = (f64, f64, f64)>,
{
    samples.into_iter().map(|(num, ana, vol)| (num - ana).abs() * vol).sum::<f64>() / (weight.abs() * l0)
}

/// Velocity and stress (tension positive) in two collinear bars of equal
/// material after the first, of length `l1`, strikes the resting second bar
/// of length `2 l1` with speed `v0` at `t = 0`.
///
/// `x` is the reference coordinate: bar 1 occupies `[0, l1]`, bar 2 `[l1, 3 l1]`.
/// The interface carries compression `rho c0 v0 / 2` until `t = 2 l1 / c0`,
/// then no force until the bars separate at `t = 4 l1 / c0`.
pub fn impact_wave_solution(x: f64, t: f64, l1: f64, v0: f64, c0: f64, rho: f64) -> (f64, f64) {
    let (v, s) = impact_wave_dimensionless(x / l1, t * c0 / l1);
    (v * v0, s * rho * c0 * v0)
}

/// Dimensionless characteristics solution: length in `l1`, time in `l1 / c0`,
/// velocity in `v0`, stress in `rho c0 v0`.
pub fn impact_wave_dimensionless(x: f64, t: f64) -> (f64, f64) {
    const CONTACT: (f64, f64) = (0.5, -0.5);
    const REST: (f64, f64) = (0.0, 0.0);
    const MOVING: (f64, f64) = (1.0, 0.0);
    if x <= 1.0 {
        return if t < 1.0 {
            if x < 1.0 - t {
                MOVING
            } else {
                CONTACT
            }
        } else if t < 2.0 {
            if x < t - 1.0 {
                REST
            } else {
                CONTACT
            }
        } else {
            REST
        };
    }
    if t < 2.0 {
        return if x < 1.0 + t { CONTACT } else { REST };
    }
    let tau = 2.0 + (t - 2.0).rem_euclid(4.0);
    match tau {
        tau if tau < 3.0 => {
            if x < tau - 1.0 {
                REST
            } else if x > 5.0 - tau {
                MOVING
            } else {
                CONTACT
            }
        }
        tau if tau < 4.0 => {
            if x < 5.0 - tau {
                REST
            } else if x < tau - 1.0 {
                (0.5, 0.5)
            } else {
                MOVING
            }
        }
        tau if tau < 5.0 => {
            if x < tau - 3.0 {
                MOVING
            } else if x > 7.0 - tau {
                REST
            } else {
                (0.5, 0.5)
            }
        }
        tau => {
            if x < 7.0 - tau {
                MOVING
            } else if x < tau - 3.0 {
                CONTACT
            } else {
                REST
            }
        }
    }
}

/// Effective radius `1 / (1/R1 + 1/R2)`.
pub fn effective_radius(r1: f64, r2: f64) -> f64 {
    1.0 / (1.0 / r1 + 1.0 / r2)
}

/// Effective modulus `1 / ((1 - nu1^2)/E1 + (1 - nu2^2)/E2)`. An infinite `e1` denotes a rigid body.
pub fn effective_modulus(e1: f64, nu1: f64, e2: f64, nu2: f64) -> f64 {
    let c1 = if e1.is_infinite() { 0.0 } else { (1.0 - nu1 * nu1) / e1 };
    1.0 / (c1 + (1.0 - nu2 * nu2) / e2)
}

/// Contact half-width of two parallel cylinders pressed by `force` over length `length`.
#[allow(clippy::too_many_arguments)]
pub fn hertz_disks_contact_halfwidth(
    force: f64,
    r1: f64,
    r2: f64,
    e1: f64,
    nu1: f64,
    e2: f64,
    nu2: f64,
    length: f64,
) -> f64 {
    let r = effective_radius(r1, r2);
    let e = effective_modulus(e1, nu1, e2, nu2);
    (4.0 * force * r / (std::f64::consts::PI * e * length)).sqrt()
}

/// Line contact of a cylinder of radius `radius` on an elastic half-plane under
/// `force` per unit length. A rigid cylinder gives `E' = 2 E2 / (1 - nu2^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlaneContact {
    pub half_width: f64,
    pub peak_pressure: f64,
}

impl HalfPlaneContact {
    pub fn new(force: f64, radius: f64, e_prime: f64) -> Self {
        let half_width = 2.0 * (2.0 * force * radius / (std::f64::consts::PI * e_prime)).sqrt();
        Self { half_width, peak_pressure: 2.0 * force / (std::f64::consts::PI * half_width) }
    }

    pub fn rigid_indenter(force: f64, radius: f64, e2: f64, nu2: f64) -> Self {
        Self::new(force, radius, 2.0 * e2 / (1.0 - nu2 * nu2))
    }

    /// Normal stress `sigma_yy` (compression negative) at distance `s` from the centre.
    pub fn stress(&self, s: f64) -> f64 {
        let r = s / self.half_width;
        if r.abs() >= 1.0 {
            0.0
        } else {
            -self.peak_pressure * (1.0 - r * r).sqrt()
        }
    }
}

/// Root-mean-square of `(numerical - analytical)` divided by `scale`.
pub fn pressure_rmse<I>(samples: I, scale: f64) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let (mut sum, mut n) = (0.0, 0usize);
    for (num, ana) in samples {
        sum += (num - ana).powi(2);
        n += 1;
    }
    if n == 0 {
        return f64::NAN;
    }
    (sum / n as f64).sqrt() / scale
}

/// Default photoelastic fringe constant, `pi / 0.07` per GPa, in 1/Pa.
pub const FRINGE_CONSTANT: f64 = std::f64::consts::PI / 0.07e9;

/// In-plane principal stress difference.
pub fn principal_difference(sigma: &Mat2) -> f64 {
    let d = sigma[(0, 0)] - sigma[(1, 1)];
    let t = 0.5 * (sigma[(0, 1)] + sigma[(1, 0)]);
    (4.0 * t * t + d * d).sqrt()
}

/// Fringe intensity `1 - sin^2(k (s1 - s2))`.
pub fn fringe_field(sigma: &Mat2, k: f64) -> f64 {
    1.0 - (k * principal_difference(sigma)).sin().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bar_weight_reference() {
        let s0 = bar_stress(0.0, 0.6, 2783.0, -9.81, 1.0, 50.5e9);
        assert_relative_eq!(s0, -16380.738, max_relative = 1e-8);
        let alpha = s0 / (2.0 * 50.5e9);
        let top = bar_stress(0.6, 0.6, 2783.0, -9.81, 1.0, 50.5e9);
        assert_relative_eq!(top, s0 * alpha / (1.0 - alpha * (1.0 - alpha)), max_relative = 1e-12);
        assert_eq!(bar_stress(0.3, 0.6, 2783.0, 0.0, 1.0, 50.5e9), 0.0);
    }

    #[test]
    fn bar_error_normalisation() {
        assert_eq!(bar_error([(1.0, 1.0, 0.1), (2.0, 2.0, 0.3)], 10.0, 0.6), 0.0);
        assert_relative_eq!(bar_error([(7.0, 1.0, 1.0)], 10.0, 0.6), 1.0);
    }

    #[test]
    fn impact_states() {
        let (v, s) = impact_wave_dimensionless(0.9, 0.5);
        assert_eq!((v, s), (0.5, -0.5));
        assert_eq!(impact_wave_dimensionless(0.2, 0.5), (1.0, 0.0));
        assert_eq!(impact_wave_dimensionless(2.9, 0.5), (0.0, 0.0));
        assert_eq!(impact_wave_dimensionless(0.5, 4.5), (0.0, 0.0));
        assert_eq!(impact_wave_dimensionless(2.0, 3.5), (0.5, 0.5));
    }

    #[test]
    fn impact_reference_magnitudes() {
        let (e, rho) = (50.5e9_f64, 2783.0_f64);
        let c0 = (e / rho).sqrt();
        let l1 = 187.8e-6 * c0 / 4.0;
        assert_relative_eq!(l1, 0.2, max_relative = 1e-3);
        let (_, s) = impact_wave_solution(0.99 * l1, 0.5 * l1 / c0, l1, 1.0, c0, rho);
        assert_relative_eq!(-s, 5.927e6, max_relative = 1e-3);
    }

    #[test]
    fn hertz_half_width_scales_with_root_force() {
        let a = |f: f64| hertz_disks_contact_halfwidth(f, 0.01, 0.01, 9.453e10, 0.07, 9.453e10, 0.07, 1.0);
        assert_eq!(a(0.0), 0.0);
        assert_relative_eq!(a(4000.0), 2.0 * a(1000.0), max_relative = 1e-12);
    }

    #[test]
    fn half_plane_pressure_profile() {
        let c = HalfPlaneContact::rigid_indenter(156.7e3, 2e-3, 10e9, 0.0);
        assert_eq!(c.stress(c.half_width), 0.0);
        assert_relative_eq!(c.stress(0.0), -c.peak_pressure);
        assert_relative_eq!(c.peak_pressure, 2.0 * 156.7e3 / (std::f64::consts::PI * c.half_width));
        let n = 20_000;
        let ds = 2.0 * c.half_width / n as f64;
        let integral: f64 = (0..n)
            .map(|i| {
                let s = -c.half_width + i as f64 * ds;
                0.5 * (c.stress(s) + c.stress(s + ds)) * ds
            })
            .sum();
        assert_relative_eq!(integral, -156.7e3, max_relative = 1e-3);
    }

    #[test]
    fn rmse_examples() {
        let c = HalfPlaneContact::rigid_indenter(1.0, 1.0, 1.0, 0.0);
        let exact: Vec<(f64, f64)> = (0..10).map(|i| (c.stress(i as f64 * 0.1), c.stress(i as f64 * 0.1))).collect();
        assert_eq!(pressure_rmse(exact, c.peak_pressure), 0.0);
        assert_relative_eq!(pressure_rmse([(1.5, 1.0), (2.5, 2.0)], 2.0), 0.25);
    }

    #[test]
    fn fringe_examples() {
        assert_eq!(fringe_field(&Mat2::zeros(), FRINGE_CONSTANT), 1.0);
        let shear = Mat2::new(0.0, 0.035e9, 0.035e9, 0.0);
        assert_relative_eq!(principal_difference(&shear), 0.07e9, max_relative = 1e-12);
        assert!((fringe_field(&shear, FRINGE_CONSTANT) - 1.0).abs() < 1e-12);
        let half = Mat2::new(0.035e9, 0.0, 0.0, 0.0);
        assert!(fringe_field(&half, FRINGE_CONSTANT).abs() < 1e-12);
    }
}
