//! Material points, discrete fields, boundary chains and per-field nodal accumulators.

mod seed;

pub use seed::{gauss_legendre, seed_field, Geometry, SeedSpec, BOUNDARY_SHARE};

use std::ops::Range;

use crate::materials::{LinearMode, Material};
use crate::{Mat2, Vec2};

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialPoint {
    pub position: Vec2,
    pub initial_position: Vec2,
    pub displacement: Vec2,
    pub velocity: Vec2,
    pub mass: f64,
    pub volume: f64,
    pub initial_volume: f64,
    pub strain: Mat2,
    pub deformation_gradient: Mat2,
    pub stress: Mat2,
    pub field: usize,
    pub is_boundary: bool,
}

impl MaterialPoint {
    pub fn new(position: Vec2, mass: f64, volume: f64, field: usize, is_boundary: bool) -> Self {
        Self {
            position,
            initial_position: position,
            displacement: Vec2::zeros(),
            velocity: Vec2::zeros(),
            mass,
            volume,
            initial_volume: volume,
            strain: Mat2::zeros(),
            deformation_gradient: Mat2::identity(),
            stress: Mat2::zeros(),
            field,
            is_boundary,
        }
    }

    pub fn density(&self) -> f64 {
        self.mass / self.volume
    }
}

/// Ordered boundary points of one field. A closed chain is traversed
/// counter-clockwise so the outward normal lies to the right of the tangent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundaryChain {
    pub points: Vec<usize>,
    pub closed: bool,
}

impl BoundaryChain {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn num_segments(&self) -> usize {
        match (self.closed, self.points.len()) {
            (_, 0 | 1) => 0,
            (true, n) => n,
            (false, n) => n - 1,
        }
    }

    /// Endpoint point ids of segment `k`.
    pub fn segment(&self, k: usize) -> (usize, usize) {
        let n = self.points.len();
        (self.points[k], self.points[(k + 1) % n])
    }

    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_segments()).map(move |k| self.segment(k))
    }

    /// Half the summed length of the segments adjacent to chain entry `k`.
    pub fn tributary_length(&self, k: usize, points: &[MaterialPoint]) -> f64 {
        let n = self.points.len();
        if n < 2 {
            return 0.0;
        }
        let at = |i: usize| points[self.points[i]].position;
        let mut sum = 0.0;
        if self.closed || k > 0 {
            sum += (at(k) - at((k + n - 1) % n)).norm();
        }
        if self.closed || k + 1 < n {
            sum += (at((k + 1) % n) - at(k)).norm();
        }
        0.5 * sum
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    pub id: usize,
    pub name: String,
    pub points: Range<usize>,
    pub chain: BoundaryChain,
    pub material: Material,
    pub density: f64,
    /// Rigid fields keep their points fixed and are not mapped to the grid.
    pub rigid: bool,
}

impl DiscreteField {
    pub fn total_mass(&self, points: &[MaterialPoint]) -> f64 {
        points[self.points.clone()].iter().map(|p| p.mass).sum()
    }

    pub fn momentum(&self, points: &[MaterialPoint]) -> Vec2 {
        points[self.points.clone()].iter().map(|p| p.velocity * p.mass).sum()
    }

    pub fn mean_velocity(&self, points: &[MaterialPoint]) -> Vec2 {
        self.momentum(points) / self.total_mass(points)
    }
}

/// Grid-side accumulators of one discrete field.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldNodalState {
    pub mass: Vec<f64>,
    pub momentum: Vec<Vec2>,
    pub internal_force: Vec<Vec2>,
    pub external_force: Vec<Vec2>,
    pub contact_force: Vec<Vec2>,
    pub volume: Vec<f64>,
}

impl FieldNodalState {
    pub fn new(num_nodes: usize) -> Self {
        let mut s = Self::default();
        s.reset(num_nodes);
        s
    }

    pub fn reset(&mut self, num_nodes: usize) {
        for v in [&mut self.mass, &mut self.volume] {
            v.clear();
            v.resize(num_nodes, 0.0);
        }
        for v in [&mut self.momentum, &mut self.internal_force, &mut self.external_force, &mut self.contact_force] {
            v.clear();
            v.resize(num_nodes, Vec2::zeros());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Energies {
    pub kinetic: f64,
    pub stored: f64,
}

impl Energies {
    pub fn total(&self) -> f64 {
        self.kinetic + self.stored
    }
}

/// Kinetic and stored energy of a set of points sharing one material.
///
/// Linear elastic energy density is integrated over the current volume;
/// the hyperelastic density is per reference volume and uses the initial one.
pub fn total_energies(points: &[MaterialPoint], material: &Material, dim: usize) -> Energies {
    let mut e = Energies::default();
    for p in points {
        e.kinetic += 0.5 * p.mass * p.velocity.norm_squared();
        e.stored += match material {
            Material::LinearElastic(m) => m.energy_density(&p.strain, LinearMode::for_dim(dim)) * p.volume,
            Material::NeoHookean(m) => m.energy_density(&p.deformation_gradient).unwrap_or(f64::NAN) * p.initial_volume,
        };
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::LinearElastic;

    const STEEL: Material = Material::LinearElastic(LinearElastic { youngs_modulus: 200e9, poisson_ratio: 0.3 });

    #[test]
    fn resting_unstressed_points_have_no_energy() {
        let pts = vec![MaterialPoint::new(Vec2::zeros(), 1.0, 1.0, 0, false); 3];
        assert_eq!(total_energies(&pts, &STEEL, 2), Energies::default());
    }

    #[test]
    fn kinetic_energy_of_single_point() {
        let mut p = MaterialPoint::new(Vec2::zeros(), 2.0, 1.0, 0, false);
        p.velocity = Vec2::new(3.0, 0.0);
        let e = total_energies(&[p], &STEEL, 2);
        assert_eq!(e.kinetic, 9.0);
        assert_eq!(e.total(), 9.0);
    }

    #[test]
    fn chain_segments_and_tributary_lengths() {
        let pts: Vec<MaterialPoint> = [(0.0, 0.0), (1.0, 0.0), (1.0, 2.0), (0.0, 2.0)]
            .iter()
            .map(|&(x, y)| MaterialPoint::new(Vec2::new(x, y), 1.0, 1.0, 0, true))
            .collect();
        let closed = BoundaryChain { points: vec![0, 1, 2, 3], closed: true };
        assert_eq!(closed.segments().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(closed.tributary_length(0, &pts), 1.5);
        let open = BoundaryChain { points: vec![0, 1, 2], closed: false };
        assert_eq!(open.num_segments(), 2);
        assert_eq!(open.tributary_length(0, &pts), 0.5);
        assert_eq!(open.tributary_length(1, &pts), 1.5);
    }
}
