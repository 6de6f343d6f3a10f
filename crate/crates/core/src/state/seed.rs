use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{BoundaryChain, MaterialPoint};
use crate::error::{MpmError, Result};
use crate::grid_bspline::EulerianGrid;
use crate::Vec2;

/// Share of a field's area and mass carried by its boundary points.
pub const BOUNDARY_SHARE: f64 = 1e-3;

/// Region occupied by one discrete field. Lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    /// One-dimensional bar on `[start, end]` with unit cross-section.
    Bar {
        start: f64,
        end: f64,
    },
    Rectangle {
        min: [f64; 2],
        max: [f64; 2],
    },
    Disk {
        center: [f64; 2],
        radius: f64,
    },
    /// Ring; only the outer outline carries boundary points.
    Annulus {
        center: [f64; 2],
        inner_radius: f64,
        outer_radius: f64,
    },
    /// Lower half of a disk with its flat side on top at `center.y`.
    DemiDisk {
        center: [f64; 2],
        radius: f64,
    },
}

impl Geometry {
    pub fn dim(&self) -> usize {
        match self {
            Geometry::Bar { .. } => 1,
            _ => 2,
        }
    }

    /// Length in 1D, area in 2D.
    pub fn measure(&self) -> f64 {
        match *self {
            Geometry::Bar { start, end } => end - start,
            Geometry::Rectangle { min, max } => (max[0] - min[0]) * (max[1] - min[1]),
            Geometry::Disk { radius, .. } => PI * radius * radius,
            Geometry::Annulus { inner_radius, outer_radius, .. } => PI * (outer_radius.powi(2) - inner_radius.powi(2)),
            Geometry::DemiDisk { radius, .. } => 0.5 * PI * radius * radius,
        }
    }

    pub fn contains(&self, x: Vec2) -> bool {
        match *self {
            Geometry::Bar { start, end } => x.x > start && x.x < end,
            Geometry::Rectangle { min, max } => x.x > min[0] && x.x < max[0] && x.y > min[1] && x.y < max[1],
            Geometry::Disk { center, radius } => (x - Vec2::from(center)).norm() < radius,
            Geometry::Annulus { center, inner_radius, outer_radius } => {
                let r = (x - Vec2::from(center)).norm();
                r > inner_radius && r < outer_radius
            }
            Geometry::DemiDisk { center, radius } => (x - Vec2::from(center)).norm() < radius && x.y < center[1],
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        match *self {
            Geometry::Bar { start, end } => (Vec2::new(start, 0.0), Vec2::new(end, 0.0)),
            Geometry::Rectangle { min, max } => (Vec2::from(min), Vec2::from(max)),
            Geometry::Disk { center, radius } | Geometry::Annulus { center, outer_radius: radius, .. } => {
                let c = Vec2::from(center);
                (c - Vec2::repeat(radius), c + Vec2::repeat(radius))
            }
            Geometry::DemiDisk { center, radius } => {
                let c = Vec2::from(center);
                (c - Vec2::repeat(radius), Vec2::new(c.x + radius, c.y))
            }
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        let ok = match *self {
            Geometry::Bar { start, end } => end > start,
            Geometry::Rectangle { min, max } => max[0] > min[0] && max[1] > min[1],
            Geometry::Disk { radius, .. } | Geometry::DemiDisk { radius, .. } => radius > 0.0,
            Geometry::Annulus { inner_radius, outer_radius, .. } => inner_radius >= 0.0 && outer_radius > inner_radius,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("degenerate geometry {self:?}"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    /// Bulk points per grid cell (a perfect square in 2D).
    pub points_per_cell: usize,
    /// Requested number of boundary segments; ignored for bars (two end points).
    pub boundary_segments: usize,
    /// Angle of the first boundary point on circular outlines, in degrees.
    #[serde(default)]
    pub chain_start_angle_deg: f64,
}

/// Gauss-Legendre abscissae on `[-1, 1]` in increasing order, with their weights.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = -(PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p;
            (p, dp) = if n == 1 { (x, 1.0) } else { (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0)) };
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

fn points_per_axis(dim: usize, per_cell: usize) -> Result<usize> {
    if per_cell == 0 {
        return Err(MpmError::Config("points_per_cell must be positive".into()));
    }
    if dim == 1 {
        return Ok(per_cell);
    }
    let k = (per_cell as f64).sqrt().round() as usize;
    if k * k != per_cell {
        return Err(MpmError::Config(format!("points_per_cell must be a perfect square in 2D, got {per_cell}")));
    }
    Ok(k)
}

/// Places bulk and boundary points for one field.
///
/// Bulk points come first, at cell Gauss positions with volumes proportional
/// to the Gauss weights and summing to the region measure;
/// boundary points follow in chain order and share an extra 0.1% of the area
/// and mass. Point ids start at `first_id`. Rigid fields get boundary points only.
pub fn seed_field(
    grid: &EulerianGrid,
    geometry: &Geometry,
    spec: &SeedSpec,
    field: usize,
    first_id: usize,
    density: f64,
    rigid: bool,
) -> Result<(Vec<MaterialPoint>, BoundaryChain)> {
    geometry.validate().map_err(MpmError::Config)?;
    if geometry.dim() != grid.dim() {
        return Err(MpmError::Config(format!(
            "geometry {geometry:?} is {}D but the grid is {}D",
            geometry.dim(),
            grid.dim()
        )));
    }
    let k = points_per_axis(grid.dim(), spec.points_per_cell)?;
    let gauss: Vec<(f64, f64)> = gauss_legendre(k).into_iter().map(|(g, w)| (0.5 * (g + 1.0), 0.5 * w)).collect();
    let measure = geometry.measure();

    let bulk = if rigid { Vec::new() } else { bulk_positions(grid, geometry, &gauss) };
    if !rigid && bulk.is_empty() {
        return Err(MpmError::Config(format!("geometry {geometry:?} contains no seeding positions")));
    }
    let outline = outline_positions(geometry, spec);

    let mut points = Vec::with_capacity(bulk.len() + outline.len());
    let total: f64 = bulk.iter().map(|(_, w)| w).sum();
    for (x, w) in bulk {
        let omega = measure * w / total;
        points.push(MaterialPoint::new(x, density * omega, omega, field, false));
    }
    let omega_b = BOUNDARY_SHARE * measure / outline.len() as f64;
    let mut chain = BoundaryChain { points: Vec::with_capacity(outline.len()), closed: grid.dim() == 2 };
    for x in outline {
        chain.points.push(first_id + points.len());
        points.push(MaterialPoint::new(x, density * omega_b, omega_b, field, true));
    }
    Ok((points, chain))
}

/// Quadrature positions with their relative weights.
fn bulk_positions(grid: &EulerianGrid, geometry: &Geometry, gauss: &[(f64, f64)]) -> Vec<(Vec2, f64)> {
    let h = grid.spacing();
    let mut out = Vec::new();
    match *geometry {
        Geometry::Bar { start, end } => {
            let n = ((end - start) / h).round().max(1.0) as usize;
            let d = (end - start) / n as f64;
            for i in 0..n {
                for &(g, w) in gauss {
                    out.push((Vec2::new(start + (i as f64 + g) * d, 0.0), w));
                }
            }
        }
        Geometry::Rectangle { min, max } => {
            let nx = ((max[0] - min[0]) / h).round().max(1.0) as usize;
            let ny = ((max[1] - min[1]) / h).round().max(1.0) as usize;
            let dx = (max[0] - min[0]) / nx as f64;
            let dy = (max[1] - min[1]) / ny as f64;
            for j in 0..ny {
                for &(gy, wy) in gauss {
                    for i in 0..nx {
                        for &(gx, wx) in gauss {
                            out.push((
                                Vec2::new(min[0] + (i as f64 + gx) * dx, min[1] + (j as f64 + gy) * dy),
                                wx * wy,
                            ));
                        }
                    }
                }
            }
        }
        _ => {
            let (lo, hi) = geometry.bounds();
            let x0 = grid.x_min();
            let [cx, cy] = grid.cell_counts();
            let first = |v: f64, o: f64, n: usize| (((v - o) / h).floor().max(0.0) as usize).min(n - 1);
            for j in first(lo.y, x0.y, cy)..=first(hi.y, x0.y, cy) {
                for &(gy, wy) in gauss {
                    for i in first(lo.x, x0.x, cx)..=first(hi.x, x0.x, cx) {
                        for &(gx, wx) in gauss {
                            let x = x0 + Vec2::new((i as f64 + gx) * h, (j as f64 + gy) * h);
                            if geometry.contains(x) {
                                out.push((x, wx * wy));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn circle(center: Vec2, radius: f64, n: usize, start_deg: f64) -> Vec<Vec2> {
    let t0 = start_deg.to_radians();
    (0..n)
        .map(|k| {
            let t = t0 + 2.0 * PI * k as f64 / n as f64;
            center + radius * Vec2::new(t.cos(), t.sin())
        })
        .collect()
}

fn outline_positions(geometry: &Geometry, spec: &SeedSpec) -> Vec<Vec2> {
    let n = spec.boundary_segments.max(3);
    match *geometry {
        Geometry::Bar { start, end } => vec![Vec2::new(start, 0.0), Vec2::new(end, 0.0)],
        Geometry::Rectangle { min, max } => {
            let corners = [
                Vec2::new(min[0], min[1]),
                Vec2::new(max[0], min[1]),
                Vec2::new(max[0], max[1]),
                Vec2::new(min[0], max[1]),
            ];
            let perimeter = 2.0 * ((max[0] - min[0]) + (max[1] - min[1]));
            let spacing = perimeter / n as f64;
            let mut out = Vec::new();
            for e in 0..4 {
                let (a, b) = (corners[e], corners[(e + 1) % 4]);
                let m = ((b - a).norm() / spacing).round().max(1.0) as usize;
                for i in 0..m {
                    out.push(a + (b - a) * (i as f64 / m as f64));
                }
            }
            out
        }
        Geometry::Disk { center, radius } | Geometry::Annulus { center, outer_radius: radius, .. } => {
            circle(Vec2::from(center), radius, n, spec.chain_start_angle_deg)
        }
        Geometry::DemiDisk { center, radius } => {
            let c = Vec2::from(center);
            let spacing = (PI + 2.0) * radius / n as f64;
            let m_arc = (PI * radius / spacing).round().max(2.0) as usize;
            let m_flat = (2.0 * radius / spacing).round().max(1.0) as usize;
            let mut out = Vec::with_capacity(m_arc + m_flat);
            for i in 0..m_arc {
                let t = PI + PI * i as f64 / m_arc as f64;
                out.push(c + radius * Vec2::new(t.cos(), t.sin()));
            }
            for i in 0..m_flat {
                out.push(Vec2::new(c.x + radius - 2.0 * radius * i as f64 / m_flat as f64, c.y));
            }
            out
        }
    }
}
