//! Extended B-splines: per-step cell and basis classification, Lagrange
//! extrapolation weights and the extended shape functions built from them.

use super::bspline::{obs_stencil, BasisEntry};
use super::grid::EulerianGrid;
use crate::error::{MpmError, Result};
use crate::Vec2;

/// Polynomial degree of the basis. Only quadratic is supported.
pub const DEGREE: usize = 2;

/// Ordering key of a candidate extrapolation block: Chebyshev distance, squared
/// distance to the node, squared distance to the block centre, then index.
type BlockRank = (i64, i64, i64, usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellLabel {
    Exterior,
    Boundary,
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellClass {
    pub fraction: Vec<f64>,
    pub label: Vec<CellLabel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisLabel {
    Stable,
    Degenerated,
    Exterior,
}

impl BasisLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisLabel::Stable => "stable",
            BasisLabel::Degenerated => "degenerated",
            BasisLabel::Exterior => "exterior",
        }
    }
}

/// Extrapolation data for one degenerated node `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extension {
    pub node: usize,
    /// Lower corner `kappa` of the stable block `kappa + [0, q]^d`.
    pub block_start: [usize; 2],
    partners: [usize; 9],
    weights: [f64; 9],
    len: usize,
}

impl Extension {
    /// Stable partner nodes `I` and weights `E_IJ`.
    pub fn partners(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.partners[..self.len].iter().copied().zip(self.weights[..self.len].iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisClass {
    labels: Vec<BasisLabel>,
    extension_of: Vec<u32>,
    extensions: Vec<Extension>,
}

const NO_EXTENSION: u32 = u32::MAX;

impl BasisClass {
    pub fn label(&self, node: usize) -> BasisLabel {
        self.labels[node]
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn extension(&self, node: usize) -> Option<&Extension> {
        match self.extension_of[node] {
            NO_EXTENSION => None,
            k => Some(&self.extensions[k as usize]),
        }
    }

    pub fn extensions(&self) -> &[Extension] {
        &self.extensions
    }

    pub fn degenerated_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.extensions.iter().map(|e| e.node)
    }
}

/// Volume fraction of every cell and its interior/boundary/exterior label.
///
/// `points` yields `(position, current volume)` pairs of one discrete field.
pub fn classify_cells<I>(grid: &EulerianGrid, points: I, occupation: f64) -> Result<CellClass>
where
    I: IntoIterator<Item = (Vec2, f64)>,
{
    if !(occupation > 0.0 && occupation <= 1.0) {
        return Err(MpmError::Config(format!("occupation parameter must lie in (0, 1], got {occupation}")));
    }
    let mut volume = vec![0.0; grid.num_cells()];
    for (x, omega) in points {
        volume[grid.cell_of(x)?] += omega;
    }
    let inv = 1.0 / grid.cell_volume();
    let fraction: Vec<f64> = volume.into_iter().map(|v| v * inv).collect();
    let label = fraction
        .iter()
        .map(|&phi| {
            if phi > occupation {
                CellLabel::Interior
            } else if phi > 0.0 {
                CellLabel::Boundary
            } else {
                CellLabel::Exterior
            }
        })
        .collect();
    Ok(CellClass { fraction, label })
}

/// Values of the quadratic Lagrange polynomials on nodes `{0, 1, 2}` at `offset`.
pub fn lagrange_weights_1d(offset: i64) -> [f64; 3] {
    let t = offset as f64;
    let mut w = [0.0; 3];
    for (i, wi) in w.iter_mut().enumerate() {
        let mut acc = 1.0;
        for chi in 0..=DEGREE {
            if chi != i {
                acc *= (t - chi as f64) / (i as f64 - chi as f64);
            }
        }
        *wi = acc;
    }
    w
}

/// Tensor-product weights `E_IJ` for node `j` extrapolated from the block starting at `kappa`.
///
/// The result is ordered with the first axis varying fastest (`3^dim` values).
pub fn extrapolation_weights(dim: usize, j: [usize; 2], kappa: [usize; 2]) -> Vec<f64> {
    let wx = lagrange_weights_1d(j[0] as i64 - kappa[0] as i64);
    if dim == 1 {
        return wx.to_vec();
    }
    let wy = lagrange_weights_1d(j[1] as i64 - kappa[1] as i64);
    let mut out = Vec::with_capacity(9);
    for b in wy {
        for a in wx {
            out.push(a * b);
        }
    }
    out
}

/// Labels every basis and selects the extrapolation block of each degenerated one.
pub fn classify_bases(grid: &EulerianGrid, cells: &CellClass) -> Result<BasisClass> {
    let [nx, ny] = grid.node_counts();
    let mut labels = vec![BasisLabel::Exterior; nx * ny];
    let mut degenerated = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let mut any_interior = false;
            let mut any_boundary = false;
            for cy in grid.support_cells(1, iy) {
                for cx in grid.support_cells(0, ix) {
                    match cells.label[grid.cell_id(cx, cy)] {
                        CellLabel::Interior => any_interior = true,
                        CellLabel::Boundary => any_boundary = true,
                        CellLabel::Exterior => {}
                    }
                }
            }
            let id = grid.node_id(ix, iy);
            labels[id] = if any_interior {
                BasisLabel::Stable
            } else if any_boundary {
                degenerated.push(id);
                BasisLabel::Degenerated
            } else {
                BasisLabel::Exterior
            };
        }
    }

    let mut extension_of = vec![NO_EXTENSION; nx * ny];
    let mut extensions = Vec::with_capacity(degenerated.len());
    if !degenerated.is_empty() {
        let blocks = StableBlocks::new(grid, &labels);
        for j in degenerated {
            let jj = grid.node_index(j);
            let kappa = blocks.nearest(jj).ok_or(MpmError::DomainTooThin { node: j })?;
            let w = extrapolation_weights(grid.dim(), jj, kappa);
            let mut ext = Extension { node: j, block_start: kappa, partners: [0; 9], weights: [0.0; 9], len: w.len() };
            let span_y = if grid.dim() == 2 { 3 } else { 1 };
            let mut k = 0;
            for b in 0..span_y {
                for a in 0..3 {
                    ext.partners[k] = grid.node_id(kappa[0] + a, kappa[1] + b);
                    ext.weights[k] = w[k];
                    k += 1;
                }
            }
            extension_of[j] = extensions.len() as u32;
            extensions.push(ext);
        }
    }
    Ok(BasisClass { labels, extension_of, extensions })
}

/// Lookup of `(q+1)^d` blocks made only of stable nodes.
struct StableBlocks {
    dim: usize,
    counts: [usize; 2],
    valid: Vec<bool>,
}

impl StableBlocks {
    fn new(grid: &EulerianGrid, labels: &[BasisLabel]) -> Self {
        let dim = grid.dim();
        let [nx, ny] = grid.node_counts();
        let bx = nx.saturating_sub(DEGREE);
        let by = if dim == 2 { ny.saturating_sub(DEGREE) } else { 1 };
        let stable = |ix: usize, iy: usize| labels[grid.node_id(ix, iy)] == BasisLabel::Stable;
        let mut valid = vec![false; bx * by];
        for ky in 0..by {
            for kx in 0..bx {
                let rows = if dim == 2 { 3 } else { 1 };
                valid[kx + ky * bx] = (0..rows).all(|b| (0..3).all(|a| stable(kx + a, ky + b)));
            }
        }
        Self { dim, counts: [bx, by], valid }
    }

    /// Nearest valid block by Chebyshev node distance, then squared distance,
    /// then squared distance of the block centre, then lowest index.
    fn nearest(&self, j: [usize; 2]) -> Option<[usize; 2]> {
        let [bx, by] = self.counts;
        if bx == 0 || by == 0 {
            return None;
        }
        let max_r = bx.max(by) + 3;
        let axis_dist = |k: usize, j: usize| -> i64 {
            let (k, j) = (k as i64, j as i64);
            (k - j).max(j - (k + DEGREE as i64)).max(0)
        };
        for r in 0..=max_r {
            let range = |axis: usize, n: usize| {
                let lo = j[axis].saturating_sub(DEGREE + r);
                let hi = (j[axis] + r).min(n - 1);
                lo..=hi
            };
            let ys = if self.dim == 2 { range(1, by) } else { 0..=0 };
            let mut best: Option<(BlockRank, [usize; 2])> = None;
            for ky in ys {
                for kx in range(0, bx) {
                    if !self.valid[kx + ky * bx] {
                        continue;
                    }
                    let dx = axis_dist(kx, j[0]);
                    let dy = if self.dim == 2 { axis_dist(ky, j[1]) } else { 0 };
                    let cx = kx as i64 + 1 - j[0] as i64;
                    let cy = if self.dim == 2 { ky as i64 + 1 - j[1] as i64 } else { 0 };
                    let key = (dx.max(dy), dx * dx + dy * dy, cx * cx + cy * cy, ky, kx);
                    if best.as_ref().is_none_or(|(b, _)| key < *b) {
                        best = Some((key, [kx, ky]));
                    }
                }
            }
            if let Some((key, kappa)) = best {
                if key.0 as usize <= r {
                    return Some(kappa);
                }
            }
        }
        None
    }
}

/// Extended B-spline values and gradients at `x`, keyed by stable nodes only.
pub fn evaluate_ebs(grid: &EulerianGrid, class: &BasisClass, x: Vec2) -> Result<Vec<BasisEntry>> {
    let mut out = Vec::with_capacity(16);
    ebs_entries_into(grid, class, x, &mut out)?;
    Ok(out)
}

/// Appends the extended entries at `x` to `out`.
pub fn ebs_entries_into(grid: &EulerianGrid, class: &BasisClass, x: Vec2, out: &mut Vec<BasisEntry>) -> Result<()> {
    let start = out.len();
    let stencil = obs_stencil(grid, x)?;
    for e in stencil.as_slice() {
        match class.labels[e.node] {
            BasisLabel::Stable => accumulate(out, start, e.node, e.value, e.grad),
            BasisLabel::Degenerated => {
                let ext = &class.extensions[class.extension_of[e.node] as usize];
                for (i, w) in ext.partners() {
                    accumulate(out, start, i, e.value * w, e.grad * w);
                }
            }
            BasisLabel::Exterior => {}
        }
    }
    Ok(())
}

#[inline]
fn accumulate(out: &mut Vec<BasisEntry>, start: usize, node: usize, value: f64, grad: Vec2) {
    if let Some(slot) = out[start..].iter_mut().find(|b| b.node == node) {
        slot.value += value;
        slot.grad += grad;
    } else {
        out.push(BasisEntry { node, value, grad });
    }
}
