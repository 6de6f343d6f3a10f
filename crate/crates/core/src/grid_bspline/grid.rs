use crate::error::{MpmError, Result};
use crate::Vec2;

/// Uniform structured background grid in one or two dimensions.
///
/// Cells are the knot spans of a uniform quadratic B-spline space. The basis
/// attached to node `i` covers cells `i-2..=i` along each axis, so there are
/// `cells + 2` nodes per active axis and node `i` sits at the centre of cell
/// `i-1` (the Greville abscissa). Node and cell ids are row-major with `x`
/// varying fastest. In 1D the `y` axis carries a single node and cell.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerianGrid {
    dim: usize,
    x_min: Vec2,
    x_max: Vec2,
    spacing: f64,
    cells: [usize; 2],
}

impl EulerianGrid {
    pub fn new(dim: usize, x_min: Vec2, x_max: Vec2, spacing: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(MpmError::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(MpmError::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        let mut cells = [1usize; 2];
        for axis in 0..dim {
            let extent = x_max[axis] - x_min[axis];
            if !(extent > 0.0) {
                return Err(MpmError::InvalidGrid(format!("x_max must exceed x_min along axis {axis}")));
            }
            let n = (extent / spacing).round();
            if n < 1.0 || ((n * spacing - extent).abs() > 1e-9 * extent.max(spacing)) {
                return Err(MpmError::InvalidGrid(format!(
                    "extent {extent} along axis {axis} is not an integer multiple of spacing {spacing}"
                )));
            }
            cells[axis] = n as usize;
        }
        let (x_min, x_max) = if dim == 1 { (Vec2::new(x_min.x, 0.0), Vec2::new(x_max.x, 0.0)) } else { (x_min, x_max) };
        Ok(Self { dim, x_min, x_max, spacing, cells })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn x_min(&self) -> Vec2 {
        self.x_min
    }

    pub fn x_max(&self) -> Vec2 {
        self.x_max
    }

    pub fn cell_counts(&self) -> [usize; 2] {
        self.cells
    }

    pub fn node_counts(&self) -> [usize; 2] {
        let ny = if self.dim == 2 { self.cells[1] + 2 } else { 1 };
        [self.cells[0] + 2, ny]
    }

    pub fn num_nodes(&self) -> usize {
        let [nx, ny] = self.node_counts();
        nx * ny
    }

    pub fn num_cells(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    /// Cell measure: length in 1D (unit cross-section), area in 2D (unit thickness).
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    #[inline]
    pub fn node_id(&self, ix: usize, iy: usize) -> usize {
        ix + iy * self.node_counts()[0]
    }

    #[inline]
    pub fn node_index(&self, id: usize) -> [usize; 2] {
        let nx = self.node_counts()[0];
        [id % nx, id / nx]
    }

    #[inline]
    pub fn cell_id(&self, cx: usize, cy: usize) -> usize {
        cx + cy * self.cells[0]
    }

    #[inline]
    pub fn cell_index(&self, id: usize) -> [usize; 2] {
        [id % self.cells[0], id / self.cells[0]]
    }

    pub fn node_position(&self, id: usize) -> Vec2 {
        let [ix, iy] = self.node_index(id);
        let x = self.x_min.x + (ix as f64 - 0.5) * self.spacing;
        let y = if self.dim == 2 { self.x_min.y + (iy as f64 - 0.5) * self.spacing } else { 0.0 };
        Vec2::new(x, y)
    }

    pub fn contains(&self, x: Vec2) -> bool {
        let tol = 1e-12 * self.spacing;
        (0..self.dim).all(|a| x[a] >= self.x_min[a] - tol && x[a] <= self.x_max[a] + tol)
    }

    /// Parent cell and local parametric coordinates in `[0, 1]` along each axis.
    #[inline]
    pub fn locate(&self, x: Vec2) -> Result<([usize; 2], [f64; 2])> {
        if !x.iter().all(|c| c.is_finite()) || !self.contains(x) {
            return Err(MpmError::out_of_domain(x));
        }
        let mut cell = [0usize; 2];
        let mut local = [0.0f64; 2];
        for a in 0..self.dim {
            let s = (x[a] - self.x_min[a]) / self.spacing;
            let c = (s.floor().max(0.0) as usize).min(self.cells[a] - 1);
            cell[a] = c;
            local[a] = (s - c as f64).clamp(0.0, 1.0);
        }
        Ok((cell, local))
    }

    pub fn cell_of(&self, x: Vec2) -> Result<usize> {
        let ([cx, cy], _) = self.locate(x)?;
        Ok(self.cell_id(cx, cy))
    }

    /// Inclusive range of cells supported by the basis of node index `i` along `axis`.
    pub fn support_cells(&self, axis: usize, i: usize) -> std::ops::RangeInclusive<usize> {
        if axis == 1 && self.dim == 1 {
            return 0..=0;
        }
        let lo = i.saturating_sub(2);
        let hi = i.min(self.cells[axis] - 1);
        lo..=hi
    }
}
