use super::grid::EulerianGrid;
use crate::error::Result;
use crate::Vec2;

/// One non-zero basis function evaluated at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisEntry {
    pub node: usize,
    pub value: f64,
    pub grad: Vec2,
}

/// The `3^d` original B-spline entries supporting one point.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    entries: [BasisEntry; 9],
    len: usize,
}

impl Stencil {
    pub fn as_slice(&self) -> &[BasisEntry] {
        &self.entries[..self.len]
    }
}

/// Uniform quadratic B-spline pieces on a knot span with local coordinate `xi`.
///
/// Returns the values and `d/dxi` of the three bases covering the span, ordered
/// from the basis whose support ends on this span to the one starting on it.
#[inline]
pub fn quadratic_pieces(xi: f64) -> ([f64; 3], [f64; 3]) {
    let r = 1.0 - xi;
    ([0.5 * r * r, 0.5 + xi - xi * xi, 0.5 * xi * xi], [-r, 1.0 - 2.0 * xi, xi])
}

/// Original (standard) quadratic B-spline values and gradients at `x`.
pub fn evaluate_obs(grid: &EulerianGrid, x: Vec2) -> Result<Vec<BasisEntry>> {
    Ok(obs_stencil(grid, x)?.as_slice().to_vec())
}

#[inline]
pub fn obs_stencil(grid: &EulerianGrid, x: Vec2) -> Result<Stencil> {
    let ([cx, cy], [xi, eta]) = grid.locate(x)?;
    let inv_h = 1.0 / grid.spacing();
    let (nx, dnx) = quadratic_pieces(xi);
    let mut st = Stencil { entries: [BasisEntry { node: 0, value: 0.0, grad: Vec2::zeros() }; 9], len: 0 };
    if grid.dim() == 1 {
        for i in 0..3 {
            st.entries[i] =
                BasisEntry { node: grid.node_id(cx + i, 0), value: nx[i], grad: Vec2::new(dnx[i] * inv_h, 0.0) };
        }
        st.len = 3;
    } else {
        let (ny, dny) = quadratic_pieces(eta);
        let mut k = 0;
        for j in 0..3 {
            for i in 0..3 {
                st.entries[k] = BasisEntry {
                    node: grid.node_id(cx + i, cy + j),
                    value: nx[i] * ny[j],
                    grad: Vec2::new(dnx[i] * ny[j] * inv_h, nx[i] * dny[j] * inv_h),
                };
                k += 1;
            }
        }
        st.len = 9;
    }
    Ok(st)
}
