//! Background grid, quadratic B-splines and their extended (EBS) variant.

mod bspline;
mod ebs;
mod grid;

pub use bspline::{evaluate_obs, obs_stencil, quadratic_pieces, BasisEntry, Stencil};
pub use ebs::{
    classify_bases, classify_cells, ebs_entries_into, evaluate_ebs, extrapolation_weights, lagrange_weights_1d,
    BasisClass, BasisLabel, CellClass, CellLabel, Extension,
};
pub use grid::EulerianGrid;

use crate::error::{MpmError, Result};
use crate::Vec2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Obs,
    #[default]
    Ebs,
}

impl std::str::FromStr for BasisKind {
    type Err = MpmError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obs" => Ok(BasisKind::Obs),
            "ebs" => Ok(BasisKind::Ebs),
            other => Err(MpmError::Config(format!("unknown basis '{other}', expected obs or ebs"))),
        }
    }
}

/// Shape function values and gradients for a list of points, in CSR layout.
#[derive(Debug, Clone, Default)]
pub struct BasisTable {
    offsets: Vec<usize>,
    entries: Vec<BasisEntry>,
}

impl BasisTable {
    /// Evaluates the basis at every position. `class` must be provided for EBS.
    pub fn build<I>(grid: &EulerianGrid, class: Option<&BasisClass>, positions: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec2>,
    {
        let mut table = BasisTable { offsets: vec![0], entries: Vec::new() };
        for (p, x) in positions.into_iter().enumerate() {
            match class {
                Some(c) => ebs_entries_into(grid, c, x, &mut table.entries),
                None => obs_stencil(grid, x).map(|s| table.entries.extend_from_slice(s.as_slice())),
            }
            .map_err(|e| e.for_point(p))?;
            table.offsets.push(table.entries.len());
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn row(&self, p: usize) -> &[BasisEntry] {
        &self.entries[self.offsets[p]..self.offsets[p + 1]]
    }
}
