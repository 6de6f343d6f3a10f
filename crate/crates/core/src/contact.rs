//! Node-to-segment penalty contact between discrete fields: boundary tracking,
//! gap and slip functions, Coulomb-limited penalty forces and their projection
//! onto the grid.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{MpmError, Result};
use crate::grid_bspline::{obs_stencil, BasisTable, EulerianGrid};
use crate::state::{DiscreteField, FieldNodalState, MaterialPoint};
use crate::Vec2;

/// Shortest admissible master segment.
pub const MIN_SEGMENT_LENGTH: f64 = 1e-12;

/// Penalty law between one master and one slave field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactLaw {
    pub master: usize,
    pub slave: usize,
    /// Normal penalty, N/m^3.
    pub penalty_normal: f64,
    /// Tangential penalty, N/m^3.
    pub penalty_tangent: f64,
    pub friction: f64,
}

/// Projection of a slave point onto a master segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentProjection {
    pub beta: f64,
    pub gap: f64,
    pub normal: Vec2,
    pub tangent: Vec2,
    pub length: f64,
}

/// Natural coordinate and signed normal gap of `xs` against the segment `x1 -> x2`.
///
/// The normal is the tangent turned clockwise, which points outward for a
/// counter-clockwise chain.
pub fn project_onto_segment(xs: Vec2, x1: Vec2, x2: Vec2) -> std::result::Result<SegmentProjection, f64> {
    let d = x2 - x1;
    let length = d.norm();
    if !(length >= MIN_SEGMENT_LENGTH) {
        return Err(length);
    }
    let tangent = d / length;
    let normal = Vec2::new(tangent.y, -tangent.x);
    let beta = (xs - x1).dot(&tangent) / length;
    let projected = x1 + d * beta;
    Ok(SegmentProjection { beta, gap: (xs - projected).dot(&normal), normal, tangent, length })
}

/// Tangential slip accumulated over one step.
pub fn slip(beta: f64, beta_prev: f64, length_prev: f64) -> f64 {
    length_prev * (beta - beta_prev)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPair {
    pub law: usize,
    pub slave: usize,
    /// Master segment endpoints. Both equal the facet point in 1D.
    pub master: [usize; 2],
    pub gap_normal: f64,
    pub gap_tangent: f64,
    pub beta: f64,
    pub beta_prev: f64,
    pub normal: Vec2,
    pub tangent: Vec2,
    pub length: f64,
    pub length_prev: f64,
    /// Boundary measure represented by the slave point: tributary length in 2D,
    /// unit cross-section in 1D.
    pub weight: f64,
    /// True for 1D point facets, which carry no tangential component.
    pub point_facet: bool,
}

/// Previous-step `(beta, segment length)` keyed by `(law, slave, first master point)`.
pub type SlipHistory = BTreeMap<(usize, usize, usize), (f64, f64)>;

/// Replaces the history with the state of the currently active pairs.
pub fn update_history(history: &mut SlipHistory, pairs: &[ContactPair]) {
    history.clear();
    for p in pairs.iter().filter(|p| !p.point_facet) {
        history.insert((p.law, p.slave, p.master[0]), (p.beta, p.length));
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairForce {
    pub slave: Vec2,
    pub master: [Vec2; 2],
    pub normal: f64,
    pub tangential: f64,
    pub stick: bool,
}

/// Penalty force vector acting on the slave point and both master endpoints.
pub fn penalty_forces(pair: &ContactPair, law: &ContactLaw) -> Result<PairForce> {
    if !(pair.gap_normal < 0.0) {
        return Err(MpmError::ContractViolation(format!(
            "penalty force requested for inactive pair (slave {}, gap {})",
            pair.slave, pair.gap_normal
        )));
    }
    let f_nor = law.penalty_normal * pair.gap_normal;
    let n = pair.normal;
    if pair.point_facet {
        let f = -f_nor * n * pair.weight;
        return Ok(PairForce { slave: f, master: [-f, Vec2::zeros()], normal: f_nor, tangential: 0.0, stick: true });
    }
    let trial = law.penalty_tangent * pair.gap_tangent.abs();
    let cap = law.friction * f_nor.abs();
    let f_tan = trial.min(cap) * sign(-pair.gap_tangent);
    let (b, tl) = (pair.beta, pair.gap_tangent / pair.length);
    let t = pair.tangent;
    // C_nor = -N is the exact variation of the gap; a g/l P correction here
    // does net work on a closed path and drives a slow contact instability.
    // C_tan = T - s/l Q
    let c_nor = [-n, n * (1.0 - b), n * b];
    let c_tan = [t, -t * (1.0 - b) + t * tl, -t * b - t * tl];
    let w = pair.weight;
    let row = |k: usize| (c_nor[k] * f_nor + c_tan[k] * f_tan) * w;
    Ok(PairForce { slave: row(0), master: [row(1), row(2)], normal: f_nor, tangential: f_tan, stick: trial < cap })
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Inputs of boundary tracking for one contact law.
pub struct Tracking<'a> {
    pub grid: &'a EulerianGrid,
    pub points: &'a [MaterialPoint],
    pub master: &'a DiscreteField,
    pub slave: &'a DiscreteField,
    /// Nodal volumes of each field; `None` for rigid fields, which skip the shared-node test.
    pub master_volume: Option<&'a [f64]>,
    pub slave_volume: Option<&'a [f64]>,
}

/// Three-step boundary tracking: shared grid support, proximity within one
/// cell, then projection and penetration. Each slave point keeps at most the
/// deepest penetrated segment.
pub fn detect_pairs(law_id: usize, t: &Tracking<'_>, history: &SlipHistory) -> Result<Vec<ContactPair>> {
    let h = t.grid.spacing();
    let mut pairs = Vec::new();
    let mchain = &t.master.chain;
    let schain = &t.slave.chain;
    for (k, &s) in schain.points.iter().enumerate() {
        let xs = t.points[s].position;
        if !shares_support(t, xs)? {
            continue;
        }
        let weight = if t.grid.dim() == 1 { 1.0 } else { schain.tributary_length(k, t.points) };
        let mut best: Option<ContactPair> = None;
        if t.grid.dim() == 1 {
            let last = mchain.len().saturating_sub(1);
            for (j, &m) in mchain.points.iter().enumerate() {
                let n = if j == 0 {
                    Vec2::new(-1.0, 0.0)
                } else if j == last {
                    Vec2::new(1.0, 0.0)
                } else {
                    continue;
                };
                let xm = t.points[m].position;
                if (xs - xm).norm() >= h {
                    continue;
                }
                let gap = (xs - xm).dot(&n);
                if gap < 0.0 && best.as_ref().is_none_or(|b| gap < b.gap_normal) {
                    best = Some(ContactPair {
                        law: law_id,
                        slave: s,
                        master: [m, m],
                        gap_normal: gap,
                        gap_tangent: 0.0,
                        beta: 0.0,
                        beta_prev: 0.0,
                        normal: n,
                        tangent: Vec2::zeros(),
                        length: 0.0,
                        length_prev: 0.0,
                        weight,
                        point_facet: true,
                    });
                }
            }
        } else {
            for (a, b) in mchain.segments() {
                let (x1, x2) = (t.points[a].position, t.points[b].position);
                if (xs - x1).norm() >= h && (xs - x2).norm() >= h {
                    continue;
                }
                let proj =
                    project_onto_segment(xs, x1, x2).map_err(|length| MpmError::DegenerateSegment { a, b, length })?;
                if !(proj.beta > 0.0 && proj.beta < 1.0 && proj.gap < 0.0) {
                    continue;
                }
                if best.as_ref().is_some_and(|p| proj.gap >= p.gap_normal) {
                    continue;
                }
                let (beta_prev, length_prev) =
                    history.get(&(law_id, s, a)).copied().unwrap_or((proj.beta, proj.length));
                best = Some(ContactPair {
                    law: law_id,
                    slave: s,
                    master: [a, b],
                    gap_normal: proj.gap,
                    gap_tangent: slip(proj.beta, beta_prev, length_prev),
                    beta: proj.beta,
                    beta_prev,
                    normal: proj.normal,
                    tangent: proj.tangent,
                    length: proj.length,
                    length_prev,
                    weight,
                    point_facet: false,
                });
            }
        }
        pairs.extend(best);
    }
    Ok(pairs)
}

fn shares_support(t: &Tracking<'_>, xs: Vec2) -> Result<bool> {
    let (Some(mv), Some(sv)) = (t.master_volume, t.slave_volume) else {
        return Ok(true);
    };
    let st = obs_stencil(t.grid, xs)?;
    Ok(st.as_slice().iter().any(|e| mv[e.node] > 0.0 && sv[e.node] > 0.0))
}

/// Spreads a point force onto the nodes of one basis row.
pub fn project_point_force(row: &[crate::grid_bspline::BasisEntry], force: Vec2, nodal: &mut [Vec2]) {
    for e in row {
        nodal[e.node] += force * e.value;
    }
}

/// Adds every pair force to the contact accumulators of the owning fields.
///
/// `tables[f]` holds the basis rows of field `f` indexed from the field's first
/// point; rigid fields have no table and their reactions are dropped.
pub fn project_contact_forces(
    pairs: &[ContactPair],
    forces: &[PairForce],
    laws: &[ContactLaw],
    fields: &[DiscreteField],
    tables: &[Option<BasisTable>],
    nodal: &mut [FieldNodalState],
) {
    for (pair, f) in pairs.iter().zip(forces) {
        let law = &laws[pair.law];
        let mut apply = |field: usize, pid: usize, force: Vec2| {
            if let Some(table) = &tables[field] {
                let row = table.row(pid - fields[field].points.start);
                project_point_force(row, force, &mut nodal[field].contact_force);
            }
        };
        apply(law.slave, pair.slave, f.slave);
        apply(law.master, pair.master[0], f.master[0]);
        apply(law.master, pair.master[1], f.master[1]);
    }
}
