//! Explicit momentum-form MPM stepper with MUSL double mapping and PIC velocities.

use serde::{Deserialize, Serialize};

use crate::contact::{
    detect_pairs, penalty_forces, project_contact_forces, update_history, ContactLaw, ContactPair, PairForce,
    SlipHistory, Tracking,
};
use crate::error::{MpmError, Result};
use crate::grid_bspline::{
    classify_bases, classify_cells, obs_stencil, BasisClass, BasisKind, BasisTable, EulerianGrid,
};
use crate::materials::{LinearMode, Material};
use crate::state::{total_energies, DiscreteField, Energies, FieldNodalState, MaterialPoint};
use crate::{Mat2, Vec2};

/// Ratio of the time step to the critical one used when none is given.
pub const CFL_FACTOR: f64 = 0.1;

/// Relative nodal mass below which a node's velocity is not evaluated.
pub const MASS_THRESHOLD: f64 = 1e-12;

/// Critical time step `h / c0` for the stiffest deformable field.
pub fn critical_time_step(spacing: f64, fields: &[DiscreteField]) -> f64 {
    let c = fields.iter().filter(|f| !f.rigid).map(|f| f.material.wave_speed(f.density)).fold(0.0, f64::max);
    spacing / c
}

/// Penalty parameters `E / h` from the stiffer of the two bodies.
pub fn penalty_defaults(spacing: f64, e_master: f64, e_slave: f64) -> (f64, f64) {
    let w = e_master.max(e_slave) / spacing;
    (w, w)
}

/// Linear ramp factor in `[0, 1]`.
pub fn ramp(time: f64, duration: f64) -> f64 {
    if duration > 0.0 {
        (time / duration).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

/// Axis-aligned box used to select nodes or boundary points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Region {
    pub fn contains(&self, x: Vec2, dim: usize) -> bool {
        (0..dim).all(|a| x[a] >= self.min[a] && x[a] <= self.max[a])
    }
}

/// Fixed grid nodes of one field along the flagged axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletSpec {
    pub field: usize,
    pub region: Region,
    pub axes: [bool; 2],
}

/// Linear spring tying one material point to its initial position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpringSupport {
    pub point: usize,
    /// N/m.
    pub stiffness: f64,
}

/// Traction on the boundary points of one field inside `region`, lumped with
/// the points' tributary lengths (unit cross-section in 1D).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Traction {
    pub field: usize,
    pub region: Region,
    /// Pa.
    pub value: [f64; 2],
    #[serde(default)]
    pub ramp_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub occupation: f64,
    pub basis: BasisKind,
    pub gravity: Vec2,
    /// Duration of the linear ramp shared by gravity and body accelerations.
    pub gravity_ramp: f64,
    /// Extra acceleration per field, indexed by field id; missing entries are zero.
    pub body_acceleration: Vec<Vec2>,
}

/// Per-step diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSummary {
    pub step: usize,
    pub time: f64,
    pub energies: Vec<Energies>,
    /// Sum of contact forces acting on slave points.
    pub contact_force: Vec2,
    pub active_pairs: usize,
    pub skipped_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub grid: EulerianGrid,
    pub points: Vec<MaterialPoint>,
    pub fields: Vec<DiscreteField>,
    pub laws: Vec<ContactLaw>,
    pub config: StepConfig,
    pub dirichlet: Vec<DirichletSpec>,
    pub springs: Vec<SpringSupport>,
    pub tractions: Vec<Traction>,
    step: usize,
    time: f64,
    nodal: Vec<FieldNodalState>,
    tables: Vec<Option<BasisTable>>,
    classes: Vec<Option<BasisClass>>,
    constrained: Vec<Vec<[bool; 2]>>,
    loaded: Vec<Vec<(usize, Vec2, f64)>>,
    history: SlipHistory,
    pairs: Vec<ContactPair>,
    pair_forces: Vec<PairForce>,
    skipped_nodes: usize,
}

impl Simulation {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: EulerianGrid,
        points: Vec<MaterialPoint>,
        fields: Vec<DiscreteField>,
        laws: Vec<ContactLaw>,
        config: StepConfig,
        dirichlet: Vec<DirichletSpec>,
        springs: Vec<SpringSupport>,
        tractions: Vec<Traction>,
    ) -> Result<Self> {
        if !(config.occupation > 0.0 && config.occupation <= 1.0) {
            return Err(MpmError::Config(format!(
                "occupation parameter must lie in (0, 1], got {}",
                config.occupation
            )));
        }
        let dt_cr = critical_time_step(grid.spacing(), &fields);
        if !(config.dt > 0.0) || config.dt > CFL_FACTOR * dt_cr * (1.0 + 1e-9) {
            return Err(MpmError::Config(format!(
                "time step {} violates the stability bound {} (0.1 h / c0)",
                config.dt,
                CFL_FACTOR * dt_cr
            )));
        }
        for (i, f) in fields.iter().enumerate() {
            if f.id != i || f.points.end > points.len() {
                return Err(MpmError::Config(format!("field {i} is inconsistent with the point list")));
            }
        }
        for law in &laws {
            if law.master >= fields.len() || law.slave >= fields.len() || law.master == law.slave {
                return Err(MpmError::Config(format!("contact law {law:?} references invalid fields")));
            }
        }
        let n = grid.num_nodes();
        let mut constrained = vec![vec![[false; 2]; n]; fields.len()];
        for d in &dirichlet {
            let c = constrained
                .get_mut(d.field)
                .ok_or_else(|| MpmError::Config(format!("Dirichlet condition on unknown field {}", d.field)))?;
            for (node, flags) in c.iter_mut().enumerate() {
                if d.region.contains(grid.node_position(node), grid.dim()) {
                    flags[0] |= d.axes[0];
                    flags[1] |= d.axes[1] && grid.dim() == 2;
                }
            }
        }
        for s in &springs {
            if s.point >= points.len() || !(s.stiffness > 0.0) {
                return Err(MpmError::Config(format!("invalid spring support {s:?}")));
            }
        }
        let mut loaded = vec![Vec::new(); fields.len()];
        for tr in &tractions {
            let field = fields
                .get(tr.field)
                .ok_or_else(|| MpmError::Config(format!("traction on unknown field {}", tr.field)))?;
            for (k, &p) in field.chain.points.iter().enumerate() {
                if tr.region.contains(points[p].position, grid.dim()) {
                    let w = if grid.dim() == 1 { 1.0 } else { field.chain.tributary_length(k, &points) };
                    loaded[tr.field].push((p, Vec2::from(tr.value) * w, tr.ramp_time));
                }
            }
        }
        let nf = fields.len();
        Ok(Self {
            nodal: vec![FieldNodalState::new(n); nf],
            tables: vec![None; nf],
            classes: vec![None; nf],
            grid,
            points,
            fields,
            laws,
            config,
            dirichlet,
            springs,
            tractions,
            step: 0,
            time: 0.0,
            constrained,
            loaded,
            history: SlipHistory::new(),
            pairs: Vec::new(),
            pair_forces: Vec::new(),
            skipped_nodes: 0,
        })
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn nodal(&self, field: usize) -> &FieldNodalState {
        &self.nodal[field]
    }

    pub fn basis_class(&self, field: usize) -> Option<&BasisClass> {
        self.classes[field].as_ref()
    }

    pub fn pairs(&self) -> &[ContactPair] {
        &self.pairs
    }

    pub fn pair_forces(&self) -> &[PairForce] {
        &self.pair_forces
    }

    /// Sum of the lumped traction forces on `field` at time `t`.
    pub fn applied_traction(&self, field: usize, t: f64) -> Vec2 {
        self.loaded[field].iter().map(|&(_, force, ramp_time)| force * ramp(t, ramp_time)).sum()
    }

    pub fn field_points(&self, field: usize) -> &[MaterialPoint] {
        &self.points[self.fields[field].points.clone()]
    }

    pub fn summary(&self) -> StepSummary {
        let energies = self
            .fields
            .iter()
            .map(|f| total_energies(&self.points[f.points.clone()], &f.material, self.grid.dim()))
            .collect();
        StepSummary {
            step: self.step,
            time: self.time,
            energies,
            contact_force: self.pair_forces.iter().map(|f| f.slave).sum(),
            active_pairs: self.pairs.len(),
            skipped_nodes: self.skipped_nodes,
        }
    }

    /// Runs the configured number of steps, calling `observe` with the
    /// initial state and after every step.
    pub fn run<F>(&mut self, mut observe: F) -> Result<()>
    where
        F: FnMut(&Simulation, &StepSummary) -> Result<()>,
    {
        observe(self, &self.summary())?;
        for _ in 0..self.config.n_steps {
            self.advance()?;
            observe(self, &self.summary())?;
        }
        Ok(())
    }

    /// One full step: classify, map to grid, contact, momentum update, MUSL.
    pub fn advance(&mut self) -> Result<()> {
        let step = self.step;
        self.advance_inner().map_err(|e| e.at_step(step))?;
        self.step += 1;
        self.time += self.config.dt;
        Ok(())
    }

    fn advance_inner(&mut self) -> Result<()> {
        let n = self.grid.num_nodes();
        let dt = self.config.dt;
        let in_contact: Vec<bool> =
            (0..self.fields.len()).map(|f| self.laws.iter().any(|l| l.master == f || l.slave == f)).collect();

        for f in 0..self.fields.len() {
            self.nodal[f].reset(n);
            if self.fields[f].rigid {
                self.tables[f] = None;
                self.classes[f] = None;
                continue;
            }
            self.build_basis(f)?;
            self.p2g(f, in_contact[f])?;
            self.apply_dirichlet_forces(f);
        }

        self.contact()?;

        self.skipped_nodes = 0;
        for f in 0..self.fields.len() {
            if self.fields[f].rigid {
                continue;
            }
            let trial = advance_momentum(&self.nodal[f], dt, &self.constrained[f]);
            self.skipped_nodes += self.musl_update(f, &trial)?;
        }
        Ok(())
    }

    fn build_basis(&mut self, f: usize) -> Result<()> {
        let range = self.fields[f].points.clone();
        let pts = &self.points[range];
        let class = match self.config.basis {
            BasisKind::Ebs => {
                let cells =
                    classify_cells(&self.grid, pts.iter().map(|p| (p.position, p.volume)), self.config.occupation)?;
                Some(classify_bases(&self.grid, &cells)?)
            }
            BasisKind::Obs => None,
        };
        let table = BasisTable::build(&self.grid, class.as_ref(), pts.iter().map(|p| p.position))
            .map_err(|e| offset_point(e, self.fields[f].points.start))?;
        self.tables[f] = Some(table);
        self.classes[f] = class;
        Ok(())
    }

    fn p2g(&mut self, f: usize, with_volume: bool) -> Result<()> {
        let field = &self.fields[f];
        let table = self.tables[f].as_ref().expect("basis built");
        let nodal = &mut self.nodal[f];
        let dim = self.grid.dim();
        let extra = self.config.body_acceleration.get(f).copied().unwrap_or_else(Vec2::zeros);
        let gravity = (self.config.gravity + extra) * ramp(self.time, self.config.gravity_ramp);
        for (local, p) in self.points[field.points.clone()].iter().enumerate() {
            let body = gravity * p.mass;
            for e in table.row(local) {
                nodal.mass[e.node] += e.value * p.mass;
                nodal.momentum[e.node] += p.velocity * (e.value * p.mass);
                nodal.internal_force[e.node] += p.stress * e.grad * p.volume;
                nodal.external_force[e.node] += body * e.value;
            }
            if with_volume {
                for e in obs_stencil(&self.grid, p.position)?.as_slice() {
                    nodal.volume[e.node] += e.value * p.volume;
                }
            }
        }
        if dim == 1 {
            for v in
                nodal.internal_force.iter_mut().chain(nodal.momentum.iter_mut()).chain(nodal.external_force.iter_mut())
            {
                v.y = 0.0;
            }
        }
        for s in self.springs.iter().filter(|s| field.points.contains(&s.point)) {
            let p = &self.points[s.point];
            let force = -p.displacement * s.stiffness;
            for e in table.row(s.point - field.points.start) {
                nodal.external_force[e.node] += force * e.value;
            }
        }
        for &(pid, force, ramp_time) in &self.loaded[f] {
            let scaled = force * ramp(self.time, ramp_time);
            for e in table.row(pid - field.points.start) {
                nodal.external_force[e.node] += scaled * e.value;
            }
        }
        Ok(())
    }

    fn apply_dirichlet_forces(&mut self, f: usize) {
        let nodal = &mut self.nodal[f];
        for (node, flags) in self.constrained[f].iter().enumerate() {
            for a in 0..2 {
                if flags[a] {
                    nodal.momentum[node][a] = 0.0;
                    nodal.internal_force[node][a] = 0.0;
                    nodal.external_force[node][a] = 0.0;
                }
            }
        }
    }

    fn contact(&mut self) -> Result<()> {
        let mut pairs = Vec::new();
        for (id, law) in self.laws.iter().enumerate() {
            let (m, s) = (&self.fields[law.master], &self.fields[law.slave]);
            if m.rigid && s.rigid {
                continue;
            }
            let tracking = Tracking {
                grid: &self.grid,
                points: &self.points,
                master: m,
                slave: s,
                master_volume: (!m.rigid).then(|| self.nodal[law.master].volume.as_slice()),
                slave_volume: (!s.rigid).then(|| self.nodal[law.slave].volume.as_slice()),
            };
            pairs.extend(detect_pairs(id, &tracking, &self.history)?);
        }
        let forces = pairs.iter().map(|p| penalty_forces(p, &self.laws[p.law])).collect::<Result<Vec<_>>>()?;
        project_contact_forces(&pairs, &forces, &self.laws, &self.fields, &self.tables, &mut self.nodal);
        for (f, flags) in self.constrained.iter().enumerate() {
            for (node, fl) in flags.iter().enumerate() {
                for a in 0..2 {
                    if fl[a] {
                        self.nodal[f].contact_force[node][a] = 0.0;
                    }
                }
            }
        }
        update_history(&mut self.history, &pairs);
        self.pairs = pairs;
        self.pair_forces = forces;
        Ok(())
    }

    /// Double mapping update of one field. Returns the number of skipped nodes.
    fn musl_update(&mut self, f: usize, trial: &[Vec2]) -> Result<usize> {
        let dt = self.config.dt;
        let dim = self.grid.dim();
        let range = self.fields[f].points.clone();
        let start = range.start;
        let table = self.tables[f].as_ref().expect("basis built");
        let nodal = &mut self.nodal[f];
        let max_mass = nodal.mass.iter().copied().fold(0.0, f64::max);
        let threshold = MASS_THRESHOLD * max_mass;
        let active: Vec<bool> = nodal.mass.iter().map(|&m| m > threshold).collect();
        let skipped = nodal.mass.iter().zip(&active).filter(|(&m, &a)| m != 0.0 && !a).count();

        let velocity = |p: &[Vec2], i: usize| if active[i] { p[i] / nodal.mass[i] } else { Vec2::zeros() };
        let trial_velocity: Vec<Vec2> = (0..trial.len()).map(|i| velocity(trial, i)).collect();

        let mut remapped = vec![Vec2::zeros(); trial.len()];
        for (local, p) in self.points[range.clone()].iter_mut().enumerate() {
            let row = table.row(local);
            let v: Vec2 = row.iter().map(|e| trial_velocity[e.node] * e.value).sum();
            p.position += v * dt;
            p.velocity = v;
            if dim == 1 {
                p.position.y = 0.0;
                p.velocity.y = 0.0;
            }
            p.displacement = p.position - p.initial_position;
            for e in row {
                remapped[e.node] += p.velocity * (e.value * p.mass);
            }
        }
        for (node, flags) in self.constrained[f].iter().enumerate() {
            for a in 0..2 {
                if flags[a] {
                    remapped[node][a] = 0.0;
                }
            }
        }
        nodal.momentum.copy_from_slice(&remapped);
        let node_velocity: Vec<Vec2> = (0..remapped.len()).map(|i| velocity(&remapped, i)).collect();

        let material = self.fields[f].material;
        let mode = LinearMode::for_dim(dim);
        for (local, p) in self.points[range].iter_mut().enumerate() {
            let mut l = Mat2::zeros();
            for e in table.row(local) {
                l += node_velocity[e.node] * e.grad.transpose();
            }
            if dim == 1 {
                l = Mat2::new(l[(0, 0)], 0.0, 0.0, 0.0);
            }
            let incr = Mat2::identity() + l * dt;
            let det = incr.determinant();
            let id = start + local;
            if !(det > 0.0) {
                return Err(MpmError::ElementInversion { point: id, step: self.step, det });
            }
            match material {
                Material::LinearElastic(m) => {
                    let deps = (l + l.transpose()) * (0.5 * dt);
                    let (eps, sigma) = m.update(&p.strain, &deps, mode);
                    p.strain = eps;
                    p.stress = sigma;
                    p.deformation_gradient = incr * p.deformation_gradient;
                }
                Material::NeoHookean(m) => {
                    let (fnew, sigma, _) = m.update(&p.deformation_gradient, &l, dt).map_err(|e| match e {
                        MpmError::ElementInversion { det, .. } => {
                            MpmError::ElementInversion { point: id, step: self.step, det }
                        }
                        other => other,
                    })?;
                    p.deformation_gradient = fnew;
                    p.stress = sigma;
                    p.strain = (l + l.transpose()) * (0.5 * dt) + p.strain;
                }
            }
            p.volume *= det;
        }
        Ok(skipped)
    }
}

fn offset_point(e: MpmError, start: usize) -> MpmError {
    match e {
        MpmError::OutOfDomain { x, y, point: Some(p) } => MpmError::OutOfDomain { x, y, point: Some(p + start) },
        other => other,
    }
}

/// Trial momentum `p + dt (F_ext + F_cont - F_int)` with constrained components zeroed.
pub fn advance_momentum(nodal: &FieldNodalState, dt: f64, constrained: &[[bool; 2]]) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = (0..nodal.momentum.len())
        .map(|i| nodal.momentum[i] + (nodal.external_force[i] + nodal.contact_force[i] - nodal.internal_force[i]) * dt)
        .collect();
    for (v, flags) in out.iter_mut().zip(constrained) {
        for a in 0..2 {
            if flags[a] {
                v[a] = 0.0;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
