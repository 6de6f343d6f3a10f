//! TOML scenario schema, validation and construction of a [`Simulation`].
//!
//! All quantities are SI base units. Fields are referenced by name.

use serde::{Deserialize, Serialize};

use crate::contact::ContactLaw;
use crate::error::{MpmError, Result};
use crate::grid_bspline::{BasisKind, EulerianGrid};
use crate::materials::Material;
use crate::solver::{
    critical_time_step, penalty_defaults, DirichletSpec, Region, Simulation, SpringSupport, StepConfig, Traction,
    CFL_FACTOR,
};
use crate::state::{seed_field, DiscreteField, Geometry, SeedSpec};
use crate::Vec2;

/// Occupation parameters used in the reference benchmarks; others trigger a warning.
pub const OCCUPATION_RANGE: (f64, f64) = (0.4, 0.8);

const TOP_LEVEL: [(&str, bool); 9] = [
    ("name", false),
    ("grid", true),
    ("solver", true),
    ("output", false),
    ("fields", true),
    ("contacts", false),
    ("dirichlet", false),
    ("springs", false),
    ("tractions", false),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    pub grid: GridSpec,
    pub solver: SolverSpec,
    #[serde(default)]
    pub output: OutputSpec,
    pub fields: Vec<FieldSpec>,
    #[serde(default)]
    pub contacts: Vec<ContactSpec>,
    #[serde(default)]
    pub dirichlet: Vec<DirichletEntry>,
    #[serde(default)]
    pub springs: Vec<SpringEntry>,
    #[serde(default)]
    pub tractions: Vec<TractionEntry>,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub x_min: [f64; 2],
    pub x_max: [f64; 2],
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub steps: usize,
    /// Time step; `0.1 h / c0` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub basis: BasisKind,
    #[serde(default = "default_occupation")]
    pub occupation: f64,
    #[serde(default)]
    pub gravity: [f64; 2],
    /// Duration of the linear ramp of gravity and body accelerations.
    #[serde(default)]
    pub gravity_ramp: f64,
}

fn default_occupation() -> f64 {
    0.75
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Write a point snapshot every this many steps; zero keeps only the first and last.
    #[serde(default)]
    pub snapshot_every: usize,
    /// Write a time-series row every this many steps.
    #[serde(default = "one")]
    pub timeseries_every: usize,
    #[serde(default)]
    pub contact_log: bool,
}

fn one() -> usize {
    1
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { snapshot_every: 0, timeseries_every: 1, contact_log: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    pub geometry: Geometry,
    pub seeding: SeedSpec,
    pub material: Material,
    pub density: f64,
    #[serde(default)]
    pub velocity: [f64; 2],
    #[serde(default)]
    pub body_acceleration: [f64; 2],
    #[serde(default)]
    pub rigid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactSpec {
    pub master: String,
    pub slave: String,
    #[serde(default)]
    pub friction: f64,
    /// N/m^3; `E / h` of the stiffer body when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty_normal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty_tangent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletEntry {
    pub field: String,
    pub region: Region,
    pub axes: [bool; 2],
}

/// Spring tying the boundary point of `field` nearest to `at` to its initial position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpringEntry {
    pub field: String,
    pub at: [f64; 2],
    pub stiffness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TractionEntry {
    pub field: String,
    pub region: Region,
    pub value: [f64; 2],
    #[serde(default)]
    pub ramp_time: f64,
}

/// Parses and validates a scenario document.
///
/// Structural problems (missing blocks, unknown top-level keys) are all
/// reported together; after a successful decode the semantic checks of
/// [`Scenario::validate`] run and their findings are reported together too.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| MpmError::Validation(vec![e.to_string()]))?;
    let mut errors = Vec::new();
    for (key, required) in TOP_LEVEL {
        if required && !table.contains_key(key) {
            errors.push(format!("{key}: missing required block"));
        }
    }
    for key in table.keys() {
        if !TOP_LEVEL.iter().any(|(k, _)| k == key) {
            errors.push(format!("{key}: unknown key"));
        }
    }
    if !errors.is_empty() {
        return Err(MpmError::Validation(errors));
    }
    let scenario: Scenario =
        toml::from_str(text).map_err(|e| MpmError::Validation(vec![e.to_string().trim().to_string()]))?;
    for w in scenario.validate()? {
        log::warn!("{w}");
    }
    Ok(scenario)
}

impl Scenario {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| MpmError::Config(format!("cannot serialise scenario: {e}")))
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    /// Checks the scenario and returns warnings, or every error found.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        let g = &self.grid;
        if g.dim != 1 && g.dim != 2 {
            errors.push(format!("grid.dim: must be 1 or 2, got {}", g.dim));
        }
        if !(g.spacing > 0.0) {
            errors.push(format!("grid.spacing: must be positive, got {}", g.spacing));
        }
        for a in 0..g.dim.min(2) {
            if !(g.x_max[a] > g.x_min[a]) {
                errors.push(format!("grid.x_max[{a}]: must exceed x_min[{a}]"));
            }
        }
        let s = &self.solver;
        if !(s.occupation > 0.0 && s.occupation <= 1.0) {
            errors.push(format!("solver.occupation: must lie in (0, 1], got {}", s.occupation));
        } else if s.occupation < OCCUPATION_RANGE.0 || s.occupation > OCCUPATION_RANGE.1 {
            warnings.push(format!(
                "solver.occupation: {} lies outside the customary range [{}, {}]",
                s.occupation, OCCUPATION_RANGE.0, OCCUPATION_RANGE.1
            ));
        }
        if !(s.gravity_ramp >= 0.0) {
            errors.push("solver.gravity_ramp: must be non-negative".into());
        }
        if self.fields.is_empty() {
            errors.push("fields: at least one field is required".into());
        }
        for (i, f) in self.fields.iter().enumerate() {
            let path = format!("fields[{i}]");
            if self.fields[..i].iter().any(|o| o.name == f.name) {
                errors.push(format!("{path}.name: duplicate field name '{}'", f.name));
            }
            if let Err(e) = f.geometry.validate() {
                errors.push(format!("{path}.geometry: {e}"));
            }
            if f.geometry.dim() != g.dim {
                errors.push(format!("{path}.geometry: {}D shape in a {}D grid", f.geometry.dim(), g.dim));
            }
            let (lo, hi) = f.geometry.bounds();
            let inside = (0..g.dim.min(2)).all(|a| lo[a] > g.x_min[a] && hi[a] < g.x_max[a]);
            if !inside {
                errors.push(format!("{path}.geometry: shape extends beyond the grid"));
            }
            if let Err(e) = f.material.validate() {
                errors.push(format!("{path}.material: {e}"));
            }
            if !(f.density > 0.0) {
                errors.push(format!("{path}.density: must be positive, got {}", f.density));
            }
            let root = (f.seeding.points_per_cell as f64).sqrt().round() as usize;
            if f.seeding.points_per_cell == 0 || (g.dim == 2 && root * root != f.seeding.points_per_cell) {
                errors.push(format!("{path}.seeding.points_per_cell: must be a positive perfect square in 2D"));
            }
            if g.dim == 2 && f.seeding.boundary_segments < 3 {
                errors.push(format!("{path}.seeding.boundary_segments: at least 3 segments are required in 2D"));
            }
        }
        let known = |name: &str| self.field_index(name).is_some();
        for (i, c) in self.contacts.iter().enumerate() {
            let path = format!("contacts[{i}]");
            for (key, name) in [("master", &c.master), ("slave", &c.slave)] {
                if !known(name) {
                    errors.push(format!("{path}.{key}: unknown field '{name}'"));
                }
            }
            if c.master == c.slave {
                errors.push(format!("{path}: master and slave must differ"));
            }
            if !(c.friction >= 0.0) {
                errors.push(format!("{path}.friction: must be non-negative"));
            }
            for (key, v) in [("penalty_normal", c.penalty_normal), ("penalty_tangent", c.penalty_tangent)] {
                if let Some(v) = v {
                    if !(v > 0.0) {
                        errors.push(format!("{path}.{key}: must be positive"));
                    }
                }
            }
        }
        for (i, d) in self.dirichlet.iter().enumerate() {
            if !known(&d.field) {
                errors.push(format!("dirichlet[{i}].field: unknown field '{}'", d.field));
            }
        }
        for (i, sp) in self.springs.iter().enumerate() {
            if !known(&sp.field) {
                errors.push(format!("springs[{i}].field: unknown field '{}'", sp.field));
            }
            if !(sp.stiffness > 0.0) {
                errors.push(format!("springs[{i}].stiffness: must be positive"));
            }
        }
        for (i, t) in self.tractions.iter().enumerate() {
            if !known(&t.field) {
                errors.push(format!("tractions[{i}].field: unknown field '{}'", t.field));
            }
            if !(t.ramp_time >= 0.0) {
                errors.push(format!("tractions[{i}].ramp_time: must be non-negative"));
            }
        }
        if self.fields.iter().all(|f| f.rigid) && !self.fields.is_empty() {
            errors.push("fields: at least one field must be deformable".into());
        }
        if errors.is_empty() {
            if let Some(dt) = s.dt {
                let bound = self.stable_time_step();
                if !(dt > 0.0) || dt > bound * (1.0 + 1e-9) {
                    errors.push(format!("solver.dt: {dt} violates the stability bound {bound} (0.1 h / c0)"));
                }
            }
        }
        if errors.is_empty() {
            Ok(warnings)
        } else {
            Err(MpmError::Validation(errors))
        }
    }

    /// `0.1 h / c0` over the deformable fields.
    pub fn stable_time_step(&self) -> f64 {
        let c = self.fields.iter().filter(|f| !f.rigid).map(|f| f.material.wave_speed(f.density)).fold(0.0, f64::max);
        CFL_FACTOR * self.grid.spacing / c
    }

    pub fn time_step(&self) -> f64 {
        self.solver.dt.unwrap_or_else(|| self.stable_time_step())
    }

    /// Seeds every field and assembles a ready-to-run simulation.
    pub fn build(&self) -> Result<Simulation> {
        self.validate()?;
        let g = &self.grid;
        let grid = EulerianGrid::new(g.dim, Vec2::from(g.x_min), Vec2::from(g.x_max), g.spacing)?;
        let mut points = Vec::new();
        let mut fields = Vec::new();
        for (id, spec) in self.fields.iter().enumerate() {
            let first = points.len();
            let (mut pts, chain) =
                seed_field(&grid, &spec.geometry, &spec.seeding, id, first, spec.density, spec.rigid)?;
            for p in &mut pts {
                p.velocity = Vec2::from(spec.velocity);
                if g.dim == 1 {
                    p.velocity.y = 0.0;
                }
            }
            points.extend(pts);
            fields.push(DiscreteField {
                id,
                name: spec.name.clone(),
                points: first..points.len(),
                chain,
                material: spec.material,
                density: spec.density,
                rigid: spec.rigid,
            });
        }
        let index = |name: &str| self.field_index(name).expect("validated field name");
        let laws = self
            .contacts
            .iter()
            .map(|c| {
                let (m, s) = (index(&c.master), index(&c.slave));
                let (wn, wt) = penalty_defaults(
                    g.spacing,
                    fields[m].material.youngs_modulus(),
                    fields[s].material.youngs_modulus(),
                );
                ContactLaw {
                    master: m,
                    slave: s,
                    penalty_normal: c.penalty_normal.unwrap_or(wn),
                    penalty_tangent: c.penalty_tangent.unwrap_or(wt),
                    friction: c.friction,
                }
            })
            .collect();
        let dirichlet = self
            .dirichlet
            .iter()
            .map(|d| DirichletSpec { field: index(&d.field), region: d.region, axes: d.axes })
            .collect();
        let springs = self
            .springs
            .iter()
            .map(|sp| {
                let field: &DiscreteField = &fields[index(&sp.field)];
                let target = Vec2::from(sp.at);
                let candidates: Vec<usize> =
                    if field.chain.is_empty() { field.points.clone().collect() } else { field.chain.points.clone() };
                let point = candidates
                    .into_iter()
                    .min_by(|&a, &b| {
                        let da = (points[a].position - target).norm();
                        let db = (points[b].position - target).norm();
                        da.total_cmp(&db).then(a.cmp(&b))
                    })
                    .expect("seeded fields are non-empty");
                SpringSupport { point, stiffness: sp.stiffness }
            })
            .collect();
        let tractions = self
            .tractions
            .iter()
            .map(|t| Traction { field: index(&t.field), region: t.region, value: t.value, ramp_time: t.ramp_time })
            .collect();
        let dt = self.time_step();
        debug_assert!(dt <= CFL_FACTOR * critical_time_step(g.spacing, &fields) * (1.0 + 1e-9));
        let config = StepConfig {
            dt,
            n_steps: self.solver.steps,
            occupation: self.solver.occupation,
            basis: self.solver.basis,
            gravity: Vec2::from(self.solver.gravity),
            gravity_ramp: self.solver.gravity_ramp,
            body_acceleration: self.fields.iter().map(|f| Vec2::from(f.body_acceleration)).collect(),
        };
        Simulation::new(grid, points, fields, laws, config, dirichlet, springs, tractions)
    }
}
