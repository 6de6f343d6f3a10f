//! Code-defined benchmark scenarios with `key=value` overrides.
//!
//! Quantities quoted in millimetre/microsecond units are converted to SI here
//! through [`units`], so every preset is self-contained.

use std::collections::BTreeMap;

use crate::error::{MpmError, Result};
use crate::grid_bspline::BasisKind;
use crate::materials::{LinearElastic, Material, NeoHookean};
use crate::solver::Region;
use crate::state::{Geometry, SeedSpec, BOUNDARY_SHARE};

use super::scenario::{
    ContactSpec, DirichletEntry, FieldSpec, GridSpec, OutputSpec, Scenario, SolverSpec, SpringEntry, TractionEntry,
};

/// Conversions from the units the reference problems are quoted in.
pub mod units {
    pub fn mm(x: f64) -> f64 {
        x * 1e-3
    }

    pub fn us(t: f64) -> f64 {
        t * 1e-6
    }

    /// mm/us to m/s.
    pub fn mm_per_us(v: f64) -> f64 {
        v * 1e3
    }

    pub fn mpa(p: f64) -> f64 {
        p * 1e6
    }

    pub fn gpa(p: f64) -> f64 {
        p * 1e9
    }

    /// Line load N/mm to N/m.
    pub fn n_per_mm(f: f64) -> f64 {
        f * 1e3
    }

    /// Penalty stiffness N/mm^3 to N/m^3.
    pub fn n_per_mm3(w: f64) -> f64 {
        w * 1e9
    }

    /// Reciprocal stress 1/GPa to 1/Pa.
    pub fn per_gpa(k: f64) -> f64 {
        k * 1e-9
    }
}

use units::{mm, mm_per_us, mpa, n_per_mm, us};

/// `key=value` overrides; every key must be consumed by the preset.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    values: BTreeMap<String, String>,
}

impl Overrides {
    pub fn parse<I, S>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut values = BTreeMap::new();
        for item in items {
            let item = item.as_ref();
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| MpmError::Config(format!("override '{item}' is not of the form key=value")))?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn set(mut self, key: &str, value: impl ToString) -> Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| MpmError::Config(format!("override {key}={v} is not a number"))),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| MpmError::Config(format!("override {key}={v} is not a count"))),
        }
    }

    fn basis_or(&self, default: BasisKind) -> Result<BasisKind> {
        self.values.get("basis").map_or(Ok(default), |v| v.parse())
    }

    /// Fails on keys the preset does not recognise.
    pub(crate) fn check(&self, preset: &str, allowed: &[&str]) -> Result<()> {
        let unknown: Vec<&str> = self.values.keys().map(String::as_str).filter(|k| !allowed.contains(k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(MpmError::Config(format!(
                "preset {preset} does not accept override(s) {}; allowed: {}",
                unknown.join(", "),
                allowed.join(", ")
            )))
        }
    }
}

pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub keys: &'static [&'static str],
}

pub const PRESETS: [PresetInfo; 7] = [
    PresetInfo {
        name: "two_bars_self_weight",
        description: "1D bars stacked under ramped gravity, spring-supported base",
        keys: &["offset", "dh", "basis", "cc", "steps"],
    },
    PresetInfo {
        name: "two_bars_impact",
        description: "1D bar striking a resting bar twice its length",
        keys: &["dh", "basis", "cc", "steps", "end_time_us"],
    },
    PresetInfo {
        name: "hertz_disks",
        description: "two elastic disks pressed together by ramped body forces",
        keys: &["dh", "basis", "cc", "segments", "force", "density", "steps"],
    },
    PresetInfo {
        name: "hertz_halfplane",
        description: "elastic demi-disk pressed onto a rigid plane",
        keys: &["dh", "basis", "cc", "radius", "density", "ppc", "steps"],
    },
    PresetInfo {
        name: "neo_hookean_rings",
        description: "two hollow neo-Hookean cylinders in head-on impact",
        keys: &["dh", "basis", "cc", "gap", "end_time_us", "steps"],
    },
    PresetInfo {
        name: "granular_1",
        description: "striker hitting four collinear photoelastic disks",
        keys: &["dh", "basis", "cc", "end_time_us", "steps"],
    },
    PresetInfo {
        name: "granular_2",
        description: "impactor hitting five enclosed disks in 45 degree contact",
        keys: &["dh", "basis", "cc", "friction", "end_time_us", "steps"],
    },
];

pub fn preset_info(name: &str) -> Result<&'static PresetInfo> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| MpmError::Config(format!("unknown preset '{name}'; try list-presets")))
}

pub fn preset(name: &str, overrides: &Overrides) -> Result<Scenario> {
    overrides.check(name, preset_info(name)?.keys)?;
    let scenario = match name {
        "two_bars_self_weight" => SelfWeight::from_overrides(overrides)?.scenario(),
        "two_bars_impact" => Impact::from_overrides(overrides)?.scenario(),
        "hertz_disks" => HertzDisks::from_overrides(overrides)?.scenario(),
        "hertz_halfplane" => HertzPlane::from_overrides(overrides)?.scenario(),
        "neo_hookean_rings" => Rings::from_overrides(overrides)?.scenario(),
        "granular_1" => Granular::from_overrides(overrides, false)?.scenario(),
        "granular_2" => Granular::from_overrides(overrides, true)?.scenario(),
        _ => unreachable!("registered preset"),
    };
    scenario.validate()?;
    Ok(scenario)
}

fn elastic(e: f64, nu: f64) -> Material {
    Material::LinearElastic(LinearElastic { youngs_modulus: e, poisson_ratio: nu })
}

fn steps_for(end_time: f64, dt: f64) -> usize {
    (end_time / dt - 1e-9).ceil() as usize
}

fn grid2(x_max: f64, y_max: f64, spacing: f64) -> GridSpec {
    GridSpec { dim: 2, x_min: [0.0, 0.0], x_max: [x_max, y_max], spacing }
}

fn solver(steps: usize, basis: BasisKind, occupation: f64) -> SolverSpec {
    SolverSpec { steps, dt: None, basis, occupation, gravity: [0.0, 0.0], gravity_ramp: 0.0 }
}

fn contact(master: &str, slave: &str, friction: f64) -> ContactSpec {
    ContactSpec { master: master.into(), slave: slave.into(), friction, penalty_normal: None, penalty_tangent: None }
}

fn with_time(mut s: Scenario, steps: Option<usize>, end_time: f64) -> Scenario {
    let dt = s.stable_time_step();
    s.solver.steps = steps.unwrap_or_else(|| steps_for(end_time, dt));
    s
}

fn optional_steps(o: &Overrides) -> Result<Option<usize>> {
    o.get("steps").map(|_| o.usize_or("steps", 0)).transpose()
}

/// Two 0.3 m aluminium bars stacked along x under gravity -9.81 m/s^2.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfWeight {
    pub offset: f64,
    pub spacing: f64,
    pub basis: BasisKind,
    pub occupation: f64,
    pub steps: usize,
}

impl SelfWeight {
    pub const YOUNGS: f64 = 50.5e9;
    pub const DENSITY: f64 = 2783.0;
    pub const GRAVITY: f64 = -9.81;
    pub const BAR_LENGTH: f64 = 0.3;
    pub const BASE: f64 = 0.2;
    pub const SPRING: f64 = 65e9;
    pub const RAMP_STEPS: usize = 12_000;
    /// Offsets of the master bar studied in the reference problem.
    pub const OFFSETS: [f64; 6] = [0.0, 0.016, 0.033, 0.05, 0.066, 0.083];

    pub fn from_overrides(o: &Overrides) -> Result<Self> {
        Ok(Self {
            offset: o.f64_or("offset", 0.0)?,
            spacing: o.f64_or("dh", 0.1)?,
            basis: o.basis_or(BasisKind::Ebs)?,
            occupation: o.f64_or("cc", 0.75)?,
            steps: o.usize_or("steps", 16_000)?,
        })
    }

    pub fn bottom(&self) -> f64 {
        Self::BASE + self.offset
    }

    pub fn scenario(&self) -> Scenario {
        let bar = |name: &str, start: f64| FieldSpec {
            name: name.into(),
            geometry: Geometry::Bar { start, end: start + Self::BAR_LENGTH },
            seeding: SeedSpec { points_per_cell: 4, boundary_segments: 1, chain_start_angle_deg: 0.0 },
            material: elastic(Self::YOUNGS, 0.0),
            density: Self::DENSITY,
            velocity: [0.0, 0.0],
            body_acceleration: [0.0, 0.0],
            rigid: false,
        };
        let x0 = self.bottom();
        let mut s = Scenario {
            name: "two_bars_self_weight".into(),
            grid: GridSpec { dim: 1, x_min: [0.0, 0.0], x_max: [1.0, 0.0], spacing: self.spacing },
            solver: solver(self.steps, self.basis, self.occupation),
            output: OutputSpec::default(),
            fields: vec![bar("master", x0), bar("slave", x0 + Self::BAR_LENGTH)],
            contacts: vec![contact("master", "slave", 0.0)],
            dirichlet: vec![],
            springs: vec![SpringEntry { field: "master".into(), at: [x0, 0.0], stiffness: Self::SPRING }],
            tractions: vec![],
        };
        s.grid = snapped(&s.grid);
        let dt = s.stable_time_step();
        s.solver.dt = Some(dt);
        s.solver.gravity = [Self::GRAVITY, 0.0];
        s.solver.gravity_ramp = Self::RAMP_STEPS as f64 * dt;
        s
    }
}

/// Grid with `x_max` pushed out to a whole number of cells.
fn snapped(g: &GridSpec) -> GridSpec {
    let mut out = g.clone();
    for a in 0..g.dim {
        let n = ((g.x_max[a] - g.x_min[a]) / g.spacing - 1e-9).ceil();
        out.x_max[a] = g.x_min[a] + n * g.spacing;
    }
    out
}

/// Bar of length `l1` at 1 m/s hitting a resting bar of length `2 l1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Impact {
    pub spacing: f64,
    pub basis: BasisKind,
    pub occupation: f64,
    pub end_time: f64,
    pub steps: Option<usize>,
}

impl Impact {
    pub const YOUNGS: f64 = 50.5e9;
    pub const DENSITY: f64 = 2783.0;
    pub const L1: f64 = 0.2;
    pub const SPEED: f64 = 1.0;
    pub const START: f64 = 0.1;

    pub fn from_overrides(o: &Overrides) -> Result<Self> {
        Ok(Self {
            spacing: o.f64_or("dh", mm(6.25))?,
            basis: o.basis_or(BasisKind::Ebs)?,
            occupation: o.f64_or("cc", 0.75)?,
            end_time: us(o.f64_or("end_time_us", 300.0)?),
            steps: optional_steps(o)?,
        })
    }

    pub fn wave_speed() -> f64 {
        (Self::YOUNGS / Self::DENSITY).sqrt()
    }

    pub fn scenario(&self) -> Scenario {
        let bar = |name: &str, start: f64, len: f64, v: f64| FieldSpec {
            name: name.into(),
            geometry: Geometry::Bar { start, end: start + len },
            seeding: SeedSpec { points_per_cell: 4, boundary_segments: 1, chain_start_angle_deg: 0.0 },
            material: elastic(Self::YOUNGS, 0.0),
            density: Self::DENSITY,
            velocity: [v, 0.0],
            body_acceleration: [0.0, 0.0],
            rigid: false,
        };
        let contact_x = Self::START + Self::L1;
        let s = Scenario {
            name: "two_bars_impact".into(),
            grid: snapped(&GridSpec { dim: 1, x_min: [0.0, 0.0], x_max: [0.8, 0.0], spacing: self.spacing }),
            solver: solver(0, self.basis, self.occupation),
            output: OutputSpec::default(),
            fields: vec![
                bar("striker", Self::START, Self::L1, Self::SPEED),
                bar("target", contact_x, 2.0 * Self::L1, 0.0),
            ],
            contacts: vec![contact("striker", "target", 0.0)],
            dirichlet: vec![],
            springs: vec![],
            tractions: vec![],
        };
        with_time(s, self.steps, self.end_time)
    }
}

/// Two equal disks of radius 10 mm along x, pushed together by opposite
/// body forces ramped over 400 us. The density is a free, mass-scaled input.
#[derive(Debug, Clone, PartialEq)]
pub struct HertzDisks {
    pub spacing: f64,
    pub basis: BasisKind,
    pub occupation: f64,
    pub segments: usize,
    /// Total body force per unit thickness on each disk, N/m.
    pub force: f64,
    pub density: f64,
    pub steps: Option<usize>,
}

impl HertzDisks {
    pub const RADIUS: f64 = 0.01;
    pub const YOUNGS: f64 = 9.453e10;
    pub const POISSON: f64 = 0.07;
    pub const RAMP: f64 = 400e-6;
    pub const CENTER_Y: f64 = 0.015;
    pub const LEFT_X: f64 = 0.015;

    pub fn from_overrides(o: &Overrides) -> Result<Self> {
        Ok(Self {
            spacing: o.f64_or("dh", Self::RADIUS / 20.0)?,
            basis: o.basis_or(BasisKind::Ebs)?,
            occupation: o.f64_or("cc", 0.75)?,
            segments: o.usize_or("segments", 100)?,
            force: o.f64_or("force", 3.0e7)?,
            density: o.f64_or("density", 1.0e4)?,
            steps: optional_steps(o)?,
        })
    }

    /// Seeded mass per unit thickness, including the boundary share.
    pub fn disk_mass(&self) -> f64 {
        self.density * std::f64::consts::PI * Self::RADIUS * Self::RADIUS * (1.0 + BOUNDARY_SHARE)
    }

    pub fn scenario(&self) -> Scenario {
        let a = self.force / self.disk_mass();
        let disk = |name: &str, x: f64, push: f64, angle: f64| FieldSpec {
            name: name.into(),
            geometry: Geometry::Disk { center: [x, Self::CENTER_Y], radius: Self::RADIUS },
            seeding: SeedSpec { points_per_cell: 16, boundary_segments: self.segments, chain_start_angle_deg: angle },
            material: elastic(Self::YOUNGS, Self::POISSON),
            density: self.density,
            velocity: [0.0, 0.0],
            body_acceleration: [push, 0.0],
            rigid: false,
        };
        let right = Self::LEFT_X + 2.0 * Self::RADIUS;
        let mut s = Scenario {
            name: "hertz_disks".into(),
            grid: snapped(&grid2(0.05, 0.03, self.spacing)),
            solver: solver(0, self.basis, self.occupation),
            output: OutputSpec::default(),
            fields: vec![disk("left", Self::LEFT_X, a, 0.0), disk("right", right, -a, 0.0)],
            contacts: vec![contact("left", "right", 0.0)],
            dirichlet: vec![],
            springs: vec![],
            tractions: vec![],
        };
        s.solver.gravity_ramp = Self::RAMP;
        with_time(s, self.steps, Self::RAMP)
    }
}

/// Elastic demi-disk (E = 10 GPa, nu = 0) loaded on its flat top by
/// 156.7 N/mm ramped over 175 us against a rigid plane.
#[derive(Debug, Clone, PartialEq)]
pub struct HertzPlane {
    pub spacing: f64,
    pub basis: BasisKind,
    pub occupation: f64,
    pub radius: f64,
    pub density: f64,
    pub points_per_cell: usize,
    pub steps: Option<usize>,
}

impl HertzPlane {
    pub const YOUNGS: f64 = 10e9;
    pub const POISSON: f64 = 0.0;
    pub const DURATION: f64 = 175e-6;
    /// Plane top surface.
    pub const PLANE_Y: f64 = 1e-3;
    /// Refinement sequence for the convergence check.
    pub const SPACINGS: [f64; 3] = [0.2e-3, 0.1e-3, 0.05e-3];

    pub fn force() -> f64 {
        n_per_mm(156.7)
    }

    pub fn from_overrides(o: &Overrides) -> Result<Self> {
        Ok(Self {
            spacing: o.f64_or("dh", mm(0.1))?,
            basis: o.basis_or(BasisKind::Ebs)?,
            occupation: o.f64_or("cc", 0.5)?,
            radius: o.f64_or("radius", mm(2.0))?,
            density: o.f64_or("density", 2.0e5)?,
            points_per_cell: o.usize_or("ppc", 16)?,
            steps: optional_steps(o)?,
        })
    }

    pub fn center(&self) -> [f64; 2] {
        [1.5 * self.radius + mm(0.5), Self::PLANE_Y + self.radius]
    }

    /// Region selecting the flat top of the demi-disk.
    pub fn top_region(&self) -> Region {
        let [cx, cy] = self.center();
        let eps = 1e-3 * self.radius;
        Region { min: [cx - 2.0 * self.radius, cy - eps], max: [cx + 2.0 * self.radius, cy + eps] }
    }

    pub fn scenario(&self) -> Scenario {
        let [cx, cy] = self.center();
        let r = self.radius;
        let segments = ((std::f64::consts::PI + 2.0) * r / mm(0.05)).round() as usize;
        // Master points must sit closer than one cell to any slave point that
        // reaches the plane, so the plane outline is finer than the finest grid.
        let (slab_min, slab_max) = ([cx - 1.5 * r, Self::PLANE_Y - mm(0.5)], [cx + 1.5 * r, Self::PLANE_Y]);
        let perimeter = 2.0 * (slab_max[0] - slab_min[0] + slab_max[1] - slab_min[1]);
        let slab = FieldSpec {
            name: "plane".into(),
            geometry: Geometry::Rectangle { min: slab_min, max: slab_max },
            seeding: SeedSpec {
                points_per_cell: 1,
                boundary_segments: (perimeter / mm(0.025)).ceil() as usize,
                chain_start_angle_deg: 0.0,
            },
            material: elastic(Self::YOUNGS, Self::POISSON),
            density: self.density,
            velocity: [0.0, 0.0],
            body_acceleration: [0.0, 0.0],
            rigid: true,
        };
        let body = FieldSpec {
            name: "demi_disk".into(),
            geometry: Geometry::DemiDisk { center: [cx, cy], radius: r },
            seeding: SeedSpec {
                points_per_cell: self.points_per_cell,
                boundary_segments: segments,
                chain_start_angle_deg: 0.0,
            },
            material: elastic(Self::YOUNGS, Self::POISSON),
            density: self.density,
            velocity: [0.0, 0.0],
            body_acceleration: [0.0, 0.0],
            rigid: false,
        };
        let s = Scenario {
            name: "hertz_halfplane".into(),
            grid: snapped(&grid2(2.0 * cx, cy + mm(1.0), self.spacing)),
            solver: solver(0, self.basis, self.occupation),
            output: OutputSpec::default(),
            fields: vec![slab, body],
            contacts: vec![contact("plane", "demi_disk", 0.0)],
            dirichlet: vec![],
            springs: vec![],
            tractions: vec![TractionEntry {
                field: "demi_disk".into(),
                region: self.top_region(),
                value: [0.0, -Self::force() / (2.0 * r)],
                ramp_time: Self::DURATION,
            }],
        };
        with_time(s, self.steps, Self::DURATION)
    }
}

/// Two neo-Hookean rings (outer radius 40 mm, inner 30 mm) approaching at
/// 0.03 mm/us each.
#[derive(Debug, Clone, PartialEq)]
pub struct Rings {
    pub spacing: f64,
    pub basis: BasisKind,
    pub occupation: f64,
    pub gap: f64,
    pub end_time: f64,
    pub steps: Option<usize>,
}

impl Rings {
    pub const OUTER: f64 = 0.04;
    pub const INNER: f64 = 0.03;
    pub const DENSITY: f64 = 1010.0;

    pub fn material() -> NeoHookean {
        NeoHookean { mu: mpa(26.1), lambda: mpa(104.4) }
    }

    pub fn speed() -> f64 {
        mm_per_us(0.03)
    }

    pub fn from_overrides(o: &Overrides) -> Result<Self> {
        Ok(Self {
            spacing: o.f64_or("dh", mm(1.25))?,
            basis: o.basis_or(BasisKind::Ebs)?,
            occupation: o.f64_or("cc", 0.5)?,
            gap: mm(o.f64_or("gap", 10.0)?),
            end_time: us(o.f64_or("end_time_us", 4000.0)?),
            steps: optional_steps(o)?,
        })
    }

    pub fn scenario(&self) -> Scenario {
        let (w, h) = (0.3, 0.12);
        let offset = Self::OUTER + 0.5 * self.gap;
        let ring = |name: &str, x: f64, v: f64| FieldSpec {
            name: name.into(),
            geometry: Geometry::Annulus { center: [x, 0.5 * h], inner_radius: Self::INNER, outer_radius: Self::OUTER },
            seeding: SeedSpec { points_per_cell: 16, boundary_segments: 200, chain_start_angle_deg: 0.0 },
            material: Material::NeoHookean(Self::material()),
            density: Self::DENSITY,
            velocity: [v, 0.0],
            body_acceleration: [0.0, 0.0],
            rigid: false,
        };
        let s = Scenario {
            name: "neo_hookean_rings".into(),
            grid: snapped(&grid2(w, h, self.spacing)),
            solver: solver(0, self.basis, self.occupation),
            output: OutputSpec::default(),
            fields: vec![
                ring("left", 0.5 * w - offset, Self::speed()),
                ring("right", 0.5 * w + offset, -Self::speed()),
            ],
            contacts: vec![contact("left", "right", 0.0)],
            dirichlet: vec![],
            springs: vec![],
            tractions: vec![],
        };
        with_time(s, self.steps, self.end_time)
    }
}

/// Photoelastic disk assemblies struck by a heavy, compliant impactor.
///
/// Scenario 1: four collinear disks of radius 25 mm hit from the left.
/// Scenario 2: five disks zig-zagging at 45 degrees inside a fixed
/// enclosure (floor, ceiling, left wall), hit from the right.
#[derive(Debug, Clone, PartialEq)]
pub struct Granular {
    pub enclosed: bool,
    pub spacing: f64,
    pub basis: BasisKind,
    pub occupation: f64,
    pub friction: f64,
    pub end_time: f64,
    pub steps: Option<usize>,
}

impl Granular {
    pub const RADIUS: f64 = 0.025;
    pub const DISK_DENSITY: f64 = 1900.0;
    pub const IMPACTOR_DENSITY: f64 = 190_000.0;
    pub const POISSON: f64 = 0.214;

    pub fn disk_youngs() -> f64 {
        mpa(174_857.14)
    }

    pub fn impactor_youngs() -> f64 {
        mpa(17_485.71)
    }

    pub fn speed() -> f64 {
        mm_per_us(0.0056)
    }

    pub fn from_overrides(o: &Overrides, enclosed: bool) -> Result<Self> {
        Ok(Self {
            enclosed,
            spacing: o.f64_or("dh", mm(5.0))?,
            basis: o.basis_or(BasisKind::Ebs)?,
            occupation: o.f64_or("cc", 0.8)?,
            friction: o.f64_or("friction", if enclosed { 0.5 } else { 0.0 })?,
            end_time: us(o.f64_or("end_time_us", 80.0)?),
            steps: optional_steps(o)?,
        })
    }

    /// Disk names ordered from the impactor outward.
    pub fn disk_names(&self) -> Vec<String> {
        let n = if self.enclosed { 5 } else { 4 };
        (0..n).map(|i| format!("disk{i}")).collect()
    }

    fn disk(&self, name: String, center: [f64; 2]) -> FieldSpec {
        FieldSpec {
            name,
            geometry: Geometry::Disk { center, radius: Self::RADIUS },
            seeding: SeedSpec { points_per_cell: 16, boundary_segments: 64, chain_start_angle_deg: 0.0 },
            material: elastic(Self::disk_youngs(), Self::POISSON),
            density: Self::DISK_DENSITY,
            velocity: [0.0, 0.0],
            body_acceleration: [0.0, 0.0],
            rigid: false,
        }
    }

    fn block(
        &self,
        name: &str,
        min: [f64; 2],
        max: [f64; 2],
        material: Material,
        density: f64,
        velocity: [f64; 2],
    ) -> FieldSpec {
        // outline points no further apart than one cell, so contact detection sees every slave point
        let perimeter = 2.0 * (max[0] - min[0] + max[1] - min[1]);
        FieldSpec {
            name: name.into(),
            geometry: Geometry::Rectangle { min, max },
            seeding: SeedSpec {
                points_per_cell: 16,
                boundary_segments: ((perimeter / self.spacing).ceil() as usize).max(64),
                chain_start_angle_deg: 0.0,
            },
            material,
            density,
            velocity,
            body_acceleration: [0.0, 0.0],
            rigid: false,
        }
    }

    pub fn scenario(&self) -> Scenario {
        let r = Self::RADIUS;
        let impactor_material = elastic(Self::impactor_youngs(), Self::POISSON);
        let (imp_w, imp_h) = (0.06, 0.04);
        let mut fields = Vec::new();
        let mut dirichlet = Vec::new();
        let names = self.disk_names();
        let (w, h);
        if !self.enclosed {
            (w, h) = (0.36, 0.1);
            let y = 0.5 * h;
            let x0 = 0.02;
            fields.push(self.block(
                "impactor",
                [x0, y - 0.5 * imp_h],
                [x0 + imp_w, y + 0.5 * imp_h],
                impactor_material,
                Self::IMPACTOR_DENSITY,
                [Self::speed(), 0.0],
            ));
            for (i, name) in names.iter().enumerate() {
                fields.push(self.disk(name.clone(), [x0 + imp_w + r + 2.0 * r * i as f64, y]));
            }
        } else {
            (w, h) = (0.32, 0.16);
            let wall = 0.02;
            let floor = 0.02;
            let step = 2.0 * r / std::f64::consts::SQRT_2;
            let y_low = floor + wall + r;
            let x_left = 0.02 + wall + r;
            // disk0 is next to the impactor on the right, disk4 touches the left wall
            let centers: Vec<[f64; 2]> =
                (0..5).map(|k| [x_left + step * (4 - k) as f64, y_low + if k % 2 == 1 { step } else { 0.0 }]).collect();
            let x_right = centers[0][0] + r;
            fields.push(self.block(
                "impactor",
                [x_right, y_low - 0.5 * imp_h],
                [x_right + imp_w, y_low + 0.5 * imp_h],
                impactor_material,
                Self::IMPACTOR_DENSITY,
                [-Self::speed(), 0.0],
            ));
            for (name, c) in names.iter().zip(&centers) {
                fields.push(self.disk(name.clone(), *c));
            }
            let disk_material = elastic(Self::disk_youngs(), Self::POISSON);
            let top = y_low + step + r;
            let boxes = [
                ("floor", [0.02, floor], [x_right, floor + wall]),
                ("ceiling", [0.02, top], [x_right, top + wall]),
                ("left_wall", [0.02, floor + wall], [0.02 + wall, top]),
            ];
            for (name, min, max) in boxes {
                fields.push(self.block(name, min, max, disk_material, Self::DISK_DENSITY, [0.0, 0.0]));
                dirichlet.push(DirichletEntry {
                    field: name.into(),
                    region: Region { min: [0.0, 0.0], max: [w, h] },
                    axes: [true, true],
                });
            }
        }
        let mut contacts = Vec::new();
        for i in 0..fields.len() {
            for j in i + 1..fields.len() {
                let (a, b) = (&fields[i].name, &fields[j].name);
                let grains = |n: &str| n.starts_with("disk") || n == "impactor";
                let mu = if grains(a) && grains(b) { self.friction } else { 0.0 };
                contacts.push(contact(a, b, mu));
            }
        }
        let s = Scenario {
            name: if self.enclosed { "granular_2" } else { "granular_1" }.into(),
            grid: snapped(&grid2(w, h, self.spacing)),
            solver: solver(0, self.basis, self.occupation),
            output: OutputSpec::default(),
            fields,
            contacts,
            dirichlet,
            springs: vec![],
            tractions: vec![],
        };
        with_time(s, self.steps, self.end_time)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::penalty_defaults;
    use approx::assert_relative_eq;

    #[test]
    fn unit_conversions() {
        assert_relative_eq!(mm(1.25), 0.00125);
        assert_relative_eq!(us(187.8), 1.878e-4);
        assert_relative_eq!(mm_per_us(0.03), 30.0);
        assert_relative_eq!(mm_per_us(0.0056), 5.6);
        assert_relative_eq!(mpa(26.1), 26.1e6);
        assert_relative_eq!(units::gpa(50.5), 50.5e9);
        assert_relative_eq!(n_per_mm(156.7), 156_700.0);
        assert_relative_eq!(units::n_per_mm3(129_280.0), 1.2928e14);
        assert_relative_eq!(
            units::per_gpa(std::f64::consts::PI / 0.07),
            crate::oracles::FRINGE_CONSTANT,
            max_relative = 1e-15
        );
    }

    #[test]
    fn self_weight_preset_matches_reference_setup() {
        let o = Overrides::parse(["offset=0.033"]).unwrap();
        let s = preset("two_bars_self_weight", &o).unwrap();
        assert_eq!(s.grid.spacing, 0.1);
        assert_relative_eq!(s.time_step(), 2.34753e-6, max_relative = 1e-5);
        assert_relative_eq!(s.solver.gravity_ramp / s.time_step(), 12_000.0, max_relative = 1e-12);
        assert_relative_eq!(s.solver.gravity_ramp, 0.0281, max_relative = 3e-3);
        let sim = s.build().unwrap();
        assert_relative_eq!(sim.laws[0].penalty_normal, 505e9, max_relative = 1e-12);
        assert_relative_eq!(sim.points[sim.springs[0].point].position.x, 0.233, max_relative = 1e-12);
    }

    #[test]
    fn rings_preset_matches_reference_setup() {
        let s = preset("neo_hookean_rings", &Overrides::default()).unwrap();
        assert_eq!(s.grid.spacing, 0.00125);
        match s.fields[0].material {
            Material::NeoHookean(m) => {
                assert_eq!(m.mu, 26.1e6);
                assert_eq!(m.lambda, 104.4e6);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(s.fields[0].density, 1010.0);
        assert_relative_eq!((s.fields[0].velocity[0] - s.fields[1].velocity[0]) / 2.0, 30.0);
        assert!(s.contacts.iter().all(|c| c.friction == 0.0));
        assert_eq!(s.solver.occupation, 0.5);
    }

    #[test]
    fn impact_penalty_at_fine_grid() {
        let o = Overrides::parse(["dh=0.000390625", "steps=1"]).unwrap();
        let s = preset("two_bars_impact", &o).unwrap();
        let (w, _) = penalty_defaults(s.grid.spacing, Impact::YOUNGS, Impact::YOUNGS);
        assert_relative_eq!(w, units::n_per_mm3(129_280.0), max_relative = 1e-12);
        let sim = s.build().unwrap();
        assert_eq!(sim.points.len(), 6148);
    }

    #[test]
    fn granular_presets_pair_every_field() {
        let s1 = preset("granular_1", &Overrides::default()).unwrap();
        assert_eq!((s1.fields.len(), s1.contacts.len()), (5, 10));
        let s2 = preset("granular_2", &Overrides::default()).unwrap();
        assert_eq!((s2.fields.len(), s2.contacts.len()), (9, 36));
        let between_disks = s2.contacts.iter().find(|c| c.master == "disk0" && c.slave == "disk1").unwrap();
        assert_eq!(between_disks.friction, 0.5);
        let with_wall = s2.contacts.iter().find(|c| c.slave == "floor").unwrap();
        assert_eq!(with_wall.friction, 0.0);
    }

    #[test]
    fn every_preset_builds_and_round_trips() {
        for p in &PRESETS {
            let s = preset(p.name, &Overrides::default().set("steps", 1)).unwrap();
            let text = s.to_toml().unwrap();
            assert_eq!(super::super::parse_scenario(&text).unwrap(), s, "{}", p.name);
            s.build().unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn unknown_override_is_rejected() {
        let o = Overrides::parse(["warp=9"]).unwrap();
        assert!(matches!(preset("hertz_disks", &o), Err(MpmError::Config(_))));
        assert!(Overrides::parse(["novalue"]).is_err());
        assert!(preset("nope", &Overrides::default()).is_err());
    }
}
