//! CSV emission. Floats are written with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{MpmError, Result};
use crate::grid_bspline::{classify_bases, classify_cells, BasisClass, BasisLabel};
use crate::oracles;
use crate::solver::{Simulation, StepSummary};

use super::presets::{HertzDisks, HertzPlane, Impact, Overrides, SelfWeight};
use super::scenario::Scenario;

/// Formats a float with 17 significant digits.
pub fn num(x: f64) -> String {
    // adding zero turns -0 into +0
    format!("{:.16e}", x + 0.0)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> MpmError + '_ {
    move |source| MpmError::Io { path: path.display().to_string(), source }
}

/// Buffered CSV file that remembers its path for error messages.
pub struct CsvFile {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvFile {
    pub fn create(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let file = File::create(&path).map_err(io_err(&path))?;
        Ok(Self { out: BufWriter::new(file), path })
    }

    pub fn line(&mut self, cells: &[String]) -> Result<()> {
        writeln!(self.out, "{}", cells.join(",")).map_err(io_err(&self.path))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(io_err(&self.path))
    }
}

pub fn timeseries_header(sim: &Simulation) -> Vec<String> {
    let mut h = vec!["step".to_string(), "time_s".to_string()];
    for f in &sim.fields {
        for q in ["kinetic", "stored", "total"] {
            h.push(format!("{}_{q}", f.name));
        }
    }
    h.extend(["contact_fx", "contact_fy", "active_pairs"].map(String::from));
    h
}

pub fn timeseries_row(sum: &StepSummary) -> Vec<String> {
    let mut row = vec![sum.step.to_string(), num(sum.time)];
    for e in &sum.energies {
        row.extend([num(e.kinetic), num(e.stored), num(e.total())]);
    }
    row.extend([num(sum.contact_force.x), num(sum.contact_force.y), sum.active_pairs.to_string()]);
    row
}

pub const SNAPSHOT_HEADER: [&str; 14] = [
    "step",
    "time_s",
    "field_id",
    "point_id",
    "is_boundary",
    "x",
    "y",
    "vx",
    "vy",
    "sxx",
    "syy",
    "sxy",
    "volume",
    "mass",
];

pub fn snapshot_rows(sim: &Simulation) -> Vec<Vec<String>> {
    sim.points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            vec![
                sim.step_index().to_string(),
                num(sim.time()),
                p.field.to_string(),
                i.to_string(),
                u8::from(p.is_boundary).to_string(),
                num(p.position.x),
                num(p.position.y),
                num(p.velocity.x),
                num(p.velocity.y),
                num(p.stress[(0, 0)]),
                num(p.stress[(1, 1)]),
                num(p.stress[(0, 1)]),
                num(p.volume),
                num(p.mass),
            ]
        })
        .collect()
}

pub const CONTACT_HEADER: [&str; 11] = [
    "step",
    "pair_id",
    "slave_id",
    "master_a",
    "master_b",
    "g_nor",
    "g_tan",
    "beta",
    "f_nor",
    "f_tan",
    "stick_or_slip",
];

pub fn contact_rows(sim: &Simulation) -> Vec<Vec<String>> {
    sim.pairs()
        .iter()
        .zip(sim.pair_forces())
        .enumerate()
        .map(|(k, (p, f))| {
            vec![
                sim.step_index().to_string(),
                k.to_string(),
                p.slave.to_string(),
                p.master[0].to_string(),
                p.master[1].to_string(),
                num(p.gap_normal),
                num(p.gap_tangent),
                num(p.beta),
                num(f.normal),
                num(f.tangential),
                if f.stick { "stick" } else { "slip" }.to_string(),
            ]
        })
        .collect()
}

pub const BASIS_HEADER: [&str; 4] = ["node_id", "class", "partner_id", "weight"];

/// One row per stable or exterior node, one row per extrapolation partner of a degenerated node.
pub fn basis_rows(class: &BasisClass) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (node, label) in class.labels().iter().enumerate() {
        match (label, class.extension(node)) {
            (BasisLabel::Degenerated, Some(ext)) => {
                for (partner, w) in ext.partners() {
                    rows.push(vec![node.to_string(), label.as_str().into(), partner.to_string(), num(w)]);
                }
            }
            _ => rows.push(vec![node.to_string(), label.as_str().into(), String::new(), String::new()]),
        }
    }
    rows
}

/// EBS classification of one field in its current configuration, independent of
/// the basis the simulation is configured with.
pub fn field_basis_class(sim: &Simulation, field: usize) -> Result<BasisClass> {
    let pts = sim.field_points(field);
    let cells = classify_cells(&sim.grid, pts.iter().map(|p| (p.position, p.volume)), sim.config.occupation)?;
    classify_bases(&sim.grid, &cells)
}

/// Names accepted by [`oracle_curve`].
pub const ORACLES: [&str; 5] = ["bar_stress", "impact_wave", "hertz_disks", "hertz_halfplane", "fringe"];

/// Reference curve of a closed-form solution, sampled at the benchmark parameters.
pub fn oracle_curve(name: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let cols = |c: &[&str]| header(c);
    let range = |n: usize, a: f64, b: f64| (0..=n).map(move |i| a + (b - a) * i as f64 / n as f64);
    Ok(match name {
        "bar_stress" => {
            let l0 = 2.0 * SelfWeight::BAR_LENGTH;
            let rows = range(120, 0.0, l0)
                .map(|x| {
                    let s =
                        oracles::bar_stress(x, l0, SelfWeight::DENSITY, SelfWeight::GRAVITY, 1.0, SelfWeight::YOUNGS);
                    vec![num(x), num(s)]
                })
                .collect();
            (cols(&["x_m", "sigma_pa"]), rows)
        }
        "impact_wave" => {
            let (l1, c0) = (Impact::L1, Impact::wave_speed());
            let mut rows = Vec::new();
            for t in range(16, 0.0, 8.0 * l1 / c0) {
                for x in range(120, 0.0, 3.0 * l1) {
                    let (v, s) = oracles::impact_wave_solution(x, t, l1, Impact::SPEED, c0, Impact::DENSITY);
                    rows.push(vec![num(t), num(x), num(v), num(s)]);
                }
            }
            (cols(&["time_s", "x_m", "velocity_m_s", "sigma_pa"]), rows)
        }
        "hertz_disks" => {
            let (r, e, nu) = (HertzDisks::RADIUS, HertzDisks::YOUNGS, HertzDisks::POISSON);
            let rows = range(100, 0.0, 3e7)
                .map(|f| vec![num(f), num(oracles::hertz_disks_contact_halfwidth(f, r, r, e, nu, e, nu, 1.0))])
                .collect();
            (cols(&["force_n_per_m", "half_width_m"]), rows)
        }
        "hertz_halfplane" => {
            let c = oracles::HalfPlaneContact::rigid_indenter(
                HertzPlane::force(),
                HertzPlane::from_overrides(&Overrides::default())?.radius,
                HertzPlane::YOUNGS,
                HertzPlane::POISSON,
            );
            let rows =
                range(200, -1.5 * c.half_width, 1.5 * c.half_width).map(|s| vec![num(s), num(c.stress(s))]).collect();
            (cols(&["s_m", "sigma_yy_pa"]), rows)
        }
        "fringe" => {
            let rows = range(200, 0.0, 0.14e9)
                .map(|d| {
                    let sigma = crate::Mat2::new(d, 0.0, 0.0, 0.0);
                    vec![num(d), num(oracles::fringe_field(&sigma, oracles::FRINGE_CONSTANT))]
                })
                .collect();
            (cols(&["principal_difference_pa", "fringe"]), rows)
        }
        _ => return Err(MpmError::Config(format!("unknown oracle '{name}'; known: {}", ORACLES.join(", ")))),
    })
}

fn header(cells: &[&str]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

/// What a scenario run wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub final_time: f64,
    pub snapshots: usize,
    pub files: Vec<PathBuf>,
}

/// Runs `scenario` and writes `timeseries.csv`, `snapshots.csv` and, when
/// requested, `contacts.csv` into `out`.
pub fn run_to_dir(scenario: &Scenario, out: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let mut sim = scenario.build()?;
    let n = sim.config.n_steps;
    let output = &scenario.output;
    let paths = [out.join("timeseries.csv"), out.join("snapshots.csv"), out.join("contacts.csv")];
    let mut series = CsvFile::create(&paths[0])?;
    let mut snaps = CsvFile::create(&paths[1])?;
    let mut contacts = if output.contact_log { Some(CsvFile::create(&paths[2])?) } else { None };
    series.line(&timeseries_header(&sim))?;
    snaps.line(&header(&SNAPSHOT_HEADER))?;
    if let Some(c) = contacts.as_mut() {
        c.line(&header(&CONTACT_HEADER))?;
    }
    let mut snapshots = 0;
    sim.run(|s, sum| {
        let last = sum.step == n;
        if sum.step % output.timeseries_every.max(1) == 0 || last {
            series.line(&timeseries_row(sum))?;
        }
        let snap = sum.step == 0 || last || (output.snapshot_every > 0 && sum.step % output.snapshot_every == 0);
        if snap {
            for row in snapshot_rows(s) {
                snaps.line(&row)?;
            }
            snapshots += 1;
        }
        if let Some(c) = contacts.as_mut() {
            for row in contact_rows(s) {
                c.line(&row)?;
            }
        }
        Ok(())
    })?;
    series.finish()?;
    snaps.finish()?;
    let mut files = paths[..2].to_vec();
    if let Some(c) = contacts {
        c.finish()?;
        files.push(paths[2].clone());
    }
    Ok(RunSummary { steps: sim.step_index(), final_time: sim.time(), snapshots, files })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.5e6), "-2.5000000000000000e6");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn oracle_curves_have_consistent_rows() {
        for name in ORACLES {
            let (h, rows) = oracle_curve(name).unwrap();
            assert!(!rows.is_empty());
            assert!(rows.iter().all(|r| r.len() == h.len()), "{name}");
        }
        assert!(oracle_curve("nope").is_err());
    }
}
