//! Benchmark drivers: run a preset and score it against its reference solution.

use std::collections::BTreeSet;

use crate::contact::project_onto_segment;
use crate::error::{MpmError, Result};
use crate::grid_bspline::BasisKind;
use crate::oracles::{
    bar_error, bar_stress, fringe_field, hertz_disks_contact_halfwidth, pressure_rmse, principal_difference,
    HalfPlaneContact, FRINGE_CONSTANT,
};
use crate::solver::Simulation;
use crate::Vec2;

use super::presets::{preset_info, Granular, HertzDisks, HertzPlane, Impact, Overrides, Rings, SelfWeight};
use super::report::num;

/// One scored quantity. Informational metrics carry no verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance rule, empty for informational metrics.
    pub threshold: String,
    pub pass: Option<bool>,
}

impl Metric {
    pub fn check(name: impl Into<String>, value: f64, threshold: impl Into<String>, pass: bool) -> Self {
        Self { name: name.into(), value, threshold: threshold.into(), pass: Some(pass && value.is_finite()) }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value, threshold: String::new(), pass: None }
    }

    fn verdict(&self) -> &'static str {
        match self.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub preset: String,
    pub metrics: Vec<Metric>,
}

impl BenchReport {
    fn new(preset: &str) -> Self {
        Self { preset: preset.into(), metrics: Vec::new() }
    }

    fn push(&mut self, m: Metric) {
        self.metrics.push(m);
    }

    /// True when every checked metric passes.
    pub fn passed(&self) -> bool {
        self.metrics.iter().all(|m| m.pass != Some(false))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Metric> {
        self.metrics.iter().filter(|m| m.pass == Some(false))
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("preset,metric,value,threshold,result\n");
        for m in &self.metrics {
            out += &format!("{},{},{},{},{}\n", self.preset, m.name, num(m.value), m.threshold, m.verdict());
        }
        out
    }

    pub fn to_text(&self) -> String {
        let width = self.metrics.iter().map(|m| m.name.len()).max().unwrap_or(0);
        let mut out = format!("benchmark {}\n", self.preset);
        for m in &self.metrics {
            out += &format!("  {:<width$}  {:>14.6e}  {:<18}  {}\n", m.name, m.value, m.threshold, m.verdict());
        }
        out += &format!("overall: {}\n", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

/// Runs the named preset's benchmark with `overrides` applied.
pub fn run_benchmark(name: &str, overrides: &Overrides) -> Result<BenchReport> {
    overrides.check(name, preset_info(name)?.keys)?;
    match name {
        "two_bars_self_weight" => self_weight(&SelfWeight::from_overrides(overrides)?),
        "two_bars_impact" => impact(&Impact::from_overrides(overrides)?),
        "hertz_disks" => hertz_disks(&HertzDisks::from_overrides(overrides)?),
        "hertz_halfplane" => {
            let p = HertzPlane::from_overrides(overrides)?;
            let spacings = if overrides.get("dh").is_some() { vec![p.spacing] } else { HertzPlane::SPACINGS.to_vec() };
            hertz_halfplane(&p, &spacings)
        }
        "neo_hookean_rings" => rings(&Rings::from_overrides(overrides)?),
        "granular_1" => granular(&Granular::from_overrides(overrides, false)?),
        "granular_2" => granular(&Granular::from_overrides(overrides, true)?),
        _ => Err(MpmError::Config(format!("no benchmark for preset '{name}'"))),
    }
}

/// Steady-state bar error and relative mismatch of the stresses on either
/// side of the contact (master top against slave bottom).
pub fn self_weight_scores(p: &SelfWeight) -> Result<(f64, f64)> {
    let mut sim = p.scenario().build()?;
    sim.run(|_, _| Ok(()))?;
    let l0 = 2.0 * SelfWeight::BAR_LENGTH;
    let (rho, g) = (SelfWeight::DENSITY, SelfWeight::GRAVITY);
    let samples = sim.points.iter().map(|q| {
        let x = q.initial_position.x - p.bottom();
        (q.stress[(0, 0)], bar_stress(x, l0, rho, g, 1.0, SelfWeight::YOUNGS), q.volume)
    });
    let error = bar_error(samples, rho * g * l0, l0);
    let top = sim.points[sim.fields[0].chain.points[1]].stress[(0, 0)];
    let bottom = sim.points[sim.fields[1].chain.points[0]].stress[(0, 0)];
    Ok((error, (top - bottom).abs() / bottom.abs()))
}

/// Every offset with the configured basis, then OBS against EBS at the largest offset.
pub fn self_weight(p: &SelfWeight) -> Result<BenchReport> {
    let mut r = BenchReport::new("two_bars_self_weight");
    for &offset in &SelfWeight::OFFSETS {
        let (error, diff) = self_weight_scores(&SelfWeight { offset, ..p.clone() })?;
        r.push(Metric::check(format!("error_offset_{offset}"), error, "< 0.02", error < 0.02));
        r.push(Metric::check(format!("contact_stress_diff_offset_{offset}"), diff, "<= 0.03", diff <= 0.03));
    }
    let last = SelfWeight::OFFSETS[SelfWeight::OFFSETS.len() - 1];
    let (ebs, _) = self_weight_scores(&SelfWeight { offset: last, basis: BasisKind::Ebs, ..p.clone() })?;
    let (obs, _) = self_weight_scores(&SelfWeight { offset: last, basis: BasisKind::Obs, ..p.clone() })?;
    r.push(Metric::info(format!("obs_error_offset_{last}"), obs));
    r.push(Metric::check(format!("obs_minus_ebs_error_offset_{last}"), obs - ebs, "> 0", obs > ebs));
    Ok(r)
}

/// Contact stress plateau, separation time and post-impact bar velocities.
///
/// Separation is the first instant after the compressive phase at which the
/// opening speed of the interface reaches half the impact speed: the exact
/// solution jumps from zero to the full impact speed there, and the midpoint
/// of the smeared jump locates it on a grid.
pub fn impact(p: &Impact) -> Result<BenchReport> {
    let mut sim = p.scenario().build()?;
    let c0 = Impact::wave_speed();
    let transit = Impact::L1 / c0;
    let v0 = Impact::SPEED;
    let a = sim.fields[0].chain.points[1];
    let b = sim.fields[1].chain.points[0];
    let (mut plateau, mut samples) = (0.0, 0usize);
    let (mut separation, mut last_pair) = (None, None);
    sim.run(|s, sum| {
        if sum.time >= 0.5 * transit && sum.time <= 1.5 * transit {
            plateau += sum.contact_force.x.abs();
            samples += 1;
        }
        if sum.active_pairs > 0 {
            last_pair = Some(sum.time);
        }
        let opening = s.points[b].velocity.x - s.points[a].velocity.x;
        if separation.is_none() && sum.time > transit && opening >= 0.5 * v0 {
            separation = Some(sum.time);
        }
        Ok(())
    })?;
    let expected = 0.5 * Impact::DENSITY * c0 * v0;
    let plateau = plateau / samples.max(1) as f64;
    let mean_v = |f: usize| {
        let pts = sim.field_points(f);
        pts.iter().map(|q| q.mass * q.velocity.x).sum::<f64>() / pts.iter().map(|q| q.mass).sum::<f64>()
    };
    let t_sep = 4.0 * transit;
    let mut r = BenchReport::new("two_bars_impact");
    let rel = (plateau - expected).abs() / expected;
    r.push(Metric::info("contact_stress_plateau_pa", plateau));
    r.push(Metric::check("plateau_rel_error", rel, "<= 0.10", rel <= 0.10));
    let sep = separation.unwrap_or(f64::NAN);
    let sep_err = (sep - t_sep).abs() / t_sep;
    r.push(Metric::info("separation_time_s", sep));
    r.push(Metric::check("separation_time_rel_error", sep_err, "<= 0.05", sep_err <= 0.05));
    r.push(Metric::info("last_active_pair_time_s", last_pair.unwrap_or(f64::NAN)));
    let after = sim.time() > t_sep;
    let (v1, v2) = (mean_v(0), mean_v(1));
    r.push(Metric::check("bar1_mean_velocity", v1, "0 +- 0.02 m/s", after && v1.abs() <= 0.02 * v0));
    r.push(Metric::check("bar2_mean_velocity", v2, "0.5 +- 0.02 m/s", after && (v2 - 0.5 * v0).abs() <= 0.02 * v0));
    Ok(r)
}

/// Signed distance from `x` to the nearest master segment it projects onto,
/// limited to `reach`.
fn gap_to_chain(sim: &Simulation, x: Vec2, master: &[usize], closed: bool, reach: f64) -> Option<f64> {
    let n = master.len();
    let segments = if closed { n } else { n.saturating_sub(1) };
    let mut best: Option<f64> = None;
    for k in 0..segments {
        let (m1, m2) = (master[k], master[(k + 1) % n]);
        if let Ok(pr) = project_onto_segment(x, sim.points[m1].position, sim.points[m2].position) {
            if (0.0..=1.0).contains(&pr.beta) && pr.gap.abs() < reach && best.is_none_or(|g| pr.gap.abs() < g.abs()) {
                best = Some(pr.gap);
            }
        }
    }
    best
}

/// Half the summed length of distinct master segments with a penetrating slave point.
pub fn penetrated_half_length(sim: &Simulation) -> f64 {
    let segments: BTreeSet<[usize; 2]> = sim.pairs().iter().filter(|p| p.gap_normal < 0.0).map(|p| p.master).collect();
    0.5 * segments.iter().map(|m| (sim.points[m[1]].position - sim.points[m[0]].position).norm()).sum::<f64>()
}

/// Half length of the penetrated run of the slave outline, with the zero
/// crossing of the gap interpolated linearly at both ends.
pub fn interpolated_half_length(sim: &Simulation, law: usize) -> f64 {
    let law = &sim.laws[law];
    let (mchain, schain) = (&sim.fields[law.master].chain, &sim.fields[law.slave].chain);
    let reach = sim.grid.spacing();
    let slave = &schain.points;
    let n = slave.len();
    let gaps: Vec<f64> = slave
        .iter()
        .map(|&p| {
            gap_to_chain(sim, sim.points[p].position, &mchain.points, mchain.closed, reach).unwrap_or(f64::INFINITY)
        })
        .collect();
    let Some((deepest, _)) = gaps.iter().enumerate().filter(|(_, g)| **g < 0.0).min_by(|a, b| a.1.total_cmp(b.1))
    else {
        return 0.0;
    };
    let mut total = 0.0;
    for dir in [1isize, -1] {
        let mut i = deepest;
        for _ in 0..n {
            let j = (i as isize + dir).rem_euclid(n as isize) as usize;
            let seg = (sim.points[slave[j]].position - sim.points[slave[i]].position).norm();
            if gaps[j] < 0.0 {
                total += seg;
                i = j;
            } else {
                if gaps[j].is_finite() {
                    total += seg * gaps[i] / (gaps[i] - gaps[j]);
                }
                break;
            }
        }
    }
    0.5 * total
}

/// Contact half-length against the Hertz line-contact width at ten equally
/// spaced loading levels, each averaged over a window of a twentieth of the ramp.
pub fn hertz_disks(p: &HertzDisks) -> Result<BenchReport> {
    const LEVELS: usize = 10;
    let mut sim = p.scenario().build()?;
    let window = 0.05 * HertzDisks::RAMP;
    let mut acc = vec![(0.0, 0.0, 0.0, 0usize); LEVELS];
    sim.run(|s, sum| {
        if sum.step % 10 != 0 {
            return Ok(());
        }
        for (k, slot) in acc.iter_mut().enumerate() {
            let tk = HertzDisks::RAMP * (k + 1) as f64 / LEVELS as f64;
            if (sum.time - tk).abs() <= window {
                slot.0 += penetrated_half_length(s);
                slot.1 += interpolated_half_length(s, 0);
                slot.2 += sum.contact_force.norm();
                slot.3 += 1;
            }
        }
        Ok(())
    })?;
    let (e, nu, r0) = (HertzDisks::YOUNGS, HertzDisks::POISSON, HertzDisks::RADIUS);
    let hertz = |f: f64| hertz_disks_contact_halfwidth(f, r0, r0, e, nu, e, nu, 1.0);
    let mut r = BenchReport::new("hertz_disks");
    for (k, &(seg, interp, force, count)) in acc.iter().enumerate() {
        let level = k + 1;
        let count = count as f64;
        let load = p.force * level as f64 / LEVELS as f64;
        let ratio = seg / count / hertz(load);
        if level < LEVELS {
            r.push(Metric::check(
                format!("halflength_ratio_level_{level}"),
                ratio,
                "1 +- 0.15",
                (ratio - 1.0).abs() <= 0.15,
            ));
        } else {
            r.push(Metric::info(format!("halflength_ratio_level_{level}"), ratio));
        }
        r.push(Metric::info(format!("interpolated_ratio_level_{level}"), interp / count / hertz(load)));
        r.push(Metric::info(format!("contact_force_over_load_level_{level}"), force / count / load));
    }
    Ok(r)
}

/// Relative RMSE of the contact-surface normal stress for each grid spacing;
/// consecutive refinements must reduce it.
pub fn hertz_halfplane(p: &HertzPlane, spacings: &[f64]) -> Result<BenchReport> {
    let mut r = BenchReport::new("hertz_halfplane");
    let mut previous: Option<(f64, f64)> = None;
    for &dh in spacings {
        let case = HertzPlane { spacing: dh, ..p.clone() };
        let (rmse, force_ratio) = halfplane_rmse(&case)?;
        let label = format!("{:.3}mm", dh * 1e3);
        r.push(Metric::info(format!("rmse_dh_{label}"), rmse));
        r.push(Metric::info(format!("contact_force_over_load_dh_{label}"), force_ratio));
        if let Some((prev_dh, prev)) = previous {
            r.push(Metric::check(
                format!("rmse_drop_{:.3}mm_to_{label}", prev_dh * 1e3),
                prev - rmse,
                "> 0",
                rmse < prev,
            ));
        }
        previous = Some((dh, rmse));
    }
    Ok(r)
}

/// RMSE over slave boundary points inside the analytical contact width, and
/// the ratio of the simulated contact force to the applied load.
pub fn halfplane_rmse(p: &HertzPlane) -> Result<(f64, f64)> {
    let mut sim = p.scenario().build()?;
    sim.run(|_, _| Ok(()))?;
    let force = -sim.applied_traction(1, sim.time()).y;
    let contact = HalfPlaneContact::rigid_indenter(force, p.radius, HertzPlane::YOUNGS, HertzPlane::POISSON);
    let [cx, cy] = p.center();
    let samples: Vec<(f64, f64)> = sim
        .field_points(1)
        .iter()
        .filter(|q| q.is_boundary && q.position.y < cy - 0.5 * p.radius)
        .map(|q| (q.position.x - cx, q.stress[(1, 1)]))
        .filter(|(s, _)| s.abs() <= contact.half_width)
        .map(|(s, syy)| (syy, contact.stress(s)))
        .collect();
    let carried: f64 = sim.pair_forces().iter().map(|f| f.slave.y).sum();
    Ok((pressure_rmse(samples, contact.peak_pressure), carried / force))
}

/// Total energy drift relative to the initial kinetic energy, and absence of
/// contact force before the first penetration.
pub fn rings(p: &Rings) -> Result<BenchReport> {
    let mut sim = p.scenario().build()?;
    let (mut k0, mut t0, mut drift) = (0.0, 0.0, 0.0f64);
    let mut first_penetration = None;
    let mut early_steps = 0usize;
    let mut final_ratio = f64::NAN;
    sim.run(|s, sum| {
        let total: f64 = sum.energies.iter().map(|e| e.total()).sum();
        if sum.step == 0 {
            k0 = sum.energies.iter().map(|e| e.kinetic).sum();
            t0 = total;
        }
        drift = drift.max((total - t0).abs() / k0);
        final_ratio = total / k0;
        if first_penetration.is_none() {
            if s.pairs().iter().any(|pr| pr.gap_normal < 0.0) {
                first_penetration = Some(sum.time);
            } else if sum.contact_force.norm() != 0.0 {
                early_steps += 1;
            }
        }
        Ok(())
    })?;
    let mut r = BenchReport::new("neo_hookean_rings");
    r.push(Metric::check("max_energy_drift_over_k0", drift, "< 0.05", drift < 0.05));
    r.push(Metric::info("final_energy_over_k0", final_ratio));
    r.push(Metric::info("first_penetration_time_s", first_penetration.unwrap_or(f64::NAN)));
    r.push(Metric::check("steps_with_early_contact_force", early_steps as f64, "== 0", early_steps == 0));
    Ok(r)
}

/// Principal stress difference that marks the arrival of the stress wave in a disk.
pub const ARRIVAL_STRESS: f64 = 1e6;

/// Smoke test: completion, fringe intensity bounds and arrival order of the
/// stress wave from the impactor outward.
pub fn granular(p: &Granular) -> Result<BenchReport> {
    let scenario = p.scenario();
    let disks: Vec<usize> = p
        .disk_names()
        .iter()
        .map(|n| scenario.field_index(n).ok_or_else(|| MpmError::Config(format!("missing disk field {n}"))))
        .collect::<Result<_>>()?;
    let mut sim = scenario.build()?;
    let mut arrival = vec![f64::NAN; disks.len()];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    sim.run(|s, sum| {
        for (k, &f) in disks.iter().enumerate() {
            if arrival[k].is_nan() && s.field_points(f).iter().any(|q| principal_difference(&q.stress) > ARRIVAL_STRESS)
            {
                arrival[k] = sum.time;
            }
        }
        for q in &s.points {
            let v = fringe_field(&q.stress, FRINGE_CONSTANT);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok(())
    })?;
    let name = if p.enclosed { "granular_2" } else { "granular_1" };
    let mut r = BenchReport::new(name);
    r.push(Metric::check(
        "completed_steps",
        sim.step_index() as f64,
        "== configured",
        sim.step_index() == sim.config.n_steps,
    ));
    r.push(Metric::check("fringe_min", lo, ">= 0", lo >= 0.0));
    r.push(Metric::check("fringe_max", hi, "<= 1", hi <= 1.0));
    for (k, &t) in arrival.iter().enumerate() {
        r.push(Metric::info(format!("arrival_time_disk{k}_s"), t));
    }
    for k in 1..arrival.len() {
        let (near, far) = (arrival[k - 1], arrival[k]);
        r.push(Metric::check(format!("arrival_lag_disk{}_to_disk{k}_s", k - 1), far - near, "> 0", far > near));
    }
    if p.enclosed {
        let grains = |f: usize| sim.fields[f].name.starts_with("disk") || sim.fields[f].name == "impactor";
        let mu = sim
            .laws
            .iter()
            .filter(|l| grains(l.master) && grains(l.slave))
            .map(|l| l.friction)
            .fold(f64::NAN, f64::min);
        r.push(Metric::check("grain_friction", mu, "== 0.5", mu == 0.5));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_formats() {
        let mut r = BenchReport::new("demo");
        r.push(Metric::check("a", 0.01, "< 0.02", true));
        r.push(Metric::info("b", 3.0));
        assert!(r.passed());
        let csv = r.to_csv();
        assert!(csv.starts_with("preset,metric,value,threshold,result\n"));
        assert!(csv.contains("demo,a,1.0000000000000000e-2,< 0.02,PASS"));
        assert!(csv.contains("demo,b,3.0000000000000000e0,,info"));
        r.push(Metric::check("c", f64::NAN, "< 1", true));
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
        assert!(r.to_text().contains("overall: FAIL"));
    }

    #[test]
    fn unknown_override_is_rejected() {
        let o = Overrides::parse(["bogus=1"]).unwrap();
        assert!(matches!(run_benchmark("two_bars_impact", &o), Err(MpmError::Config(_))));
        assert!(matches!(run_benchmark("nope", &Overrides::default()), Err(MpmError::Config(_))));
    }
}
