//! Cross-checks the two-bar impact characteristics table against an
//! independent lumped-mass leapfrog integrator with unilateral contact.

use ebs_mpm::oracles::impact_wave_dimensionless;

/// Dimensionless bars (rho = c = E = 1): bar 1 on [0, 1] moving at unit speed,
/// bar 2 on [1, 3] at rest. Courant number one makes the scheme exact on its grid.
struct TwoBars {
    dx: f64,
    u: [Vec<f64>; 2],
    v: [Vec<f64>; 2],
    m: [Vec<f64>; 2],
}

impl TwoBars {
    fn new(per_unit: usize) -> Self {
        let dx = 1.0 / per_unit as f64;
        let make = |cells: usize, speed: f64| {
            let mut m = vec![dx; cells + 1];
            m[0] = 0.5 * dx;
            m[cells] = 0.5 * dx;
            (vec![0.0; cells + 1], vec![speed; cells + 1], m)
        };
        let (u1, v1, m1) = make(per_unit, 1.0);
        let (u2, v2, m2) = make(2 * per_unit, 0.0);
        Self { dx, u: [u1, u2], v: [v1, v2], m: [m1, m2] }
    }

    fn stress(&self, bar: usize, e: usize) -> f64 {
        (self.u[bar][e + 1] - self.u[bar][e]) / self.dx
    }

    fn step(&mut self) {
        let dt = self.dx;
        for bar in 0..2 {
            let n = self.u[bar].len();
            let mut f = vec![0.0; n];
            for e in 0..n - 1 {
                let s = self.stress(bar, e);
                f[e] += s;
                f[e + 1] -= s;
            }
            for i in 0..n {
                self.v[bar][i] += dt * f[i] / self.m[bar][i];
            }
        }
        let last = self.u[0].len() - 1;
        let gap = (self.u[1][0] + dt * self.v[1][0]) - (self.u[0][last] + dt * self.v[0][last]);
        if gap < 0.0 {
            let (ma, mb) = (self.m[0][last], self.m[1][0]);
            let common = (ma * self.v[0][last] + mb * self.v[1][0]) / (ma + mb);
            self.v[0][last] = common;
            self.v[1][0] = common;
        }
        for bar in 0..2 {
            for i in 0..self.u[bar].len() {
                self.u[bar][i] += dt * self.v[bar][i];
            }
        }
    }

    /// Velocity and stress at reference coordinate `x`, averaged over a few cells.
    fn sample(&self, x: f64) -> (f64, f64) {
        let (bar, local) = if x < 1.0 { (0, x) } else { (1, x - 1.0) };
        let e = ((local / self.dx) as usize).min(self.u[bar].len() - 2);
        let span = 2;
        let (lo, hi) = (e.saturating_sub(span), (e + span).min(self.u[bar].len() - 2));
        let count = (hi - lo + 1) as f64;
        let v = (lo..=hi).map(|k| 0.5 * (self.v[bar][k] + self.v[bar][k + 1])).sum::<f64>() / count;
        let s = (lo..=hi).map(|k| self.stress(bar, k)).sum::<f64>() / count;
        (v, s)
    }
}

fn far_from_fronts(x: f64, t: f64, margin: f64) -> bool {
    let here = impact_wave_dimensionless(x, t);
    [
        (-margin, 0.0),
        (margin, 0.0),
        (0.0, -margin),
        (0.0, margin),
        (margin, margin),
        (-margin, -margin),
        (margin, -margin),
        (-margin, margin),
    ]
    .iter()
    .all(|&(dx, dt)| impact_wave_dimensionless(x + dx, t + dt) == here)
        && (x - 1.0).abs() > margin
}

#[test]
fn characteristics_table_matches_leapfrog_integrator() {
    let per_unit = 800;
    let mut bars = TwoBars::new(per_unit);
    let mut step = 0usize;
    let mut checked = 0;
    for &t in &[0.5, 1.25, 1.75, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5] {
        let target = (t * per_unit as f64).round() as usize;
        while step < target {
            bars.step();
            step += 1;
        }
        for k in 1..60 {
            let x = k as f64 * 0.05;
            if !far_from_fronts(x, t, 0.02) {
                continue;
            }
            let (v_ref, s_ref) = impact_wave_dimensionless(x, t);
            let (v, s) = bars.sample(x);
            assert!((v - v_ref).abs() < 1e-2, "velocity at x={x}, t={t}: {v} vs {v_ref}");
            assert!((s - s_ref).abs() < 1e-2, "stress at x={x}, t={t}: {s} vs {s_ref}");
            checked += 1;
        }
    }
    assert!(checked > 300, "only {checked} samples checked");
}

#[test]
fn bars_separate_after_four_transit_times() {
    let per_unit = 400;
    let mut bars = TwoBars::new(per_unit);
    let mut last_contact = 0.0;
    for n in 1..=(6 * per_unit) {
        bars.step();
        let end = bars.u[0].len() - 1;
        let compressed = bars.stress(0, end - 1) < -1e-6
            || (bars.u[1][0] - bars.u[0][end]).abs() < 1e-9 && bars.v[1][0] <= bars.v[0][end] + 1e-12;
        if compressed {
            last_contact = n as f64 / per_unit as f64;
        }
    }
    assert!((last_contact - 4.0).abs() < 0.02, "last contact at {last_contact}");
    let mean = |bar: usize| {
        let m: f64 = bars.m[bar].iter().sum();
        bars.m[bar].iter().zip(&bars.v[bar]).map(|(m, v)| m * v).sum::<f64>() / m
    };
    assert!(mean(0).abs() < 1e-9);
    assert!((mean(1) - 0.5).abs() < 1e-9);
}
