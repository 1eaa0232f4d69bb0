//! Builtin experiments, scenario files, and the scenario-level diagnostics:
//! escape of the heavy Johnny driver, the Prince-Charles blowup, Molly's
//! symmetry, and the quadratic-differential direction field.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drivers::{simulate, DriverKind, DriverPath, DriverSystem, StepControl};
use crate::error::{Error, Result};
use crate::loewner;
use crate::measures::least_squares_slope;
use crate::C64;

pub const BUILTINS: [&str; 8] = [
    "prince_charles",
    "johnny",
    "molly",
    "semicircle",
    "fig2",
    "fig3",
    "fig7",
    "fig8",
];

/// Roots and poles of `Q(z) = prod (z - x_k)^2 prod (z - s_j)^a_j (z - conj s_j)^a_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadDiffConfig {
    /// Double zeros on the real line.
    pub roots: Vec<f64>,
    /// `s_j` as `(re, im)` with `im > 0`.
    pub poles: Vec<(f64, f64)>,
    pub orders: Vec<i32>,
}

impl QuadDiffConfig {
    pub fn validate(&self) -> Result<()> {
        if self.poles.len() != self.orders.len() {
            return Err(Error::InvalidConfig(format!(
                "{} poles but {} orders",
                self.poles.len(),
                self.orders.len()
            )));
        }
        if let Some(&(re, im)) = self.poles.iter().find(|p| !(p.1 > 0.0)) {
            return Err(Error::NotInUpperHalfPlane(C64::new(re, im)));
        }
        Ok(())
    }

    pub fn pole_points(&self) -> Vec<C64> {
        self.poles.iter().map(|&(re, im)| C64::new(re, im)).collect()
    }

    /// `arg Q(z)` as a sum of factor arguments (not reduced).
    pub fn arg_q(&self, z: C64) -> f64 {
        let roots: f64 = self.roots.iter().map(|&x| 2.0 * (z - x).arg()).sum();
        let poles: f64 = self
            .pole_points()
            .iter()
            .zip(&self.orders)
            .map(|(&s, &a)| a as f64 * ((z - s).arg() + (z - s.conj()).arg()))
            .sum();
        roots + poles
    }

    /// `Q(z)`; may over- or underflow for large orders.
    pub fn q(&self, z: C64) -> C64 {
        let mut v = C64::new(1.0, 0.0);
        for &x in &self.roots {
            v *= (z - x) * (z - x);
        }
        for (s, &a) in self.pole_points().iter().zip(&self.orders) {
            v *= ((z - s) * (z - s.conj())).powi(a);
        }
        v
    }

    /// Distance from `z` to the nearest zero or pole of `Q`.
    pub fn singular_distance(&self, z: C64) -> f64 {
        let r = self.roots.iter().map(|&x| (z - x).norm());
        let p = self
            .pole_points()
            .into_iter()
            .zip(&self.orders)
            .filter(|(_, &a)| a != 0)
            .flat_map(|(s, _)| [(z - s).norm(), (z - s.conj()).norm()]);
        r.chain(p).fold(f64::INFINITY, f64::min)
    }

    /// Trajectory direction `-arg Q(z) / 2` reduced to `[0, pi)`.
    pub fn direction(&self, z: C64) -> f64 {
        let theta = (-0.5 * self.arg_q(z)).rem_euclid(std::f64::consts::PI);
        // rem_euclid can return pi itself after rounding
        if theta >= std::f64::consts::PI {
            0.0
        } else {
            theta
        }
    }
}

/// Distance between two directions modulo `pi`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

/// One sample of the trajectory direction field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub z: C64,
    pub theta: f64,
}

/// Minimum distance between a field sample and a zero or pole.
pub const FIELD_CLEARANCE: f64 = 1e-6;

pub fn quad_field(config: &QuadDiffConfig, grid: &[C64]) -> Result<Vec<FieldSample>> {
    config.validate()?;
    if let Some(&z) = grid.iter().find(|&&z| config.singular_distance(z) < FIELD_CLEARANCE) {
        return Err(Error::InvalidConfig(format!(
            "grid point {z} within {FIELD_CLEARANCE} of a zero or pole"
        )));
    }
    Ok(grid
        .iter()
        .map(|&z| FieldSample {
            z,
            theta: config.direction(z),
        })
        .collect())
}

/// Cell-centred `nx x ny` grid on `[x0, x1] x (0, y1]`.
pub fn field_grid(x: (f64, f64), y1: f64, nx: usize, ny: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let im = y1 * (j + 1) as f64 / ny as f64;
        for i in 0..nx {
            let re = x.0 + (x.1 - x.0) * (i as f64 + 0.5) / nx as f64;
            out.push(C64::new(re, im));
        }
    }
    out
}

/// `re_z,im_z,theta` rows.
pub fn field_csv(samples: &[FieldSample]) -> String {
    let mut t = crate::output::CsvTable::new(&["re_z", "im_z", "theta"]);
    for s in samples {
        t.nums(&[s.z.re, s.z.im, s.theta]);
    }
    t.finish()
}

/// A complete, resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: DriverKind,
    pub n: usize,
    pub kappa: f64,
    pub positions: Vec<f64>,
    pub weights: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
    /// Points `(re, im)` pushed through the Loewner flow.
    #[serde(default)]
    pub probes: Vec<(f64, f64)>,
    /// Times at which measure snapshots are written.
    #[serde(default)]
    pub measure_times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadDiffConfig>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.positions.len() != self.n || self.weights.len() != self.n {
            return Err(Error::InvalidConfig(format!(
                "n = {} but {} positions and {} weights",
                self.n,
                self.positions.len(),
                self.weights.len()
            )));
        }
        if let Some(&(re, im)) = self.probes.iter().find(|p| !(p.1 > 0.0)) {
            return Err(Error::NotInUpperHalfPlane(C64::new(re, im)));
        }
        if let Some(t) = self.measure_times.iter().find(|&&t| !(0.0..=self.horizon).contains(&t)) {
            return Err(Error::InvalidConfig(format!("measure time {t} outside [0, {}]", self.horizon)));
        }
        if let Some(q) = &self.quad {
            q.validate()?;
            if self.kind != DriverKind::QuadDiff {
                return Err(Error::InvalidConfig("quad section requires kind quad_diff".into()));
            }
        }
        self.system().map(|_| ())
    }

    pub fn system(&self) -> Result<DriverSystem> {
        let sys = DriverSystem::new(self.kind, self.positions.clone(), self.weights.clone(), self.kappa)?;
        match &self.quad {
            Some(q) => sys.with_poles(q.pole_points(), q.orders.clone()),
            None => Ok(sys),
        }
    }

    pub fn simulate(&self) -> Result<DriverPath> {
        self.validate()?;
        simulate(&self.system()?, self.horizon, self.dt, self.seed, &StepControl::default())
    }

    pub fn probe_points(&self) -> Vec<C64> {
        self.probes.iter().map(|&(re, im)| C64::new(re, im)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `S_N = 1 + (N + 1) / (2N)`.
pub fn prince_charles_s(n: usize) -> f64 {
    1.0 + (n as f64 + 1.0) / (2.0 * n as f64)
}

fn prince_charles_parts(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let s = prince_charles_s(n);
    let x = (1..=n).map(|k| k as f64 / (nf * nf)).collect();
    let l = (1..=n).map(|k| (1.0 + k as f64 / nf) / (s * nf)).collect();
    (x, l)
}

fn johnny_parts(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::InvalidConfig("johnny needs N >= 2".into()));
    }
    let nf = n as f64;
    let mut x: Vec<f64> = (1..n).map(|k| k as f64 / nf).collect();
    let mut l = vec![1.0 / (2.0 * (nf - 1.0)); n - 1];
    x.push(2.0);
    l.push(0.5);
    Ok((x, l))
}

fn molly_parts(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("molly needs odd N = 2K + 1 >= 3, got {n}")));
    }
    let k = (n - 1) / 2;
    let left: Vec<f64> = (0..k).map(|i| -2.0 + i as f64 / k as f64).collect();
    let mut x = left.clone();
    x.push(0.0);
    x.extend(left.iter().rev().map(|v| -v));
    let mut l = vec![1.0 / (4.0 * k as f64); n];
    l[k] = 0.5;
    Ok((x, l))
}

fn semicircle_parts(n: usize) -> (Vec<f64>, Vec<f64>) {
    let x = if n == 1 {
        vec![0.0]
    } else {
        (0..n).map(|k| -1e-3 + 2e-3 * k as f64 / (n - 1) as f64).collect()
    };
    (x, vec![1.0 / n as f64; n])
}

/// Figures 7/8: ten double zeros at `2k/9 - 1` and a pole or zero of order 10 at `i`.
pub fn stream_config(order: i32) -> QuadDiffConfig {
    QuadDiffConfig {
        roots: (0..10).map(|k| 2.0 * k as f64 / 9.0 - 1.0).collect(),
        poles: vec![(0.0, 1.0)],
        orders: vec![order],
    }
}

/// Default driver count of a builtin.
pub fn default_n(name: &str) -> Result<usize> {
    Ok(match name {
        "prince_charles" => 100,
        "johnny" | "molly" | "fig2" | "fig3" => 51,
        "semicircle" => 400,
        "fig7" | "fig8" => 10,
        other => return Err(Error::UnknownScenario(other.into())),
    })
}

/// Builtin scenario `name` with `n` drivers (`None` for the default).
pub fn builtin(name: &str, n: Option<usize>) -> Result<ScenarioConfig> {
    let n = match n {
        Some(n) => n,
        None => default_n(name)?,
    };
    if n == 0 {
        return Err(Error::InvalidConfig("N must be at least 1".into()));
    }
    let base = |kind, (positions, weights): (Vec<f64>, Vec<f64>), kappa, horizon, dt| ScenarioConfig {
        name: name.to_string(),
        kind,
        n,
        kappa,
        positions,
        weights,
        horizon,
        dt,
        seed: 1,
        probes: Vec::new(),
        measure_times: Vec::new(),
        quad: None,
    };
    let cfg = match name {
        "prince_charles" => {
            let mut c = base(DriverKind::MultipleSle, prince_charles_parts(n), 0.0, 0.25, 1e-4);
            c.measure_times = vec![0.0, 0.1, 0.25];
            c
        }
        "johnny" => base(DriverKind::MultipleSle, johnny_parts(n)?, 0.0, 0.5, 1e-4),
        "molly" => base(DriverKind::MultipleSle, molly_parts(n)?, 0.0, 0.5, 1e-4),
        "semicircle" => {
            let mut c = base(DriverKind::Simultaneous, semicircle_parts(n), 0.0, 0.25, 1e-4);
            c.measure_times = vec![0.0, 0.1, 0.25];
            c.probes = vec![(0.0, 1.0), (1.0, 1.0), (-1.0, 2.0)];
            c
        }
        "fig2" => base(DriverKind::MultipleSle, johnny_parts(n)?, 1.0, 1.0, 1e-3),
        "fig3" => base(DriverKind::MultipleSle, molly_parts(n)?, 1.0, 1.0, 1e-3),
        "fig7" | "fig8" => {
            if n != 10 {
                return Err(Error::InvalidConfig(format!("{name} has exactly 10 drivers")));
            }
            let q = stream_config(if name == "fig7" { -10 } else { 10 });
            let mut c = base(DriverKind::QuadDiff, (q.roots.clone(), vec![0.1; 10]), 0.0, 0.2, 1e-4);
            c.quad = Some(q);
            c
        }
        other => return Err(Error::UnknownScenario(other.into())),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Index of the mass-1/2 driver in the Johnny and Molly families.
pub fn heavy_driver(cfg: &ScenarioConfig) -> Option<usize> {
    cfg.weights.iter().position(|&w| w == 0.5)
}

/// One row of the Johnny escape table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeRow {
    pub n: usize,
    pub initial: f64,
    pub value: f64,
    pub strictly_increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeReport {
    pub t: f64,
    pub rows: Vec<EscapeRow>,
    /// Slope of `log(V_NN(t) - 2)` against `log N`.
    pub slope: f64,
}

/// Runs the `kappa = 0` Johnny system for each `n` up to `t`.
pub fn johnny_escape_diagnostic(ns: &[usize], t: f64, dt: f64) -> Result<EscapeReport> {
    let rows = ns
        .par_iter()
        .map(|&n| {
            let mut cfg = builtin("johnny", Some(n))?;
            cfg.kappa = 0.0;
            cfg.horizon = t;
            cfg.dt = dt;
            let path = cfg.simulate()?;
            let heavy: Vec<f64> = path.states.iter().map(|s| s[n - 1]).collect();
            Ok(EscapeRow {
                n,
                initial: heavy[0],
                value: *heavy.last().unwrap(),
                strictly_increasing: heavy.windows(2).all(|w| w[1] > w[0]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), (r.value - 2.0).ln()))
        .collect();
    Ok(EscapeReport {
        t,
        slope: least_squares_slope(&pts),
        rows,
    })
}

/// `T_N(0)` and the measure derivative at `t = 0` for Prince Charles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupRow {
    pub n: usize,
    /// `sum_{j != k} (l_k^2 - l_j^2) / (x_k - x_j)` summed directly.
    pub t_direct: f64,
    /// `2 (N - 1) / S_N`.
    pub t_exact: f64,
    /// `(N^2 - N)(1/N + 1/N^2) / S_N^2`, a lower bound for `T_N(0)`.
    pub t_bound: f64,
    /// `d/dt int f dmu_t` at 0 for `f' = 1` on `[0, 1]`.
    pub dfdt: f64,
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = s + v;
        c += if s.abs() >= v.abs() { (s - t) + v } else { (v - t) + s };
        s = t;
    }
    s + c
}

/// `sum_k l_k f'(x_k) sum_{j != k} 2 (l_k + l_j) / (x_k - x_j)`.
pub fn measure_derivative(x: &[f64], l: &[f64], fprime: impl Fn(f64) -> f64) -> f64 {
    compensated_sum((0..x.len()).flat_map(|k| {
        let fk = fprime(x[k]);
        (0..x.len())
            .filter(move |&j| j != k)
            .map(move |j| l[k] * fk * 2.0 * (l[k] + l[j]) / (x[k] - x[j]))
    }))
}

pub fn prince_charles_blowup(ns: &[usize]) -> Vec<BlowupRow> {
    ns.par_iter()
        .map(|&n| {
            let (x, l) = prince_charles_parts(n);
            let s = prince_charles_s(n);
            let nf = n as f64;
            let t_direct = compensated_sum((0..n).flat_map(|k| {
                let (x, l) = (&x, &l);
                (0..n)
                    .filter(move |&j| j != k)
                    .map(move |j| (l[k] * l[k] - l[j] * l[j]) / (x[k] - x[j]))
            }));
            BlowupRow {
                n,
                t_direct,
                t_exact: 2.0 * (nf - 1.0) / s,
                t_bound: (nf * nf - nf) * (1.0 / nf + 1.0 / (nf * nf)) / (s * s),
                dfdt: measure_derivative(&x, &l, |_| 1.0),
            }
        })
        .collect()
}

/// `max |V_{2K+2-k} + V_k|` and `max |V_{K+1}|` over the whole path.
pub fn molly_symmetry(path: &DriverPath) -> (f64, f64) {
    let n = path.n_drivers();
    let (mut anti, mut centre) = (0.0f64, 0.0f64);
    for s in &path.states {
        for k in 0..n {
            anti = anti.max((s[k] + s[n - 1 - k]).abs());
        }
        centre = centre.max(s[n / 2].abs());
    }
    (anti, centre)
}

/// Per-`N` defect of `M_t(g_t(z)) = M_0(z)` in the pole-free quadratic case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacteristicsRow {
    pub n: usize,
    pub defect: f64,
}

/// `z`-grid for the characteristics check: 5 x 3 on `[-1, 1] x {1, 1.5, 2}`.
pub fn characteristics_grid() -> Vec<C64> {
    let mut g = Vec::new();
    for y in [1.0, 1.5, 2.0] {
        for i in 0..5 {
            g.push(C64::new(-1.0 + 0.5 * i as f64, y));
        }
    }
    g
}

fn transform_at(v: &[f64], l: &[f64], w: C64) -> C64 {
    v.iter().zip(l).map(|(&x, &lam)| 2.0 * lam / (w - x)).sum()
}

/// `max_z |M_{N,t}(g_{N,t}(z)) - M_{N,0}(z)|` with drivers equispaced in
/// `[-1, 1]` (a single driver sits at 0) and `lambda = 1/N`.
pub fn characteristics_check(ns: &[usize], t: f64, dt: f64, grid: &[C64]) -> Result<Vec<CharacteristicsRow>> {
    ns.par_iter()
        .map(|&n| {
            let x: Vec<f64> = if n == 1 {
                vec![0.0]
            } else {
                (0..n).map(|k| -1.0 + 2.0 * k as f64 / (n - 1) as f64).collect()
            };
            let l = vec![1.0 / n as f64; n];
            let sys = DriverSystem::new(DriverKind::QuadDiff, x.clone(), l.clone(), 0.0)?;
            let path = simulate(&sys, t, dt, 0, &StepControl::default())?;
            let vt = path.positions_at(t);
            let mut defect = 0.0f64;
            for &z in grid {
                let g = loewner::flow(&path, z, t)?.last();
                defect = defect.max((transform_at(&vt, &l, g) - transform_at(&x, &l, z)).norm());
            }
            Ok(CharacteristicsRow { n, defect })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{check_assumptions, compose_profile, AtomicMeasure, WeightProfile};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn prince_charles_example() {
        let c = builtin("prince_charles", Some(4)).unwrap();
        let s4 = 1.0 + 5.0 / 8.0;
        assert!((prince_charles_s(4) - s4).abs() < 1e-15);
        for k in 1..=4 {
            let expected = (1.0 + k as f64 / 4.0) / (s4 * 4.0);
            assert!((c.weights[k - 1] - expected).abs() < 1e-15);
            assert_eq!(c.positions[k - 1], k as f64 / 16.0);
        }
    }

    #[test]
    fn johnny_and_molly_examples() {
        let j = builtin("johnny", Some(3)).unwrap();
        assert_eq!(j.positions, vec![1.0 / 3.0, 2.0 / 3.0, 2.0]);
        assert_eq!(j.weights, vec![0.25, 0.25, 0.5]);
        let m = builtin("molly", Some(3)).unwrap();
        assert_eq!(m.positions, vec![-2.0, 0.0, 2.0]);
        assert_eq!(m.weights, vec![0.25, 0.5, 0.25]);
        let m = builtin("molly", Some(51)).unwrap();
        assert_eq!(heavy_driver(&m), Some(25));
        for k in 0..25 {
            assert!((-2.0..=-1.0).contains(&m.positions[k]));
            assert_eq!(m.positions[50 - k], -m.positions[k]);
        }
        assert!(builtin("molly", Some(10)).is_err());
        assert!(builtin("johnny", Some(1)).is_err());
    }

    #[test]
    fn builtin_catalogue() {
        for name in BUILTINS {
            let c = builtin(name, None).unwrap();
            assert_eq!(c.name, name);
            let back = ScenarioConfig::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c);
        }
        assert!(matches!(builtin("nope", None), Err(Error::UnknownScenario(_))));
        let s = builtin("semicircle", Some(5)).unwrap();
        assert_eq!(s.positions.first(), Some(&-1e-3));
        assert_eq!(s.positions.last(), Some(&1e-3));
        assert!(builtin("fig7", Some(11)).is_err());
    }

    #[test]
    fn scenario_file_validation() {
        let mut c = builtin("johnny", Some(5)).unwrap();
        c.positions.swap(0, 1);
        assert!(ScenarioConfig::from_json(&c.to_json()).is_err());
        assert!(ScenarioConfig::from_json("{\"name\": 3}").is_err());
        let mut c = builtin("johnny", Some(5)).unwrap();
        c.probes.push((0.0, -1.0));
        assert!(c.validate().is_err());
    }

    #[test]
    fn assumptions_of_the_examples() {
        for n in [10, 100, 1000] {
            let c = builtin("prince_charles", Some(n)).unwrap();
            let r = check_assumptions(&c.weights, &c.positions);
            assert!(!r.weight_concentrated);
            // N max lambda = 2 / S_N -> 4/3
            assert!((r.c_estimate - 2.0 / prince_charles_s(n)).abs() < 1e-12);
        }
        for name in ["johnny", "molly"] {
            let c = builtin(name, Some(101)).unwrap();
            let r = check_assumptions(&c.weights, &c.positions);
            assert!(r.weight_concentrated);
        }
    }

    #[test]
    fn prince_charles_profile_converges() {
        let limit = |x: f64| 2.0 / 3.0 * (x + x * x / 2.0);
        let mut prev = f64::INFINITY;
        for n in [10, 30, 100, 300, 1000] {
            let c = builtin("prince_charles", Some(n)).unwrap();
            let d = WeightProfile::from_weights(&c.weights).unwrap().sup_distance(limit, 20_001);
            assert!(d <= 2.0 / n as f64, "n = {n}: {d}");
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn composed_profile_reproduces_initial_measures() {
        for name in ["prince_charles", "johnny", "molly"] {
            for n in [11, 101] {
                let c = builtin(name, Some(n)).unwrap();
                let mu = AtomicMeasure::from_parts(&c.positions, &c.weights).unwrap();
                let alpha = AtomicMeasure::empirical(&c.positions).unwrap();
                let f = compose_profile(&WeightProfile::from_weights(&c.weights).unwrap(), &alpha);
                assert_eq!(f.positions(), mu.positions());
                for (a, b) in f.weights().iter().zip(mu.weights()) {
                    assert!((a - b).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn molly_decomposition_and_symmetry() {
        let c = builtin("molly", Some(21)).unwrap();
        let mu = AtomicMeasure::from_parts(&c.positions, &c.weights).unwrap();
        let (x, w): (Vec<f64>, Vec<f64>) = mu.atoms().unzip();
        assert_eq!((x[10], w[10]), (0.0, 0.5));
        for k in 0..10 {
            assert_eq!(x[20 - k], -x[k]);
            assert_eq!(w[20 - k], w[k]);
        }
        let mut c = c;
        c.horizon = 0.1;
        let path = c.simulate().unwrap();
        let (anti, centre) = molly_symmetry(&path);
        assert!(anti <= 1e-10 && centre <= 1e-10, "{anti} {centre}");
    }

    #[test]
    fn blowup_table() {
        let rows = prince_charles_blowup(&[2, 10, 100]);
        for r in &rows {
            assert!((r.t_direct - r.t_exact).abs() <= 1e-12 * r.t_exact);
            assert!((r.dfdt - r.t_exact).abs() <= 1e-10 * r.t_exact);
            assert!(r.t_bound <= r.t_exact);
        }
        // N = 2: lambda = (2/3, 1)/(2 S_2) with S_2 = 7/4
        assert!((rows[0].t_exact - 8.0 / 7.0).abs() < 1e-15);
        assert!((rows[0].t_bound - 24.0 / 49.0).abs() < 1e-15);
        assert!(rows.windows(2).all(|w| w[1].t_direct > w[0].t_direct));
        let (x, l) = prince_charles_parts(20);
        assert_eq!(measure_derivative(&x, &l, |_| 0.0), 0.0);
    }

    #[test]
    fn field_on_the_real_axis_and_at_zeros() {
        for order in [-10, 10] {
            let q = stream_config(order);
            for x in [-2.0, -0.95, 0.05, 0.5, 1.7] {
                assert!(angle_distance(q.direction(C64::new(x, 0.0)), 0.0) < 1e-12);
            }
            for &r in &q.roots {
                let th = q.direction(C64::new(r, 1e-9));
                assert!(angle_distance(th, FRAC_PI_2) < 1e-6, "root {r}: {th}");
            }
        }
        let flat = QuadDiffConfig { roots: vec![], poles: vec![], orders: vec![] };
        assert_eq!(flat.direction(C64::new(0.3, 2.0)), 0.0);
        assert!(quad_field(&stream_config(10), &[C64::new(0.0, 1.0 + 1e-7)]).is_err());
        let grid = field_grid((-2.5, 2.5), 2.5, 200, 100);
        assert_eq!(quad_field(&stream_config(-10), &grid).unwrap().len(), 20_000);
    }

    #[test]
    fn field_matches_q_where_q_is_representable() {
        let q = stream_config(-10);
        for z in [C64::new(0.3, 0.4), C64::new(-1.2, 2.0), C64::new(2.0, 0.7)] {
            let v = q.q(z);
            let theta = (-0.5 * v.arg()).rem_euclid(PI);
            assert!(angle_distance(theta, q.direction(z)) < 1e-9);
            // Q dz^2 > 0 along the direction
            let dz = C64::from_polar(1.0, q.direction(z));
            let w = v * dz * dz;
            assert!(w.re > 0.0 && w.im.abs() <= 1e-9 * w.norm());
        }
    }

    #[test]
    fn characteristics_defect_shrinks_with_n() {
        let grid = characteristics_grid();
        let rows = characteristics_check(&[1, 20, 40], 0.2, 1e-3, &grid).unwrap();
        // single driver: M_t(g_t(z)) = 2 / sqrt((z - x)^2 + 4t)
        let z = C64::new(0.0, 1.0);
        let exact = (2.0 / (z * z + 0.8).sqrt() - 2.0 / z).norm();
        assert!(rows[0].defect >= exact - 1e-6);
        let ratio = rows[1].defect / rows[2].defect;
        assert!((1.6..=2.4).contains(&ratio), "ratio {ratio}");
        assert_eq!(characteristics_check(&[5], 0.0, 1e-3, &grid).unwrap()[0].defect, 0.0);
    }

    #[test]
    fn johnny_escape_small() {
        let r = johnny_escape_diagnostic(&[5, 9], 0.2, 1e-3).unwrap();
        for row in &r.rows {
            assert_eq!(row.initial, 2.0);
            assert!(row.strictly_increasing);
        }
        assert!(r.rows[1].value > r.rows[0].value);
    }

    proptest! {
        #[test]
        fn direction_in_range_and_continuous(re in -2.4f64..2.4, im in 0.01f64..2.4) {
            let q = stream_config(-10);
            let z = C64::new(re, im);
            prop_assume!(q.singular_distance(z) > 0.05);
            let th = q.direction(z);
            prop_assert!((0.0..PI).contains(&th));
            let near = q.direction(z + C64::new(1e-7, 1e-7));
            prop_assert!(angle_distance(th, near) < 1e-4);
        }
    }
}
