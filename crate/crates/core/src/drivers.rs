//! Coupled driving functions and their time integration.
//!
//! Three systems share one integrator:
//!
//! * `multiple_sle`: `dV_k = sum_{j!=k} 2(l_k + l_j)/(V_k - V_j) dt + sqrt(kappa l_k) dB_k`
//! * `simultaneous`: the same with every `l_k = 1/N`
//! * `quad_diff`: `dV_k/dt = sum_{j!=k} 2 l_j/(V_k - V_j) + 2 Re sum_j a_j l_k/(V_k - S_j)`,
//!   with the poles carried by the flow, `dS_j/dt = sum_k 2 l_k/(S_j - V_k)`.
//!
//! Integration is an additive-noise Heun predictor-corrector on a uniform
//! reporting grid. A step that would reorder drivers, move a driver by more
//! than a fraction of its gap, or let the noise swamp a gap is split in two
//! (up to [`StepControl::max_halvings`] times); the Brownian increment of the
//! split interval is refined by midpoint bridge sampling so that the sampled
//! path does not depend on the splitting history.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;
use crate::noise::{mix64, CounterNoise};
use crate::output::{Cell, CsvTable};
use crate::C64;

/// Gaps below this are collisions.
pub const COLLISION_GAP: f64 = 1e-9;
const WEIGHT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriverKind {
    MultipleSle,
    Simultaneous,
    QuadDiff,
}

/// Snapshot of the driver system at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct DriverSystem {
    kind: DriverKind,
    positions: Vec<f64>,
    weights: Vec<f64>,
    kappa: f64,
    poles: Vec<C64>,
    orders: Vec<i32>,
    time: f64,
}

impl DriverSystem {
    pub fn new(kind: DriverKind, positions: Vec<f64>, weights: Vec<f64>, kappa: f64) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(Error::InvalidConfig("need at least one driver".into()));
        }
        if weights.len() != n {
            return Err(Error::InvalidConfig(format!(
                "{n} drivers but {} weights",
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
            return Err(Error::InvalidConfig("weights must lie in [0, 1]".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidConfig(format!("weights sum to {total}, not 1")));
        }
        if kind == DriverKind::Simultaneous
            && weights.iter().any(|&w| (w - 1.0 / n as f64).abs() > WEIGHT_TOLERANCE)
        {
            return Err(Error::InvalidConfig("simultaneous drivers need weights 1/N".into()));
        }
        if !(0.0..=4.0).contains(&kappa) {
            return Err(Error::InvalidConfig(format!("kappa = {kappa} outside [0, 4]")));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("non-finite initial position".into()));
        }
        check_order(&positions, 0.0)?;
        let kappa = if kind == DriverKind::QuadDiff { 0.0 } else { kappa };
        Ok(Self {
            kind,
            positions,
            weights,
            kappa,
            poles: Vec::new(),
            orders: Vec::new(),
            time: 0.0,
        })
    }

    /// Attaches poles/zeros `s_j` of integer order to a `quad_diff` system.
    pub fn with_poles(mut self, poles: Vec<C64>, orders: Vec<i32>) -> Result<Self> {
        if self.kind != DriverKind::QuadDiff && !poles.is_empty() {
            return Err(Error::InvalidConfig("only quad_diff systems carry poles".into()));
        }
        if poles.len() != orders.len() {
            return Err(Error::InvalidConfig("one order per pole".into()));
        }
        if let Some(p) = poles.iter().find(|p| p.im <= 0.0) {
            return Err(Error::NotInUpperHalfPlane(*p));
        }
        self.poles = poles;
        self.orders = orders;
        Ok(self)
    }

    pub fn kind(&self) -> DriverKind {
        self.kind
    }
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn poles(&self) -> &[C64] {
        &self.poles
    }
    pub fn orders(&self) -> &[i32] {
        &self.orders
    }
    pub fn time(&self) -> f64 {
        self.time
    }
    pub fn len(&self) -> usize {
        self.positions.len()
    }
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Driver measure `sum_k l_k delta_{V_k}`.
    pub fn measure(&self) -> AtomicMeasure {
        AtomicMeasure::from_parts(&self.positions, &self.weights).expect("validated weights")
    }

    fn velocity(&self, v: &[f64], s: &[C64]) -> (Vec<f64>, Vec<C64>) {
        match self.kind {
            DriverKind::MultipleSle | DriverKind::Simultaneous => {
                (sle_drift_unchecked(v, &self.weights), Vec::new())
            }
            DriverKind::QuadDiff => (
                quad_drift_unchecked(v, &self.weights, s, &self.orders),
                pole_velocity(s, v, &self.weights),
            ),
        }
    }
}

fn check_order(v: &[f64], time: f64) -> Result<()> {
    for (k, w) in v.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if !(gap >= COLLISION_GAP) {
            return Err(Error::Collision {
                time,
                left: k,
                right: k + 1,
                gap,
            });
        }
    }
    Ok(())
}

fn sle_drift_unchecked(v: &[f64], lambdas: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    for k in 0..n {
        let (vk, lk) = (v[k], lambdas[k]);
        let (head, tail) = d.split_at_mut(k + 1);
        // four independent partial sums let the inner loop vectorize
        let mut acc = [0.0f64; 4];
        let mut vs = v[k + 1..].chunks_exact(4);
        let mut ls = lambdas[k + 1..].chunks_exact(4);
        let mut ds = tail.chunks_exact_mut(4);
        for ((vc, lc), dc) in (&mut vs).zip(&mut ls).zip(&mut ds) {
            for i in 0..4 {
                let c = 2.0 * (lk + lc[i]) / (vk - vc[i]);
                acc[i] += c;
                dc[i] -= c;
            }
        }
        let mut sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
        for ((&vj, &lj), dj) in vs.remainder().iter().zip(ls.remainder()).zip(ds.into_remainder()) {
            let c = 2.0 * (lk + lj) / (vk - vj);
            sum += c;
            *dj -= c;
        }
        head[k] += sum;
    }
    d
}

fn quad_drift_unchecked(v: &[f64], lambdas: &[f64], s: &[C64], alpha: &[i32]) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    for k in 0..n {
        for j in k + 1..n {
            let r = 1.0 / (v[k] - v[j]);
            d[k] += 2.0 * lambdas[j] * r;
            d[j] -= 2.0 * lambdas[k] * r;
        }
    }
    for k in 0..n {
        let pole_sum: f64 = s
            .iter()
            .zip(alpha)
            .map(|(&sj, &a)| a as f64 * (1.0 / (v[k] - sj)).re)
            .sum();
        d[k] += 2.0 * lambdas[k] * pole_sum;
    }
    d
}

/// `sum_{j!=k} 2(l_k + l_j)/(V_k - V_j)` for each k.
pub fn drift_multiple_sle(v: &[f64], lambdas: &[f64]) -> Result<Vec<f64>> {
    if v.len() != lambdas.len() {
        return Err(Error::InvalidConfig("positions and weights differ in length".into()));
    }
    check_order(v, 0.0)?;
    Ok(sle_drift_unchecked(v, lambdas))
}

/// Driver drift of the quadratic-differential system.
pub fn drift_quad_diff(v: &[f64], lambdas: &[f64], s: &[C64], alpha: &[i32]) -> Result<Vec<f64>> {
    if v.len() != lambdas.len() || s.len() != alpha.len() {
        return Err(Error::InvalidConfig("mismatched input lengths".into()));
    }
    check_order(v, 0.0)?;
    if let Some(p) = s.iter().find(|p| p.im <= 0.0) {
        return Err(Error::NotInUpperHalfPlane(*p));
    }
    Ok(quad_drift_unchecked(v, lambdas, s, alpha))
}

/// Loewner vector field at the poles: `dS_j/dt = sum_k 2 l_k / (S_j - V_k)`.
pub fn pole_velocity(s: &[C64], v: &[f64], lambdas: &[f64]) -> Vec<C64> {
    s.iter()
        .map(|&sj| v.iter().zip(lambdas).map(|(&vk, &l)| 2.0 * l / (sj - vk)).sum())
        .collect()
}

/// Step-size controller settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub max_halvings: u32,
    pub collision_gap: f64,
    /// Largest accepted drift displacement as a fraction of the adjacent gap.
    pub move_fraction: f64,
    /// Split a step while some gap is below `factor * sqrt(kappa * l * dt)`.
    pub noise_gap_factor: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            max_halvings: 40,
            collision_gap: COLLISION_GAP,
            move_fraction: 0.25,
            noise_gap_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reject {
    /// Soft: accuracy triggers, may be accepted at the finest level.
    Accuracy,
    Reorder(usize),
    Pole(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub substeps: u64,
    pub rejections: u64,
    pub max_level: u32,
}

fn min_gap_around(v: &[f64], k: usize) -> f64 {
    let left = if k > 0 { v[k] - v[k - 1] } else { f64::INFINITY };
    let right = if k + 1 < v.len() { v[k + 1] - v[k] } else { f64::INFINITY };
    left.min(right)
}

impl StepControl {
    /// One Heun step of length `h` with Brownian increments `dw`.
    fn propose(&self, sys: &DriverSystem, h: f64, dw: &[f64]) -> (DriverSystem, Option<Reject>) {
        let v = &sys.positions;
        let n = v.len();
        let noisy = sys.kappa > 0.0;
        let mut soft = false;

        if noisy {
            for k in 0..n.saturating_sub(1) {
                let l = sys.weights[k].max(sys.weights[k + 1]);
                if v[k + 1] - v[k] < self.noise_gap_factor * (sys.kappa * l * h).sqrt() {
                    soft = true;
                    break;
                }
            }
        }

        let (a, b) = sys.velocity(v, &sys.poles);
        if n > 1 {
            for k in 0..n {
                if (a[k] * h).abs() > self.move_fraction * min_gap_around(v, k) {
                    soft = true;
                    break;
                }
            }
        }
        for (j, &sj) in sys.poles.iter().enumerate() {
            let dist = v.iter().map(|&vk| (sj - vk).norm()).fold(f64::INFINITY, f64::min);
            if (b[j] * h).norm() > self.move_fraction * dist.min(sj.im) {
                soft = true;
            }
        }

        let sigma: Vec<f64> = sys.weights.iter().map(|&l| (sys.kappa * l).sqrt()).collect();
        let noise_term = |k: usize| if noisy { sigma[k] * dw[k] } else { 0.0 };

        let vp: Vec<f64> = (0..n).map(|k| v[k] + a[k] * h + noise_term(k)).collect();
        let sp: Vec<C64> = sys.poles.iter().zip(&b).map(|(&s, &bs)| s + bs * h).collect();
        let mut candidate = sys.clone();
        candidate.time = sys.time + h;

        if let Some(k) = first_reorder(&vp, self.collision_gap) {
            return (candidate, Some(Reject::Reorder(k)));
        }
        if let Some(j) = sp.iter().position(|s| s.im <= 0.0) {
            return (candidate, Some(Reject::Pole(j)));
        }

        let (ap, bp) = sys.velocity(&vp, &sp);
        let vn: Vec<f64> = (0..n)
            .map(|k| v[k] + 0.5 * (a[k] + ap[k]) * h + noise_term(k))
            .collect();
        let sn: Vec<C64> = sys
            .poles
            .iter()
            .enumerate()
            .map(|(j, &s)| s + 0.5 * (b[j] + bp[j]) * h)
            .collect();
        if n > 1 {
            for k in 0..n {
                if (0.5 * (a[k] + ap[k]) * h).abs() > self.move_fraction * min_gap_around(v, k) {
                    soft = true;
                    break;
                }
            }
        }
        candidate.positions = vn;
        candidate.poles = sn;
        if let Some(k) = first_reorder(&candidate.positions, self.collision_gap) {
            return (candidate, Some(Reject::Reorder(k)));
        }
        if let Some(j) = candidate.poles.iter().position(|s| s.im <= 0.0) {
            return (candidate, Some(Reject::Pole(j)));
        }
        (candidate, soft.then_some(Reject::Accuracy))
    }

    /// Advances over `h`, splitting recursively on rejection.
    #[allow(clippy::too_many_arguments)]
    fn advance(
        &self,
        sys: &DriverSystem,
        h: f64,
        dw: &[f64],
        level: u32,
        index: u64,
        bridge: &dyn Fn(usize, u32, u64) -> f64,
        stats: &mut StepStats,
    ) -> Result<DriverSystem> {
        let (candidate, verdict) = self.propose(sys, h, dw);
        let at_floor = level >= self.max_halvings;
        match verdict {
            None => {
                stats.substeps += 1;
                stats.max_level = stats.max_level.max(level);
                return Ok(candidate);
            }
            Some(Reject::Accuracy) if at_floor => {
                stats.substeps += 1;
                stats.max_level = stats.max_level.max(level);
                return Ok(candidate);
            }
            Some(Reject::Reorder(k)) if at_floor => {
                let gap = sys.positions[k + 1] - sys.positions[k];
                return Err(if gap < self.collision_gap {
                    Error::Collision {
                        time: sys.time,
                        left: k,
                        right: k + 1,
                        gap,
                    }
                } else {
                    Error::OrderViolation {
                        time: sys.time,
                        left: k,
                        right: k + 1,
                    }
                });
            }
            Some(Reject::Pole(j)) if at_floor => {
                return Err(Error::PoleEscaped {
                    time: sys.time,
                    index: j,
                })
            }
            Some(_) => {}
        }
        stats.rejections += 1;
        let half = 0.5 * h;
        let (left, right): (Vec<f64>, Vec<f64>) = if sys.kappa > 0.0 {
            let spread = 0.5 * h.sqrt();
            (0..dw.len())
                .map(|k| {
                    let l = 0.5 * dw[k] + spread * bridge(k, level + 1, 2 * index);
                    (l, dw[k] - l)
                })
                .unzip()
        } else {
            (dw.to_vec(), dw.to_vec())
        };
        let mid = self.advance(sys, half, &left, level + 1, 2 * index, bridge, stats)?;
        self.advance(&mid, half, &right, level + 1, 2 * index + 1, bridge, stats)
    }
}

fn first_reorder(v: &[f64], min_gap: f64) -> Option<usize> {
    v.windows(2).position(|w| !(w[1] - w[0] >= min_gap))
}

/// Advances `sys` by `dt` with standard normal `noise` (one per driver).
///
/// Rejected steps are split internally; refinement noise is derived
/// deterministically from the supplied noise and the current time.
pub fn step(sys: &DriverSystem, dt: f64, noise: &[f64]) -> Result<DriverSystem> {
    if !(dt > 0.0) {
        return Err(Error::InvalidConfig(format!("step size {dt} must be positive")));
    }
    if noise.len() != sys.len() {
        return Err(Error::InvalidConfig("one noise value per driver".into()));
    }
    let key = noise
        .iter()
        .fold(mix64(sys.time.to_bits()), |h, x| mix64(h ^ x.to_bits()));
    let refine = CounterNoise::new(key);
    let bridge = |k: usize, level: u32, index: u64| refine.normal(k, 0, level, index);
    let dw: Vec<f64> = noise.iter().map(|x| x * dt.sqrt()).collect();
    let mut stats = StepStats::default();
    StepControl::default().advance(sys, dt, &dw, 0, 0, &bridge, &mut stats)
}

/// Sampled driver path on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DriverPath {
    pub kind: DriverKind,
    pub weights: Vec<f64>,
    pub kappa: f64,
    pub orders: Vec<i32>,
    pub seed: u64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub poles: Vec<Vec<C64>>,
    pub stats: StepStats,
}

impl DriverPath {
    /// Drivers frozen at `positions` on `[0, horizon]`.
    pub fn constant(positions: &[f64], weights: &[f64], horizon: f64, dt: f64) -> Result<Self> {
        let sys = DriverSystem::new(DriverKind::MultipleSle, positions.to_vec(), weights.to_vec(), 0.0)?;
        let (n, dt) = grid_size(horizon, dt)?;
        Ok(Self {
            kind: sys.kind,
            weights: weights.to_vec(),
            kappa: 0.0,
            orders: Vec::new(),
            seed: 0,
            dt,
            times: (0..=n).map(|i| i as f64 * dt).collect(),
            states: vec![positions.to_vec(); n + 1],
            poles: vec![Vec::new(); n + 1],
            stats: StepStats::default(),
        })
    }

    pub fn n_drivers(&self) -> usize {
        self.weights.len()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Grid index whose time equals `t` up to rounding.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let i = (t / self.dt).round();
        if i < 0.0 || i as usize >= self.times.len() {
            return None;
        }
        let i = i as usize;
        ((self.times[i] - t).abs() <= 1e-9 * self.dt).then_some(i)
    }

    /// Grid interval `[times[i], times[i+1]]` containing `t` (clamped).
    pub fn interval_of(&self, t: f64) -> usize {
        let last = self.times.len() - 1;
        if last == 0 {
            return 0;
        }
        ((t / self.dt).floor().max(0.0) as usize).min(last - 1)
    }

    /// Driver positions at time `t`, linearly interpolated between samples.
    pub fn positions_at(&self, t: f64) -> Vec<f64> {
        if self.times.len() == 1 {
            return self.states[0].clone();
        }
        let i = self.interval_of(t);
        let s = ((t - self.times[i]) / self.dt).clamp(0.0, 1.0);
        let (a, b) = (&self.states[i], &self.states[i + 1]);
        a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
    }

    pub fn measure(&self, i: usize) -> AtomicMeasure {
        AtomicMeasure::from_parts(&self.states[i], &self.weights).expect("validated weights")
    }

    pub fn empirical(&self, i: usize) -> AtomicMeasure {
        AtomicMeasure::empirical(&self.states[i]).expect("nonempty")
    }

    /// `time,k,value` with 1-based driver index.
    pub fn drivers_csv(&self) -> String {
        let mut t = CsvTable::new(&["time", "k", "value"]);
        for (time, state) in self.times.iter().zip(&self.states) {
            for (k, v) in state.iter().enumerate() {
                t.row(&[Cell::Num(*time), Cell::Int(k as i64 + 1), Cell::Num(*v)]);
            }
        }
        t.finish()
    }

    /// `time,j,re,im` with 1-based pole index.
    pub fn poles_csv(&self) -> String {
        let mut t = CsvTable::new(&["time", "j", "re", "im"]);
        for (time, poles) in self.times.iter().zip(&self.poles) {
            for (j, s) in poles.iter().enumerate() {
                t.row(&[
                    Cell::Num(*time),
                    Cell::Int(j as i64 + 1),
                    Cell::Num(s.re),
                    Cell::Num(s.im),
                ]);
            }
        }
        t.finish()
    }
}

fn grid_size(horizon: f64, dt: f64) -> Result<(usize, f64)> {
    if !(horizon >= 0.0) || !(dt > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "need horizon >= 0 and dt > 0, got {horizon} and {dt}"
        )));
    }
    let steps = (horizon / dt - 1e-9).ceil().max(0.0) as usize;
    if steps == 0 {
        return Ok((0, dt));
    }
    Ok((steps, horizon / steps as f64))
}

/// Integrates `initial` on `[0, horizon]`, reporting every `dt`.
///
/// When `horizon/dt` is not an integer the reporting step is shrunk to
/// `horizon / ceil(horizon/dt)`.
pub fn simulate(
    initial: &DriverSystem,
    horizon: f64,
    dt: f64,
    seed: u64,
    control: &StepControl,
) -> Result<DriverPath> {
    let (steps, dt) = grid_size(horizon, dt)?;
    let noise = CounterNoise::new(seed);
    let n = initial.len();
    let mut sys = initial.clone();
    sys.time = 0.0;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut poles = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(sys.positions.clone());
    poles.push(sys.poles.clone());
    let mut stats = StepStats::default();
    let sqrt_dt = dt.sqrt();
    for i in 0..steps {
        let step_id = i as u64;
        let dw: Vec<f64> = if sys.kappa > 0.0 {
            (0..n).map(|k| sqrt_dt * noise.normal(k, step_id, 0, 0)).collect()
        } else {
            vec![0.0; n]
        };
        let bridge = |k: usize, level: u32, index: u64| noise.normal(k, step_id, level, index);
        sys = control.advance(&sys, dt, &dw, 0, 0, &bridge, &mut stats)?;
        let t = (i + 1) as f64 * dt;
        sys.time = t;
        times.push(t);
        states.push(sys.positions.clone());
        poles.push(sys.poles.clone());
    }
    Ok(DriverPath {
        kind: initial.kind,
        weights: initial.weights.clone(),
        kappa: initial.kappa,
        orders: initial.orders.clone(),
        seed,
        dt,
        times,
        states,
        poles,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn sle_drift_examples() {
        let d = drift_multiple_sle(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert!(close(&d, &[-1.0, 1.0], 1e-15));
        assert_eq!(drift_multiple_sle(&[0.3], &[1.0]).unwrap(), vec![0.0]);
        let t = 1.0 / 3.0;
        let d = drift_multiple_sle(&[-1.0, 0.0, 1.0], &[t, t, t]).unwrap();
        assert!(close(&d, &[-2.0, 0.0, 2.0], 1e-14));
    }

    #[test]
    fn drift_rejects_collisions() {
        assert!(matches!(
            drift_multiple_sle(&[0.0, 1e-12], &[0.5, 0.5]),
            Err(Error::Collision { .. })
        ));
        assert!(drift_multiple_sle(&[1.0, 0.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn quad_drift_examples() {
        let d = drift_quad_diff(&[-1.0, 1.0], &[0.5, 0.5], &[], &[]).unwrap();
        assert!(close(&d, &[-0.5, 0.5], 1e-15));
        let i = C64::new(0.0, 1.0);
        let d = drift_quad_diff(&[0.0], &[1.0], &[i], &[2]).unwrap();
        assert!(d[0].abs() < 1e-15);
        let d = drift_quad_diff(&[1.0], &[1.0], &[i], &[2]).unwrap();
        assert!((d[0] - 2.0).abs() < 1e-15);
        assert!(matches!(
            drift_quad_diff(&[0.0], &[1.0], &[C64::new(0.0, -1.0)], &[1]),
            Err(Error::NotInUpperHalfPlane(_))
        ));
    }

    #[test]
    fn step_examples() {
        let single = DriverSystem::new(DriverKind::MultipleSle, vec![0.0], vec![1.0], 0.0).unwrap();
        assert_eq!(step(&single, 0.1, &[0.7]).unwrap().positions(), &[0.0]);

        let pair = DriverSystem::new(DriverKind::MultipleSle, vec![-1.0, 1.0], vec![0.5, 0.5], 0.0).unwrap();
        let next = step(&pair, 0.01, &[0.0, 0.0]).unwrap();
        assert!(close(next.positions(), &[-1.01, 1.01], 1e-4));

        let pole = DriverSystem::new(DriverKind::QuadDiff, vec![0.0], vec![1.0], 0.0)
            .unwrap()
            .with_poles(vec![C64::new(0.0, 1.0)], vec![0])
            .unwrap();
        let dt = 1e-4;
        let next = step(&pole, dt, &[0.0]).unwrap();
        let moved = next.poles()[0] - C64::new(0.0, 1.0);
        assert!((moved - C64::new(0.0, -2.0 * dt)).norm() < 1e-7);
    }

    #[test]
    fn step_rejects_bad_input() {
        let pair = DriverSystem::new(DriverKind::MultipleSle, vec![-1.0, 1.0], vec![0.5, 0.5], 1.0).unwrap();
        assert!(step(&pair, 0.0, &[0.0, 0.0]).is_err());
        assert!(step(&pair, 0.1, &[0.0]).is_err());
    }

    #[test]
    fn construction_validates() {
        assert!(DriverSystem::new(DriverKind::MultipleSle, vec![1.0, 0.0], vec![0.5, 0.5], 0.0).is_err());
        assert!(DriverSystem::new(DriverKind::MultipleSle, vec![0.0, 1.0], vec![0.5, 0.6], 0.0).is_err());
        assert!(DriverSystem::new(DriverKind::MultipleSle, vec![0.0, 1.0], vec![0.5, 0.5], 5.0).is_err());
        assert!(DriverSystem::new(DriverKind::Simultaneous, vec![0.0, 1.0], vec![0.4, 0.6], 0.0).is_err());
        let q = DriverSystem::new(DriverKind::QuadDiff, vec![0.0, 1.0], vec![0.5, 0.5], 2.0).unwrap();
        assert_eq!(q.kappa(), 0.0);
    }

    #[test]
    fn symmetric_pair_matches_square_root() {
        let pair = DriverSystem::new(DriverKind::MultipleSle, vec![-1.0, 1.0], vec![0.5, 0.5], 0.0).unwrap();
        let path = simulate(&pair, 1.0, 1e-4, 0, &StepControl::default()).unwrap();
        let err = path
            .times
            .iter()
            .zip(&path.states)
            .map(|(t, s)| (s[1] - (1.0 + 2.0 * t).sqrt()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "sup error {err}");
    }

    #[test]
    fn tight_start_spreads_without_reordering() {
        let n = 50;
        let pos: Vec<f64> = (0..n).map(|k| -1e-3 + 2e-3 * k as f64 / (n - 1) as f64).collect();
        let sys = DriverSystem::new(DriverKind::Simultaneous, pos, vec![1.0 / n as f64; n], 0.0).unwrap();
        let path = simulate(&sys, 0.05, 1e-3, 0, &StepControl::default()).unwrap();
        assert!(path.stats.max_level > 5);
        for s in &path.states {
            assert!(s.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn noisy_runs_are_bit_reproducible() {
        let sys = DriverSystem::new(
            DriverKind::MultipleSle,
            vec![-1.0, -0.2, 0.5, 2.0],
            vec![0.1, 0.2, 0.3, 0.4],
            2.0,
        )
        .unwrap();
        let a = simulate(&sys, 0.5, 1e-3, 99, &StepControl::default()).unwrap();
        let b = simulate(&sys, 0.5, 1e-3, 99, &StepControl::default()).unwrap();
        assert_eq!(a, b);
        let c = simulate(&sys, 0.5, 1e-3, 100, &StepControl::default()).unwrap();
        assert_ne!(a.states, c.states);
        assert_eq!(a.drivers_csv(), b.drivers_csv());
    }

    #[test]
    fn grid_is_uniform_and_starts_at_initial_state() {
        let sys = DriverSystem::new(DriverKind::MultipleSle, vec![-1.0, 1.0], vec![0.5, 0.5], 1.0).unwrap();
        let path = simulate(&sys, 0.25, 0.1, 3, &StepControl::default()).unwrap();
        assert_eq!(path.times.len(), 4);
        assert!((path.dt - 0.25 / 3.0).abs() < 1e-15);
        assert_eq!(path.states[0], vec![-1.0, 1.0]);
        assert_eq!(path.index_of(path.times[2]), Some(2));
    }
}
