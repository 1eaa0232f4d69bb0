//! Forward Loewner flow `dg/dt = sum_k 2 l_k / (g - V_k(t))` driven by a
//! sampled [`DriverPath`], plus swallow times, capacity fits and tip tracing.

use rayon::prelude::*;

use crate::drivers::DriverPath;
use crate::error::{Error, Result};
use crate::output::{fmt_f64, Cell, CsvTable};
use crate::C64;

/// A probe is swallowed once `Im g` drops below this.
pub const SWALLOW_TOLERANCE: f64 = 1e-6;
/// Relative displacement allowed per RK4 step: `h |F| <= STEP_FRACTION * dist`.
pub const STEP_FRACTION: f64 = 1e-3;
/// Lift above the driver used to start the reverse flow in [`trace`].
pub const TRACE_LIFT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeStatus {
    Alive,
    Swallowed,
}

impl ProbeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProbeStatus::Alive => "alive",
            ProbeStatus::Swallowed => "swallowed",
        }
    }
}

/// Trajectory of one point under the flow, sampled at driver grid times.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowProbe {
    pub z0: C64,
    pub times: Vec<f64>,
    pub values: Vec<C64>,
    pub swallow_time: Option<f64>,
    pub status: ProbeStatus,
}

impl FlowProbe {
    /// Last computed value of `g_t(z0)`.
    pub fn last(&self) -> C64 {
        *self.values.last().unwrap()
    }

    /// `t,re_g,im_g,status`.
    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&["t", "re_g", "im_g", "status"]);
        let n = self.times.len();
        for (i, (time, g)) in self.times.iter().zip(&self.values).enumerate() {
            let status = if i + 1 == n { self.status } else { ProbeStatus::Alive };
            t.row(&[Cell::Num(*time), Cell::Num(g.re), Cell::Num(g.im), Cell::Text(status.as_str())]);
        }
        t.finish()
    }
}

/// Interpolated driver positions on one grid interval.
struct Segment<'a> {
    t0: f64,
    dt: f64,
    a: &'a [f64],
    b: &'a [f64],
    weights: &'a [f64],
}

impl Segment<'_> {
    fn field(&self, g: C64, t: f64, sign: f64) -> (C64, f64) {
        let s = if self.dt > 0.0 { ((t - self.t0) / self.dt).clamp(0.0, 1.0) } else { 0.0 };
        let mut f = C64::new(0.0, 0.0);
        let mut dist = f64::INFINITY;
        for ((x, y), &l) in self.a.iter().zip(self.b).zip(self.weights) {
            let v = x + s * (y - x);
            let d = g - v;
            dist = dist.min(d.norm());
            f += 2.0 * l / d;
        }
        (sign * f, dist)
    }
}

/// Classical RK4 over the time increment `h` (negative for the reverse flow,
/// where `sign = -1` flips the field and the step length is `|h|`).
fn rk4(seg: &Segment<'_>, g: C64, t: f64, h: f64, sign: f64) -> C64 {
    let len = h.abs();
    let k1 = seg.field(g, t, sign).0;
    let k2 = seg.field(g + 0.5 * len * k1, t + 0.5 * h, sign).0;
    let k3 = seg.field(g + 0.5 * len * k2, t + 0.5 * h, sign).0;
    let k4 = seg.field(g + len * k3, t + h, sign).0;
    g + len / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

fn stable_step(seg: &Segment<'_>, g: C64, t: f64, sign: f64, remaining: f64) -> f64 {
    let (f, dist) = seg.field(g, t, sign);
    let norm = f.norm();
    let limit = if norm > 0.0 { STEP_FRACTION * dist / norm } else { f64::INFINITY };
    remaining.min(limit)
}

/// Integrates the flow of `z0` up to `horizon` (clamped to the path horizon).
pub fn flow(path: &DriverPath, z0: C64, horizon: f64) -> Result<FlowProbe> {
    if !(z0.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane(z0));
    }
    if !(horizon >= 0.0) {
        return Err(Error::InvalidConfig(format!("horizon {horizon} must be >= 0")));
    }
    let end = horizon.min(path.horizon());
    let mut probe = FlowProbe {
        z0,
        times: vec![0.0],
        values: vec![z0],
        swallow_time: None,
        status: ProbeStatus::Alive,
    };
    let mut g = z0;
    let intervals = path.times.len().saturating_sub(1);
    for i in 0..intervals {
        let t0 = path.times[i];
        if t0 >= end {
            break;
        }
        let t1 = path.times[i + 1].min(end);
        let seg = Segment {
            t0,
            dt: path.times[i + 1] - t0,
            a: &path.states[i],
            b: &path.states[i + 1],
            weights: &path.weights,
        };
        let mut t = t0;
        while t < t1 {
            let h = stable_step(&seg, g, t, 1.0, t1 - t);
            let next = rk4(&seg, g, t, h, 1.0);
            if next.im < SWALLOW_TOLERANCE || !next.im.is_finite() {
                let frac = if next.im.is_finite() && g.im > next.im {
                    ((g.im - SWALLOW_TOLERANCE) / (g.im - next.im)).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                let ts = t + frac * h;
                let gs = if next.is_finite() { g + frac * (next - g) } else { g };
                probe.times.push(ts);
                probe.values.push(gs);
                probe.swallow_time = Some(ts);
                probe.status = ProbeStatus::Swallowed;
                return Ok(probe);
            }
            g = next;
            // land exactly on the interval end to avoid drift in t
            t = if t1 - (t + h) <= 1e-15 * t1.max(1.0) { t1 } else { t + h };
        }
        probe.times.push(t1);
        probe.values.push(g);
    }
    Ok(probe)
}

/// [`flow`] for every point of `grid`, evaluated in parallel.
pub fn grid_flow(path: &DriverPath, grid: &[C64], horizon: f64) -> Result<Vec<FlowProbe>> {
    grid.par_iter().map(|&z| flow(path, z, horizon)).collect()
}

/// `re_z0,im_z0,re_g,im_g,swallow_time` (swallow time `nan` for live probes).
pub fn grid_csv(probes: &[FlowProbe]) -> String {
    let mut t = CsvTable::new(&["re_z0", "im_z0", "re_g", "im_g", "swallow_time"]);
    for p in probes {
        let g = p.last();
        let sw = p.swallow_time.map(fmt_f64).unwrap_or_else(|| "nan".into());
        t.row(&[
            Cell::Num(p.z0.re),
            Cell::Num(p.z0.im),
            Cell::Num(g.re),
            Cell::Num(g.im),
            Cell::Text(&sw),
        ]);
    }
    t.finish()
}

/// Fitted `g_t(z) ≈ z + b/z` at large `|z|`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FlowExpansion {
    pub t: f64,
    pub b: f64,
    /// `max |z|^2 |g_t(z) - z - b/z|` over the sample points.
    pub remainder: f64,
}

/// Sample directions for the capacity fit.
pub const HCAP_ANGLES: [f64; 3] = [
    std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_2,
    3.0 * std::f64::consts::FRAC_PI_4,
];

/// Least-squares fit of the half-plane capacity `b` of `K_t`.
pub fn hcap_fit(path: &DriverPath, t: f64, radii: &[f64]) -> Result<FlowExpansion> {
    if radii.is_empty() {
        return Err(Error::InvalidConfig("need at least one radius".into()));
    }
    let points: Vec<C64> = radii
        .iter()
        .flat_map(|&r| HCAP_ANGLES.iter().map(move |&th| C64::from_polar(r, th)))
        .collect();
    let images: Vec<C64> = grid_flow(path, &points, t)?.iter().map(FlowProbe::last).collect();
    let (mut num, mut den) = (0.0, 0.0);
    for (&z, &g) in points.iter().zip(&images) {
        let basis = 1.0 / z;
        num += (basis.conj() * (g - z)).re;
        den += basis.norm_sqr();
    }
    let b = num / den;
    let remainder = points
        .iter()
        .zip(&images)
        .map(|(&z, &g)| (g - z - b / z).norm() * z.norm_sqr())
        .fold(0.0, f64::max);
    Ok(FlowExpansion { t, b, remainder })
}

fn reverse_flow(path: &DriverPath, k: usize, t: f64, lift: f64) -> Result<C64> {
    let start = path.positions_at(t)[k];
    let mut h = C64::new(start, lift);
    if t <= 0.0 {
        return Ok(h);
    }
    // reverse time tau = t - s runs from t down to 0
    let mut tau = t;
    let mut i = path.interval_of(t);
    loop {
        let t0 = path.times[i];
        let seg = Segment {
            t0,
            dt: path.times[i + 1] - t0,
            a: &path.states[i],
            b: &path.states[i + 1],
            weights: &path.weights,
        };
        while tau > t0 {
            let step = stable_step(&seg, h, tau, -1.0, tau - t0);
            h = rk4(&seg, h, tau, -step, -1.0);
            if !(h.im > 0.0) || !h.is_finite() {
                return Err(Error::ReverseFlowEscaped { time: t - tau });
            }
            tau = if tau - step - t0 <= 1e-15 * t.max(1.0) { t0 } else { tau - step };
        }
        if i == 0 {
            break;
        }
        i -= 1;
    }
    Ok(h)
}

/// Tip `gamma_k(t)` of the k-th curve (0-based), by reverse-time flow from
/// `V_k(t) + i eps` with order-2 Richardson extrapolation over `{eps, eps/2}`.
pub fn trace(path: &DriverPath, k: usize, t: f64) -> Result<C64> {
    if k >= path.n_drivers() {
        return Err(Error::InvalidConfig(format!("driver index {k} out of range")));
    }
    if !(0.0..=path.horizon() * (1.0 + 1e-12)).contains(&t) {
        return Err(Error::InvalidConfig(format!("t = {t} outside the driving horizon")));
    }
    trace_with_lift(path, k, t, TRACE_LIFT)
}

pub fn trace_with_lift(path: &DriverPath, k: usize, t: f64, lift: f64) -> Result<C64> {
    let coarse = reverse_flow(path, k, t, lift)?;
    let fine = reverse_flow(path, k, t, 0.5 * lift)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drivers::{simulate, DriverKind, DriverSystem, StepControl};

    fn single_slit(horizon: f64, dt: f64) -> DriverPath {
        DriverPath::constant(&[0.0], &[1.0], horizon, dt).unwrap()
    }

    /// Closed form for the single slit at 0: the branch of sqrt(z^2 + 4t) in H.
    fn slit_closed_form(z: C64, t: f64) -> C64 {
        let w = (z * z + 4.0 * t).sqrt();
        if w.im < 0.0 {
            -w
        } else {
            w
        }
    }

    #[test]
    fn single_slit_closed_form() {
        let path = single_slit(1.0, 1e-3);
        let z = C64::new(1.0, 1.0);
        let p = flow(&path, z, 1.0).unwrap();
        assert_eq!(p.status, ProbeStatus::Alive);
        for (t, g) in p.times.iter().zip(&p.values) {
            assert!((g - slit_closed_form(z, *t)).norm() < 1e-10);
        }
    }

    #[test]
    fn i_is_swallowed_at_a_quarter() {
        let path = single_slit(1.0, 1e-3);
        let p = flow(&path, C64::new(0.0, 1.0), 1.0).unwrap();
        assert_eq!(p.status, ProbeStatus::Swallowed);
        assert!((p.swallow_time.unwrap() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn zero_horizon_is_identity() {
        let path = single_slit(1.0, 1e-3);
        let z = C64::new(-0.3, 0.2);
        assert_eq!(flow(&path, z, 0.0).unwrap().last(), z);
        assert!(flow(&path, C64::new(0.0, -1.0), 1.0).is_err());
    }

    #[test]
    fn imaginary_part_is_nonincreasing() {
        let sys = DriverSystem::new(DriverKind::MultipleSle, vec![-1.0, 0.0, 1.5], vec![0.2, 0.5, 0.3], 2.0).unwrap();
        let path = simulate(&sys, 1.0, 1e-3, 5, &StepControl::default()).unwrap();
        for z in [C64::new(0.1, 0.5), C64::new(-2.0, 0.1), C64::new(3.0, 2.0)] {
            let p = flow(&path, z, 1.0).unwrap();
            for w in p.values.windows(2) {
                assert!(w[1].im <= w[0].im + 1e-15);
            }
        }
    }

    #[test]
    fn swallow_time_monotone_along_vertical_line() {
        let path = single_slit(1.1, 1e-3);
        let mut prev = 0.0;
        for y in [0.2, 0.5, 1.0, 1.5, 2.0] {
            let p = flow(&path, C64::new(0.0, y), 1.1).unwrap();
            let ts = p.swallow_time.unwrap();
            assert!(ts > prev);
            assert!((ts - y * y / 4.0).abs() < 1e-4, "y = {y}: {ts}");
            prev = ts;
        }
        // off the slit nothing is swallowed
        assert!(flow(&path, C64::new(0.3, 0.5), 1.1).unwrap().swallow_time.is_none());
    }

    #[test]
    fn capacity_of_the_single_slit() {
        let path = single_slit(1.0, 1e-3);
        let fit = hcap_fit(&path, 1.0, &[1e3, 2e3]).unwrap();
        assert!((fit.b - 2.0).abs() < 1e-5, "b = {}", fit.b);
        let fit0 = hcap_fit(&path, 0.0, &[200.0]).unwrap();
        assert_eq!(fit0.b, 0.0);
    }

    #[test]
    fn hydrodynamic_remainder_is_stable_in_radius() {
        let sys = DriverSystem::new(DriverKind::MultipleSle, vec![-0.5, 0.7], vec![0.4, 0.6], 0.0).unwrap();
        let path = simulate(&sys, 0.5, 1e-3, 0, &StepControl::default()).unwrap();
        let c1 = hcap_fit(&path, 0.5, &[50.0]).unwrap().remainder;
        let c2 = hcap_fit(&path, 0.5, &[100.0]).unwrap().remainder;
        assert!(c1 > 0.0 && (c2 / c1 - 1.0).abs() < 0.1, "{c1} {c2}");
    }

    #[test]
    fn trace_single_slit() {
        let path = single_slit(1.0, 1e-3);
        let tip = trace(&path, 0, 1.0).unwrap();
        assert!((tip - C64::new(0.0, 2.0)).norm() < 1e-8, "{tip}");
        let tip0 = trace(&path, 0, 0.0).unwrap();
        assert!(tip0.re == 0.0 && tip0.im < TRACE_LIFT);
    }

    #[test]
    fn trace_is_mirror_symmetric_for_symmetric_pair() {
        let sys = DriverSystem::new(DriverKind::MultipleSle, vec![-1.0, 1.0], vec![0.5, 0.5], 0.0).unwrap();
        let path = simulate(&sys, 0.5, 1e-3, 0, &StepControl::default()).unwrap();
        let a = trace(&path, 0, 0.5).unwrap();
        let b = trace(&path, 1, 0.5).unwrap();
        assert!((a.re + b.re).abs() < 1e-8 && (a.im - b.im).abs() < 1e-8, "{a} {b}");
        assert!(a.im > 0.5);
    }

    #[test]
    fn grid_flow_row_matches_closed_form() {
        let path = single_slit(0.5, 1e-3);
        let grid: Vec<C64> = (0..9).map(|i| C64::new(-2.0 + 0.5 * i as f64, 2.0)).collect();
        let probes = grid_flow(&path, &grid, 0.5).unwrap();
        for p in &probes {
            assert!((p.last() - slit_closed_form(p.z0, 0.5)).norm() <= 1e-8);
        }
        let csv = grid_csv(&probes);
        assert_eq!(csv.lines().count(), 10);
    }
}
