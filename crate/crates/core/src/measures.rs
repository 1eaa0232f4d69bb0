//! Atomic measures on the real line and the functionals built on them.
//!
//! The driver measure `mu_{N,t} = sum_k lambda_k delta_{V_k(t)}` and the
//! empirical measure `alpha_{N,t} = sum_k (1/N) delta_{V_k(t)}` are both
//! [`AtomicMeasure`]s. Their distribution functions are related by the
//! weight profile `L_N` ([`WeightProfile`]) through `F = L_N ∘ G`.

use crate::error::{Error, Result};
use crate::output::{Cell, CsvTable};
use crate::C64;

/// Atoms closer than this are merged.
pub const MERGE_DISTANCE: f64 = 1e-14;
/// Tolerance on the total mass of a probability measure.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Weighted point masses with strictly increasing positions.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    positions: Vec<f64>,
    weights: Vec<f64>,
    /// Running sums of `weights`; `cumulative[i]` is the mass of atoms `0..=i`.
    cumulative: Vec<f64>,
    total: f64,
}

impl AtomicMeasure {
    /// Probability measure from `(position, weight)` pairs in any order.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let m = Self::scaled(atoms)?;
        if (m.total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "weights sum to {} instead of 1",
                m.total
            )));
        }
        Ok(m)
    }

    /// Finite measure of arbitrary total mass.
    pub fn scaled(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        for &(x, w) in &atoms {
            if !x.is_finite() || !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidConfig(format!("bad atom ({x}, {w})")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut positions: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut weights: Vec<f64> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match positions.last() {
                Some(&last) if x - last < MERGE_DISTANCE => *weights.last_mut().unwrap() += w,
                _ => {
                    positions.push(x);
                    weights.push(w);
                }
            }
        }
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(Self {
            positions,
            weights,
            cumulative,
            total: acc,
        })
    }

    /// `sum_k weights[k] delta_{positions[k]}`.
    pub fn from_parts(positions: &[f64], weights: &[f64]) -> Result<Self> {
        if positions.len() != weights.len() {
            return Err(Error::InvalidConfig(format!(
                "{} positions but {} weights",
                positions.len(),
                weights.len()
            )));
        }
        Self::new(positions.iter().copied().zip(weights.iter().copied()))
    }

    /// Uniform weights `1/N` on the given positions.
    pub fn empirical(positions: &[f64]) -> Result<Self> {
        let w = 1.0 / positions.len() as f64;
        Self::new(positions.iter().map(|&x| (x, w)))
    }

    pub fn dirac(x: f64) -> Self {
        Self::new([(x, 1.0)]).expect("a unit atom is a probability measure")
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.positions.iter().copied().zip(self.weights.iter().copied())
    }

    /// `m(-inf, x]`, right-continuous.
    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.positions.partition_point(|&p| p <= x);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1]
        }
    }

    /// `sum_k 2 w_k / (z - x_k)`; requires `Im z > 0`.
    pub fn cauchy(&self, z: C64) -> Result<C64> {
        if z.im <= 0.0 {
            return Err(Error::NotInUpperHalfPlane(z));
        }
        Ok(self.cauchy_unchecked(z))
    }

    pub(crate) fn cauchy_unchecked(&self, z: C64) -> C64 {
        self.atoms().map(|(x, w)| 2.0 * w / (z - x)).sum()
    }

    /// z-derivative of [`cauchy`](Self::cauchy).
    pub(crate) fn cauchy_dz_unchecked(&self, z: C64) -> C64 {
        self.atoms()
            .map(|(x, w)| {
                let d = z - x;
                -2.0 * w / (d * d)
            })
            .sum()
    }

    /// `int f dm` for a real function.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms().map(|(x, w)| w * f(x)).sum()
    }

    /// `position,weight` table, ascending.
    pub fn atoms_csv(&self) -> String {
        let mut t = CsvTable::new(&["position", "weight"]);
        for (x, w) in self.atoms() {
            t.nums(&[x, w]);
        }
        t.finish()
    }

    /// `x,F` table at the given abscissae (sorted ascending first).
    pub fn cdf_csv(&self, xs: &[f64]) -> String {
        let mut xs = xs.to_vec();
        xs.sort_by(f64::total_cmp);
        let mut t = CsvTable::new(&["x", "F"]);
        for x in xs {
            t.row(&[Cell::Num(x), Cell::Num(self.cdf(x))]);
        }
        t.finish()
    }
}

/// Piecewise-linear nondecreasing map `L: [0,1] -> [0,1]` with `L(0)=0`, `L(1)=1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    knots: Vec<(f64, f64)>,
}

impl WeightProfile {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidConfig("profile needs at least two knots".into()));
        }
        let (u0, l0) = knots[0];
        let (u1, l1) = *knots.last().unwrap();
        if u0 != 0.0 || u1 != 1.0 {
            return Err(Error::InvalidConfig("profile knots must span [0, 1]".into()));
        }
        if l0.abs() > MASS_TOLERANCE || (l1 - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "profile must satisfy L(0)=0 and L(1)=1, got {l0} and {l1}"
            )));
        }
        for pair in knots.windows(2) {
            if pair[1].0 <= pair[0].0 || pair[1].1 < pair[0].1 {
                return Err(Error::InvalidConfig(
                    "profile knots must be strictly increasing in u and nondecreasing in L".into(),
                ));
            }
        }
        Ok(Self { knots })
    }

    pub fn identity() -> Self {
        Self {
            knots: vec![(0.0, 0.0), (1.0, 1.0)],
        }
    }

    /// `L_N(k/N) = sum_{j<=k} lambda_j`, interpolated linearly.
    pub fn from_weights(lambdas: &[f64]) -> Result<Self> {
        let n = lambdas.len();
        if n == 0 {
            return Err(Error::InvalidConfig("empty weight list".into()));
        }
        let mut knots = Vec::with_capacity(n + 1);
        knots.push((0.0, 0.0));
        let mut acc = 0.0;
        for (k, &l) in lambdas.iter().enumerate() {
            acc += l;
            let u = if k + 1 == n { 1.0 } else { (k + 1) as f64 / n as f64 };
            knots.push((u, acc));
        }
        Self::new(knots)
    }

    /// Samples a continuous profile at `n + 1` equispaced knots.
    pub fn sample(l: impl Fn(f64) -> f64, n: usize) -> Result<Self> {
        let knots = (0..=n)
            .map(|k| {
                let u = k as f64 / n as f64;
                (u, l(u))
            })
            .collect();
        Self::new(knots)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.knots.partition_point(|&(ku, _)| ku <= u);
        if i == 0 {
            return self.knots[0].1;
        }
        if i == self.knots.len() {
            return self.knots[i - 1].1;
        }
        let (a, la) = self.knots[i - 1];
        let (b, lb) = self.knots[i];
        la + (lb - la) * (u - a) / (b - a)
    }

    /// `sup_u |L(u) - other(u)|` sampled on the union of knots and a fine grid.
    pub fn sup_distance(&self, other: impl Fn(f64) -> f64, samples: usize) -> f64 {
        let grid = (0..=samples).map(|k| k as f64 / samples as f64);
        self.knots
            .iter()
            .map(|k| k.0)
            .chain(grid)
            .map(|u| (self.eval(u) - other(u)).abs())
            .fold(0.0, f64::max)
    }
}

/// The measure whose distribution function is `L ∘ G`, `G` the cdf of `m`.
pub fn compose_profile(profile: &WeightProfile, m: &AtomicMeasure) -> AtomicMeasure {
    let mut below = 0.0;
    let atoms: Vec<(f64, f64)> = m
        .atoms()
        .zip(m.cumulative.iter())
        .map(|((x, _), &g)| {
            let w = profile.eval(g) - profile.eval(below);
            below = g;
            (x, w)
        })
        .collect();
    AtomicMeasure::scaled(atoms).expect("profile increments are nonnegative")
}

/// Density estimate `-Im M(x + i eps) / (2 pi)` on the given abscissae.
///
/// `transform` is twice a Cauchy transform. The estimate is the Poisson
/// smoothing of the true density at height `eps`; no extrapolation is done.
pub fn stieltjes_invert(transform: impl Fn(C64) -> C64, xs: &[f64], eps: f64) -> Vec<f64> {
    assert!(eps > 0.0, "inversion height must be positive");
    xs.iter()
        .map(|&x| -transform(C64::new(x, eps)).im / (2.0 * std::f64::consts::PI))
        .collect()
}

/// Wasserstein-1 distance `int |F_a - F_b| dx`, exact for atomic measures.
pub fn wasserstein1(a: &AtomicMeasure, b: &AtomicMeasure) -> f64 {
    let mut xs: Vec<f64> = a.positions().iter().chain(b.positions()).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.windows(2)
        .map(|w| (a.cdf(w[0]) - b.cdf(w[0])).abs() * (w[1] - w[0]))
        .sum()
}

/// Growth function used for the moment condition: `sqrt(1 + x^2)`.
pub fn moment_weight(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AssumptionReport {
    pub n: usize,
    pub max_weight: f64,
    /// `N * max_k lambda_k`, the smallest admissible constant for this N.
    pub c_estimate: f64,
    /// `int sqrt(1+x^2) d alpha` with `alpha` the empirical measure.
    pub moment: f64,
    /// Set when `c_estimate > sqrt(N)`: one atom keeps weight well above `1/N`.
    pub weight_concentrated: bool,
}

/// Empirical version of the weight-decay and moment conditions. Never fails;
/// violations are flagged.
pub fn check_assumptions(lambdas: &[f64], positions: &[f64]) -> AssumptionReport {
    let n = lambdas.len();
    let max_weight = lambdas.iter().copied().fold(0.0, f64::max);
    let c_estimate = n as f64 * max_weight;
    let moment = if positions.is_empty() {
        0.0
    } else {
        positions.iter().map(|&x| moment_weight(x)).sum::<f64>() / positions.len() as f64
    };
    AssumptionReport {
        n,
        max_weight,
        c_estimate,
        moment,
        weight_concentrated: c_estimate > (n as f64).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AssumptionScan {
    /// Least-squares slope of `log C_N` against `log N`.
    pub c_growth_exponent: f64,
    pub c_unbounded: bool,
    pub max_moment: f64,
}

/// Looks at [`check_assumptions`] across N: a bounded C has slope near 0.
pub fn assumption_scan(reports: &[AssumptionReport]) -> AssumptionScan {
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .map(|r| ((r.n as f64).ln(), r.c_estimate.ln()))
        .collect();
    let slope = least_squares_slope(&pts);
    AssumptionScan {
        c_growth_exponent: slope,
        c_unbounded: slope > 0.5,
        max_moment: reports.iter().map(|r| r.moment).fold(0.0, f64::max),
    }
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Complex test function with two bounded derivatives.
pub trait TestFunction: Sync {
    fn d1(&self, x: f64) -> C64;
    fn d2(&self, x: f64) -> C64;
    fn value(&self, x: f64) -> C64;
}

/// `f(x) = 2 / (z - x)` for a fixed `z` in the upper half-plane.
#[derive(Debug, Clone, Copy)]
pub struct CauchyKernel {
    pub z: C64,
}

impl TestFunction for CauchyKernel {
    fn value(&self, x: f64) -> C64 {
        2.0 / (self.z - x)
    }
    fn d1(&self, x: f64) -> C64 {
        let d = self.z - x;
        2.0 / (d * d)
    }
    fn d2(&self, x: f64) -> C64 {
        let d = self.z - x;
        4.0 / (d * d * d)
    }
}

/// `2 int int (f'(x) - f'(y)) / (x - y) d alpha(x) d mu(y)`, with `f''` on the diagonal.
pub fn interaction_term(f: &dyn TestFunction, alpha: &AtomicMeasure, mu: &AtomicMeasure) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (x, a) in alpha.atoms() {
        let fx = f.d1(x);
        for (y, m) in mu.atoms() {
            let q = if (x - y).abs() < MERGE_DISTANCE {
                f.d2(x)
            } else {
                (fx - f.d1(y)) / (x - y)
            };
            acc += a * m * q;
        }
    }
    2.0 * acc
}

/// Residual of the weak evolution equation for `alpha_t` at grid time `t`.
///
/// `times` must be uniform and contain `t` at an interior index; the time
/// derivative uses a centered difference.
pub fn mckean_residual(
    mu_path: &[AtomicMeasure],
    alpha_path: &[AtomicMeasure],
    times: &[f64],
    f: &dyn TestFunction,
    t: f64,
) -> Result<f64> {
    if mu_path.len() != times.len() || alpha_path.len() != times.len() || times.len() < 3 {
        return Err(Error::InvalidConfig("path lengths must match the time grid".into()));
    }
    let step = times[1] - times[0];
    let i = ((t - times[0]) / step).round() as isize;
    if i < 1 || i as usize >= times.len() - 1 || (times[i as usize] - t).abs() > 1e-9 * step.max(1.0) {
        return Err(Error::InvalidConfig(format!("t = {t} is not an interior grid time")));
    }
    let i = i as usize;
    let integral = |m: &AtomicMeasure| -> C64 { m.atoms().map(|(x, w)| w * f.value(x)).sum() };
    let lhs = (integral(&alpha_path[i + 1]) - integral(&alpha_path[i - 1]))
        / (times[i + 1] - times[i - 1]);
    let rhs = interaction_term(f, &alpha_path[i], &mu_path[i]);
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair() -> AtomicMeasure {
        AtomicMeasure::new([(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn cdf_examples() {
        let d = AtomicMeasure::dirac(0.0);
        assert_eq!(d.cdf(-1.0), 0.0);
        assert_eq!(d.cdf(0.0), 1.0);
        assert_eq!(pair().cdf(0.0), 0.5);
    }

    #[test]
    fn rejects_non_probability() {
        assert!(AtomicMeasure::new([(0.0, 0.5)]).is_err());
        assert!(AtomicMeasure::new([(0.0, -0.5), (1.0, 1.5)]).is_err());
        let s = AtomicMeasure::scaled([(0.0, 0.5)]).unwrap();
        assert_eq!(s.total_mass(), 0.5);
    }

    #[test]
    fn merges_close_atoms() {
        let m = AtomicMeasure::new([(1.0, 0.25), (0.0, 0.5), (1.0 + 1e-15, 0.25)]).unwrap();
        assert_eq!(m.positions(), &[0.0, 1.0]);
        assert_eq!(m.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn compose_examples() {
        let m = AtomicMeasure::new([(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let squared = WeightProfile::sample(|u| u * u, 2).unwrap();
        let c = compose_profile(&squared, &m);
        assert!((c.weights()[0] - 0.25).abs() < 1e-15);
        assert!((c.weights()[1] - 0.75).abs() < 1e-15);
        assert_eq!(compose_profile(&WeightProfile::identity(), &pair()), pair());
    }

    #[test]
    fn cauchy_examples() {
        let i = C64::new(0.0, 1.0);
        let d = AtomicMeasure::dirac(0.0);
        assert!((d.cauchy(i).unwrap() - C64::new(0.0, -2.0)).norm() < 1e-15);
        // 1/(2i+1) + 1/(2i-1) = -4i/5
        let v = pair().cauchy(C64::new(0.0, 2.0)).unwrap();
        assert!((v - C64::new(0.0, -0.8)).norm() < 1e-15);
        let y = 1e6;
        assert!((d.cauchy(C64::new(0.0, y)).unwrap().norm() - 2.0 / y).abs() < 1e-20);
        assert!(matches!(d.cauchy(C64::new(1.0, 0.0)), Err(Error::NotInUpperHalfPlane(_))));
    }

    #[test]
    fn stieltjes_lorentzian_peak() {
        let d = AtomicMeasure::dirac(0.0);
        let rho = stieltjes_invert(|z| d.cauchy_unchecked(z), &[0.0], 0.1);
        assert!((rho[0] - 1.0 / (0.1 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn wasserstein_examples() {
        let d0 = AtomicMeasure::dirac(0.0);
        let d1 = AtomicMeasure::dirac(1.0);
        assert!((wasserstein1(&d0, &d1) - 1.0).abs() < 1e-15);
        assert_eq!(wasserstein1(&pair(), &pair()), 0.0);
        let spread = AtomicMeasure::new([(0.0, 0.5), (2.0, 0.5)]).unwrap();
        assert!((wasserstein1(&spread, &d1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn assumption_examples() {
        let n = 8;
        let uniform = vec![1.0 / n as f64; n];
        let pos: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
        let r = check_assumptions(&uniform, &pos);
        assert!((r.c_estimate - 1.0).abs() < 1e-12);
        assert!(!r.weight_concentrated);
        assert!(r.moment <= 2f64.sqrt());

        // half the mass on one atom
        let n = 20;
        let mut w = vec![1.0 / (2.0 * (n - 1) as f64); n];
        w[n - 1] = 0.5;
        let r = check_assumptions(&w, &pos);
        assert!((r.c_estimate - n as f64 / 2.0).abs() < 1e-12);
        assert!(r.weight_concentrated);
    }

    #[test]
    fn scan_detects_growth() {
        let reports: Vec<_> = [10usize, 100, 1000]
            .iter()
            .map(|&n| {
                let mut w = vec![1.0 / (2.0 * (n - 1) as f64); n];
                w[n - 1] = 0.5;
                check_assumptions(&w, &vec![0.0; n])
            })
            .collect();
        let scan = assumption_scan(&reports);
        assert!((scan.c_growth_exponent - 1.0).abs() < 1e-9);
        assert!(scan.c_unbounded);
    }

    /// `sin(x)^3`: flat to second order at the origin.
    struct SinCubed;
    impl TestFunction for SinCubed {
        fn value(&self, x: f64) -> C64 {
            C64::new(x.sin().powi(3), 0.0)
        }
        fn d1(&self, x: f64) -> C64 {
            C64::new(3.0 * x.sin().powi(2) * x.cos(), 0.0)
        }
        fn d2(&self, x: f64) -> C64 {
            let (s, c) = x.sin_cos();
            C64::new(6.0 * s * c * c - 3.0 * s * s * s, 0.0)
        }
    }

    #[test]
    fn mckean_constant_paths_equal_rhs() {
        let mu = AtomicMeasure::new([(-1.0, 0.3), (0.5, 0.7)]).unwrap();
        let alpha = AtomicMeasure::empirical(&[-1.0, 0.5]).unwrap();
        let times = [0.0, 0.1, 0.2];
        let f = CauchyKernel { z: C64::new(0.2, 1.0) };
        let r = mckean_residual(
            &[mu.clone(), mu.clone(), mu.clone()],
            &[alpha.clone(), alpha.clone(), alpha.clone()],
            &times,
            &f,
            0.1,
        )
        .unwrap();
        assert!((r - interaction_term(&f, &alpha, &mu).norm()).abs() < 1e-14);
    }

    #[test]
    fn mckean_single_particle_flat_test_function() {
        let d = AtomicMeasure::dirac(0.0);
        let path = vec![d.clone(), d.clone(), d];
        let r = mckean_residual(&path, &path, &[0.0, 0.5, 1.0], &SinCubed, 0.5).unwrap();
        assert!(r < 1e-15);
    }

    #[test]
    fn mckean_rejects_boundary_time() {
        let d = AtomicMeasure::dirac(0.0);
        let path = vec![d.clone(), d.clone(), d];
        let f = CauchyKernel { z: C64::new(0.0, 1.0) };
        assert!(mckean_residual(&path, &path, &[0.0, 0.5, 1.0], &f, 0.0).is_err());
    }

    fn measure_strategy() -> impl Strategy<Value = AtomicMeasure> {
        prop::collection::vec((-5.0f64..5.0, 0.01f64..1.0), 1..8).prop_map(|atoms| {
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            AtomicMeasure::scaled(atoms.into_iter().map(|(x, w)| (x, w / total))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn wasserstein_is_a_metric(a in measure_strategy(), b in measure_strategy(), c in measure_strategy()) {
            let ab = wasserstein1(&a, &b);
            prop_assert_eq!(ab, wasserstein1(&b, &a));
            prop_assert!(wasserstein1(&a, &c) <= ab + wasserstein1(&b, &c) + 1e-12);
        }

        #[test]
        fn composed_cdf_is_profile_of_cdf(m in measure_strategy(), bend in 0.0f64..1.0) {
            let l = WeightProfile::sample(|u| (1.0 - bend) * u + bend * u * u, 64).unwrap();
            let c = compose_profile(&l, &m);
            for &x in m.positions() {
                prop_assert!((c.cdf(x) - l.eval(m.cdf(x))).abs() < 1e-14);
            }
            let id = compose_profile(&WeightProfile::identity(), &m);
            for (w0, w1) in m.weights().iter().zip(id.weights()) {
                prop_assert!((w0 - w1).abs() < 1e-15);
            }
        }

        #[test]
        fn cauchy_maps_into_lower_half_plane(m in measure_strategy(), x in -10.0f64..10.0, y in 1e-3f64..1e3) {
            let v = m.cauchy(C64::new(x, y)).unwrap();
            prop_assert!(v.im < 0.0);
        }

        #[test]
        fn cauchy_normalisation(m in measure_strategy()) {
            let y = 1e6;
            let v = m.cauchy(C64::new(0.0, y)).unwrap();
            prop_assert!((y * v.norm() - 2.0).abs() < 1e-4);
        }
    }
}
