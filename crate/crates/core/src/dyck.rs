//! Non-crossing pairings of `2N` boundary points and their Dyck paths.

use std::collections::HashMap;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::output::{Cell, CsvTable};

/// Largest `N` for which [`catalan`] evaluates exactly.
pub const CATALAN_EXACT_MAX: usize = 500;
/// Largest `N` accepted by [`enumerate`].
pub const ENUMERATE_MAX: usize = 10;

/// A balanced ±1 slope sequence with nonnegative prefix sums.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct DyckPath {
    slopes: Vec<i8>,
}

impl TryFrom<Vec<i8>> for DyckPath {
    type Error = Error;
    fn try_from(slopes: Vec<i8>) -> Result<Self> {
        Self::new(slopes)
    }
}

impl From<DyckPath> for Vec<i8> {
    fn from(p: DyckPath) -> Self {
        p.slopes
    }
}

impl DyckPath {
    pub fn new(slopes: Vec<i8>) -> Result<Self> {
        if slopes.is_empty() || !slopes.len().is_multiple_of(2) {
            return Err(Error::NotDyck(format!("length {} is not a positive even number", slopes.len())));
        }
        let mut h = 0i64;
        for (i, &s) in slopes.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(Error::NotDyck(format!("slope {s} at position {}", i + 1)));
            }
            h += s as i64;
            if h < 0 {
                return Err(Error::NotDyck(format!("height -1 after step {}", i + 1)));
            }
        }
        if h != 0 {
            return Err(Error::NotDyck(format!("ends at height {h}")));
        }
        Ok(Self { slopes })
    }

    /// Number of up-steps.
    pub fn n(&self) -> usize {
        self.slopes.len() / 2
    }

    pub fn slopes(&self) -> &[i8] {
        &self.slopes
    }

    /// `d(0), ..., d(2N)`.
    pub fn heights(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.slopes.len() + 1);
        let mut h = 0;
        out.push(0);
        for &s in &self.slopes {
            h += s as i64;
            out.push(h);
        }
        out
    }

    pub fn max_height(&self) -> i64 {
        self.heights().into_iter().max().unwrap_or(0)
    }

    /// Up-steps as set bits, first step in bit 0; only meaningful for `N <= 32`.
    pub fn bits(&self) -> u64 {
        self.slopes
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .fold(0u64, |acc, (i, _)| acc | (1u64 << i))
    }

    /// `k,d` rows.
    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&["k", "d"]);
        for (k, h) in self.heights().into_iter().enumerate() {
            t.row(&[Cell::Int(k as i64), Cell::Int(h)]);
        }
        t.finish()
    }
}

/// Non-crossing perfect matching of `{1, ..., 2N}`, stored as pairs `(a, b)`
/// with `a < b`, sorted by `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct Configuration {
    pairs: Vec<(usize, usize)>,
}

impl TryFrom<Vec<(usize, usize)>> for Configuration {
    type Error = Error;
    fn try_from(pairs: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(pairs)
    }
}

impl From<Configuration> for Vec<(usize, usize)> {
    fn from(c: Configuration) -> Self {
        c.pairs
    }
}

impl Configuration {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n2 = 2 * pairs.len();
        if n2 == 0 {
            return Err(Error::InvalidPairing("no pairs".into()));
        }
        let mut partner = vec![0usize; n2 + 1];
        for &(a, b) in &pairs {
            let (a, b) = (a.min(b), a.max(b));
            if a == 0 || b > n2 || a == b {
                return Err(Error::InvalidPairing(format!("pair ({a}, {b}) out of range 1..={n2}")));
            }
            if partner[a] != 0 || partner[b] != 0 {
                return Err(Error::InvalidPairing(format!("point in ({a}, {b}) used twice")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        // a < c < b < d for some pair means the stack scan fails
        let mut stack = Vec::new();
        for i in 1..=n2 {
            if partner[i] > i {
                stack.push(i);
            } else if stack.pop() != Some(partner[i]) {
                return Err(Error::InvalidPairing(format!("chord ending at {i} crosses another")));
            }
        }
        let mut sorted: Vec<(usize, usize)> = (1..=n2).filter(|&i| partner[i] > i).map(|i| (i, partner[i])).collect();
        sorted.sort_unstable();
        Ok(Self { pairs: sorted })
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Opening points become up-steps, closing points down-steps.
pub fn encode(config: &Configuration) -> DyckPath {
    let mut slopes = vec![0i8; 2 * config.n()];
    for &(a, b) in config.pairs() {
        slopes[a - 1] = 1;
        slopes[b - 1] = -1;
    }
    DyckPath { slopes }
}

/// Each down-step closes the most recent unmatched up-step.
pub fn decode(path: &DyckPath) -> Configuration {
    let mut stack = Vec::new();
    let mut pairs = Vec::with_capacity(path.n());
    for (i, &s) in path.slopes().iter().enumerate() {
        if s == 1 {
            stack.push(i + 1);
        } else {
            let a = stack.pop().expect("validated Dyck path");
            pairs.push((a, i + 1));
        }
    }
    pairs.sort_unstable();
    Configuration { pairs }
}

/// Parses a slope vector and decodes it.
pub fn decode_slopes(slopes: &[i8]) -> Result<Configuration> {
    DyckPath::new(slopes.to_vec()).map(|p| decode(&p))
}

/// `C_N = (2N)! / ((N+1)! N!)`, exact for `N <= 500`.
pub fn catalan(n: usize) -> Result<BigUint> {
    if n > CATALAN_EXACT_MAX {
        return Err(Error::InvalidConfig(format!(
            "exact Catalan numbers limited to N <= {CATALAN_EXACT_MAX}; use ln_catalan"
        )));
    }
    // C_{k+1} = C_k * 2(2k+1) / (k+2)
    let mut c = BigUint::from(1u32);
    for k in 0..n as u64 {
        c = c * (2 * (2 * k + 1)) / (k + 2);
    }
    Ok(c)
}

pub fn ln_catalan(n: usize) -> f64 {
    let n = n as f64;
    ln_gamma(2.0 * n + 1.0) - ln_gamma(n + 2.0) - ln_gamma(n + 1.0)
}

/// All Dyck paths of size `n` in lexicographic order (`+1` before `-1`).
pub fn enumerate(n: usize) -> Result<Vec<DyckPath>> {
    if n == 0 || n > ENUMERATE_MAX {
        return Err(Error::InvalidConfig(format!("enumeration needs 1 <= N <= {ENUMERATE_MAX}, got {n}")));
    }
    fn rec(buf: &mut Vec<i8>, up: usize, down: usize, n: usize, out: &mut Vec<DyckPath>) {
        if buf.len() == 2 * n {
            out.push(DyckPath { slopes: buf.clone() });
            return;
        }
        if up < n {
            buf.push(1);
            rec(buf, up + 1, down, n, out);
            buf.pop();
        }
        if down < up {
            buf.push(-1);
            rec(buf, up, down + 1, n, out);
            buf.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(2 * n), 0, 0, n, &mut out);
    Ok(out)
}

/// Seeded uniform sampler.
///
/// Shuffles `N` up-steps and `N + 1` down-steps; exactly one cyclic rotation
/// of such a word has all proper prefix sums nonnegative, and dropping its
/// final down-step leaves a Dyck path. Every path arises from `2N + 1` words,
/// so the result is exactly uniform.
pub struct DyckSampler {
    rng: ChaCha8Rng,
    word: Vec<i8>,
}

impl DyckSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            word: Vec::new(),
        }
    }

    pub fn sample(&mut self, n: usize) -> DyckPath {
        self.word.clear();
        self.word.extend(std::iter::repeat_n(1i8, n));
        self.word.extend(std::iter::repeat_n(-1i8, n + 1));
        self.word.shuffle(&mut self.rng);
        // rotate to start right after the first position of the minimum prefix sum
        let (mut h, mut min, mut arg) = (0i64, 0i64, 0usize);
        for (i, &s) in self.word.iter().enumerate() {
            h += s as i64;
            if h < min {
                min = h;
                arg = i + 1;
            }
        }
        let len = self.word.len();
        let slopes: Vec<i8> = (0..len - 1).map(|i| self.word[(arg + i) % len]).collect();
        DyckPath { slopes }
    }
}

/// One uniform Dyck path of size `n`.
pub fn sample_uniform(n: usize, seed: u64) -> Result<DyckPath> {
    if n == 0 {
        return Err(Error::InvalidConfig("N must be at least 1".into()));
    }
    Ok(DyckSampler::new(seed).sample(n))
}

/// `count` independent uniform paths from one seeded stream.
pub fn sample_many(n: usize, count: usize, seed: u64) -> Result<Vec<DyckPath>> {
    if n == 0 {
        return Err(Error::InvalidConfig("N must be at least 1".into()));
    }
    let mut s = DyckSampler::new(seed);
    Ok((0..count).map(|_| s.sample(n)).collect())
}

/// Pearson statistic and upper-tail p-value of `counts` against equal cell
/// probabilities.
pub fn chi_square_uniform(counts: &[u64]) -> (f64, f64) {
    let k = counts.len();
    let total: u64 = counts.iter().sum();
    if k < 2 || total == 0 {
        return (0.0, 1.0);
    }
    let e = total as f64 / k as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let dist = ChiSquared::new((k - 1) as f64).expect("positive degrees of freedom");
    (stat, 1.0 - dist.cdf(stat))
}

/// Histogram of sampled paths over the exhaustive list at size `n`.
pub fn sample_histogram(n: usize, samples: usize, seed: u64) -> Result<Vec<u64>> {
    let all = enumerate(n)?;
    let index: HashMap<u64, usize> = all.iter().enumerate().map(|(i, p)| (p.bits(), i)).collect();
    let mut counts = vec![0u64; all.len()];
    let mut s = DyckSampler::new(seed);
    for _ in 0..samples {
        counts[index[&s.sample(n).bits()]] += 1;
    }
    Ok(counts)
}

/// `p_k = k / 2N`.
pub fn uniform_breakpoints(n: usize) -> Vec<f64> {
    let m = 2 * n;
    (0..=m).map(|k| k as f64 / m as f64).collect()
}

/// Piecewise-affine rescaled Dyck path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPath {
    pub breakpoints: Vec<f64>,
    pub gamma: f64,
    pub values: Vec<f64>,
}

impl NormalizedPath {
    pub fn eval(&self, t: f64) -> f64 {
        let p = &self.breakpoints;
        if t <= p[0] {
            return self.values[0];
        }
        let last = p.len() - 1;
        if t >= p[last] {
            return self.values[last];
        }
        let k = p.partition_point(|&x| x <= t) - 1;
        let w = (t - p[k]) / (p[k + 1] - p[k]);
        self.values[k] + w * (self.values[k + 1] - self.values[k])
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `p,e` rows.
    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&["p", "e"]);
        for (&p, &e) in self.breakpoints.iter().zip(&self.values) {
            t.nums(&[p, e]);
        }
        t.finish()
    }
}

/// `e(p_{k+1}) = e(p_k) + (p_{k+1} - p_k) (d(k+1) - d(k)) / (p_{k+1} - p_k)^gamma`.
pub fn normalize(path: &DyckPath, breakpoints: &[f64], gamma: f64) -> Result<NormalizedPath> {
    if breakpoints.len() != path.slopes().len() + 1 {
        return Err(Error::InvalidConfig(format!(
            "{} breakpoints for a path of length {}",
            breakpoints.len(),
            path.slopes().len()
        )));
    }
    if breakpoints[0] != 0.0 || breakpoints.windows(2).any(|w| !(w[1] > w[0])) || breakpoints[breakpoints.len() - 1] > 1.0 {
        return Err(Error::InvalidConfig("breakpoints must increase strictly from 0 within [0, 1]".into()));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidConfig(format!("gamma = {gamma} outside (0, 1]")));
    }
    let mut values = Vec::with_capacity(breakpoints.len());
    values.push(0.0);
    let mut e = 0.0;
    for (w, &s) in breakpoints.windows(2).zip(path.slopes()) {
        let dp = w[1] - w[0];
        e += s as f64 * dp.powf(1.0 - gamma);
        values.push(e);
    }
    Ok(NormalizedPath {
        breakpoints: breakpoints.to_vec(),
        gamma,
        values,
    })
}

/// Exact `E[max_k d(k)]` for a uniform Dyck path of size `n`.
///
/// Uses `E[max] = sum_{h>=0} P(max > h)` with `P(max <= h)` from a transfer
/// count of paths confined to `[0, h]`, carried as simple-random-walk
/// probabilities to stay in floating range.
pub fn expected_max_height(n: usize) -> f64 {
    let steps = 2 * n;
    let confined = |h: usize| -> f64 {
        let mut cur = vec![0.0f64; h + 1];
        let mut next = vec![0.0f64; h + 1];
        cur[0] = 1.0;
        for _ in 0..steps {
            for (j, slot) in next.iter_mut().enumerate() {
                let below = if j > 0 { cur[j - 1] } else { 0.0 };
                let above = if j < h { cur[j + 1] } else { 0.0 };
                *slot = 0.5 * (below + above);
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur[0]
    };
    let all = confined(n);
    let mut mean = 0.0;
    for h in 0..n {
        let tail = 1.0 - confined(h) / all;
        mean += tail;
        if tail < 1e-17 {
            break;
        }
    }
    mean
}

/// Boundary weight families with closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionKind {
    /// `|y - x|^{-2b}` with `b = (6 - kappa) / (2 kappa)`.
    Pair,
    /// `prod_{j<k} |x_k - x_j|^{2/kappa}`.
    ToInfinity,
}

pub fn partition_weight(points: &[f64], kappa: f64, kind: PartitionKind) -> Result<f64> {
    if !(kappa > 0.0 && kappa <= 4.0) {
        return Err(Error::InvalidConfig(format!("kappa = {kappa} outside (0, 4]")));
    }
    for (i, &a) in points.iter().enumerate() {
        if !a.is_finite() {
            return Err(Error::InvalidConfig(format!("point {a} is not finite")));
        }
        if points[i + 1..].contains(&a) {
            return Err(Error::CoincidentPoints);
        }
    }
    match kind {
        PartitionKind::Pair => {
            let [x, y] = points else {
                return Err(Error::InvalidConfig(format!("pair weight needs 2 points, got {}", points.len())));
            };
            let b = (6.0 - kappa) / (2.0 * kappa);
            Ok((y - x).abs().powf(-2.0 * b))
        }
        PartitionKind::ToInfinity => {
            let e = 2.0 / kappa;
            let mut w = 1.0;
            for (k, &xk) in points.iter().enumerate() {
                for &xj in &points[..k] {
                    w *= (xk - xj).abs().powf(e);
                }
            }
            Ok(w)
        }
    }
}

/// `H / sum H`.
pub fn configuration_probabilities(weights: &[f64]) -> Result<Vec<f64>> {
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidConfig(format!("weight {w} is not a finite nonnegative number")));
    }
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Err(Error::ZeroWeights);
    }
    Ok(weights.iter().map(|w| w / total).collect())
}

/// Configurations as a JSON array of index-pair arrays.
pub fn configurations_json(configs: &[Configuration]) -> String {
    serde_json::to_string(configs).expect("pairs serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force_count(n: usize) -> usize {
        (0u32..1 << (2 * n))
            .filter(|w| {
                let slopes: Vec<i8> = (0..2 * n).map(|i| if w >> i & 1 == 1 { 1 } else { -1 }).collect();
                DyckPath::new(slopes).is_ok()
            })
            .count()
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(1).unwrap(), BigUint::from(1u32));
        assert_eq!(catalan(2).unwrap(), BigUint::from(2u32));
        assert_eq!(catalan(5).unwrap(), BigUint::from(42u32));
        assert_eq!(brute_force_count(5), 42);
        assert_eq!(catalan(0).unwrap(), BigUint::from(1u32));
        assert!(catalan(500).is_ok());
        assert!(catalan(501).is_err());
        let c30: f64 = catalan(30).unwrap().to_string().parse().unwrap();
        assert!((ln_catalan(30) - c30.ln()).abs() < 1e-10);
    }

    #[test]
    fn enumeration_counts_match_catalan() {
        for n in 1..=ENUMERATE_MAX {
            let all = enumerate(n).unwrap();
            assert_eq!(BigUint::from(all.len()), catalan(n).unwrap());
            let mut bits: Vec<u64> = all.iter().map(DyckPath::bits).collect();
            bits.dedup();
            assert_eq!(bits.len(), all.len());
        }
        assert!(enumerate(11).is_err());
    }

    #[test]
    fn encode_examples() {
        let c = Configuration::new(vec![(1, 2), (3, 4)]).unwrap();
        assert_eq!(encode(&c).slopes(), &[1, -1, 1, -1]);
        let c = Configuration::new(vec![(1, 4), (2, 3)]).unwrap();
        assert_eq!(encode(&c).slopes(), &[1, 1, -1, -1]);
    }

    #[test]
    fn round_trip_exhaustive() {
        for n in 1..=8 {
            for p in enumerate(n).unwrap() {
                let c = decode(&p);
                assert_eq!(Configuration::new(c.pairs().to_vec()).unwrap(), c);
                assert_eq!(encode(&c), p);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(DyckPath::new(vec![-1, 1]).is_err());
        assert!(DyckPath::new(vec![1, 1]).is_err());
        assert!(DyckPath::new(vec![1, 0]).is_err());
        assert!(decode_slopes(&[1, -1, -1, 1]).is_err());
        assert!(Configuration::new(vec![(1, 3), (2, 4)]).is_err());
        assert!(Configuration::new(vec![(1, 2), (2, 3)]).is_err());
        assert!(Configuration::new(vec![(1, 5), (2, 3)]).is_err());
    }

    #[test]
    fn sampler_small_cases() {
        for seed in 0..20 {
            assert_eq!(sample_uniform(1, seed).unwrap().slopes(), &[1, -1]);
        }
        let counts = sample_histogram(2, 100_000, 3).unwrap();
        for c in counts {
            assert!((c as f64 / 1e5 - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn sampler_uniform_at_eight() {
        let counts = sample_histogram(8, 100_000, 11).unwrap();
        assert_eq!(counts.len(), 1430);
        assert!(counts.iter().all(|&c| c > 0));
        assert!(chi_square_uniform(&counts).1 >= 0.001);
        // with ~70 draws per cell the max/min ratio is ~2 by chance alone;
        // at 2e6 draws the spread is small enough for a 1.5 bound
        let counts = sample_histogram(8, 2_000_000, 12).unwrap();
        let max = *counts.iter().max().unwrap() as f64;
        let min = *counts.iter().min().unwrap() as f64;
        assert!(max / min < 1.5, "ratio {}", max / min);
    }

    #[test]
    fn chi_square_at_four() {
        let counts = sample_histogram(4, 100_000, 5).unwrap();
        assert_eq!(counts.len(), 14);
        let (_, p) = chi_square_uniform(&counts);
        assert!(p >= 0.001, "p = {p}");
        let (_, p_bad) = chi_square_uniform(&[100, 0, 100, 100]);
        assert!(p_bad < 1e-6);
    }

    #[test]
    fn normalize_examples() {
        let p = DyckPath::new(vec![1, -1]).unwrap();
        let e = normalize(&p, &[0.0, 0.5, 1.0], 1.0).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0, 0.0]);
        assert_eq!(e.eval(0.25), 0.5);
        let q = sample_uniform(20, 1).unwrap();
        let e = normalize(&q, &uniform_breakpoints(20), 1.0).unwrap();
        assert!(e.values[40].abs() < 1e-12);
        let h = normalize(&q, &uniform_breakpoints(20), 0.5).unwrap();
        for (k, d) in q.heights().into_iter().enumerate() {
            assert!((h.values[k] - d as f64 / 40f64.sqrt()).abs() < 1e-12);
        }
        assert!(normalize(&q, &[0.0, 1.0], 0.5).is_err());
        assert!(normalize(&p, &[0.0, 0.5, 1.0], 0.0).is_err());
    }

    #[test]
    fn expected_max_matches_enumeration() {
        for n in 1..=9 {
            let all = enumerate(n).unwrap();
            let mean = all.iter().map(|p| p.max_height() as f64).sum::<f64>() / all.len() as f64;
            assert!((expected_max_height(n) - mean).abs() < 1e-12, "n = {n}");
        }
        // E[max] = sqrt(pi N) - 3/2 + o(1)
        let big = (expected_max_height(2000) + 1.5) / 4000f64.sqrt();
        assert!((big - (std::f64::consts::PI / 2.0).sqrt()).abs() < 2e-3, "{big}");
    }

    #[test]
    fn partition_examples() {
        assert!((partition_weight(&[0.0, 2.0], 2.0, PartitionKind::Pair).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(partition_weight(&[0.0, 1.0], 2.0, PartitionKind::ToInfinity).unwrap(), 1.0);
        assert_eq!(partition_weight(&[0.0, 1.0, 3.0], 2.0, PartitionKind::ToInfinity).unwrap(), 6.0);
        assert_eq!(
            partition_weight(&[0.0, 0.0], 2.0, PartitionKind::Pair),
            Err(Error::CoincidentPoints)
        );
        assert!(partition_weight(&[0.0, 1.0], 5.0, PartitionKind::Pair).is_err());
    }

    #[test]
    fn probabilities() {
        assert_eq!(configuration_probabilities(&[1.0, 1.0]).unwrap(), vec![0.5, 0.5]);
        assert_eq!(configuration_probabilities(&[1.0, 3.0]).unwrap(), vec![0.25, 0.75]);
        let (h1, h2) = (0.7, 1.9);
        let p = configuration_probabilities(&[h1, h2]).unwrap();
        assert_eq!(p[0], h1 / (h1 + h2));
        assert_eq!(configuration_probabilities(&[0.0, 0.0]), Err(Error::ZeroWeights));
    }

    #[test]
    fn json_and_csv() {
        let c = Configuration::new(vec![(1, 4), (2, 3)]).unwrap();
        assert_eq!(configurations_json(std::slice::from_ref(&c)), "[[[1,4],[2,3]]]");
        let back: Vec<Configuration> = serde_json::from_str("[[[1,4],[2,3]]]").unwrap();
        assert_eq!(back, vec![c]);
        assert!(serde_json::from_str::<Configuration>("[[1,3],[2,4]]").is_err());
        let csv = DyckPath::new(vec![1, -1]).unwrap().to_csv();
        assert_eq!(csv, "k,d\n0,0\n1,1\n2,0\n");
    }

    proptest! {
        #[test]
        fn round_trip_random_large(seed in any::<u64>()) {
            let p = sample_uniform(100, seed).unwrap();
            prop_assert_eq!(encode(&decode(&p)), p);
        }

        #[test]
        fn to_infinity_translation_invariant(
            xs in proptest::collection::btree_set(-64i32..64, 2..6),
            s in -64i32..64,
            kappa in prop_oneof![Just(1.0), Just(2.0), Just(4.0)],
        ) {
            let pts: Vec<f64> = xs.iter().map(|&x| x as f64 / 4.0).collect();
            let shifted: Vec<f64> = pts.iter().map(|x| x + s as f64).collect();
            prop_assert_eq!(
                partition_weight(&pts, kappa, PartitionKind::ToInfinity).unwrap(),
                partition_weight(&shifted, kappa, PartitionKind::ToInfinity).unwrap()
            );
        }

        #[test]
        fn to_infinity_scaling(
            xs in proptest::collection::btree_set(-50i32..50, 2..6),
            c in 0.2f64..3.0,
            kappa in 0.5f64..4.0,
        ) {
            let pts: Vec<f64> = xs.iter().map(|&x| x as f64 / 10.0).collect();
            let n = pts.len() as f64;
            let scaled: Vec<f64> = pts.iter().map(|x| c * x).collect();
            let w = partition_weight(&pts, kappa, PartitionKind::ToInfinity).unwrap();
            let ws = partition_weight(&scaled, kappa, PartitionKind::ToInfinity).unwrap();
            let expected = w * c.powf(2.0 / kappa * n * (n - 1.0) / 2.0);
            prop_assert!((ws - expected).abs() <= 1e-10 * expected.abs().max(1.0));
        }
    }
}
