//! Acceptance checks, grouped in suites. Each suite reports one [`Check`]
//! per measured quantity and a digest of every CSV it produced, so a second
//! run can be compared byte for byte.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::burgers::{burgers_residual, voiculescu_conservation, Cone, PathTransform, Semicircle, BurgersSolution};
use crate::drivers::DriverPath;
use crate::dyck;
use crate::error::Result;
use crate::figures;
use crate::loewner;
use crate::measures::{compose_profile, AtomicMeasure, WeightProfile};
use crate::output::CsvTable;
use crate::scenarios::{self, angle_distance};
use crate::C64;

/// One measured quantity against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub measured: f64,
    pub tolerance: String,
    pub pass: bool,
}

impl Check {
    fn new(id: &str, description: impl Into<String>, measured: f64, tolerance: impl Into<String>, pass: bool) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            measured,
            tolerance: tolerance.into(),
            pass,
        }
    }

    fn at_most(id: &str, description: impl Into<String>, measured: f64, tol: f64) -> Self {
        Self::new(id, description, measured, format!("<= {tol:e}"), measured <= tol)
    }

    fn at_least(id: &str, description: impl Into<String>, measured: f64, tol: f64) -> Self {
        Self::new(id, description, measured, format!(">= {tol}"), measured >= tol)
    }

    fn within(id: &str, description: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        Self::new(id, description, measured, format!("in [{lo}, {hi}]"), (lo..=hi).contains(&measured))
    }

    /// `PASS  id  description  measured=...  tol ...`
    pub fn line(&self) -> String {
        format!(
            "{}  {:<4} {:<58} measured={:<12.6e} tol {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.description,
            self.measured,
            self.tolerance
        )
    }
}

/// SHA-256 of a CSV artifact, with its size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

impl Artifact {
    pub fn of(name: impl Into<String>, content: &str) -> Self {
        let hash = Sha256::digest(content.as_bytes());
        Self {
            name: name.into(),
            bytes: content.len(),
            sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub criterion: u32,
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Shares expensive driver runs between suites of one verification pass.
#[derive(Default)]
pub struct Context {
    paths: Mutex<BTreeMap<String, Arc<(DriverPath, f64)>>>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs (or reuses) a builtin, returning the path and its wall time.
    fn builtin_run(&self, name: &str, n: usize, horizon: f64) -> Result<Arc<(DriverPath, f64)>> {
        let key = format!("{name}/{n}/{horizon}");
        if let Some(p) = self.paths.lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        let mut cfg = scenarios::builtin(name, Some(n))?;
        cfg.horizon = horizon;
        let start = Instant::now();
        let path = cfg.simulate()?;
        let run = Arc::new((path, start.elapsed().as_secs_f64()));
        self.paths.lock().unwrap().insert(key, run.clone());
        Ok(run)
    }
}

type SuiteFn = fn(&Context) -> Result<(Vec<Check>, Vec<Artifact>)>;

/// Suites in criterion order.
pub const SUITES: [(&str, u32, SuiteFn); 13] = [
    ("semicircle", 1, semicircle),
    ("hcap", 2, hcap),
    ("slit", 3, slit),
    ("burgers", 4, burgers),
    ("voiculescu", 5, voiculescu),
    ("profile", 6, profile),
    ("johnny", 7, johnny),
    ("molly", 8, molly),
    ("prince_charles", 9, prince_charles),
    ("dyck", 10, dyck_suite),
    ("excursion", 11, excursion),
    ("quad", 12, quad),
    ("figures", 13, figures_suite),
];

pub const REPRODUCIBILITY: &str = "reproducibility";

/// Extra filter keywords: the Voiculescu conservation law is a property of
/// Burgers solutions, so `burgers` selects it too.
fn aliases(suite: &str) -> &'static [&'static str] {
    match suite {
        "voiculescu" => &["burgers"],
        _ => &[],
    }
}

/// True when `filter` is a substring of the suite name or one of its aliases.
pub fn matches(suite: &str, filter: Option<&str>) -> bool {
    filter.is_none_or(|f| suite.contains(f) || aliases(suite).iter().any(|a| a.contains(f)))
}

/// Names of every suite, reproducibility last.
pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).chain([REPRODUCIBILITY]).collect()
}

/// Runs one suite by name (not the reproducibility pass).
pub fn run_suite(name: &str, ctx: &Context) -> Result<SuiteReport> {
    let &(suite, criterion, f) = SUITES
        .iter()
        .find(|s| s.0 == name)
        .ok_or_else(|| crate::Error::UnknownScenario(name.into()))?;
    let start = Instant::now();
    let (checks, artifacts) = f(ctx)?;
    Ok(SuiteReport {
        suite: suite.into(),
        criterion,
        checks,
        artifacts,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Reruns each suite in `first` with a fresh context and compares artifacts.
pub fn reproducibility(first: &[SuiteReport]) -> Result<SuiteReport> {
    let start = Instant::now();
    let ctx = Context::new();
    let mut checks = Vec::new();
    for r in first {
        let again = run_suite(&r.suite, &ctx)?;
        let differing = r
            .artifacts
            .iter()
            .zip(&again.artifacts)
            .filter(|(a, b)| a != b)
            .count()
            + r.artifacts.len().abs_diff(again.artifacts.len());
        checks.push(Check::new(
            "14",
            format!("{}: {} CSV artifacts identical on rerun", r.suite, r.artifacts.len()),
            differing as f64,
            "== 0 differing",
            differing == 0,
        ));
    }
    Ok(SuiteReport {
        suite: REPRODUCIBILITY.into(),
        criterion: 14,
        checks,
        artifacts: Vec::new(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every suite whose name contains `filter` (all when `None`).
/// The reproducibility pass reruns whichever other suites were selected,
/// or all of them when it is selected alone.
pub fn run(filter: Option<&str>) -> Result<Vec<SuiteReport>> {
    let selected = |name: &str| matches(name, filter);
    let ctx = Context::new();
    let mut reports = Vec::new();
    for (name, _, _) in SUITES {
        if selected(name) {
            reports.push(run_suite(name, &ctx)?);
        }
    }
    if selected(REPRODUCIBILITY) {
        if reports.is_empty() {
            for (name, _, _) in SUITES {
                reports.push(run_suite(name, &ctx)?);
            }
        }
        let repro = reproducibility(&reports)?;
        reports.push(repro);
    }
    Ok(reports)
}

fn semicircle_grid() -> Vec<C64> {
    let mut g = Vec::with_capacity(126);
    for j in 0..6 {
        for i in 0..21 {
            g.push(C64::new(-2.0 + 0.2 * i as f64, 1.0 + 0.2 * j as f64));
        }
    }
    g
}

/// The semicircle runs extend one grid step past `t = 0.25` so centred
/// time differences are available there.
const SEMICIRCLE_HORIZON: f64 = 0.2501;

fn transform_error(path: &DriverPath, t: f64) -> (f64, String) {
    let v = path.positions_at(t);
    let l = &path.weights;
    let mut table = CsvTable::new(&["re_z", "im_z", "error"]);
    let mut worst = 0.0f64;
    for z in semicircle_grid() {
        let m: C64 = v.iter().zip(l).map(|(&x, &w)| 2.0 * w / (z - x)).sum();
        let exact = Semicircle::SIMULTANEOUS.eval(z, t);
        let e = (m - exact).norm();
        worst = worst.max(e);
        table.nums(&[z.re, z.im, e]);
    }
    (worst, table.finish())
}

fn semicircle(ctx: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let small = ctx.builtin_run("semicircle", 400, SEMICIRCLE_HORIZON)?;
    let big = ctx.builtin_run("semicircle", 800, SEMICIRCLE_HORIZON)?;
    let (e400, t400) = transform_error(&small.0, 0.25);
    let (e800, t800) = transform_error(&big.0, 0.25);
    let measure = small.0.measure(small.0.index_of(0.25).expect("grid time"));
    Ok((
        vec![
            Check::at_most("1a", "N=400 sup |M_N - semicircle| on 21x6 grid, t=0.25", e400, 0.05),
            Check::new("1b", "N=800 error below N=400 error", e800, format!("< {e400:.6e}"), e800 < e400),
            Check::at_most("1c", "N=400 simulation wall time [s]", small.1, 30.0),
            Check::at_most("1d", "N=800 simulation wall time [s]", big.1, 30.0),
        ],
        vec![
            Artifact::of("semicircle_n400_drivers.csv", &small.0.drivers_csv()),
            Artifact::of("semicircle_n800_drivers.csv", &big.0.drivers_csv()),
            Artifact::of("semicircle_n400_error.csv", &t400),
            Artifact::of("semicircle_n800_error.csv", &t800),
            Artifact::of("semicircle_n400_atoms.csv", &measure.atoms_csv()),
        ],
    ))
}

const HCAP_RADII: [f64; 2] = [50.0, 100.0];

fn hcap(ctx: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let start = Instant::now();
    let mut checks = Vec::new();
    let mut table = CsvTable::new(&["t", "b", "remainder"]);
    for (name, n) in [("semicircle", 400), ("prince_charles", 100)] {
        let run = ctx.builtin_run(name, n, SEMICIRCLE_HORIZON)?;
        for t in [0.1, 0.25] {
            let fit = loewner::hcap_fit(&run.0, t, &HCAP_RADII)?;
            table.nums(&[t, fit.b, fit.remainder]);
            checks.push(Check::at_most(
                "2",
                format!("{name} N={n}: |b(t) - 2t| at t={t}"),
                (fit.b - 2.0 * t).abs(),
                1e-3,
            ));
        }
    }
    let pc = ctx.builtin_run("prince_charles", 100, SEMICIRCLE_HORIZON)?;
    checks.push(Check::at_most(
        "2",
        "capacity fits plus prince_charles run wall time [s]",
        start.elapsed().as_secs_f64() + pc.1,
        10.0,
    ));
    Ok((checks, vec![Artifact::of("hcap.csv", &table.finish())]))
}

fn slit(_: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let path = DriverPath::constant(&[0.0], &[1.0], 1.0, 1e-4)?;
    let probes: Vec<C64> = (0..20)
        .map(|i| {
            let x = -2.0 + 4.0 * (i % 5) as f64 / 4.0 + 0.1;
            let y = 0.25 + 0.5 * (i / 5) as f64;
            C64::new(x, y)
        })
        .collect();
    let flows = loewner::grid_flow(&path, &probes, 1.0)?;
    let mut worst = 0.0f64;
    for (z, p) in probes.iter().zip(&flows) {
        for (&t, &g) in p.times.iter().zip(&p.values) {
            let mut w = (z * z + 4.0 * t).sqrt();
            if w.im < 0.0 {
                w = -w;
            }
            worst = worst.max((g - w).norm() / w.norm());
        }
    }
    let swallow = loewner::flow(&path, C64::new(0.0, 1.0), 1.0)?;
    let ts = swallow.swallow_time.unwrap_or(f64::INFINITY);
    Ok((
        vec![
            Check::at_most("3a", "single slit: max relative error vs sqrt(z^2+4t), 20 probes", worst, 1e-6),
            Check::at_most("3b", "single slit: |T(i) - 0.25|", (ts - 0.25).abs(), 1e-4),
        ],
        vec![
            Artifact::of("slit_grid.csv", &loewner::grid_csv(&flows)),
            Artifact::of("slit_probe_i.csv", &swallow.to_csv()),
        ],
    ))
}

fn burgers(ctx: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let exact = Semicircle::SIMULTANEOUS;
    let z = C64::new(0.0, 2.0);
    let r = burgers_residual(&exact, z, 0.25, 1e-4);
    let r2 = burgers_residual(&exact, z, 0.25, 2e-3);
    let r1 = burgers_residual(&exact, z, 0.25, 1e-3);
    let run = ctx.builtin_run("semicircle", 400, SEMICIRCLE_HORIZON)?;
    let m = PathTransform {
        path: &run.0,
        coefficient: 2.0,
    };
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for z in semicircle_grid() {
        let res = burgers_residual(&m, z, 0.25, run.0.dt);
        worst = worst.max(res);
        rows.push((z, 0.25, res));
    }
    Ok((
        vec![
            Check::at_most("4a", "exact semicircle residual, z=2i, t=0.25, h=1e-4", r, 1e-6),
            Check::within("4b", "residual ratio r(2h)/r(h) at h=1e-3 (order 2)", r2 / r1, 3.5, 4.5),
            Check::at_most("4c", "N=400 transform residual on the Im z >= 1 grid", worst, 0.05),
        ],
        vec![Artifact::of("burgers_residual.csv", &crate::burgers::residual_csv(&rows))],
    ))
}

fn voiculescu(_: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let m = Semicircle::SIMULTANEOUS;
    // 20i lies in the cone with beta = 2 x support radius (8 at t = 1)
    let cone = Cone {
        alpha: 1.0,
        beta: 2.0 * m.support_radius(1.0),
    };
    let z = C64::new(0.0, 20.0);
    let d = voiculescu_conservation(&m, z, 0.0, 1.0, cone)?;
    let mut t = CsvTable::new(&["re_z", "im_z", "t1", "t2", "defect"]);
    t.nums(&[z.re, z.im, 0.0, 1.0, d]);
    Ok((
        vec![Check::at_most("5", "semicircle Voiculescu defect at z=20i, t=1", d, 1e-6)],
        vec![Artifact::of("voiculescu.csv", &t.finish())],
    ))
}

fn profile(_: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let mut checks = Vec::new();
    let mut table = CsvTable::new(&["scenario", "n", "max_weight_error"]);
    for name in ["prince_charles", "johnny", "molly"] {
        for n in [10, 100] {
            // molly needs an odd count
            let n = if name == "molly" { n + 1 } else { n };
            let cfg = scenarios::builtin(name, Some(n))?;
            let mu = AtomicMeasure::from_parts(&cfg.positions, &cfg.weights)?;
            let alpha = AtomicMeasure::empirical(&cfg.positions)?;
            let f = compose_profile(&WeightProfile::from_weights(&cfg.weights)?, &alpha);
            let err = if f.positions() == mu.positions() {
                f.weights()
                    .iter()
                    .zip(mu.weights())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            table.row(&[
                crate::output::Cell::Text(name),
                crate::output::Cell::Int(n as i64),
                crate::output::Cell::Num(err),
            ]);
            checks.push(Check::at_most("6", format!("{name} N={n}: L_N composed with alpha vs mu_N,0"), err, 1e-12));
        }
    }
    Ok((checks, vec![Artifact::of("profile.csv", &table.finish())]))
}

fn johnny(_: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let start = Instant::now();
    let report = scenarios::johnny_escape_diagnostic(&[25, 51, 101, 201], 0.5, 1e-4)?;
    let secs = start.elapsed().as_secs_f64();
    let mut t = CsvTable::new(&["n", "v_initial", "v_t", "strictly_increasing"]);
    for r in &report.rows {
        t.nums(&[r.n as f64, r.initial, r.value, r.strictly_increasing as u8 as f64]);
    }
    let not_increasing = report.rows.iter().filter(|r| !r.strictly_increasing).count();
    let bad_start = report.rows.iter().map(|r| (r.initial - 2.0).abs()).fold(0.0, f64::max);
    Ok((
        vec![
            Check::new(
                "7a",
                "runs where V_NN is not strictly increasing",
                not_increasing as f64,
                "== 0",
                not_increasing == 0,
            ),
            Check::at_least("7b", "log-log slope of V_NN(0.5) - 2 against N", report.slope, 0.4),
            Check::at_most("7c", "max |V_NN(0) - 2|", bad_start, 0.0),
            Check::at_most("7d", "wall time [s]", secs, 60.0),
        ],
        vec![Artifact::of("johnny_escape.csv", &t.finish())],
    ))
}

fn molly(ctx: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let run = ctx.builtin_run("molly", 51, 0.5)?;
    let (anti, centre) = scenarios::molly_symmetry(&run.0);
    Ok((
        vec![
            Check::at_most("8a", "K=25: max |V_{2K+2-k} + V_k|", anti, 1e-10),
            Check::at_most("8b", "K=25: max |V_{K+1}|", centre, 1e-10),
        ],
        vec![Artifact::of("molly_drivers.csv", &run.0.drivers_csv())],
    ))
}

const BLOWUP_NS: [usize; 10] = [2, 3, 5, 10, 20, 50, 100, 200, 500, 1000];

fn prince_charles(_: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let rows = scenarios::prince_charles_blowup(&BLOWUP_NS);
    let mut t = CsvTable::new(&["n", "t_direct", "t_exact", "t_bound", "dfdt"]);
    for r in &rows {
        t.nums(&[r.n as f64, r.t_direct, r.t_exact, r.t_bound, r.dfdt]);
    }
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let exact_err = rows.iter().map(|r| rel(r.t_direct, r.t_exact)).fold(0.0, f64::max);
    let bound_err = rows.iter().map(|r| (r.t_direct - r.t_bound).abs()).fold(0.0, f64::max);
    let bound_holds = rows.iter().all(|r| r.t_bound <= r.t_direct);
    let deriv_err = rows.iter().map(|r| rel(r.dfdt, r.t_direct)).fold(0.0, f64::max);
    let t100 = rows.iter().find(|r| r.n == 100).unwrap().t_direct;
    let t1000 = rows.iter().find(|r| r.n == 1000).unwrap().t_direct;
    Ok((
        vec![
            Check::at_most("9a", "T_N(0) direct sum vs 2(N-1)/S_N, relative, N<=1000", exact_err, 1e-12),
            Check::at_most(
                "9b",
                "T_N(0) vs (N^2-N)(1/N+1/N^2)/S_N^2, N<=1000",
                bound_err,
                1e-12,
            ),
            Check::new(
                "9c",
                "(N^2-N)(1/N+1/N^2)/S_N^2 <= T_N(0) for all N",
                bound_holds as u8 as f64,
                "== 1",
                bound_holds,
            ),
            Check::within("9d", "T_1000(0) / T_100(0)", t1000 / t100, 9.0, 11.0),
            Check::at_most("9e", "d/dt int f dmu at 0 (f'=1) vs T_N(0), relative", deriv_err, 1e-10),
        ],
        vec![Artifact::of("prince_charles_blowup.csv", &t.finish())],
    ))
}

fn dyck_suite(_: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let mut count_mismatch = 0usize;
    let mut counts = CsvTable::new(&["n", "paths"]);
    for n in 1..=dyck::ENUMERATE_MAX {
        let all = dyck::enumerate(n)?;
        if num_bigint::BigUint::from(all.len()) != dyck::catalan(n)? {
            count_mismatch += 1;
        }
        counts.nums(&[n as f64, all.len() as f64]);
    }
    let mut trip_fail = 0usize;
    for n in 1..=8 {
        for p in dyck::enumerate(n)? {
            if dyck::encode(&dyck::decode(&p)) != p {
                trip_fail += 1;
            }
        }
    }
    let random = dyck::sample_many(100, 10_000, 2024)?;
    let random_fail = random.iter().filter(|p| dyck::encode(&dyck::decode(p)) != **p).count();
    let hist = dyck::sample_histogram(4, 100_000, 4)?;
    let (stat, p) = dyck::chi_square_uniform(&hist);
    let mut h = CsvTable::new(&["cell", "count"]);
    for (i, c) in hist.iter().enumerate() {
        h.nums(&[i as f64, *c as f64]);
    }
    Ok((
        vec![
            Check::new("10a", "N<=10 with path count != catalan(N)", count_mismatch as f64, "== 0", count_mismatch == 0),
            Check::new("10b", "round-trip failures, all paths N<=8", trip_fail as f64, "== 0", trip_fail == 0),
            Check::new(
                "10c",
                "round-trip failures, 1e4 random paths N=100",
                random_fail as f64,
                "== 0",
                random_fail == 0,
            ),
            Check::at_least("10d", format!("chi-square p-value, N=4, 1e5 samples (stat {stat:.3})"), p, 0.001),
        ],
        vec![
            Artifact::of("dyck_counts.csv", &counts.finish()),
            Artifact::of("dyck_histogram_n4.csv", &h.finish()),
        ],
    ))
}

fn excursion(_: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let start = Instant::now();
    let n = 500;
    let bp = dyck::uniform_breakpoints(n);
    let mut sampler = dyck::DyckSampler::new(500);
    let mut maxima = CsvTable::new(&["sample", "max"]);
    let mut sum = 0.0;
    let count = 10_000;
    for i in 0..count {
        let e = dyck::normalize(&sampler.sample(n), &bp, 0.5)?;
        let m = e.max();
        sum += m;
        maxima.nums(&[i as f64, m]);
    }
    let mean = sum / count as f64;
    let target = dyck::expected_max_height(n) / ((2 * n) as f64).sqrt();
    let secs = start.elapsed().as_secs_f64();
    Ok((
        vec![
            Check::at_most(
                "11a",
                format!("|mean max e_N / exact oracle {target:.6} - 1|, N=500"),
                (mean / target - 1.0).abs(),
                0.05,
            ),
            Check::at_most("11b", "wall time [s]", secs, 60.0),
        ],
        vec![Artifact::of("excursion_maxima.csv", &maxima.finish())],
    ))
}

fn quad(_: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let rows = scenarios::characteristics_check(&[1, 50, 100, 200], 0.2, 1e-4, &scenarios::characteristics_grid())?;
    let mut t = CsvTable::new(&["n", "defect"]);
    for r in &rows {
        t.nums(&[r.n as f64, r.defect]);
    }
    let e = |n: usize| rows.iter().find(|r| r.n == n).unwrap().defect;
    Ok((
        vec![
            Check::within("12a", "defect ratio e_50 / e_100", e(50) / e(100), 1.6, 2.4),
            Check::within("12b", "defect ratio e_100 / e_200", e(100) / e(200), 1.6, 2.4),
            Check::at_most("12c", "N=1 defect max |M_t(g_t(z)) - M_0(z)|", e(1), 1e-8),
        ],
        vec![Artifact::of("characteristics.csv", &t.finish())],
    ))
}

fn figures_suite(_: &Context) -> Result<(Vec<Check>, Vec<Artifact>)> {
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    for name in ["fig2", "fig3"] {
        let f = figures::render(name, None, None)?;
        let lines = figures::count_polylines(&f.svg)?;
        checks.push(Check::new(
            "13a",
            format!("{name}: polylines in well-formed SVG"),
            lines as f64,
            "== 51",
            lines == 51,
        ));
        artifacts.push(Artifact::of(format!("{name}_drivers.csv"), &f.csv));
    }
    let base = scenarios::builtin("fig2", None)?;
    let heavy = scenarios::heavy_driver(&base).expect("fig2 has a heavy driver");
    let mut wins = 0usize;
    let mut terminal = CsvTable::new(&["seed", "heavy", "max_other"]);
    for seed in 0..100u64 {
        let mut cfg = base.clone();
        cfg.seed = seed;
        let path = cfg.simulate()?;
        let last = path.states.last().unwrap();
        let other = last
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != heavy)
            .map(|(_, &v)| v)
            .fold(f64::NEG_INFINITY, f64::max);
        if last[heavy] > other {
            wins += 1;
        }
        terminal.nums(&[seed as f64, last[heavy], other]);
    }
    checks.push(Check::at_least("13b", "fig2 seeds (of 100) with the heavy driver on top at t=1", wins as f64, 95.0));
    artifacts.push(Artifact::of("fig2_terminal.csv", &terminal.finish()));
    for name in ["fig7", "fig8"] {
        let f = figures::render(name, None, None)?;
        let q = scenarios::builtin(name, None)?.quad.expect("stream config");
        let real_err = (0..=50)
            .map(|i| -2.5 + 0.1 * i as f64 + 0.05)
            .filter(|&x| q.roots.iter().all(|r| (x - r).abs() > 1e-3))
            .map(|x| angle_distance(q.direction(C64::new(x, 0.0)), 0.0).abs())
            .fold(0.0, f64::max);
        let zero_err = q
            .roots
            .iter()
            .map(|&r| angle_distance(q.direction(C64::new(r, 1e-8)), std::f64::consts::FRAC_PI_2))
            .fold(0.0, f64::max);
        figures::count_polylines(&f.svg)?;
        checks.push(Check::at_most("13c", format!("{name}: max angle error on the real axis"), real_err, 1e-6));
        checks.push(Check::at_most("13d", format!("{name}: max angle error from vertical at double zeros"), zero_err, 1e-6));
        artifacts.push(Artifact::of(format!("{name}_field.csv"), &f.csv));
    }
    Ok((checks, artifacts))
}
