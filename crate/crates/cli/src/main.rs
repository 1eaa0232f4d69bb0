use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use multislit::output::{Cell, CsvTable, ViewTransform};
use multislit::scenarios::{self, ScenarioConfig};
use multislit::{dyck, figures, verify};

#[derive(Parser)]
#[command(name = "multislit", version, about = "Multiple-slit Loewner chains, driver systems and Dyck paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a driver system and write drivers, measures and a manifest.
    Simulate(SimulateArgs),
    /// Run the acceptance suites and print a PASS/FAIL table.
    Verify {
        /// Only suites whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        /// Also write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Regenerate a figure as SVG plus CSV.
    Figures {
        /// fig2, fig3, fig7 or fig8
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Enumerate or sample Dyck paths.
    Dyck(DyckArgs),
    /// Print a builtin scenario as JSON, ready for `simulate --config`.
    Export {
        builtin: String,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
#[command(allow_negative_numbers = true)]
struct SimulateArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    builtin: Option<String>,
    /// Scenario JSON, or a manifest written by a previous run.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Time horizon.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(clap::Args)]
struct DyckArgs {
    /// List every path with N up-steps.
    #[arg(long, conflicts_with = "sample")]
    enumerate: Option<usize>,
    /// Number of uniform samples.
    #[arg(long, requires = "n")]
    sample: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory for the sample CSV and summary; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] multislit::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0} check(s) failed")]
    Verification(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn write(path: &Path, content: &str) -> CliResult {
    fs::write(path, content).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> CliResult {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn unix_seconds() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Everything needed to rerun a simulation.
#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    scenario: &'a str,
    source: String,
    seed: u64,
    out: String,
    format: Format,
    started_unix: u64,
    wall_seconds: Option<f64>,
    files: Vec<String>,
    config: &'a ScenarioConfig,
}

fn load_config(args: &SimulateArgs) -> CliResult<(ScenarioConfig, String)> {
    let (mut cfg, source) = match (&args.builtin, &args.config) {
        (Some(name), _) => (scenarios::builtin(name, args.n)?, format!("builtin:{name}")),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            // a manifest carries the resolved scenario under `config`
            let inner = value.get("config").cloned().unwrap_or(value);
            let cfg = ScenarioConfig::from_json(&inner.to_string())?;
            if args.n.is_some_and(|n| n != cfg.n) {
                return Err(CliError::Usage("--n cannot resize a scenario file; edit positions and weights".into()));
            }
            (cfg, path.display().to_string())
        }
        (None, None) => return Err(CliError::Usage("one of --builtin or --config is required".into())),
    };
    if let Some(k) = args.kappa {
        cfg.kappa = k;
    }
    if let Some(t) = args.t {
        cfg.horizon = t;
        cfg.measure_times.retain(|&s| s <= t);
        if !cfg.measure_times.contains(&t) {
            cfg.measure_times.push(t);
        }
    }
    if let Some(dt) = args.dt {
        cfg.dt = dt;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if cfg.measure_times.is_empty() {
        cfg.measure_times = vec![0.0, cfg.horizon];
    }
    cfg.validate()?;
    Ok((cfg, source))
}

fn simulate(args: SimulateArgs) -> CliResult {
    let (cfg, source) = load_config(&args)?;
    create_dir(&args.out)?;
    let ext = match args.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut files = vec![format!("drivers.{ext}"), format!("measures.{ext}")];
    if cfg.quad.as_ref().is_some_and(|q| !q.poles.is_empty()) {
        files.push(format!("poles.{ext}"));
    }
    let mut manifest = RunManifest {
        tool: "multislit",
        version: env!("CARGO_PKG_VERSION"),
        scenario: &cfg.name,
        source,
        seed: cfg.seed,
        out: args.out.display().to_string(),
        format: args.format,
        started_unix: unix_seconds(),
        wall_seconds: None,
        files,
        config: &cfg,
    };
    let manifest_path = args.out.join("manifest.json");
    write(&manifest_path, &serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;

    let start = Instant::now();
    let path = cfg.simulate()?;
    // snapshot times are snapped to the reporting grid
    let snapshots: Vec<usize> = cfg
        .measure_times
        .iter()
        .map(|&t| ((t / path.dt).round() as usize).min(path.times.len() - 1))
        .collect();
    match args.format {
        Format::Csv => {
            write(&args.out.join("drivers.csv"), &path.drivers_csv())?;
            let mut m = CsvTable::new(&["time", "k", "position", "weight"]);
            for &i in &snapshots {
                for (k, (x, w)) in path.states[i].iter().zip(&path.weights).enumerate() {
                    m.row(&[Cell::Num(path.times[i]), Cell::Int(k as i64 + 1), Cell::Num(*x), Cell::Num(*w)]);
                }
            }
            write(&args.out.join("measures.csv"), &m.finish())?;
            if path.poles.first().is_some_and(|p| !p.is_empty()) {
                write(&args.out.join("poles.csv"), &path.poles_csv())?;
            }
        }
        Format::Json => {
            let drivers = json!({ "times": path.times, "states": path.states });
            write(&args.out.join("drivers.json"), &drivers.to_string())?;
            let measures: Vec<_> = snapshots
                .iter()
                .map(|&i| json!({ "time": path.times[i], "positions": path.states[i], "weights": path.weights }))
                .collect();
            write(&args.out.join("measures.json"), &serde_json::Value::from(measures).to_string())?;
            if path.poles.first().is_some_and(|p| !p.is_empty()) {
                let poles: Vec<Vec<(f64, f64)>> = path
                    .poles
                    .iter()
                    .map(|row| row.iter().map(|s| (s.re, s.im)).collect())
                    .collect();
                write(&args.out.join("poles.json"), &json!({ "times": path.times, "poles": poles }).to_string())?;
            }
        }
    }
    manifest.wall_seconds = Some(start.elapsed().as_secs_f64());
    write(&manifest_path, &serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    eprintln!(
        "{}: {} drivers to t = {} in {:.2}s ({} substeps, {} rejected), wrote {}",
        cfg.name,
        cfg.n,
        path.horizon(),
        manifest.wall_seconds.unwrap_or(0.0),
        path.stats.substeps,
        path.stats.rejections,
        args.out.display()
    );
    Ok(())
}

fn run_verify(filter: Option<String>, json_out: Option<PathBuf>) -> CliResult {
    let reports = verify::run(filter.as_deref())?;
    if reports.is_empty() {
        return Err(CliError::Usage(format!(
            "no suite matches {:?}; suites: {}",
            filter.unwrap_or_default(),
            verify::suite_names().join(", ")
        )));
    }
    let mut failed = 0;
    for r in &reports {
        println!("== {} (criterion {}, {:.2}s)", r.suite, r.criterion, r.seconds);
        for c in &r.checks {
            println!("{}", c.line());
            failed += usize::from(!c.pass);
        }
    }
    if let Some(p) = json_out {
        write(&p, &serde_json::to_string_pretty(&reports).expect("report serializes"))?;
    }
    if failed > 0 {
        return Err(CliError::Verification(failed));
    }
    Ok(())
}

#[derive(Serialize)]
struct FigureManifest<'a> {
    tool: &'static str,
    version: &'static str,
    figure: &'a str,
    seed: Option<u64>,
    generated_unix: u64,
    svg: String,
    csv: String,
    view_box: (f64, f64),
    transform: ViewTransform,
}

fn run_figures(name: &str, seed: Option<u64>, out: &Path) -> CliResult {
    let stamp = unix_seconds();
    let fig = figures::render(name, seed, Some(&format!("unix {stamp}")))?;
    create_dir(out)?;
    let (svg, csv) = (format!("{name}.svg"), format!("{name}.csv"));
    let manifest = FigureManifest {
        tool: "multislit",
        version: env!("CARGO_PKG_VERSION"),
        figure: name,
        seed,
        generated_unix: stamp,
        svg: svg.clone(),
        csv: csv.clone(),
        view_box: (multislit::output::SVG_WIDTH, multislit::output::SVG_HEIGHT),
        transform: fig.transform,
    };
    write(
        &out.join(format!("{name}.manifest.json")),
        &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    write(&out.join(&svg), &fig.svg)?;
    write(&out.join(&csv), &fig.csv)?;
    eprintln!("wrote {} and {}", out.join(&svg).display(), out.join(&csv).display());
    Ok(())
}

fn slope_string(p: &dyck::DyckPath) -> String {
    p.slopes().iter().map(|&s| if s > 0 { 'U' } else { 'D' }).collect()
}

fn run_dyck(args: DyckArgs) -> CliResult {
    if let Some(n) = args.enumerate {
        let paths = dyck::enumerate(n)?;
        for p in &paths {
            let pairs: String = dyck::decode(p).pairs().iter().map(|(a, b)| format!("({a},{b})")).collect();
            println!("{} {}", slope_string(p), pairs);
        }
        eprintln!("{} paths", paths.len());
        return Ok(());
    }
    let (Some(m), Some(n)) = (args.sample, args.n) else {
        return Err(CliError::Usage("give --enumerate N or --sample M --n N".into()));
    };
    if m == 0 || n == 0 {
        return Err(CliError::Usage("--sample and --n must be positive".into()));
    }
    let bp = dyck::uniform_breakpoints(n);
    let mut sampler = dyck::DyckSampler::new(args.seed);
    let mut table = CsvTable::new(&["sample", "p", "e"]);
    let mut maxima = Vec::with_capacity(m);
    for i in 0..m {
        let e = dyck::normalize(&sampler.sample(n), &bp, args.gamma)?;
        maxima.push(e.max());
        for (&p, &v) in e.breakpoints.iter().zip(&e.values) {
            table.row(&[Cell::Int(i as i64), Cell::Num(p), Cell::Num(v)]);
        }
    }
    let mean = maxima.iter().sum::<f64>() / m as f64;
    let var = maxima.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m.max(2) - 1) as f64;
    let mut summary = json!({
        "n": n,
        "samples": m,
        "gamma": args.gamma,
        "seed": args.seed,
        "mean_max": mean,
        "std_max": var.sqrt(),
    });
    if args.gamma == 0.5 {
        summary["expected_mean_max"] = json!(dyck::expected_max_height(n) / ((2 * n) as f64).sqrt());
    }
    let summary = serde_json::to_string_pretty(&summary).expect("summary serializes");
    match args.out {
        Some(dir) => {
            create_dir(&dir)?;
            write(&dir.join("dyck_samples.csv"), &table.finish())?;
            write(&dir.join("dyck_summary.json"), &summary)?;
            println!("{summary}");
        }
        None => {
            print!("{}", table.finish());
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Verify { filter, json } => run_verify(filter, json),
        Command::Figures { name, seed, out } => run_figures(&name, seed, &out),
        Command::Dyck(args) => run_dyck(args),
        Command::Export { builtin, n } => {
            let json = scenarios::builtin(&builtin, n)?.to_json();
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout(), "{json}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
