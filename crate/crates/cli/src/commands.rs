//! Subcommand bodies. Each returns the process exit status.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use lpns::inequality::*;
use lpns::littlewood_paley::{default_j_max, max_resolvable_band};
use lpns::ns::checkpoint::read_checkpoint;
use lpns::ns::{beltrami_exact, random_divfree, run_from, taylor_green, EnergyMonitor, Monitor, MonitorTable, StepRecord};
use lpns::series::{barrier_ode, BarrierConfig, Schedule, SeriesMonitor, Verdict};
use lpns::spectral::Grid;
use lpns::Error;

use crate::config::{InitialSection, RunConfig, SeriesSection};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BLOW_UP: u8 = 3;
pub const EXIT_FAULT: u8 = 4;

/// An error with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidGrid(_)
            | Error::InvalidParameter { .. }
            | Error::InvalidExponent(_)
            | Error::BandRange { .. }
            | Error::GridMismatch(..)
            | Error::Checkpoint(_)
            | Error::Io(_) => EXIT_USAGE,
            Error::BlowUp { .. } => EXIT_BLOW_UP,
            _ => EXIT_FAULT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::from(Error::from(e))
    }
}

pub type Outcome = Result<u8, Failure>;

pub const CHECKS: [&str; 11] = [
    "transform",
    "partition",
    "projection",
    "cheap_lp",
    "bernstein",
    "gradient",
    "paraproduct",
    "product",
    "sobolev",
    "pressure",
    "initial_series",
];

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub checks: Vec<String>,
    pub seed: u64,
    pub n: usize,
    pub samples: usize,
    pub q: f64,
    pub q_prime: f64,
    pub out: PathBuf,
}

pub fn parse_checks(list: &str) -> Result<Vec<String>, Failure> {
    let names: Vec<String> = list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if names.iter().any(|s| s == "all") {
        return Ok(CHECKS.map(String::from).to_vec());
    }
    if names.is_empty() {
        return Err(Failure::usage("no checks selected"));
    }
    if let Some(bad) = names.iter().find(|s| !CHECKS.contains(&s.as_str())) {
        return Err(Failure::usage(format!("unknown check `{bad}`; known: all, {}", CHECKS.join(", "))));
    }
    Ok(names)
}

fn run_check(name: &str, grid: Grid, o: &VerifyOptions) -> lpns::Result<Vec<CheckReport>> {
    let seed = o.seed;
    let top = max_resolvable_band(grid);
    let product_j = default_j_max(grid).min(3);
    let band_range = ((top - 1).min(2), top - 1);
    let random = FieldGenerator::new(FieldKind::RandomBandLimited, seed);
    Ok(match name {
        "transform" => vec![check_transform(grid, seed, o.samples)?],
        "partition" => vec![check_partition(grid, (grid.n() / 4) as f64)?],
        "projection" => vec![check_projection_bound(&random, grid, o.q, product_j, o.samples)?],
        "cheap_lp" => vec![check_cheap_lp(&random, grid, o.q, o.samples)?],
        "bernstein" => {
            let packets = FieldGenerator::new(FieldKind::WavePacket, seed);
            vec![check_bernstein(&packets, grid, o.q, o.q_prime, band_range, o.samples)?]
        }
        "gradient" => vec![check_gradient_equivalence(&random, grid, o.q, band_range, o.samples)?],
        "paraproduct" => {
            let g = random.with_seed(seed.wrapping_add(1));
            vec![check_paraproduct_exactness(&random, &g, grid, product_j, o.samples)?]
        }
        "product" => {
            let f = FieldGenerator::new(FieldKind::SmoothDecaying, seed);
            let g = f.with_seed(seed.wrapping_add(1));
            let e = ProductExponents::new(o.q, 2.0 * o.q, 2.0 * o.q)?;
            vec![check_product_inequality(&f, &g, grid, e, 2, product_j, o.samples)?]
        }
        "sobolev" => {
            let mut reports = vec![check_sobolev_sine(grid, 2.min(top))?];
            reports.extend(check_sobolev_band(&random, grid, 4.0, 1, (1, (top - 2).max(2)), o.samples)?);
            reports
        }
        "pressure" => {
            let states = (0..o.samples as u64)
                .map(|i| random_divfree(grid, seed.wrapping_add(i), 1.0, 1.0, 0.1))
                .collect::<lpns::Result<Vec<_>>>()?;
            vec![
                check_pressure_cz(&states, o.q, 2, product_j, seed)?,
                check_beltrami_pressure(grid, [1, 1, 0], 1.0, 1)?,
            ]
        }
        "initial_series" => {
            let u0 = taylor_green(grid, 1.0, 0.1)?;
            let b_grid: Vec<f64> = (2..=80).map(|i| f64::from(i) * 0.5).collect();
            vec![check_initial_series_bound(&u0, &b_grid, 200, 2)?]
        }
        other => unreachable!("check `{other}` was validated"),
    })
}

/// Runs the selected checks and writes `checks.csv` and
/// `checks_metadata.csv`. Exit 0 iff every hard check passes, 4 otherwise.
pub fn verify(o: &VerifyOptions) -> Outcome {
    if o.samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    let grid = Grid::new(o.n)?;
    let mut reports = Vec::new();
    for name in &o.checks {
        reports.extend(run_check(name, grid, o)?);
    }
    std::fs::create_dir_all(&o.out)?;
    write_reports_csv(BufWriter::new(File::create(o.out.join("checks.csv"))?), &reports)?;
    write_metadata_csv(BufWriter::new(File::create(o.out.join("checks_metadata.csv"))?), &reports)?;
    let mut hard_failed = false;
    for r in &reports {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        let kind = if r.hard { "hard" } else { "fitted" };
        let exp = r.fitted_exponent.map(|e| format!(" exponent={e:.6}")).unwrap_or_default();
        println!("{verdict} {} [{kind}] max_ratio={:e} threshold={:e}{exp}", r.name, r.max_ratio, r.threshold);
        hard_failed |= r.hard && !r.passed;
    }
    Ok(if hard_failed { EXIT_FAULT } else { EXIT_OK })
}

#[derive(Debug, Clone)]
pub struct SimulateOptions {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub resume: Option<PathBuf>,
    /// Attach the series monitor even without a `[series]` section.
    pub force_series: bool,
}

const HISTORY_HEADER: [&str; 10] = [
    "step",
    "time",
    "energy",
    "grad_sq",
    "dissipation",
    "dissipation_trapezoid",
    "l4_integral",
    "max_speed",
    "divergence",
    "cfl",
];

fn write_history(path: &Path, history: &[StepRecord]) -> lpns::Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(HISTORY_HEADER)?;
    for r in history {
        let nums = [
            r.time,
            r.energy,
            r.gradient_energy,
            r.dissipation,
            r.dissipation_trapezoid,
            r.l4_integral,
            r.max_speed,
            r.divergence,
            r.cfl,
        ];
        let mut row = vec![r.step.to_string()];
        row.extend(nums.iter().map(|x| format!("{x:e}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_table(path: &Path, table: &MonitorTable) -> lpns::Result<()> {
    table.write_csv(BufWriter::new(File::create(path)?))
}

pub fn simulate(o: &SimulateOptions) -> Outcome {
    let mut cfg = RunConfig::load(&o.config).map_err(Failure::usage)?;
    if let Some(seed) = o.seed {
        cfg.set_seed(seed);
    }
    if let Some(out) = &o.out {
        cfg.output.directory = out.clone();
    }
    let grid = cfg.grid()?;
    let state = match &o.resume {
        Some(path) => {
            let s = read_checkpoint(path)?;
            grid.ensure_same(&s.grid())?;
            s
        }
        None => cfg.initial_condition().build(grid, cfg.physics.nu)?,
    };
    let opts = cfg.run_options()?;
    let dir = cfg.output.directory.clone();
    std::fs::create_dir_all(&dir)?;

    let series_cfg = match (&cfg.series, o.force_series) {
        (Some(s), _) => Some(s.clone()),
        (None, true) => Some(SeriesSection::default()),
        (None, false) => None,
    };
    let mut energy = EnergyMonitor::new(1);
    let mut series = series_cfg
        .as_ref()
        .map(|s| SeriesMonitor::new(s.params()?, s.cadence, cfg.time.t_end, s.calibration_c))
        .transpose()?;
    let mut monitors: Vec<&mut dyn Monitor> = vec![&mut energy];
    if let Some(s) = series.as_mut() {
        monitors.push(s);
    }
    let out = run_from(state, &opts, &mut monitors)?;

    let names = &cfg.output.csv_names;
    write_history(&dir.join(&names.history), &out.history)?;
    for table in &out.tables {
        let file = if table.name == "series" { &names.series } else { &names.energy };
        write_table(&dir.join(file), table)?;
    }
    let last = out.history.last().expect("initial record");
    println!(
        "steps={} t={} energy={:e} checkpoints={}",
        last.step,
        last.time,
        last.energy,
        out.checkpoints.len()
    );
    if let Some(t) = out.blow_up {
        eprintln!("blow-up: non-finite state at t={t}; partial outputs kept in {}", dir.display());
        return Ok(EXIT_BLOW_UP);
    }
    if let (InitialSection::Beltrami { xi, amplitude }, None) = (&cfg.initial, &o.resume) {
        let exact = beltrami_exact(grid, *xi, *amplitude, cfg.physics.nu, out.state.time())?;
        let rel = out.state.l2_distance(&exact) / exact.l2_norm();
        println!("beltrami relative L2 error vs closed form: {rel:e}");
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone)]
pub struct BarrierOptions {
    pub epsilon: f64,
    pub script_b: f64,
    pub m: f64,
    pub t_end: f64,
    pub dt: f64,
    pub pulse: bool,
    pub out: PathBuf,
}

/// Writes `barrier.csv` (`t, F, bound`) and prints the verdict. Exit 3 when
/// the trajectory overflows, 4 when the hypothesis holds but the bound is
/// crossed.
pub fn barrier(o: &BarrierOptions) -> Outcome {
    let schedule = if o.pulse { Schedule::Pulse } else { Schedule::Uniform };
    let cfg = BarrierConfig::new(o.epsilon, o.script_b, o.m, o.t_end)?.with_schedule(schedule)?;
    let res = barrier_ode(&cfg, o.dt)?;
    std::fs::create_dir_all(&o.out)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(o.out.join("barrier.csv"))?));
    w.write_record(["t", "F", "bound"]).map_err(Error::from)?;
    for (t, f) in res.times.iter().zip(&res.values) {
        w.write_record([t, f, &res.bound].map(|x| format!("{x:e}"))).map_err(Error::from)?;
    }
    w.flush()?;
    let verdict = match res.verdict {
        Verdict::Pass => "pass",
        Verdict::HypothesisFailed => "hypothesis_failed",
        Verdict::ConclusionFailed => "conclusion_failed",
    };
    let mut stdout = std::io::stdout().lock();
    writeln!(
        stdout,
        "verdict={verdict} threshold={:e} bound={:e} slack={:e} blow_up={}",
        res.threshold,
        res.bound,
        res.slack,
        res.blow_up.map(|t| t.to_string()).unwrap_or_else(|| "none".into())
    )?;
    Ok(match (res.blow_up, res.verdict) {
        (Some(_), _) => EXIT_BLOW_UP,
        (None, Verdict::ConclusionFailed) => EXIT_FAULT,
        _ => EXIT_OK,
    })
}
