//! Driving loop: steps a state to `t_end`, keeps running integrals, feeds
//! monitors and writes checkpoints.

use std::path::PathBuf;

use super::checkpoint::write_checkpoint;
use super::solver::{StepConfig, Stepper};
use super::state::VelocityState;
use crate::error::{Error, Result};

/// Per-step diagnostics. Integrals start at the first state handed to the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    /// `||u||_2^2`
    pub energy: f64,
    /// `||grad u||_2^2`
    pub gradient_energy: f64,
    /// `2 nu int ||grad u||^2`, integrated with the RK4 stage weights.
    pub dissipation: f64,
    /// Same integral by the trapezoid rule over step endpoints.
    pub dissipation_trapezoid: f64,
    /// `int ||u||_4^(8/3)` by the trapezoid rule.
    pub l4_integral: f64,
    pub max_speed: f64,
    pub divergence: f64,
    /// `dt * n * max|u|`; advisory only.
    pub cfl: f64,
}

pub struct Observation<'a> {
    pub state: &'a VelocityState,
    pub record: &'a StepRecord,
    pub initial: &'a VelocityState,
}

/// Hook called on snapshots of a run. Rows are numeric and match `header`.
pub trait Monitor {
    fn name(&self) -> &str;
    fn header(&self) -> Vec<String>;
    /// Observe every `cadence` steps; the first and last states are always seen.
    fn cadence(&self) -> usize;
    fn observe(&mut self, obs: &Observation<'_>) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl MonitorTable {
    /// Header row then one line per observation; numbers in shortest
    /// round-trip exponent form.
    pub fn write_csv(&self, w: impl std::io::Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|x| format!("{x:e}")))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Energy rows: the budget residual is `(E + D - E0) / E0`.
#[derive(Debug, Clone)]
pub struct EnergyMonitor {
    cadence: usize,
}

impl EnergyMonitor {
    pub fn new(cadence: usize) -> Self {
        Self { cadence: cadence.max(1) }
    }
}

impl Monitor for EnergyMonitor {
    fn name(&self) -> &str {
        "energy"
    }

    fn header(&self) -> Vec<String> {
        [
            "time",
            "l2_norm",
            "grad_sq",
            "dissipation",
            "dissipation_trapezoid",
            "budget_residual",
            "l4_integral",
            "divergence",
            "cfl",
        ]
        .map(String::from)
        .to_vec()
    }

    fn cadence(&self) -> usize {
        self.cadence
    }

    fn observe(&mut self, obs: &Observation<'_>) -> Result<Vec<f64>> {
        let r = obs.record;
        let e0 = obs.initial.energy();
        let residual = if e0 > 0.0 {
            (r.energy + r.dissipation - e0) / e0
        } else {
            0.0
        };
        Ok(vec![
            r.time,
            r.energy.sqrt(),
            r.gradient_energy,
            r.dissipation,
            r.dissipation_trapezoid,
            residual,
            r.l4_integral,
            r.divergence,
            r.cfl,
        ])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub step: StepConfig,
    pub t_end: f64,
    /// Write a checkpoint every this many steps, plus one for the final state.
    pub checkpoint_interval: Option<usize>,
    pub checkpoint_dir: Option<PathBuf>,
}

impl RunOptions {
    pub fn new(step: StepConfig, t_end: f64) -> Self {
        Self {
            step,
            t_end,
            checkpoint_interval: None,
            checkpoint_dir: None,
        }
    }

    fn steps_from(&self, t0: f64) -> Result<usize> {
        let span = self.t_end - t0;
        let dt = self.step.dt;
        if !(span.is_finite()) || span < -1e-12 * dt {
            return Err(Error::InvalidParameter {
                name: "t_end",
                reason: format!("t_end={} precedes the start time {t0}", self.t_end),
            });
        }
        let steps = (span / dt).round();
        if (steps * dt - span).abs() > 1e-9 * dt.max(span.abs()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("interval {span} is not a whole number of steps of {dt}"),
            });
        }
        Ok(steps.max(0.0) as usize)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: VelocityState,
    pub history: Vec<StepRecord>,
    pub tables: Vec<MonitorTable>,
    pub checkpoints: Vec<PathBuf>,
    /// Time of the step that produced a non-finite state; `state` is then the
    /// last finite one.
    pub blow_up: Option<f64>,
}

fn speed_stats(state: &VelocityState) -> (f64, f64) {
    let speed = state.speed();
    let max = speed.max_abs();
    let l4 = VelocityState::speed_norm(&speed, 4.0);
    (max, l4.log_pow(8.0 / 3.0).exp())
}

fn checkpoint_path(dir: &std::path::Path, step: usize) -> PathBuf {
    dir.join(format!("checkpoint_{step:08}.lpns"))
}

pub fn run(initial: VelocityState, opts: &RunOptions, monitors: &mut [&mut dyn Monitor]) -> Result<RunOutcome> {
    run_from(initial, opts, monitors)
}

/// Continues from `state.time()`; a state read back from a checkpoint resumes
/// the same time sequence bit for bit.
pub fn run_from(state: VelocityState, opts: &RunOptions, monitors: &mut [&mut dyn Monitor]) -> Result<RunOutcome> {
    let steps = opts.steps_from(state.time())?;
    let grid = state.grid();
    let dt = opts.step.dt;
    // steps are counted from t = 0 so cadences and checkpoint names carry over a resume
    let offset = (state.time() / dt).round().max(0.0) as usize;
    let stepper = Stepper::new(grid, state.nu(), &opts.step);
    if let Some(dir) = &opts.checkpoint_dir {
        std::fs::create_dir_all(dir)?;
    }
    let checkpointing = opts.checkpoint_dir.as_ref().zip(opts.checkpoint_interval.filter(|&k| k > 0));

    let initial = state.clone();
    let mut tables: Vec<MonitorTable> = monitors
        .iter()
        .map(|m| MonitorTable {
            name: m.name().to_string(),
            header: m.header(),
            rows: Vec::new(),
        })
        .collect();

    let (max0, l4_0) = speed_stats(&state);
    let mut record = StepRecord {
        step: offset,
        time: state.time(),
        energy: state.energy(),
        gradient_energy: state.gradient_energy(),
        dissipation: 0.0,
        dissipation_trapezoid: 0.0,
        l4_integral: 0.0,
        max_speed: max0,
        divergence: state.divergence_residual(),
        cfl: dt * grid.n() as f64 * max0,
    };
    let mut l4_prev = l4_0;
    let mut history = vec![record];
    let mut checkpoints = Vec::new();
    let observe_all = |monitors: &mut [&mut dyn Monitor],
                       tables: &mut [MonitorTable],
                       s: &VelocityState,
                       rec: &StepRecord,
                       last: bool|
     -> Result<()> {
        for (m, t) in monitors.iter_mut().zip(tables.iter_mut()) {
            if last || rec.step.is_multiple_of(m.cadence().max(1)) {
                let obs = Observation {
                    state: s,
                    record: rec,
                    initial: &initial,
                };
                t.rows.push(m.observe(&obs)?);
            }
        }
        Ok(())
    };
    observe_all(monitors, &mut tables, &state, &record, steps == 0)?;

    let mut state = state;
    let mut blow_up = None;
    for i in 1..=steps {
        let step = offset + i;
        let last = i == steps;
        let (next, diss) = stepper.advance(state.components());
        let next = state.with_components(next, state.time() + dt);
        if !next.is_finite() {
            blow_up = Some(next.time());
            break;
        }
        let grad = next.gradient_energy();
        let (max_speed, l4) = speed_stats(&next);
        let nu = next.nu();
        record = StepRecord {
            step,
            time: next.time(),
            energy: next.energy(),
            gradient_energy: grad,
            dissipation: record.dissipation + diss,
            dissipation_trapezoid: record.dissipation_trapezoid
                + dt * nu * (record.gradient_energy + grad),
            l4_integral: record.l4_integral + 0.5 * dt * (l4_prev + l4),
            max_speed,
            divergence: next.divergence_residual(),
            cfl: dt * grid.n() as f64 * max_speed,
        };
        l4_prev = l4;
        history.push(record);
        state = next;
        observe_all(monitors, &mut tables, &state, &record, last)?;
        if let Some((dir, every)) = checkpointing {
            if step.is_multiple_of(every) || last {
                let path = checkpoint_path(dir, step);
                write_checkpoint(&state, &path)?;
                checkpoints.push(path);
            }
        }
    }
    if blow_up.is_some() {
        // keep the partial tables and flush the last finite state
        if let Some(dir) = &opts.checkpoint_dir {
            let path = checkpoint_path(dir, record.step);
            write_checkpoint(&state, &path)?;
            checkpoints.push(path);
        }
    }
    Ok(RunOutcome {
        state,
        history,
        tables,
        checkpoints,
        blow_up,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns::initial::taylor_green;
    use crate::ns::solver::{step, Dealias};
    use crate::spectral::Grid;

    fn opts(dt: f64, t_end: f64) -> RunOptions {
        RunOptions::new(StepConfig::new(dt, Dealias::TwoThirds).unwrap(), t_end)
    }

    #[test]
    fn t_end_zero_observes_once() {
        let u = taylor_green(Grid::new(8).unwrap(), 1.0, 0.1).unwrap();
        let mut e = EnergyMonitor::new(1);
        let out = run(u, &opts(0.01, 0.0), &mut [&mut e]).unwrap();
        assert_eq!(out.tables[0].rows.len(), 1);
        assert_eq!(out.history.len(), 1);
    }

    #[test]
    fn run_matches_repeated_step() {
        let u = taylor_green(Grid::new(8).unwrap(), 1.0, 0.1).unwrap();
        let o = opts(0.01, 0.03);
        let out = run(u.clone(), &o, &mut []).unwrap();
        let mut v = u;
        for _ in 0..3 {
            v = step(&v, &o.step).unwrap();
        }
        assert_eq!(out.state, v);
    }

    #[test]
    fn rejects_fractional_step_count() {
        let u = taylor_green(Grid::new(8).unwrap(), 1.0, 0.1).unwrap();
        assert!(run(u, &opts(0.01, 0.0345), &mut []).is_err());
    }

    #[test]
    fn cadence_and_final_row() {
        let u = taylor_green(Grid::new(8).unwrap(), 1.0, 0.1).unwrap();
        let mut e = EnergyMonitor::new(4);
        let out = run(u, &opts(0.01, 0.1), &mut [&mut e]).unwrap();
        let times: Vec<f64> = out.tables[0].rows.iter().map(|r| r[0]).collect();
        // steps 0, 4, 8 and the final 10
        assert_eq!(times.len(), 4);
        assert!((times[3] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn blow_up_preserves_last_finite_state() {
        let g = Grid::new(8).unwrap();
        let u = taylor_green(g, 1e155, 1e-6).unwrap();
        let out = run(u, &opts(0.01, 1.0), &mut []).unwrap();
        assert!(out.blow_up.is_some());
        assert!(out.state.is_finite());
    }
}
