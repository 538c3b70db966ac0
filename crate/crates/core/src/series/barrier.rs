//! The barrier inequality `F' <= g (eps + F + F^M)`, integrated with equality
//! by RK4 and compared with the bound `3 eps e^B`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::random::sample_rng;

/// Forcing `g(t) >= 0` of the barrier ODE.
#[derive(Clone)]
pub enum Schedule {
    /// `g = B / T`, which spends the whole budget.
    Uniform,
    /// `g = (2B / T) sin^2(pi t / T)`, same budget.
    Pulse,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Schedule::Uniform => write!(f, "Uniform"),
            Schedule::Pulse => write!(f, "Pulse"),
            Schedule::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BarrierConfig {
    pub epsilon: f64,
    /// Budget `int_0^T g`.
    pub script_b: f64,
    pub m: f64,
    pub schedule: Schedule,
    pub t_end: f64,
}

/// Panels of the Simpson rule used to check the budget of a custom schedule.
const BUDGET_PANELS: usize = 4096;

impl BarrierConfig {
    pub fn new(epsilon: f64, script_b: f64, m: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            epsilon,
            script_b,
            m,
            schedule: Schedule::Uniform,
            t_end,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Result<Self> {
        self.schedule = schedule;
        self.validate()?;
        Ok(self)
    }

    pub fn g(&self, t: f64) -> f64 {
        let (b, tt) = (self.script_b, self.t_end);
        match &self.schedule {
            Schedule::Uniform => b / tt,
            Schedule::Pulse => 2.0 * b / tt * (PI * t / tt).sin().powi(2),
            Schedule::Custom(f) => f(t),
        }
    }

    /// `int_0^T g` by composite Simpson.
    pub fn budget(&self) -> f64 {
        let h = self.t_end / BUDGET_PANELS as f64;
        let mut s = self.g(0.0) + self.g(self.t_end);
        for i in 1..BUDGET_PANELS {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * self.g(i as f64 * h);
        }
        s * h / 3.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return bad("epsilon", format!("need epsilon >= 0, got {}", self.epsilon));
        }
        if !(self.script_b > 0.0) || !self.script_b.is_finite() {
            return bad("script_b", format!("need a finite budget > 0, got {}", self.script_b));
        }
        if !(self.m > 1.0) || !self.m.is_finite() {
            return bad("M", format!("need M > 1, got {}", self.m));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return bad("T", format!("need T > 0, got {}", self.t_end));
        }
        if let Schedule::Custom(_) = self.schedule {
            let h = self.t_end / BUDGET_PANELS as f64;
            if (0..=BUDGET_PANELS).any(|i| !(self.g(i as f64 * h) >= 0.0)) {
                return bad("schedule", "g must be nonnegative and finite".into());
            }
            let budget = self.budget();
            if budget > self.script_b * (1.0 + 1e-9) {
                return bad("schedule", format!("int g = {budget} exceeds the budget {}", self.script_b));
            }
        }
        Ok(())
    }

    /// `(3 e^B)^{-M/(M-1)}`.
    pub fn threshold(&self) -> f64 {
        hypothesis_threshold(self.script_b, self.m)
    }

    pub fn bound(&self) -> f64 {
        3.0 * self.epsilon * self.script_b.exp()
    }
}

/// `(3 e^B)^{-M/(M-1)}`, the largest `eps` for which the barrier argument closes.
pub fn hypothesis_threshold(script_b: f64, m: f64) -> f64 {
    (-(m / (m - 1.0)) * (3.0f64.ln() + script_b)).exp()
}

/// Root of `(3 eps e^B)^M = eps` on `(0, 1 / (3 e^B))`, found by bisection
/// in `ln eps`: the largest `eps` for which `F <= 3 eps e^B` forces
/// `F^M <= eps`.
pub fn threshold_by_bisection(script_b: f64, m: f64, rel_tol: f64) -> Result<f64> {
    if !(m > 1.0) || !(script_b > 0.0) {
        return Err(Error::InvalidParameter {
            name: "M",
            reason: format!("need M > 1 and B > 0, got M={m}, B={script_b}"),
        });
    }
    let ln3b = 3.0f64.ln() + script_b;
    // h < 0 below the root, > 0 above
    let h = |ln_eps: f64| m * (ln3b + ln_eps) - ln_eps;
    let (mut lo, mut hi) = (-1000.0, -ln3b);
    while hi - lo > rel_tol {
        let mid = 0.5 * (lo + hi);
        if h(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Hypothesis and conclusion both hold.
    Pass,
    /// The hypothesis fails, so no bound is claimed.
    HypothesisFailed,
    /// The hypothesis holds but the trajectory crosses the bound.
    ConclusionFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierOutcome {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub bound: f64,
    pub threshold: f64,
    pub hypothesis_holds: bool,
    pub conclusion_holds: bool,
    /// `min_t (bound - F) / bound`, 0 for `eps = 0`.
    pub slack: f64,
    /// First time `F` or `F^M` left the double range.
    pub blow_up: Option<f64>,
    pub verdict: Verdict,
}

/// Integrates `F' = g (eps + F + F^M)` from `F(0) = eps` to `T` with RK4.
/// The last step is shortened to land on `T`.
pub fn barrier_ode(cfg: &BarrierConfig, dt: f64) -> Result<BarrierOutcome> {
    cfg.validate()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("need dt > 0, got {dt}"),
        });
    }
    let (eps, m) = (cfg.epsilon, cfg.m);
    let rhs = |t: f64, f: f64| cfg.g(t) * (eps + f + f.powf(m));
    let mut t = 0.0;
    let mut f = eps;
    let mut times = vec![t];
    let mut values = vec![f];
    let mut blow_up = None;
    let steps = (cfg.t_end / dt).ceil() as usize;
    for s in 0..steps {
        let h = (cfg.t_end - t).min(dt);
        let k1 = rhs(t, f);
        let k2 = rhs(t + 0.5 * h, f + 0.5 * h * k1);
        let k3 = rhs(t + 0.5 * h, f + 0.5 * h * k2);
        let k4 = rhs(t + h, f + h * k3);
        f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = if s + 1 == steps { cfg.t_end } else { t + h };
        if !f.is_finite() || !f.powf(m).is_finite() {
            blow_up = Some(t);
            break;
        }
        times.push(t);
        values.push(f);
    }
    let bound = cfg.bound();
    let threshold = cfg.threshold();
    let hypothesis_holds = eps <= threshold;
    let peak = values.iter().copied().fold(0.0, f64::max);
    let conclusion_holds = blow_up.is_none() && peak <= bound;
    let slack = if blow_up.is_some() {
        f64::NEG_INFINITY
    } else if bound > 0.0 {
        (bound - peak) / bound
    } else {
        0.0
    };
    let verdict = match (hypothesis_holds, conclusion_holds) {
        (false, _) => Verdict::HypothesisFailed,
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::ConclusionFailed,
    };
    Ok(BarrierOutcome {
        times,
        values,
        bound,
        threshold,
        hypothesis_holds,
        conclusion_holds,
        slack,
        blow_up,
        verdict,
    })
}

/// One point of a hypothesis-satisfying sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub script_b: f64,
    pub m: f64,
    pub pulse: bool,
    pub slack: f64,
    pub verdict: Verdict,
}

/// `points` draws with `B` uniform in `[0.5, 3]`, `M` cycling through
/// `{2, 5, 10}`, `eps` uniform in `(0, threshold]` and the schedule
/// alternating between uniform and pulse, on `[0, 1]`.
pub fn barrier_sweep(points: usize, seed: u64, dt: f64) -> Result<Vec<SweepPoint>> {
    const MS: [f64; 3] = [2.0, 5.0, 10.0];
    (0..points)
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let script_b = rng.random_range(0.5..=3.0);
            let m = MS[i % MS.len()];
            let u: f64 = 1.0 - rng.random::<f64>();
            let epsilon = u * hypothesis_threshold(script_b, m);
            let pulse = i % 2 == 1;
            let cfg = BarrierConfig::new(epsilon, script_b, m, 1.0)?
                .with_schedule(if pulse { Schedule::Pulse } else { Schedule::Uniform })?;
            let out = barrier_ode(&cfg, dt)?;
            Ok(SweepPoint {
                epsilon,
                script_b,
                m,
                pulse,
                slack: out.slack,
                verdict: out.verdict,
            })
        })
        .collect()
}
