//! Series rows attached to a solver run.

use super::value::{log_gronwall_bound, log_gronwall_target, JSplit, SeriesParams, SeriesTerms, Weight};
use crate::error::Result;
use crate::ns::{Monitor, Observation};

pub const SERIES_HEADER: [&str; 8] = [
    "time",
    "series_Bk_total",
    "series_Bk_low",
    "series_Bk_high",
    "series_Bhat_low",
    "sup_estimate",
    "gronwall_ratio",
    "truncation_flag",
];

/// Per-cadence series values of a run.
///
/// `sup_estimate` is `max_j ||D^sigma P_j u||_inf / 2^{B+1}` and
/// `gronwall_ratio` is the full `B_k` series over `2C - 1`, with `C` built
/// from the run's initial state, `t_end` and `calibration_c`.
/// `truncation_flag` is 1 when any of the four series has a boundary term
/// above the truncation tolerance.
#[derive(Debug, Clone)]
pub struct SeriesMonitor {
    params: SeriesParams,
    cadence: usize,
    t_end: f64,
    calibration_c: f64,
    log_target: Option<f64>,
}

impl SeriesMonitor {
    pub fn new(params: SeriesParams, cadence: usize, t_end: f64, calibration_c: f64) -> Result<Self> {
        params.validate()?;
        // validates t_end and the constant up front
        log_gronwall_bound(0.0, 1.0, t_end, calibration_c)?;
        Ok(Self {
            params,
            cadence: cadence.max(1),
            t_end,
            calibration_c,
            log_target: None,
        })
    }

    pub fn params(&self) -> &SeriesParams {
        &self.params
    }
}

impl Monitor for SeriesMonitor {
    fn name(&self) -> &str {
        "series"
    }

    fn header(&self) -> Vec<String> {
        SERIES_HEADER.map(String::from).to_vec()
    }

    fn cadence(&self) -> usize {
        self.cadence
    }

    fn observe(&mut self, obs: &Observation<'_>) -> Result<Vec<f64>> {
        let log_target = match self.log_target {
            Some(t) => t,
            None => {
                let init = obs.initial;
                let log_c = log_gronwall_bound(init.l2_norm(), init.nu(), self.t_end, self.calibration_c)?;
                *self.log_target.insert(log_gronwall_target(log_c))
            }
        };
        let terms = SeriesTerms::compute(obs.state, &self.params)?;
        let values = [
            terms.value(Weight::Bk, JSplit::All),
            terms.value(Weight::Bk, JSplit::Low),
            terms.value(Weight::Bk, JSplit::High),
            terms.value(Weight::BhatK, JSplit::Low),
        ];
        let flag = values.iter().any(|v| v.truncation_warning());
        Ok(vec![
            obs.record.time,
            values[0].value(),
            values[1].value(),
            values[2].value(),
            values[3].value(),
            terms.sup_ratio(),
            (values[0].log_value - log_target).exp(),
            if flag { 1.0 } else { 0.0 },
        ])
    }
}
