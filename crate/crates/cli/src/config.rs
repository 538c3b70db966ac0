//! TOML run configuration. Unknown keys are rejected and every range is
//! checked at load time.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use lpns::ns::{Dealias, InitialCondition, RunOptions, StepConfig};
use lpns::series::SeriesParams;
use lpns::spectral::Grid;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub physics: PhysicsSection,
    pub time: TimeSection,
    pub initial: InitialSection,
    pub series: Option<SeriesSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum DealiasName {
    #[default]
    TwoThirds,
    ThreeHalves,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    #[serde(default)]
    pub dealias: DealiasName,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub nu: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum InitialSection {
    TaylorGreen {
        #[serde(default = "one")]
        amplitude: f64,
    },
    Beltrami {
        xi: [i64; 3],
        #[serde(default = "one")]
        amplitude: f64,
    },
    Random {
        #[serde(default)]
        seed: u64,
        #[serde(default = "one")]
        slope: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Checkpoint {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeriesSection {
    #[serde(default = "default_sigma")]
    pub sigma: u32,
    #[serde(default = "default_j0")]
    pub j0: i32,
    #[serde(default = "default_k0")]
    pub k0: u32,
    #[serde(rename = "B")]
    pub b: f64,
    pub k_grid: Option<Vec<u32>>,
    pub j_cap: Option<i32>,
    #[serde(default = "default_cadence")]
    pub cadence: usize,
    #[serde(default = "one")]
    pub calibration_c: f64,
}

fn default_sigma() -> u32 {
    2
}
fn default_j0() -> i32 {
    1
}
fn default_k0() -> u32 {
    100
}
fn default_cadence() -> usize {
    10
}

impl Default for SeriesSection {
    fn default() -> Self {
        Self {
            sigma: default_sigma(),
            j0: default_j0(),
            k0: default_k0(),
            b: 4.0,
            k_grid: None,
            j_cap: None,
            cadence: default_cadence(),
            calibration_c: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    pub checkpoint_interval: Option<usize>,
    #[serde(default)]
    pub csv_names: CsvNames,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_dir(),
            checkpoint_interval: None,
            csv_names: CsvNames::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CsvNames {
    pub energy: String,
    pub series: String,
    pub history: String,
}

impl Default for CsvNames {
    fn default() -> Self {
        Self {
            energy: "energy.csv".into(),
            series: "series.csv".into(),
            history: "history.csv".into(),
        }
    }
}

impl SeriesSection {
    pub fn params(&self) -> lpns::Result<SeriesParams> {
        let mut p = SeriesParams::new(self.b)?;
        p.sigma = self.sigma;
        p.j0 = self.j0;
        p.k0 = self.k0;
        p.k_grid = match &self.k_grid {
            Some(k) => k.clone(),
            None => (self.k0..=2 * self.k0).step_by((self.k0 / 10).max(1) as usize).collect(),
        };
        p.j_cap = self.j_cap;
        p.validate()?;
        Ok(p)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn grid(&self) -> lpns::Result<Grid> {
        Grid::new(self.grid.n)
    }

    pub fn dealias(&self) -> Dealias {
        match self.grid.dealias {
            DealiasName::TwoThirds => Dealias::TwoThirds,
            DealiasName::ThreeHalves => Dealias::ThreeHalves,
        }
    }

    pub fn initial_condition(&self) -> InitialCondition {
        match &self.initial {
            InitialSection::TaylorGreen { amplitude } => InitialCondition::TaylorGreen { amplitude: *amplitude },
            InitialSection::Beltrami { xi, amplitude } => InitialCondition::Beltrami {
                xi: *xi,
                amplitude: *amplitude,
            },
            InitialSection::Random { seed, slope, amplitude } => InitialCondition::RandomDivFree {
                seed: *seed,
                slope: *slope,
                amplitude: *amplitude,
            },
            InitialSection::Checkpoint { path } => InitialCondition::Checkpoint(path.clone()),
        }
    }

    pub fn run_options(&self) -> lpns::Result<RunOptions> {
        let mut opts = RunOptions::new(StepConfig::new(self.time.dt, self.dealias())?, self.time.t_end);
        opts.checkpoint_interval = self.output.checkpoint_interval;
        opts.checkpoint_dir = self.output.checkpoint_interval.map(|_| self.output.directory.join("checkpoints"));
        Ok(opts)
    }

    /// Overrides the seed of a random initial condition.
    pub fn set_seed(&mut self, new_seed: u64) {
        if let InitialSection::Random { seed, .. } = &mut self.initial {
            *seed = new_seed;
        }
    }

    fn validate(&self) -> Result<(), String> {
        let field = |name: &str, e: lpns::Error| format!("{name}: {e}");
        self.grid().map_err(|e| field("grid.n", e))?;
        if !(self.physics.nu > 0.0) || !self.physics.nu.is_finite() {
            return Err(format!("physics.nu: need a finite nu > 0, got {}", self.physics.nu));
        }
        if !(self.time.t_end >= 0.0) || !self.time.t_end.is_finite() {
            return Err(format!("time.t_end: need t_end >= 0, got {}", self.time.t_end));
        }
        let steps = self.time.t_end / self.time.dt;
        StepConfig::new(self.time.dt, self.dealias()).map_err(|e| field("time.dt", e))?;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(format!(
                "time: t_end={} is not a whole number of steps of dt={}",
                self.time.t_end, self.time.dt
            ));
        }
        match &self.initial {
            InitialSection::TaylorGreen { amplitude }
            | InitialSection::Beltrami { amplitude, .. }
            | InitialSection::Random { amplitude, .. }
                if !amplitude.is_finite() =>
            {
                return Err(format!("initial.amplitude: must be finite, got {amplitude}"));
            }
            InitialSection::Beltrami { xi, .. } => {
                let half = self.grid.n as i64 / 2;
                if *xi == [0, 0, 0] || xi.iter().any(|k| k.abs() >= half) {
                    return Err(format!("initial.xi: {xi:?} must be nonzero with |xi_i| < n/2 = {half}"));
                }
            }
            _ => {}
        }
        if let Some(s) = &self.series {
            s.params().map_err(|e| field("series", e))?;
            if !(s.calibration_c > 0.0) || !s.calibration_c.is_finite() {
                return Err(format!("series.calibration_c: need > 0, got {}", s.calibration_c));
            }
            if s.cadence == 0 {
                return Err("series.cadence: must be at least 1".into());
            }
        }
        if self.output.checkpoint_interval == Some(0) {
            return Err("output.checkpoint_interval: must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[grid]
n = 16
[physics]
nu = 0.1
[time]
dt = 0.01
t_end = 0.05
[initial]
kind = "taylor_green"
"#;

    #[test]
    fn minimal_config_defaults() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.grid.dealias, DealiasName::TwoThirds);
        assert_eq!(c.output.csv_names.series, "series.csv");
        assert!(c.series.is_none());
    }

    #[test]
    fn unknown_key_is_rejected_with_location() {
        let text = MINIMAL.replace("nu = 0.1", "nu = 0.1\nnuu = 0.2");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(err.contains("nuu"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn ranges_are_checked() {
        for (from, to) in [("n = 16", "n = 12"), ("nu = 0.1", "nu = -1.0"), ("t_end = 0.05", "t_end = 0.055")] {
            assert!(RunConfig::parse(&MINIMAL.replace(from, to)).is_err(), "{to}");
        }
    }

    #[test]
    fn series_section_builds_params() {
        let text = format!("{MINIMAL}[series]\nB = 2.0\nk_grid = [100, 150]\n");
        let c = RunConfig::parse(&text).unwrap();
        let p = c.series.unwrap().params().unwrap();
        assert_eq!(p.k_grid, vec![100, 150]);
        assert_eq!(p.sigma, 2);
        let bad = format!("{MINIMAL}[series]\nB = 2.0\nk_grid = [90, 150]\n");
        assert!(RunConfig::parse(&bad).is_err());
    }

    #[test]
    fn default_k_grid_matches_library() {
        let p = SeriesSection { b: 3.0, ..Default::default() }.params().unwrap();
        assert_eq!(p.k_grid, SeriesParams::new(3.0).unwrap().k_grid);
    }
}
