//! Seeded test fields for the inequality checks. Sample `i` of a generator is
//! drawn from its own stream, so ensembles can be split or extended without
//! changing earlier samples.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::littlewood_paley::{max_resolvable_band, project_band};
use crate::random::{normal, random_hermitian, sample_rng};
use crate::spectral::{Grid, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldKind {
    /// Gaussian coefficients on the annulus `2^{j-1} < |xi| < 2^{j+1}` of
    /// the band, or on every non-Nyquist mode without a band.
    RandomBandLimited,
    /// `cos(2 pi xi.x)`; every sample is the same field.
    SingleMode([i64; 3]),
    /// Periodized Gaussian packet of width `~2^-j` around a random point,
    /// carried by a random wavevector of length `2^j`, then band projected.
    WavePacket,
    /// Gaussian coefficients with standard deviation `exp(-|xi| / 2^j)`,
    /// `j = 1` without a band.
    SmoothDecaying,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGenerator {
    pub kind: FieldKind,
    pub seed: u64,
    pub band: Option<i32>,
    /// Target `||f||_2`; single modes use it as the cosine amplitude.
    pub amplitude: f64,
}

impl FieldGenerator {
    pub fn new(kind: FieldKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            band: None,
            amplitude: 1.0,
        }
    }

    pub fn with_band(mut self, j: i32) -> Self {
        self.band = Some(j);
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn check_band(&self, grid: Grid) -> Result<()> {
        if let Some(j) = self.band {
            if j < 0 || j > max_resolvable_band(grid) {
                return Err(Error::BandRange {
                    j_min: j,
                    j_max: j,
                    n: grid.n(),
                    reason: "generator band outside the resolvable range",
                });
            }
        }
        Ok(())
    }

    /// Mean-zero real field, Nyquist planes empty.
    pub fn sample(&self, grid: Grid, index: u64) -> Result<SpectralField> {
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                reason: format!("{}", self.amplitude),
            });
        }
        self.check_band(grid)?;
        let mut rng = sample_rng(self.seed, index);
        let resolvable = |xi: [i64; 3]| xi != [0, 0, 0] && !grid.is_nyquist(xi);
        let radius = |xi: [i64; 3]| ((xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) as f64).sqrt();
        let field = match self.kind {
            FieldKind::SingleMode(xi) => {
                if !resolvable(xi) {
                    return Err(Error::InvalidParameter {
                        name: "xi",
                        reason: format!("mode {xi:?} must be nonzero and off the Nyquist planes"),
                    });
                }
                return SpectralField::cosine_mode(grid, xi, self.amplitude);
            }
            FieldKind::RandomBandLimited => {
                let band = self.band;
                random_hermitian(grid, &mut rng, |xi| {
                    let r = radius(xi);
                    let inside = match band {
                        Some(j) => r > 2f64.powi(j - 1) && r < 2f64.powi(j + 1),
                        None => true,
                    };
                    if resolvable(xi) && inside {
                        1.0
                    } else {
                        0.0
                    }
                })
            }
            FieldKind::SmoothDecaying => {
                let scale = 2f64.powi(self.band.unwrap_or(1));
                random_hermitian(grid, &mut rng, |xi| {
                    if resolvable(xi) {
                        (-radius(xi) / scale).exp()
                    } else {
                        0.0
                    }
                })
            }
            FieldKind::WavePacket => {
                let j = self.band.ok_or(Error::InvalidParameter {
                    name: "band",
                    reason: "wave packets need a band".into(),
                })?;
                wave_packet(grid, j, &mut rng)
            }
        };
        Ok(normalized(field, self.amplitude))
    }
}

fn normalized(f: SpectralField, amplitude: f64) -> SpectralField {
    let norm = f.energy().sqrt();
    if norm == 0.0 {
        f
    } else {
        f.scale(amplitude / norm)
    }
}

fn wave_packet(grid: Grid, j: i32, rng: &mut crate::random::Rng) -> SpectralField {
    let centre: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>());
    let dir = loop {
        let v: [f64; 3] = std::array::from_fn(|_| normal(rng));
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if len > 1e-8 {
            break v.map(|x| x / len);
        }
    };
    let carrier = 2f64.powi(j);
    let k0 = dir.map(|d| d * carrier);
    let theta = 2.0 * PI * rng.random::<f64>();
    // spectral width 2^j / 4 keeps most of the packet inside the band
    let width = 2.0 / (PI * carrier);
    let gauss = |d: [f64; 3]| (-2.0 * PI * PI * width * width * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2])).exp();
    let (e_plus, e_minus) = (Complex64::from_polar(0.5, theta), Complex64::from_polar(0.5, -theta));
    let mut f = SpectralField::zeros(grid);
    for (i, c) in f.coeffs_mut().iter_mut().enumerate() {
        let xi = grid.wavevector(i);
        if xi == [0, 0, 0] || grid.is_nyquist(xi) {
            continue;
        }
        let x = xi.map(|k| k as f64);
        let shift = Complex64::from_polar(1.0, -2.0 * PI * (x[0] * centre[0] + x[1] * centre[1] + x[2] * centre[2]));
        let minus = [x[0] - k0[0], x[1] - k0[1], x[2] - k0[2]];
        let plus = [x[0] + k0[0], x[1] + k0[1], x[2] + k0[2]];
        *c = shift * (e_plus * gauss(minus) + e_minus * gauss(plus));
    }
    project_band(&f, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::inverse_transform;

    #[test]
    fn reproducible_and_real() {
        let g = Grid::new(16).unwrap();
        for kind in [FieldKind::RandomBandLimited, FieldKind::WavePacket, FieldKind::SmoothDecaying] {
            let gen = FieldGenerator::new(kind, 9).with_band(2).with_amplitude(0.5);
            let a = gen.sample(g, 3).unwrap();
            assert_eq!(a, gen.sample(g, 3).unwrap());
            assert_ne!(a, gen.sample(g, 4).unwrap());
            assert!(a.hermitian_residue() < 1e-15);
            assert_eq!(a.get([0, 0, 0]), Complex64::new(0.0, 0.0));
            assert!((a.energy().sqrt() - 0.5).abs() < 1e-14);
            assert!(inverse_transform(&a).is_ok());
        }
    }

    #[test]
    fn band_support() {
        let g = Grid::new(32).unwrap();
        let f = FieldGenerator::new(FieldKind::RandomBandLimited, 1).with_band(3).sample(g, 0).unwrap();
        for (i, c) in f.coeffs().iter().enumerate() {
            let r = g.radius(i);
            if c.norm() > 0.0 {
                assert!(r > 4.0 && r < 16.0);
            }
        }
    }

    #[test]
    fn packet_needs_band() {
        let g = Grid::new(16).unwrap();
        assert!(FieldGenerator::new(FieldKind::WavePacket, 1).sample(g, 0).is_err());
        assert!(FieldGenerator::new(FieldKind::SingleMode([8, 0, 0]), 1).sample(g, 0).is_err());
    }
}
