//! Exactness checks of the transforms and of the dyadic partition.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::report::CheckReport;
use super::par_samples;
use crate::error::Result;
use crate::littlewood_paley::{band_multiplier, max_resolvable_band};
use crate::random::{normal, sample_rng};
use crate::spectral::{forward_transform, inverse_transform_real, Grid, PhysicalField};

fn random_physical(grid: Grid, seed: u64, index: u64) -> PhysicalField {
    let mut rng = sample_rng(seed, index);
    let values = (0..grid.len()).map(|_| normal(&mut rng)).collect();
    PhysicalField::from_values(grid, values).expect("finite samples")
}

/// Round trip and Parseval on `samples` random fields at `grid`, and a
/// triple-loop DFT comparison at `n = 8`. Hard tolerance 1e-12.
pub fn check_transform(grid: Grid, seed: u64, samples: usize) -> Result<CheckReport> {
    let rows = par_samples(samples, 0, |i| {
        let f = random_physical(grid, seed, i);
        let spec = forward_transform(&f);
        let back = inverse_transform_real(&spec);
        let round = f
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let phys: f64 = grid.cell_volume() * f.values().iter().map(|v| v * v).sum::<f64>();
        Ok((round, (spec.energy() - phys).abs() / phys))
    })?;
    let small = Grid::new(8)?;
    let f = random_physical(small, seed, u64::MAX);
    let spec = forward_transform(&f);
    let mut dft = 0.0f64;
    for k in 0..small.len() {
        let xi = small.wavevector(k).map(|x| x as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, v) in f.values().iter().enumerate() {
            let p = small.point(x);
            acc += Complex64::from_polar(*v, -2.0 * PI * (xi[0] * p[0] + xi[1] * p[1] + xi[2] * p[2]));
        }
        dft = dft.max((acc * small.cell_volume() - spec.coeffs()[k]).norm());
    }
    let round = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let parseval = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut r = CheckReport::new("transform", seed);
    r.samples = rows.len();
    r.hard = true;
    r.threshold = 1e-12;
    r.max_ratio = round.max(parseval).max(dft);
    r.passed = r.max_ratio < 1e-12;
    r.meta("round_trip", round);
    r.meta("parseval_relative", parseval);
    r.meta("dft_oracle", dft);
    Ok(r)
}

/// `|sum_j psi(2^-j |xi|) - 1|` over lattice `xi` with `1 <= |xi| <= radius`,
/// summing every band that can touch the grid. Hard tolerance 1e-12.
pub fn check_partition(grid: Grid, radius: f64) -> Result<CheckReport> {
    let top = max_resolvable_band(grid) + 1;
    let reach = radius.floor() as i64;
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for a in -reach..=reach {
        for b in -reach..=reach {
            for c in -reach..=reach {
                let r2 = (a * a + b * b + c * c) as f64;
                if r2 < 1.0 || r2.sqrt() > radius {
                    continue;
                }
                let s: f64 = (-1..=top).map(|j| band_multiplier(j, [a, b, c])).sum();
                worst = worst.max((s - 1.0).abs());
                count += 1;
            }
        }
    }
    let mut r = CheckReport::new("partition", 0);
    r.samples = count;
    r.hard = true;
    r.threshold = 1e-12;
    r.max_ratio = worst;
    r.passed = worst < 1e-12;
    r.meta("radius", radius);
    Ok(r)
}
