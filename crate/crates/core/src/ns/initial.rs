//! Initial velocity fields.

use std::f64::consts::PI;
use std::path::PathBuf;

use super::solver::leray_project;
use super::state::VelocityState;
use crate::error::{Error, Result};
use crate::random::{random_hermitian, rng};
use crate::spectral::{forward_transform, two_thirds_cutoff, Grid, PhysicalField, SpectralField};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    TaylorGreen { amplitude: f64 },
    Beltrami { xi: [i64; 3], amplitude: f64 },
    RandomDivFree { seed: u64, slope: f64, amplitude: f64 },
    Checkpoint(PathBuf),
}

impl InitialCondition {
    pub fn build(&self, grid: Grid, nu: f64) -> Result<VelocityState> {
        match self {
            InitialCondition::TaylorGreen { amplitude } => taylor_green(grid, *amplitude, nu),
            InitialCondition::Beltrami { xi, amplitude } => beltrami(grid, *xi, *amplitude, nu),
            InitialCondition::RandomDivFree { seed, slope, amplitude } => {
                random_divfree(grid, *seed, *slope, *amplitude, nu)
            }
            InitialCondition::Checkpoint(path) => {
                let state = super::checkpoint::read_checkpoint(path)?;
                grid.ensure_same(&state.grid())?;
                Ok(state)
            }
        }
    }
}

fn check_amplitude(amplitude: f64) -> Result<()> {
    if !amplitude.is_finite() {
        return Err(Error::InvalidParameter {
            name: "amplitude",
            reason: format!("{amplitude}"),
        });
    }
    Ok(())
}

/// `A (sin x cos y cos z, -cos x sin y cos z, 0)` with `x -> 2 pi x`.
/// Its L2 norm is `A / 2`.
pub fn taylor_green(grid: Grid, amplitude: f64, nu: f64) -> Result<VelocityState> {
    check_amplitude(amplitude)?;
    let tp = 2.0 * PI;
    let u = PhysicalField::from_fn(grid, |x| {
        amplitude * (tp * x[0]).sin() * (tp * x[1]).cos() * (tp * x[2]).cos()
    });
    let v = PhysicalField::from_fn(grid, |x| {
        -amplitude * (tp * x[0]).cos() * (tp * x[1]).sin() * (tp * x[2]).cos()
    });
    let mut c = [forward_transform(&u), forward_transform(&v), SpectralField::zeros(grid)];
    for f in &mut c {
        f.clear_nyquist();
        f.set([0, 0, 0], Default::default())?;
    }
    VelocityState::new(c, 0.0, nu)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalized(a: [f64; 3]) -> [f64; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    a.map(|x| x / n)
}

/// Cyclic permutations of `xi`, with `-xi` duplicates removed.
fn cyclic_orbit(xi: [i64; 3]) -> Vec<[i64; 3]> {
    let mut out: Vec<[i64; 3]> = Vec::new();
    for s in 0..3 {
        let p = [xi[s % 3], xi[(s + 1) % 3], xi[(s + 2) % 3]];
        let neg = p.map(|k| -k);
        if !out.contains(&p) && !out.contains(&neg) {
            out.push(p);
        }
    }
    out
}

/// Polarization `(a, b)` with `a . xi = 0`, `b = xi/|xi| x a`, both unit.
fn polarization(xi: [i64; 3]) -> ([f64; 3], [f64; 3]) {
    let k = xi.map(|x| x as f64);
    let m = (0..3)
        .min_by(|&i, &j| k[i].abs().partial_cmp(&k[j].abs()).unwrap())
        .unwrap();
    let mut e = [0.0; 3];
    e[m] = 1.0;
    let a = normalized(cross(k, e));
    let b = cross(normalized(k), a);
    (a, b)
}

/// Physical components of the Beltrami field at `t = 0`: a sum of
/// `a cos(2 pi xi.x) - b sin(2 pi xi.x)` over the cyclic orbit of `xi`,
/// each term an eigenfield of the curl with eigenvalue `2 pi |xi|`.
pub fn beltrami_physical(grid: Grid, xi: [i64; 3], amplitude: f64) -> Result<[PhysicalField; 3]> {
    check_amplitude(amplitude)?;
    if xi == [0, 0, 0] || xi.iter().any(|k| k.abs() >= grid.nyquist()) {
        return Err(Error::InvalidParameter {
            name: "xi",
            reason: format!("Beltrami wavevector {xi:?} must be nonzero and below n/2={}", grid.nyquist()),
        });
    }
    let modes: Vec<([f64; 3], [f64; 3], [f64; 3])> = cyclic_orbit(xi)
        .into_iter()
        .map(|p| {
            let (a, b) = polarization(p);
            (p.map(|x| x as f64), a, b)
        })
        .collect();
    let comp = |c: usize| {
        PhysicalField::from_fn(grid, |x| {
            modes
                .iter()
                .map(|(k, a, b)| {
                    let th = 2.0 * PI * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
                    amplitude * (a[c] * th.cos() - b[c] * th.sin())
                })
                .sum()
        })
    };
    Ok([comp(0), comp(1), comp(2)])
}

pub fn beltrami(grid: Grid, xi: [i64; 3], amplitude: f64, nu: f64) -> Result<VelocityState> {
    let phys = beltrami_physical(grid, xi, amplitude)?;
    let mut c = phys.map(|p| forward_transform(&p));
    for f in &mut c {
        f.set([0, 0, 0], Default::default())?;
    }
    VelocityState::new(c, 0.0, nu)
}

/// Closed-form Beltrami solution `exp(-4 pi^2 nu |xi|^2 t) u0`.
pub fn beltrami_exact(grid: Grid, xi: [i64; 3], amplitude: f64, nu: f64, t: f64) -> Result<VelocityState> {
    let k2 = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) as f64;
    let decay = (-4.0 * PI * PI * nu * k2 * t).exp();
    let u0 = beltrami(grid, xi, amplitude * decay, nu)?;
    Ok(u0.with_components(u0.components().clone(), t))
}

/// Gaussian divergence-free field with spectrum weight `|xi|^-slope` inside
/// the two-thirds cube, zero mean and `||u||_2 = amplitude`.
pub fn random_divfree(grid: Grid, seed: u64, slope: f64, amplitude: f64, nu: f64) -> Result<VelocityState> {
    check_amplitude(amplitude)?;
    if !slope.is_finite() {
        return Err(Error::InvalidParameter {
            name: "slope",
            reason: format!("{slope}"),
        });
    }
    let cut = two_thirds_cutoff(grid);
    let weight = |xi: [i64; 3]| {
        if xi == [0, 0, 0] || xi.iter().any(|k| k.abs() > cut) {
            0.0
        } else {
            let r = ((xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) as f64).sqrt();
            r.powf(-slope)
        }
    };
    let mut r = rng(seed);
    let raw = [0, 1, 2].map(|_| random_hermitian(grid, &mut r, weight));
    let projected = leray_project(&raw);
    let state = VelocityState::new(projected, 0.0, nu)?;
    let norm = state.l2_norm();
    if norm == 0.0 {
        return Ok(state);
    }
    let s = amplitude / norm;
    let scaled = state.components().clone().map(|c| c.scale(s));
    VelocityState::new(scaled, 0.0, nu)
}
