//! Leray projection, dealiased nonlinearity, pressure recovery and the
//! integrating-factor RK4 step.

use std::cell::RefCell;

use num_complex::Complex64;

use super::state::VelocityState;
use super::workspace::TwoThirdsWork;
use crate::error::{Error, Result};
use crate::norms::gradient_energy;
use crate::spectral::{derivative_by_counts, Grid, ProductRule, ProductSpace, SpectralField};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dealias {
    TwoThirds,
    ThreeHalves,
}

impl Dealias {
    pub fn rule(self, grid: Grid) -> ProductRule {
        match self {
            Dealias::TwoThirds => ProductRule::TwoThirds,
            Dealias::ThreeHalves => ProductRule::three_halves(grid),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    IntegratingFactorRk4,
}

/// `(I - xi xi^T / |xi|^2) v` per wavevector. The zero mode and the unpaired
/// `-n/2` planes are cleared.
pub fn leray_project(v: &[SpectralField; 3]) -> [SpectralField; 3] {
    let grid = v[0].grid();
    let n = grid.n();
    let w: Vec<f64> = grid.axis_wavenumbers().iter().map(|&x| x as f64).collect();
    let nyq = -grid.nyquist();
    let skip: Vec<bool> = grid.axis_wavenumbers().iter().map(|&x| x == nyq).collect();
    let mut out = zero_triplet(grid);
    let [o0, o1, o2] = &mut out;
    let (o0, o1, o2) = (o0.coeffs_mut(), o1.coeffs_mut(), o2.coeffs_mut());
    let (c0, c1, c2) = (v[0].coeffs(), v[1].coeffs(), v[2].coeffs());
    for i0 in 0..n {
        for i1 in 0..n {
            let base = (i0 * n + i1) * n;
            for i2 in 0..n {
                if skip[i0] || skip[i1] || skip[i2] {
                    continue;
                }
                let k = [w[i0], w[i1], w[i2]];
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                if k2 == 0.0 {
                    continue;
                }
                let i = base + i2;
                let dot = (c0[i] * k[0] + c1[i] * k[1] + c2[i] * k[2]) / k2;
                o0[i] = c0[i] - dot * k[0];
                o1[i] = c1[i] - dot * k[1];
                o2[i] = c2[i] - dot * k[2];
            }
        }
    }
    out
}

fn zero_triplet(grid: Grid) -> [SpectralField; 3] {
    [
        SpectralField::zeros(grid),
        SpectralField::zeros(grid),
        SpectralField::zeros(grid),
    ]
}

fn unit_vector(a: usize) -> [u32; 3] {
    let mut c = [0u32; 3];
    c[a] = 1;
    c
}

/// Skew-symmetric `1/2 [(u.grad)u + div(u (x) u)]` for raw components.
pub(crate) fn nonlinear_components(u: &[SpectralField; 3], space: &ProductSpace) -> [SpectralField; 3] {
    let grid = u[0].grid();
    if u.iter().all(SpectralField::is_zero) {
        return zero_triplet(grid);
    }
    let grads: Vec<SpectralField> = (0..3)
        .flat_map(|a| (0..3).map(move |b| (a, b)))
        .map(|(a, b)| derivative_by_counts(&u[a], unit_vector(b)))
        .collect();
    let mut inputs: Vec<&SpectralField> = u.iter().collect();
    inputs.extend(grads.iter());
    let phys = space.to_physical(&inputs);
    let (vel, grad) = phys.split_at(3);
    let len = vel[0].len();

    let mut outputs: Vec<Vec<f64>> = Vec::with_capacity(9);
    for a in 0..3 {
        let mut conv = vec![0.0; len];
        for b in 0..3 {
            let g = &grad[3 * a + b];
            for ((o, ub), gb) in conv.iter_mut().zip(&vel[b]).zip(g) {
                *o += ub * gb;
            }
        }
        outputs.push(conv);
    }
    const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    for (a, b) in PAIRS {
        outputs.push(vel[a].iter().zip(&vel[b]).map(|(x, y)| x * y).collect());
    }
    let refs: Vec<&[f64]> = outputs.iter().map(Vec::as_slice).collect();
    let spec = space.to_spectral(&refs);
    // slot of the symmetric product (a, b) in `spec`
    const SLOT: [[usize; 3]; 3] = [[3, 4, 5], [4, 6, 7], [5, 7, 8]];

    // odd derivatives drop the unpaired -n/2 plane
    let n = grid.n();
    let k: Vec<f64> = (0..n)
        .map(|i| match grid.wavenumber(i) {
            w if w == -grid.nyquist() => 0.0,
            w => TWO_PI * w as f64,
        })
        .collect();
    let mut out = zero_triplet(grid);
    for (a, slot) in out.iter_mut().enumerate() {
        let conv = spec[a].coeffs();
        let t = SLOT[a].map(|s| spec[s].coeffs());
        let coeffs = slot.coeffs_mut();
        for i0 in 0..n {
            for i1 in 0..n {
                let base = (i0 * n + i1) * n;
                for i2 in 0..n {
                    let i = base + i2;
                    let div = t[0][i] * k[i0] + t[1][i] * k[i1] + t[2][i] * k[i2];
                    coeffs[i] = (conv[i] + Complex64::new(-div.im, div.re)) * 0.5;
                }
            }
        }
    }
    out
}

/// Dealiased skew-symmetric form of `(u . grad) u`.
pub fn nonlinear_term(u: &VelocityState, dealias: Dealias) -> [SpectralField; 3] {
    let space = ProductSpace::new(u.grid(), dealias.rule(u.grid()));
    nonlinear_components(u.components(), &space)
}

/// `p(xi) = -sum_ab xi_a xi_b / |xi|^2 (u_a u_b)(xi)` with `p(0) = 0`.
pub fn pressure_solve(u: &VelocityState, dealias: Dealias) -> SpectralField {
    let grid = u.grid();
    let space = ProductSpace::new(grid, dealias.rule(grid));
    let refs: Vec<&SpectralField> = u.components().iter().collect();
    let phys = space.to_physical(&refs);
    let mut prods: Vec<Vec<f64>> = Vec::with_capacity(6);
    let mut pairs = Vec::with_capacity(6);
    for a in 0..3 {
        for b in a..3 {
            prods.push(phys[a].iter().zip(&phys[b]).map(|(x, y)| x * y).collect());
            pairs.push((a, b));
        }
    }
    let refs: Vec<&[f64]> = prods.iter().map(Vec::as_slice).collect();
    let tensor = space.to_spectral(&refs);
    let mut p = SpectralField::zeros(grid);
    for i in 0..grid.len() {
        let xi = grid.wavevector(i);
        if xi == [0, 0, 0] {
            continue;
        }
        let k = xi.map(|x| x as f64);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &(a, b)) in tensor.iter().zip(&pairs) {
            let w = if a == b { 1.0 } else { 2.0 };
            acc += t.coeffs()[i] * (w * k[a] * k[b] / k2);
        }
        p.coeffs_mut()[i] = -acc;
    }
    p
}

/// Time-stepping parameters shared by every step of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
    pub dealias: Dealias,
    pub scheme: Scheme,
}

impl StepConfig {
    pub fn new(dt: f64, dealias: Dealias) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("time step must be positive, got {dt}"),
            });
        }
        Ok(Self {
            dt,
            dealias,
            scheme: Scheme::IntegratingFactorRk4,
        })
    }
}

/// Precomputed viscous factors for one `(grid, nu, dt)` combination.
pub(crate) struct Stepper {
    dt: f64,
    nu: f64,
    half: Vec<f64>,
    full: Vec<f64>,
    space: ProductSpace,
    work: Option<RefCell<TwoThirdsWork>>,
}

impl Stepper {
    pub(crate) fn new(grid: Grid, nu: f64, cfg: &StepConfig) -> Self {
        let four_pi2 = TWO_PI * TWO_PI;
        let half: Vec<f64> = (0..grid.len())
            .map(|i| {
                let xi = grid.wavevector(i);
                let k2 = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) as f64;
                (-four_pi2 * nu * k2 * cfg.dt * 0.5).exp()
            })
            .collect();
        let full = half.iter().map(|e| e * e).collect();
        Self {
            dt: cfg.dt,
            nu,
            half,
            full,
            space: ProductSpace::new(grid, cfg.dealias.rule(grid)),
            work: (cfg.dealias == Dealias::TwoThirds).then(|| RefCell::new(TwoThirdsWork::new(grid))),
        }
    }

    fn rhs(&self, u: &[SpectralField; 3]) -> [SpectralField; 3] {
        let n = match &self.work {
            Some(w) => w.borrow_mut().evaluate(u),
            None => nonlinear_components(u, &self.space),
        };
        let mut p = leray_project(&n);
        for c in &mut p {
            for z in c.coeffs_mut() {
                *z = -*z;
            }
        }
        p
    }

    fn dissipation(&self, u: &[SpectralField; 3]) -> f64 {
        2.0 * self.nu * u.iter().map(gradient_energy).sum::<f64>()
    }

    fn combine(
        &self,
        base: &[SpectralField; 3],
        f: impl Fn(usize, usize, Complex64) -> Complex64,
    ) -> [SpectralField; 3] {
        let mut out = base.clone();
        for (a, comp) in out.iter_mut().enumerate() {
            for (i, z) in comp.coeffs_mut().iter_mut().enumerate() {
                *z = f(a, i, *z);
            }
        }
        out
    }

    /// One step; returns the new components and the RK4-weighted viscous
    /// dissipation `2 nu int ||grad u||^2` over the step.
    pub(crate) fn advance(&self, u: &[SpectralField; 3]) -> ([SpectralField; 3], f64) {
        let dt = self.dt;
        let (e, e2) = (&self.half, &self.full);
        let ka = self.rhs(u);
        let u2 = self.combine(u, |a, i, z| e[i] * (z + ka[a].coeffs()[i] * (0.5 * dt)));
        let kb = self.rhs(&u2);
        let u3 = self.combine(u, |a, i, z| e[i] * z + kb[a].coeffs()[i] * (0.5 * dt));
        let kc = self.rhs(&u3);
        let u4 = self.combine(u, |a, i, z| e2[i] * z + e[i] * kc[a].coeffs()[i] * dt);
        let kd = self.rhs(&u4);
        let next = self.combine(u, |a, i, z| {
            e2[i] * z
                + (e2[i] * ka[a].coeffs()[i]
                    + (kb[a].coeffs()[i] + kc[a].coeffs()[i]) * (2.0 * e[i])
                    + kd[a].coeffs()[i])
                    * (dt / 6.0)
        });
        let diss = dt / 6.0
            * (self.dissipation(u) + 2.0 * self.dissipation(&u2) + 2.0 * self.dissipation(&u3) + self.dissipation(&u4));
        (leray_project(&next), diss)
    }
}

/// One integrating-factor RK4 step: the viscous factor `exp(-4 pi^2 nu |xi|^2 dt)`
/// is applied exactly, the Leray-projected nonlinearity by classical RK4.
pub fn step(state: &VelocityState, cfg: &StepConfig) -> Result<VelocityState> {
    let stepper = Stepper::new(state.grid(), state.nu(), cfg);
    let (next, _) = stepper.advance(state.components());
    let out = state.with_components(next, state.time() + cfg.dt);
    if !out.is_finite() {
        return Err(Error::BlowUp { time: out.time() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns::initial::{beltrami, taylor_green};
    use crate::spectral::{forward_transform, PhysicalField};
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    #[test]
    fn gradient_field_projects_to_zero() {
        let g = grid(16);
        let pot = forward_transform(&PhysicalField::from_fn(g, |x| {
            (2.0 * PI * (x[0] + 2.0 * x[1])).sin() + (2.0 * PI * 3.0 * x[2]).cos()
        }));
        let v = [
            derivative_by_counts(&pot, [1, 0, 0]),
            derivative_by_counts(&pot, [0, 1, 0]),
            derivative_by_counts(&pot, [0, 0, 1]),
        ];
        let p = leray_project(&v);
        assert!(p.iter().all(|c| c.max_abs() < 1e-13));
    }

    #[test]
    fn divergence_free_unchanged_and_idempotent() {
        let g = grid(16);
        let u = taylor_green(g, 1.0, 0.1).unwrap();
        let p = leray_project(u.components());
        for (a, b) in p.iter().zip(u.components()) {
            assert!(a.max_diff(b) < 1e-14);
        }
        let mut rng = crate::random::rng(3);
        let raw = [0, 1, 2].map(|_| {
            crate::random::random_hermitian(g, &mut rng, |xi| if xi.iter().all(|k| k.abs() < 5) { 1.0 } else { 0.0 })
        });
        let once = leray_project(&raw);
        let twice = leray_project(&once);
        for (a, b) in once.iter().zip(&twice) {
            assert!(a.max_diff(b) < 1e-14);
        }
        let s = VelocityState::new(once, 0.0, 0.1).unwrap();
        assert!(s.divergence_residual() < 1e-12);
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = grid(8);
        let u = VelocityState::zero(g, 0.1).unwrap();
        assert!(nonlinear_term(&u, Dealias::TwoThirds).iter().all(SpectralField::is_zero));
        assert!(pressure_solve(&u, Dealias::TwoThirds).is_zero());
        let cfg = StepConfig::new(0.01, Dealias::TwoThirds).unwrap();
        let next = step(&u, &cfg).unwrap();
        assert!(next.energy() == 0.0);
        assert!((next.time() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn beltrami_nonlinearity_is_gradient() {
        let g = grid(16);
        let u = beltrami(g, [1, 0, 0], 1.0, 0.01).unwrap();
        for rule in [Dealias::TwoThirds, Dealias::ThreeHalves] {
            let n = nonlinear_term(&u, rule);
            assert!(n.iter().map(SpectralField::max_abs).fold(0.0, f64::max) > 1e-3);
            let p = leray_project(&n);
            assert!(p.iter().all(|c| c.max_abs() < 1e-13), "{rule:?}");
        }
    }

    #[test]
    fn single_mode_nonlinearity_support() {
        // one cosine pair: the product only reaches 0 and +-2 xi
        let g = grid(16);
        let xi = [1i64, 2, 0];
        let f = SpectralField::cosine_mode(g, xi, 1.0).unwrap();
        let u = VelocityState::new([f.clone(), f, SpectralField::zeros(g)], 0.0, 0.1).unwrap();
        let n = nonlinear_term(&u, Dealias::TwoThirds);
        for c in &n {
            for (i, z) in c.coeffs().iter().enumerate() {
                let k = g.wavevector(i);
                let allowed = k == [0, 0, 0] || k == [2, 4, 0] || k == [-2, -4, 0];
                assert!(allowed || z.norm() < 1e-14, "{k:?}");
            }
        }
    }

    #[test]
    fn beltrami_pressure_closed_form() {
        let g = grid(16);
        let u = beltrami(g, [1, 0, 0], 0.8, 0.01).unwrap();
        let p = crate::spectral::inverse_transform(&pressure_solve(&u, Dealias::TwoThirds)).unwrap();
        let speed = u.speed();
        let mean_sq = speed.values().iter().map(|s| s * s).sum::<f64>() / g.len() as f64;
        for (pv, s) in p.values().iter().zip(speed.values()) {
            assert!((pv + 0.5 * (s * s - mean_sq)).abs() < 1e-12);
        }
    }

    #[test]
    fn pressure_balances_divergence() {
        // div[(u.grad)u + grad p] = 0 spectrally
        let g = grid(16);
        let u = taylor_green(g, 1.0, 0.05).unwrap();
        let n = nonlinear_term(&u, Dealias::TwoThirds);
        let p = pressure_solve(&u, Dealias::TwoThirds);
        for i in 0..g.len() {
            let xi = g.wavevector(i);
            let mut d = Complex64::new(0.0, 0.0);
            for a in 0..3 {
                let k = TWO_PI * xi[a] as f64;
                d += Complex64::new(0.0, k) * (n[a].coeffs()[i] + Complex64::new(0.0, k) * p.coeffs()[i]);
            }
            assert!(d.norm() < 1e-10, "{xi:?} {d}");
        }
    }
}
