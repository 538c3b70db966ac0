//! Buffer-reusing evaluation of the two-thirds nonlinear term used by the
//! time stepper. Derivative multipliers and the mask are applied while the
//! FFT inputs are packed, so no intermediate spectral fields are built.

use num_complex::Complex64;

use crate::spectral::{two_thirds_cutoff, Direction, Fft3, Grid, SpectralField};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Spectral input of one synthesis: component `comp`, optionally differentiated
/// along `axis`.
#[derive(Clone, Copy)]
struct Input {
    comp: usize,
    axis: Option<usize>,
}

/// Row multiplier applied while packing one FFT input.
#[derive(Clone, Copy)]
enum Mul<'a> {
    One,
    /// `i * s`, constant along the row
    Scalar(f64),
    /// `i * k[i2]`
    Axis(&'a [f64]),
}

/// `dst = m * src` or, for the imaginary slot, `dst += i * m * src`, zero
/// where the last-axis mask drops the mode.
#[inline]
fn load(dst: &mut [Complex64], src: &[Complex64], keep: &[bool], m: Mul<'_>, imaginary: bool) {
    let rot = |z: Complex64| Complex64::new(-z.im, z.re);
    let put = |d: &mut Complex64, v: Complex64, kept: bool| {
        let v = if kept { v } else { Complex64::new(0.0, 0.0) };
        if imaginary {
            *d += rot(v);
        } else {
            *d = v;
        }
    };
    match m {
        Mul::One => {
            for ((d, &c), &kp) in dst.iter_mut().zip(src).zip(keep) {
                put(d, c, kp);
            }
        }
        Mul::Scalar(s) => {
            for ((d, &c), &kp) in dst.iter_mut().zip(src).zip(keep) {
                put(d, rot(c) * s, kp);
            }
        }
        Mul::Axis(k) => {
            for (((d, &c), &kp), &kk) in dst.iter_mut().zip(src).zip(keep).zip(k) {
                put(d, rot(c) * kk, kp);
            }
        }
    }
}

const fn inputs() -> [Input; 12] {
    let mut out = [Input { comp: 0, axis: None }; 12];
    let mut a = 0;
    while a < 3 {
        out[a] = Input { comp: a, axis: None };
        let mut b = 0;
        while b < 3 {
            out[3 + 3 * a + b] = Input { comp: a, axis: Some(b) };
            b += 1;
        }
        a += 1;
    }
    out
}

const INPUTS: [Input; 12] = inputs();
const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

pub(crate) struct TwoThirdsWork {
    n: usize,
    keep: Vec<bool>,
    /// `2 pi w` per axis index, zero on the `-n/2` plane.
    k: Vec<f64>,
    partner: Vec<usize>,
    fft: Fft3,
    z: Vec<Complex64>,
    phys: Vec<Vec<f64>>,
    prod: Vec<Vec<f64>>,
    spec: Vec<Vec<Complex64>>,
}

impl TwoThirdsWork {
    pub(crate) fn new(grid: Grid) -> Self {
        let n = grid.n();
        let cut = two_thirds_cutoff(grid);
        let w = grid.axis_wavenumbers();
        let len = grid.len();
        Self {
            n,
            keep: w.iter().map(|x| x.abs() <= cut).collect(),
            k: w
                .iter()
                .map(|&x| if x == -grid.nyquist() { 0.0 } else { TWO_PI * x as f64 })
                .collect(),
            partner: (0..n).map(|i| (n - i) % n).collect(),
            fft: Fft3::new(n),
            z: vec![Complex64::new(0.0, 0.0); len],
            phys: vec![vec![0.0; len]; 12],
            prod: vec![vec![0.0; len]; 9],
            spec: vec![vec![Complex64::new(0.0, 0.0); len]; 9],
        }
    }

    fn synthesize(&mut self, u: &[SpectralField; 3], first: usize) {
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        let (keep, k) = (&self.keep, &self.k);
        for i0 in 0..n {
            for i1 in 0..n {
                let base = (i0 * n + i1) * n;
                let row = &mut self.z[base..base + n];
                if !(keep[i0] && keep[i1]) {
                    row.fill(zero);
                    continue;
                }
                for (slot, imaginary) in [(first, false), (first + 1, true)] {
                    let input = INPUTS[slot];
                    let m = match input.axis {
                        None => Mul::One,
                        Some(0) => Mul::Scalar(k[i0]),
                        Some(1) => Mul::Scalar(k[i1]),
                        Some(_) => Mul::Axis(k),
                    };
                    let src = &u[input.comp].coeffs()[base..base + n];
                    load(row, src, keep, m, imaginary);
                }
            }
        }
        self.fft.process(&mut self.z, Direction::Inverse);
        let (lo, hi) = self.phys.split_at_mut(first + 1);
        let (pa, pb) = (&mut lo[first], &mut hi[0]);
        for ((z, a), b) in self.z.iter().zip(pa.iter_mut()).zip(pb.iter_mut()) {
            *a = z.re;
            *b = z.im;
        }
    }

    /// Forward transform of products `first` and `first + 1` into `spec`,
    /// filled on kept modes only.
    fn analyze(&mut self, first: usize, cell_volume: f64) {
        let n = self.n;
        let len = n * n * n;
        let has_second = first + 1 < self.prod.len();
        for i in 0..len {
            let q = if has_second { self.prod[first + 1][i] } else { 0.0 };
            self.z[i] = Complex64::new(self.prod[first][i], q);
        }
        self.fft.process(&mut self.z, Direction::Forward);
        let half_cv = 0.5 * cell_volume;
        let (lo, hi) = self.spec.split_at_mut(first + 1);
        let fa = &mut lo[first];
        let mut fb = hi.first_mut();
        let (keep, partner, z) = (&self.keep, &self.partner, &self.z);
        for i0 in (0..n).filter(|&i| keep[i]) {
            for i1 in (0..n).filter(|&i| keep[i]) {
                let base = (i0 * n + i1) * n;
                let crow = &z[(partner[i0] * n + partner[i1]) * n..][..n];
                let row = &z[base..base + n];
                for i2 in (0..n).filter(|&i| keep[i]) {
                    let zi = row[i2];
                    let zc = crow[partner[i2]].conj();
                    fa[base + i2] = (zi + zc) * half_cv;
                    if let Some(fb) = fb.as_deref_mut() {
                        let d = (zi - zc) * half_cv;
                        fb[base + i2] = Complex64::new(d.im, -d.re);
                    }
                }
            }
        }
    }

    /// ½[(u.grad)u + div(u (x) u)] with two-thirds masking of inputs and outputs.
    pub(crate) fn evaluate(&mut self, u: &[SpectralField; 3]) -> [SpectralField; 3] {
        let grid = u[0].grid();
        let n = self.n;
        let len = grid.len();
        let mut out: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); len]);
        if u.iter().all(SpectralField::is_zero) {
            return out.map(|c| SpectralField::from_coeffs_unchecked(grid, c));
        }
        for first in (0..12).step_by(2) {
            self.synthesize(u, first);
        }

        let (vel, grad) = self.phys.split_at(3);
        for a in 0..3 {
            let dst = &mut self.prod[a];
            let (g0, g1, g2) = (&grad[3 * a], &grad[3 * a + 1], &grad[3 * a + 2]);
            for i in 0..len {
                dst[i] = vel[0][i] * g0[i] + vel[1][i] * g1[i] + vel[2][i] * g2[i];
            }
        }
        for (s, &(a, b)) in PAIRS.iter().enumerate() {
            let dst = &mut self.prod[3 + s];
            for i in 0..len {
                dst[i] = vel[a][i] * vel[b][i];
            }
        }

        for first in (0..9).step_by(2) {
            self.analyze(first, grid.cell_volume());
        }
        // slot of the symmetric product (a, b) in `spec`
        const SLOT: [[usize; 3]; 3] = [[3, 4, 5], [4, 6, 7], [5, 7, 8]];
        let (keep, k) = (&self.keep, &self.k);
        for (a, o) in out.iter_mut().enumerate() {
            let conv = &self.spec[a];
            let t = SLOT[a].map(|s| &self.spec[s]);
            for i0 in (0..n).filter(|&i| keep[i]) {
                for i1 in (0..n).filter(|&i| keep[i]) {
                    let base = (i0 * n + i1) * n;
                    for i2 in (0..n).filter(|&i| keep[i]) {
                        let i = base + i2;
                        let div = t[0][i] * k[i0] + t[1][i] * k[i1] + t[2][i] * k[i2];
                        o[i] = (conv[i] + Complex64::new(-div.im, div.re)) * 0.5;
                    }
                }
            }
        }
        out.map(|c| SpectralField::from_coeffs_unchecked(grid, c))
    }
}
