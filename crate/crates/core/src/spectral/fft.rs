//! Separable 3D complex FFT on a cubic lattice, built from 1D rustfft passes.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `sum_x f(x) e^{-2 pi i x.xi}`, unnormalized.
    Forward,
    /// `sum_xi F(xi) e^{+2 pi i x.xi}`, unnormalized.
    Inverse,
}

/// Reusable plans and scratch for repeated `n^3` transforms.
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    buf: Vec<Complex64>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); len],
            buf: vec![Complex64::new(0.0, 0.0); n * n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unnormalized in-place 3D DFT of an `n x n x n` row-major cube.
    pub fn process(&mut self, data: &mut [Complex64], direction: Direction) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "fft3 buffer length");
        let fft = match direction {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        let scratch = &mut self.scratch;
        let buf = &mut self.buf;
        // Each round transforms the contiguous last axis, then rotates the
        // axes (i0, i1, i2) -> (i2, i0, i1). Three rounds restore the layout.
        fft.process_with_scratch(data, scratch);
        transpose::transpose(data, buf, n, n * n);
        fft.process_with_scratch(buf, scratch);
        transpose::transpose(buf, data, n, n * n);
        fft.process_with_scratch(data, scratch);
        transpose::transpose(data, buf, n, n * n);
        data.copy_from_slice(buf);
    }
}

/// Unnormalized in-place 3D DFT of an `n x n x n` row-major cube.
///
/// `n` need not be a power of two; the padded three-halves product grid
/// goes through here as well.
pub fn fft3(data: &mut [Complex64], n: usize, direction: Direction) {
    // plans and scratch are reused per thread; the output does not depend on it
    thread_local! {
        static PLANS: RefCell<Vec<Fft3>> = const { RefCell::new(Vec::new()) };
    }
    PLANS.with(|cell| {
        let mut plans = cell.borrow_mut();
        let pos = match plans.iter().position(|p| p.n == n) {
            Some(p) => p,
            None => {
                plans.push(Fft3::new(n));
                plans.len() - 1
            }
        };
        plans[pos].process(data, direction);
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_then_inverse_scales_by_volume() {
        let n = 8;
        let orig: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        fft3(&mut data, n, Direction::Forward);
        fft3(&mut data, n, Direction::Inverse);
        let scale = (n * n * n) as f64;
        for (a, b) in data.iter().zip(orig.iter()) {
            assert!((a / scale - b).norm() < 1e-13);
        }
    }

    #[test]
    fn matches_direct_dft() {
        let n = 6;
        let orig: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.7).cos(), (i as f64 * 1.3).sin()))
            .collect();
        let mut data = orig.clone();
        fft3(&mut data, n, Direction::Forward);
        let tp = 2.0 * std::f64::consts::PI / n as f64;
        for k in 0..n * n * n {
            let kk = [k / (n * n), (k / n) % n, k % n];
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..n * n * n {
                let xx = [x / (n * n), (x / n) % n, x % n];
                let ph = -tp * (kk[0] * xx[0] + kk[1] * xx[1] + kk[2] * xx[2]) as f64;
                acc += orig[x] * Complex64::from_polar(1.0, ph);
            }
            assert!((acc - data[k]).norm() < 1e-11);
        }
    }

    #[test]
    fn non_power_of_two_length() {
        let n = 12;
        let mut data = vec![Complex64::new(1.0, 0.0); n * n * n];
        fft3(&mut data, n, Direction::Forward);
        assert!((data[0].re - (n * n * n) as f64).abs() < 1e-9);
        assert!(data[1..].iter().all(|c| c.norm() < 1e-9));
    }
}
