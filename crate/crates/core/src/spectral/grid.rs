use crate::error::{Error, Result};

/// Uniform lattice on the unit periodic box `[0, 1)^3`.
///
/// Storage is row-major with the last axis fastest. Spectral coefficients use
/// the same index layout in FFT order, so index `i` along an axis carries the
/// signed wavenumber `i` for `i < n/2` and `i - n` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of lattice points, `n^3`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn box_length(&self) -> f64 {
        1.0
    }

    #[inline]
    pub fn cell_volume(&self) -> f64 {
        let h = 1.0 / self.n as f64;
        h * h * h
    }

    /// Largest resolvable wavenumber magnitude per axis.
    #[inline]
    pub fn nyquist(&self) -> i64 {
        (self.n / 2) as i64
    }

    /// Signed wavenumber for an FFT-order index along one axis.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    pub fn index(&self, i0: usize, i1: usize, i2: usize) -> usize {
        (i0 * self.n + i1) * self.n + i2
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Integer wavevector attached to a flat coefficient index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let [a, b, c] = self.unravel(idx);
        [self.wavenumber(a), self.wavenumber(b), self.wavenumber(c)]
    }

    /// Signed wavenumbers of one axis in FFT order.
    pub fn axis_wavenumbers(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    /// Flat index of a wavevector with components in `[-n/2, n/2)`.
    pub fn index_of(&self, xi: [i64; 3]) -> Option<usize> {
        let half = self.nyquist();
        let mut out = [0usize; 3];
        for (slot, &k) in out.iter_mut().zip(xi.iter()) {
            if k < -half || k >= half {
                return None;
            }
            *slot = k.rem_euclid(self.n as i64) as usize;
        }
        Some(self.index(out[0], out[1], out[2]))
    }

    /// Flat index of `-xi` under the periodic (DFT) pairing.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let [a, b, c] = self.unravel(idx);
        self.index((n - a) % n, (n - b) % n, (n - c) % n)
    }

    /// Physical coordinates `m / n` of a lattice point.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.unravel(idx);
        let h = 1.0 / self.n as f64;
        [a as f64 * h, b as f64 * h, c as f64 * h]
    }

    /// True when some component sits on the unpaired `-n/2` plane.
    #[inline]
    pub fn is_nyquist(&self, xi: [i64; 3]) -> bool {
        xi.iter().any(|&k| k == -self.nyquist())
    }

    #[inline]
    pub fn radius(&self, idx: usize) -> f64 {
        let [a, b, c] = self.wavevector(idx);
        ((a * a + b * b + c * c) as f64).sqrt()
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch(self.n, other.n));
        }
        Ok(())
    }
}
