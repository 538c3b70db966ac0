use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use super::fft::{fft3, Direction};
use super::grid::Grid;
use crate::error::{Error, Result};

/// Relative imaginary residue above which an inverse transform is rejected as
/// non-real.
pub const REALNESS_TOLERANCE: f64 = 1e-9;

/// Real scalar samples on the lattice points `x = m / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    values: Vec<f64>,
}

impl PhysicalField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every lattice point.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, values }
    }

    pub(crate) fn from_values_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Lattice average, i.e. the Riemann-sum integral over the unit box.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Fourier coefficients on the integer lattice `[-n/2, n/2)^3`, FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, coeffs })
    }

    pub(crate) fn from_coeffs_unchecked(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    /// Real plane wave `amplitude * cos(2 pi xi.x)`.
    pub fn cosine_mode(grid: Grid, xi: [i64; 3], amplitude: f64) -> Result<Self> {
        let mut f = Self::zeros(grid);
        let neg = [-xi[0], -xi[1], -xi[2]];
        let (Some(a), Some(b)) = (grid.index_of(xi), grid.index_of(neg)) else {
            return Err(Error::InvalidParameter {
                name: "xi",
                reason: format!("{xi:?} not representable with its conjugate on n={}", grid.n()),
            });
        };
        if a == b {
            f.coeffs[a] += Complex64::new(amplitude, 0.0);
        } else {
            f.coeffs[a] += Complex64::new(0.5 * amplitude, 0.0);
            f.coeffs[b] += Complex64::new(0.5 * amplitude, 0.0);
        }
        Ok(f)
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at wavevector `xi`; zero when `xi` is not on this grid.
    pub fn get(&self, xi: [i64; 3]) -> Complex64 {
        self.grid
            .index_of(xi)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn set(&mut self, xi: [i64; 3], value: Complex64) -> Result<()> {
        let i = self.grid.index_of(xi).ok_or(Error::InvalidParameter {
            name: "xi",
            reason: format!("{xi:?} outside grid n={}", self.grid.n()),
        })?;
        self.coeffs[i] = value;
        Ok(())
    }

    /// Multiplies every coefficient by a real multiplier of the wavevector.
    pub fn multiply(&self, multiplier: impl Fn([i64; 3]) -> f64) -> Self {
        let grid = self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * multiplier(grid.wavevector(i)))
            .collect();
        Self { grid, coeffs }
    }

    /// Multiplies by a function of `|xi|^2`, evaluated once per distinct
    /// lattice radius.
    pub fn multiply_radial(&self, profile: impl Fn(i64) -> f64) -> Self {
        let grid = self.grid;
        let n = grid.n();
        let sq: Vec<i64> = grid.axis_wavenumbers().iter().map(|w| w * w).collect();
        let h = grid.nyquist();
        let table: Vec<f64> = (0..=3 * h * h).map(&profile).collect();
        let mut coeffs = self.coeffs.clone();
        for (i0, slab) in coeffs.chunks_exact_mut(n * n).enumerate() {
            for (i1, row) in slab.chunks_exact_mut(n).enumerate() {
                let r01 = sq[i0] + sq[i1];
                for (c, s2) in row.iter_mut().zip(&sq) {
                    *c *= table[(r01 + s2) as usize];
                }
            }
        }
        Self { grid, coeffs }
    }

    /// In-place variant of [`SpectralField::multiply`].
    pub fn multiply_in_place(&mut self, multiplier: impl Fn([i64; 3]) -> f64) {
        let grid = self.grid;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c *= multiplier(grid.wavevector(i));
        }
    }

    /// `sum |c|^2`, equal to the squared L2 norm over the unit box.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest `|c(-xi) - conj(c(xi))|` over the lattice.
    pub fn hermitian_residue(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[self.grid.conjugate_index(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Max coefficientwise distance to another field on the same grid.
    pub fn max_diff(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.grid, other.grid);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Zeroes coefficients with any component on the unpaired `-n/2` plane.
    pub fn clear_nyquist(&mut self) {
        let grid = self.grid;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if grid.is_nyquist(grid.wavevector(i)) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

/// Cell-volume weighted forward transform: a constant `c` maps to `coeff(0) = c`.
pub fn forward_transform(f: &PhysicalField) -> SpectralField {
    let grid = f.grid;
    let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft3(&mut data, grid.n(), Direction::Forward);
    let cv = grid.cell_volume();
    for c in &mut data {
        *c *= cv;
    }
    SpectralField::from_coeffs_unchecked(grid, data)
}

/// Forward transform of two real fields with a single complex FFT.
pub fn forward_transform_pair(f: &PhysicalField, g: &PhysicalField) -> (SpectralField, SpectralField) {
    let grid = f.grid;
    assert_eq!(grid, g.grid, "grid mismatch");
    let mut z: Vec<Complex64> = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect();
    fft3(&mut z, grid.n(), Direction::Forward);
    let half_cv = 0.5 * grid.cell_volume();
    let n = grid.n();
    let mut fc = Vec::with_capacity(z.len());
    let mut gc = Vec::with_capacity(z.len());
    let partner: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
    for i0 in 0..n {
        for i1 in 0..n {
            let row = &z[(i0 * n + i1) * n..][..n];
            let crow = &z[(partner[i0] * n + partner[i1]) * n..][..n];
            for (zi, &c2) in row.iter().zip(&partner) {
                let zc = crow[c2].conj();
                fc.push((zi + zc) * half_cv);
                // (zi - zc) / (2i)
                let d = (zi - zc) * half_cv;
                gc.push(Complex64::new(d.im, -d.re));
            }
        }
    }
    (
        SpectralField::from_coeffs_unchecked(grid, fc),
        SpectralField::from_coeffs_unchecked(grid, gc),
    )
}

/// Complex-valued synthesis `sum_xi F(xi) e^{2 pi i x.xi}` with no realness check.
pub fn inverse_transform_complex(f: &SpectralField) -> Vec<Complex64> {
    let mut data = f.coeffs.clone();
    fft3(&mut data, f.grid.n(), Direction::Inverse);
    data
}

fn realness_residue(data: &[Complex64]) -> f64 {
    let (re_max, im_max) = data
        .iter()
        .fold((0.0f64, 0.0f64), |(r, i), c| (r.max(c.re.abs()), i.max(c.im.abs())));
    if im_max == 0.0 {
        0.0
    } else {
        im_max / re_max.max(f64::MIN_POSITIVE)
    }
}

/// Synthesis of a real field; non-Hermitian input is rejected.
pub fn inverse_transform(f: &SpectralField) -> Result<PhysicalField> {
    let data = inverse_transform_complex(f);
    let residue = realness_residue(&data);
    if residue > REALNESS_TOLERANCE {
        return Err(Error::NonHermitian {
            residue,
            tolerance: REALNESS_TOLERANCE,
        });
    }
    Ok(PhysicalField::from_values_unchecked(
        f.grid,
        data.into_iter().map(|c| c.re).collect(),
    ))
}

/// Synthesis that keeps the real part without checking realness.
///
/// For internal pipelines whose inputs are Hermitian by construction.
pub fn inverse_transform_real(f: &SpectralField) -> PhysicalField {
    let data = inverse_transform_complex(f);
    PhysicalField::from_values_unchecked(f.grid, data.into_iter().map(|c| c.re).collect())
}

/// Synthesizes two Hermitian fields with one complex FFT.
pub fn inverse_transform_pair(f: &SpectralField, g: &SpectralField) -> (PhysicalField, PhysicalField) {
    let grid = f.grid;
    assert_eq!(grid, g.grid, "grid mismatch");
    let mut z: Vec<Complex64> = f
        .coeffs
        .iter()
        .zip(&g.coeffs)
        .map(|(a, b)| a + Complex64::new(-b.im, b.re))
        .collect();
    fft3(&mut z, grid.n(), Direction::Inverse);
    let re = z.iter().map(|c| c.re).collect();
    let im = z.iter().map(|c| c.im).collect();
    (
        PhysicalField::from_values_unchecked(grid, re),
        PhysicalField::from_values_unchecked(grid, im),
    )
}

/// Inverse-transforms a batch of Hermitian fields, two per FFT.
pub fn inverse_transform_many(fields: &[&SpectralField]) -> Vec<PhysicalField> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        match pair {
            [a, b] => {
                let (fa, fb) = inverse_transform_pair(a, b);
                out.push(fa);
                out.push(fb);
            }
            [a] => out.push(inverse_transform_real(a)),
            _ => unreachable!(),
        }
    }
    out
}

/// Forward-transforms a batch of real fields, two per FFT.
pub fn forward_transform_many(fields: &[&PhysicalField]) -> Vec<SpectralField> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        match pair {
            [a, b] => {
                let (fa, fb) = forward_transform_pair(a, b);
                out.push(fa);
                out.push(fb);
            }
            [a] => out.push(forward_transform(a)),
            _ => unreachable!(),
        }
    }
    out
}

/// Applies `prod_a (2 pi i xi_a)` over the axes in `axes` (each 0, 1 or 2).
///
/// Coefficients on the `-n/2` plane of any axis differentiated an odd number
/// of times are zeroed so the result stays Hermitian.
pub fn spectral_derivative(f: &SpectralField, axes: &[usize]) -> SpectralField {
    let mut counts = [0u32; 3];
    for &a in axes {
        assert!(a < 3, "axis index {a} out of range");
        counts[a] += 1;
    }
    derivative_by_counts(f, counts)
}

/// Derivative with per-axis multiplicities, `d1^c0 d2^c1 d3^c2`.
pub fn derivative_by_counts(f: &SpectralField, counts: [u32; 3]) -> SpectralField {
    let order: u32 = counts.iter().sum();
    if order == 0 {
        return f.clone();
    }
    let grid = f.grid;
    let n = grid.n();
    let two_pi = 2.0 * std::f64::consts::PI;
    let nyq = -grid.nyquist();
    // i^order
    let unit = match order % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let factors: Vec<Vec<f64>> = counts
        .iter()
        .map(|&c| {
            grid.axis_wavenumbers()
                .into_iter()
                .map(|w| {
                    if c % 2 == 1 && w == nyq {
                        0.0
                    } else {
                        (two_pi * w as f64).powi(c as i32)
                    }
                })
                .collect()
        })
        .collect();
    let mut coeffs = Vec::with_capacity(f.coeffs.len());
    for i0 in 0..n {
        for i1 in 0..n {
            let m01 = factors[0][i0] * factors[1][i1];
            let base = (i0 * n + i1) * n;
            for i2 in 0..n {
                coeffs.push(f.coeffs[base + i2] * unit * (m01 * factors[2][i2]));
            }
        }
    }
    SpectralField::from_coeffs_unchecked(grid, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    #[test]
    fn constant_maps_to_zero_mode() {
        let g = grid(8);
        let f = PhysicalField::from_fn(g, |_| 2.5);
        let s = forward_transform(&f);
        assert!((s.get([0, 0, 0]) - Complex64::new(2.5, 0.0)).norm() < 1e-14);
        let rest = s.coeffs().iter().skip(1).fold(0.0, |m: f64, c| m.max(c.norm()));
        assert!(rest < 1e-14);
    }

    #[test]
    fn cosine_maps_to_pair() {
        let g = grid(16);
        let f = PhysicalField::from_fn(g, |x| (2.0 * PI * x[0]).cos());
        let s = forward_transform(&f);
        assert!((s.get([1, 0, 0]).re - 0.5).abs() < 1e-14);
        assert!((s.get([-1, 0, 0]).re - 0.5).abs() < 1e-14);
        let mut t = s.clone();
        t.set([1, 0, 0], Complex64::new(0.0, 0.0)).unwrap();
        t.set([-1, 0, 0], Complex64::new(0.0, 0.0)).unwrap();
        assert!(t.max_abs() < 1e-14);
    }

    #[test]
    fn unit_zero_mode_is_constant_one() {
        let g = grid(8);
        let mut s = SpectralField::zeros(g);
        s.set([0, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
        let f = inverse_transform(&s).unwrap();
        assert!(f.values().iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn non_hermitian_rejected() {
        let g = grid(8);
        let mut s = SpectralField::zeros(g);
        s.set([1, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(inverse_transform(&s), Err(Error::NonHermitian { .. })));
        assert!(s.hermitian_residue() > 0.5);
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid(16);
        let f = forward_transform(&PhysicalField::from_fn(g, |x| (2.0 * PI * x[0]).sin()));
        let df = inverse_transform(&spectral_derivative(&f, &[0])).unwrap();
        let expected = PhysicalField::from_fn(g, |x| 2.0 * PI * (2.0 * PI * x[0]).cos());
        for (a, b) in df.values().iter().zip(expected.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(spectral_derivative(&f, &[]), f);
    }

    #[test]
    fn odd_derivative_clears_nyquist() {
        let g = grid(8);
        let mut s = SpectralField::zeros(g);
        s.set([-4, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
        assert!(spectral_derivative(&s, &[0]).is_zero());
        let d2 = spectral_derivative(&s, &[0, 0]);
        assert!((d2.get([-4, 0, 0]).re + (2.0 * PI * 4.0).powi(2)).abs() < 1e-9);
        assert!(spectral_derivative(&s, &[1]).is_zero());
    }

    #[test]
    fn pair_transforms_match_single() {
        let g = grid(8);
        let a = PhysicalField::from_fn(g, |x| (2.0 * PI * (x[0] + 2.0 * x[1])).sin() + x[2]);
        let b = PhysicalField::from_fn(g, |x| (2.0 * PI * x[2]).cos() * x[0]);
        let (fa, fb) = forward_transform_pair(&a, &b);
        assert!(fa.max_diff(&forward_transform(&a)) < 1e-15);
        assert!(fb.max_diff(&forward_transform(&b)) < 1e-15);
        let (ra, rb) = inverse_transform_pair(&fa, &fb);
        for (x, y) in ra.values().iter().zip(a.values()) {
            assert!((x - y).abs() < 1e-13);
        }
        for (x, y) in rb.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-13);
        }
    }
}
