//! Pointwise products of spectral fields without aliasing contamination.

use num_complex::Complex64;

use super::fft::{fft3, Direction};
use super::field::{forward_transform_many, inverse_transform_many, PhysicalField, SpectralField};
use super::grid::Grid;

/// How products are formed in physical space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductRule {
    /// Keep `|xi_i| <= floor((n-1)/3)` on inputs and outputs; products are
    /// evaluated on the native grid.
    TwoThirds,
    /// Zero-pad to an `m^3` grid, multiply there and truncate back.
    Padded(usize),
}

impl ProductRule {
    pub fn three_halves(grid: Grid) -> Self {
        ProductRule::Padded(3 * grid.n() / 2)
    }

    pub fn doubled(grid: Grid) -> Self {
        ProductRule::Padded(2 * grid.n())
    }
}

/// Largest retained per-axis wavenumber under the two-thirds rule.
pub fn two_thirds_cutoff(grid: Grid) -> i64 {
    (grid.n() as i64 - 1) / 3
}

/// Zeroes every coefficient outside the two-thirds cube.
pub fn apply_two_thirds(f: &mut SpectralField) {
    let grid = f.grid();
    let n = grid.n();
    let k = two_thirds_cutoff(grid);
    let keep: Vec<bool> = grid.axis_wavenumbers().iter().map(|w| w.abs() <= k).collect();
    let zero = Complex64::new(0.0, 0.0);
    for (i0, slab) in f.coeffs_mut().chunks_exact_mut(n * n).enumerate() {
        if !keep[i0] {
            slab.fill(zero);
            continue;
        }
        for (i1, row) in slab.chunks_exact_mut(n).enumerate() {
            if !keep[i1] {
                row.fill(zero);
                continue;
            }
            for (c, &kp) in row.iter_mut().zip(&keep) {
                if !kp {
                    *c = zero;
                }
            }
        }
    }
}

/// Physical-space workspace attached to a product rule.
#[derive(Debug, Clone, Copy)]
pub struct ProductSpace {
    grid: Grid,
    rule: ProductRule,
}

impl ProductSpace {
    pub fn new(grid: Grid, rule: ProductRule) -> Self {
        if let ProductRule::Padded(m) = rule {
            assert!(m >= grid.n(), "padded grid must not be smaller than the field grid");
        }
        Self { grid, rule }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn rule(&self) -> ProductRule {
        self.rule
    }

    /// Points per axis of the physical workspace.
    pub fn points(&self) -> usize {
        match self.rule {
            ProductRule::TwoThirds => self.grid.n(),
            ProductRule::Padded(m) => m,
        }
    }

    /// Synthesizes each field on the workspace lattice.
    pub fn to_physical(&self, fields: &[&SpectralField]) -> Vec<Vec<f64>> {
        match self.rule {
            ProductRule::TwoThirds => {
                let masked: Vec<SpectralField> = fields
                    .iter()
                    .map(|f| {
                        let mut g = (*f).clone();
                        apply_two_thirds(&mut g);
                        g
                    })
                    .collect();
                let refs: Vec<&SpectralField> = masked.iter().collect();
                inverse_transform_many(&refs)
                    .into_iter()
                    .map(PhysicalField::into_values)
                    .collect()
            }
            ProductRule::Padded(m) => {
                let mut out = Vec::with_capacity(fields.len());
                for pair in fields.chunks(2) {
                    let (a, b) = (pair[0], pair.get(1).copied());
                    let mut buf = vec![Complex64::new(0.0, 0.0); m * m * m];
                    self.embed(a, &mut buf, Complex64::new(1.0, 0.0));
                    if let Some(b) = b {
                        self.embed(b, &mut buf, Complex64::new(0.0, 1.0));
                    }
                    fft3(&mut buf, m, Direction::Inverse);
                    out.push(buf.iter().map(|c| c.re).collect());
                    if b.is_some() {
                        out.push(buf.iter().map(|c| c.im).collect());
                    }
                }
                out
            }
        }
    }

    /// Analyzes workspace samples back onto the field grid.
    pub fn to_spectral(&self, values: &[&[f64]]) -> Vec<SpectralField> {
        match self.rule {
            ProductRule::TwoThirds => {
                let fields: Vec<PhysicalField> = values
                    .iter()
                    .map(|v| PhysicalField::from_values_unchecked(self.grid, v.to_vec()))
                    .collect();
                let refs: Vec<&PhysicalField> = fields.iter().collect();
                let mut out = forward_transform_many(&refs);
                for f in &mut out {
                    apply_two_thirds(f);
                }
                out
            }
            ProductRule::Padded(m) => {
                let mut out = Vec::with_capacity(values.len());
                for pair in values.chunks(2) {
                    let mut buf: Vec<Complex64> = match pair {
                        [a, b] => a.iter().zip(b.iter()).map(|(x, y)| Complex64::new(*x, *y)).collect(),
                        [a] => a.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
                        _ => unreachable!(),
                    };
                    fft3(&mut buf, m, Direction::Forward);
                    let scale = 1.0 / (m * m * m) as f64;
                    let (fa, fb) = self.extract(&buf, m, scale);
                    out.push(fa);
                    if pair.len() == 2 {
                        out.push(fb);
                    }
                }
                out
            }
        }
    }

    /// Fraction of the squared L2 mass of `values` lying outside the field
    /// grid's wavevector box. Always 0 for the two-thirds rule.
    pub fn truncated_fraction(&self, values: &[f64]) -> f64 {
        let ProductRule::Padded(m) = self.rule else {
            return 0.0;
        };
        let mut buf: Vec<Complex64> = values.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        fft3(&mut buf, m, Direction::Forward);
        let half = self.grid.nyquist();
        let wrap = |i: usize| if i < m / 2 { i as i64 } else { i as i64 - m as i64 };
        let (mut inside, mut outside) = (0.0, 0.0);
        for (idx, c) in buf.iter().enumerate() {
            let xi = [wrap(idx / (m * m)), wrap((idx / m) % m), wrap(idx % m)];
            let e = c.norm_sqr();
            if xi.iter().all(|k| k.abs() < half) {
                inside += e;
            } else {
                outside += e;
            }
        }
        if inside + outside == 0.0 {
            0.0
        } else {
            outside / (inside + outside)
        }
    }

    /// Pointwise product of two spectral fields, analyzed back to the grid.
    pub fn product(&self, f: &SpectralField, g: &SpectralField) -> SpectralField {
        let phys = self.to_physical(&[f, g]);
        let prod: Vec<f64> = phys[0].iter().zip(&phys[1]).map(|(a, b)| a * b).collect();
        self.to_spectral(&[&prod]).remove(0)
    }

    fn embed(&self, f: &SpectralField, buf: &mut [Complex64], factor: Complex64) {
        let grid = self.grid;
        let m = self.points() as i64;
        for (i, c) in f.coeffs().iter().enumerate() {
            let xi = grid.wavevector(i);
            // the -n/2 plane has no partner on the padded lattice
            if grid.is_nyquist(xi) {
                continue;
            }
            let [a, b, d] = xi.map(|k| k.rem_euclid(m) as usize);
            let m = m as usize;
            buf[(a * m + b) * m + d] += c * factor;
        }
    }

    fn extract(&self, buf: &[Complex64], m: usize, scale: f64) -> (SpectralField, SpectralField) {
        let grid = self.grid;
        let mut fa = SpectralField::zeros(grid);
        let mut fb = SpectralField::zeros(grid);
        let mi = m as i64;
        let pos = |xi: [i64; 3]| {
            let [a, b, d] = xi.map(|k| k.rem_euclid(mi) as usize);
            (a * m + b) * m + d
        };
        for i in 0..grid.len() {
            let xi = grid.wavevector(i);
            if grid.is_nyquist(xi) {
                continue;
            }
            let z = buf[pos(xi)];
            let zc = buf[pos(xi.map(|k| -k))].conj();
            fa.coeffs_mut()[i] = (z + zc) * (0.5 * scale);
            let d = (z - zc) * (0.5 * scale);
            fb.coeffs_mut()[i] = Complex64::new(d.im, -d.re);
        }
        (fa, fb)
    }
}
