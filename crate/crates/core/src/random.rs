//! Seeded random spectral fields. Identical seeds give bit-identical fields.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectral::{Grid, SpectralField};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sample `index` of a seeded ensemble.
pub fn sample_rng(seed: u64, index: u64) -> Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index.wrapping_add(1));
    r
}

pub fn normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Gaussian coefficients with standard deviation `weight(xi)`, made exactly
/// Hermitian by averaging each coefficient with the conjugate of its partner.
pub fn random_hermitian(grid: Grid, rng: &mut Rng, weight: impl Fn([i64; 3]) -> f64) -> SpectralField {
    let n = grid.n();
    let w = grid.axis_wavenumbers();
    let mut raw = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i0, slab) in raw.chunks_exact_mut(n * n).enumerate() {
        for (i1, row) in slab.chunks_exact_mut(n).enumerate() {
            for (c, &w2) in row.iter_mut().zip(&w) {
                let s = weight([w[i0], w[i1], w2]);
                if s != 0.0 {
                    let re = normal(rng);
                    let im = normal(rng);
                    *c = Complex64::new(re, im) * s;
                }
            }
        }
    }
    let partner: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
    let mut sym = Vec::with_capacity(grid.len());
    for i0 in 0..n {
        for i1 in 0..n {
            let row = &raw[(i0 * n + i1) * n..][..n];
            let crow = &raw[(partner[i0] * n + partner[i1]) * n..][..n];
            for (c, &p) in row.iter().zip(&partner) {
                sym.push((c + crow[p].conj()) * 0.5);
            }
        }
    }
    SpectralField::from_coeffs(grid, sym).expect("finite by construction")
}
