//! Weight exponents of the frequency series and the low/high band cutoff.

use crate::error::{Error, Result};

/// `B_k = (B + 1 + 1/sqrt k) k`.
pub fn bk(k: f64, b: f64) -> f64 {
    (b + 1.0 + 1.0 / k.sqrt()) * k
}

/// `Bhat_k = (B - 1/sqrt k) k + 2^B`.
pub fn bhat(k: f64, b: f64) -> f64 {
    (b - 1.0 / k.sqrt()) * k + 2f64.powf(b)
}

/// `J0 = floor(8B / sigma)`.
pub fn j0_cutoff(b: f64, sigma: u32) -> i32 {
    (8.0 * b / f64::from(sigma)).floor() as i32
}

/// The exponents attached to one value of `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFamily {
    pub b: f64,
    pub sigma: u32,
    pub k0: u32,
}

impl ExponentFamily {
    pub fn new(b: f64, sigma: u32, k0: u32) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter {
                name: "B",
                reason: format!("need a finite B > 0, got {b}"),
            });
        }
        if sigma == 0 || k0 == 0 {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("need sigma >= 1 and k0 >= 1, got {sigma}, {k0}"),
            });
        }
        Ok(Self { b, sigma, k0 })
    }

    pub fn bk(&self, k: f64) -> f64 {
        bk(k, self.b)
    }

    pub fn bhat(&self, k: f64) -> f64 {
        bhat(k, self.b)
    }

    pub fn j0(&self) -> i32 {
        j0_cutoff(self.b, self.sigma)
    }

    /// Smallest integer `k_hat >= k0` with `Bhat_k <= B_k` for every `k >= k_hat`.
    ///
    /// `Bhat_k - B_k = 2^B - k - 2 sqrt k` decreases in `k`, so the first
    /// integer where it turns nonpositive is the crossover.
    pub fn crossover(&self) -> u64 {
        let gap = |k: f64| self.bhat(k) - self.bk(k);
        let root = ((1.0 + 2f64.powf(self.b)).sqrt() - 1.0).powi(2);
        let mut k = (root.floor() as u64).max(u64::from(self.k0));
        while k > u64::from(self.k0) && gap((k - 1) as f64) <= 0.0 {
            k -= 1;
        }
        while gap(k as f64) > 0.0 {
            k += 1;
        }
        k
    }
}
