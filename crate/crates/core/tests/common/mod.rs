//! Direct series summation with exact integer power sums.

#![allow(dead_code)]

use num_bigint::BigUint;

use lpns::norms::band_magnitude;
use lpns::ns::VelocityState;
use lpns::series::{JSplit, SeriesParams, Weight};

/// `v = m 2^e` with integer `m`, for finite `v > 0`.
fn decode(v: f64) -> (u64, i64) {
    let bits = v.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    }
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64_digits()[0] as f64).log2();
    }
    let top = (x >> (bits - 64)).to_u64_digits()[0];
    (top as f64).log2() + (bits - 64) as f64
}

/// `log2 sum_x v_x^k`, exact up to the final rounding of the logarithm.
pub fn log2_power_sum(values: &[f64], k: u32) -> f64 {
    let parts: Vec<(u64, i64)> = values.iter().filter(|v| **v != 0.0).map(|v| decode(v.abs())).collect();
    if parts.is_empty() {
        return f64::NEG_INFINITY;
    }
    let e_min = parts.iter().map(|p| p.1).min().unwrap();
    let mut sum = BigUint::from(0u32);
    for (m, e) in parts {
        let shift = ((e - e_min) * i64::from(k)) as usize;
        sum += BigUint::from(m).pow(k) << shift;
    }
    log2_big(&sum) + (e_min * i64::from(k)) as f64
}

/// Natural log of the series, every `||D^sigma P_j u||_k^k` from an exact sum.
pub fn direct_log_series(u: &VelocityState, p: &SeriesParams, weight: Weight, split: JSplit, j_top: i32) -> f64 {
    let cut = p.j0_cutoff();
    let (lo, hi) = match split {
        JSplit::All => (p.j0, j_top),
        JSplit::Low => (p.j0, cut.min(j_top)),
        JSplit::High => ((cut + 1).max(p.j0), j_top),
    };
    let log2_cv = u.grid().cell_volume().log2();
    let mut terms = Vec::new();
    for j in lo..=hi {
        let mag = band_magnitude(u, j, p.sigma);
        for &k in &p.k_grid {
            let kf = f64::from(k);
            terms.push(log2_cv + log2_power_sum(mag.values(), k) - weight.exponent(kf, p.b));
        }
    }
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    (max + terms.iter().map(|t| (t - max).exp2()).sum::<f64>().log2()) * std::f64::consts::LN_2
}
