use proptest::prelude::*;

use lpns::norms::lq_norm;
use lpns::ns::random_divfree;
use lpns::series::{series_value, JSplit, SeriesParams, Weight};
use lpns::spectral::{forward_transform, inverse_transform_real, Grid, PhysicalField};

fn field(n: usize, values: &[f64]) -> PhysicalField {
    PhysicalField::from_values(Grid::new(n).unwrap(), values.to_vec()).unwrap()
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 512)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transform_is_linear_and_isometric(a in samples(), b in samples(), s in -3.0f64..3.0) {
        let (f, g) = (field(8, &a), field(8, &b));
        let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + s * y).collect();
        let lhs = forward_transform(&field(8, &combo));
        let (ff, fg) = (forward_transform(&f), forward_transform(&g));
        let scale = ff.max_abs().max(fg.max_abs()).max(1.0);
        for ((l, x), y) in lhs.coeffs().iter().zip(ff.coeffs()).zip(fg.coeffs()) {
            prop_assert!((l - (x + y * s)).norm() < 1e-12 * scale);
        }
        let phys = f.grid().cell_volume() * a.iter().map(|v| v * v).sum::<f64>();
        prop_assert!((ff.energy() - phys).abs() <= 1e-12 * phys.max(1e-300));
        let back = inverse_transform_real(&ff);
        prop_assert!(back.values().iter().zip(&a).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn norms_grow_with_exponent(a in samples(), p in 1.0f64..20.0, dp in 0.0f64..50.0) {
        // unit-volume torus: ||f||_p <= ||f||_q for p <= q
        let f = field(8, &a);
        let lo = lq_norm(&f, p).unwrap().log_value;
        let hi = lq_norm(&f, p + dp).unwrap().log_value;
        let sup = lq_norm(&f, f64::INFINITY).unwrap().log_value;
        prop_assert!(lo <= hi + 1e-12);
        prop_assert!(hi <= sup + 1e-12);
    }

    #[test]
    fn series_decreases_in_b(seed in 0u64..1000, b in 0.5f64..6.0, db in 0.1f64..4.0) {
        let u = random_divfree(Grid::new(8).unwrap(), seed, 1.0, 0.1, 0.1).unwrap();
        let at = |b: f64, w: Weight| {
            series_value(&u, &SeriesParams::new(b).unwrap(), w, JSplit::All).unwrap().log_value
        };
        prop_assert!(at(b + db, Weight::Bk) <= at(b, Weight::Bk));
    }

    #[test]
    fn growing_k_grid_never_lowers_series(seed in 0u64..1000, extra in 101u32..400) {
        let u = random_divfree(Grid::new(8).unwrap(), seed, 1.0, 0.1, 0.1).unwrap();
        let base = SeriesParams::new(1.0).unwrap();
        let small = series_value(&u, &base, Weight::Bk, JSplit::All).unwrap().log_value;
        let mut k = base.k_grid.clone();
        k.push(extra);
        k.sort_unstable();
        k.dedup();
        let big = series_value(&u, &base.with_k_grid(k).unwrap(), Weight::Bk, JSplit::All).unwrap().log_value;
        prop_assert!(big >= small);
    }
}
