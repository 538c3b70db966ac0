use std::f64::consts::PI;

use lpns::inequality::*;
use lpns::littlewood_paley::project_band;
use lpns::norms::{dsigma_magnitude, lq_norm};
use lpns::ns::{random_divfree, taylor_green, VelocityState};
use lpns::spectral::{Grid, SpectralField};
use lpns::Error;

fn grid(n: usize) -> Grid {
    Grid::new(n).unwrap()
}

fn mode(xi: [i64; 3]) -> FieldGenerator {
    FieldGenerator::new(FieldKind::SingleMode(xi), 0)
}

#[test]
fn projection_of_band_center_mode_is_identity() {
    let r = check_projection_bound(&mode([8, 0, 0]), grid(32), 2.0, 3, 1).unwrap();
    assert!((r.max_ratio - 1.0).abs() < 1e-12, "{}", r.max_ratio);
    assert!(r.passed);
}

#[test]
fn projection_of_mode_outside_band_vanishes() {
    let r = check_projection_bound(&mode([1, 1, 0]), grid(32), 4.0, 3, 1).unwrap();
    assert!(r.max_ratio < 1e-14);
}

#[test]
fn projection_is_contraction_in_l2() {
    let gen = FieldGenerator::new(FieldKind::RandomBandLimited, 9);
    let r = check_projection_bound(&gen, grid(16), 2.0, 2, 12).unwrap();
    assert!(r.max_ratio <= 1.0 + 1e-12);
    assert!(r.passed);
    assert_eq!(r.samples, 12);
}

#[test]
fn projection_constant_dominates_lattice_kernel_bulk() {
    let c0 = projection_constant();
    assert!(c0 > 6.5 && c0 < 6.7, "{c0}");
    assert!(continuum_leq_kernel_l1() < continuum_band_kernel_l1());
}

#[test]
fn cheap_lp_on_single_band_field() {
    let gen = FieldGenerator::new(FieldKind::RandomBandLimited, 2).with_band(2);
    let r = check_cheap_lp(&gen, grid(16), 3.0, 4).unwrap();
    assert!(r.passed, "{r:?}");
    // two bands carry the field, so the sum is within a factor of a few
    assert!(r.max_ratio > 0.2);
}

#[test]
fn cheap_lp_zero_field() {
    let gen = FieldGenerator::new(FieldKind::RandomBandLimited, 2).with_amplitude(0.0);
    let r = check_cheap_lp(&gen, grid(8), 4.0, 2).unwrap();
    assert_eq!(r.get("zero_fields"), Some(2.0));
    assert!(r.passed);
}

#[test]
fn bernstein_rejects_decreasing_exponent() {
    let gen = FieldGenerator::new(FieldKind::RandomBandLimited, 1);
    let err = check_bernstein(&gen, grid(16), 4.0, 2.0, (1, 2), 2).unwrap_err();
    assert!(matches!(err, Error::InvalidParameter { name: "q_prime", .. }));
}

#[test]
fn bernstein_equal_exponents_give_unit_ratio() {
    let gen = FieldGenerator::new(FieldKind::RandomBandLimited, 1);
    let r = check_bernstein(&gen, grid(16), 3.0, 3.0, (1, 3), 2).unwrap();
    assert!((r.max_ratio - 1.0).abs() < 1e-12);
    assert!(r.fitted_exponent.unwrap().abs() < 1e-12);
    assert!(r.passed);
}

#[test]
fn bernstein_names_empty_band() {
    let err = check_bernstein(&mode([2, 0, 0]), grid(16), 2.0, f64::INFINITY, (1, 3), 1).unwrap_err();
    assert!(matches!(err, Error::EmptyBand(_)), "{err:?}");
}

#[test]
fn gradient_of_axis_mode_is_two_pi() {
    for j in 1..=3 {
        let r = check_gradient_equivalence(&mode([1 << j, 0, 0]), grid(32), 2.0, (j, j), 1).unwrap();
        assert!((r.max_ratio - 2.0 * PI).abs() < 1e-12, "j={j}: {}", r.max_ratio);
        assert!(r.passed);
    }
}

#[test]
fn gradient_near_band_top_approaches_four_pi() {
    let r = check_gradient_equivalence(&mode([15, 0, 0]), grid(32), 2.0, (3, 3), 1).unwrap();
    assert!((r.max_ratio - 2.0 * PI * 15.0 / 8.0).abs() < 1e-12);
    assert!(r.max_ratio < 4.0 * PI);
}

#[test]
fn gradient_skips_zero_projection() {
    let r = check_gradient_equivalence(&mode([1, 0, 0]), grid(16), 2.0, (3, 3), 1).unwrap();
    assert_eq!(r.samples, 0);
    assert_eq!(r.get("skipped"), Some(1.0));
}

#[test]
fn paraproduct_with_constant_factor() {
    let g0 = grid(32);
    let mut f = SpectralField::zeros(g0);
    f.set([0, 0, 0], 2.5.into()).unwrap();
    let g = FieldGenerator::new(FieldKind::RandomBandLimited, 4).sample(g0, 0).unwrap();
    let p = paraproduct(&f, &g, 3).unwrap();
    assert!(p.pieces[0].max_diff(&project_band(&g, 3).scale(2.5)) < 1e-13);
    for piece in &p.pieces[1..] {
        assert!(piece.max_abs() < 1e-15);
    }
}

#[test]
fn paraproduct_of_two_modes_has_one_piece() {
    let g0 = grid(32);
    let f = SpectralField::cosine_mode(g0, [8, 0, 0], 1.0).unwrap();
    let g = SpectralField::cosine_mode(g0, [0, 1, 0], 1.0).unwrap();
    let p = paraproduct(&f, &g, 3).unwrap();
    let nonzero: Vec<usize> = (0..5).filter(|&i| p.pieces[i].max_abs() > 1e-14).collect();
    assert_eq!(nonzero, vec![1]);
    assert!(p.direct.max_diff(&p.sum()) < 1e-15);
    // cos a cos b = (cos(a+b) + cos(a-b)) / 2, both modes at |xi| = sqrt(65)
    assert!((p.direct.get([8, 1, 0]).re - 0.25).abs() < 1e-14);
}

#[test]
fn paraproduct_rejects_nyquist_content() {
    let g0 = grid(16);
    let mut f = SpectralField::zeros(g0);
    f.set([-8, 0, 0], 1.0.into()).unwrap();
    let g = SpectralField::cosine_mode(g0, [1, 0, 0], 1.0).unwrap();
    assert!(matches!(paraproduct(&f, &g, 2), Err(Error::Aliasing(_))));
}

#[test]
fn paraproduct_random_pair_is_exact() {
    let f = FieldGenerator::new(FieldKind::RandomBandLimited, 5);
    let g = FieldGenerator::new(FieldKind::RandomBandLimited, 6);
    let r = check_paraproduct_exactness(&f, &g, grid(32), 2, 2).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.get("vanish_low_low").unwrap() < 1e-12);
}

#[test]
fn product_exponents_must_be_conjugate() {
    assert!(ProductExponents::new(2.0, 4.0, 4.0).is_ok());
    assert!(ProductExponents::new(2.0, 4.0, 3.0).is_err());
    assert!(ProductExponents::new(1.0, 1.5, 3.0).is_err());
}

#[test]
fn product_estimate_trivial_cases() {
    let g0 = grid(16);
    let e = ProductExponents::new(2.0, 4.0, 4.0).unwrap();
    let f = FieldGenerator::new(FieldKind::SmoothDecaying, 3).sample(g0, 0).unwrap();
    let zero = SpectralField::zeros(g0);
    // packed transforms leave round-off in the real slot
    let (lhs, rhs) = product_estimate(&zero, &f, e, 2, 2).unwrap();
    assert!(lhs < 1e-11 && rhs == 0.0, "{lhs} {rhs}");

    let mut c = SpectralField::zeros(g0);
    c.set([0, 0, 0], (-1.5).into()).unwrap();
    let (lhs, rhs) = product_estimate(&f, &c, e, 1, 2).unwrap();
    let direct = lq_norm(&dsigma_magnitude(&project_band(&f, 2), 1).magnitude, 2.0).unwrap().value();
    assert!((lhs - 1.5 * direct).abs() < 1e-12 * lhs);
    assert!(lhs <= rhs);
}

#[test]
fn alpha_only_on_first_bands() {
    assert_eq!([1, 2, 3, 4].map(alpha), [1.0, 1.0, 0.0, 0.0]);
}

#[test]
fn product_inequality_random_pair() {
    let f = FieldGenerator::new(FieldKind::SmoothDecaying, 3);
    let g = FieldGenerator::new(FieldKind::SmoothDecaying, 4);
    let e = ProductExponents::new(2.0, 4.0, 4.0).unwrap();
    let r = check_product_inequality(&f, &g, grid(16), e, 2, 2, 3).unwrap();
    assert!(r.max_ratio.is_finite() && r.max_ratio > 0.0);
    assert!(r.passed, "{r:?}");
}

#[test]
fn sobolev_sine_closed_forms() {
    for j in [1, 2] {
        assert!(check_sobolev_sine(grid(16), j).unwrap().passed);
    }
}

#[test]
fn sobolev_band_reports_three_checks() {
    let gen = FieldGenerator::new(FieldKind::RandomBandLimited, 5);
    let reports = check_sobolev_band(&gen, grid(32), 4.0, 1, (1, 3), 3).unwrap();
    let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, ["sobolev_power", "sobolev_interpolation", "sobolev_band"]);
    let slope = reports[2].fitted_exponent.unwrap();
    assert!((slope + 2.0).abs() < 0.3, "{slope}");
}

#[test]
fn initial_series_zero_state_passes_everywhere() {
    let u0 = VelocityState::zero(grid(8), 0.1).unwrap();
    let r = check_initial_series_bound(&u0, &[3.0, 1.0, 2.0], 110, 2).unwrap();
    assert!(r.passed);
    assert_eq!(r.get("b_tilde"), Some(1.0));
    assert_eq!(r.max_ratio, 0.0);
}

#[test]
fn initial_series_threshold_grows_with_amplitude() {
    let bs: Vec<f64> = (2..=80).map(|i| i as f64 * 0.25).collect();
    let b = |amp: f64| {
        let u0 = taylor_green(grid(16), amp, 0.1).unwrap();
        let r = check_initial_series_bound(&u0, &bs, 120, 2).unwrap();
        r.get("b_tilde").unwrap()
    };
    let (small, one, big) = (b(0.5), b(1.0), b(2.0));
    assert!(one.is_finite(), "{one}");
    assert!(small <= one && one <= big, "{small} {one} {big}");
}

#[test]
fn pressure_at_two_is_bounded_and_beltrami_matches() {
    let g0 = grid(16);
    let states: Vec<VelocityState> = (0..4).map(|s| random_divfree(g0, s, 1.0, 1.0, 0.1).unwrap()).collect();
    let r = check_pressure_cz(&states, 2.0, 1, 2, 0).unwrap();
    assert!(r.passed && r.hard);
    assert!(r.max_ratio <= 1.0 + 1e-12, "{}", r.max_ratio);
    assert!(check_beltrami_pressure(g0, [1, 1, 0], 1.0, 1).unwrap().passed);
}

#[test]
fn reports_are_deterministic() {
    let gen = FieldGenerator::new(FieldKind::WavePacket, 8);
    let run = || format!("{:?}", check_bernstein(&gen, grid(16), 2.0, 6.0, (1, 2), 3).unwrap());
    assert_eq!(run(), run());
}

#[test]
fn csv_has_one_row_per_report() {
    let reports = vec![check_partition(grid(16), 4.0).unwrap(), check_transform(grid(8), 1, 1).unwrap()];
    let mut buf = Vec::new();
    write_reports_csv(&mut buf, &reports).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], REPORT_HEADER.join(","));
    assert_eq!(lines.len(), 3);
}
