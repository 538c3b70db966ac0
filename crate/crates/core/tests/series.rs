mod common;

use lpns::ns::{beltrami, beltrami_exact, random_divfree, run, taylor_green, Dealias, RunOptions, StepConfig, VelocityState};
use lpns::series::*;
use lpns::spectral::Grid;

fn grid(n: usize) -> Grid {
    Grid::new(n).unwrap()
}

#[test]
fn matches_exact_power_sums() {
    let u = random_divfree(grid(16), 21, 1.0, 0.02, 0.1).unwrap();
    for b in [0.5, 1.0, 3.0] {
        let p = SeriesParams::new(b).unwrap().with_k_grid(vec![100, 110]).unwrap().with_j_cap(3).unwrap();
        let terms = SeriesTerms::compute(&u, &p).unwrap();
        for weight in [Weight::Bk, Weight::BhatK] {
            for split in [JSplit::All, JSplit::Low, JSplit::High] {
                let got = terms.value(weight, split).log_value;
                let want = common::direct_log_series(&u, &p, weight, split, 3);
                if want == f64::NEG_INFINITY {
                    assert_eq!(got, want);
                    continue;
                }
                let rel = (got - want).exp_m1().abs();
                assert!(rel < 1e-10, "B={b} {weight:?} {split:?}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn terms_live_on_the_field_bands() {
    // |xi| = 4 sits where psi_2 = 1 and every other band vanishes
    let u = beltrami(grid(16), [4, 0, 0], 1.0, 0.1).unwrap();
    let t = SeriesTerms::compute(&u, &SeriesParams::new(2.0).unwrap()).unwrap();
    let live = &t.log_norms[1];
    assert_eq!(t.bands[1], 2);
    // the field is synthesized in physical space, so other bands hold round-off only
    for (j, row) in t.bands.iter().zip(&t.log_norms) {
        if *j != 2 {
            assert!(row.iter().zip(live).all(|(x, l)| *x < l - 25.0), "band {j}");
        }
    }
}

#[test]
fn truncation_is_monotone() {
    let u = random_divfree(grid(16), 4, 1.0, 0.05, 0.1).unwrap();
    let base = SeriesParams::new(0.6).unwrap();
    let value = |p: &SeriesParams| series_value(&u, p, Weight::Bk, JSplit::All).unwrap().log_value;
    let mut last = f64::NEG_INFINITY;
    for k_grid in [vec![100], vec![100, 120], vec![100, 120, 121], vec![100, 101, 120, 121, 200]] {
        let v = value(&base.clone().with_k_grid(k_grid).unwrap());
        assert!(v >= last);
        last = v;
    }
    let mut last = f64::NEG_INFINITY;
    for cap in 1..=4 {
        let v = value(&base.clone().with_j_cap(cap).unwrap());
        assert!(v >= last);
        last = v;
    }
}

#[test]
fn decaying_beltrami_series_decreases() {
    let g = grid(16);
    let p = SeriesParams::new(4.0).unwrap();
    let vals: Vec<f64> = [0.0, 0.2, 0.5, 1.0]
        .iter()
        .map(|&t| {
            let u = beltrami_exact(g, [1, 1, 0], 1.0, 0.1, t).unwrap();
            series_value(&u, &p, Weight::Bk, JSplit::All).unwrap().log_value
        })
        .collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    // every term carries exp(-nu lambda^2 t k): the log drops by nu (2 pi)^2 2 t k per term
    let rate = 0.1 * (2.0 * std::f64::consts::PI).powi(2) * 2.0;
    let drop = vals[0] - vals[3];
    assert!(drop > rate * 100.0 * 0.999 && drop < rate * 200.0 * 1.001, "{drop}");
}

#[test]
fn smooth_state_has_negligible_tail() {
    let u = taylor_green(grid(16), 1.0, 0.1).unwrap();
    let v = series_value(&u, &SeriesParams::new(8.0).unwrap(), Weight::Bk, JSplit::All).unwrap();
    assert!(v.last_k_fraction < 1e-12, "{}", v.last_k_fraction);
    assert!(!v.truncation_warning());
}

#[test]
fn rejects_unresolvable_cap() {
    let u = taylor_green(grid(16), 1.0, 0.1).unwrap();
    let p = SeriesParams::new(1.0).unwrap().with_j_cap(9).unwrap();
    assert!(series_value(&u, &p, Weight::Bk, JSplit::All).is_err());
}

#[test]
fn zero_state_monitor_rows_vanish() {
    let u = VelocityState::zero(grid(8), 0.1).unwrap();
    let mut m = SeriesMonitor::new(SeriesParams::new(2.0).unwrap(), 1, 0.05, 1.0).unwrap();
    let opts = RunOptions::new(StepConfig::new(0.01, Dealias::TwoThirds).unwrap(), 0.05);
    let out = run(u, &opts, &mut [&mut m]).unwrap();
    let rows = &out.tables[0].rows;
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert!(r[1..].iter().all(|&x| x == 0.0), "{r:?}");
    }
}

#[test]
fn taylor_green_rows_are_well_formed() {
    let u = taylor_green(grid(16), 1.0, 0.1).unwrap();
    let mut m = SeriesMonitor::new(SeriesParams::new(4.0).unwrap(), 2, 0.05, 1.0).unwrap();
    let opts = RunOptions::new(StepConfig::new(0.01, Dealias::TwoThirds).unwrap(), 0.05);
    let out = run(u, &opts, &mut [&mut m]).unwrap();
    let table = &out.tables[0];
    assert_eq!(table.header, SERIES_HEADER.map(String::from).to_vec());
    // steps 0, 2, 4 and the final step 5
    assert_eq!(table.rows.len(), 4);
    let mut buf = Vec::new();
    table.write_csv(&mut buf).unwrap();
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(reader.headers().unwrap().len(), 8);
    for rec in reader.records() {
        let row: Vec<f64> = rec.unwrap().iter().map(|s| s.parse().unwrap()).collect();
        assert!(row.iter().all(|x| x.is_finite()));
        assert!(row[1] > 0.0 && row[6] > 0.0);
    }
}

#[test]
fn decay_fit_respects_shape() {
    let u = random_divfree(grid(32), 8, 2.0, 0.5, 0.1).unwrap();
    let p = SeriesParams::new(2.0).unwrap();
    let fit = high_band_decay(&u, &p, 200.0, (1, 4)).unwrap();
    assert_eq!(fit.bands.len(), 4);
    assert!((fit.shape_exponent - (0.03 - 0.015 - 1.0)).abs() < 1e-15);
    let slope = fit.slope.unwrap();
    assert!(slope < fit.shape_exponent + 0.3, "{slope}");
}

#[test]
fn sweep_satisfies_conclusion() {
    let pts = barrier_sweep(30, 5, 1e-3).unwrap();
    assert_eq!(pts.len(), 30);
    for p in &pts {
        assert_eq!(p.verdict, Verdict::Pass, "{p:?}");
        assert!(p.slack >= -1e-9);
    }
    assert!(pts.iter().any(|p| p.pulse) && pts.iter().any(|p| !p.pulse));
}

#[test]
fn bisection_reproduces_threshold() {
    let t = threshold_by_bisection(1.0, 5.0, 1e-10).unwrap();
    assert!((t - 0.0726).abs() < 5e-5, "{t}");
    for (b, m) in [(0.5, 2.0), (3.0, 10.0)] {
        let t = threshold_by_bisection(b, m, 1e-12).unwrap();
        assert!((t / hypothesis_threshold(b, m) - 1.0).abs() < 1e-9);
    }
}
