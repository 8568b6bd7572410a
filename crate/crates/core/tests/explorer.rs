use std::f64::consts::PI;

use proptest::prelude::*;
use wavegap_core::analytic::WaveguideGeometry;
use wavegap_core::explorer::*;
use wavegap_core::fem::reference_spectrum;
use wavegap_core::Error;

/// Two even bands with a gap `[1, 2]`: the lower one peaks at `|k| = 2`,
/// the upper one bottoms out at `|k| = 1`.
fn split_edges() -> FnBands<impl Fn(f64) -> Vec<f64> + Sync> {
    FnBands::new(2, |k: f64| {
        let q = fold_quasimomentum(k).abs();
        vec![1.0 - (q - 2.0).powi(2), 2.0 + (q - 1.0).powi(2)]
    })
}

#[test]
fn synthetic_gap_is_found_and_refined() {
    let grid = linspace(0.0, PI, 33);
    let diagram = sweep(&split_edges(), &grid, 2).unwrap();
    let gaps = detect_gaps(&diagram, (f64::NEG_INFINITY, f64::INFINITY));
    assert_eq!(gaps.len(), 1);
    assert!(gaps[0].alpha_l <= 1.0 && gaps[0].alpha_r >= 2.0);

    let out = study_gap(&split_edges(), &grid, 2, 1.5, 1e-6).unwrap();
    assert_eq!(out.status, RowStatus::Found);
    assert_eq!(out.nearby, 1);
    assert!(!out.ambiguous);
    let gap = out.gap.unwrap();
    assert!((gap.alpha_l - 1.0).abs() < 1e-10, "{gap:?}");
    assert!((gap.alpha_r - 2.0).abs() < 1e-10, "{gap:?}");
    assert!((gap.k_l - 2.0).abs() < 1e-5);
    assert!((gap.k_r - 1.0).abs() < 1e-5);
    assert!((gap.width() - 1.0).abs() < 1e-10);
    assert_eq!(gap.distance_to(1.5), 0.0);
    assert_eq!(gap.distance_to(0.5), gap.alpha_l - 0.5);
}

#[test]
fn touching_bands_are_not_a_gap() {
    // min and max of two crossing parabolas: a kink, no gap.
    let bands = FnBands::new(2, |k: f64| {
        let a = k * k;
        let b = (k.abs() - 2.0 * PI).powi(2) / 2.0;
        vec![a.min(b), a.max(b)]
    });
    for n in [9, 17, 33, 65] {
        let diagram = sweep(&bands, &linspace(0.0, PI, n), 2).unwrap();
        assert!(detect_gaps(&diagram, (f64::NEG_INFINITY, f64::INFINITY)).is_empty(), "{n} points");
    }
}

#[test]
fn decoupled_spectrum_has_no_gap_near_the_crossing() {
    let g = WaveguideGeometry::new(2.0, 2.3, 0.0).unwrap();
    let bands = FnBands::new(6, move |k| reference_spectrum(&g, k, 6));
    let diagram = sweep(&bands, &linspace(0.0, PI, 33), 6).unwrap();
    let e0 = 0.917_885_801_331_089;
    let near = detect_gaps(&diagram, (e0 - 0.05, e0 + 0.05));
    assert!(near.is_empty(), "{near:?}");
    let out = study_gap(&bands, &linspace(0.0, PI, 33), 6, e0, 1e-4).unwrap();
    assert_eq!(out.nearby, 0);
}

#[test]
fn window_filters_gaps() {
    let diagram = sweep(&split_edges(), &linspace(-PI, PI, 41), 2).unwrap();
    assert_eq!(detect_gaps(&diagram, (0.0, 1.2)).len(), 1);
    assert!(detect_gaps(&diagram, (2.5, 3.0)).is_empty());
    assert!(diagram.evenness_defect() < 1e-13);
}

#[test]
fn refine_parabola_minimum() {
    let bands = FnBands::new(1, |k: f64| vec![(k - 1.0).powi(2) + 0.25]);
    let x = refine_extremum(&bands, 0, (0.5, 1.2, 2.0), ExtremumKind::Min, 1e-7).unwrap();
    assert!((x.k - 1.0).abs() < 1e-6, "{x:?}");
    assert!(x.energy <= 0.25 + 0.04 && (x.energy - 0.25).abs() < 1e-12);
    assert!(x.evaluations > 3);
}

#[test]
fn refine_never_reports_worse_than_the_start() {
    // Flat top: the start sample is already optimal.
    let bands = FnBands::new(1, |_k: f64| vec![3.0]);
    let x = refine_extremum(&bands, 0, (0.0, 0.3, 1.0), ExtremumKind::Max, 1e-4).unwrap();
    assert_eq!(x.energy, 3.0);
}

#[test]
fn refine_folds_past_the_zone_edge() {
    let bands = FnBands::new(1, |k: f64| vec![1.0 - (k.cos() + 1.0)]);
    // Maximum of -cos k at k = π; the bracket reaches past it.
    let x = refine_extremum(&bands, 0, (PI - 0.2, PI - 0.05, PI + 0.2), ExtremumKind::Max, 1e-7).unwrap();
    assert!((x.k.abs() - PI).abs() < 1e-6, "{x:?}");
    assert!(x.k > -PI && x.k <= PI);
}

#[test]
fn refine_rejects_unbracketed_starts() {
    let bands = FnBands::new(1, |k: f64| vec![k]);
    assert!(matches!(
        refine_extremum(&bands, 0, (0.0, 0.5, 1.0), ExtremumKind::Max, 1e-4),
        Err(Error::NotBracketed { .. })
    ));
    assert!(refine_extremum(&bands, 0, (1.0, 0.5, 2.0), ExtremumKind::Max, 1e-4).is_err());
    assert!(refine_extremum(&bands, 0, (0.0, 0.5, 1.0), ExtremumKind::Min, 0.0).is_err());
}

#[test]
fn grid_validation() {
    assert!(validate_grid(&linspace(-PI, PI, 33)).is_ok());
    assert!(validate_grid(&[0.0]).is_err());
    assert!(validate_grid(&[0.0, 0.0, 1.0]).is_err());
    assert!(validate_grid(&[0.0, 3.2]).is_err());
    assert!(validate_grid(&[1.0, 0.5]).is_err());
    let bands = FnBands::new(1, |k: f64| vec![k * k]);
    assert!(sweep(&bands, &linspace(0.0, 1.0, 4), 2).is_err());
    assert!(sweep(&bands, &linspace(0.0, 1.0, 4), 0).is_err());
}

#[test]
fn fit_recovers_exact_series() {
    let pts: Vec<(f64, f64)> = DEFAULT_EPSILONS.iter().map(|&e| (e, 0.9 - 0.4 / e.ln().abs())).collect();
    let f = fit_inverse_log(&pts).unwrap();
    assert!((f.intercept - 0.9).abs() < 1e-12);
    assert!((f.slope + 0.4).abs() < 1e-11);
    assert!(f.residual_norm < 1e-12);
    assert_eq!(f.epsilons, vec![1e-4, 3e-4, 1e-3, 3e-3, 1e-2]);
    assert!((f.evaluate(1e-3) - pts[2].1).abs() < 1e-13);

    let q = fit_inverse_log_quadratic(&pts).unwrap();
    assert!((q.intercept - 0.9).abs() < 1e-10 && (q.slope + 0.4).abs() < 1e-9 && q.curvature.abs() < 1e-8);
}

#[test]
fn quadratic_fit_recovers_remainder() {
    let v = |e: f64| {
        let x = 1.0 / e.ln().abs();
        0.92 + 0.55 * x - 0.8 * x * x
    };
    let pts: Vec<(f64, f64)> = DEFAULT_EPSILONS.iter().map(|&e| (e, v(e))).collect();
    let q = fit_inverse_log_quadratic(&pts).unwrap();
    assert!((q.intercept - 0.92).abs() < 1e-9, "{q:?}");
    assert!((q.slope - 0.55).abs() < 1e-8);
    assert!((q.curvature + 0.8).abs() < 1e-7);
    assert!((q.evaluate(5e-3) - v(5e-3)).abs() < 1e-11);
    // The two-term fit absorbs the remainder into its slope.
    let f = fit_inverse_log(&pts).unwrap();
    assert!(f.slope < 0.55 - 0.05);
}

#[test]
fn fit_rejects_bad_input() {
    assert!(matches!(
        fit_inverse_log(&[(1e-2, 1.0), (1e-3, 2.0)]),
        Err(Error::InsufficientFitData { points: 2 })
    ));
    assert!(matches!(
        fit_inverse_log(&[(1e-2, 1.0), (1e-3, 2.0), (1.5, 0.0)]),
        Err(Error::LogScaleOutOfRange { .. })
    ));
    assert!(fit_inverse_log(&[(1e-2, 1.0), (1e-3, f64::NAN), (1e-4, 0.0)]).is_err());
    assert!(matches!(fit_inverse_log(&[(1e-2, 1.0), (1e-2, 2.0), (1e-2, 0.0)]), Err(Error::DegenerateFit)));
    assert!(fit_inverse_log_quadratic(&[(1e-2, 1.0), (1e-3, 2.0), (1e-4, 0.0)]).is_err());
}

proptest! {
    #[test]
    fn fit_ignores_point_order(seed in any::<u64>(), c0 in -2.0..2.0f64, c1 in -2.0..2.0f64) {
        let mut pts: Vec<(f64, f64)> = DEFAULT_EPSILONS
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, c0 + c1 / e.ln().abs() + 1e-3 * (i as f64).sin()))
            .collect();
        let a = fit_inverse_log(&pts).unwrap();
        let n = pts.len();
        for i in 0..n {
            let j = (seed.rotate_left(i as u32 * 7) as usize) % n;
            pts.swap(i, j);
        }
        let b = fit_inverse_log(&pts).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn folding_lands_in_the_zone(k in -40.0..40.0f64) {
        let q = fold_quasimomentum(k);
        prop_assert!(q > -PI && q <= PI);
        let turns = (k - q) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn synthetic_gap_width_is_grid_independent(n in 17usize..80) {
        let diagram = sweep(&split_edges(), &linspace(0.0, PI, n), 2).unwrap();
        let gaps = detect_gaps(&diagram, (f64::NEG_INFINITY, f64::INFINITY));
        prop_assert_eq!(gaps.len(), 1);
        // Grid extrema never overshoot the true ones.
        prop_assert!(gaps[0].alpha_l <= 1.0 && gaps[0].alpha_r >= 2.0);
    }
}
