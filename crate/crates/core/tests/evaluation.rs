use flexpark::dispatch::{schedule_dispatch, DispatchParams, FlexibleCase};
use flexpark::evaluation::{
    mad, peak_valley_difference, r_square, rmsd, rmse_contribution, unresponsiveness_index,
};
use flexpark::park::{ParkSpec, DEMO_SEED};
use proptest::prelude::*;

fn pair(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-1e4..1e4f64, n),
        prop::collection::vec(-1e4..1e4f64, n),
    )
}

proptest! {
    #[test]
    fn mad_never_exceeds_rmsd((a, b) in (1usize..50).prop_flat_map(pair)) {
        prop_assert!(mad(&a, &b).unwrap() <= rmsd(&a, &b).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn contribution_symmetric_and_homogeneous(
        (a, b) in (1usize..50).prop_flat_map(pair),
        c in -10.0..10.0f64,
    ) {
        let e = rmse_contribution(&a, &b).unwrap();
        prop_assert_eq!(e, rmse_contribution(&b, &a).unwrap());
        let ca: Vec<f64> = a.iter().map(|v| c * v).collect();
        let cb: Vec<f64> = b.iter().map(|v| c * v).collect();
        let scaled = rmse_contribution(&ca, &cb).unwrap();
        prop_assert!((scaled - c.abs() * e).abs() <= 1e-9 * (1.0 + c.abs() * e));
    }

    #[test]
    fn r_square_affine_invariant(
        (y, y_hat) in (3usize..40).prop_flat_map(pair),
        scale in prop_oneof![-50.0..-0.1f64, 0.1..50.0f64],
        shift in -1e3..1e3f64,
    ) {
        let base = r_square(&y, &y_hat).unwrap();
        let ty: Vec<f64> = y.iter().map(|v| scale * v + shift).collect();
        let th: Vec<f64> = y_hat.iter().map(|v| scale * v + shift).collect();
        let moved = r_square(&ty, &th).unwrap();
        prop_assert!((moved - base).abs() <= 1e-6 * (1.0 + base.abs()));
    }

    #[test]
    fn constant_offset_gives_equal_mad_and_rmsd(
        a in prop::collection::vec(-1e3..1e3f64, 1..30),
        d in -100.0..100.0f64,
    ) {
        let b: Vec<f64> = a.iter().map(|v| v + d).collect();
        let (m, r) = (mad(&a, &b).unwrap(), rmsd(&a, &b).unwrap());
        prop_assert!((m - r).abs() <= 1e-9 * (1.0 + r));
    }
}

#[test]
fn contribution_of_a_dispatch_equals_rmsd() {
    let spec = ParkSpec::default();
    let b = spec.baselines(DEMO_SEED).unwrap();
    let targets = spec.response_targets().unwrap();
    let r = schedule_dispatch(
        FlexibleCase::HRS,
        &targets[0],
        &b,
        &DispatchParams::default(),
    )
    .unwrap();
    let (pre, post) = unresponsiveness_index(&r);
    assert_eq!(
        rmse_contribution(&pre, &post).unwrap(),
        rmsd(&pre, &post).unwrap()
    );
    assert!(rmse_contribution(&pre, &post).unwrap() > 0.0);
}

#[test]
fn peak_valley_of_demo_rolling_line() {
    let b = ParkSpec::default().baselines(DEMO_SEED).unwrap();
    let pv = peak_valley_difference(&b.rotating);
    assert!((pv - (3000.0 - 1663.0)).abs() < 1.0, "{pv}");
}
