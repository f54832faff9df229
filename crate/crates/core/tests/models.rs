use approx::assert_relative_eq;
use flexpark::load_models::{
    battery_terminal_voltage, eaf_power, furnace_profile, gate_power, heat_load_required,
    identify_battery_params, indoor_temp_step, rolling_line_power, rolling_profile, soc_step,
    BatteryElectricalState, BuildingThermalSpec, FurnaceCycleSpec, ModelError, RollingScheduleSpec,
    StorageSpec,
};
use proptest::prelude::*;

fn schedule(offsets: Vec<f64>, fin: Vec<f64>, rough: usize, mills: usize) -> RollingScheduleSpec {
    RollingScheduleSpec {
        pulse_power: 1200.0,
        pulse_width: 1.5,
        inter_pass_gap: 0.25,
        rough_pass_count: rough,
        finishing_mill_count: mills,
        rough_start: 3.0,
        finishing_start: 20.0,
        billet_count: offsets.len(),
        rough_offsets: offsets,
        finishing_offsets: fin,
    }
}

fn offsets(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..15.0f64, n).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        if let Some(first) = v.first_mut() {
            *first = 0.0;
        }
        v.sort_by(f64::total_cmp);
        v
    })
}

proptest! {
    #[test]
    fn rolling_power_is_sum_of_gates(
        (ro, fo) in (0usize..5).prop_flat_map(|n| (offsets(n), offsets(n))),
        rough in (0usize..4).prop_map(|k| 2 * k + 1),
        mills in 0usize..8,
        t in -5.0..80.0f64,
    ) {
        let spec = schedule(ro.clone(), fo.clone(), rough, mills);
        let mut expected = 0.0;
        for o in &ro {
            for k in 0..rough {
                expected += gate_power(t, 3.0 + o + k as f64 * 1.75, 1.5, 1200.0).unwrap();
            }
        }
        for o in &fo {
            for k in 0..mills {
                expected += gate_power(t, 20.0 + o + k as f64 * 1.75, 1.5, 1200.0).unwrap();
            }
        }
        prop_assert_eq!(rolling_line_power(t, &spec).unwrap(), expected);
    }

    #[test]
    fn thermal_round_trip(
        t_in in 18.0..24.0f64,
        t_out in -20.0..35.0f64,
        q in -10.0..10.0f64,
        r in 0.5..10.0f64,
        tau in 0.5..20.0f64,
        dt in 0.05..3.0f64,
    ) {
        let spec = BuildingThermalSpec {
            thermal_resistance: r,
            time_constant: tau,
            air_heat_capacity: 1.0,
            t_in_min: -100.0,
            t_in_max: 100.0,
        };
        let next = indoor_temp_step(t_in, t_out, q, dt, &spec).unwrap();
        let back = heat_load_required(next, t_in, t_out, dt, &spec).unwrap();
        prop_assert!((back - q).abs() <= 1e-9 * q.abs().max(1.0));
    }

    #[test]
    fn soc_step_energy_ledger(
        soc in 0.3..0.95f64,
        p in -1000.0..1000.0f64,
        dt in 0.05..1.0f64,
    ) {
        let spec = StorageSpec {
            charge_efficiency: 0.93,
            discharge_efficiency: 0.91,
            ..StorageSpec::default()
        };
        let (c, d) = if p >= 0.0 { (p, 0.0) } else { (0.0, p) };
        match soc_step(soc, c, d, dt, &spec) {
            Ok(next) => {
                let expected = soc + (0.93 * c + d / 0.91) * dt / 7500.0;
                prop_assert!((next - expected).abs() <= 1e-12);
                prop_assert!((0.3 - 1e-9..=0.95 + 1e-9).contains(&next));
            }
            Err(ModelError::SocBoundViolation { .. }) => {
                let expected = soc + (0.93 * c + d / 0.91) * dt / 7500.0;
                prop_assert!(!(0.3..=0.95).contains(&expected));
            }
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }
}

#[test]
fn simultaneous_charge_and_discharge_rejected() {
    let r = soc_step(0.5, 10.0, -10.0, 1.0, &StorageSpec::default());
    assert!(matches!(
        r,
        Err(ModelError::SimultaneousChargeDischarge { .. })
    ));
}

#[test]
fn furnace_integral_matches_trapezoid() {
    let spec = FurnaceCycleSpec::flat(0.0, 3000.0, 240.0, 120.0, 20_000.0);
    let n = 300_000;
    let h = 3000.0 / n as f64;
    let integral: f64 = (0..n)
        .map(|i| eaf_power((i as f64 + 0.5) * h, &spec).unwrap() * h)
        .sum();
    let exact = 20_000.0 * (3000.0 - 240.0 - 120.0 + 0.5 * (240.0 + 120.0));
    assert!((integral - exact).abs() / exact < 1e-3);
}

#[test]
fn furnace_plateau_stays_in_band() {
    let spec = FurnaceCycleSpec::seeded(0.0, 3600.0, 300.0, 200.0, 20_000.0, 0.05, 60.0, 9);
    for i in 0..3600 {
        let t = i as f64 + 0.5;
        let p = eaf_power(t, &spec).unwrap();
        if t > 300.0 && t <= 3400.0 {
            assert!((19_000.0..=21_000.0).contains(&p), "{p} at {t}");
        } else {
            assert!((0.0..=20_000.0).contains(&p));
        }
    }
}

#[test]
fn profiles_average_the_continuous_models() {
    let start = "2019-01-15T00:00:00".parse().unwrap();
    let single = RollingScheduleSpec::uniform(600.0, 2.0, 0.0, 1, 0, 0.0, 0.0, 1, 0.0);
    let p = rolling_profile(&single, start, 10.0, 3, 1000).unwrap();
    // A 2-minute pulse inside a 10-minute step averages to a fifth of its power.
    assert_relative_eq!(p.values()[0], 120.0, max_relative = 1e-9);
    assert_eq!(p.values()[1], 0.0);
    let cycle = FurnaceCycleSpec::flat(0.0, 3600.0, 600.0, 600.0, 1000.0);
    let f = furnace_profile(&[cycle], start, 60.0, 2, 3600).unwrap();
    assert_relative_eq!(
        f.values()[0],
        1000.0 * (2400.0 + 600.0) / 3600.0,
        max_relative = 1e-6
    );
    assert_eq!(f.values()[1], 0.0);
}

#[test]
fn battery_reference_voltages() {
    let s = BatteryElectricalState::rested(0.5, 3.7, 0.02, 0.05, 1500.0);
    assert_eq!(battery_terminal_voltage(&s, 0.0, 10.0).unwrap(), 3.7);
    let v = battery_terminal_voltage(&s, 2.0, 1e9).unwrap();
    assert_relative_eq!(v, 3.52, max_relative = 1e-12);
    let id = identify_battery_params(0.1, 0.04, 2.0, 30.0, 3.7, 3.56).unwrap();
    assert_relative_eq!(id.ohmic_resistance, 0.05, max_relative = 1e-12);
    assert_relative_eq!(id.polarization_resistance, 0.02, max_relative = 1e-12);
    assert_relative_eq!(id.polarization_capacitance, 1500.0, max_relative = 1e-12);
}
