//! Random dispatch instances shared by the integration tests.
#![allow(dead_code)]

use chrono::NaiveDateTime;
use flexpark::dispatch::{Baselines, DispatchParams, Interval, ResponseTarget, TargetId};
use flexpark::load_models::StorageSpec;
use flexpark::LoadProfile;
use rand::seq::IndexedRandom;
use rand::{Rng, RngCore};

pub const QUANTUM: f64 = 10.0;

pub struct Instance {
    pub target: ResponseTarget,
    pub baselines: Baselines,
    pub params: DispatchParams,
}

pub fn start() -> NaiveDateTime {
    "2019-01-15T00:00:00".parse().unwrap()
}

fn random_window(rng: &mut impl RngCore, n: usize) -> Vec<usize> {
    loop {
        let w: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if !w.is_empty() {
            return w;
        }
    }
}

fn target_id(rng: &mut impl RngCore) -> TargetId {
    *TargetId::ALL.choose(rng).unwrap()
}

/// Small instance whose data are multiples of [`QUANTUM`] on hourly steps with
/// lossless storage, so the continuous optimum lies on the oracle's lattice.
pub fn lattice_instance(rng: &mut impl RngCore) -> Instance {
    let n = rng.random_range(1..=6);
    let q = QUANTUM;
    let mult = |rng: &mut dyn RngCore, lo: i32, hi: i32| rng.random_range(lo..=hi) as f64 * q;
    let window = random_window(rng, n);
    let mut demand = vec![0.0; n];
    for &t in &window {
        demand[t] = mult(rng, 0, 12);
    }
    let target = ResponseTarget::new(target_id(rng), window, demand).unwrap();
    let profile = |rng: &mut dyn RngCore| {
        let v: Vec<f64> = (0..n).map(|_| mult(rng, 0, 9)).collect();
        LoadProfile::new(start(), 60.0, v).unwrap()
    };
    let baselines = Baselines {
        heating: profile(rng),
        rotating: profile(rng),
        storage: LoadProfile::constant(start(), 60.0, n, 0.0).unwrap(),
    };
    // SOC moves in steps of q / 80 = 1/8, exact in binary.
    let soc_min = [0.0, 0.125, 0.25][rng.random_range(0..3)];
    let soc_max = [0.75, 0.875, 1.0][rng.random_range(0..3)];
    let k0 = rng.random_range((soc_min * 8.0) as i32..=(soc_max * 8.0) as i32);
    let storage = StorageSpec {
        capacity_kwh: 80.0,
        max_charge_kw: mult(rng, 0, 3),
        max_discharge_kw: -mult(rng, 0, 3),
        soc_min,
        soc_max,
        soc_initial: k0 as f64 / 8.0,
        charge_efficiency: 1.0,
        discharge_efficiency: 1.0,
    };
    let envelope = |rng: &mut dyn RngCore| {
        if rng.random_bool(0.5) {
            return None;
        }
        Some(
            (0..n)
                .map(|_| {
                    let lo = mult(rng, 0, 3);
                    Interval::new(lo, lo + mult(rng, 0, 4))
                })
                .collect(),
        )
    };
    let params = DispatchParams {
        heat_min: 0.0,
        heat_max: mult(rng, 0, 7),
        rot_min: 0.0,
        rot_max: mult(rng, 0, 7),
        storage,
        heat_envelope: envelope(rng),
        rot_envelope: envelope(rng),
    };
    Instance {
        target,
        baselines,
        params,
    }
}

/// Unconstrained random instance: arbitrary magnitudes, lossy storage,
/// 15/30/60-minute steps and up to two days.
pub fn general_instance(rng: &mut impl RngCore) -> Instance {
    let step = *[15.0, 30.0, 60.0].choose(rng).unwrap();
    let n = rng.random_range(1..=48);
    let window = random_window(rng, n);
    let mut demand = vec![0.0; n];
    for &t in &window {
        demand[t] = if rng.random_bool(0.1) {
            0.0
        } else {
            rng.random_range(0.0..8000.0)
        };
    }
    let target = ResponseTarget::new(target_id(rng), window, demand).unwrap();
    let profile = |rng: &mut dyn RngCore, hi: f64| {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..hi)).collect();
        LoadProfile::new(start(), step, v).unwrap()
    };
    let baselines = Baselines {
        heating: profile(rng, 6000.0),
        rotating: profile(rng, 5000.0),
        storage: LoadProfile::constant(start(), step, n, 0.0).unwrap(),
    };
    let soc_min = rng.random_range(0.0..0.4);
    let soc_max = rng.random_range(soc_min + 0.1..=1.0);
    let storage = StorageSpec {
        capacity_kwh: rng.random_range(500.0..10000.0),
        max_charge_kw: rng.random_range(0.0..2000.0),
        max_discharge_kw: -rng.random_range(0.0..2000.0),
        soc_min,
        soc_max,
        soc_initial: rng.random_range(soc_min..=soc_max),
        charge_efficiency: rng.random_range(0.8..=1.0),
        discharge_efficiency: rng.random_range(0.8..=1.0),
    };
    let envelope = |rng: &mut dyn RngCore| {
        if rng.random_bool(0.6) {
            return None;
        }
        Some(
            (0..n)
                .map(|_| {
                    let lo = rng.random_range(0.0..1500.0);
                    Interval::new(lo, lo + rng.random_range(0.0..4000.0))
                })
                .collect(),
        )
    };
    let params = DispatchParams {
        heat_min: 0.0,
        heat_max: rng.random_range(0.0..6000.0),
        rot_min: 0.0,
        rot_max: rng.random_range(0.0..5000.0),
        storage,
        heat_envelope: envelope(rng),
        rot_envelope: envelope(rng),
    };
    Instance {
        target,
        baselines,
        params,
    }
}
