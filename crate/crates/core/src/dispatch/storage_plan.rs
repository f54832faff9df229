//! Charge/discharge planning for the storage unit against a residual request.
//!
//! Discharge happens only inside the response window, charging only outside it.
//! A forward pass discharges as much as the residual and SOC headroom allow and
//! charges eagerly elsewhere. If the day would end below the initial SOC, the
//! latest discharges are shrunk and the pass repeated; if it ends above, the
//! latest charges are trimmed without pushing any later SOC under its minimum.

use crate::load_models::StorageSpec;

/// Terminal mismatch below this (SOC fraction) is treated as met while planning.
const PLAN_TOL: f64 = 1e-12;

/// Powers left below this after a reduction are rounding residue (kW).
const SNAP_KW: f64 = 1e-9;

fn reduce(value: f64, by: f64) -> f64 {
    let left = value - by;
    if left < SNAP_KW {
        0.0
    } else {
        left
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct StoragePlan {
    /// Charging power per step (kW, ≥ 0).
    pub charge: Vec<f64>,
    /// Discharge magnitude per step (kW, ≥ 0).
    pub discharge: Vec<f64>,
    /// SOC at each step boundary (`len + 1` entries).
    pub soc: Vec<f64>,
    pub warnings: Vec<String>,
}

impl StoragePlan {
    pub fn idle(len: usize, spec: &StorageSpec) -> Self {
        Self {
            charge: vec![0.0; len],
            discharge: vec![0.0; len],
            soc: vec![spec.soc_initial; len + 1],
            warnings: Vec::new(),
        }
    }

    /// Signed power: positive charging, negative discharging.
    pub fn signed_power(&self) -> Vec<f64> {
        self.charge
            .iter()
            .zip(&self.discharge)
            .map(|(&c, &d)| if d > 0.0 { -d } else { c })
            .collect()
    }
}

/// SOC trajectory for given per-step powers.
pub(crate) fn soc_trajectory(
    charge: &[f64],
    discharge: &[f64],
    spec: &StorageSpec,
    dt: f64,
) -> Vec<f64> {
    let mut soc = Vec::with_capacity(charge.len() + 1);
    let mut s = spec.soc_initial;
    soc.push(s);
    for (&c, &d) in charge.iter().zip(discharge) {
        s += spec.stored_energy_delta(c, -d, dt) / spec.capacity_kwh;
        soc.push(s);
    }
    soc
}

fn forward_pass(
    caps: &[f64],
    window: &[bool],
    spec: &StorageSpec,
    dt: f64,
) -> (Vec<f64>, Vec<f64>) {
    let e = spec.capacity_kwh;
    let mut charge = vec![0.0; caps.len()];
    let mut discharge = vec![0.0; caps.len()];
    let mut s = spec.soc_initial;
    for t in 0..caps.len() {
        if window[t] {
            let room = (s - spec.soc_min).max(0.0) * spec.discharge_efficiency * e / dt;
            discharge[t] = caps[t].min(room);
        } else {
            let room = (spec.soc_max - s).max(0.0) * e / (spec.charge_efficiency * dt);
            charge[t] = spec.max_charge_kw.min(room);
        }
        s += spec.stored_energy_delta(charge[t], -discharge[t], dt) / e;
    }
    (charge, discharge)
}

/// Plan storage against `residual` (kW still requested per step).
pub(crate) fn plan_storage(
    residual: &[f64],
    window: &[bool],
    spec: &StorageSpec,
    dt: f64,
) -> StoragePlan {
    let n = residual.len();
    let e = spec.capacity_kwh;
    let s0 = spec.soc_initial;
    let mut caps: Vec<f64> = (0..n)
        .map(|t| {
            if window[t] {
                residual[t].max(0.0).min(-spec.max_discharge_kw)
            } else {
                0.0
            }
        })
        .collect();

    let max_rounds = 4 * n + 8;
    let mut settled = None;
    for _ in 0..max_rounds {
        let (charge, discharge) = forward_pass(&caps, window, spec, dt);
        let soc = soc_trajectory(&charge, &discharge, spec, dt);
        let deficit = s0 - soc[n];
        if deficit <= PLAN_TOL {
            settled = Some((charge, discharge));
            break;
        }
        caps = discharge;
        let mut need = deficit * e * spec.discharge_efficiency / dt;
        for t in (0..n).rev() {
            if need <= 0.0 {
                break;
            }
            let cut = caps[t].min(need);
            caps[t] = reduce(caps[t], cut);
            need -= cut;
        }
    }
    let mut warnings = Vec::new();
    let (mut charge, discharge) = settled.unwrap_or_else(|| {
        warnings.push("storage plan did not converge; discharge withheld".to_string());
        forward_pass(&vec![0.0; n], window, spec, dt)
    });

    let mut soc = soc_trajectory(&charge, &discharge, spec, dt);
    let mut excess = soc[n] - s0;
    for t in (0..n).rev() {
        if excess <= PLAN_TOL {
            break;
        }
        if charge[t] <= 0.0 {
            continue;
        }
        let slack = soc[t + 1..]
            .iter()
            .map(|s| s - spec.soc_min)
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        let cut = (charge[t] * spec.charge_efficiency * dt / e)
            .min(slack)
            .min(excess);
        if cut <= 0.0 {
            continue;
        }
        charge[t] = reduce(charge[t], cut * e / (spec.charge_efficiency * dt));
        soc = soc_trajectory(&charge, &discharge, spec, dt);
        excess = soc[n] - s0;
    }
    StoragePlan {
        charge,
        discharge,
        soc,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> StorageSpec {
        StorageSpec::default()
    }

    #[test]
    fn idle_when_nothing_requested() {
        let p = plan_storage(&[0.0; 4], &[true, true, false, false], &spec(), 1.0);
        assert!(p.discharge.iter().all(|&d| d == 0.0));
        assert!(p.charge.iter().all(|&c| c == 0.0));
        assert!((p.soc[4] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn night_window_after_daytime_charging() {
        // 20 charging hours, then 4 evening hours at 1000 kW.
        let mut residual = vec![0.0; 24];
        let mut window = vec![false; 24];
        for t in 20..24 {
            residual[t] = 1000.0;
            window[t] = true;
        }
        let p = plan_storage(&residual, &window, &spec(), 1.0);
        assert_eq!(&p.discharge[20..], &[1000.0; 4]);
        assert!((p.soc[24] - 0.4).abs() < 1e-12);
        let charged: f64 = p.charge.iter().sum();
        assert!((charged - 4000.0).abs() < 1e-9);
    }

    #[test]
    fn early_window_limited_by_initial_headroom() {
        let mut residual = vec![0.0; 24];
        let mut window = vec![false; 24];
        for t in 0..4 {
            residual[t] = 1000.0;
            window[t] = true;
        }
        let p = plan_storage(&residual, &window, &spec(), 1.0);
        // (0.4 - 0.3) * 7500 kWh available before any charging.
        let out: f64 = p.discharge.iter().sum();
        assert!((out - 750.0).abs() < 1e-9);
        assert!((p.soc[24] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn no_charging_window_means_no_net_discharge() {
        let p = plan_storage(&[500.0; 6], &[true; 6], &spec(), 1.0);
        assert!(p.discharge.iter().all(|&d| d == 0.0));
        assert_eq!(p.soc[6], 0.4);
    }

    #[test]
    fn discharge_before_and_after_charging() {
        // Window, free, window: late discharge is limited by what the free step restores.
        let s = StorageSpec {
            capacity_kwh: 100.0,
            max_charge_kw: 10.0,
            max_discharge_kw: -50.0,
            soc_min: 0.0,
            soc_max: 1.0,
            soc_initial: 0.2,
            charge_efficiency: 1.0,
            discharge_efficiency: 1.0,
        };
        let p = plan_storage(&[30.0, 0.0, 30.0], &[true, false, true], &s, 1.0);
        let out: f64 = p.discharge.iter().sum();
        assert!((out - 10.0).abs() < 1e-9, "{p:?}");
        assert!((p.soc[3] - 0.2).abs() < 1e-12);
        assert!(p.soc.iter().all(|x| (-1e-12..=1.0 + 1e-12).contains(x)));
    }
}
