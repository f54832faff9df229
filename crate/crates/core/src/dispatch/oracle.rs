//! Exhaustive dispatch over a discretized power lattice, for verifying the
//! greedy scheduler on small instances.

use std::collections::HashMap;

use super::types::{
    Baselines, DispatchParams, DispatchResult, FlexibleCase, LoadKind, ResponseTarget,
};
use super::{feasible_envelope, unresponsiveness, DispatchError};
use crate::load_models::SOC_TOLERANCE;

pub const ORACLE_MAX_STEPS: usize = 6;
pub const ORACLE_MAX_MEMBERS: usize = 3;
pub const ORACLE_MAX_LEVELS: usize = 8;

/// Absolute slack when comparing powers against lattice bounds (kW).
const POWER_TOL: f64 = 1e-9;

/// Multiples of `q` inside `[lo, hi]`.
fn multiples(lo: f64, hi: f64, q: f64) -> Vec<f64> {
    let k0 = (lo / q - 1e-9).ceil() as i64;
    let k1 = (hi / q + 1e-9).floor() as i64;
    (k0..=k1).map(|k| k as f64 * q).collect()
}

type Choice = (f64, f64, f64);
/// Best delivered energy from a state, with the choices that reach it.
type Best = Option<(f64, Vec<Choice>)>;

struct Search<'a> {
    levels: Vec<[Vec<f64>; 3]>,
    demand: &'a [f64],
    params: &'a DispatchParams,
    dt: f64,
    memo: HashMap<(usize, i64), Best>,
}

impl Search<'_> {
    fn soc_key(soc: f64) -> i64 {
        (soc * 1e9).round() as i64
    }

    /// Best (delivered energy, choices) from step `t` at `soc`.
    fn best(&mut self, t: usize, soc: f64) -> Best {
        let spec = &self.params.storage;
        if t == self.demand.len() {
            return ((soc - spec.soc_initial).abs() <= SOC_TOLERANCE).then(|| (0.0, Vec::new()));
        }
        let key = (t, Self::soc_key(soc));
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let [heat, rot, sto] = self.levels[t].clone();
        let mut best: Best = None;
        for &h in &heat {
            for &r in &rot {
                for &s in &sto {
                    let delivered = h + r + (-s).max(0.0);
                    if delivered > self.demand[t] + POWER_TOL {
                        continue;
                    }
                    let next = soc
                        + spec.stored_energy_delta(s.max(0.0), s.min(0.0), self.dt)
                            / spec.capacity_kwh;
                    if next < spec.soc_min - SOC_TOLERANCE || next > spec.soc_max + SOC_TOLERANCE {
                        continue;
                    }
                    if let Some((rest, mut path)) = self.best(t + 1, next) {
                        let total = delivered * self.dt + rest;
                        if best.as_ref().is_none_or(|(b, _)| total > *b) {
                            path.insert(0, (h, r, s));
                            best = Some((total, path));
                        }
                    }
                }
            }
        }
        self.memo.insert(key, best.clone());
        best
    }
}

/// Exhaustive search over response levels that are multiples of `quantum` kW.
///
/// Curtailable loads choose 0 or a multiple of `quantum` in their envelope;
/// storage chooses a multiple of `quantum` within its power limits, charging
/// only outside the response window and discharging only inside it. Every
/// step may offer at most [`ORACLE_MAX_LEVELS`] levels per load.
pub fn brute_force_dispatch(
    case: FlexibleCase,
    target: &ResponseTarget,
    baselines: &Baselines,
    params: &DispatchParams,
    quantum: f64,
) -> Result<DispatchResult, DispatchError> {
    params.validate()?;
    baselines.validate_for(target)?;
    if !(quantum.is_finite() && quantum > 0.0) {
        return Err(DispatchError::InvalidParams(format!(
            "power grid resolution must be > 0, got {quantum}"
        )));
    }
    let n = target.horizon();
    if n > ORACLE_MAX_STEPS {
        return Err(DispatchError::SizeLimit(format!(
            "{n} timesteps (limit {ORACLE_MAX_STEPS})"
        )));
    }
    if case.len() > ORACLE_MAX_MEMBERS {
        return Err(DispatchError::SizeLimit(format!(
            "{} members (limit {ORACLE_MAX_MEMBERS})",
            case.len()
        )));
    }
    let spec = &params.storage;
    let mut levels = Vec::with_capacity(n);
    for t in 0..n {
        let mut per_kind: [Vec<f64>; 3] = [vec![0.0], vec![0.0], vec![0.0]];
        for (slot, kind) in LoadKind::ALL.into_iter().enumerate() {
            if !case.contains(kind) {
                continue;
            }
            let set = if kind == LoadKind::Storage {
                let all = multiples(spec.max_discharge_kw, spec.max_charge_kw, quantum);
                if all.len() > ORACLE_MAX_LEVELS {
                    return Err(DispatchError::SizeLimit(format!(
                        "storage has {} power levels (limit {ORACLE_MAX_LEVELS})",
                        all.len()
                    )));
                }
                let inside = target.in_window(t);
                all.into_iter()
                    .filter(|&p| if inside { p <= 0.0 } else { p >= 0.0 })
                    .collect()
            } else {
                let env = feasible_envelope(kind, t, params, baselines)?;
                let mut set = vec![0.0];
                set.extend(
                    multiples(env.lo, env.hi, quantum)
                        .into_iter()
                        .filter(|&p| p > 0.0),
                );
                if set.len() > ORACLE_MAX_LEVELS {
                    return Err(DispatchError::SizeLimit(format!(
                        "{kind:?} has {} levels at step {t} (limit {ORACLE_MAX_LEVELS})",
                        set.len()
                    )));
                }
                set
            };
            per_kind[slot] = set;
        }
        levels.push(per_kind);
    }
    let dt = baselines.step_hours();
    let mut search = Search {
        levels,
        demand: target.demand(),
        params,
        dt,
        memo: HashMap::new(),
    };
    let (_, path) = search.best(0, spec.soc_initial).unwrap_or_else(|| {
        // Idle is always feasible when the initial SOC is within bounds.
        (0.0, vec![(0.0, 0.0, 0.0); n])
    });

    let heating: Vec<f64> = path.iter().map(|c| c.0).collect();
    let rotating: Vec<f64> = path.iter().map(|c| c.1).collect();
    let storage_power: Vec<f64> = path.iter().map(|c| c.2).collect();
    let mut soc = vec![spec.soc_initial];
    for &p in &storage_power {
        let last = *soc.last().expect("nonempty");
        soc.push(last + spec.stored_energy_delta(p.max(0.0), p.min(0.0), dt) / spec.capacity_kwh);
    }
    let f_pre: f64 = target.demand().iter().map(|d| d * dt).sum();
    let f_act: f64 = (0..n)
        .map(|t| (heating[t] + rotating[t] + (-storage_power[t]).max(0.0)) * dt)
        .sum();
    let gap = soc[n] - soc[0];
    Ok(DispatchResult {
        case,
        target: target.id(),
        step_hours: dt,
        demand: target.demand().to_vec(),
        heating,
        rotating,
        storage_power,
        soc,
        f_pre,
        f_act,
        unresponsiveness: unresponsiveness(f_pre, f_act)?,
        terminal_soc_gap: gap,
        warnings: Vec::new(),
    })
}
