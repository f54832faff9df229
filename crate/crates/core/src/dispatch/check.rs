//! Independent verification of a dispatch result against all constraints.

use super::types::{Baselines, DispatchParams, DispatchResult, LoadKind, ResponseTarget};
use super::{feasible_envelope, DispatchError};
use crate::load_models::{soc_step, SOC_TOLERANCE};

const POWER_TOL: f64 = 1e-9;
const ENERGY_REL_TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= ENERGY_REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// List every constraint the result violates; empty means feasible.
///
/// Checks per-load envelopes, storage window rules and power limits, the SOC
/// recursion and bounds, the terminal SOC (unless the result carries a warning
/// explaining the gap), delivered ≤ requested, and the energy aggregates.
pub fn check_dispatch(
    result: &DispatchResult,
    target: &ResponseTarget,
    baselines: &Baselines,
    params: &DispatchParams,
) -> Result<Vec<String>, DispatchError> {
    let n = target.horizon();
    let spec = &params.storage;
    let mut v = Vec::new();
    let lens = [
        result.demand.len(),
        result.heating.len(),
        result.rotating.len(),
        result.storage_power.len(),
        result.soc.len().saturating_sub(1),
    ];
    if lens.iter().any(|&l| l != n) || result.soc.is_empty() {
        v.push(format!("series lengths {lens:?} do not match horizon {n}"));
        return Ok(v);
    }
    for t in 0..n {
        for (kind, series) in [
            (LoadKind::Heating, &result.heating),
            (LoadKind::Rotating, &result.rotating),
        ] {
            let p = series[t];
            if !result.case.contains(kind) {
                if p != 0.0 {
                    v.push(format!(
                        "step {t}: {kind:?} responds {p} kW outside the case"
                    ));
                }
                continue;
            }
            let env = feasible_envelope(kind, t, params, baselines)?;
            if p != 0.0 && !env.contains(p, POWER_TOL) {
                v.push(format!(
                    "step {t}: {kind:?} response {p} kW outside [{}, {}]",
                    env.lo, env.hi
                ));
            }
        }
        let s = result.storage_power[t];
        if !result.case.contains(LoadKind::Storage) && s != 0.0 {
            v.push(format!("step {t}: storage active outside the case"));
        }
        if s > 0.0 && target.in_window(t) {
            v.push(format!(
                "step {t}: storage charges inside the response window"
            ));
        }
        if s < 0.0 && !target.in_window(t) {
            v.push(format!(
                "step {t}: storage discharges outside the response window"
            ));
        }
        match soc_step(
            result.soc[t],
            s.max(0.0),
            s.min(0.0),
            result.step_hours,
            spec,
        ) {
            Ok(next) if (next - result.soc[t + 1]).abs() <= SOC_TOLERANCE => {}
            Ok(next) => v.push(format!(
                "step {t}: SOC {} does not follow from {} (expected {next})",
                result.soc[t + 1],
                result.soc[t]
            )),
            Err(e) => v.push(format!("step {t}: {e}")),
        }
        let delivered = result.delivered(t);
        if delivered > result.demand[t] + POWER_TOL * result.demand[t].max(1.0) {
            v.push(format!(
                "step {t}: delivered {delivered} kW exceeds requested {}",
                result.demand[t]
            ));
        }
        if result.demand[t] != target.demand()[t] {
            v.push(format!("step {t}: demand differs from the target"));
        }
    }
    if (result.soc[0] - spec.soc_initial).abs() > SOC_TOLERANCE {
        v.push(format!(
            "initial SOC {} is not {}",
            result.soc[0], spec.soc_initial
        ));
    }
    if let Some(s) = result
        .soc
        .iter()
        .find(|&&s| s < spec.soc_min - SOC_TOLERANCE || s > spec.soc_max + SOC_TOLERANCE)
    {
        v.push(format!(
            "SOC {s} outside [{}, {}]",
            spec.soc_min, spec.soc_max
        ));
    }
    let gap = result.soc[n] - result.soc[0];
    if gap.abs() > SOC_TOLERANCE && result.warnings.is_empty() {
        v.push(format!(
            "terminal SOC gap {gap:.3e} reported without a warning"
        ));
    }
    if (gap - result.terminal_soc_gap).abs() > SOC_TOLERANCE {
        v.push("terminal_soc_gap does not match the SOC trajectory".into());
    }
    let dt = result.step_hours;
    let f_pre: f64 = result.demand.iter().map(|d| d * dt).sum();
    let f_act: f64 = (0..n).map(|t| result.delivered(t) * dt).sum();
    if !close(f_pre, result.f_pre) {
        v.push(format!(
            "f_pre {} does not match the demand ({f_pre})",
            result.f_pre
        ));
    }
    if !close(f_act, result.f_act) {
        v.push(format!(
            "f_act {} does not match the responses ({f_act})",
            result.f_act
        ));
    }
    if result.unresponsiveness < 0.0 || !close(result.unresponsiveness + result.f_act, result.f_pre)
    {
        v.push(format!(
            "unresponsiveness {} is not f_pre - f_act",
            result.unresponsiveness
        ));
    }
    Ok(v)
}
