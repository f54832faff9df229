//! Demand-response dispatch: incentive cost, per-step response envelopes, the
//! unresponsiveness-minimizing scheduler and an exhaustive oracle for small instances.

mod check;
mod greedy;
mod oracle;
mod storage_plan;
mod types;

pub use check::check_dispatch;
pub use greedy::{schedule_all_cases, schedule_dispatch};
pub use oracle::{brute_force_dispatch, ORACLE_MAX_LEVELS, ORACLE_MAX_MEMBERS, ORACLE_MAX_STEPS};
pub use types::{
    Baselines, DispatchParams, DispatchResult, DrCostParams, FlexibleCase, Interval, LoadKind,
    ResponseTarget, TargetId,
};

use thiserror::Error;

use crate::load_models::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DispatchError {
    #[error("response power {power} kW outside the capability range [{p_min}, {p_max}]")]
    CapabilityBound { power: f64, p_min: f64, p_max: f64 },
    #[error("actual response {act} exceeds expected response {pre}")]
    Accounting { pre: f64, act: f64 },
    #[error("invalid dispatch parameters: {0}")]
    InvalidParams(String),
    #[error("invalid response target: {0}")]
    InvalidTarget(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("timestep {t} outside a horizon of {len} steps")]
    StepOutOfRange { t: usize, len: usize },
    #[error("instance too large for exhaustive search: {0}")]
    SizeLimit(String),
    #[error("unknown flexible case `{0}` (expected one of H-R-S, H-R, H-S, R-S, S, R, H)")]
    UnknownCase(String),
    #[error("unknown response target `{0}` (expected only_night, all_day or only_daytime)")]
    UnknownTarget(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Incentive compensation paid for a response of `power` kW.
pub fn dr_cost(power: f64, params: &DrCostParams) -> Result<f64, DispatchError> {
    if !(params.p_min <= params.p_max) || !(params.a >= 0.0) || !params.b.is_finite() {
        return Err(DispatchError::InvalidParams(format!(
            "cost parameters need a >= 0 and p_min <= p_max, got a={}, p_min={}, p_max={}",
            params.a, params.p_min, params.p_max
        )));
    }
    if !(power >= params.p_min && power <= params.p_max) {
        return Err(DispatchError::CapabilityBound {
            power,
            p_min: params.p_min,
            p_max: params.p_max,
        });
    }
    Ok(params.a * power * power + params.b * power)
}

/// Relative slack under which `act > pre` is treated as float rounding.
const ACCOUNTING_SLACK: f64 = 1e-12;

/// Unresponsiveness `pre - act` (kWh).
///
/// Overshoot within float rounding of `pre` is reported as zero.
pub fn unresponsiveness(pre: f64, act: f64) -> Result<f64, DispatchError> {
    if !(pre >= 0.0 && act >= 0.0 && pre.is_finite() && act.is_finite()) {
        return Err(DispatchError::Accounting { pre, act });
    }
    if act > pre + ACCOUNTING_SLACK * pre.max(1.0) {
        return Err(DispatchError::Accounting { pre, act });
    }
    Ok((pre - act).max(0.0))
}

/// Admissible response interval of `kind` at step `t` (kW).
///
/// Curtailable loads: the configured envelope, intersected with the global
/// bounds and with `[0, baseline(t)]`; an empty intersection gives `[0, 0]`.
/// Storage: `[0, max discharge power]`; SOC feasibility is enforced by the scheduler.
pub fn feasible_envelope(
    kind: LoadKind,
    t: usize,
    params: &DispatchParams,
    baselines: &Baselines,
) -> Result<Interval, DispatchError> {
    let profile = baselines.get(kind);
    let len = profile.len();
    let Some(&base) = profile.values().get(t) else {
        return Err(DispatchError::StepOutOfRange { t, len });
    };
    let (gmin, gmax, envelope) = params.bounds(kind);
    if kind == LoadKind::Storage {
        return Ok(Interval::new(0.0, gmax.max(0.0)));
    }
    let (mut lo, mut hi) = (gmin.max(0.0), gmax.min(base));
    if let Some(env) = envelope {
        let iv = env
            .get(t)
            .ok_or(DispatchError::StepOutOfRange { t, len: env.len() })?;
        lo = lo.max(iv.lo);
        hi = hi.min(iv.hi);
    }
    Ok(if lo <= hi {
        Interval::new(lo, hi)
    } else {
        Interval::ZERO
    })
}
