//! Greedy dispatch with storage lookahead.
//!
//! For a case `C` the scheduler builds several candidate plans and keeps the one
//! with the smallest unresponsiveness:
//!
//! * the joint plan: per-step curtailment over the curtailable members of `C`
//!   (merit order heating, rotating), then storage planned on what remains;
//! * for each member `m` with `C \ {m}` nonempty, the plan of `C \ {m}` extended
//!   with `m`, which only adds response on top of the sub-plan.
//!
//! Because the extended candidates never deliver less than their sub-plans, a
//! case is never worse than any of its sub-cases.

use std::collections::BTreeMap;

use super::storage_plan::{plan_storage, StoragePlan};
use super::types::{
    Baselines, DispatchParams, DispatchResult, FlexibleCase, Interval, LoadKind, ResponseTarget,
};
use super::{feasible_envelope, unresponsiveness, DispatchError};

struct Context<'a> {
    target: &'a ResponseTarget,
    params: &'a DispatchParams,
    window: Vec<bool>,
    heat_env: Vec<Interval>,
    rot_env: Vec<Interval>,
    dt: f64,
    f_pre: f64,
}

impl<'a> Context<'a> {
    fn new(
        target: &'a ResponseTarget,
        baselines: &Baselines,
        params: &'a DispatchParams,
    ) -> Result<Self, DispatchError> {
        params.validate()?;
        baselines.validate_for(target)?;
        let n = target.horizon();
        let env = |kind| {
            (0..n)
                .map(|t| feasible_envelope(kind, t, params, baselines))
                .collect::<Result<Vec<_>, _>>()
        };
        let dt = baselines.step_hours();
        Ok(Self {
            target,
            params,
            window: target.window_mask(),
            heat_env: env(LoadKind::Heating)?,
            rot_env: env(LoadKind::Rotating)?,
            dt,
            f_pre: energy(target.demand(), dt),
        })
    }

    fn horizon(&self) -> usize {
        self.target.horizon()
    }

    fn envelope(&self, kind: LoadKind) -> &[Interval] {
        match kind {
            LoadKind::Heating => &self.heat_env,
            LoadKind::Rotating => &self.rot_env,
            LoadKind::Storage => unreachable!("storage has no curtailment envelope"),
        }
    }
}

fn energy(series: &[f64], dt: f64) -> f64 {
    series.iter().map(|p| p * dt).sum()
}

#[derive(Debug, Clone)]
struct Plan {
    heating: Vec<f64>,
    rotating: Vec<f64>,
    storage: StoragePlan,
    f_act: f64,
    f: f64,
}

impl Plan {
    fn curtailed(&self, t: usize) -> f64 {
        self.heating[t] + self.rotating[t]
    }

    fn delivered(&self, t: usize) -> f64 {
        self.curtailed(t) + self.storage.discharge[t]
    }

    fn finish(mut self, ctx: &Context) -> Result<Self, DispatchError> {
        let delivered: Vec<f64> = (0..ctx.horizon()).map(|t| self.delivered(t)).collect();
        self.f_act = energy(&delivered, ctx.dt);
        self.f = unresponsiveness(ctx.f_pre, self.f_act)?;
        Ok(self)
    }

    fn curtailment_mut(&mut self, kind: LoadKind) -> &mut Vec<f64> {
        match kind {
            LoadKind::Heating => &mut self.heating,
            LoadKind::Rotating => &mut self.rotating,
            LoadKind::Storage => unreachable!("storage is not curtailed"),
        }
    }
}

/// Best semi-continuous allocation of `demand` over curtailable loads with
/// envelopes `envs` (each load gives 0 or a value in its interval).
fn allocate_step(demand: f64, envs: &[Interval]) -> Vec<f64> {
    let n = envs.len();
    let mut best_value = 0.0;
    let mut best_mask = 0usize;
    for mask in (1..(1usize << n)).rev() {
        let active = |i: usize| mask & (1 << i) != 0;
        let lo: f64 = (0..n).filter(|&i| active(i)).map(|i| envs[i].lo).sum();
        let hi: f64 = (0..n).filter(|&i| active(i)).map(|i| envs[i].hi).sum();
        if lo <= demand {
            let value = demand.min(hi);
            if value > best_value {
                best_value = value;
                best_mask = mask;
            }
        }
    }
    let mut alloc = vec![0.0; n];
    let active: Vec<usize> = (0..n).filter(|&i| best_mask & (1 << i) != 0).collect();
    let base: f64 = active.iter().map(|&i| envs[i].lo).sum();
    let mut rest = (best_value - base).max(0.0);
    for &i in &active {
        let extra = rest.min(envs[i].hi - envs[i].lo);
        alloc[i] = envs[i].lo + extra;
        rest -= extra;
    }
    alloc
}

fn joint_plan(case: FlexibleCase, ctx: &Context) -> Result<Plan, DispatchError> {
    let n = ctx.horizon();
    let spec = &ctx.params.storage;
    let curtailables: Vec<LoadKind> = case
        .members()
        .into_iter()
        .filter(|k| *k != LoadKind::Storage)
        .collect();
    let mut plan = Plan {
        heating: vec![0.0; n],
        rotating: vec![0.0; n],
        storage: StoragePlan::idle(n, spec),
        f_act: 0.0,
        f: 0.0,
    };
    for t in 0..n {
        let demand = ctx.target.demand()[t];
        if demand <= 0.0 {
            continue;
        }
        let envs: Vec<Interval> = curtailables.iter().map(|k| ctx.envelope(*k)[t]).collect();
        for (k, v) in curtailables.iter().zip(allocate_step(demand, &envs)) {
            plan.curtailment_mut(*k)[t] = v;
        }
    }
    if case.contains(LoadKind::Storage) {
        let residual: Vec<f64> = (0..n)
            .map(|t| (ctx.target.demand()[t] - plan.curtailed(t)).max(0.0))
            .collect();
        plan.storage = plan_storage(&residual, &ctx.window, spec, ctx.dt);
    }
    plan.finish(ctx)
}

/// Add member `kind` on top of a plan that does not use it.
fn extend_plan(base: &Plan, kind: LoadKind, ctx: &Context) -> Result<Plan, DispatchError> {
    let n = ctx.horizon();
    let mut plan = base.clone();
    let residual: Vec<f64> = (0..n)
        .map(|t| (ctx.target.demand()[t] - base.delivered(t)).max(0.0))
        .collect();
    match kind {
        LoadKind::Storage => {
            plan.storage = plan_storage(&residual, &ctx.window, &ctx.params.storage, ctx.dt);
        }
        _ => {
            let env = ctx.envelope(kind).to_vec();
            let series = plan.curtailment_mut(kind);
            for t in 0..n {
                let take = residual[t].min(env[t].hi);
                if residual[t] > 0.0 && take >= env[t].lo && take > 0.0 {
                    series[t] = take;
                }
            }
        }
    }
    plan.finish(ctx)
}

fn plan_case(
    case: FlexibleCase,
    ctx: &Context,
    memo: &mut BTreeMap<FlexibleCase, Plan>,
) -> Result<Plan, DispatchError> {
    if let Some(p) = memo.get(&case) {
        return Ok(p.clone());
    }
    let mut best = joint_plan(case, ctx)?;
    for m in case.members() {
        if let Some(sub) = case.without(m) {
            let sub_plan = plan_case(sub, ctx, memo)?;
            let candidate = extend_plan(&sub_plan, m, ctx)?;
            if candidate.f < best.f {
                best = candidate;
            }
        }
    }
    memo.insert(case, best.clone());
    Ok(best)
}

fn into_result(case: FlexibleCase, plan: Plan, ctx: &Context) -> DispatchResult {
    let n = ctx.horizon();
    let soc = plan.storage.soc.clone();
    let gap = soc[n] - soc[0];
    let mut warnings = plan.storage.warnings.clone();
    if gap.abs() > crate::load_models::SOC_TOLERANCE {
        warnings.push(format!(
            "terminal SOC {:.9} differs from initial SOC {:.9} by {gap:.3e}",
            soc[n], soc[0]
        ));
    }
    DispatchResult {
        case,
        target: ctx.target.id(),
        step_hours: ctx.dt,
        demand: ctx.target.demand().to_vec(),
        heating: plan.heating,
        rotating: plan.rotating,
        storage_power: plan.storage.signed_power(),
        soc,
        f_pre: ctx.f_pre,
        f_act: plan.f_act,
        unresponsiveness: plan.f,
        terminal_soc_gap: gap,
        warnings,
    }
}

/// Dispatch flexible `case` against `target`.
///
/// Never fails on an unmet terminal SOC: the gap is reported in the result with a warning.
pub fn schedule_dispatch(
    case: FlexibleCase,
    target: &ResponseTarget,
    baselines: &Baselines,
    params: &DispatchParams,
) -> Result<DispatchResult, DispatchError> {
    let ctx = Context::new(target, baselines, params)?;
    let mut memo = BTreeMap::new();
    let plan = plan_case(case, &ctx, &mut memo)?;
    Ok(into_result(case, plan, &ctx))
}

/// Dispatch all seven flexible cases against `target`, in [`FlexibleCase::ALL`] order.
pub fn schedule_all_cases(
    target: &ResponseTarget,
    baselines: &Baselines,
    params: &DispatchParams,
) -> Result<Vec<DispatchResult>, DispatchError> {
    let ctx = Context::new(target, baselines, params)?;
    let mut memo = BTreeMap::new();
    FlexibleCase::ALL
        .into_iter()
        .map(|case| {
            let plan = plan_case(case, &ctx, &mut memo)?;
            Ok(into_result(case, plan, &ctx))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::TargetId;
    use crate::load_models::StorageSpec;
    use crate::profile::LoadProfile;

    fn baselines(heat: f64, rot: f64, n: usize) -> Baselines {
        let start = "2019-01-15T00:00:00".parse().unwrap();
        Baselines {
            heating: LoadProfile::constant(start, 60.0, n, heat).unwrap(),
            rotating: LoadProfile::constant(start, 60.0, n, rot).unwrap(),
            storage: LoadProfile::constant(start, 60.0, n, 0.0).unwrap(),
        }
    }

    #[test]
    fn semi_continuous_allocation() {
        let envs = [Interval::new(50.0, 80.0), Interval::new(0.0, 30.0)];
        assert_eq!(allocate_step(100.0, &envs), vec![80.0, 20.0]);
        // Heating cannot run below 50, so 40 kW comes from rotating alone.
        assert_eq!(allocate_step(40.0, &envs), vec![0.0, 30.0]);
        assert_eq!(allocate_step(0.0, &envs), vec![0.0, 0.0]);
    }

    #[test]
    fn zero_demand_means_zero_response() {
        let target =
            ResponseTarget::uniform(TargetId::OnlyNight, 24, (0..6).collect(), 0.0).unwrap();
        let r = schedule_dispatch(
            FlexibleCase::HRS,
            &target,
            &baselines(3000.0, 2000.0, 24),
            &DispatchParams::default(),
        )
        .unwrap();
        assert_eq!(r.unresponsiveness, 0.0);
        assert_eq!(r.f_pre, 0.0);
        assert!(r.delivered_series().iter().all(|&d| d == 0.0));
        assert!(r.storage_power.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn storage_only_night_example() {
        let target =
            ResponseTarget::uniform(TargetId::OnlyNight, 24, (20..24).collect(), 1000.0).unwrap();
        let params = DispatchParams {
            storage: StorageSpec::default(),
            ..Default::default()
        };
        let r =
            schedule_dispatch(FlexibleCase::S, &target, &baselines(0.0, 0.0, 24), &params).unwrap();
        assert!((r.f_act - 4000.0).abs() < 1e-9);
        assert!(r.unresponsiveness.abs() < 1e-9);
        assert!(r.terminal_soc_gap.abs() < 1e-9);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn heating_capped_by_envelope() {
        let target = ResponseTarget::new(TargetId::AllDay, vec![0, 1], vec![100.0, 100.0]).unwrap();
        let params = DispatchParams {
            heat_envelope: Some(vec![Interval::new(0.0, 80.0); 2]),
            ..Default::default()
        };
        let r = schedule_dispatch(
            FlexibleCase::H,
            &target,
            &baselines(1000.0, 0.0, 2),
            &params,
        )
        .unwrap();
        assert_eq!(r.heating, vec![80.0, 80.0]);
        assert_eq!(r.unresponsiveness, 40.0);
    }

    #[test]
    fn supersets_never_worse() {
        let target =
            ResponseTarget::uniform(TargetId::OnlyDaytime, 24, (8..18).collect(), 5000.0).unwrap();
        let all = schedule_all_cases(
            &target,
            &baselines(2500.0, 1800.0, 24),
            &DispatchParams::default(),
        )
        .unwrap();
        for a in &all {
            for b in &all {
                if b.case.is_subset_of(a.case) {
                    assert!(
                        a.unresponsiveness <= b.unresponsiveness,
                        "{} vs {}",
                        a.case,
                        b.case
                    );
                }
            }
        }
    }

    #[test]
    fn grid_mismatch_rejected() {
        let target = ResponseTarget::uniform(TargetId::AllDay, 12, (0..12).collect(), 1.0).unwrap();
        assert!(matches!(
            schedule_dispatch(
                FlexibleCase::H,
                &target,
                &baselines(1.0, 1.0, 24),
                &DispatchParams::default()
            ),
            Err(DispatchError::GridMismatch(_))
        ));
    }
}
