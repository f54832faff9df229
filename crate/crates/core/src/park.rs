//! Synthetic industrial park used as the bundled demo dataset.
//!
//! One rolling line, one arc furnace and one battery on an hourly grid for
//! 2019-01-15, plus three response targets (night, all day, daytime).

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use serde::{Deserialize, Serialize};

use crate::dispatch::{Baselines, DispatchError, ResponseTarget, TargetId};
use crate::load_models::rolling::power_from_starts;
use crate::load_models::{
    furnace_profile, sample_interval_means, FurnaceCycleSpec, ModelError, RollingScheduleSpec,
};
use crate::profile::LoadProfile;

/// Seed used by the demo dataset and as the CLI default.
pub const DEMO_SEED: u64 = 2019;

/// A run of billets entering the roughing mill at a fixed cadence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RollingShift {
    pub start_hour: f64,
    pub billet_count: usize,
    pub billet_interval_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RollingLineSpec {
    pub pulse_power_kw: f64,
    pub pulse_width_min: f64,
    pub inter_pass_gap_min: f64,
    pub rough_passes: usize,
    pub finishing_mills: usize,
    pub finishing_delay_min: f64,
    pub shifts: Vec<RollingShift>,
}

impl Default for RollingLineSpec {
    fn default() -> Self {
        Self {
            pulse_power_kw: 1500.0,
            pulse_width_min: 1.0,
            inter_pass_gap_min: 0.5,
            rough_passes: 5,
            finishing_mills: 7,
            finishing_delay_min: 8.0,
            shifts: vec![
                RollingShift {
                    start_hour: 0.0,
                    billet_count: 36,
                    billet_interval_min: 10.0,
                },
                RollingShift {
                    start_hour: 6.0,
                    billet_count: 160,
                    billet_interval_min: 6.0,
                },
                RollingShift {
                    start_hour: 22.0,
                    billet_count: 12,
                    billet_interval_min: 10.0,
                },
            ],
        }
    }
}

impl RollingLineSpec {
    pub fn schedules(&self) -> Vec<RollingScheduleSpec> {
        self.shifts
            .iter()
            .map(|s| {
                RollingScheduleSpec::uniform(
                    self.pulse_power_kw,
                    self.pulse_width_min,
                    self.inter_pass_gap_min,
                    self.rough_passes,
                    self.finishing_mills,
                    s.start_hour * 60.0,
                    self.finishing_delay_min,
                    s.billet_count,
                    s.billet_interval_min,
                )
            })
            .collect()
    }
}

/// Back-to-back furnace heats, each followed by a tapping pause.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FurnaceSpec {
    pub rated_power_kw: f64,
    pub delta_max: f64,
    pub ramp_up_s: f64,
    pub ramp_down_s: f64,
    pub heat_minutes: f64,
    pub tap_minutes: f64,
    pub first_heat_hour: f64,
    pub heats: usize,
    pub noise_interval_s: f64,
}

impl Default for FurnaceSpec {
    fn default() -> Self {
        Self {
            rated_power_kw: 3500.0,
            delta_max: 0.05,
            ramp_up_s: 300.0,
            ramp_down_s: 180.0,
            heat_minutes: 50.0,
            tap_minutes: 10.0,
            first_heat_hour: 0.0,
            heats: 24,
            noise_interval_s: 60.0,
        }
    }
}

impl FurnaceSpec {
    /// Heats with plateau noise drawn from `seed + i` for heat `i`.
    pub fn cycles(&self, seed: u64) -> Vec<FurnaceCycleSpec> {
        let period = (self.heat_minutes + self.tap_minutes) * 60.0;
        (0..self.heats)
            .map(|i| {
                let t_on = self.first_heat_hour * 3600.0 + i as f64 * period;
                FurnaceCycleSpec::seeded(
                    t_on,
                    t_on + self.heat_minutes * 60.0,
                    self.ramp_up_s,
                    self.ramp_down_s,
                    self.rated_power_kw,
                    self.delta_max,
                    self.noise_interval_s,
                    seed.wrapping_add(i as u64),
                )
            })
            .collect()
    }
}

/// Battery operating schedule outside response events: a constant-power
/// charge block and an equal discharge block later in the day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StorageScheduleSpec {
    pub power_kw: f64,
    pub charge_start_hour: f64,
    pub discharge_start_hour: f64,
    pub block_hours: f64,
}

impl Default for StorageScheduleSpec {
    fn default() -> Self {
        Self {
            power_kw: 500.0,
            charge_start_hour: 1.0,
            discharge_start_hour: 18.0,
            block_hours: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub id: TargetId,
    /// Response timesteps.
    pub window: Vec<usize>,
    pub demand_kw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParkSpec {
    pub date: NaiveDate,
    pub step_minutes: f64,
    pub steps: usize,
    /// Midpoint samples per step when averaging the continuous models.
    pub substeps: usize,
    pub rolling: RollingLineSpec,
    pub furnace: FurnaceSpec,
    pub storage_schedule: StorageScheduleSpec,
    pub targets: Vec<TargetSpec>,
}

impl Default for ParkSpec {
    fn default() -> Self {
        let night: Vec<usize> = (0..6).chain(22..24).collect();
        Self {
            date: NaiveDate::from_ymd_opt(2019, 1, 15).expect("valid date"),
            step_minutes: 60.0,
            steps: 24,
            substeps: 240,
            rolling: RollingLineSpec::default(),
            furnace: FurnaceSpec::default(),
            storage_schedule: StorageScheduleSpec::default(),
            targets: vec![
                TargetSpec {
                    id: TargetId::OnlyNight,
                    window: night,
                    demand_kw: 6500.0,
                },
                TargetSpec {
                    id: TargetId::AllDay,
                    window: (0..24).collect(),
                    demand_kw: 5000.0,
                },
                TargetSpec {
                    id: TargetId::OnlyDaytime,
                    window: (8..18).collect(),
                    demand_kw: 7000.0,
                },
            ],
        }
    }
}

impl ParkSpec {
    pub fn start_time(&self) -> NaiveDateTime {
        self.date.and_time(NaiveTime::MIN)
    }

    pub fn rolling_profile(&self) -> Result<LoadProfile, ModelError> {
        let schedules = self.rolling.schedules();
        for s in &schedules {
            s.validate()?;
        }
        let starts: Vec<Vec<f64>> = schedules.iter().map(|s| s.pulse_starts()).collect();
        sample_interval_means(
            self.start_time(),
            self.step_minutes,
            self.steps,
            self.substeps,
            |t| {
                Ok(schedules
                    .iter()
                    .zip(&starts)
                    .map(|(s, st)| power_from_starts(t, st, s))
                    .sum())
            },
        )
    }

    pub fn furnace_profile(&self, seed: u64) -> Result<LoadProfile, ModelError> {
        furnace_profile(
            &self.furnace.cycles(seed),
            self.start_time(),
            self.step_minutes,
            self.steps,
            self.substeps,
        )
    }

    pub fn storage_profile(&self) -> Result<LoadProfile, ModelError> {
        let s = &self.storage_schedule;
        sample_interval_means(
            self.start_time(),
            self.step_minutes,
            self.steps,
            self.substeps,
            |t| {
                let h = t / 60.0;
                Ok(
                    if h >= s.charge_start_hour && h < s.charge_start_hour + s.block_hours {
                        s.power_kw
                    } else if h >= s.discharge_start_hour
                        && h < s.discharge_start_hour + s.block_hours
                    {
                        -s.power_kw
                    } else {
                        0.0
                    },
                )
            },
        )
    }

    pub fn baselines(&self, seed: u64) -> Result<Baselines, ModelError> {
        Ok(Baselines {
            heating: self.furnace_profile(seed)?,
            rotating: self.rolling_profile()?,
            storage: self.storage_profile()?,
        })
    }

    pub fn response_targets(&self) -> Result<Vec<ResponseTarget>, DispatchError> {
        self.targets
            .iter()
            .map(|t| ResponseTarget::uniform(t.id, self.steps, t.window.clone(), t.demand_kw))
            .collect()
    }
}
