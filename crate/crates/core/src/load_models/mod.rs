//! Physical power models of the park's flexible loads.

mod battery;
mod furnace;
pub(crate) mod rolling;
mod storage;
mod thermal;

pub use battery::{
    battery_step, battery_terminal_voltage, identify_battery_params, BatteryElectricalState,
    IdentifiedBatteryParams,
};
pub use furnace::{eaf_power, BandNoise, FurnaceCycleSpec};
pub use rolling::{gate_power, rolling_line_power, RollingScheduleSpec};
pub use storage::{soc_step, StorageSpec, SOC_TOLERANCE};
pub use thermal::{heat_load_required, indoor_temp_step, BuildingThermalSpec};

use chrono::NaiveDateTime;
use thiserror::Error;

use crate::profile::{LoadProfile, ProfileError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{field} is not finite ({value})")]
    NonFinite { field: &'static str, value: f64 },
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("battery parameter identification needs a nonzero current")]
    ZeroCurrent,
    #[error("battery parameter identification failed: {0}")]
    IdentificationFailed(String),
    #[error(
        "storage cannot charge ({charge_kw} kW) and discharge ({discharge_kw} kW) in the same step"
    )]
    SimultaneousChargeDischarge { charge_kw: f64, discharge_kw: f64 },
    #[error("{field} = {value} kW outside [{lo}, {hi}]")]
    PowerOutOfRange {
        field: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("resulting SOC {soc} outside [{soc_min}, {soc_max}]")]
    SocBoundViolation {
        soc: f64,
        soc_min: f64,
        soc_max: f64,
    },
    #[error("indoor temperature {temperature} °C outside comfort band [{t_min}, {t_max}]")]
    ComfortViolation {
        temperature: f64,
        t_min: f64,
        t_max: f64,
    },
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

pub(crate) fn require_finite(field: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonFinite { field, value })
    }
}

/// Sample a continuous power model into a profile of interval means.
///
/// `power` receives the time in minutes since `start`; each interval is averaged
/// with `substeps` midpoint samples.
pub fn sample_interval_means<F>(
    start: NaiveDateTime,
    step_minutes: f64,
    len: usize,
    substeps: usize,
    mut power: F,
) -> Result<LoadProfile, ModelError>
where
    F: FnMut(f64) -> Result<f64, ModelError>,
{
    let substeps = substeps.max(1);
    let h = step_minutes / substeps as f64;
    let mut values = Vec::with_capacity(len);
    for i in 0..len {
        let base = i as f64 * step_minutes;
        let mut acc = 0.0;
        for j in 0..substeps {
            acc += power(base + (j as f64 + 0.5) * h)?;
        }
        values.push(acc / substeps as f64);
    }
    Ok(LoadProfile::new(start, step_minutes, values)?)
}

/// Interval-mean profile of a rolling line; the schedule's time origin is `start`.
pub fn rolling_profile(
    spec: &RollingScheduleSpec,
    start: NaiveDateTime,
    step_minutes: f64,
    len: usize,
    substeps: usize,
) -> Result<LoadProfile, ModelError> {
    spec.validate()?;
    let starts = spec.pulse_starts();
    sample_interval_means(start, step_minutes, len, substeps, |t| {
        require_finite("t", t)?;
        Ok(rolling::power_from_starts(t, &starts, spec))
    })
}

/// Interval-mean profile of a furnace running `cycles` (times in seconds since `start`).
pub fn furnace_profile(
    cycles: &[FurnaceCycleSpec],
    start: NaiveDateTime,
    step_minutes: f64,
    len: usize,
    substeps: usize,
) -> Result<LoadProfile, ModelError> {
    for c in cycles {
        c.validate()?;
    }
    sample_interval_means(start, step_minutes, len, substeps, |t_min| {
        let t = t_min * 60.0;
        let mut p = 0.0;
        for c in cycles {
            if t > c.t_on && t <= c.t_off {
                p += eaf_power(t, c)?;
            }
        }
        Ok(p)
    })
}
