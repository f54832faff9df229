//! Storage state-of-charge bookkeeping at the scheduling level.

use serde::{Deserialize, Serialize};

use super::{require_finite, ModelError};

/// Slack applied to SOC and power bound checks to absorb floating rounding.
pub const SOC_TOLERANCE: f64 = 1e-9;

/// Storage parameters. Charging power is positive, discharging power negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StorageSpec {
    pub capacity_kwh: f64,
    pub max_charge_kw: f64,
    /// Most negative admissible discharge power (kW, ≤ 0).
    pub max_discharge_kw: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    pub soc_initial: f64,
    pub charge_efficiency: f64,
    pub discharge_efficiency: f64,
}

impl Default for StorageSpec {
    /// Scheduling parameters of the reference industrial park (ideal efficiency).
    fn default() -> Self {
        Self {
            capacity_kwh: 7500.0,
            max_charge_kw: 1000.0,
            max_discharge_kw: -1000.0,
            soc_min: 0.3,
            soc_max: 0.95,
            soc_initial: 0.4,
            charge_efficiency: 1.0,
            discharge_efficiency: 1.0,
        }
    }
}

impl StorageSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, v) in [
            ("capacity_kwh", self.capacity_kwh),
            ("max_charge_kw", self.max_charge_kw),
            ("max_discharge_kw", self.max_discharge_kw),
            ("soc_min", self.soc_min),
            ("soc_max", self.soc_max),
            ("soc_initial", self.soc_initial),
            ("charge_efficiency", self.charge_efficiency),
            ("discharge_efficiency", self.discharge_efficiency),
        ] {
            require_finite(field, v)?;
        }
        let bad = |field: &'static str, reason: String| {
            Err(ModelError::InvalidParameter { field, reason })
        };
        if self.capacity_kwh <= 0.0 {
            return bad(
                "capacity_kwh",
                format!("must be > 0, got {}", self.capacity_kwh),
            );
        }
        if !(0.0 <= self.soc_min && self.soc_min < self.soc_max && self.soc_max <= 1.0) {
            return bad(
                "soc_max",
                format!(
                    "need 0 <= soc_min < soc_max <= 1, got [{}, {}]",
                    self.soc_min, self.soc_max
                ),
            );
        }
        if !(self.soc_min..=self.soc_max).contains(&self.soc_initial) {
            return bad(
                "soc_initial",
                format!(
                    "must lie in [{}, {}], got {}",
                    self.soc_min, self.soc_max, self.soc_initial
                ),
            );
        }
        if self.max_charge_kw < 0.0 {
            return bad(
                "max_charge_kw",
                format!("must be >= 0, got {}", self.max_charge_kw),
            );
        }
        if self.max_discharge_kw > 0.0 {
            return bad(
                "max_discharge_kw",
                format!("must be <= 0, got {}", self.max_discharge_kw),
            );
        }
        for (field, eta) in [
            ("charge_efficiency", self.charge_efficiency),
            ("discharge_efficiency", self.discharge_efficiency),
        ] {
            if !(eta > 0.0 && eta <= 1.0) {
                return bad(field, format!("must lie in (0, 1], got {eta}"));
            }
        }
        Ok(())
    }

    pub fn energy_min_kwh(&self) -> f64 {
        self.soc_min * self.capacity_kwh
    }

    pub fn energy_max_kwh(&self) -> f64 {
        self.soc_max * self.capacity_kwh
    }

    pub fn energy_initial_kwh(&self) -> f64 {
        self.soc_initial * self.capacity_kwh
    }

    /// Change of stored energy (kWh) for one step at the given powers.
    pub fn stored_energy_delta(&self, charge_kw: f64, discharge_kw: f64, dt_hours: f64) -> f64 {
        (self.charge_efficiency * charge_kw + discharge_kw / self.discharge_efficiency) * dt_hours
    }
}

/// Next SOC after charging at `charge_kw` (≥ 0) or discharging at `discharge_kw` (≤ 0)
/// for `dt_hours`. At most one of the two may be nonzero.
pub fn soc_step(
    soc: f64,
    charge_kw: f64,
    discharge_kw: f64,
    dt_hours: f64,
    spec: &StorageSpec,
) -> Result<f64, ModelError> {
    spec.validate()?;
    require_finite("soc", soc)?;
    require_finite("charge_kw", charge_kw)?;
    require_finite("discharge_kw", discharge_kw)?;
    require_finite("dt_hours", dt_hours)?;
    if dt_hours <= 0.0 {
        return Err(ModelError::InvalidParameter {
            field: "dt_hours",
            reason: format!("must be > 0, got {dt_hours}"),
        });
    }
    if charge_kw != 0.0 && discharge_kw != 0.0 {
        return Err(ModelError::SimultaneousChargeDischarge {
            charge_kw,
            discharge_kw,
        });
    }
    if charge_kw < 0.0 || charge_kw > spec.max_charge_kw * (1.0 + SOC_TOLERANCE) {
        return Err(ModelError::PowerOutOfRange {
            field: "charge_kw",
            value: charge_kw,
            lo: 0.0,
            hi: spec.max_charge_kw,
        });
    }
    if discharge_kw > 0.0 || discharge_kw < spec.max_discharge_kw * (1.0 + SOC_TOLERANCE) {
        return Err(ModelError::PowerOutOfRange {
            field: "discharge_kw",
            value: discharge_kw,
            lo: spec.max_discharge_kw,
            hi: 0.0,
        });
    }
    let next =
        soc + spec.stored_energy_delta(charge_kw, discharge_kw, dt_hours) / spec.capacity_kwh;
    if next < spec.soc_min - SOC_TOLERANCE || next > spec.soc_max + SOC_TOLERANCE {
        return Err(ModelError::SocBoundViolation {
            soc: next,
            soc_min: spec.soc_min,
            soc_max: spec.soc_max,
        });
    }
    Ok(next)
}
