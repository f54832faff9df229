//! Lumped building heat-path model.

use serde::{Deserialize, Serialize};

use super::{require_finite, ModelError};

/// Building thermal parameters. `time_constant` shares the unit of the `dt`
/// passed to the step functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildingThermalSpec {
    /// °C per kW.
    pub thermal_resistance: f64,
    pub time_constant: f64,
    /// kWh/°C. Carried for completeness; the discrete step is fully determined by R and τ.
    pub air_heat_capacity: f64,
    pub t_in_min: f64,
    pub t_in_max: f64,
}

impl BuildingThermalSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, v) in [
            ("thermal_resistance", self.thermal_resistance),
            ("time_constant", self.time_constant),
            ("air_heat_capacity", self.air_heat_capacity),
            ("t_in_min", self.t_in_min),
            ("t_in_max", self.t_in_max),
        ] {
            require_finite(field, v)?;
        }
        let bad = |field: &'static str, reason: String| {
            Err(ModelError::InvalidParameter { field, reason })
        };
        if self.thermal_resistance <= 0.0 {
            return bad(
                "thermal_resistance",
                format!("must be > 0, got {}", self.thermal_resistance),
            );
        }
        if self.time_constant <= 0.0 {
            return bad(
                "time_constant",
                format!("must be > 0, got {}", self.time_constant),
            );
        }
        if self.t_in_min >= self.t_in_max {
            return bad(
                "t_in_max",
                format!(
                    "comfort band must satisfy min < max, got [{}, {}]",
                    self.t_in_min, self.t_in_max
                ),
            );
        }
        Ok(())
    }

    fn decay(&self, dt: f64) -> f64 {
        (-dt / self.time_constant).exp()
    }

    fn in_band(&self, t: f64) -> bool {
        t >= self.t_in_min && t <= self.t_in_max
    }
}

/// Indoor temperature after one step of length `dt` with heating power `q_load` (kW).
pub fn indoor_temp_step(
    t_in: f64,
    t_out: f64,
    q_load: f64,
    dt: f64,
    spec: &BuildingThermalSpec,
) -> Result<f64, ModelError> {
    spec.validate()?;
    check_inputs(&[("t_in", t_in), ("t_out", t_out), ("q_load", q_load)], dt)?;
    let decay = spec.decay(dt);
    Ok(t_in * decay + (spec.thermal_resistance * q_load + t_out) * (1.0 - decay))
}

/// Heating power that moves the indoor temperature from `t_in` to `t_in_next` in one step.
///
/// Both temperatures must respect the comfort band.
pub fn heat_load_required(
    t_in_next: f64,
    t_in: f64,
    t_out: f64,
    dt: f64,
    spec: &BuildingThermalSpec,
) -> Result<f64, ModelError> {
    spec.validate()?;
    check_inputs(
        &[("t_in_next", t_in_next), ("t_in", t_in), ("t_out", t_out)],
        dt,
    )?;
    for t in [t_in, t_in_next] {
        if !spec.in_band(t) {
            return Err(ModelError::ComfortViolation {
                temperature: t,
                t_min: spec.t_in_min,
                t_max: spec.t_in_max,
            });
        }
    }
    let decay = spec.decay(dt);
    let equilibrium = (t_in_next - t_in * decay) / (1.0 - decay);
    Ok((equilibrium - t_out) / spec.thermal_resistance)
}

fn check_inputs(temps: &[(&'static str, f64)], dt: f64) -> Result<(), ModelError> {
    for &(field, v) in temps {
        require_finite(field, v)?;
    }
    require_finite("dt", dt)?;
    if dt <= 0.0 {
        return Err(ModelError::InvalidParameter {
            field: "dt",
            reason: format!("must be > 0, got {dt}"),
        });
    }
    Ok(())
}
