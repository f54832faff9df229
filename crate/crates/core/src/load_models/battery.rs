//! First-order Thevenin battery cell.
//!
//! Sign convention: current is positive while charging. The terminal relation is
//! `V_OC = V_0 + (R_0 + R_1)·I_B + V_B`, with `V_0` the voltage across the
//! polarization RC branch.

use serde::{Deserialize, Serialize};

use super::{require_finite, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryElectricalState {
    pub soc: f64,
    /// Cell temperature in °C; parameters are assumed already evaluated at it.
    pub temperature: f64,
    pub open_circuit_voltage: f64,
    /// R_0, polarization branch resistance (Ω).
    pub polarization_resistance: f64,
    /// R_1, ohmic resistance (Ω).
    pub ohmic_resistance: f64,
    /// R_2, lumped remaining internal resistance (Ω). Not part of the terminal relation.
    pub other_resistance: f64,
    /// C_0, polarization capacitance (F).
    pub polarization_capacitance: f64,
    /// V_0 at the start of the current step (V).
    pub polarization_voltage: f64,
    pub terminal_voltage: f64,
    pub current: f64,
}

impl BatteryElectricalState {
    /// A rested cell: no current, uncharged polarization branch.
    pub fn rested(
        soc: f64,
        open_circuit_voltage: f64,
        polarization_resistance: f64,
        ohmic_resistance: f64,
        polarization_capacitance: f64,
    ) -> Self {
        Self {
            soc,
            temperature: 25.0,
            open_circuit_voltage,
            polarization_resistance,
            ohmic_resistance,
            other_resistance: 0.0,
            polarization_capacitance,
            polarization_voltage: 0.0,
            terminal_voltage: open_circuit_voltage,
            current: 0.0,
        }
    }

    /// Polarization time constant τ = R_0·C_0 (s).
    pub fn time_constant(&self) -> f64 {
        self.polarization_resistance * self.polarization_capacitance
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, v) in [
            ("soc", self.soc),
            ("temperature", self.temperature),
            ("open_circuit_voltage", self.open_circuit_voltage),
            ("polarization_resistance", self.polarization_resistance),
            ("ohmic_resistance", self.ohmic_resistance),
            ("other_resistance", self.other_resistance),
            ("polarization_capacitance", self.polarization_capacitance),
            ("polarization_voltage", self.polarization_voltage),
            ("terminal_voltage", self.terminal_voltage),
            ("current", self.current),
        ] {
            require_finite(field, v)?;
        }
        let bad = |field: &'static str, reason: String| {
            Err(ModelError::InvalidParameter { field, reason })
        };
        if !(0.0..=1.0).contains(&self.soc) {
            return bad("soc", format!("must lie in [0, 1], got {}", self.soc));
        }
        for (field, r) in [
            ("polarization_resistance", self.polarization_resistance),
            ("ohmic_resistance", self.ohmic_resistance),
            ("other_resistance", self.other_resistance),
        ] {
            if r < 0.0 {
                return bad(field, format!("must be >= 0, got {r}"));
            }
        }
        if self.polarization_capacitance <= 0.0 {
            return bad(
                "polarization_capacitance",
                format!("must be > 0, got {}", self.polarization_capacitance),
            );
        }
        Ok(())
    }
}

/// Terminal voltage `t_since_step` seconds after the current steps to `current`.
///
/// The RC branch relaxes from its stored `polarization_voltage` towards
/// `current·R_0` with time constant τ.
pub fn battery_terminal_voltage(
    state: &BatteryElectricalState,
    current: f64,
    t_since_step: f64,
) -> Result<f64, ModelError> {
    state.validate()?;
    require_finite("current", current)?;
    require_finite("t_since_step", t_since_step)?;
    if t_since_step < 0.0 {
        return Err(ModelError::InvalidParameter {
            field: "t_since_step",
            reason: format!("must be >= 0, got {t_since_step}"),
        });
    }
    let v0 = polarization_voltage(state, current, t_since_step);
    let series = state.polarization_resistance + state.ohmic_resistance;
    Ok(state.open_circuit_voltage - v0 - series * current)
}

fn polarization_voltage(state: &BatteryElectricalState, current: f64, t: f64) -> f64 {
    let tau = state.time_constant();
    let steady = current * state.polarization_resistance;
    if tau == 0.0 {
        return steady;
    }
    let decay = (-t / tau).exp();
    state.polarization_voltage * decay + steady * (1.0 - decay)
}

/// Advance the cell by `dt` seconds at constant `current`, updating V_0, V_B and I_B.
pub fn battery_step(
    state: &BatteryElectricalState,
    current: f64,
    dt: f64,
) -> Result<BatteryElectricalState, ModelError> {
    let terminal_voltage = battery_terminal_voltage(state, current, dt)?;
    Ok(BatteryElectricalState {
        polarization_voltage: polarization_voltage(state, current, dt),
        terminal_voltage,
        current,
        ..*state
    })
}

/// Circuit parameters recovered from a current-step test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentifiedBatteryParams {
    pub ohmic_resistance: f64,
    pub polarization_resistance: f64,
    pub polarization_capacitance: f64,
    pub total_resistance: f64,
}

/// Recover R_1, R_0, C_0 and the total internal resistance from a current step.
///
/// `ohmic_drop` is the instantaneous voltage jump, `polarization_drop` the slow
/// relaxation part, `tau` the fitted relaxation time constant.
pub fn identify_battery_params(
    ohmic_drop: f64,
    polarization_drop: f64,
    current: f64,
    tau: f64,
    open_circuit_voltage: f64,
    terminal_voltage: f64,
) -> Result<IdentifiedBatteryParams, ModelError> {
    for (field, v) in [
        ("ohmic_drop", ohmic_drop),
        ("polarization_drop", polarization_drop),
        ("current", current),
        ("tau", tau),
        ("open_circuit_voltage", open_circuit_voltage),
        ("terminal_voltage", terminal_voltage),
    ] {
        require_finite(field, v)?;
    }
    if current == 0.0 {
        return Err(ModelError::ZeroCurrent);
    }
    if tau <= 0.0 {
        return Err(ModelError::InvalidParameter {
            field: "tau",
            reason: format!("must be > 0, got {tau}"),
        });
    }
    let ohmic_resistance = ohmic_drop / current;
    let polarization_resistance = polarization_drop / current;
    let total_resistance = (open_circuit_voltage - terminal_voltage) / current;
    for (name, r) in [
        ("ohmic resistance", ohmic_resistance),
        ("polarization resistance", polarization_resistance),
        ("total resistance", total_resistance),
    ] {
        if r < 0.0 {
            return Err(ModelError::IdentificationFailed(format!(
                "{name} came out negative ({r} Ω)"
            )));
        }
    }
    if polarization_resistance == 0.0 {
        return Err(ModelError::IdentificationFailed(
            "polarization resistance is zero, capacitance undefined".into(),
        ));
    }
    Ok(IdentifiedBatteryParams {
        ohmic_resistance,
        polarization_resistance,
        polarization_capacitance: tau / polarization_resistance,
        total_resistance,
    })
}
