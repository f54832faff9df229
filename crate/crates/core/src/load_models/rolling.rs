//! Steel rolling line: superposition of gate-shaped mill pulses.
//!
//! Times are in minutes on an arbitrary origin; powers in kW.

use serde::{Deserialize, Serialize};

use super::{require_finite, ModelError};

/// Power of a single mill pass: `a` on the closed window `[t0, t0 + width]`, 0 elsewhere.
pub fn gate_power(t: f64, t0: f64, width: f64, a: f64) -> Result<f64, ModelError> {
    require_finite("t", t)?;
    require_finite("t0", t0)?;
    require_finite("width", width)?;
    require_finite("a", a)?;
    if width <= 0.0 {
        return Err(ModelError::InvalidParameter {
            field: "width",
            reason: format!("must be > 0, got {width}"),
        });
    }
    if a < 0.0 {
        return Err(ModelError::InvalidParameter {
            field: "a",
            reason: format!("must be >= 0, got {a}"),
        });
    }
    Ok(if t >= t0 && t <= t0 + width { a } else { 0.0 })
}

/// Billet schedule of one rolling line.
///
/// Every billet makes `rough_pass_count` back-to-back passes on the roughing
/// mill starting at `rough_start + rough_offsets[i]`, then one pass through each
/// of the `finishing_mill_count` finishing mills starting at
/// `finishing_start + finishing_offsets[i]`. Consecutive passes of a billet are
/// separated by `inter_pass_gap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingScheduleSpec {
    pub pulse_power: f64,
    pub pulse_width: f64,
    pub inter_pass_gap: f64,
    pub rough_pass_count: usize,
    pub finishing_mill_count: usize,
    pub rough_start: f64,
    pub finishing_start: f64,
    pub billet_count: usize,
    /// Entry delay of billet `i` into roughing relative to billet 1 (first entry is 0).
    pub rough_offsets: Vec<f64>,
    /// Entry delay of billet `i` into finishing relative to billet 1 (first entry is 0).
    pub finishing_offsets: Vec<f64>,
}

impl RollingScheduleSpec {
    /// Billets entering every `interval` minutes; finishing follows the same cadence.
    #[allow(clippy::too_many_arguments)]
    pub fn uniform(
        pulse_power: f64,
        pulse_width: f64,
        inter_pass_gap: f64,
        rough_pass_count: usize,
        finishing_mill_count: usize,
        rough_start: f64,
        finishing_delay: f64,
        billet_count: usize,
        interval: f64,
    ) -> Self {
        let offsets: Vec<f64> = (0..billet_count).map(|i| i as f64 * interval).collect();
        Self {
            pulse_power,
            pulse_width,
            inter_pass_gap,
            rough_pass_count,
            finishing_mill_count,
            rough_start,
            finishing_start: rough_start + finishing_delay,
            billet_count,
            rough_offsets: offsets.clone(),
            finishing_offsets: offsets,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |field: &'static str, reason: String| {
            Err(ModelError::InvalidParameter { field, reason })
        };
        require_finite("pulse_power", self.pulse_power)?;
        require_finite("pulse_width", self.pulse_width)?;
        require_finite("inter_pass_gap", self.inter_pass_gap)?;
        require_finite("rough_start", self.rough_start)?;
        require_finite("finishing_start", self.finishing_start)?;
        if self.pulse_power < 0.0 {
            return bad(
                "pulse_power",
                format!("must be >= 0, got {}", self.pulse_power),
            );
        }
        if self.pulse_width <= 0.0 {
            return bad(
                "pulse_width",
                format!("must be > 0, got {}", self.pulse_width),
            );
        }
        if self.inter_pass_gap < 0.0 {
            return bad(
                "inter_pass_gap",
                format!("must be >= 0, got {}", self.inter_pass_gap),
            );
        }
        if self.rough_pass_count.is_multiple_of(2) {
            return bad(
                "rough_pass_count",
                format!("must be odd and >= 1, got {}", self.rough_pass_count),
            );
        }
        for (field, offsets) in [
            ("rough_offsets", &self.rough_offsets),
            ("finishing_offsets", &self.finishing_offsets),
        ] {
            if offsets.len() != self.billet_count {
                return bad(
                    field,
                    format!(
                        "expected {} entries (billet_count), got {}",
                        self.billet_count,
                        offsets.len()
                    ),
                );
            }
            if let Some(&first) = offsets.first() {
                if first != 0.0 {
                    return bad(field, format!("first offset must be 0, got {first}"));
                }
            }
            if offsets.iter().any(|o| !o.is_finite()) {
                return bad(field, "offsets must be finite".into());
            }
            if offsets.windows(2).any(|w| w[1] < w[0]) {
                return bad(field, "offsets must be non-decreasing".into());
            }
        }
        Ok(())
    }

    /// Start times of every pulse in the schedule, roughing passes first.
    pub fn pulse_starts(&self) -> Vec<f64> {
        let pitch = self.pulse_width + self.inter_pass_gap;
        let mut starts = Vec::with_capacity(
            self.billet_count * (self.rough_pass_count + self.finishing_mill_count),
        );
        for &offset in &self.rough_offsets {
            for pass in 0..self.rough_pass_count {
                starts.push(self.rough_start + offset + pass as f64 * pitch);
            }
        }
        for &offset in &self.finishing_offsets {
            for mill in 0..self.finishing_mill_count {
                starts.push(self.finishing_start + offset + mill as f64 * pitch);
            }
        }
        starts
    }
}

/// Instantaneous power of the whole rolling line at time `t` (minutes).
pub fn rolling_line_power(t: f64, spec: &RollingScheduleSpec) -> Result<f64, ModelError> {
    spec.validate()?;
    require_finite("t", t)?;
    Ok(power_from_starts(t, &spec.pulse_starts(), spec))
}

/// Line power at `t` given precomputed pulse starts of a validated spec.
pub(crate) fn power_from_starts(t: f64, starts: &[f64], spec: &RollingScheduleSpec) -> f64 {
    let w = spec.pulse_width;
    starts
        .iter()
        .filter(|&&s| t >= s && t <= s + w)
        .map(|_| spec.pulse_power)
        .sum()
}
