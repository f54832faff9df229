//! Uniformly sampled power time series.

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("profile step must be positive and finite, got {0} min")]
    InvalidStep(f64),
    #[error("profile has no samples")]
    Empty,
    #[error("sample {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
}

/// Power samples in kW taken every `step_minutes`, starting at `start_time`.
///
/// Sample `i` stands for the interval `[start + i*step, start + (i+1)*step)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    start_time: NaiveDateTime,
    step_minutes: f64,
    values: Vec<f64>,
}

impl LoadProfile {
    pub fn new(
        start_time: NaiveDateTime,
        step_minutes: f64,
        values: Vec<f64>,
    ) -> Result<Self, ProfileError> {
        if !(step_minutes.is_finite() && step_minutes > 0.0) {
            return Err(ProfileError::InvalidStep(step_minutes));
        }
        if values.is_empty() {
            return Err(ProfileError::Empty);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(ProfileError::NonFinite { index, value });
        }
        Ok(Self {
            start_time,
            step_minutes,
            values,
        })
    }

    /// A profile of `len` samples all equal to `value`.
    pub fn constant(
        start_time: NaiveDateTime,
        step_minutes: f64,
        len: usize,
        value: f64,
    ) -> Result<Self, ProfileError> {
        Self::new(start_time, step_minutes, vec![value; len])
    }

    pub fn start_time(&self) -> NaiveDateTime {
        self.start_time
    }

    pub fn step_minutes(&self) -> f64 {
        self.step_minutes
    }

    pub fn step_hours(&self) -> f64 {
        self.step_minutes / 60.0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false for a constructed profile; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total covered time in minutes (`step * len`).
    pub fn duration_minutes(&self) -> f64 {
        self.step_minutes * self.values.len() as f64
    }

    /// Timestamp of sample `index` (rounded to whole milliseconds).
    pub fn timestamp(&self, index: usize) -> NaiveDateTime {
        let ms = (self.step_minutes * 60_000.0 * index as f64).round() as i64;
        self.start_time + Duration::milliseconds(ms)
    }

    /// Energy in kWh under the step-wise constant interpretation.
    pub fn energy_kwh(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step_hours()
    }

    pub fn peak(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn valley(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Same grid, new values. Values are validated.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self, ProfileError> {
        Self::new(self.start_time, self.step_minutes, values)
    }

    /// True when both profiles have the same start, step and length.
    pub fn same_grid(&self, other: &LoadProfile) -> bool {
        self.start_time == other.start_time
            && self.step_minutes == other.step_minutes
            && self.values.len() == other.values.len()
    }
}
