//! Physics/data fusion seam.
//!
//! A physics-model profile `x'` is mapped to `x = h(x', Y) + u`, where `h` is a
//! data-driven correction fitted on measurements `Y` and `u` a zero-mean random
//! deviation. [`DataCorrector`] is the slot for `h` and the scale of `u`;
//! [`ResidualCorrector`] is the statistical baseline implementation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::profile::LoadProfile;

pub trait DataCorrector {
    /// Deterministic corrected profile `h(x', Y)`.
    fn correct(&self, physics: &LoadProfile) -> Result<Vec<f64>, ScenarioError>;

    /// Standard deviation of the random deviation `u` (kW).
    fn deviation_scale(&self) -> f64;
}

/// Per-slot mean residual between measurements and the physics model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualCorrector {
    pub offsets: Vec<f64>,
    pub u_scale: f64,
}

impl ResidualCorrector {
    /// Identity correction with no deviation.
    pub fn zero(slots: usize) -> Self {
        Self {
            offsets: vec![0.0; slots],
            u_scale: 0.0,
        }
    }

    pub fn slot_count(&self) -> usize {
        self.offsets.len()
    }
}

impl DataCorrector for ResidualCorrector {
    fn correct(&self, physics: &LoadProfile) -> Result<Vec<f64>, ScenarioError> {
        if physics.len() != self.offsets.len() {
            return Err(ScenarioError::SlotCountMismatch {
                expected: self.offsets.len(),
                found: physics.len(),
            });
        }
        Ok(physics
            .values()
            .iter()
            .zip(&self.offsets)
            .map(|(x, o)| x + o)
            .collect())
    }

    fn deviation_scale(&self) -> f64 {
        self.u_scale
    }
}

/// Fit slot offsets as the mean of `measured - physics` over all pairs, and the
/// deviation scale as the pooled standard deviation of residuals around those means.
pub fn fit_residual_corrector(
    physics_profiles: &[LoadProfile],
    measured_profiles: &[LoadProfile],
) -> Result<ResidualCorrector, ScenarioError> {
    if physics_profiles.is_empty() || measured_profiles.is_empty() {
        return Err(ScenarioError::InsufficientData(
            "at least one (physics, measured) pair is required".into(),
        ));
    }
    if physics_profiles.len() != measured_profiles.len() {
        return Err(ScenarioError::LengthMismatch {
            what: "profile lists",
            left: physics_profiles.len(),
            right: measured_profiles.len(),
        });
    }
    let slots = physics_profiles[0].len();
    for (p, m) in physics_profiles.iter().zip(measured_profiles) {
        if p.len() != slots || m.len() != slots {
            return Err(ScenarioError::LengthMismatch {
                what: "samples per profile",
                left: p.len().max(slots),
                right: m.len(),
            });
        }
    }
    let days = physics_profiles.len() as f64;
    let residuals = || {
        physics_profiles
            .iter()
            .zip(measured_profiles)
            .map(|(p, m)| {
                m.values()
                    .iter()
                    .zip(p.values())
                    .map(|(m, p)| m - p)
                    .collect::<Vec<f64>>()
            })
    };
    let mut offsets = vec![0.0; slots];
    for r in residuals() {
        for (o, v) in offsets.iter_mut().zip(&r) {
            *o += v;
        }
    }
    offsets.iter_mut().for_each(|o| *o /= days);
    let mut ss = 0.0;
    for r in residuals() {
        ss += r
            .iter()
            .zip(&offsets)
            .map(|(v, o)| (v - o).powi(2))
            .sum::<f64>();
    }
    let u_scale = (ss / (days * slots as f64)).sqrt();
    Ok(ResidualCorrector { offsets, u_scale })
}

/// Apply a corrector to a physics profile: `h(x') + u`, clipped at 0 kW.
pub fn fuse_physics_data<C: DataCorrector + ?Sized>(
    physics: &LoadProfile,
    corrector: &C,
    seed: u64,
) -> Result<LoadProfile, ScenarioError> {
    let corrected = corrector.correct(physics)?;
    let scale = corrector.deviation_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = corrected
        .into_iter()
        .map(|v| {
            let u = if scale > 0.0 {
                let z: f64 = StandardNormal.sample(&mut rng);
                scale * z
            } else {
                0.0
            };
            (v + u).max(0.0)
        })
        .collect();
    Ok(physics.with_values(values)?)
}
