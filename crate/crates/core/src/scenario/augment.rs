//! Densification of coarse profiles and synthesis of additional days.

use chrono::Duration;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::interp::Pchip;
use super::ScenarioError;
use crate::profile::LoadProfile;

/// Resample `profile` onto a grid `k = target_len / len` times finer.
///
/// Original samples land on indices `i*k` unchanged; in-between samples follow
/// the monotone cubic through the originals. Samples after the last original
/// hold its value.
pub fn interpolate_profile(
    profile: &LoadProfile,
    target_len: usize,
) -> Result<LoadProfile, ScenarioError> {
    let n = profile.len();
    if target_len == 0 || !target_len.is_multiple_of(n) {
        return Err(ScenarioError::ResamplingGrid {
            source_len: n,
            target_len,
        });
    }
    let k = target_len / n;
    if k == 1 {
        return Ok(profile.clone());
    }
    let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let spline = Pchip::new(&xs, profile.values()).expect("profile grid is strictly increasing");
    let values = (0..target_len)
        .map(|j| {
            if j % k == 0 {
                profile.values()[j / k]
            } else {
                spline.eval(j as f64 / k as f64)
            }
        })
        .collect();
    Ok(LoadProfile::new(
        profile.start_time(),
        profile.step_minutes() / k as f64,
        values,
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentationConfig {
    pub target_points_per_day: usize,
    pub days_to_generate: usize,
    pub noise_seed: u64,
    /// Standard deviation of the multiplicative noise, as a fraction of the local value.
    pub noise_scale: f64,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        Self {
            target_points_per_day: 96,
            days_to_generate: 1,
            noise_seed: 0,
            noise_scale: 0.05,
        }
    }
}

impl AugmentationConfig {
    pub fn validate(&self, source_len: usize) -> Result<(), ScenarioError> {
        if self.target_points_per_day == 0 || !self.target_points_per_day.is_multiple_of(source_len)
        {
            return Err(ScenarioError::InvalidConfig(format!(
                "target_points_per_day ({}) must be a positive multiple of the source length ({source_len})",
                self.target_points_per_day
            )));
        }
        if !(self.noise_scale.is_finite() && self.noise_scale >= 0.0) {
            return Err(ScenarioError::InvalidConfig(format!(
                "noise_scale must be finite and >= 0, got {}",
                self.noise_scale
            )));
        }
        Ok(())
    }
}

/// Generate `cfg.days_to_generate` days from one base day.
///
/// Day `d` is the densified base plus Gaussian noise of standard deviation
/// `noise_scale * |value|`, clipped at 0 kW, dated `d + 1` base-durations after
/// the base. Each day draws from its own stream of the seeded generator, so days
/// are independent of generation order.
pub fn augment_days(
    base: &LoadProfile,
    cfg: &AugmentationConfig,
) -> Result<Vec<LoadProfile>, ScenarioError> {
    cfg.validate(base.len())?;
    let dense = interpolate_profile(base, cfg.target_points_per_day)?;
    let span_ms = (base.duration_minutes() * 60_000.0).round() as i64;
    (0..cfg.days_to_generate)
        .map(|day| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.noise_seed);
            rng.set_stream(day as u64);
            let values = dense
                .values()
                .iter()
                .map(|&v| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (v + cfg.noise_scale * v.abs() * z).max(0.0)
                })
                .collect();
            let start = dense.start_time() + Duration::milliseconds(span_ms * (day as i64 + 1));
            Ok(LoadProfile::new(start, dense.step_minutes(), values)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{NaiveDate, NaiveDateTime};

    fn t0() -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2019, 3, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap()
    }

    fn day() -> LoadProfile {
        let values = (0..24)
            .map(|h| 2000.0 + 800.0 * ((h as f64) / 24.0 * std::f64::consts::TAU).sin())
            .collect();
        LoadProfile::new(t0(), 60.0, values).unwrap()
    }

    #[test]
    fn hourly_to_quarter_hourly() {
        let dense = interpolate_profile(&day(), 96).unwrap();
        assert_eq!(dense.len(), 96);
        assert_eq!(dense.step_minutes(), 15.0);
        for i in 0..24 {
            assert_eq!(dense.values()[4 * i], day().values()[i]);
        }
    }

    #[test]
    fn constant_stays_constant() {
        let p = LoadProfile::constant(t0(), 60.0, 24, 750.0).unwrap();
        let dense = interpolate_profile(&p, 72).unwrap();
        assert!(dense.values().iter().all(|&v| v == 750.0));
    }

    #[test]
    fn same_length_is_identity() {
        assert_eq!(interpolate_profile(&day(), 24).unwrap(), day());
    }

    #[test]
    fn non_multiple_rejected() {
        assert!(matches!(
            interpolate_profile(&day(), 50),
            Err(ScenarioError::ResamplingGrid { .. })
        ));
        assert!(interpolate_profile(&day(), 0).is_err());
    }

    #[test]
    fn zero_days_is_empty() {
        let cfg = AugmentationConfig {
            days_to_generate: 0,
            ..Default::default()
        };
        assert!(augment_days(&day(), &cfg).unwrap().is_empty());
    }

    #[test]
    fn zero_noise_repeats_dense_base() {
        let cfg = AugmentationConfig {
            days_to_generate: 3,
            noise_scale: 0.0,
            ..Default::default()
        };
        let dense = interpolate_profile(&day(), 96).unwrap();
        let days = augment_days(&day(), &cfg).unwrap();
        assert_eq!(days.len(), 3);
        for (i, d) in days.iter().enumerate() {
            assert_eq!(d.values(), dense.values());
            assert_eq!(d.start_time(), t0() + Duration::days(i as i64 + 1));
        }
    }

    #[test]
    fn seeded_days_are_reproducible_and_distinct() {
        let cfg = AugmentationConfig {
            days_to_generate: 2,
            noise_seed: 42,
            noise_scale: 0.1,
            ..Default::default()
        };
        let a = augment_days(&day(), &cfg).unwrap();
        let b = augment_days(&day(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].values(), a[1].values());
        assert!(a.iter().flat_map(|d| d.values()).all(|&v| v >= 0.0));
    }

    #[test]
    fn invalid_noise_scale() {
        let cfg = AugmentationConfig {
            noise_scale: -0.1,
            ..Default::default()
        };
        assert!(matches!(
            augment_days(&day(), &cfg),
            Err(ScenarioError::InvalidConfig(_))
        ));
    }
}
