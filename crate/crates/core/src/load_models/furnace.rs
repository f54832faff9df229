//! Electric arc / refining furnace heat cycle: ramp up, banded plateau, ramp down.
//!
//! Times are in seconds on an arbitrary origin; powers in kW.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{require_finite, ModelError};

/// Piecewise-constant relative deviation ε(t) over the plateau.
///
/// Sample `k` covers `[plateau_start + k*interval, plateau_start + (k+1)*interval)`;
/// times past the last sample reuse it. An empty series means ε ≡ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BandNoise {
    pub interval: f64,
    pub samples: Vec<f64>,
}

impl BandNoise {
    pub fn zero() -> Self {
        Self::default()
    }

    /// i.i.d. uniform samples on `[-delta_max, delta_max]`, reproducible from `seed`.
    pub fn seeded(seed: u64, delta_max: f64, interval: f64, span: f64) -> Self {
        let count = if interval > 0.0 && span > 0.0 {
            (span / interval).ceil() as usize
        } else {
            0
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..count)
            .map(|_| {
                if delta_max > 0.0 {
                    rng.random_range(-delta_max..=delta_max)
                } else {
                    0.0
                }
            })
            .collect();
        Self { interval, samples }
    }

    fn at(&self, since_plateau_start: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let k = (since_plateau_start.max(0.0) / self.interval).floor() as usize;
        self.samples[k.min(self.samples.len() - 1)]
    }
}

/// One furnace heat from power-on `t_on` to power-off `t_off`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FurnaceCycleSpec {
    pub t_on: f64,
    pub t_off: f64,
    pub ramp_up: f64,
    pub ramp_down: f64,
    pub p_rated: f64,
    pub delta_max: f64,
    pub band_noise: BandNoise,
}

impl FurnaceCycleSpec {
    /// Cycle with ε ≡ 0.
    pub fn flat(t_on: f64, t_off: f64, ramp_up: f64, ramp_down: f64, p_rated: f64) -> Self {
        Self {
            t_on,
            t_off,
            ramp_up,
            ramp_down,
            p_rated,
            delta_max: 0.0,
            band_noise: BandNoise::zero(),
        }
    }

    /// Cycle whose plateau noise is drawn from `seed` at `noise_interval` resolution.
    #[allow(clippy::too_many_arguments)]
    pub fn seeded(
        t_on: f64,
        t_off: f64,
        ramp_up: f64,
        ramp_down: f64,
        p_rated: f64,
        delta_max: f64,
        noise_interval: f64,
        seed: u64,
    ) -> Self {
        let plateau = (t_off - ramp_down) - (t_on + ramp_up);
        Self {
            t_on,
            t_off,
            ramp_up,
            ramp_down,
            p_rated,
            delta_max,
            band_noise: BandNoise::seeded(seed, delta_max, noise_interval, plateau),
        }
    }

    pub fn plateau_start(&self) -> f64 {
        self.t_on + self.ramp_up
    }

    pub fn plateau_end(&self) -> f64 {
        self.t_off - self.ramp_down
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, v) in [
            ("t_on", self.t_on),
            ("t_off", self.t_off),
            ("ramp_up", self.ramp_up),
            ("ramp_down", self.ramp_down),
            ("p_rated", self.p_rated),
            ("delta_max", self.delta_max),
        ] {
            require_finite(field, v)?;
        }
        let bad = |field: &'static str, reason: String| {
            Err(ModelError::InvalidParameter { field, reason })
        };
        if self.ramp_up < 0.0 {
            return bad("ramp_up", format!("must be >= 0, got {}", self.ramp_up));
        }
        if self.ramp_down < 0.0 {
            return bad("ramp_down", format!("must be >= 0, got {}", self.ramp_down));
        }
        if self.p_rated <= 0.0 {
            return bad("p_rated", format!("must be > 0, got {}", self.p_rated));
        }
        if self.delta_max < 0.0 {
            return bad("delta_max", format!("must be >= 0, got {}", self.delta_max));
        }
        if self.plateau_start() > self.plateau_end() {
            return bad(
                "t_off",
                format!(
                    "t_on + ramp_up ({}) exceeds t_off - ramp_down ({})",
                    self.plateau_start(),
                    self.plateau_end()
                ),
            );
        }
        if !self.band_noise.samples.is_empty() && !(self.band_noise.interval > 0.0) {
            return bad(
                "band_noise",
                format!("interval must be > 0, got {}", self.band_noise.interval),
            );
        }
        if let Some(e) = self
            .band_noise
            .samples
            .iter()
            .find(|e| !e.is_finite() || e.abs() > self.delta_max)
        {
            return bad(
                "band_noise",
                format!("deviation {e} outside ±{}", self.delta_max),
            );
        }
        Ok(())
    }
}

/// Furnace power at time `t` (seconds).
pub fn eaf_power(t: f64, spec: &FurnaceCycleSpec) -> Result<f64, ModelError> {
    spec.validate()?;
    require_finite("t", t)?;
    let up_end = spec.plateau_start();
    let down_start = spec.plateau_end();
    let p = if t > spec.t_on && t <= up_end {
        spec.p_rated / spec.ramp_up * (t - spec.t_on)
    } else if t > up_end && t <= down_start {
        (1.0 + spec.band_noise.at(t - up_end)) * spec.p_rated
    } else if t > down_start && t <= spec.t_off {
        spec.p_rated / spec.ramp_down * (spec.t_off - t)
    } else {
        0.0
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_starts_at_zero_and_meets_plateau() {
        let spec = FurnaceCycleSpec::flat(100.0, 3000.0, 5.0, 4.0, 20_000.0);
        assert_eq!(eaf_power(100.0, &spec).unwrap(), 0.0);
        assert_eq!(eaf_power(105.0, &spec).unwrap(), 20_000.0);
        assert_eq!(eaf_power(102.5, &spec).unwrap(), 10_000.0);
        assert_eq!(eaf_power(2996.0, &spec).unwrap(), 20_000.0);
        assert_eq!(eaf_power(2998.0, &spec).unwrap(), 10_000.0);
        assert_eq!(eaf_power(3000.0, &spec).unwrap(), 0.0);
        assert_eq!(eaf_power(99.0, &spec).unwrap(), 0.0);
        assert_eq!(eaf_power(3001.0, &spec).unwrap(), 0.0);
    }

    #[test]
    fn plateau_applies_band_deviation() {
        let mut spec = FurnaceCycleSpec::flat(0.0, 100.0, 5.0, 5.0, 20_000.0);
        spec.delta_max = 0.1;
        spec.band_noise = BandNoise {
            interval: 100.0,
            samples: vec![0.05],
        };
        assert_eq!(eaf_power(50.0, &spec).unwrap(), 21_000.0);
    }

    #[test]
    fn rejects_overlapping_ramps() {
        let spec = FurnaceCycleSpec::flat(0.0, 8.0, 5.0, 4.0, 1.0);
        assert!(matches!(
            eaf_power(1.0, &spec),
            Err(ModelError::InvalidParameter { field: "t_off", .. })
        ));
    }

    #[test]
    fn rejects_noise_outside_band() {
        let mut spec = FurnaceCycleSpec::flat(0.0, 100.0, 5.0, 5.0, 1.0);
        spec.delta_max = 0.01;
        spec.band_noise = BandNoise {
            interval: 1.0,
            samples: vec![0.02],
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn seeded_noise_is_reproducible_and_bounded() {
        let a = FurnaceCycleSpec::seeded(0.0, 3600.0, 30.0, 20.0, 4000.0, 0.05, 10.0, 7);
        let b = FurnaceCycleSpec::seeded(0.0, 3600.0, 30.0, 20.0, 4000.0, 0.05, 10.0, 7);
        let c = FurnaceCycleSpec::seeded(0.0, 3600.0, 30.0, 20.0, 4000.0, 0.05, 10.0, 8);
        assert_eq!(a, b);
        assert_ne!(a.band_noise, c.band_noise);
        assert_eq!(a.band_noise.samples.len(), 355);
        assert!(a.band_noise.samples.iter().all(|e| e.abs() <= 0.05));
        a.validate().unwrap();
    }
}
