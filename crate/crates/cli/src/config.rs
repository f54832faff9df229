//! Run configuration, read from a TOML file.
//!
//! Every section is optional and falls back to the bundled demo park:
//!
//! ```toml
//! seed = 2019
//! out_dir = "out"
//!
//! [inputs]            # measured baselines; all three or none
//! heating = "heating.csv"
//! rotating = "rotating.csv"
//! storage = "storage.csv"
//!
//! [park]              # physical load specs and response targets
//! steps = 24
//! [park.rolling]
//! pulse_power_kw = 1500.0
//!
//! [dispatch]          # scheduling limits
//! heat_max = 4500.0
//! [dispatch.storage]
//! capacity_kwh = 7500.0
//!
//! [augment]
//! days_to_generate = 3
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use anyhow::Context;
use flexpark::dispatch::{Baselines, DispatchParams, ResponseTarget};
use flexpark::park::{ParkSpec, DEMO_SEED};
use flexpark::scenario::{read_profile_csv, AugmentationConfig};
use flexpark::LoadProfile;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputFiles {
    pub heating: Option<PathBuf>,
    pub rotating: Option<PathBuf>,
    pub storage: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub inputs: InputFiles,
    pub park: ParkSpec,
    pub dispatch: DispatchParams,
    pub augment: AugmentationConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEMO_SEED,
            out_dir: PathBuf::from("out"),
            inputs: InputFiles::default(),
            park: ParkSpec::default(),
            dispatch: DispatchParams::default(),
            augment: AugmentationConfig::default(),
        }
    }
}

impl RunConfig {
    /// Load a config file, or the defaults when no path is given, and apply the
    /// command-line overrides.
    pub fn load(
        path: Option<&Path>,
        seed: Option<u64>,
        out: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let mut cfg = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Usage(format!("cannot read config {}: {e}", p.display()))
                })?;
                let mut cfg: RunConfig = toml::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", p.display())))?;
                let base = p.parent().unwrap_or(Path::new(""));
                for slot in [
                    &mut cfg.inputs.heating,
                    &mut cfg.inputs.rotating,
                    &mut cfg.inputs.storage,
                ] {
                    if let Some(f) = slot.as_mut() {
                        if f.is_relative() {
                            *f = base.join(&*f);
                        }
                    }
                }
                if cfg.out_dir.is_relative() {
                    cfg.out_dir = base.join(&cfg.out_dir);
                }
                cfg
            }
        };
        if let Some(s) = seed {
            cfg.seed = s;
        }
        if let Some(o) = out {
            cfg.out_dir = o;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.dispatch
            .validate()
            .map_err(|e| CliError::Usage(format!("dispatch: {e}")))?;
        let InputFiles {
            heating,
            rotating,
            storage,
        } = &self.inputs;
        let given = [heating, rotating, storage]
            .iter()
            .filter(|p| p.is_some())
            .count();
        if given != 0 && given != 3 {
            return Err(CliError::Usage(
                "inputs: give all of heating, rotating and storage, or none".into(),
            ));
        }
        for (name, p) in [
            ("heating", heating),
            ("rotating", rotating),
            ("storage", storage),
        ] {
            if let Some(p) = p {
                if !p.is_file() {
                    return Err(CliError::Usage(format!(
                        "inputs.{name}: {} does not exist",
                        p.display()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Baseline day: the first complete day of the input files if given,
    /// otherwise simulated from the park spec.
    pub fn baselines(&self) -> Result<Baselines, CliError> {
        match (
            &self.inputs.heating,
            &self.inputs.rotating,
            &self.inputs.storage,
        ) {
            (Some(h), Some(r), Some(s)) => Ok(Baselines {
                heating: first_day(h)?,
                rotating: first_day(r)?,
                storage: first_day(s)?,
            }),
            _ => self
                .park
                .baselines(self.seed)
                .map_err(|e| CliError::Usage(format!("park: {e}"))),
        }
    }

    pub fn targets(&self) -> Result<Vec<ResponseTarget>, CliError> {
        self.park
            .response_targets()
            .map_err(|e| CliError::Usage(format!("park.targets: {e}")))
    }
}

pub fn read_days(path: &Path) -> Result<Vec<LoadProfile>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    let series = read_profile_csv(file)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| CliError::Usage(format!("{e:#}")))?;
    Ok(series.days)
}

fn first_day(path: &Path) -> Result<LoadProfile, CliError> {
    read_days(path)?
        .into_iter()
        .next()
        .ok_or_else(|| CliError::Usage(format!("{} holds no complete day", path.display())))
}
