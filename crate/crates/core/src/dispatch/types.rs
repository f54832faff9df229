use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::DispatchError;
use crate::load_models::StorageSpec;
use crate::profile::LoadProfile;

/// Flexible load classes, in dispatch merit order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadKind {
    Heating,
    Rotating,
    Storage,
}

impl LoadKind {
    pub const ALL: [LoadKind; 3] = [LoadKind::Heating, LoadKind::Rotating, LoadKind::Storage];

    fn bit(self) -> u8 {
        match self {
            LoadKind::Heating => 0b001,
            LoadKind::Rotating => 0b010,
            LoadKind::Storage => 0b100,
        }
    }

    pub fn letter(self) -> char {
        match self {
            LoadKind::Heating => 'H',
            LoadKind::Rotating => 'R',
            LoadKind::Storage => 'S',
        }
    }
}

/// Nonempty set of load classes allowed to respond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlexibleCase(u8);

impl FlexibleCase {
    pub const HRS: FlexibleCase = FlexibleCase(0b111);
    pub const HR: FlexibleCase = FlexibleCase(0b011);
    pub const HS: FlexibleCase = FlexibleCase(0b101);
    pub const RS: FlexibleCase = FlexibleCase(0b110);
    pub const S: FlexibleCase = FlexibleCase(0b100);
    pub const R: FlexibleCase = FlexibleCase(0b010);
    pub const H: FlexibleCase = FlexibleCase(0b001);

    /// The seven cases in database column order (a through g).
    pub const ALL: [FlexibleCase; 7] = [
        Self::HRS,
        Self::HR,
        Self::HS,
        Self::RS,
        Self::S,
        Self::R,
        Self::H,
    ];

    pub fn from_members(members: &[LoadKind]) -> Option<Self> {
        let bits = members.iter().fold(0u8, |acc, m| acc | m.bit());
        (bits != 0).then_some(Self(bits))
    }

    pub fn contains(self, kind: LoadKind) -> bool {
        self.0 & kind.bit() != 0
    }

    pub fn members(self) -> Vec<LoadKind> {
        LoadKind::ALL
            .into_iter()
            .filter(|k| self.contains(*k))
            .collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// The case minus `kind`, or `None` if that would leave it empty.
    pub fn without(self, kind: LoadKind) -> Option<Self> {
        let bits = self.0 & !kind.bit();
        (bits != 0).then_some(Self(bits))
    }

    pub fn is_subset_of(self, other: FlexibleCase) -> bool {
        self.0 & !other.0 == 0
    }

    /// `H-R-S` style label.
    pub fn label(self) -> String {
        self.members()
            .iter()
            .map(|k| k.letter().to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for FlexibleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for FlexibleCase {
    type Err = DispatchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| DispatchError::UnknownCase(s.to_string()))
    }
}

impl Serialize for FlexibleCase {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for FlexibleCase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Response scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetId {
    OnlyNight,
    AllDay,
    OnlyDaytime,
}

impl TargetId {
    pub const ALL: [TargetId; 3] = [TargetId::OnlyNight, TargetId::AllDay, TargetId::OnlyDaytime];

    pub fn as_str(self) -> &'static str {
        match self {
            TargetId::OnlyNight => "only_night",
            TargetId::AllDay => "all_day",
            TargetId::OnlyDaytime => "only_daytime",
        }
    }
}

impl fmt::Display for TargetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TargetId {
    type Err = DispatchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| DispatchError::UnknownTarget(s.to_string()))
    }
}

/// Requested reduction (kW) per timestep. Demand outside `window` is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseTarget {
    id: TargetId,
    window: Vec<usize>,
    demand: Vec<f64>,
}

impl ResponseTarget {
    /// `demand` spans the whole horizon; `window` lists the response timesteps.
    pub fn new(id: TargetId, window: Vec<usize>, demand: Vec<f64>) -> Result<Self, DispatchError> {
        let mut window = window;
        window.sort_unstable();
        window.dedup();
        if window.is_empty() {
            return Err(DispatchError::InvalidTarget("window is empty".into()));
        }
        if let Some(&t) = window.iter().find(|&&t| t >= demand.len()) {
            return Err(DispatchError::InvalidTarget(format!(
                "window index {t} beyond horizon of {} steps",
                demand.len()
            )));
        }
        for (t, &d) in demand.iter().enumerate() {
            if !(d.is_finite() && d >= 0.0) {
                return Err(DispatchError::InvalidTarget(format!(
                    "demand at step {t} must be finite and >= 0, got {d}"
                )));
            }
            if d != 0.0 && window.binary_search(&t).is_err() {
                return Err(DispatchError::InvalidTarget(format!(
                    "step {t} is outside the window but requests {d} kW"
                )));
            }
        }
        Ok(Self { id, window, demand })
    }

    /// Same reduction `kw` at every window step of a `horizon`-step day.
    pub fn uniform(
        id: TargetId,
        horizon: usize,
        window: Vec<usize>,
        kw: f64,
    ) -> Result<Self, DispatchError> {
        let mut demand = vec![0.0; horizon];
        for &t in &window {
            if t < horizon {
                demand[t] = kw;
            }
        }
        Self::new(id, window, demand)
    }

    pub fn id(&self) -> TargetId {
        self.id
    }

    pub fn window(&self) -> &[usize] {
        &self.window
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn horizon(&self) -> usize {
        self.demand.len()
    }

    pub fn in_window(&self, t: usize) -> bool {
        self.window.binary_search(&t).is_ok()
    }

    /// Window membership per timestep.
    pub fn window_mask(&self) -> Vec<bool> {
        (0..self.horizon()).map(|t| self.in_window(t)).collect()
    }
}

/// Closed power interval (kW).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lo - tol && v <= self.hi + tol
    }
}

/// Incentive compensation cost `a·P² + b·P`, valid for `p_min ≤ P ≤ p_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrCostParams {
    pub a: f64,
    pub b: f64,
    pub p_min: f64,
    pub p_max: f64,
}

/// Dispatch limits. Envelopes, when given, hold one admissible response
/// interval per timestep for the corresponding curtailable load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispatchParams {
    pub heat_min: f64,
    pub heat_max: f64,
    pub rot_min: f64,
    pub rot_max: f64,
    pub storage: StorageSpec,
    #[serde(default)]
    pub heat_envelope: Option<Vec<Interval>>,
    #[serde(default)]
    pub rot_envelope: Option<Vec<Interval>>,
}

impl Default for DispatchParams {
    /// Scheduling limits of the reference industrial park.
    fn default() -> Self {
        Self {
            heat_min: 0.0,
            heat_max: 4500.0,
            rot_min: 0.0,
            rot_max: 4000.0,
            storage: StorageSpec::default(),
            heat_envelope: None,
            rot_envelope: None,
        }
    }
}

impl DispatchParams {
    pub fn validate(&self) -> Result<(), DispatchError> {
        for (name, lo, hi) in [
            ("heating", self.heat_min, self.heat_max),
            ("rotating", self.rot_min, self.rot_max),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(DispatchError::InvalidParams(format!(
                    "{name} bounds must be finite with min <= max, got [{lo}, {hi}]"
                )));
            }
        }
        for (name, env) in [
            ("heat_envelope", &self.heat_envelope),
            ("rot_envelope", &self.rot_envelope),
        ] {
            if let Some(env) = env {
                if let Some(iv) = env
                    .iter()
                    .find(|iv| !(iv.lo.is_finite() && iv.hi.is_finite()))
                {
                    return Err(DispatchError::InvalidParams(format!(
                        "{name} has a non-finite interval [{}, {}]",
                        iv.lo, iv.hi
                    )));
                }
            }
        }
        self.storage.validate()?;
        Ok(())
    }

    pub(crate) fn bounds(&self, kind: LoadKind) -> (f64, f64, Option<&Vec<Interval>>) {
        match kind {
            LoadKind::Heating => (self.heat_min, self.heat_max, self.heat_envelope.as_ref()),
            LoadKind::Rotating => (self.rot_min, self.rot_max, self.rot_envelope.as_ref()),
            LoadKind::Storage => (0.0, -self.storage.max_discharge_kw, None),
        }
    }
}

/// Baseline consumption of each load class on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub heating: LoadProfile,
    pub rotating: LoadProfile,
    /// Storage operating schedule outside response events (signed kW). Informational:
    /// the storage response capability comes from its SOC, not from this profile.
    pub storage: LoadProfile,
}

impl Baselines {
    pub fn get(&self, kind: LoadKind) -> &LoadProfile {
        match kind {
            LoadKind::Heating => &self.heating,
            LoadKind::Rotating => &self.rotating,
            LoadKind::Storage => &self.storage,
        }
    }

    pub fn horizon(&self) -> usize {
        self.heating.len()
    }

    pub fn step_hours(&self) -> f64 {
        self.heating.step_hours()
    }

    pub fn validate_for(&self, target: &ResponseTarget) -> Result<(), DispatchError> {
        if !self.heating.same_grid(&self.rotating) || !self.heating.same_grid(&self.storage) {
            return Err(DispatchError::GridMismatch(
                "baselines do not share a common start, step and length".into(),
            ));
        }
        if self.horizon() != target.horizon() {
            return Err(DispatchError::GridMismatch(format!(
                "target spans {} steps but baselines have {}",
                target.horizon(),
                self.horizon()
            )));
        }
        Ok(())
    }

    /// Sum of all three baselines per timestep.
    pub fn total(&self) -> Vec<f64> {
        self.heating
            .values()
            .iter()
            .zip(self.rotating.values())
            .zip(self.storage.values())
            .map(|((h, r), s)| h + r + s)
            .collect()
    }
}

/// Outcome of dispatching one flexible case against one response target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchResult {
    pub case: FlexibleCase,
    pub target: TargetId,
    pub step_hours: f64,
    pub demand: Vec<f64>,
    pub heating: Vec<f64>,
    pub rotating: Vec<f64>,
    /// Signed storage power: positive charging, negative discharging (kW).
    pub storage_power: Vec<f64>,
    /// SOC at the start of each step plus the terminal SOC (`len + 1` entries).
    pub soc: Vec<f64>,
    /// Requested energy (kWh).
    pub f_pre: f64,
    /// Delivered energy (kWh).
    pub f_act: f64,
    /// Unresponsiveness `f_pre - f_act` (kWh).
    pub unresponsiveness: f64,
    /// `soc_T - soc_0`; zero whenever the terminal condition was met.
    pub terminal_soc_gap: f64,
    pub warnings: Vec<String>,
}

impl DispatchResult {
    pub fn horizon(&self) -> usize {
        self.demand.len()
    }

    pub fn storage_response(&self, t: usize) -> f64 {
        (-self.storage_power[t]).max(0.0)
    }

    /// Total reduction delivered at step `t` (kW).
    pub fn delivered(&self, t: usize) -> f64 {
        self.heating[t] + self.rotating[t] + self.storage_response(t)
    }

    pub fn delivered_series(&self) -> Vec<f64> {
        (0..self.horizon()).map(|t| self.delivered(t)).collect()
    }

    /// Requested minus delivered reduction per step (kW).
    pub fn unresponsive_series(&self) -> Vec<f64> {
        (0..self.horizon())
            .map(|t| (self.demand[t] - self.delivered(t)).max(0.0))
            .collect()
    }

    /// Response of one load class per step (kW); storage counts discharge only.
    pub fn member_response(&self, kind: LoadKind) -> Vec<f64> {
        match kind {
            LoadKind::Heating => self.heating.clone(),
            LoadKind::Rotating => self.rotating.clone(),
            LoadKind::Storage => (0..self.horizon())
                .map(|t| self.storage_response(t))
                .collect(),
        }
    }
}
