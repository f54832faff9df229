//! Offline response database: dispatch results for every (target, case) pair,
//! persisted as canonical JSON.
//!
//! File layout (`format_version` 1), keys sorted at every level:
//!
//! ```text
//! {
//!   "entries": { "<target>/<case>": { "constraints_ok", "dispatch", "response_value_kwh", "unresponsiveness_kwh" }, ... },
//!   "format_version": 1,
//!   "metadata": { "build_timestamp", "parameter_hash", "seed" }
//! }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dispatch::{
    check_dispatch, schedule_all_cases, Baselines, DispatchError, DispatchParams, DispatchResult,
    FlexibleCase, ResponseTarget, TargetId,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DbError {
    #[error("no response targets given")]
    NoTargets,
    #[error("target `{0}` given more than once")]
    DuplicateTarget(TargetId),
    #[error("no entry for target `{target}` and case `{case}`")]
    NotFound { target: String, case: String },
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed database at line {line}, column {column}: {message}")]
    Format {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("database format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DbEntry {
    /// Delivered response energy F_act (kWh).
    pub response_value_kwh: f64,
    /// F = F_pre - F_act (kWh).
    pub unresponsiveness_kwh: f64,
    pub constraints_ok: bool,
    pub dispatch: DispatchResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildMetadata {
    pub seed: u64,
    /// SHA-256 of the canonical JSON of the build inputs.
    pub parameter_hash: String,
    pub build_timestamp: NaiveDateTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfflineDatabase {
    pub format_version: u32,
    pub metadata: BuildMetadata,
    pub entries: BTreeMap<String, DbEntry>,
}

pub fn entry_key(target: TargetId, case: FlexibleCase) -> String {
    format!("{target}/{case}")
}

#[derive(Serialize)]
struct HashedInputs<'a> {
    baselines: &'a Baselines,
    params: &'a DispatchParams,
    targets: &'a [ResponseTarget],
    seed: u64,
}

/// Dispatch every target against all seven cases.
///
/// `seed` is the seed the baselines were generated with; it is recorded with
/// the input hash. `build_timestamp` is stored verbatim so rebuilds stay byte-identical.
pub fn build_database(
    baselines: &Baselines,
    params: &DispatchParams,
    targets: &[ResponseTarget],
    seed: u64,
    build_timestamp: NaiveDateTime,
) -> Result<OfflineDatabase, DbError> {
    if targets.is_empty() {
        return Err(DbError::NoTargets);
    }
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].iter().any(|o| o.id() == t.id()) {
            return Err(DbError::DuplicateTarget(t.id()));
        }
    }
    let inputs = serde_json::to_vec(&HashedInputs {
        baselines,
        params,
        targets,
        seed,
    })
    .expect("inputs serialize");
    let parameter_hash = hex::encode(Sha256::digest(&inputs));

    let mut entries = BTreeMap::new();
    for target in targets {
        for result in schedule_all_cases(target, baselines, params)? {
            let violations = check_dispatch(&result, target, baselines, params)?;
            let mut dispatch = result;
            dispatch
                .warnings
                .extend(violations.iter().map(|v| format!("constraint: {v}")));
            entries.insert(
                entry_key(target.id(), dispatch.case),
                DbEntry {
                    response_value_kwh: dispatch.f_act,
                    unresponsiveness_kwh: dispatch.unresponsiveness,
                    constraints_ok: violations.is_empty(),
                    dispatch,
                },
            );
        }
    }
    Ok(OfflineDatabase {
        format_version: FORMAT_VERSION,
        metadata: BuildMetadata {
            seed,
            parameter_hash,
            build_timestamp,
        },
        entries,
    })
}

impl OfflineDatabase {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn query(&self, target: TargetId, case: FlexibleCase) -> Result<&DbEntry, DbError> {
        self.entries
            .get(&entry_key(target, case))
            .ok_or_else(|| DbError::NotFound {
                target: target.to_string(),
                case: case.to_string(),
            })
    }

    /// Query by textual ids; unknown ids are reported as not found.
    pub fn query_str(&self, target: &str, case: &str) -> Result<&DbEntry, DbError> {
        let not_found = || DbError::NotFound {
            target: target.to_string(),
            case: case.to_string(),
        };
        let t: TargetId = target.parse().map_err(|_| not_found())?;
        let c: FlexibleCase = case.parse().map_err(|_| not_found())?;
        self.query(t, c)
    }

    /// Canonical serialized form: pretty JSON with sorted keys and a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        // Going through `Value` sorts every object's keys.
        let value = serde_json::to_value(self).expect("database serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, DbError> {
        let format = |e: serde_json::Error| DbError::Format {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(format)?;
        match value.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == FORMAT_VERSION as u64 => {}
            Some(found) => {
                return Err(DbError::VersionMismatch {
                    found,
                    expected: FORMAT_VERSION,
                })
            }
            None => {
                return Err(DbError::Format {
                    line: 1,
                    column: 1,
                    message: "missing or non-integer `format_version`".into(),
                })
            }
        }
        serde_json::from_str(text).map_err(format)
    }

    /// Write atomically: a temporary file in the target directory is renamed into place.
    pub fn save(&self, path: &Path) -> Result<(), DbError> {
        write_atomic(path, self.to_canonical_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self, DbError> {
        let text = fs::read_to_string(path).map_err(|e| DbError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }
}

/// Replace `path` with `bytes` via a temporary sibling file and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DbError> {
    let io = |e: std::io::Error| DbError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::park::{ParkSpec, DEMO_SEED};

    fn demo_db() -> OfflineDatabase {
        let spec = ParkSpec::default();
        build_database(
            &spec.baselines(DEMO_SEED).unwrap(),
            &DispatchParams::default(),
            &spec.response_targets().unwrap(),
            DEMO_SEED,
            spec.start_time(),
        )
        .unwrap()
    }

    #[test]
    fn full_grid_has_21_entries() {
        let db = demo_db();
        assert_eq!(db.len(), 21);
        assert!(db.entries.values().all(|e| e.constraints_ok));
        assert_eq!(db.metadata.parameter_hash.len(), 64);
    }

    #[test]
    fn query_known_and_unknown() {
        let db = demo_db();
        let e = db.query(TargetId::OnlyNight, FlexibleCase::HRS).unwrap();
        assert_eq!(e, db.query_str("only_night", "H-R-S").unwrap());
        assert!(matches!(
            db.query_str("only_night", "X"),
            Err(DbError::NotFound { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let db = demo_db();
        let text = db.to_canonical_json();
        let back = OfflineDatabase::from_json(&text).unwrap();
        assert_eq!(back, db);
        assert_eq!(back.to_canonical_json(), text);
    }

    #[test]
    fn version_and_truncation_errors() {
        let text = demo_db().to_canonical_json();
        let future = text.replacen("\"format_version\": 1", "\"format_version\": 2", 1);
        assert!(matches!(
            OfflineDatabase::from_json(&future),
            Err(DbError::VersionMismatch { found: 2, .. })
        ));
        let truncated = &text[..text.len() / 2];
        match OfflineDatabase::from_json(truncated) {
            Err(DbError::Format { line, .. }) => assert!(line > 1),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn empty_or_duplicate_targets_rejected() {
        let spec = ParkSpec::default();
        let b = spec.baselines(DEMO_SEED).unwrap();
        let p = DispatchParams::default();
        assert!(matches!(
            build_database(&b, &p, &[], 0, spec.start_time()),
            Err(DbError::NoTargets)
        ));
        let t = spec.response_targets().unwrap();
        let twice = vec![t[0].clone(), t[0].clone()];
        assert!(matches!(
            build_database(&b, &p, &twice, 0, spec.start_time()),
            Err(DbError::DuplicateTarget(TargetId::OnlyNight))
        ));
    }
}
