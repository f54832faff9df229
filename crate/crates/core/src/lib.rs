//! Flexible-load demand response toolkit for industrial parks.
//!
//! Physical models of rotating (rolling-mill), heating (arc furnace), storage and
//! building-thermal loads; scenario densification and augmentation; an
//! unresponsiveness-minimizing dispatcher with a brute-force oracle; response
//! contribution metrics; and a persisted offline response database.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispatch;
pub mod evaluation;
pub mod load_models;
pub mod offline_db;
pub mod park;
pub mod profile;
pub mod scenario;

pub use profile::{LoadProfile, ProfileError};
