//! Response-contribution measures and model-quality metrics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispatch::{DispatchResult, LoadKind};
use crate::profile::LoadProfile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("series differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("reference series is constant; R² is undefined")]
    ConstantReference,
    #[error("no loads given")]
    NoLoads,
}

fn paired(a: &[f64], b: &[f64], needed: usize) -> Result<(), EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < needed {
        return Err(EvalError::TooShort {
            needed,
            got: a.len(),
        });
    }
    Ok(())
}

/// Response contribution of a single load: index before minus index after.
pub fn delta_q(q: f64, q_prime: f64) -> f64 {
    q - q_prime
}

/// RMSE-style contribution of a response, `sqrt(mean((Q - Q')²))`.
pub fn rmse_contribution(q: &[f64], q_prime: &[f64]) -> Result<f64, EvalError> {
    rmsd(q, q_prime)
}

/// Root-mean-square deviation.
pub fn rmsd(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    paired(a, b, 1)?;
    let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((ss / a.len() as f64).sqrt())
}

/// Mean absolute deviation.
pub fn mad(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    paired(a, b, 1)?;
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    Ok(s / a.len() as f64)
}

/// Coefficient of determination `1 - SS_res / SS_tot`, unclamped.
pub fn r_square(y: &[f64], y_hat: &[f64]) -> Result<f64, EvalError> {
    paired(y, y_hat, 2)?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if ss_tot == 0.0 {
        return Err(EvalError::ConstantReference);
    }
    let ss_res: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadContribution {
    /// Total index before minus total index after the response.
    pub delta_q: f64,
    /// RMSE contribution of this load alone.
    pub delta_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionReport {
    pub per_load: BTreeMap<LoadKind, LoadContribution>,
    /// RMSE contribution of all loads together, on the summed index series.
    pub delta_eps_omega: f64,
    pub n: usize,
}

/// Contribution of each load and of the load set, from index series before
/// (`pre`) and after (`post`) the response.
pub fn contribution_report(
    pre: &BTreeMap<LoadKind, Vec<f64>>,
    post: &BTreeMap<LoadKind, Vec<f64>>,
) -> Result<ContributionReport, EvalError> {
    if pre.is_empty() {
        return Err(EvalError::NoLoads);
    }
    if pre.len() != post.len() || pre.keys().ne(post.keys()) {
        return Err(EvalError::LengthMismatch {
            left: pre.len(),
            right: post.len(),
        });
    }
    let n = pre.values().next().map_or(0, Vec::len);
    let mut per_load = BTreeMap::new();
    let mut sum_pre = vec![0.0; n];
    let mut sum_post = vec![0.0; n];
    for (kind, q) in pre {
        let q_prime = &post[kind];
        paired(q, q_prime, 1)?;
        paired(q, &sum_pre, 1)?;
        per_load.insert(
            *kind,
            LoadContribution {
                delta_q: delta_q(q.iter().sum(), q_prime.iter().sum()),
                delta_eps: rmse_contribution(q, q_prime)?,
            },
        );
        for k in 0..n {
            sum_pre[k] += q[k];
            sum_post[k] += q_prime[k];
        }
    }
    Ok(ContributionReport {
        per_load,
        delta_eps_omega: rmse_contribution(&sum_pre, &sum_post)?,
        n,
    })
}

/// Index series "remaining unresponsiveness" per step (kW): the requested
/// reduction before the response, and what is still missing after it.
pub fn unresponsiveness_index(result: &DispatchResult) -> (Vec<f64>, Vec<f64>) {
    (result.demand.clone(), result.unresponsive_series())
}

/// Peak-to-valley difference of a profile (kW).
pub fn peak_valley_difference(profile: &LoadProfile) -> f64 {
    profile.peak() - profile.valley()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_q_examples() {
        assert_eq!(delta_q(3.0, 3.0), 0.0);
        assert_eq!(delta_q(10.0, 4.0), 6.0);
        assert_eq!(delta_q(0.0, 5.0), -5.0);
    }

    #[test]
    fn contribution_examples() {
        assert_eq!(rmse_contribution(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse_contribution(&[2.0, 2.0], &[0.0, 0.0]).unwrap(), 2.0);
        assert_eq!(rmse_contribution(&[3.0], &[1.0]).unwrap(), 2.0);
        assert!(matches!(
            rmse_contribution(&[], &[]),
            Err(EvalError::TooShort { .. })
        ));
        assert!(matches!(
            rmse_contribution(&[1.0], &[1.0, 2.0]),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn rmsd_mad_examples() {
        assert_eq!(rmsd(&[1.0, 3.0], &[2.0, 2.0]).unwrap(), 1.0);
        assert_eq!(mad(&[1.0, 3.0], &[2.0, 2.0]).unwrap(), 1.0);
        assert!((rmsd(&[0.0, 4.0], &[0.0, 0.0]).unwrap() - 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(mad(&[0.0, 4.0], &[0.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn r_square_examples() {
        let y = [1.0, 2.0, 3.0];
        assert_eq!(r_square(&y, &y).unwrap(), 1.0);
        assert_eq!(r_square(&y, &[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert!((r_square(&y, &[1.0, 2.0, 4.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!(r_square(&y, &[10.0, -5.0, 0.0]).unwrap() < 0.0);
        assert_eq!(
            r_square(&[4.0, 4.0], &[4.0, 4.0]),
            Err(EvalError::ConstantReference)
        );
        assert!(matches!(
            r_square(&[1.0], &[1.0]),
            Err(EvalError::TooShort { .. })
        ));
    }

    #[test]
    fn report_aggregates_loads() {
        let pre = BTreeMap::from([
            (LoadKind::Heating, vec![4.0, 4.0]),
            (LoadKind::Rotating, vec![2.0, 0.0]),
        ]);
        let post = BTreeMap::from([
            (LoadKind::Heating, vec![1.0, 1.0]),
            (LoadKind::Rotating, vec![0.0, 0.0]),
        ]);
        let r = contribution_report(&pre, &post).unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(r.per_load[&LoadKind::Heating].delta_q, 6.0);
        assert_eq!(r.per_load[&LoadKind::Heating].delta_eps, 3.0);
        assert_eq!(r.per_load[&LoadKind::Rotating].delta_q, 2.0);
        // Summed: [6, 4] vs [1, 1] → sqrt((25 + 9) / 2).
        assert!((r.delta_eps_omega - 17f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            contribution_report(&BTreeMap::new(), &BTreeMap::new()),
            Err(EvalError::NoLoads)
        );
    }
}
