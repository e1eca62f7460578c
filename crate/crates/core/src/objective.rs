//! Min-max normalization and scalarization of the three maximized metrics
//! (SNR at Bob, security gap, sensing gain) into one minimization target.
//!
//! Normalization statistics are taken over the population being compared,
//! so a candidate's scalar is only meaningful relative to that population.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricBundle;

/// `(y - min) / (max - min)` elementwise; a constant column maps to zeros.
pub fn minmax_normalize(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidInput("cannot normalize an empty list".into()));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite value {} at position {i}",
            values[i]
        )));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if span == 0.0 {
        return Ok(vec![0.0; values.len()]);
    }
    // Clamp guards against rounding just outside [0, 1].
    Ok(values.iter().map(|v| ((v - min) / span).clamp(0.0, 1.0)).collect())
}

/// Raw objectives, their normalized negations and the summed scalar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveVector {
    /// `(snr_b_db, security_gap_db, sensing_gain_db)`.
    pub raw: [f64; 3],
    pub normalized: [f64; 3],
    /// Sum of `normalized`; lower is better.
    pub scalar: f64,
}

impl ObjectiveVector {
    pub fn raw_of(bundle: &MetricBundle) -> [f64; 3] {
        [bundle.snr_b_db, bundle.security_gap_db, bundle.sensing_gain_db]
    }
}

/// Normalizes the raw objective columns of a population and sums them.
pub fn scalarize_raw(raw: &[[f64; 3]]) -> Result<Vec<ObjectiveVector>> {
    if raw.is_empty() {
        return Err(Error::InvalidInput("cannot scalarize an empty population".into()));
    }
    let mut columns = Vec::with_capacity(3);
    for j in 0..3 {
        let negated: Vec<f64> = raw.iter().map(|r| -r[j]).collect();
        columns.push(minmax_normalize(&negated)?);
    }
    Ok(raw
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let normalized = [columns[0][i], columns[1][i], columns[2][i]];
            ObjectiveVector {
                raw: *r,
                normalized,
                scalar: normalized[0] + normalized[1] + normalized[2],
            }
        })
        .collect())
}

pub fn scalarize(bundles: &[MetricBundle]) -> Result<Vec<ObjectiveVector>> {
    let raw: Vec<[f64; 3]> = bundles.iter().map(ObjectiveVector::raw_of).collect();
    scalarize_raw(&raw)
}

/// Index of the smallest scalar; ties go to the lowest index.
pub fn argmin_scalar(objectives: &[ObjectiveVector]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, o) in objectives.iter().enumerate() {
        match best {
            Some(b) if objectives[b].scalar <= o.scalar => {}
            _ => best = Some(i),
        }
    }
    best
}
