//! Saved optimization results: the versioned JSON document, its integrity
//! checks and the representatives table.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{scalarize, ObjectiveVector};
use crate::optimizer::{
    extract_representatives, EvaluatedCandidate, OptimizationResult, Representatives, SearchParams,
};
use crate::scenario::ScenarioConfig;

pub const RESULT_SCHEMA: u32 = 1;

/// On-disk form of an [`OptimizationResult`] (`result_schema: 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub result_schema: u32,
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub search_params: SearchParams,
    pub rounds_executed: usize,
    pub converged: bool,
    pub best_scalar_history: Vec<f64>,
    pub representatives: Representatives,
    pub candidates: Vec<EvaluatedCandidate>,
}

impl ResultDocument {
    pub fn new(cfg: &ScenarioConfig, params: &SearchParams, result: OptimizationResult) -> Self {
        Self {
            result_schema: RESULT_SCHEMA,
            tool_version: crate::VERSION.to_string(),
            config_hash: cfg.config_hash(),
            seed: cfg.master_seed,
            search_params: params.clone(),
            rounds_executed: result.rounds_executed,
            converged: result.converged,
            best_scalar_history: result.best_scalar_history,
            representatives: result.representatives,
            candidates: result.candidates,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes") + "\n"
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Checks every invariant of a saved result.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Integrity(msg));
        if self.result_schema != RESULT_SCHEMA {
            return fail(format!("unsupported result_schema {}", self.result_schema));
        }
        if self.candidates.is_empty() {
            return fail("candidate list is empty".into());
        }
        let balanced = self.representatives.balanced.objective.scalar;
        if let Some(c) = self.candidates.iter().find(|c| c.objective.scalar < balanced) {
            return fail(format!(
                "balanced scalar {balanced} exceeds candidate {} scalar {}",
                c.index, c.objective.scalar
            ));
        }
        for (i, c) in self.candidates.iter().enumerate() {
            if c.index != i {
                return fail(format!("candidate at position {i} has index {}", c.index));
            }
            if !c.metrics.is_finite() || !c.metrics.identities_hold() {
                return fail(format!("candidate {i} violates the metric identities"));
            }
            if c.objective.raw != ObjectiveVector::raw_of(&c.metrics) {
                return fail(format!("candidate {i} raw objectives disagree with its metrics"));
            }
        }
        let metrics: Vec<_> = self.candidates.iter().map(|c| c.metrics).collect();
        let rescored = scalarize(&metrics)?;
        if let Some((c, _)) = self.candidates.iter().zip(&rescored).find(|(c, o)| c.objective != **o) {
            return fail(format!("candidate {} objective does not match its population", c.index));
        }
        for (name, rep) in self.representatives.named() {
            if self.candidates.get(rep.index) != Some(rep) {
                return fail(format!("{name} is not a member of the evaluated set"));
            }
        }
        if extract_representatives(&self.candidates)? != self.representatives {
            return fail("representatives are not the per-metric optima".into());
        }
        if self.best_scalar_history.len() != self.rounds_executed {
            return fail("history length does not match rounds_executed".into());
        }
        if self.best_scalar_history.windows(2).any(|w| w[1] > w[0]) {
            return fail("best scalar history increases".into());
        }
        Ok(())
    }
}

/// Representatives as a fixed-width text table.
pub fn render_table(reps: &Representatives) -> String {
    let header = format!(
        "{:<20} {:>16} {:>8} {:>5} {:>6} {:>9} {:>9} {:>13}",
        "Solution", "RIS position", "θ/rad", "N", "α", "SNR_B", "SNR_T", "security gap"
    );
    let rows = [
        ("Best SNR_B", &reps.best_snr_b),
        ("Best security gap", &reps.best_security_gap),
        ("Best sensing gain", &reps.best_sensing_gain),
        ("Balanced", &reps.balanced),
    ];
    let mut out = header.clone();
    out.push('\n');
    out.push_str(&"-".repeat(header.chars().count()));
    out.push('\n');
    for (label, c) in rows {
        let pos = format!("({:.1},{:.1})", c.ris.position.x, c.ris.position.y);
        out.push_str(&format!(
            "{:<20} {:>16} {:>8.3} {:>5} {:>6.2} {:>9.2} {:>9.2} {:>13.2}\n",
            label,
            pos,
            c.ris.orientation,
            c.ris.num_elements,
            c.ris.alpha,
            c.metrics.snr_b_db,
            c.metrics.snr_t_total_db,
            c.metrics.security_gap_db,
        ));
    }
    out
}
