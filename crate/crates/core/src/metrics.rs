//! Frame-averaged SNR at Bob, Eve and the sensing target for one RIS
//! candidate, plus the derived security gap, sensing gain and the
//! blockage-relative SNR improvement at Bob.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{realize_link, LinkSeries};
use crate::error::Result;
use crate::ris::{alignment_factor, cascaded_gain, isac_weights, reflection_gain, RisConfig};
use crate::rng::{position_key, DerivedStreams, LinkId, StreamSource, SCENE_KEY};
use crate::scenario::{LinkBudget, PhaseMode, Point2D, ScenarioConfig};

/// All metrics for one candidate, in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricBundle {
    pub snr_b_db: f64,
    pub snr_e_db: f64,
    pub snr_t_total_db: f64,
    pub snr_t_direct_db: f64,
    /// SNR at Bob minus the SNR of the (blocked) direct link alone.
    pub delta_snr_b_db: f64,
    pub security_gap_db: f64,
    pub sensing_gain_db: f64,
}

impl MetricBundle {
    /// Builds a bundle whose gap and gain are derived from the SNRs.
    pub fn from_snrs(
        snr_b_db: f64,
        snr_b_direct_db: f64,
        snr_e_db: f64,
        snr_t_total_db: f64,
        snr_t_direct_db: f64,
    ) -> Self {
        Self {
            snr_b_db,
            snr_e_db,
            snr_t_total_db,
            snr_t_direct_db,
            delta_snr_b_db: snr_b_db - snr_b_direct_db,
            security_gap_db: security_gap(snr_b_db, snr_e_db),
            sensing_gain_db: sensing_gain(snr_t_total_db, snr_t_direct_db),
        }
    }

    /// True when the gap and gain identities hold bit-exactly.
    pub fn identities_hold(&self) -> bool {
        self.security_gap_db == self.snr_b_db - self.snr_e_db
            && self.sensing_gain_db == self.snr_t_total_db - self.snr_t_direct_db
    }

    pub fn is_finite(&self) -> bool {
        [
            self.snr_b_db,
            self.snr_e_db,
            self.snr_t_total_db,
            self.snr_t_direct_db,
            self.delta_snr_b_db,
            self.security_gap_db,
            self.sensing_gain_db,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Frame-averaged SNR in dB of a direct path combined with a reflected path.
///
/// Averaging is over linear power. In `Coherent` mode the reflected path is
/// assumed phase-aligned with the direct one, `(|d| + |c|)^2`; in `Random`
/// mode the complex sum `|d + c|^2` is used.
pub fn combined_snr_db(
    direct: &[Complex64],
    cascaded: &[Complex64],
    budget: &LinkBudget,
    phase_mode: PhaseMode,
) -> f64 {
    debug_assert_eq!(direct.len(), cascaded.len());
    let power: f64 = direct
        .iter()
        .zip(cascaded)
        .map(|(d, c)| match phase_mode {
            PhaseMode::Coherent => (d.norm() + c.norm()).powi(2),
            PhaseMode::Random => (d + c).norm_sqr(),
        })
        .sum();
    let mean = power / direct.len() as f64;
    let snr = mean * db_to_linear(budget.transmit_power_dbm) / db_to_linear(budget.noise_power_dbm);
    10.0 * snr.log10()
}

fn direct_only_snr_db(direct: &[Complex64], budget: &LinkBudget, phase_mode: PhaseMode) -> f64 {
    let silent = vec![Complex64::new(0.0, 0.0); direct.len()];
    combined_snr_db(direct, &silent, budget, phase_mode)
}

pub fn security_gap(snr_b_db: f64, snr_e_db: f64) -> f64 {
    snr_b_db - snr_e_db
}

pub fn sensing_gain(snr_t_total_db: f64, snr_t_direct_db: f64) -> f64 {
    snr_t_total_db - snr_t_direct_db
}

/// Stream key used for a candidate: its position, quantized to millimeters.
pub fn candidate_key(ris: &RisConfig) -> u64 {
    position_key(ris.position)
}

/// Evaluates a candidate with the default substream layout.
pub fn evaluate_candidate(cfg: &ScenarioConfig, ris: &RisConfig, candidate_key: u64) -> Result<MetricBundle> {
    evaluate_with_streams(cfg, ris, &DerivedStreams::new(cfg.master_seed, candidate_key))
}

fn link(cfg: &ScenarioConfig, streams: &dyn StreamSource, id: LinkId, a: Point2D, b: Point2D) -> Result<LinkSeries> {
    realize_link(cfg, a, b, id, &mut streams.stream(id))
}

/// Realizations of the three BS links that do not involve the RIS.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectLinks {
    pub bs_bob: LinkSeries,
    pub bs_eve: LinkSeries,
    pub bs_target: LinkSeries,
}

/// Realizations of the four links through a RIS at one position.
#[derive(Debug, Clone, PartialEq)]
pub struct RisLinks {
    pub bs_ris: LinkSeries,
    pub ris_bob: LinkSeries,
    pub ris_eve: LinkSeries,
    pub ris_target: LinkSeries,
}

pub fn realize_direct_links(cfg: &ScenarioConfig, streams: &dyn StreamSource) -> Result<DirectLinks> {
    Ok(DirectLinks {
        bs_bob: link(cfg, streams, LinkId::BsBob, cfg.bs, cfg.bob)?,
        bs_eve: link(cfg, streams, LinkId::BsEve, cfg.bs, cfg.eve)?,
        bs_target: link(cfg, streams, LinkId::BsTarget, cfg.bs, cfg.target)?,
    })
}

pub fn realize_ris_links(cfg: &ScenarioConfig, position: Point2D, streams: &dyn StreamSource) -> Result<RisLinks> {
    let r = position;
    Ok(RisLinks {
        bs_ris: link(cfg, streams, LinkId::BsRis, cfg.bs, r)?,
        ris_bob: link(cfg, streams, LinkId::RisBob, r, cfg.bob)?,
        ris_eve: link(cfg, streams, LinkId::RisEve, r, cfg.eve)?,
        ris_target: link(cfg, streams, LinkId::RisTarget, r, cfg.target)?,
    })
}

/// Metrics for a candidate from already realized links. `ris_links` must
/// have been realized at `ris.position`.
pub fn compose_metrics(
    cfg: &ScenarioConfig,
    ris: &RisConfig,
    direct: &DirectLinks,
    ris_links: &RisLinks,
) -> Result<MetricBundle> {
    ris.validate(cfg)?;
    let c_in = alignment_factor(ris, cfg.bs)?;
    let (eta_b, eta_t) = isac_weights(ris.alpha);
    let cascade = |out: &LinkSeries, node: Point2D, weight: f64| -> Result<Vec<Complex64>> {
        let c_out = alignment_factor(ris, node)?;
        let g = reflection_gain(ris.num_elements, &cfg.ris_gain, c_in, c_out);
        Ok(ris_links
            .bs_ris
            .frames
            .iter()
            .zip(&out.frames)
            .map(|(sr, rx)| cascaded_gain(*sr, *rx, g, weight))
            .collect())
    };
    // Eve sees leakage of the communication beam, hence eta_b.
    let to_bob = cascade(&ris_links.ris_bob, cfg.bob, eta_b)?;
    let to_eve = cascade(&ris_links.ris_eve, cfg.eve, eta_b)?;
    let to_target = cascade(&ris_links.ris_target, cfg.target, eta_t)?;

    let budget = &cfg.link_budget;
    let mode = cfg.phase_mode;
    let (sb, se, st) = (&direct.bs_bob.frames, &direct.bs_eve.frames, &direct.bs_target.frames);
    Ok(MetricBundle::from_snrs(
        combined_snr_db(sb, &to_bob, budget, mode),
        direct_only_snr_db(sb, budget, mode),
        combined_snr_db(se, &to_eve, budget, mode),
        combined_snr_db(st, &to_target, budget, mode),
        direct_only_snr_db(st, budget, mode),
    ))
}

/// Evaluates a candidate drawing each link from `streams`.
pub fn evaluate_with_streams(
    cfg: &ScenarioConfig,
    ris: &RisConfig,
    streams: &dyn StreamSource,
) -> Result<MetricBundle> {
    ris.validate(cfg)?;
    let direct = realize_direct_links(cfg, streams)?;
    let ris_links = realize_ris_links(cfg, ris.position, streams)?;
    compose_metrics(cfg, ris, &direct, &ris_links)
}

/// Evaluates many candidates with the default substream layout.
///
/// The direct links are realized once and the RIS links once per distinct
/// position, so each entry equals `evaluate_candidate(cfg, ris,
/// candidate_key(ris))` exactly while costing far less for batches that
/// share positions.
pub fn evaluate_batch(cfg: &ScenarioConfig, batch: &[RisConfig]) -> Result<Vec<MetricBundle>> {
    for ris in batch {
        ris.validate(cfg)?;
    }
    let direct = realize_direct_links(cfg, &DerivedStreams::new(cfg.master_seed, SCENE_KEY))?;

    let mut slot_of: HashMap<(u64, u64), usize> = HashMap::new();
    let mut positions = Vec::new();
    let slots: Vec<usize> = batch
        .iter()
        .map(|ris| {
            let p = ris.position;
            *slot_of.entry((p.x.to_bits(), p.y.to_bits())).or_insert_with(|| {
                positions.push(p);
                positions.len() - 1
            })
        })
        .collect();
    let links: Vec<RisLinks> = positions
        .par_iter()
        .map(|&p| realize_ris_links(cfg, p, &DerivedStreams::new(cfg.master_seed, position_key(p))))
        .collect::<Result<_>>()?;

    batch
        .par_iter()
        .zip(slots.par_iter())
        .map(|(ris, &slot)| compose_metrics(cfg, ris, &direct, &links[slot]))
        .collect()
}
