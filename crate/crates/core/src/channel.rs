//! Per-link stochastic channels.
//!
//! A link realization combines
//! - log-distance path loss with one log-normal shadowing draw,
//! - clustered Rician fading over `L` taps: a static line-of-sight component
//!   in tap 0 and exponentially decaying diffuse scatter on all taps,
//! - AR(1) evolution of the diffuse part across frames,
//!
//! and collapses the taps of each frame into one flat-equivalent complex gain
//! (coherent tap sum scaled by the path-loss amplitude).

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{LinkId, RngStream};
use crate::scenario::{distance, PathLossParams, Point2D, ScenarioConfig, SmallScaleParams};

static CLAMPED_DISTANCES: AtomicU64 = AtomicU64::new(0);

/// Number of `path_loss_db` calls whose distance was clamped to 1 m, process-wide.
pub fn clamped_distance_count() -> u64 {
    CLAMPED_DISTANCES.load(Ordering::Relaxed)
}

/// `PL(d) = PL_1m + 10 n log10(d) + shadow`, with `d` clamped to at least 1 m.
pub fn path_loss_db(d: f64, params: &PathLossParams, shadow_db: f64) -> f64 {
    let d = if d < 1.0 {
        CLAMPED_DISTANCES.fetch_add(1, Ordering::Relaxed);
        1.0
    } else {
        d
    };
    params.pl_1m_db + 10.0 * params.exponent * d.log10() + shadow_db
}

/// Complex tap gains for one frame, unit expected total power.
#[derive(Debug, Clone, PartialEq)]
pub struct TapSet {
    pub taps: Vec<Complex64>,
}

impl TapSet {
    pub fn total_power(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }

    pub fn coherent_sum(&self) -> Complex64 {
        self.taps.iter().sum()
    }
}

fn k_linear(params: &SmallScaleParams) -> f64 {
    10f64.powf(params.rician_k_db / 10.0)
}

/// Amplitude of the line-of-sight component, `sqrt(K / (K + 1))`.
pub fn los_amplitude(params: &SmallScaleParams) -> f64 {
    let k = k_linear(params);
    (k / (k + 1.0)).sqrt()
}

/// Per-tap amplitude applied to unit-variance scatter: `sqrt(w_l / (K + 1))`
/// with `w_l ∝ decay^l` normalized to sum 1.
pub fn scatter_scales(params: &SmallScaleParams) -> Vec<f64> {
    let k = k_linear(params);
    let raw: Vec<f64> = (0..params.num_taps)
        .map(|l| params.decay_factor.powi(l as i32))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| (w / total / (k + 1.0)).sqrt()).collect()
}

/// Fresh unit-variance scatter state, one CN(0, 1) entry per tap.
pub fn draw_scatter(rng: &mut RngStream, num_taps: usize) -> Vec<Complex64> {
    (0..num_taps).map(|_| rng.complex_normal()).collect()
}

/// One step of `s_t = rho s_{t-1} + sqrt(1 - rho^2) w_t` on each scatter entry.
pub fn ar_advance(prev: &[Complex64], rho: f64, rng: &mut RngStream) -> Vec<Complex64> {
    let innovation = (1.0 - rho * rho).max(0.0).sqrt();
    prev.iter()
        .map(|s| s * rho + rng.complex_normal() * innovation)
        .collect()
}

fn compose_taps(los: Complex64, scatter: &[Complex64], scales: &[f64]) -> TapSet {
    let mut taps: Vec<Complex64> = scatter.iter().zip(scales).map(|(s, a)| s * a).collect();
    taps[0] += los;
    TapSet { taps }
}

/// Draws one tap set: a line-of-sight component of power `K/(K+1)` with
/// uniform phase in tap 0 plus diffuse scatter of total power `1/(K+1)`.
pub fn draw_taps(rng: &mut RngStream, params: &SmallScaleParams) -> TapSet {
    let los = Complex64::from_polar(los_amplitude(params), rng.phase());
    let scatter = draw_scatter(rng, params.num_taps);
    compose_taps(los, &scatter, &scatter_scales(params))
}

/// Per-frame flat-equivalent channel gains for one node pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSeries {
    pub link_id: LinkId,
    /// Total loss including shadowing and any blockage.
    pub path_loss_db: f64,
    pub frames: Vec<Complex64>,
}

impl LinkSeries {
    pub fn mean_power(&self) -> f64 {
        self.frames.iter().map(|h| h.norm_sqr()).sum::<f64>() / self.frames.len() as f64
    }
}

fn blockage_db(cfg: &ScenarioConfig, link: LinkId) -> f64 {
    let b = &cfg.blockage;
    let blocked = match link {
        LinkId::BsBob => b.bs_bob,
        LinkId::BsEve => b.bs_eve,
        LinkId::BsTarget => b.bs_target,
        _ => false,
    };
    if blocked {
        b.blockage_loss_db
    } else {
        0.0
    }
}

/// Realizes `T` frames of the channel between `a` and `b`.
///
/// Draw order on `stream`: shadowing, line-of-sight phase, initial scatter,
/// then one innovation vector per subsequent frame.
pub fn realize_link(
    cfg: &ScenarioConfig,
    a: Point2D,
    b: Point2D,
    link_id: LinkId,
    stream: &mut RngStream,
) -> Result<LinkSeries> {
    let d = distance(a, b);
    if d == 0.0 {
        return Err(Error::CoincidentPoints { x: a.x, y: a.y });
    }
    let shadow = cfg.path_loss.shadow_sigma_db * stream.standard_normal();
    let loss = path_loss_db(d, &cfg.path_loss, shadow) + blockage_db(cfg, link_id);
    let amplitude = 10f64.powf(-loss / 20.0);

    let ss = &cfg.small_scale;
    let scales = scatter_scales(ss);
    let los = Complex64::from_polar(los_amplitude(ss), stream.phase());
    let mut scatter = draw_scatter(stream, ss.num_taps);

    let num_frames = cfg.temporal.num_frames;
    let mut frames = Vec::with_capacity(num_frames);
    for t in 0..num_frames {
        if t > 0 {
            scatter = ar_advance(&scatter, cfg.temporal.rho, stream);
        }
        frames.push(compose_taps(los, &scatter, &scales).coherent_sum() * amplitude);
    }

    Ok(LinkSeries {
        link_id,
        path_loss_db: loss,
        frames,
    })
}
