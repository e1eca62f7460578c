//! Deterministic RNG substreams.
//!
//! Every link realization draws from its own ChaCha8 stream whose seed is a
//! stable hash of `(master_seed, link, candidate_key, replicate)`. No
//! generator state is shared between links or candidates, so evaluation
//! order and thread count never affect results.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::scenario::Point2D;

/// Node pairs for which a channel is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkId {
    BsBob,
    BsEve,
    BsTarget,
    BsRis,
    RisBob,
    RisEve,
    RisTarget,
}

impl LinkId {
    pub const ALL: [LinkId; 7] = [
        LinkId::BsBob,
        LinkId::BsEve,
        LinkId::BsTarget,
        LinkId::BsRis,
        LinkId::RisBob,
        LinkId::RisEve,
        LinkId::RisTarget,
    ];

    pub fn ordinal(self) -> u64 {
        self as u64
    }

    /// Direct BS links do not involve the RIS.
    pub fn is_direct(self) -> bool {
        matches!(self, LinkId::BsBob | LinkId::BsEve | LinkId::BsTarget)
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn combine(acc: u64, word: u64) -> u64 {
    mix64(acc ^ mix64(word))
}

/// Stable 64-bit seed for one substream.
pub fn stream_seed(master_seed: u64, link: LinkId, candidate_key: u64, replicate: u64) -> u64 {
    [link.ordinal(), candidate_key, replicate]
        .into_iter()
        .fold(mix64(master_seed), combine)
}

const POSITION_SALT: u64 = 0x5249_535F_504F_5331;

/// Key for a RIS position, quantized to whole millimeters so that
/// numerically coincident positions share randomness.
pub fn position_key(p: Point2D) -> u64 {
    let qx = (p.x * 1000.0).round() as i64;
    let qy = (p.y * 1000.0).round() as i64;
    combine(combine(POSITION_SALT, qx as u64), qy as u64)
}

/// Deterministic generator for one link realization.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn derive(master_seed: u64, link: LinkId, candidate_key: u64, replicate: u64) -> Self {
        Self::from_seed(stream_seed(master_seed, link, candidate_key, replicate))
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Circularly-symmetric complex Gaussian with unit variance, CN(0, 1).
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let re = self.standard_normal();
        let im = self.standard_normal();
        Complex64::new(re * s, im * s)
    }

    /// Uniform phase in [0, 2π).
    pub fn phase(&mut self) -> f64 {
        self.rng.random::<f64>() * std::f64::consts::TAU
    }
}

/// Supplies the substream for each link of one candidate evaluation.
pub trait StreamSource {
    fn stream(&self, link: LinkId) -> RngStream;
}

/// Default substream layout for a candidate.
///
/// Direct BS links are keyed by the scene only, so every candidate sees the
/// same BS–Bob, BS–Eve and BS–target channels. Links touching the RIS are
/// keyed by `candidate_key`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivedStreams {
    pub master_seed: u64,
    pub candidate_key: u64,
    pub replicate: u64,
}

/// Candidate key used for the direct links.
pub const SCENE_KEY: u64 = 0;

impl DerivedStreams {
    pub fn new(master_seed: u64, candidate_key: u64) -> Self {
        Self {
            master_seed,
            candidate_key,
            replicate: 0,
        }
    }
}

impl StreamSource for DerivedStreams {
    fn stream(&self, link: LinkId) -> RngStream {
        let key = if link.is_direct() {
            SCENE_KEY
        } else {
            self.candidate_key
        };
        RngStream::derive(self.master_seed, link, key, self.replicate)
    }
}
