//! World description: node geometry, deployment area, link budget and
//! channel parameters, blockage flags and the master seed.
//!
//! Scenarios are stored as versioned JSON (`schema_version: 1`). Every field
//! except `nodes` may be omitted and is then filled with its default.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ris::RisGainParams;

pub const SCHEMA_VERSION: u32 = 1;

/// A position on the plane, in meters. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2D {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2D> for [f64; 2] {
    fn from(p: Point2D) -> Self {
        [p.x, p.y]
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Point2D, b: Point2D) -> f64 {
    (b.x - a.x).hypot(b.y - a.y)
}

/// Direction of the vector `from -> to`, counter-clockwise from +x, in (-π, π].
pub fn bearing(from: Point2D, to: Point2D) -> Result<f64> {
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    if dx == 0.0 && dy == 0.0 {
        return Err(Error::CoincidentPoints { x: from.x, y: from.y });
    }
    let angle = dy.atan2(dx);
    // atan2(-0.0, negative) yields -π; fold onto the closed end.
    Ok(if angle <= -PI { PI } else { angle })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeploymentArea {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for DeploymentArea {
    fn default() -> Self {
        Self {
            x_min: 0.0,
            x_max: 100.0,
            y_min: 0.0,
            y_max: 100.0,
        }
    }
}

impl DeploymentArea {
    pub fn contains(&self, p: Point2D) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkBudget {
    pub transmit_power_dbm: f64,
    pub noise_power_dbm: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            transmit_power_dbm: 20.0,
            noise_power_dbm: -94.0,
        }
    }
}

/// Log-distance path loss with log-normal shadowing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossParams {
    pub pl_1m_db: f64,
    pub exponent: f64,
    pub shadow_sigma_db: f64,
}

impl Default for PathLossParams {
    fn default() -> Self {
        Self {
            pl_1m_db: 30.0,
            exponent: 2.5,
            shadow_sigma_db: 3.0,
        }
    }
}

/// Clustered Rician multi-tap fading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmallScaleParams {
    pub num_taps: usize,
    /// Power ratio between consecutive scatter taps.
    pub decay_factor: f64,
    pub rician_k_db: f64,
}

impl Default for SmallScaleParams {
    fn default() -> Self {
        Self {
            num_taps: 6,
            decay_factor: 0.5,
            rician_k_db: 10.0,
        }
    }
}

/// Frame-to-frame AR(1) evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemporalParams {
    pub rho: f64,
    pub num_frames: usize,
}

impl Default for TemporalParams {
    fn default() -> Self {
        Self {
            rho: 0.92,
            num_frames: 40,
        }
    }
}

/// Direct links from the BS that are obstructed, and the extra loss applied
/// to each flagged link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockageSpec {
    pub bs_bob: bool,
    pub bs_eve: bool,
    pub bs_target: bool,
    pub blockage_loss_db: f64,
}

impl Default for BlockageSpec {
    fn default() -> Self {
        Self {
            bs_bob: true,
            bs_eve: false,
            bs_target: false,
            blockage_loss_db: 30.0,
        }
    }
}

/// How the RIS-reflected path combines with the direct path at a receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseMode {
    /// The RIS phase-aligns the reflected path with the direct path.
    #[default]
    Coherent,
    /// Plain complex sum of direct and reflected paths.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Nodes {
    pub bs: Point2D,
    pub bob: Point2D,
    pub eve: Point2D,
    pub target: Point2D,
}

impl Default for Nodes {
    fn default() -> Self {
        Self {
            bs: Point2D::new(10.0, 10.0),
            bob: Point2D::new(60.0, 80.0),
            eve: Point2D::new(80.0, 20.0),
            target: Point2D::new(20.0, 85.0),
        }
    }
}

pub const DEFAULT_SEED: u64 = 1;

/// Immutable scenario shared by every evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub bs: Point2D,
    pub bob: Point2D,
    pub eve: Point2D,
    pub target: Point2D,
    pub area: DeploymentArea,
    pub link_budget: LinkBudget,
    pub path_loss: PathLossParams,
    pub small_scale: SmallScaleParams,
    pub temporal: TemporalParams,
    pub blockage: BlockageSpec,
    pub ris_gain: RisGainParams,
    pub phase_mode: PhaseMode,
    pub master_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ConfigFile::with_nodes(Nodes::default()).into()
    }
}

fn schema_v1() -> u32 {
    SCHEMA_VERSION
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// On-disk layout of a scenario (schema v1).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default = "schema_v1")]
    schema_version: u32,
    nodes: Nodes,
    #[serde(default)]
    area: DeploymentArea,
    #[serde(default)]
    link_budget: LinkBudget,
    #[serde(default)]
    path_loss: PathLossParams,
    #[serde(default)]
    small_scale: SmallScaleParams,
    #[serde(default)]
    temporal: TemporalParams,
    #[serde(default)]
    blockage: BlockageSpec,
    #[serde(default)]
    ris_gain: RisGainParams,
    #[serde(default)]
    phase_mode: PhaseMode,
    #[serde(default = "default_seed")]
    seed: u64,
}

impl ConfigFile {
    fn with_nodes(nodes: Nodes) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            nodes,
            area: Default::default(),
            link_budget: Default::default(),
            path_loss: Default::default(),
            small_scale: Default::default(),
            temporal: Default::default(),
            blockage: Default::default(),
            ris_gain: Default::default(),
            phase_mode: Default::default(),
            seed: DEFAULT_SEED,
        }
    }
}

impl From<ConfigFile> for ScenarioConfig {
    fn from(f: ConfigFile) -> Self {
        Self {
            bs: f.nodes.bs,
            bob: f.nodes.bob,
            eve: f.nodes.eve,
            target: f.nodes.target,
            area: f.area,
            link_budget: f.link_budget,
            path_loss: f.path_loss,
            small_scale: f.small_scale,
            temporal: f.temporal,
            blockage: f.blockage,
            ris_gain: f.ris_gain,
            phase_mode: f.phase_mode,
            master_seed: f.seed,
        }
    }
}

impl From<&ScenarioConfig> for ConfigFile {
    fn from(c: &ScenarioConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            nodes: c.nodes(),
            area: c.area,
            link_budget: c.link_budget,
            path_loss: c.path_loss,
            small_scale: c.small_scale,
            temporal: c.temporal,
            blockage: c.blockage,
            ris_gain: c.ris_gain.clone(),
            phase_mode: c.phase_mode,
            seed: c.master_seed,
        }
    }
}

fn check(ok: bool, field: &str, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::validation(field, message()))
    }
}

impl ScenarioConfig {
    pub fn nodes(&self) -> Nodes {
        Nodes {
            bs: self.bs,
            bob: self.bob,
            eve: self.eve,
            target: self.target,
        }
    }

    /// Checks every type invariant. The error names the first failing field.
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("Nodes.bs", self.bs),
            ("Nodes.bob", self.bob),
            ("Nodes.eve", self.eve),
            ("Nodes.target", self.target),
        ];
        for (field, p) in named {
            check(p.is_finite(), field, || {
                format!("coordinates must be finite, got ({}, {})", p.x, p.y)
            })?;
        }
        for (i, (name_a, a)) in named.iter().enumerate() {
            for (name_b, b) in &named[i + 1..] {
                check(distance(*a, *b) > 0.0, "ScenarioConfig.nodes", || {
                    format!("{name_a} and {name_b} coincide")
                })?;
            }
        }

        let a = &self.area;
        check(
            [a.x_min, a.x_max, a.y_min, a.y_max].iter().all(|v| v.is_finite()),
            "DeploymentArea",
            || "bounds must be finite".into(),
        )?;
        check(a.x_min < a.x_max, "DeploymentArea.x_min", || {
            format!("x_min ({}) must be < x_max ({})", a.x_min, a.x_max)
        })?;
        check(a.y_min < a.y_max, "DeploymentArea.y_min", || {
            format!("y_min ({}) must be < y_max ({})", a.y_min, a.y_max)
        })?;

        let lb = &self.link_budget;
        check(
            lb.transmit_power_dbm.is_finite(),
            "LinkBudget.transmit_power_dbm",
            || "must be finite".into(),
        )?;
        check(lb.noise_power_dbm.is_finite(), "LinkBudget.noise_power_dbm", || {
            "must be finite".into()
        })?;

        let pl = &self.path_loss;
        check(pl.pl_1m_db.is_finite(), "PathLossParams.pl_1m_db", || {
            "must be finite".into()
        })?;
        check(
            pl.exponent.is_finite() && pl.exponent > 0.0,
            "PathLossParams.exponent",
            || format!("must be > 0, got {}", pl.exponent),
        )?;
        check(
            pl.shadow_sigma_db.is_finite() && pl.shadow_sigma_db >= 0.0,
            "PathLossParams.shadow_sigma_db",
            || format!("must be >= 0, got {}", pl.shadow_sigma_db),
        )?;

        let ss = &self.small_scale;
        check(ss.num_taps >= 1, "SmallScaleParams.num_taps", || "must be >= 1".into())?;
        check(
            ss.decay_factor > 0.0 && ss.decay_factor <= 1.0,
            "SmallScaleParams.decay_factor",
            || format!("must be in (0, 1], got {}", ss.decay_factor),
        )?;
        check(ss.rician_k_db.is_finite(), "SmallScaleParams.rician_k_db", || {
            "must be finite".into()
        })?;

        let tp = &self.temporal;
        check((0.0..=1.0).contains(&tp.rho), "TemporalParams.rho", || {
            format!("must be in [0, 1], got {}", tp.rho)
        })?;
        check(tp.num_frames >= 1, "TemporalParams.num_frames", || {
            "must be >= 1".into()
        })?;

        let bl = &self.blockage;
        check(
            bl.blockage_loss_db.is_finite() && bl.blockage_loss_db >= 0.0,
            "BlockageSpec.blockage_loss_db",
            || format!("must be >= 0, got {}", bl.blockage_loss_db),
        )?;

        self.ris_gain.validate()
    }

    /// Parses and validates a schema-v1 JSON document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::validation(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", file.schema_version),
            ));
        }
        let cfg = ScenarioConfig::from(file);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Full schema-v1 JSON with every field present.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ConfigFile::from(self)).expect("scenario serializes")
    }

    /// SHA-256 of the compact canonical JSON form, hex encoded.
    pub fn config_hash(&self) -> String {
        let bytes = serde_json::to_vec(&ConfigFile::from(self)).expect("scenario serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ScenarioConfig::from_json_str(&text)
}

pub fn save_config(cfg: &ScenarioConfig, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, cfg.to_json_string() + "\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = r#"{
        "nodes": {"bs": [10, 10], "bob": [60, 80], "eve": [80, 20], "target": [20, 85]}
    }"#;

    fn with_override(section: &str, body: &str) -> String {
        format!(
            r#"{{"nodes": {{"bs": [10, 10], "bob": [60, 80], "eve": [80, 20], "target": [20, 85]}},
                "{section}": {body}}}"#
        )
    }

    fn failing_field(text: &str) -> String {
        match ScenarioConfig::from_json_str(text) {
            Err(Error::Validation { field, .. }) => field,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_file_gets_documented_defaults() {
        let cfg = ScenarioConfig::from_json_str(MINIMAL).unwrap();
        assert_eq!(cfg.small_scale.rician_k_db, 10.0);
        assert_eq!(cfg.small_scale.num_taps, 6);
        assert_eq!(cfg.small_scale.decay_factor, 0.5);
        assert_eq!(cfg.temporal.rho, 0.92);
        assert_eq!(cfg.temporal.num_frames, 40);
        assert_eq!(cfg.path_loss.exponent, 2.5);
        assert_eq!(cfg.path_loss.pl_1m_db, 30.0);
        assert_eq!(cfg.path_loss.shadow_sigma_db, 3.0);
        assert_eq!(cfg.link_budget.transmit_power_dbm, 20.0);
        assert_eq!(cfg.link_budget.noise_power_dbm, -94.0);
        assert_eq!(cfg.blockage.blockage_loss_db, 30.0);
        assert!(cfg.blockage.bs_bob);
        assert!(!cfg.blockage.bs_eve);
        assert!(!cfg.blockage.bs_target);
        assert_eq!(cfg.phase_mode, PhaseMode::Coherent);
        assert_eq!(cfg.area, DeploymentArea::default());
        assert_eq!(cfg, ScenarioConfig::default());
    }

    #[test]
    fn published_channel_values_echo_back() {
        let text = format!(
            r#"{{"schema_version": 1,
                "nodes": {{"bs": [0, 0], "bob": [1, 1], "eve": [2, 2], "target": [3, 3]}},
                "small_scale": {{"num_taps": 6}},
                "temporal": {{"rho": 0.92, "num_frames": 40}}}}"#
        );
        let cfg = ScenarioConfig::from_json_str(&text).unwrap();
        assert_eq!(cfg.small_scale.num_taps, 6);
        assert_eq!(cfg.temporal.rho, 0.92);
        assert_eq!(cfg.temporal.num_frames, 40);
        assert_eq!(cfg.bob, Point2D::new(1.0, 1.0));
    }

    #[test]
    fn rho_out_of_range_names_the_field() {
        let text = with_override("temporal", r#"{"rho": 1.5}"#);
        assert_eq!(failing_field(&text), "TemporalParams.rho");
    }

    #[test]
    fn every_invariant_is_rejected() {
        let cases = [
            ("area", r#"{"x_min": 10, "x_max": 10}"#, "DeploymentArea.x_min"),
            ("area", r#"{"y_min": 5, "y_max": 1}"#, "DeploymentArea.y_min"),
            ("path_loss", r#"{"exponent": 0}"#, "PathLossParams.exponent"),
            (
                "path_loss",
                r#"{"shadow_sigma_db": -1}"#,
                "PathLossParams.shadow_sigma_db",
            ),
            ("small_scale", r#"{"num_taps": 0}"#, "SmallScaleParams.num_taps"),
            ("small_scale", r#"{"decay_factor": 0}"#, "SmallScaleParams.decay_factor"),
            (
                "small_scale",
                r#"{"decay_factor": 1.5}"#,
                "SmallScaleParams.decay_factor",
            ),
            ("temporal", r#"{"rho": -0.1}"#, "TemporalParams.rho"),
            ("temporal", r#"{"num_frames": 0}"#, "TemporalParams.num_frames"),
            (
                "blockage",
                r#"{"blockage_loss_db": -3}"#,
                "BlockageSpec.blockage_loss_db",
            ),
            (
                "ris_gain",
                r#"{"element_efficiency": 0}"#,
                "RisGainParams.element_efficiency",
            ),
            (
                "ris_gain",
                r#"{"element_efficiency": 1.2}"#,
                "RisGainParams.element_efficiency",
            ),
            (
                "ris_gain",
                r#"{"orientation_exponent": -1}"#,
                "RisGainParams.orientation_exponent",
            ),
            (
                "ris_gain",
                r#"{"allowed_num_elements": []}"#,
                "RisGainParams.allowed_num_elements",
            ),
        ];
        for (section, body, field) in cases {
            let text = with_override(section, body);
            assert_eq!(failing_field(&text), field, "{section} {body}");
        }

        let coincident = r#"{"nodes": {"bs": [1, 1], "bob": [1, 1], "eve": [2, 2], "target": [3, 3]}}"#;
        assert_eq!(failing_field(coincident), "ScenarioConfig.nodes");
        let version =
            r#"{"schema_version": 2, "nodes": {"bs": [0, 0], "bob": [1, 1], "eve": [2, 2], "target": [3, 3]}}"#;
        assert_eq!(failing_field(version), "schema_version");
    }

    #[test]
    fn malformed_and_unknown_fields_are_parse_errors() {
        assert!(matches!(ScenarioConfig::from_json_str("{"), Err(Error::Parse(_))));
        assert!(matches!(ScenarioConfig::from_json_str("{}"), Err(Error::Parse(_))));
        let typo = with_override("temporal", r#"{"roh": 0.5}"#);
        assert!(matches!(ScenarioConfig::from_json_str(&typo), Err(Error::Parse(_))));
    }

    #[test]
    fn distance_examples() {
        let o = Point2D::new(0.0, 0.0);
        assert_eq!(distance(o, o), 0.0);
        assert_eq!(distance(o, Point2D::new(3.0, 4.0)), 5.0);
        assert_eq!(distance(Point2D::new(10.0, 10.0), Point2D::new(10.0, 110.0)), 100.0);
    }

    #[test]
    fn bearing_examples() {
        let o = Point2D::new(0.0, 0.0);
        assert_eq!(bearing(o, Point2D::new(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(bearing(o, Point2D::new(0.0, 1.0)).unwrap(), PI / 2.0);
        assert_eq!(bearing(o, Point2D::new(-1.0, 0.0)).unwrap(), PI);
        assert_eq!(bearing(Point2D::new(0.0, 0.0), Point2D::new(-1.0, -0.0)).unwrap(), PI);
        assert!(matches!(bearing(o, o), Err(Error::CoincidentPoints { .. })));
    }

    #[test]
    fn save_then_load_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.json");
        let mut cfg = ScenarioConfig::default();
        cfg.master_seed = u64::MAX - 3;
        cfg.phase_mode = PhaseMode::Random;
        cfg.path_loss.shadow_sigma_db = 0.1 + 0.2;
        save_config(&cfg, &path).unwrap();
        assert_eq!(load_config(&path).unwrap(), cfg);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(load_config("/nonexistent/cfg.json"), Err(Error::Io { .. })));
    }

    fn point() -> impl Strategy<Value = Point2D> {
        (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(x, y)| Point2D::new(x, y))
    }

    proptest! {
        #[test]
        fn distance_symmetric_and_triangle(a in point(), b in point(), c in point()) {
            prop_assert_eq!(distance(a, b), distance(b, a));
            prop_assert!(distance(a, b) >= 0.0);
            prop_assert!(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9);
        }

        #[test]
        fn bearing_in_half_open_range(a in point(), b in point()) {
            prop_assume!(a != b);
            let t = bearing(a, b).unwrap();
            prop_assert!(t > -PI && t <= PI);
        }

        #[test]
        fn json_round_trip(seed in any::<u64>(), rho in 0.0..=1.0f64, sigma in 0.0..20.0f64,
                           k in -30.0..30.0f64, frames in 1usize..100) {
            let mut cfg = ScenarioConfig::default();
            cfg.master_seed = seed;
            cfg.temporal.rho = rho;
            cfg.temporal.num_frames = frames;
            cfg.path_loss.shadow_sigma_db = sigma;
            cfg.small_scale.rician_k_db = k;
            let back = ScenarioConfig::from_json_str(&cfg.to_json_string()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
