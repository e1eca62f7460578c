//! Reconfigurable intelligent surface: orientation alignment, element-count
//! reflection gain, cascaded channel composition and the ISAC split of
//! reflection resources between Bob and the sensing target.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{bearing, Point2D, ScenarioConfig};

/// One candidate deployment: position, orientation, size and ISAC weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisConfig {
    pub position: Point2D,
    /// Direction of the surface normal, radians counter-clockwise from +x.
    pub orientation: f64,
    pub num_elements: u32,
    /// Share of reflection resources directed at communication.
    pub alpha: f64,
}

impl RisConfig {
    pub fn new(position: Point2D, orientation: f64, num_elements: u32, alpha: f64) -> Self {
        Self {
            position,
            orientation,
            num_elements,
            alpha,
        }
    }

    pub fn validate(&self, cfg: &ScenarioConfig) -> Result<()> {
        if !self.position.is_finite() || !cfg.area.contains(self.position) {
            return Err(Error::validation(
                "RisConfig.position",
                format!(
                    "({}, {}) is outside the deployment area",
                    self.position.x, self.position.y
                ),
            ));
        }
        if !self.orientation.is_finite() {
            return Err(Error::validation("RisConfig.orientation", "must be finite"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::validation(
                "RisConfig.alpha",
                format!("must be in [0, 1], got {}", self.alpha),
            ));
        }
        if !cfg.ris_gain.allowed_num_elements.contains(&self.num_elements) {
            return Err(Error::validation(
                "RisConfig.num_elements",
                format!(
                    "{} is not one of {:?}",
                    self.num_elements, cfg.ris_gain.allowed_num_elements
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RisGainParams {
    /// Per-element reflection efficiency in (0, 1].
    pub element_efficiency: f64,
    /// Angular selectivity; larger values penalize oblique geometry harder.
    pub orientation_exponent: f64,
    pub allowed_num_elements: Vec<u32>,
}

impl Default for RisGainParams {
    fn default() -> Self {
        Self {
            element_efficiency: 0.8,
            orientation_exponent: 1.0,
            allowed_num_elements: vec![64, 128, 256, 512],
        }
    }
}

impl RisGainParams {
    pub fn validate(&self) -> Result<()> {
        let eff = self.element_efficiency;
        if !(eff > 0.0 && eff <= 1.0) {
            return Err(Error::validation(
                "RisGainParams.element_efficiency",
                format!("must be in (0, 1], got {eff}"),
            ));
        }
        let gamma = self.orientation_exponent;
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::validation(
                "RisGainParams.orientation_exponent",
                format!("must be >= 0, got {gamma}"),
            ));
        }
        if self.allowed_num_elements.is_empty() || self.allowed_num_elements.contains(&0) {
            return Err(Error::validation(
                "RisGainParams.allowed_num_elements",
                "must be a non-empty set of positive counts",
            ));
        }
        Ok(())
    }
}

/// `max(0, cos)` of the angle between the surface normal and the direction
/// from the RIS to `node`.
pub fn alignment_factor(ris: &RisConfig, node: Point2D) -> Result<f64> {
    let toward = bearing(ris.position, node)?;
    Ok((toward - ris.orientation).cos().max(0.0))
}

/// Power gain `N · η · (c_in · c_out)^γ`.
pub fn reflection_gain(num_elements: u32, params: &RisGainParams, c_in: f64, c_out: f64) -> f64 {
    num_elements as f64 * params.element_efficiency * (c_in * c_out).powf(params.orientation_exponent)
}

/// `(η_B, η_T) = (α, 1 − α)`.
pub fn isac_weights(alpha: f64) -> (f64, f64) {
    (alpha, 1.0 - alpha)
}

/// Reflected-path amplitude `weight · sqrt(G) · h_sr · h_rx`.
pub fn cascaded_gain(h_sr: Complex64, h_rx: Complex64, gain: f64, weight: f64) -> Complex64 {
    h_sr * h_rx * (weight * gain.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn ris_at_origin(orientation: f64) -> RisConfig {
        RisConfig::new(Point2D::new(0.0, 0.0), orientation, 512, 0.5)
    }

    #[test]
    fn alignment_examples() {
        let ris = ris_at_origin(0.0);
        assert_eq!(alignment_factor(&ris, Point2D::new(5.0, 0.0)).unwrap(), 1.0);
        assert!(alignment_factor(&ris, Point2D::new(0.0, 5.0)).unwrap() < 1e-15);
        let sixty = Point2D::new(FRAC_PI_3.cos(), FRAC_PI_3.sin());
        assert_relative_eq!(alignment_factor(&ris, sixty).unwrap(), 0.5, epsilon = 1e-12);
        assert_eq!(alignment_factor(&ris, Point2D::new(-1.0, 0.0)).unwrap(), 0.0);
        assert!(alignment_factor(&ris, Point2D::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn reflection_gain_examples() {
        let unit = RisGainParams {
            element_efficiency: 1.0,
            orientation_exponent: 3.0,
            ..Default::default()
        };
        assert_eq!(reflection_gain(512, &unit, 1.0, 1.0), 512.0);
        assert_eq!(reflection_gain(512, &unit, 0.0, 0.7), 0.0);
        let p = RisGainParams {
            element_efficiency: 0.8,
            orientation_exponent: 2.0,
            ..Default::default()
        };
        assert_relative_eq!(reflection_gain(512, &p, 0.5, 0.5), 25.6, epsilon = 1e-12);
    }

    #[test]
    fn isac_weight_examples() {
        assert_eq!(isac_weights(0.0), (0.0, 1.0));
        assert_eq!(isac_weights(1.0), (1.0, 0.0));
        let (b, t) = isac_weights(0.95);
        assert_eq!(b, 0.95);
        assert_relative_eq!(t, 0.05, epsilon = 1e-15);
    }

    #[test]
    fn cascaded_gain_examples() {
        let a = Complex64::new(0.3, -0.4);
        let b = Complex64::new(-1.2, 0.5);
        assert_eq!(cascaded_gain(a, b, 25.6, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(cascaded_gain(a, b, 1.0, 1.0), a * b);
        let u1 = Complex64::from_polar(1.0, 0.3);
        let u2 = Complex64::from_polar(1.0, -2.1);
        assert_relative_eq!(
            cascaded_gain(u1, u2, 25.6, 0.5).norm(),
            2.529_822_128_134_703_5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn validate_rejects_bad_candidates() {
        let cfg = ScenarioConfig::default();
        let ok = RisConfig::new(Point2D::new(50.0, 50.0), 0.0, 256, 0.5);
        ok.validate(&cfg).unwrap();
        let field = |r: RisConfig| match r.validate(&cfg) {
            Err(Error::Validation { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(
            field(RisConfig {
                position: Point2D::new(150.0, 50.0),
                ..ok
            }),
            "RisConfig.position"
        );
        assert_eq!(field(RisConfig { alpha: 1.01, ..ok }), "RisConfig.alpha");
        assert_eq!(
            field(RisConfig {
                num_elements: 100,
                ..ok
            }),
            "RisConfig.num_elements"
        );
        assert_eq!(
            field(RisConfig {
                orientation: f64::NAN,
                ..ok
            }),
            "RisConfig.orientation"
        );
    }

    fn rotate(p: Point2D, by: f64) -> Point2D {
        let (s, c) = by.sin_cos();
        Point2D::new(c * p.x - s * p.y, s * p.x + c * p.y)
    }

    proptest! {
        #[test]
        fn gain_is_monotone(n in 1u32..2048, eff in 0.01..1.0f64, gamma in 0.0..4.0f64,
                            c_in in 0.0..1.0f64, c_out in 0.0..1.0f64, bump in 0.0..1.0f64) {
            let p = RisGainParams { element_efficiency: eff, orientation_exponent: gamma, ..Default::default() };
            let g = reflection_gain(n, &p, c_in, c_out);
            prop_assert!(reflection_gain(n + 1, &p, c_in, c_out) >= g);
            prop_assert!(reflection_gain(n, &p, (c_in + bump).min(1.0), c_out) >= g);
            prop_assert!(reflection_gain(n, &p, c_in, (c_out + bump).min(1.0)) >= g);
            let more = RisGainParams { element_efficiency: (eff + bump).min(1.0), ..p.clone() };
            prop_assert!(reflection_gain(n, &more, c_in, c_out) >= g);
        }

        #[test]
        fn alignment_is_rotation_invariant(x in -50.0..50.0f64, y in -50.0..50.0f64,
                                          nx in -50.0..50.0f64, ny in -50.0..50.0f64,
                                          theta in -PI..PI, phi in -PI..PI) {
            let ris = RisConfig::new(Point2D::new(x, y), theta, 64, 0.5);
            let node = Point2D::new(nx, ny);
            prop_assume!((nx - x).hypot(ny - y) > 1e-3);
            let turned = RisConfig { position: rotate(ris.position, phi), orientation: theta + phi, ..ris };
            let a = alignment_factor(&ris, node).unwrap();
            let b = alignment_factor(&turned, rotate(node, phi)).unwrap();
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }

        #[test]
        fn cascade_is_linear_in_weight_and_amplitude(w in 0.0..1.0f64, g in 0.0..1e4f64, k in 0.0..4.0f64) {
            let a = Complex64::new(0.7, 0.2);
            let b = Complex64::new(-0.1, 1.3);
            let base = cascaded_gain(a, b, g, w).norm();
            prop_assert!((cascaded_gain(a, b, g, w * 0.5).norm() - 0.5 * base).abs() <= 1e-9 * (1.0 + base));
            prop_assert!((cascaded_gain(a, b, g * k * k, w).norm() - k * base).abs() <= 1e-9 * (1.0 + k * base));
        }
    }

    #[test]
    fn quarter_turn_alignment_is_zero() {
        let ris = ris_at_origin(FRAC_PI_2);
        assert!(alignment_factor(&ris, Point2D::new(3.0, 0.0)).unwrap() < 1e-15);
    }
}
