//! Coarse-to-fine search over the five-dimensional RIS configuration space.
//!
//! Round 0 evaluates the full initial grid (positions × orientations ×
//! element counts × ISAC weights). Every later round keeps the `k` best
//! candidates by scalar objective and samples a shrunken grid around each of
//! them. Scalars are population-relative, so the whole cumulative population
//! is re-scalarized after every round; raw metrics are cached and never
//! re-simulated.
//!
//! Candidate indices follow a fixed enumeration order and break every tie,
//! which makes results independent of thread count.

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{self, candidate_key, evaluate_candidate, MetricBundle};
use crate::objective::{argmin_scalar, scalarize, ObjectiveVector};
use crate::ris::RisConfig;
use crate::scenario::{distance, DeploymentArea, Point2D, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchParams {
    pub grid_x: usize,
    pub grid_y: usize,
    pub grid_theta: usize,
    pub num_elements: Vec<u32>,
    pub alphas: Vec<f64>,
    /// Candidates kept per round (`k`).
    pub elites_per_round: usize,
    pub shrink_factor: f64,
    pub max_rounds: usize,
    pub convergence_eps: f64,
    /// Samples per continuous dimension around each elite; odd, at least 3.
    pub refine_points: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            grid_x: 10,
            grid_y: 10,
            grid_theta: 8,
            num_elements: vec![64, 128, 256, 512],
            alphas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            elites_per_round: 10,
            shrink_factor: 0.5,
            max_rounds: 5,
            convergence_eps: 1e-4,
            refine_points: 3,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, msg: &str| Err(Error::validation(format!("SearchParams.{field}"), msg));
        if self.grid_x == 0 || self.grid_y == 0 || self.grid_theta == 0 {
            return fail("grid", "grid counts must be >= 1");
        }
        if self.num_elements.is_empty() || self.num_elements.contains(&0) {
            return fail("num_elements", "must be a non-empty set of positive counts");
        }
        if self.alphas.is_empty() || !self.alphas.iter().all(|a| (0.0..=1.0).contains(a)) {
            return fail("alphas", "must be a non-empty set of values in [0, 1]");
        }
        if self.elites_per_round == 0 {
            return fail("elites_per_round", "must be >= 1");
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return fail("shrink_factor", "must be in (0, 1)");
        }
        if self.max_rounds == 0 {
            return fail("max_rounds", "must be >= 1");
        }
        if !(self.convergence_eps.is_finite() && self.convergence_eps >= 0.0) {
            return fail("convergence_eps", "must be finite and >= 0");
        }
        if self.refine_points < 3 || self.refine_points.is_multiple_of(2) {
            return fail("refine_points", "must be odd and >= 3");
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let p: SearchParams = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    fn cell_x(&self, area: &DeploymentArea) -> f64 {
        area.width() / self.grid_x as f64
    }

    fn cell_y(&self, area: &DeploymentArea) -> f64 {
        area.height() / self.grid_y as f64
    }

    fn cell_theta(&self) -> f64 {
        TAU / self.grid_theta as f64
    }

    /// Position grid spacing after `rounds` rounds (the refined cell size).
    pub fn refined_cell(&self, area: &DeploymentArea, rounds: usize) -> (f64, f64) {
        let s = self.shrink_factor.powi(rounds.saturating_sub(1) as i32);
        (self.cell_x(area) * s, self.cell_y(area) * s)
    }
}

/// Scores a single candidate. Implementations must be pure.
pub trait CandidateEvaluator: Sync {
    fn evaluate(&self, ris: &RisConfig) -> Result<MetricBundle>;

    /// Scores a batch in order. Overrides must agree with [`Self::evaluate`].
    fn evaluate_batch(&self, batch: &[RisConfig]) -> Result<Vec<MetricBundle>> {
        batch.par_iter().map(|r| self.evaluate(r)).collect()
    }
}

/// Evaluates candidates in a scenario, keying substreams by RIS position.
pub struct ScenarioEvaluator<'a> {
    pub cfg: &'a ScenarioConfig,
}

impl CandidateEvaluator for ScenarioEvaluator<'_> {
    fn evaluate(&self, ris: &RisConfig) -> Result<MetricBundle> {
        evaluate_candidate(self.cfg, ris, candidate_key(ris))
    }

    fn evaluate_batch(&self, batch: &[RisConfig]) -> Result<Vec<MetricBundle>> {
        metrics::evaluate_batch(self.cfg, batch)
    }
}

/// Bounds of the search and positions a RIS may not occupy.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub area: DeploymentArea,
    pub forbidden: Vec<Point2D>,
}

impl SearchSpace {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            area: cfg.area,
            forbidden: vec![cfg.bs, cfg.bob, cfg.eve, cfg.target],
        }
    }

    fn admits(&self, p: Point2D) -> bool {
        self.forbidden.iter().all(|f| distance(*f, p) > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluatedCandidate {
    pub index: usize,
    pub ris: RisConfig,
    pub metrics: MetricBundle,
    pub objective: ObjectiveVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Representatives {
    pub best_snr_b: EvaluatedCandidate,
    pub best_security_gap: EvaluatedCandidate,
    pub best_sensing_gain: EvaluatedCandidate,
    /// Smallest scalar objective.
    pub balanced: EvaluatedCandidate,
}

impl Representatives {
    pub fn named(&self) -> [(&'static str, &EvaluatedCandidate); 4] {
        [
            ("best_snr_b", &self.best_snr_b),
            ("best_security_gap", &self.best_security_gap),
            ("best_sensing_gain", &self.best_sensing_gain),
            ("balanced", &self.balanced),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizationResult {
    /// Every evaluated candidate, ordered by index, scored against the whole set.
    pub candidates: Vec<EvaluatedCandidate>,
    pub representatives: Representatives,
    pub rounds_executed: usize,
    /// True when the search stopped because the best scalar improved by less
    /// than `convergence_eps` (or no new candidates remained).
    pub converged: bool,
    /// Best final scalar among candidates evaluated up to each round.
    pub best_scalar_history: Vec<f64>,
}

impl OptimizationResult {
    pub fn best(&self) -> &EvaluatedCandidate {
        &self.representatives.balanced
    }
}

fn argmax_by(candidates: &[EvaluatedCandidate], key: impl Fn(&EvaluatedCandidate) -> f64) -> usize {
    let mut best = 0;
    for i in 1..candidates.len() {
        let (a, b) = (key(&candidates[i]), key(&candidates[best]));
        if a > b || (a == b && candidates[i].index < candidates[best].index) {
            best = i;
        }
    }
    best
}

/// Argmax of each raw metric and argmin of the scalar; ties go to the
/// lowest candidate index.
pub fn extract_representatives(candidates: &[EvaluatedCandidate]) -> Result<Representatives> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no evaluated candidates".into()));
    }
    let balanced = argmax_by(candidates, |c| -c.objective.scalar);
    Ok(Representatives {
        best_snr_b: candidates[argmax_by(candidates, |c| c.metrics.snr_b_db)].clone(),
        best_security_gap: candidates[argmax_by(candidates, |c| c.metrics.security_gap_db)].clone(),
        best_sensing_gain: candidates[argmax_by(candidates, |c| c.metrics.sensing_gain_db)].clone(),
        balanced: candidates[balanced].clone(),
    })
}

fn wrap_angle(t: f64) -> f64 {
    let a = t.rem_euclid(TAU);
    if a > PI {
        a - TAU
    } else {
        a
    }
}

type DedupKey = (i64, i64, i64, u32, i64);

fn dedup_key(r: &RisConfig) -> DedupKey {
    (
        (r.position.x * 1e6).round() as i64,
        (r.position.y * 1e6).round() as i64,
        (r.orientation * 1e9).round() as i64,
        r.num_elements,
        (r.alpha * 1e9).round() as i64,
    )
}

/// Round-0 candidates in enumeration order (x, y, θ, N, α; x outermost),
/// with positions at cell centers and orientations at sector centers.
pub fn initial_grid(space: &SearchSpace, params: &SearchParams) -> Vec<RisConfig> {
    let area = &space.area;
    let (dx, dy, dt) = (params.cell_x(area), params.cell_y(area), params.cell_theta());
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for i in 0..params.grid_x {
        let x = area.x_min + (i as f64 + 0.5) * dx;
        for j in 0..params.grid_y {
            let y = area.y_min + (j as f64 + 0.5) * dy;
            let p = Point2D::new(x, y);
            if !space.admits(p) {
                continue;
            }
            for t in 0..params.grid_theta {
                let theta = wrap_angle(-PI + (t as f64 + 0.5) * dt);
                for &n in &params.num_elements {
                    for &alpha in &params.alphas {
                        let ris = RisConfig::new(p, theta, n, alpha);
                        if seen.insert(dedup_key(&ris)) {
                            out.push(ris);
                        }
                    }
                }
            }
        }
    }
    out
}

fn offsets(points: usize, step: f64) -> Vec<f64> {
    let half = (points / 2) as i64;
    (-half..=half).map(|j| j as f64 * step).collect()
}

/// Values adjacent to `v` in the sorted discrete set, plus `v` itself.
fn set_neighbours<T: Copy + PartialOrd>(v: T, set: &[T]) -> Vec<T> {
    let mut sorted: Vec<T> = set.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("set values are comparable"));
    sorted.dedup();
    match sorted.iter().position(|&s| s == v) {
        Some(i) => sorted[i.saturating_sub(1)..(i + 2).min(sorted.len())].to_vec(),
        None => vec![v],
    }
}

fn refine_around(elite: &RisConfig, round: usize, space: &SearchSpace, params: &SearchParams) -> Vec<RisConfig> {
    let area = &space.area;
    let s = params.shrink_factor.powi(round as i32);
    let m = params.refine_points;
    let xs = offsets(m, params.cell_x(area) * s);
    let ys = offsets(m, params.cell_y(area) * s);
    let ts = offsets(m, params.cell_theta() * s);
    let sizes = set_neighbours(elite.num_elements, &params.num_elements);
    let alphas = set_neighbours(elite.alpha, &params.alphas);

    let mut out = Vec::new();
    for ox in &xs {
        let x = (elite.position.x + ox).clamp(area.x_min, area.x_max);
        for oy in &ys {
            let y = (elite.position.y + oy).clamp(area.y_min, area.y_max);
            let p = Point2D::new(x, y);
            if !space.admits(p) {
                continue;
            }
            for ot in &ts {
                let theta = wrap_angle(elite.orientation + ot);
                for &n in &sizes {
                    for &alpha in &alphas {
                        out.push(RisConfig::new(p, theta, n, alpha));
                    }
                }
            }
        }
    }
    out
}

fn indices_by_scalar(objectives: &[ObjectiveVector]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..objectives.len()).collect();
    order.sort_by(|&a, &b| objectives[a].scalar.total_cmp(&objectives[b].scalar).then(a.cmp(&b)));
    order
}

fn assemble(
    configs: Vec<RisConfig>,
    metrics: Vec<MetricBundle>,
    round_ends: &[usize],
    converged: bool,
) -> Result<OptimizationResult> {
    let objectives = scalarize(&metrics)?;
    let candidates: Vec<EvaluatedCandidate> = configs
        .into_iter()
        .zip(metrics)
        .zip(objectives)
        .enumerate()
        .map(|(index, ((ris, metrics), objective))| EvaluatedCandidate {
            index,
            ris,
            metrics,
            objective,
        })
        .collect();
    let best_scalar_history = round_ends
        .iter()
        .map(|&end| {
            candidates[..end]
                .iter()
                .map(|c| c.objective.scalar)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let representatives = extract_representatives(&candidates)?;
    Ok(OptimizationResult {
        candidates,
        representatives,
        rounds_executed: round_ends.len(),
        converged,
        best_scalar_history,
    })
}

/// Elite-retention coarse-to-fine search with an arbitrary evaluator.
pub fn iterative_search_with(
    evaluator: &dyn CandidateEvaluator,
    space: &SearchSpace,
    params: &SearchParams,
) -> Result<OptimizationResult> {
    params.validate()?;
    let mut configs = initial_grid(space, params);
    if configs.is_empty() {
        return Err(Error::InvalidInput("initial grid has no admissible candidates".into()));
    }
    let mut seen: HashSet<DedupKey> = configs.iter().map(dedup_key).collect();
    let mut metrics = evaluator.evaluate_batch(&configs)?;
    let mut round_ends = vec![configs.len()];
    let mut objectives = scalarize(&metrics)?;
    let mut best = argmin_scalar(&objectives).expect("non-empty population");
    let mut converged = false;

    while round_ends.len() < params.max_rounds {
        let round = round_ends.len();
        let mut proposals = Vec::new();
        for &e in indices_by_scalar(&objectives).iter().take(params.elites_per_round) {
            for ris in refine_around(&configs[e], round, space, params) {
                if seen.insert(dedup_key(&ris)) {
                    proposals.push(ris);
                }
            }
        }
        if proposals.is_empty() {
            converged = true;
            break;
        }
        metrics.extend(evaluator.evaluate_batch(&proposals)?);
        configs.extend(proposals);
        round_ends.push(configs.len());

        objectives = scalarize(&metrics)?;
        let new_best = argmin_scalar(&objectives).expect("non-empty population");
        let improvement = objectives[best].scalar - objectives[new_best].scalar;
        best = new_best;
        if improvement < params.convergence_eps {
            converged = true;
            break;
        }
    }

    assemble(configs, metrics, &round_ends, converged)
}

/// Runs the search in a scenario.
pub fn iterative_search(cfg: &ScenarioConfig, params: &SearchParams) -> Result<OptimizationResult> {
    params.validate()?;
    for &n in &params.num_elements {
        if !cfg.ris_gain.allowed_num_elements.contains(&n) {
            return Err(Error::validation(
                "SearchParams.num_elements",
                format!("{n} is not an allowed element count"),
            ));
        }
    }
    iterative_search_with(&ScenarioEvaluator { cfg }, &SearchSpace::from_config(cfg), params)
}

/// Evaluates every listed candidate once, in order. Serves as the oracle for
/// the iterative search.
pub fn exhaustive_grid_with(evaluator: &dyn CandidateEvaluator, grid: &[RisConfig]) -> Result<OptimizationResult> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("candidate list is empty".into()));
    }
    let metrics = evaluator.evaluate_batch(grid)?;
    assemble(grid.to_vec(), metrics, &[grid.len()], false)
}

pub fn exhaustive_grid(cfg: &ScenarioConfig, grid: &[RisConfig]) -> Result<OptimizationResult> {
    exhaustive_grid_with(&ScenarioEvaluator { cfg }, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// All three metrics equal the negated distance to `peak`.
    struct Peak {
        peak: Point2D,
    }

    impl CandidateEvaluator for Peak {
        fn evaluate(&self, ris: &RisConfig) -> Result<MetricBundle> {
            let d = -distance(ris.position, self.peak);
            Ok(MetricBundle::from_snrs(d, 0.0, 0.0, d, 0.0))
        }
    }

    fn small_params() -> SearchParams {
        SearchParams {
            grid_x: 10,
            grid_y: 10,
            grid_theta: 1,
            num_elements: vec![64],
            alphas: vec![0.5],
            elites_per_round: 4,
            shrink_factor: 0.5,
            max_rounds: 3,
            convergence_eps: 0.0,
            refine_points: 3,
        }
    }

    fn space() -> SearchSpace {
        SearchSpace {
            area: DeploymentArea::default(),
            forbidden: vec![],
        }
    }

    fn bare(index: usize, snr_b: f64, gap_e: f64, gain: f64, scalar: f64) -> EvaluatedCandidate {
        let metrics = MetricBundle::from_snrs(snr_b, 0.0, snr_b - gap_e, gain, 0.0);
        EvaluatedCandidate {
            index,
            ris: RisConfig::new(Point2D::new(1.0, 1.0), 0.0, 64, 0.5),
            metrics,
            objective: ObjectiveVector {
                raw: ObjectiveVector::raw_of(&metrics),
                normalized: [0.0; 3],
                scalar,
            },
        }
    }

    #[test]
    fn default_params_are_valid_and_size_the_grid() {
        let p = SearchParams::default();
        p.validate().unwrap();
        assert_eq!(initial_grid(&space(), &p).len(), 10 * 10 * 8 * 4 * 5);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let bad = [
            SearchParams {
                shrink_factor: 1.0,
                ..Default::default()
            },
            SearchParams {
                elites_per_round: 0,
                ..Default::default()
            },
            SearchParams {
                max_rounds: 0,
                ..Default::default()
            },
            SearchParams {
                refine_points: 4,
                ..Default::default()
            },
            SearchParams {
                alphas: vec![1.5],
                ..Default::default()
            },
            SearchParams {
                grid_theta: 0,
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(matches!(p.validate(), Err(Error::Validation { .. })), "{p:?}");
        }
        assert!(matches!(
            SearchParams::from_json_str("{\"max_rounds\": 0}"),
            Err(Error::Validation { .. })
        ));
        assert_eq!(SearchParams::from_json_str("{}").unwrap(), SearchParams::default());
    }

    #[test]
    fn initial_grid_skips_node_positions() {
        let s = SearchSpace {
            area: DeploymentArea::default(),
            forbidden: vec![Point2D::new(5.0, 5.0)],
        };
        let grid = initial_grid(&s, &small_params());
        assert_eq!(grid.len(), 99);
        assert!(grid.iter().all(|r| r.position != Point2D::new(5.0, 5.0)));
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(wrap_angle(0.25), 0.25);
    }

    #[test]
    fn neighbours_stay_in_set() {
        let set = [512, 64, 256, 128];
        assert_eq!(set_neighbours(64, &set), vec![64, 128]);
        assert_eq!(set_neighbours(256, &set), vec![128, 256, 512]);
        assert_eq!(set_neighbours(512, &set), vec![256, 512]);
        let alphas = [1.0, 0.0, 0.25, 0.5, 0.75];
        assert_eq!(set_neighbours(0.0, &alphas), vec![0.0, 0.25]);
        assert_eq!(set_neighbours(0.75, &alphas), vec![0.5, 0.75, 1.0]);
    }

    #[test]
    fn single_round_matches_exhaustive_grid() {
        let peak = Peak {
            peak: Point2D::new(31.0, 62.0),
        };
        let params = SearchParams {
            max_rounds: 1,
            ..small_params()
        };
        let iter = iterative_search_with(&peak, &space(), &params).unwrap();
        let grid = exhaustive_grid_with(&peak, &initial_grid(&space(), &params)).unwrap();
        assert_eq!(iter, grid);
    }

    #[test]
    fn converges_on_synthetic_peak() {
        let peak = Point2D::new(37.3, 81.9);
        let params = small_params();
        let r = iterative_search_with(&Peak { peak }, &space(), &params).unwrap();
        assert_eq!(r.rounds_executed, 3);
        let (cx, cy) = params.refined_cell(&space().area, 3);
        assert!(distance(r.best().ris.position, peak) <= cx.hypot(cy));
        for w in r.best_scalar_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn stops_when_improvement_is_small() {
        let params = SearchParams {
            convergence_eps: 10.0,
            max_rounds: 5,
            ..small_params()
        };
        let r = iterative_search_with(
            &Peak {
                peak: Point2D::new(50.0, 50.0),
            },
            &space(),
            &params,
        )
        .unwrap();
        assert!(r.converged);
        assert_eq!(r.rounds_executed, 2);
    }

    #[test]
    fn singleton_grid_is_every_representative() {
        let peak = Peak {
            peak: Point2D::new(0.0, 0.0),
        };
        let only = RisConfig::new(Point2D::new(3.0, 4.0), 0.0, 64, 0.2);
        let r = exhaustive_grid_with(&peak, &[only]).unwrap();
        assert_eq!(r.best().objective.scalar, 0.0);
        for (_, rep) in r.representatives.named() {
            assert_eq!(rep, &r.candidates[0]);
        }
        assert!(exhaustive_grid_with(&peak, &[]).is_err());
    }

    #[test]
    fn dominant_candidate_takes_all_four_roles() {
        let set = vec![
            bare(0, 1.0, 1.0, 1.0, 2.0),
            bare(1, 5.0, 5.0, 5.0, 0.0),
            bare(2, 2.0, 3.0, 0.0, 1.5),
        ];
        let reps = extract_representatives(&set).unwrap();
        for (_, rep) in reps.named() {
            assert_eq!(rep.index, 1);
        }
    }

    #[test]
    fn duplicates_resolve_to_lower_index() {
        let set = vec![
            bare(0, 1.0, 1.0, 1.0, 1.0),
            bare(1, 4.0, 4.0, 4.0, 0.5),
            bare(2, 4.0, 4.0, 4.0, 0.5),
        ];
        let reps = extract_representatives(&set).unwrap();
        for (_, rep) in reps.named() {
            assert_eq!(rep.index, 1);
        }
        assert!(extract_representatives(&[]).is_err());
    }

    #[test]
    fn sensing_and_balanced_can_coincide() {
        // Mirrors a frequently observed outcome: the sensing-best candidate is
        // also the balanced one while SNR and gap peak elsewhere.
        let set = vec![
            bare(0, 9.0, 8.0, 0.0, 1.0),
            bare(1, 5.0, 5.0, 9.0, 0.4),
            bare(2, 6.0, 9.0, 1.0, 0.9),
        ];
        let reps = extract_representatives(&set).unwrap();
        assert_eq!(reps.best_snr_b.index, 0);
        assert_eq!(reps.best_security_gap.index, 2);
        assert_eq!(reps.best_sensing_gain.index, 1);
        assert_eq!(reps.balanced, reps.best_sensing_gain);
    }
}
