//! Metric heatmaps over a regular grid of RIS positions.
//!
//! Orientation, element count and ISAC weight are held fixed while the RIS
//! is placed at every cell center. Substreams are keyed by the quantized cell
//! center, so a coarse and a fine sweep produce identical values at the
//! positions they share.
//!
//! Grids are exported as CSV with four `#` header lines followed by one
//! comma-separated line per row. Row 0 is the southernmost row (smallest y),
//! column 0 the westernmost. A JSON sidecar next to the CSV carries the same
//! metadata plus provenance.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{evaluate_batch, MetricBundle};
use crate::objective::scalarize;
use crate::ris::RisConfig;
use crate::scenario::{Point2D, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    DeltaSnrB,
    SensingGain,
    SecurityGap,
    ScalarObjective,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::DeltaSnrB,
        MetricKind::SensingGain,
        MetricKind::SecurityGap,
        MetricKind::ScalarObjective,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::DeltaSnrB => "delta_snr_b",
            MetricKind::SensingGain => "sensing_gain",
            MetricKind::SecurityGap => "security_gap",
            MetricKind::ScalarObjective => "scalar_objective",
        }
    }

    fn of(self, m: &MetricBundle) -> f64 {
        match self {
            MetricKind::DeltaSnrB => m.delta_snr_b_db,
            MetricKind::SensingGain => m.sensing_gain_db,
            MetricKind::SecurityGap => m.security_gap_db,
            MetricKind::ScalarObjective => unreachable!("scalar needs the whole population"),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown metric '{s}'")))
    }
}

/// RIS parameters held constant across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    pub theta: f64,
    pub num_elements: u32,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridProvenance {
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGrid {
    pub metric: MetricKind,
    /// Lower-left corner of the swept area.
    pub origin: Point2D,
    pub cell_size: f64,
    pub rows: usize,
    pub cols: usize,
    /// Row-major, `rows * cols` values.
    pub values: Vec<f64>,
    pub fixed: FixedParams,
    pub provenance: GridProvenance,
}

impl MetricGrid {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn cell_center(&self, row: usize, col: usize) -> Point2D {
        Point2D::new(
            self.origin.x + (col as f64 + 0.5) * self.cell_size,
            self.origin.y + (row as f64 + 0.5) * self.cell_size,
        )
    }
}

fn cells_along(extent: f64, cell_size: f64, axis: &str) -> Result<usize> {
    let n = (extent / cell_size).round();
    if n < 1.0 || (n * cell_size - extent).abs() > 1e-9 * extent.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "cell size {cell_size} does not divide the {axis} extent {extent}"
        )));
    }
    Ok(n as usize)
}

/// Evaluates the requested metrics at every cell center of the deployment area.
pub fn sweep_grid(
    cfg: &ScenarioConfig,
    fixed: FixedParams,
    cell_size: f64,
    metrics: &[MetricKind],
) -> Result<Vec<MetricGrid>> {
    if !(cell_size.is_finite() && cell_size > 0.0) {
        return Err(Error::InvalidInput(format!(
            "cell size must be positive, got {cell_size}"
        )));
    }
    let cols = cells_along(cfg.area.width(), cell_size, "x")?;
    let rows = cells_along(cfg.area.height(), cell_size, "y")?;
    let origin = Point2D::new(cfg.area.x_min, cfg.area.y_min);

    let centers: Vec<Point2D> = (0..rows)
        .flat_map(|r| {
            (0..cols).map(move |c| {
                Point2D::new(
                    origin.x + (c as f64 + 0.5) * cell_size,
                    origin.y + (r as f64 + 0.5) * cell_size,
                )
            })
        })
        .collect();
    let nodes = [
        ("bs", cfg.bs),
        ("bob", cfg.bob),
        ("eve", cfg.eve),
        ("target", cfg.target),
    ];
    for p in &centers {
        if let Some((name, _)) = nodes.iter().find(|(_, n)| n == p) {
            return Err(Error::InvalidInput(format!(
                "cell size {cell_size} puts a cell center on {name} at ({}, {})",
                p.x, p.y
            )));
        }
    }
    let batch: Vec<RisConfig> = centers
        .iter()
        .map(|&p| RisConfig::new(p, fixed.theta, fixed.num_elements, fixed.alpha))
        .collect();
    let bundles = evaluate_batch(cfg, &batch)?;

    let provenance = GridProvenance {
        config_hash: cfg.config_hash(),
        seed: cfg.master_seed,
        tool_version: crate::VERSION.to_string(),
    };
    let mut out = Vec::with_capacity(metrics.len());
    for &metric in metrics {
        let values: Vec<f64> = match metric {
            MetricKind::ScalarObjective => scalarize(&bundles)?.iter().map(|o| o.scalar).collect(),
            m => bundles.iter().map(|b| m.of(b)).collect(),
        };
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "{metric} is not finite at cell ({}, {})",
                i / cols,
                i % cols
            )));
        }
        out.push(MetricGrid {
            metric,
            origin,
            cell_size,
            rows,
            cols,
            values,
            fixed,
            provenance: provenance.clone(),
        });
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSidecar {
    metric: MetricKind,
    origin: Point2D,
    cell_size: f64,
    rows: usize,
    cols: usize,
    row_order: String,
    fixed_params: FixedParams,
    provenance: GridProvenance,
}

const ROW_ORDER: &str = "increasing_y";

/// Path of the JSON sidecar for a CSV grid file.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn csv_text(grid: &MetricGrid) -> String {
    let mut s = String::new();
    s += &format!("# metric: {}\n", grid.metric);
    s += &format!("# origin: {},{}\n", grid.origin.x, grid.origin.y);
    s += &format!("# cell_size: {}\n", grid.cell_size);
    s += &format!(
        "# fixed_params: theta={},num_elements={},alpha={}\n",
        grid.fixed.theta, grid.fixed.num_elements, grid.fixed.alpha
    );
    for row in grid.values.chunks(grid.cols) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s += &line.join(",");
        s.push('\n');
    }
    s
}

/// Writes the CSV grid to `path` and its JSON sidecar next to it. Returns
/// both paths.
pub fn export_grid(grid: &MetricGrid, path: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    let path = path.as_ref();
    fs::write(path, csv_text(grid)).map_err(|e| Error::io(path, e))?;
    let sidecar = GridSidecar {
        metric: grid.metric,
        origin: grid.origin,
        cell_size: grid.cell_size,
        rows: grid.rows,
        cols: grid.cols,
        row_order: ROW_ORDER.into(),
        fixed_params: grid.fixed,
        provenance: grid.provenance.clone(),
    };
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes") + "\n";
    fs::write(&side, json).map_err(|e| Error::io(&side, e))?;
    Ok((path.to_path_buf(), side))
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("{what}: '{s}': {e}")))
}

fn header<'a>(lines: &mut impl Iterator<Item = &'a str>, key: &str) -> Result<&'a str> {
    let line = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("missing '# {key}' header")))?;
    line.strip_prefix(&format!("# {key}: "))
        .ok_or_else(|| Error::Parse(format!("expected '# {key}' header, got '{line}'")))
}

/// Reads a grid written by [`export_grid`], including its sidecar.
pub fn import_grid(path: impl AsRef<Path>) -> Result<MetricGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();

    let metric: MetricKind = header(&mut lines, "metric")?.parse()?;
    let origin = header(&mut lines, "origin")?;
    let (ox, oy) = origin
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("bad origin '{origin}'")))?;
    let origin = Point2D::new(parse_f64(ox, "origin")?, parse_f64(oy, "origin")?);
    let cell_size = parse_f64(header(&mut lines, "cell_size")?, "cell_size")?;

    let mut theta = None;
    let mut num_elements = None;
    let mut alpha = None;
    for part in header(&mut lines, "fixed_params")?.split(',') {
        match part.split_once('=') {
            Some(("theta", v)) => theta = Some(parse_f64(v, "theta")?),
            Some(("alpha", v)) => alpha = Some(parse_f64(v, "alpha")?),
            Some(("num_elements", v)) => {
                num_elements = Some(
                    v.parse::<u32>()
                        .map_err(|e| Error::Parse(format!("num_elements: {e}")))?,
                )
            }
            _ => return Err(Error::Parse(format!("bad fixed_params entry '{part}'"))),
        }
    }
    let missing = || Error::Parse("incomplete fixed_params header".into());
    let fixed = FixedParams {
        theta: theta.ok_or_else(missing)?,
        num_elements: num_elements.ok_or_else(missing)?,
        alpha: alpha.ok_or_else(missing)?,
    };

    let mut values = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let row: Vec<f64> = line.split(',').map(|v| parse_f64(v, "cell")).collect::<Result<_>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(Error::Parse(format!(
                    "row {rows} has {} values, expected {c}",
                    row.len()
                )))
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse("grid has no rows".into()))?;

    let side = sidecar_path(path);
    let side_text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let sidecar: GridSidecar = serde_json::from_str(&side_text).map_err(|e| Error::Parse(e.to_string()))?;
    if sidecar.metric != metric || sidecar.rows != rows || sidecar.cols != cols {
        return Err(Error::Parse("sidecar disagrees with CSV".into()));
    }

    Ok(MetricGrid {
        metric,
        origin,
        cell_size,
        rows,
        cols,
        values,
        fixed,
        provenance: sidecar.provenance,
    })
}
