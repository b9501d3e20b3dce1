//! Point sets, the diamond scatter family, CSV ingestion and normalization.

use std::collections::HashMap;
use std::path::Path;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` points in `d` dimensions with optional ground-truth class ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    points: Array2<f64>,
    labels: Option<Vec<usize>>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        points: Array2<f64>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let (n, d) = points.dim();
        if n == 0 || d == 0 {
            return Err(Error::InvalidInput(format!(
                "dataset needs at least one point and one feature, got {n}x{d}"
            )));
        }
        if let Some((idx, _)) = points.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite coordinate at point {}, feature {}",
                idx / d,
                idx % d
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "{} labels for {} points",
                    labels.len(),
                    n
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            points,
            labels,
        })
    }

    pub fn from_rows(name: impl Into<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInput("rows have unequal length".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let points = Array2::from_shape_vec((rows.len(), d), flat)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::new(name, points, None)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> ArrayView2<'_, f64> {
        self.points.view()
    }

    pub fn point(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn num_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |m| m + 1))
    }

    /// Reorders points (and labels) so that new point `i` is old point `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::ShapeMismatch("permutation length".into()));
        }
        let points = self.points.select(Axis(0), order);
        let labels = self
            .labels
            .as_ref()
            .map(|l| order.iter().map(|&i| l[i]).collect());
        Self::new(self.name.clone(), points, labels)
    }
}

// ---------------------------------------------------------------------------
// Diamond scatter family

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// Cluster centers on the x axis, `center_spacing` apart.
    Collinear,
    /// Cluster centers on a row-major grid with `ceil(sqrt(k))` columns.
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Motif {
    /// Center plus the four axis points at distance `s`.
    Five,
    /// The five-point diamond plus its four edge midpoints `(±s/2, ±s/2)`.
    Nine,
}

impl Motif {
    /// Offsets in emission order: left to right, top to bottom within a column.
    fn offsets(self, s: f64) -> Vec<[f64; 2]> {
        let h = s / 2.0;
        match self {
            Motif::Five => vec![[-s, 0.0], [0.0, s], [0.0, 0.0], [0.0, -s], [s, 0.0]],
            Motif::Nine => vec![
                [-s, 0.0],
                [-h, h],
                [-h, -h],
                [0.0, s],
                [0.0, 0.0],
                [0.0, -s],
                [h, h],
                [h, -h],
                [s, 0.0],
            ],
        }
    }

    pub fn size(self) -> usize {
        match self {
            Motif::Five => 5,
            Motif::Nine => 9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiamondSpec {
    pub num_clusters: usize,
    pub motif_scale: f64,
    pub center_spacing: f64,
    pub boundary_points_per_gap: usize,
    pub outliers: Vec<[f64; 2]>,
    pub layout: Layout,
    pub motif: Motif,
}

/// Ground-truth role of a generated diamond point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiamondRole {
    Motif { cluster: usize, offset: [i8; 2] },
    Boundary { a: usize, b: usize },
    Outlier,
}

const CLASSIC_SCALE: f64 = 5.0 / 3.0;
const CLASSIC_SPACING: f64 = 20.0 / 3.0;

impl DiamondSpec {
    fn classic(k: usize, per_gap: usize, motif: Motif) -> Self {
        Self {
            num_clusters: k,
            motif_scale: CLASSIC_SCALE,
            center_spacing: CLASSIC_SPACING,
            boundary_points_per_gap: per_gap,
            outliers: Vec::new(),
            layout: Layout::Collinear,
            motif,
        }
    }

    /// Horizontal midpoint of the collinear layout.
    fn mid_x(&self) -> f64 {
        (self.num_clusters - 1) as f64 * self.center_spacing / 2.0
    }

    /// Two five-point diamonds, one boundary point, one outlier straight above the boundary.
    pub fn x12() -> Self {
        let mut spec = Self::classic(2, 1, Motif::Five);
        spec.outliers = vec![[spec.mid_x(), 10.0]];
        spec
    }

    pub fn x19() -> Self {
        let mut spec = Self::classic(3, 1, Motif::Five);
        let x = spec.mid_x();
        spec.outliers = vec![[x, 10.0], [x, -10.0]];
        spec
    }

    pub fn x24() -> Self {
        let mut spec = Self::classic(4, 1, Motif::Five);
        spec.outliers = vec![[spec.mid_x(), 10.0]];
        spec
    }

    pub fn x35() -> Self {
        let mut spec = Self::classic(3, 3, Motif::Nine);
        let x = spec.mid_x();
        spec.outliers = vec![[x, 15.0], [x, -15.0]];
        spec
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "x12" => Some(Self::x12()),
            "x19" => Some(Self::x19()),
            "x24" => Some(Self::x24()),
            "x35" => Some(Self::x35()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_clusters < 2 {
            return Err(Error::InvalidConfig(format!(
                "diamond needs at least 2 clusters, got {}",
                self.num_clusters
            )));
        }
        if !(self.motif_scale > 0.0 && self.motif_scale.is_finite()) {
            return Err(Error::InvalidConfig("motif_scale must be positive".into()));
        }
        if !(self.center_spacing > 0.0 && self.center_spacing.is_finite()) {
            return Err(Error::InvalidConfig(
                "center_spacing must be positive".into(),
            ));
        }
        if self.center_spacing <= 2.0 * self.motif_scale {
            return Err(Error::InvalidConfig(format!(
                "center_spacing {} must exceed twice the motif scale {}",
                self.center_spacing, self.motif_scale
            )));
        }
        if self.outliers.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "outlier coordinates must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn centers(&self) -> Vec<[f64; 2]> {
        let k = self.num_clusters;
        let sp = self.center_spacing;
        match self.layout {
            Layout::Collinear => (0..k).map(|j| [j as f64 * sp, 0.0]).collect(),
            Layout::Grid => {
                let cols = grid_columns(k);
                (0..k)
                    .map(|j| [(j % cols) as f64 * sp, (j / cols) as f64 * sp])
                    .collect()
            }
        }
    }

    /// Adjacent center pairs `(a, b)` with `a < b`, in emission order.
    pub fn gaps(&self) -> Vec<(usize, usize)> {
        let k = self.num_clusters;
        match self.layout {
            Layout::Collinear => (0..k - 1).map(|j| (j, j + 1)).collect(),
            Layout::Grid => {
                let cols = grid_columns(k);
                let mut out = Vec::new();
                for j in 0..k {
                    if j % cols + 1 < cols && j + 1 < k {
                        out.push((j, j + 1));
                    }
                    if j + cols < k {
                        out.push((j, j + cols));
                    }
                }
                out
            }
        }
    }

    /// Label used for boundary points when truth labeling is requested.
    pub fn boundary_label(&self) -> usize {
        self.num_clusters
    }

    /// Label used for outliers when truth labeling is requested.
    pub fn outlier_label(&self) -> usize {
        self.num_clusters + 1
    }

    pub fn total_points(&self) -> usize {
        self.num_clusters * self.motif.size()
            + self.gaps().len() * self.boundary_points_per_gap
            + self.outliers.len()
    }

    /// Points and roles in emission order: motif of cluster `j`, then the boundary points of
    /// every gap `(j, b)`, then the next cluster; outliers last.
    pub fn layout_points(&self) -> Result<Vec<([f64; 2], DiamondRole)>> {
        self.validate()?;
        let s = self.motif_scale;
        let centers = self.centers();
        let gaps = self.gaps();
        let offsets = self.motif.offsets(s);
        let mut out = Vec::with_capacity(self.total_points());

        for (j, c) in centers.iter().enumerate() {
            for off in &offsets {
                let unit = [
                    (off[0] / s * 2.0).round() as i8,
                    (off[1] / s * 2.0).round() as i8,
                ];
                out.push((
                    [c[0] + off[0], c[1] + off[1]],
                    DiamondRole::Motif {
                        cluster: j,
                        offset: unit,
                    },
                ));
            }
            for &(a, b) in gaps.iter().filter(|(a, _)| *a == j) {
                let (ca, cb) = (centers[a], centers[b]);
                let mid = [(ca[0] + cb[0]) / 2.0, (ca[1] + cb[1]) / 2.0];
                // unit normal to the gap direction; gaps are axis-aligned
                let normal = if (ca[1] - cb[1]).abs() < f64::EPSILON {
                    [0.0, 1.0]
                } else {
                    [1.0, 0.0]
                };
                for q in 0..self.boundary_points_per_gap {
                    let step = perpendicular_step(q) * s;
                    out.push((
                        [mid[0] + normal[0] * step, mid[1] + normal[1] * step],
                        DiamondRole::Boundary { a, b },
                    ));
                }
            }
        }
        out.extend(self.outliers.iter().map(|&o| (o, DiamondRole::Outlier)));
        Ok(out)
    }
}

fn grid_columns(k: usize) -> usize {
    (k as f64).sqrt().ceil() as usize
}

/// 0, +1, -1, +2, -2, ...
fn perpendicular_step(q: usize) -> f64 {
    if q == 0 {
        0.0
    } else {
        let mag = q.div_ceil(2) as f64;
        if q % 2 == 1 {
            mag
        } else {
            -mag
        }
    }
}

/// Builds a diamond-family scatter dataset. With `truth_labeling`, motif points carry their
/// cluster id, boundary points [`DiamondSpec::boundary_label`], outliers
/// [`DiamondSpec::outlier_label`].
pub fn generate_diamond(spec: &DiamondSpec, truth_labeling: bool) -> Result<Dataset> {
    let pts = spec.layout_points()?;
    let flat: Vec<f64> = pts.iter().flat_map(|(p, _)| *p).collect();
    let points = Array2::from_shape_vec((pts.len(), 2), flat)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let labels = truth_labeling.then(|| {
        pts.iter()
            .map(|(_, role)| match role {
                DiamondRole::Motif { cluster, .. } => *cluster,
                DiamondRole::Boundary { .. } => spec.boundary_label(),
                DiamondRole::Outlier => spec.outlier_label(),
            })
            .collect()
    });
    let name = format!("diamond-k{}-n{}", spec.num_clusters, pts.len());
    Dataset::new(name, points, labels)
}

// ---------------------------------------------------------------------------
// CSV

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Last,
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub label_column: Option<LabelColumn>,
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            label_column: None,
            delimiter: b',',
            has_header: false,
        }
    }
}

/// Reads a delimited numeric table. Class names in the label column are mapped to
/// contiguous ids in order of first appearance.
pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut flat = Vec::new();
    let mut labels = Vec::new();
    let mut class_ids: HashMap<String, usize> = HashMap::new();
    let mut width: Option<usize> = None;
    let mut rows = 0usize;

    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse {
                path: path.to_path_buf(),
                row,
                column: 0,
                message: e.to_string(),
            }
        })?;
        let row = record.position().map_or(rows + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Ragged {
                path: path.to_path_buf(),
                row,
                found: record.len(),
                expected,
            });
        }
        let label_idx = match options.label_column {
            Some(LabelColumn::Index(i)) if i >= expected => {
                return Err(Error::InvalidInput(format!(
                    "label column {i} out of range for {expected} fields"
                )))
            }
            Some(LabelColumn::Index(i)) => Some(i),
            Some(LabelColumn::Last) => Some(expected - 1),
            None => None,
        };
        for (col, field) in record.iter().enumerate() {
            if Some(col) == label_idx {
                let next = class_ids.len();
                labels.push(*class_ids.entry(field.to_string()).or_insert(next));
                continue;
            }
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                row,
                column: col + 1,
                message: format!("cannot parse {field:?} as a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    row,
                    column: col + 1,
                    message: format!("non-finite value {field:?}"),
                });
            }
            flat.push(value);
        }
        rows += 1;
    }

    let width = width.unwrap_or(0);
    let d = width - usize::from(options.label_column.is_some() && width > 0);
    if rows == 0 || d == 0 {
        return Err(Error::InvalidInput(format!(
            "{} contains no numeric data",
            path.display()
        )));
    }
    let points =
        Array2::from_shape_vec((rows, d), flat).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let name = path
        .file_stem()
        .map_or_else(|| "csv".to_string(), |s| s.to_string_lossy().into_owned());
    Dataset::new(
        name,
        points,
        options.label_column.is_some().then_some(labels),
    )
}

// ---------------------------------------------------------------------------
// Normalization

/// Global divisor applied after per-feature min-max scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMode {
    /// Divide by the largest pairwise distance, so the diameter becomes exactly 1.
    #[default]
    Diameter,
    /// Divide by `sqrt(d)`, the diameter of the unit hypercube.
    SqrtDim,
}

/// Everything needed to map normalized coordinates back to input units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub min: Vec<f64>,
    pub range: Vec<f64>,
    pub scale: f64,
    pub mode: ScaleMode,
    pub dim: usize,
}

impl NormalizationRecord {
    pub fn apply(&self, x: ArrayView1<f64>) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(f, &v)| {
                if self.range[f] > 0.0 {
                    (v - self.min[f]) / self.range[f] / self.scale
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn restore(&self, y: ArrayView1<f64>) -> Vec<f64> {
        y.iter()
            .enumerate()
            .map(|(f, &v)| self.min[f] + v * self.scale * self.range[f])
            .collect()
    }

    pub fn restore_matrix(&self, y: ArrayView2<f64>) -> Array2<f64> {
        let mut out = y.to_owned();
        for mut row in out.rows_mut() {
            let restored = self.restore(row.view());
            row.iter_mut().zip(restored).for_each(|(dst, v)| *dst = v);
        }
        out
    }
}

pub fn normalize(data: &Dataset) -> Result<(Dataset, NormalizationRecord)> {
    normalize_with(data, ScaleMode::default())
}

/// Min-max scales every feature to `[0, 1]` (constant features map to 0), then divides by the
/// global scale of `mode`. Afterwards every pairwise squared distance is at most 1.
pub fn normalize_with(data: &Dataset, mode: ScaleMode) -> Result<(Dataset, NormalizationRecord)> {
    let points = data.points();
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }
    let d = data.dim();
    let min: Vec<f64> = points
        .columns()
        .into_iter()
        .map(|c| c.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let max: Vec<f64> = points
        .columns()
        .into_iter()
        .map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let range: Vec<f64> = min.iter().zip(&max).map(|(lo, hi)| hi - lo).collect();

    let mut unit = points.to_owned();
    for mut row in unit.rows_mut() {
        for (f, v) in row.iter_mut().enumerate() {
            *v = if range[f] > 0.0 {
                (*v - min[f]) / range[f]
            } else {
                0.0
            };
        }
    }

    let scale = match mode {
        ScaleMode::SqrtDim => (d as f64).sqrt(),
        ScaleMode::Diameter => {
            let diam = diameter(unit.view());
            if diam > 0.0 {
                diam
            } else {
                1.0
            }
        }
    };
    unit.mapv_inplace(|v| v / scale);

    let record = NormalizationRecord {
        min,
        range,
        scale,
        mode,
        dim: d,
    };
    let labels = data.labels().map(<[usize]>::to_vec);
    Ok((Dataset::new(data.name(), unit, labels)?, record))
}

/// Largest pairwise Euclidean distance.
pub fn diameter(points: ArrayView2<f64>) -> f64 {
    if points.ncols() == 1 {
        let col = points.column(0);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return hi - lo;
    }
    let n = points.nrows();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = points.row(i);
            (i + 1..n)
                .map(|j| squared_distance(xi, points.row(j)))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}

#[inline]
pub fn squared_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}
