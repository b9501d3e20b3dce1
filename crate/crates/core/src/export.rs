//! CSV writers for memberships, centers, labels and traces.

use std::io::Write;

use ndarray::{Array2, ArrayView2};

use crate::assignment::PointLabel;
use crate::error::{Error, Result};
use crate::solver::NeutrosophicPartition;

fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("csv write: {e}"))
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// `point_id, T_1..T_k, F, I`.
pub fn write_memberships<W: Write>(
    out: W,
    part: &NeutrosophicPartition,
    indet: &[f64],
) -> Result<()> {
    if indet.len() != part.len() {
        return Err(Error::ShapeMismatch("indeterminacy length".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    let k = part.num_clusters();
    let mut header = vec!["point_id".to_string()];
    header.extend((1..=k).map(|j| format!("T_{j}")));
    header.extend(["F".to_string(), "I".to_string()]);
    w.write_record(&header).map_err(csv_err)?;
    for (i, row) in part.t.rows().into_iter().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(row.iter().map(|&v| num(v)));
        rec.push(num(part.f[i]));
        rec.push(num(indet[i]));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// `point_id, W_1..W_c` for plain fuzzy memberships.
pub fn write_fuzzy_memberships<W: Write>(out: W, memberships: &Array2<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["point_id".to_string()];
    header.extend((1..=memberships.ncols()).map(|j| format!("W_{j}")));
    w.write_record(&header).map_err(csv_err)?;
    for (i, row) in memberships.rows().into_iter().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(row.iter().map(|&v| num(v)));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// `cluster_id, x_1..x_d`.
pub fn write_centers<W: Write>(out: W, centers: ArrayView2<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["cluster_id".to_string()];
    header.extend((1..=centers.ncols()).map(|q| format!("x_{q}")));
    w.write_record(&header).map_err(csv_err)?;
    for (j, row) in centers.rows().into_iter().enumerate() {
        let mut rec = vec![j.to_string()];
        rec.extend(row.iter().map(|&v| num(v)));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// `point_id, kind, cluster_a, cluster_b`; unused cluster fields are empty.
pub fn write_labels<W: Write>(out: W, labels: &[PointLabel]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["point_id", "kind", "cluster_a", "cluster_b"])
        .map_err(csv_err)?;
    for (i, l) in labels.iter().enumerate() {
        let (a, b) = match *l {
            PointLabel::Main { cluster } => (cluster.to_string(), String::new()),
            PointLabel::Boundary { a, b, .. } => (a.to_string(), b.to_string()),
            PointLabel::Outlier => (String::new(), String::new()),
        };
        w.write_record([i.to_string(), l.kind().to_string(), a, b])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// Hard labels for plain clusterings: `point_id, kind, cluster_a, cluster_b` with every
/// point a main point.
pub fn write_hard_labels<W: Write>(out: W, labels: &[usize]) -> Result<()> {
    let wrapped: Vec<PointLabel> = labels
        .iter()
        .map(|&cluster| PointLabel::Main { cluster })
        .collect();
    write_labels(out, &wrapped)
}

/// `iteration, cost` with 1-based iterations.
pub fn write_trace<W: Write>(out: W, trace: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "cost"]).map_err(csv_err)?;
    for (i, v) in trace.iter().enumerate() {
        w.write_record([(i + 1).to_string(), num(*v)])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// `pixel_id, x, y, label` for label images.
pub fn write_pixel_labels<W: Write>(out: W, width: usize, labels: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["pixel_id", "x", "y", "label"])
        .map_err(csv_err)?;
    for (i, l) in labels.iter().enumerate() {
        w.write_record([
            i.to_string(),
            (i % width).to_string(),
            (i / width).to_string(),
            l.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// `x_1..x_d[, label]` data rows, the layout `load_csv` reads back with a last label column.
pub fn write_points<W: Write>(
    out: W,
    points: ArrayView2<f64>,
    labels: Option<&[usize]>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for (i, row) in points.rows().into_iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|&v| num(v)).collect();
        if let Some(l) = labels {
            rec.push(l[i].to_string());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}
