//! Normalize, measure indeterminacy, fit, label.

use ndarray::Array2;

use crate::assignment::{assign, PointLabel};
use crate::dataset::{normalize_with, Dataset, NormalizationRecord};
use crate::error::{Error, Result};
use crate::indeterminacy::compute_indeterminacy;
use crate::solver::{
    fit_observed, FitResult, IndeterminacySpace, NeutrosophicPartition, SolverConfig,
};

#[derive(Debug, Clone)]
pub struct Clustering {
    pub normalized: Dataset,
    pub record: NormalizationRecord,
    pub fit: FitResult,
    pub labels: Vec<PointLabel>,
}

impl Clustering {
    /// Centers mapped back to input units.
    pub fn centers_original(&self) -> Array2<f64> {
        self.record.restore_matrix(self.fit.centers.view())
    }
}

/// Indeterminacy in the space selected by `cfg.indeterminacy_space`.
pub fn indeterminacy_for(
    raw: &Dataset,
    normalized: &Dataset,
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    let points = match cfg.indeterminacy_space {
        IndeterminacySpace::Raw => raw.points(),
        IndeterminacySpace::Normalized => normalized.points(),
    };
    compute_indeterminacy(points, &cfg.indeterminacy_params())
}

pub fn cluster(data: &Dataset, cfg: &SolverConfig) -> Result<Clustering> {
    cluster_observed(data, cfg, |_, _, _| {})
}

pub fn cluster_observed(
    data: &Dataset,
    cfg: &SolverConfig,
    observer: impl FnMut(usize, &NeutrosophicPartition, &Array2<f64>),
) -> Result<Clustering> {
    cfg.validate()?;
    if data.len() < cfg.num_clusters {
        return Err(Error::NotEnoughPoints {
            points: data.len(),
            clusters: cfg.num_clusters,
        });
    }
    let (normalized, record) = normalize_with(data, cfg.scale_mode)?;
    let indet = indeterminacy_for(data, &normalized, cfg)?;
    let fit = fit_observed(normalized.points(), &indet, cfg, observer)?;
    let labels = assign(&fit.partition, cfg.boundary_t)?;
    Ok(Clustering {
        normalized,
        record,
        fit,
        labels,
    })
}
