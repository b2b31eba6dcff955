//! Ordered-distance estimators: the trimmed mean around the tightest
//! neighbourhood and the high density point.
//!
//! Both rank every candidate point `i` by `R_i`, the `r`-th smallest entry of
//! row `i` of the distance matrix (self-distance included), and pick the
//! candidate with the smallest `R_i`, ties going to the smallest index.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::geometry::{
    cmp_key_index, mean_of, pairwise_distances, quantile_rank, select_in_place, DistanceMatrix,
    PointSet,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimmedMeanResult {
    pub center: Vec<f64>,
    /// Index of the medoid `X_{i*}`.
    pub medoid_index: usize,
    /// `R_{i*}`, the radius of the tightest neighbourhood.
    pub radius: f64,
    /// The `⌈(1−δ)m⌉` points averaged, ascending by index.
    pub kept_indices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HdpResult {
    pub index: usize,
    pub radius: f64,
}

/// Trimmed mean of all of `points` with truncation level `delta ∈ [0, 1)`.
pub fn trimmed_mean(points: &PointSet, delta: f64) -> Result<TrimmedMeanResult> {
    let dist = pairwise_distances(points);
    let all: Vec<usize> = (0..points.n()).collect();
    trimmed_mean_on(points, &dist, &all, delta)
}

/// Trimmed mean of the rows of `points` listed in `subset`, using a
/// precomputed distance matrix over all of `points`. Returned indices refer
/// to `points`.
pub fn trimmed_mean_on(
    points: &PointSet,
    dist: &DistanceMatrix,
    subset: &[usize],
    delta: f64,
) -> Result<TrimmedMeanResult> {
    ensure!(!subset.is_empty(), "trimmed mean of an empty set");
    ensure!(
        (0.0..1.0).contains(&delta),
        "truncation level {delta} outside [0, 1)"
    );
    ensure!(
        dist.n() == points.n(),
        "distance matrix covers {} points, point set has {}",
        dist.n(),
        points.n()
    );
    let keep = quantile_rank(subset.len(), 1.0 - delta);
    let best = tightest(dist, subset, keep);

    let mut by_distance: Vec<(f64, usize)> = subset
        .iter()
        .map(|&j| (dist.get(best.index, j), j))
        .collect();
    by_distance.sort_unstable_by(|a, b| cmp_key_index(*a, *b));
    let mut kept: Vec<usize> = by_distance[..keep].iter().map(|&(_, j)| j).collect();
    kept.sort_unstable();

    Ok(TrimmedMeanResult {
        center: mean_of(points, &kept),
        medoid_index: best.index,
        radius: best.radius,
        kept_indices: kept,
    })
}

/// High density point of all of `points` with neighbourhood fraction `q`.
pub fn hdp(points: &PointSet, q: f64) -> Result<HdpResult> {
    let dist = pairwise_distances(points);
    let all: Vec<usize> = (0..points.n()).collect();
    hdp_on(&dist, &all, q)
}

/// High density point restricted to `subset`; the returned index refers to
/// the rows of `dist`.
pub fn hdp_on(dist: &DistanceMatrix, subset: &[usize], q: f64) -> Result<HdpResult> {
    ensure!(!subset.is_empty(), "high density point of an empty set");
    ensure!(
        q > 0.0 && q <= 1.0,
        "neighbourhood fraction {q} outside (0, 1]"
    );
    let rank = quantile_rank(subset.len(), q);
    Ok(tightest(dist, subset, rank))
}

/// Candidate in `subset` minimizing the `rank`-th smallest distance to the
/// other members of `subset`.
fn tightest(dist: &DistanceMatrix, subset: &[usize], rank: usize) -> HdpResult {
    let mut buf = vec![0.0; subset.len()];
    let mut best = HdpResult {
        index: usize::MAX,
        radius: f64::INFINITY,
    };
    for &i in subset {
        let row = dist.row(i);
        for (b, &j) in buf.iter_mut().zip(subset) {
            *b = row[j];
        }
        let r = select_in_place(&mut buf, rank);
        if r < best.radius || (r == best.radius && i < best.index) {
            best = HdpResult {
                index: i,
                radius: r,
            };
        }
    }
    best
}
