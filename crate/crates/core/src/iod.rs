//! Initialization via ordered distances.
//!
//! The two-cluster routine anchors the first centroid at the high density
//! point of the data, orders the remaining points by distance from it, and
//! slides a boundary outward in batches of `m`. Each boundary position is
//! scored by the sum of the two (1−β)-quantile radii and the best split wins.
//! The general-`k` routine does the same for one centroid and recurses on the
//! outer part for the other `k − 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::estimators::hdp_on;
use crate::geometry::{
    cmp_key_index, pairwise_distances, quantile_rank, snap_to_integer, CentroidSet, DistanceMatrix,
    PointSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IodParams {
    /// Initial cluster size `m₁`.
    pub m1: usize,
    /// Batch size `m`.
    pub m: usize,
    /// Truncation parameter β ∈ (0, 1).
    pub beta: f64,
    pub k: usize,
    /// Let the two-cluster argmin consider the last boundary position too.
    #[serde(default)]
    pub include_final_step: bool,
}

impl IodParams {
    pub fn new(m1: usize, m: usize, beta: f64, k: usize) -> Self {
        Self {
            m1,
            m,
            beta,
            k,
            include_final_step: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.m1 >= 1, "m1 must be >= 1");
        ensure!(self.m >= 1, "batch size m must be >= 1");
        ensure!(
            self.beta > 0.0 && self.beta < 1.0,
            "beta {} outside (0, 1)",
            self.beta
        );
        ensure!(self.k >= 2, "k must be >= 2, got {}", self.k);
        Ok(())
    }
}

/// Parameters guaranteeing the Δ/3 initialization property when every
/// cluster holds more than `n·alpha` points.
///
/// `k = 2`: `m₁ = ⌈nα/4⌉`, `m = max(1, ⌊nα²/16⌋)`, `β = α/4`.
/// `k ≥ 3`: `β = α/(4k)`, `m₁ = ⌈nα/4⌉`, `m = max(1, ⌊nβ²/2⌋)`.
pub fn default_params(n: usize, k: usize, alpha: f64) -> Result<IodParams> {
    ensure!(alpha > 0.0 && alpha < 1.0, "alpha {alpha} outside (0, 1)");
    ensure!(k >= 2, "k must be >= 2, got {k}");
    let n = n as f64;
    let m1 = snap_to_integer(n * alpha / 4.0).ceil().max(1.0) as usize;
    let (m, beta) = if k == 2 {
        let m = snap_to_integer(n * alpha * alpha / 16.0).floor();
        (m, alpha / 4.0)
    } else {
        let beta = alpha / (4.0 * k as f64);
        (snap_to_integer(n * beta * beta / 2.0).floor(), beta)
    };
    Ok(IodParams::new(m1, m.max(1.0) as usize, beta, k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IodResult {
    pub centroids: CentroidSet,
    /// Row index in the input of every returned centroid.
    pub indices: Vec<usize>,
    /// Minimized sum of quantile radii.
    pub totdist: f64,
    /// Winning boundary positions `(ℓ_k*, …, ℓ₂*)`, 1-based.
    pub chosen_steps: Vec<usize>,
    /// Recursive branches dropped because their point set was too small.
    pub skipped_branches: usize,
}

#[derive(Debug, Clone)]
struct Split {
    indices: Vec<usize>,
    totdist: f64,
    steps: Vec<usize>,
    skipped: usize,
}

/// Two-cluster initialization.
pub fn iod2(points: &PointSet, params: &IodParams) -> Result<IodResult> {
    params.validate()?;
    ensure!(params.k == 2, "iod2 requires k = 2, got {}", params.k);
    iodk(points, params)
}

/// General-`k` initialization; `k = 2` is the two-cluster routine.
pub fn iodk(points: &PointSet, params: &IodParams) -> Result<IodResult> {
    params.validate()?;
    let n = points.n();
    ensure!(
        n >= params.m1 + params.m,
        "n = {n} is smaller than m1 + m = {}",
        params.m1 + params.m
    );
    let dist = pairwise_distances(points);
    let all: Vec<usize> = (0..n).collect();
    let split = split_k(&dist, &all, params.k, params)?;
    Ok(IodResult {
        centroids: CentroidSet::from_indices(points, &split.indices)?,
        indices: split.indices,
        totdist: split.totdist,
        chosen_steps: split.steps,
        skipped_branches: split.skipped,
    })
}

/// `subset` ordered by distance from `anchor`, with those distances.
fn order_from(dist: &DistanceMatrix, subset: &[usize], anchor: usize) -> (Vec<usize>, Vec<f64>) {
    let mut keyed: Vec<(f64, usize)> = subset.iter().map(|&j| (dist.get(anchor, j), j)).collect();
    keyed.sort_unstable_by(|a, b| cmp_key_index(*a, *b));
    keyed.into_iter().map(|(d, j)| (j, d)).unzip()
}

fn anchor(dist: &DistanceMatrix, subset: &[usize], params: &IodParams) -> Result<usize> {
    let n = subset.len();
    if n < params.m1 + params.m {
        return Err(Error::Infeasible(format!(
            "{n} points cannot host m1 + m = {}",
            params.m1 + params.m
        )));
    }
    Ok(hdp_on(dist, subset, params.m1 as f64 / n as f64)?.index)
}

fn split_2(dist: &DistanceMatrix, subset: &[usize], params: &IodParams) -> Result<Split> {
    let n = subset.len();
    let first = anchor(dist, subset, params)?;
    let (order, radii) = order_from(dist, subset, first);
    let steps = (n - params.m1).div_ceil(params.m);

    // (totdist, second centroid) per boundary position ℓ = 1..=steps
    let mut scored: Vec<(f64, usize)> = Vec::with_capacity(steps);
    for l in 1..=steps {
        let inner = params.m1 + (l - 1) * params.m;
        if inner >= n {
            break;
        }
        let dist1 = radii[quantile_rank(inner, 1.0 - params.beta) - 1];
        let second = hdp_on(dist, &order[inner..], 1.0 - params.beta)?;
        scored.push((dist1 + second.radius, second.index));
    }

    let candidates = if params.include_final_step || scored.len() < 2 {
        scored.len()
    } else {
        steps.min(scored.len()) - 1
    };
    let (best_l, &(totdist, second)) = scored[..candidates]
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)))
        .expect("at least one boundary position is scored");
    Ok(Split {
        indices: vec![first, second],
        totdist,
        steps: vec![best_l + 1],
        skipped: 0,
    })
}

fn split_k(dist: &DistanceMatrix, subset: &[usize], k: usize, params: &IodParams) -> Result<Split> {
    if k == 2 {
        return split_2(dist, subset, params);
    }
    let n = subset.len();
    let first = anchor(dist, subset, params)?;
    let (order, radii) = order_from(dist, subset, first);
    let steps = (n - params.m1) / params.m;

    let branches: Vec<(usize, Result<Split>)> = (1..=steps)
        .into_par_iter()
        .map(|l| {
            let inner = params.m1 + (l - 1) * params.m;
            let dist_k = radii[quantile_rank(inner, 1.0 - params.beta) - 1];
            let rest = split_k(dist, &order[inner..], k - 1, params).map(|mut s| {
                s.totdist += dist_k;
                s
            });
            (l, rest)
        })
        .collect();

    let mut skipped = 0;
    let mut best: Option<(usize, Split)> = None;
    for (l, branch) in branches {
        match branch {
            Ok(split) => {
                skipped += split.skipped;
                if best.as_ref().is_none_or(|(_, b)| split.totdist < b.totdist) {
                    best = Some((l, split));
                }
            }
            Err(Error::Infeasible(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let (l, rest) = best.ok_or_else(|| {
        Error::Infeasible(format!(
            "every branch of the {k}-cluster split over {n} points was too small"
        ))
    })?;
    let mut indices = vec![first];
    indices.extend(rest.indices);
    let mut chosen = vec![l];
    chosen.extend(rest.steps);
    Ok(Split {
        indices,
        totdist: rest.totdist,
        steps: chosen,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_params_two_clusters() {
        let p = default_params(400, 2, 0.5).unwrap();
        assert_eq!((p.m1, p.m, p.beta), (50, 6, 0.125));
        let p = default_params(4, 2, 0.5).unwrap();
        assert_eq!((p.m1, p.m, p.beta), (1, 1, 0.125));
    }

    #[test]
    fn default_params_three_clusters() {
        let p = default_params(600, 3, 1.0 / 3.0).unwrap();
        assert_eq!((p.m1, p.m), (50, 1));
        assert!((p.beta - 1.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn default_params_reject_bad_alpha() {
        assert!(default_params(100, 2, 0.0).is_err());
        assert!(default_params(100, 2, 1.0).is_err());
        assert!(default_params(100, 1, 0.5).is_err());
    }

    #[test]
    fn identical_points() {
        let p = PointSet::from_values(&[3.0; 12]).unwrap();
        let r = iod2(&p, &IodParams::new(3, 2, 0.2, 2)).unwrap();
        assert_eq!(r.centroids.as_flat(), &[3.0, 3.0]);
        assert_eq!(r.totdist, 0.0);
        let r = iodk(&p, &IodParams::new(2, 1, 0.2, 3)).unwrap();
        assert_eq!(r.centroids.as_flat(), &[3.0, 3.0, 3.0]);
    }

    #[test]
    fn too_few_points() {
        let p = PointSet::from_values(&[0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(
            iod2(&p, &IodParams::new(2, 2, 0.2, 2)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn every_branch_too_small_is_infeasible() {
        let p = PointSet::from_values(&[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            iodk(&p, &IodParams::new(2, 2, 0.2, 3)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn iod2_requires_k_two() {
        let p = PointSet::from_values(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!(iod2(&p, &IodParams::new(1, 1, 0.2, 3)).is_err());
    }
}
