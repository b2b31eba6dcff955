//! Clustering via ordered distances: alternate nearest-centroid labeling with
//! a trimmed-mean centroid update until the centroids stop moving.
//!
//! The alternation loop itself is shared with the Lloyd and coordinatewise
//! median baselines, which only swap the per-cluster estimator and the
//! empty-cluster rule.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::estimators::trimmed_mean;
use crate::geometry::{nearest_centroid, CentroidSet, LabelVector, PointSet};

/// Starting point of an alternation: centroids, or a label vector used
/// directly as the first labeling.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Centroids(CentroidSet),
    Labels(LabelVector),
}

impl Init {
    pub fn k(&self) -> usize {
        match self {
            Init::Centroids(c) => c.k(),
            Init::Labels(l) => l.k(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodParams {
    /// Truncation level δ ∈ [0, ½).
    pub delta: f64,
    /// Threshold on the mean squared centroid movement.
    pub epsilon: f64,
    pub max_iterations: usize,
}

impl Default for CodParams {
    fn default() -> Self {
        Self {
            delta: 0.3,
            epsilon: 1e-8,
            max_iterations: 50,
        }
    }
}

impl CodParams {
    pub fn with_delta(delta: f64) -> Self {
        Self {
            delta,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            (0.0..0.5).contains(&self.delta),
            "truncation level {} outside [0, 0.5)",
            self.delta
        );
        ensure!(self.epsilon >= 0.0, "negative threshold {}", self.epsilon);
        ensure!(self.max_iterations >= 1, "max_iterations must be >= 1");
        Ok(())
    }
}

/// One pass of labeling + estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationState {
    /// 1-based iteration counter `s`.
    pub iteration: usize,
    /// Labels produced by this iteration's labeling step.
    pub labels: LabelVector,
    /// Centroids produced by this iteration's estimation step.
    pub centroids: CentroidSet,
    /// `(1/k) Σ_h ‖θ̂_h^{(s)} − θ̂_h^{(s−1)}‖²`; `None` at `s = 1` when the run
    /// started from labels and has no previous centroids.
    pub movement: Option<f64>,
    /// Clusters that were empty at the estimation step.
    pub empty_clusters: Vec<usize>,
}

pub type CodState = IterationState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringRun {
    pub centroids: CentroidSet,
    /// Nearest-centroid labels with respect to the final centroids.
    pub labels: LabelVector,
    pub history: Vec<IterationState>,
}

impl ClusteringRun {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    pub fn last(&self) -> &IterationState {
        self.history
            .last()
            .expect("a run records at least one iteration")
    }
}

/// Labels every point with its nearest centroid, ties to the smaller id.
pub fn assign_labels(points: &PointSet, centroids: &CentroidSet) -> Result<LabelVector> {
    ensure!(
        points.d() == centroids.d(),
        "points have dimension {}, centroids {}",
        points.d(),
        centroids.d()
    );
    let labels = points
        .rows()
        .map(|row| nearest_centroid(row, centroids))
        .collect();
    LabelVector::new(labels, centroids.k())
}

/// Runs COD_δ from `init`.
pub fn cod_cluster(points: &PointSet, init: &Init, params: &CodParams) -> Result<ClusteringRun> {
    params.validate()?;
    let delta = params.delta;
    alternate(
        points,
        init,
        params.epsilon,
        params.max_iterations,
        |members| {
            let cluster = points.select(members)?;
            Ok(trimmed_mean(&cluster, delta)?.center)
        },
        |h, previous| match previous {
            Some(c) => Ok(c.to_vec()),
            None => Err(Error::contract(format!(
                "initial labels leave cluster {h} empty"
            ))),
        },
    )
}

/// The alternation shared by COD and the Lloyd-type baselines.
///
/// `estimate` maps a nonempty member list to a new centroid; `on_empty`
/// supplies the centroid of an empty cluster given its previous value (if
/// any).
pub(crate) fn alternate(
    points: &PointSet,
    init: &Init,
    epsilon: f64,
    max_iterations: usize,
    mut estimate: impl FnMut(&[usize]) -> Result<Vec<f64>>,
    mut on_empty: impl FnMut(usize, Option<&[f64]>) -> Result<Vec<f64>>,
) -> Result<ClusteringRun> {
    let k = init.k();
    let n = points.n();
    ensure!(k >= 1, "k must be at least 1");
    ensure!(k <= n, "k = {k} exceeds the number of points n = {n}");
    ensure!(max_iterations >= 1, "max_iterations must be >= 1");
    let mut previous: Option<CentroidSet> = match init {
        Init::Centroids(c) => {
            ensure!(
                c.d() == points.d(),
                "points have dimension {}, initial centroids {}",
                points.d(),
                c.d()
            );
            Some(c.clone())
        }
        Init::Labels(l) => {
            ensure!(
                l.len() == n,
                "initial labels have length {}, expected {n}",
                l.len()
            );
            ensure!(
                !l.has_outliers(),
                "initial labels contain outlier sentinels"
            );
            None
        }
    };

    let mut history: Vec<IterationState> = Vec::new();
    let mut s = 1;
    loop {
        let labels = match (s, init, &previous) {
            (1, Init::Labels(l), _) => l.clone(),
            (_, _, Some(prev)) => assign_labels(points, prev)?,
            (_, _, None) => unreachable!("centroids exist after the first iteration"),
        };

        let mut flat = Vec::with_capacity(k * points.d());
        let mut empty_clusters = Vec::new();
        for (h, members) in labels.members().iter().enumerate() {
            let center = if members.is_empty() {
                empty_clusters.push(h);
                on_empty(h, previous.as_ref().map(|p| p.center(h)))?
            } else {
                estimate(members)?
            };
            flat.extend(center);
        }
        let centroids = CentroidSet::from_flat(flat, points.d())?;
        let movement = previous.as_ref().map(|p| centroids.mean_sq_movement(p));

        history.push(IterationState {
            iteration: s,
            labels,
            centroids: centroids.clone(),
            movement,
            empty_clusters,
        });
        previous = Some(centroids);

        let keep_going =
            s == 1 || (s >= 2 && s < max_iterations && movement.is_some_and(|m| m > epsilon));
        if !keep_going {
            break;
        }
        s += 1;
    }

    let centroids = previous.expect("at least one iteration ran");
    let labels = assign_labels(points, &centroids)?;
    Ok(ClusteringRun {
        centroids,
        labels,
        history,
    })
}
