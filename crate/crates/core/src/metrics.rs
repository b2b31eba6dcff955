//! Evaluation quantities: mislabeling loss, within-cluster sum of squares and
//! the iteration diagnostics (H, Λ, Δ, α, SNR).

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::geometry::{
    distance, nearest_centroid, sq_distance, CentroidSet, LabelVector, PointSet,
};

/// Label relabelings admitted by the mislabeling loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MislabelingMode {
    /// Bijections of the label set.
    #[default]
    Permutations,
    /// Arbitrary maps from true labels to estimated labels.
    Mappings,
}

/// Largest label-set size solved by enumerating every permutation.
const BRUTE_FORCE_MAX_K: usize = 8;

/// `counts[g][h]` = number of points with true label `g` and estimated
/// label `h`, over a square `k × k` grid with `k` the larger label count.
pub fn confusion_matrix(estimated: &LabelVector, truth: &LabelVector) -> Result<Vec<Vec<usize>>> {
    ensure!(
        estimated.len() == truth.len(),
        "label vectors have lengths {} and {}",
        estimated.len(),
        truth.len()
    );
    ensure!(
        !estimated.has_outliers() && !truth.has_outliers(),
        "outlier sentinels must be masked out before scoring"
    );
    let k = estimated.k().max(truth.k());
    let mut counts = vec![vec![0; k]; k];
    for (&z, &e) in truth.as_slice().iter().zip(estimated.as_slice()) {
        counts[z][e] += 1;
    }
    Ok(counts)
}

/// Fraction of points whose estimated label disagrees with the relabeled
/// truth, minimized over relabelings.
pub fn mislabeling(
    estimated: &LabelVector,
    truth: &LabelVector,
    mode: MislabelingMode,
) -> Result<f64> {
    ensure!(!truth.is_empty(), "cannot score an empty label vector");
    let counts = confusion_matrix(estimated, truth)?;
    let agree = match mode {
        MislabelingMode::Permutations => {
            let perm = best_assignment(&counts);
            perm.iter()
                .enumerate()
                .map(|(g, &h)| counts[g][h])
                .sum::<usize>()
        }
        MislabelingMode::Mappings => counts
            .iter()
            .map(|row| row.iter().copied().max().unwrap_or(0))
            .sum(),
    };
    Ok(1.0 - agree as f64 / truth.len() as f64)
}

/// [`mislabeling`] restricted to the positions where `keep_mask` is true.
pub fn mislabeling_on_mask(
    estimated: &LabelVector,
    truth: &LabelVector,
    keep_mask: &[bool],
    mode: MislabelingMode,
) -> Result<f64> {
    ensure!(
        keep_mask.len() == truth.len() && estimated.len() == truth.len(),
        "mask has length {}, labels {} and {}",
        keep_mask.len(),
        estimated.len(),
        truth.len()
    );
    ensure!(keep_mask.iter().any(|&m| m), "mask keeps no points");
    let pick = |l: &LabelVector| -> Result<LabelVector> {
        let kept = l
            .as_slice()
            .iter()
            .zip(keep_mask)
            .filter(|(_, &m)| m)
            .map(|(&v, _)| v)
            .collect();
        LabelVector::with_outliers(kept, l.k())
    };
    mislabeling(&pick(estimated)?, &pick(truth)?, mode)
}

/// The bijection `π` (true label `g` → estimated label `π[g]`) maximizing
/// agreement. Ties go to the lexicographically first permutation for small
/// label sets.
pub fn best_permutation(estimated: &LabelVector, truth: &LabelVector) -> Result<Vec<usize>> {
    Ok(best_assignment(&confusion_matrix(estimated, truth)?))
}

fn best_assignment(counts: &[Vec<usize>]) -> Vec<usize> {
    if counts.len() <= BRUTE_FORCE_MAX_K {
        brute_force_assignment(counts)
    } else {
        hungarian_max(counts)
    }
}

fn brute_force_assignment(counts: &[Vec<usize>]) -> Vec<usize> {
    fn recurse(
        counts: &[Vec<usize>],
        row: usize,
        used: &mut [bool],
        current: &mut Vec<usize>,
        score: usize,
        best: &mut (usize, Vec<usize>),
    ) {
        if row == counts.len() {
            if score > best.0 || best.1.is_empty() {
                *best = (score, current.clone());
            }
            return;
        }
        for h in 0..counts.len() {
            if !used[h] {
                used[h] = true;
                current.push(h);
                recurse(counts, row + 1, used, current, score + counts[row][h], best);
                current.pop();
                used[h] = false;
            }
        }
    }
    let mut best = (0, Vec::new());
    recurse(
        counts,
        0,
        &mut vec![false; counts.len()],
        &mut Vec::with_capacity(counts.len()),
        0,
        &mut best,
    );
    best.1
}

/// Maximum-weight perfect matching on a square count matrix (Hungarian
/// method with potentials, run on negated weights).
fn hungarian_max(counts: &[Vec<usize>]) -> Vec<usize> {
    let n = counts.len();
    let cost = |i: usize, j: usize| -(counts[i - 1][j - 1] as i64);
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    assignment
}

/// Within-cluster sum of squares `Σ_i min_j ‖Y_i − θ̂_j‖²`.
pub fn wcss(points: &PointSet, centroids: &CentroidSet) -> Result<f64> {
    ensure!(
        points.d() == centroids.d(),
        "points have dimension {}, centroids {}",
        points.d(),
        centroids.d()
    );
    Ok(points
        .rows()
        .map(|r| sq_distance(r, centroids.center(nearest_centroid(r, centroids))))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Cluster-wise correct labeling proportion.
    pub h: f64,
    /// Largest centroid error relative to Δ.
    pub lambda: f64,
    /// Minimum separation of the true centroids.
    pub delta: f64,
    /// Smallest true cluster fraction.
    pub alpha: f64,
    /// `Δ / (2σ)` when σ is known.
    pub snr: Option<f64>,
    /// Estimated cluster aligned with each true cluster.
    pub alignment: Vec<usize>,
    /// Aligned confusion counts: `counts[g][h]` = true `g`, estimated
    /// (aligned) `h`.
    pub counts: Vec<Vec<usize>>,
}

pub fn diagnostics(
    points: &PointSet,
    truth: &LabelVector,
    est_labels: &LabelVector,
    true_centroids: &CentroidSet,
    est_centroids: &CentroidSet,
    sigma: Option<f64>,
) -> Result<Diagnostics> {
    let k = truth.k();
    ensure!(
        est_labels.k() == k && true_centroids.k() == k && est_centroids.k() == k,
        "cluster counts disagree: truth {k}, estimated labels {}, true centroids {}, estimated centroids {}",
        est_labels.k(),
        true_centroids.k(),
        est_centroids.k()
    );
    ensure!(
        truth.len() == points.n(),
        "labels cover {} points, data has {}",
        truth.len(),
        points.n()
    );
    ensure!(
        true_centroids.d() == points.d() && est_centroids.d() == points.d(),
        "centroid dimension does not match the data"
    );
    if let Some(s) = sigma {
        ensure!(s > 0.0, "sigma must be positive, got {s}");
    }
    let raw = confusion_matrix(est_labels, truth)?;
    let alignment = best_assignment(&raw);
    let counts: Vec<Vec<usize>> = (0..k)
        .map(|g| (0..k).map(|a| raw[g][alignment[a]]).collect())
        .collect();

    let true_sizes = truth.counts();
    let est_sizes = est_labels.counts();
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let h = (0..k)
        .map(|g| {
            let n_gg = raw[g][alignment[g]];
            ratio(n_gg, true_sizes[g]).min(ratio(n_gg, est_sizes[alignment[g]]))
        })
        .fold(f64::INFINITY, f64::min);

    let delta = true_centroids.min_separation();
    let lambda = (0..k)
        .map(|g| distance(est_centroids.center(alignment[g]), true_centroids.center(g)) / delta)
        .fold(0.0, f64::max);
    let alpha = *true_sizes.iter().min().expect("k >= 1") as f64 / truth.len() as f64;

    Ok(Diagnostics {
        h,
        lambda,
        delta,
        alpha,
        snr: sigma.map(|s| delta / (2.0 * s)),
        alignment,
        counts,
    })
}
