//! Comparison methods: Lloyd's algorithm, k-means++ and uniform random
//! seeding, and a coordinatewise-median variant of Lloyd.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cod::{alternate, ClusteringRun, Init};
use crate::error::{ensure, Error, Result};
use crate::geometry::{mean_of, sq_distance, CentroidSet, PointSet};

/// What to do when a cluster receives no points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyClusterRule {
    /// Replace the centroid by a data point drawn uniformly at random.
    #[default]
    ReseedRandomPoint,
    KeepPrevious,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LloydParams {
    pub epsilon: f64,
    pub max_iterations: usize,
    pub empty_cluster_rule: EmptyClusterRule,
}

impl Default for LloydParams {
    fn default() -> Self {
        Self {
            epsilon: 1e-8,
            max_iterations: 50,
            empty_cluster_rule: EmptyClusterRule::ReseedRandomPoint,
        }
    }
}

impl LloydParams {
    pub fn keep_previous() -> Self {
        Self {
            empty_cluster_rule: EmptyClusterRule::KeepPrevious,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        ensure!(self.epsilon >= 0.0, "negative threshold {}", self.epsilon);
        ensure!(self.max_iterations >= 1, "max_iterations must be >= 1");
        Ok(())
    }
}

/// Lloyd's algorithm: nearest-centroid labeling and per-cluster means.
pub fn lloyd<R: Rng + ?Sized>(
    points: &PointSet,
    init: &Init,
    params: &LloydParams,
    rng: &mut R,
) -> Result<ClusteringRun> {
    params.validate()?;
    let rule = params.empty_cluster_rule;
    alternate(
        points,
        init,
        params.epsilon,
        params.max_iterations,
        |members| Ok(mean_of(points, members)),
        |h, previous| empty_cluster(points, rule, h, previous, rng),
    )
}

/// Lloyd iteration with the per-cluster coordinatewise (lower) median as
/// the update.
pub fn kmedian_hybrid<R: Rng + ?Sized>(
    points: &PointSet,
    init: &Init,
    params: &LloydParams,
    rng: &mut R,
) -> Result<ClusteringRun> {
    params.validate()?;
    let rule = params.empty_cluster_rule;
    alternate(
        points,
        init,
        params.epsilon,
        params.max_iterations,
        |members| Ok(coordinatewise_median(points, members)),
        |h, previous| empty_cluster(points, rule, h, previous, rng),
    )
}

fn empty_cluster<R: Rng + ?Sized>(
    points: &PointSet,
    rule: EmptyClusterRule,
    h: usize,
    previous: Option<&[f64]>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    match (rule, previous) {
        (EmptyClusterRule::ReseedRandomPoint, _) => {
            Ok(points.row(rng.random_range(0..points.n())).to_vec())
        }
        (EmptyClusterRule::KeepPrevious, Some(c)) => Ok(c.to_vec()),
        (EmptyClusterRule::KeepPrevious, None) => Err(Error::contract(format!(
            "initial labels leave cluster {h} empty"
        ))),
    }
}

/// Lower median of every coordinate over `members`: the `⌈m/2⌉`-th smallest.
pub fn coordinatewise_median(points: &PointSet, members: &[usize]) -> Vec<f64> {
    let rank = members.len().div_ceil(2);
    let mut column = vec![0.0; members.len()];
    (0..points.d())
        .map(|j| {
            for (c, &i) in column.iter_mut().zip(members) {
                *c = points.row(i)[j];
            }
            crate::geometry::select_in_place(&mut column, rank)
        })
        .collect()
}

/// k-means++ seeding: first center uniform, each next one drawn with
/// probability proportional to the squared distance to the nearest chosen
/// center.
pub fn kmeanspp_init<R: Rng + ?Sized>(
    points: &PointSet,
    k: usize,
    rng: &mut R,
) -> Result<CentroidSet> {
    let indices = kmeanspp_indices(points, k, rng)?;
    CentroidSet::from_indices(points, &indices)
}

/// Row indices chosen by [`kmeanspp_init`].
pub fn kmeanspp_indices<R: Rng + ?Sized>(
    points: &PointSet,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let n = points.n();
    ensure!(k >= 1, "k must be >= 1");
    ensure!(k <= n, "k = {k} exceeds the number of points n = {n}");
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = points
        .rows()
        .map(|r| sq_distance(r, points.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in nearest.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total weight has a positive entry")
        } else {
            // every point coincides with a chosen center; keep indices distinct
            let unused: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            unused[rng.random_range(0..unused.len())]
        };
        chosen.push(next);
        let c = points.row(next);
        for (w, r) in nearest.iter_mut().zip(points.rows()) {
            *w = w.min(sq_distance(r, c));
        }
        nearest[next] = 0.0;
    }
    Ok(chosen)
}

/// `k` distinct data points drawn uniformly without replacement.
pub fn random_init<R: Rng + ?Sized>(
    points: &PointSet,
    k: usize,
    rng: &mut R,
) -> Result<CentroidSet> {
    let n = points.n();
    ensure!(k >= 1, "k must be >= 1");
    ensure!(k <= n, "k = {k} exceeds the number of points n = {n}");
    let indices = sample(rng, n, k).into_vec();
    CentroidSet::from_indices(points, &indices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(v: &[f64]) -> PointSet {
        PointSet::from_values(v).unwrap()
    }

    #[test]
    fn median_ignores_the_outlier() {
        assert_eq!(
            coordinatewise_median(&line(&[1.0, 2.0, 100.0]), &[0, 1, 2]),
            vec![2.0]
        );
    }

    #[test]
    fn even_count_takes_the_lower_middle() {
        let p = line(&[4.0, 1.0, 3.0, 2.0]);
        let mut sorted = p.as_flat().to_vec();
        sorted.sort_by(f64::total_cmp);
        let med = coordinatewise_median(&p, &[0, 1, 2, 3]);
        assert_eq!(med, vec![sorted[1]]);
        assert_eq!(med, vec![2.0]);
    }

    #[test]
    fn symmetric_median_equals_mean() {
        let p = PointSet::from_rows(&[[-1.0, 5.0], [0.0, 6.0], [1.0, 7.0]]).unwrap();
        assert_eq!(coordinatewise_median(&p, &[0, 1, 2]), p.mean());
    }

    #[test]
    fn kmeanspp_edge_sizes() {
        let p = line(&[0.0, 1.0, 2.0, 3.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut idx = kmeanspp_indices(&p, 4, &mut rng).unwrap();
        idx.sort();
        assert_eq!(idx, vec![0, 1, 2, 3]);
        assert_eq!(kmeanspp_init(&p, 1, &mut rng).unwrap().k(), 1);
        assert!(kmeanspp_init(&p, 5, &mut rng).is_err());
    }

    #[test]
    fn kmeanspp_distinct_on_duplicates() {
        let p = line(&[1.0, 1.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut idx = kmeanspp_indices(&p, 3, &mut rng).unwrap();
        idx.sort();
        assert_eq!(idx, vec![0, 1, 2]);
    }

    #[test]
    fn random_init_sizes_and_determinism() {
        let p = line(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let a = random_init(&p, 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = random_init(&p, 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        let all = random_init(&p, 5, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let mut v = all.as_flat().to_vec();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, p.as_flat());
        assert!(random_init(&p, 6, &mut ChaCha8Rng::seed_from_u64(2)).is_err());
    }

    #[test]
    fn reseed_fills_an_empty_cluster() {
        let p = line(&[0.0, 0.1, 0.2, 5.0]);
        let init = Init::Centroids(CentroidSet::from_values(&[0.1, 1000.0]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let run = lloyd(&p, &init, &LloydParams::default(), &mut rng).unwrap();
        assert_eq!(run.history[0].empty_clusters, vec![1]);
        assert!(p.as_flat().contains(&run.history[0].centroids.center(1)[0]));
    }
}
