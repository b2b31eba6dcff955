//! Point containers and the distance / order-statistic primitives shared by
//! every estimator and clustering routine.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Observations as an `n × d` row-major matrix of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl PointSet {
    /// Builds a point set from a flat row-major buffer.
    pub fn from_flat(data: Vec<f64>, d: usize) -> Result<Self> {
        ensure!(d >= 1, "dimension must be at least 1");
        ensure!(!data.is_empty(), "point set must be nonempty");
        ensure!(
            data.len().is_multiple_of(d),
            "buffer of length {} is not a multiple of dimension {d}",
            data.len()
        );
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::contract(format!(
                "non-finite coordinate at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        let n = data.len() / d;
        Ok(Self { data, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        ensure!(!rows.is_empty(), "point set must be nonempty");
        let d = rows[0].as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            ensure!(
                row.len() == d,
                "row {i} has {} coordinates, expected {d}",
                row.len()
            );
            data.extend_from_slice(row);
        }
        Self::from_flat(data, d)
    }

    /// One-dimensional points.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::from_flat(values.to_vec(), 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// The subset of rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        ensure!(!indices.is_empty(), "cannot select an empty subset");
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            ensure!(i < self.n, "index {i} out of range for {} points", self.n);
            data.extend_from_slice(self.row(i));
        }
        Ok(Self {
            data,
            n: indices.len(),
            d: self.d,
        })
    }

    /// Appends the rows of `other` (same dimension).
    pub fn concat(&self, other: &PointSet) -> Result<Self> {
        ensure!(
            self.d == other.d,
            "dimension mismatch: {} vs {}",
            self.d,
            other.d
        );
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            data,
            n: self.n + other.n,
            d: self.d,
        })
    }

    /// Applies `f` to every row, producing a point set of the same shape.
    pub fn map_rows(&self, mut f: impl FnMut(&[f64], &mut [f64])) -> Result<Self> {
        let mut data = vec![0.0; self.data.len()];
        for (src, dst) in self
            .data
            .chunks_exact(self.d)
            .zip(data.chunks_exact_mut(self.d))
        {
            f(src, dst);
        }
        Self::from_flat(data, self.d)
    }

    /// Arithmetic mean of all rows.
    pub fn mean(&self) -> Vec<f64> {
        let all: Vec<usize> = (0..self.n).collect();
        mean_of(self, &all)
    }

    /// Per-coordinate standardization to zero mean and unit (population)
    /// standard deviation. Constant columns are only centered.
    pub fn standardized(&self) -> Result<Self> {
        let mean = self.mean();
        let mut var = vec![0.0; self.d];
        for row in self.rows() {
            for (j, v) in row.iter().enumerate() {
                var[j] += (v - mean[j]).powi(2);
            }
        }
        let sd: Vec<f64> = var
            .iter()
            .map(|v| {
                let s = (v / self.n as f64).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        self.map_rows(|src, dst| {
            for j in 0..src.len() {
                dst[j] = (src[j] - mean[j]) / sd[j];
            }
        })
    }
}

/// `k` centroid vectors in ℝᵈ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidSet {
    data: Vec<f64>,
    k: usize,
    d: usize,
}

impl CentroidSet {
    pub fn from_flat(data: Vec<f64>, d: usize) -> Result<Self> {
        let points = PointSet::from_flat(data, d)?;
        Ok(Self::from(points))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Ok(Self::from(PointSet::from_rows(rows)?))
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        Ok(Self::from(PointSet::from_values(values)?))
    }

    /// Centroids taken from the rows of `points` at `indices`.
    pub fn from_indices(points: &PointSet, indices: &[usize]) -> Result<Self> {
        Ok(Self::from(points.select(indices)?))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn center(&self, h: usize) -> &[f64] {
        &self.data[h * self.d..(h + 1) * self.d]
    }

    pub fn centers(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Minimum pairwise Euclidean distance between centroids (Δ).
    /// `f64::INFINITY` for a single centroid.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for g in 0..self.k {
            for h in g + 1..self.k {
                best = best.min(distance(self.center(g), self.center(h)));
            }
        }
        best
    }

    /// Mean squared movement `(1/k) Σ_h ‖self_h − other_h‖²`.
    pub fn mean_sq_movement(&self, other: &CentroidSet) -> f64 {
        let total: f64 = self
            .centers()
            .zip(other.centers())
            .map(|(a, b)| sq_distance(a, b))
            .sum();
        total / self.k as f64
    }

    pub fn as_points(&self) -> PointSet {
        PointSet {
            data: self.data.clone(),
            n: self.k,
            d: self.d,
        }
    }
}

impl From<PointSet> for CentroidSet {
    fn from(p: PointSet) -> Self {
        Self {
            data: p.data,
            k: p.n,
            d: p.d,
        }
    }
}

/// Label of an injected outlier in an augmented truth vector.
pub const OUTLIER: usize = usize::MAX;

/// Cluster assignments. Labels are 0-based cluster ids in `0..k`; the
/// [`OUTLIER`] sentinel is only admitted by [`LabelVector::with_outliers`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelVector {
    labels: Vec<usize>,
    k: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        ensure!(k >= 1, "k must be at least 1");
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(Error::contract(format!(
                "label {l} at position {i} out of range for k = {k}"
            )));
        }
        Ok(Self { labels, k })
    }

    /// Like [`LabelVector::new`] but also admits the [`OUTLIER`] sentinel.
    pub fn with_outliers(labels: Vec<usize>, k: usize) -> Result<Self> {
        ensure!(k >= 1, "k must be at least 1");
        if let Some((i, &l)) = labels
            .iter()
            .enumerate()
            .find(|(_, &l)| l >= k && l != OUTLIER)
        {
            return Err(Error::contract(format!(
                "label {l} at position {i} out of range for k = {k}"
            )));
        }
        Ok(Self { labels, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn has_outliers(&self) -> bool {
        self.labels.contains(&OUTLIER)
    }

    /// Number of points carrying each label `0..k` (outliers not counted).
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.k];
        for &l in &self.labels {
            if l != OUTLIER {
                c[l] += 1;
            }
        }
        c
    }

    /// Indices of the members of every cluster, in ascending order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            if l != OUTLIER {
                m[l].push(i);
            }
        }
        m
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.labels
    }
}

/// Full `n × n` matrix of Euclidean distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    dist: Vec<f64>,
    n: usize,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn max_entry(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }
}

#[inline]
pub fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    sq_distance(a, b).sqrt()
}

/// All pairwise Euclidean distances. The result is exactly symmetric with
/// an exactly zero diagonal.
pub fn pairwise_distances(points: &PointSet) -> DistanceMatrix {
    let n = points.n();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        let ri = points.row(i);
        for j in i + 1..n {
            let v = distance(ri, points.row(j));
            dist[i * n + j] = v;
            dist[j * n + i] = v;
        }
    }
    DistanceMatrix { dist, n }
}

/// The `rank`-th smallest value (1-indexed, duplicates counted).
pub fn order_stat(values: &[f64], rank: usize) -> Result<f64> {
    ensure!(
        rank >= 1 && rank <= values.len(),
        "rank {rank} out of range for {} values",
        values.len()
    );
    let mut buf = values.to_vec();
    Ok(select_in_place(&mut buf, rank))
}

/// `rank`-th smallest of `buf` (1-indexed); reorders `buf`.
#[inline]
pub(crate) fn select_in_place(buf: &mut [f64], rank: usize) -> f64 {
    debug_assert!(rank >= 1 && rank <= buf.len());
    let (_, v, _) = buf.select_nth_unstable_by(rank - 1, f64::total_cmp);
    *v
}

/// `⌈fraction · count⌉` clamped to `[1, count]`.
///
/// Products within `1e-9` (relative) of an integer snap to it, so that
/// e.g. `(1 − 0.3) · 10` yields 7 rather than 8.
pub fn quantile_rank(count: usize, fraction: f64) -> usize {
    let r = snap_to_integer(fraction * count as f64).ceil();
    (r.max(1.0) as usize).min(count.max(1))
}

/// Rounds `x` to the nearest integer when it is within `1e-9` (relative).
pub(crate) fn snap_to_integer(x: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * x.abs().max(1.0) {
        nearest
    } else {
        x
    }
}

/// Mean of the rows at `indices`.
pub(crate) fn mean_of(points: &PointSet, indices: &[usize]) -> Vec<f64> {
    let mut acc = vec![0.0; points.d()];
    for &i in indices {
        for (a, v) in acc.iter_mut().zip(points.row(i)) {
            *a += v;
        }
    }
    let m = indices.len() as f64;
    acc.iter_mut().for_each(|a| *a /= m);
    acc
}

/// Index of the nearest centroid; ties go to the smaller id.
#[inline]
pub(crate) fn nearest_centroid(point: &[f64], centroids: &CentroidSet) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (h, c) in centroids.centers().enumerate() {
        let d = sq_distance(point, c);
        if d < best_d {
            best_d = d;
            best = h;
        }
    }
    best
}

/// Ascending order of `(key, index)` with total ordering on the key.
#[inline]
pub(crate) fn cmp_key_index(a: (f64, usize), b: (f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}
