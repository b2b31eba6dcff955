//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use robust_cluster::geometry::{CentroidSet, PointSet};

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for j in 0..a.len() {
        let t = a[j] - b[j];
        s += t * t;
    }
    s.sqrt()
}

/// `⌈num·m/den⌉` in integer arithmetic, at least 1.
pub fn ceil_frac(num: usize, den: usize, m: usize) -> usize {
    (num * m).div_ceil(den).max(1)
}

/// Row `i` of the distance matrix, fully sorted.
fn sorted_row(rows: &[Vec<f64>], i: usize) -> Vec<f64> {
    let mut v: Vec<f64> = rows.iter().map(|r| dist(&rows[i], r)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Index minimizing the `rank`-th smallest distance, first index on ties.
pub fn tightest(rows: &[Vec<f64>], rank: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for i in 0..rows.len() {
        let r = sorted_row(rows, i)[rank - 1];
        if r < best.1 {
            best = (i, r);
        }
    }
    best
}

pub struct OracleTm {
    pub medoid: usize,
    pub radius: f64,
    pub kept: Vec<usize>,
    pub center: Vec<f64>,
}

/// Trimmed mean with truncation `delta = delta_num / den`.
pub fn trimmed_mean(rows: &[Vec<f64>], delta_num: usize, den: usize) -> OracleTm {
    let m = rows.len();
    let keep = ceil_frac(den - delta_num, den, m);
    let (medoid, radius) = tightest(rows, keep);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        dist(&rows[medoid], &rows[a])
            .partial_cmp(&dist(&rows[medoid], &rows[b]))
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut kept = order[..keep].to_vec();
    kept.sort();
    let d = rows[0].len();
    let mut center = vec![0.0; d];
    for &i in &kept {
        for j in 0..d {
            center[j] += rows[i][j];
        }
    }
    for c in &mut center {
        *c /= keep as f64;
    }
    OracleTm {
        medoid,
        radius,
        kept,
        center,
    }
}

/// High density point with `q = q_num / den`.
pub fn hdp(rows: &[Vec<f64>], q_num: usize, den: usize) -> (usize, f64) {
    tightest(rows, ceil_frac(q_num, den, rows.len()))
}

/// True when some matching of estimated to true centroids keeps every pair
/// within `tol`.
pub fn matched_within(truth: &CentroidSet, est: &CentroidSet, tol: f64) -> bool {
    let k = truth.k();
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        if (0..k).all(|g| dist(truth.center(g), est.center(perm[g])) <= tol) {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Misclassified count minimized over all bijections, by enumeration.
pub fn mislabel_wrong(est: &[usize], truth: &[usize], k: usize) -> usize {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = usize::MAX;
    loop {
        let wrong = est
            .iter()
            .zip(truth)
            .filter(|(&e, &t)| perm[t] != e)
            .count();
        best = best.min(wrong);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best
}

pub fn rows_of(points: &PointSet) -> Vec<Vec<f64>> {
    points.rows().map(|r| r.to_vec()).collect()
}
