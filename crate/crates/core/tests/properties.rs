mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use robust_cluster::baselines::coordinatewise_median;
use robust_cluster::geometry::{order_stat, pairwise_distances, quantile_rank};
use robust_cluster::metrics::{diagnostics, mislabeling, wcss, MislabelingMode};
use robust_cluster::synth::{gen_centroids, sample_mixture, ErrorLaw, MixtureSpec};
use robust_cluster::{
    assign_labels, cod_cluster, hdp, trimmed_mean, CentroidSet, CodParams, Init, LabelVector,
    PointSet,
};

fn rows(max_n: usize, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(-100.0..100.0f64, d), 1..=max_n)
}

fn grid_rows(max_n: usize, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(
        proptest::collection::vec((-20..20i32).prop_map(f64::from), d),
        1..=max_n,
    )
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg(200))]

    #[test]
    fn distance_matrix_is_a_metric(r in rows(15, 3)) {
        let dm = pairwise_distances(&PointSet::from_rows(&r).unwrap());
        let n = dm.n();
        let tol = 1e-9 * dm.max_entry();
        for i in 0..n {
            prop_assert_eq!(dm.get(i, i), 0.0);
            for j in 0..n {
                prop_assert!(dm.get(i, j) >= 0.0);
                prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                for l in 0..n {
                    prop_assert!(dm.get(i, l) <= dm.get(i, j) + dm.get(j, l) + tol);
                }
            }
        }
    }

    #[test]
    fn distance_matrix_permutes_with_rows(r in rows(12, 2), seed in any::<u64>()) {
        let n = r.len();
        let mut perm: Vec<usize> = (0..n).collect();
        use rand::seq::SliceRandom;
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled: Vec<Vec<f64>> = perm.iter().map(|&i| r[i].clone()).collect();
        let a = pairwise_distances(&PointSet::from_rows(&r).unwrap());
        let b = pairwise_distances(&PointSet::from_rows(&shuffled).unwrap());
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(b.get(i, j), a.get(perm[i], perm[j]));
            }
        }
    }

    #[test]
    fn order_stat_extremes(v in proptest::collection::vec(-1e6..1e6f64, 1..50)) {
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(order_stat(&v, v.len()).unwrap(), max);
        prop_assert_eq!(order_stat(&v, 1).unwrap(), min);
    }

    #[test]
    fn quantile_rank_is_monotone(c in 1usize..500, p in 0.0..1.0f64, q in 0.0..1.0f64) {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        prop_assert!(quantile_rank(c, lo) <= quantile_rank(c, hi));
        prop_assert!((1..=c).contains(&quantile_rank(c, hi)));
    }

    #[test]
    fn trimmed_mean_postconditions(r in rows(20, 3), delta in 0.0..0.5f64) {
        let points = PointSet::from_rows(&r).unwrap();
        let tm = trimmed_mean(&points, delta).unwrap();
        let dm = pairwise_distances(&points);
        prop_assert_eq!(tm.kept_indices.len(), quantile_rank(r.len(), 1.0 - delta));
        prop_assert!(tm.kept_indices.contains(&tm.medoid_index));
        for &j in &tm.kept_indices {
            prop_assert!(dm.get(tm.medoid_index, j) <= tm.radius);
        }
        let mean = points.select(&tm.kept_indices).unwrap().mean();
        prop_assert_eq!(tm.center, mean);
    }

    #[test]
    fn trimmed_mean_translates(r in grid_rows(15, 2), shift in proptest::collection::vec((-50..50i32).prop_map(f64::from), 2), delta in 0.0..0.5f64) {
        let points = PointSet::from_rows(&r).unwrap();
        let moved: Vec<Vec<f64>> = r.iter().map(|p| vec![p[0] + shift[0], p[1] + shift[1]]).collect();
        let a = trimmed_mean(&points, delta).unwrap();
        let b = trimmed_mean(&PointSet::from_rows(&moved).unwrap(), delta).unwrap();
        prop_assert_eq!(a.medoid_index, b.medoid_index);
        prop_assert_eq!(&a.kept_indices, &b.kept_indices);
        for ((x, s), y) in a.center.iter().zip(&shift).zip(&b.center) {
            prop_assert!((x + s - y).abs() <= 1e-9);
        }
        let q = 1.0 - delta;
        prop_assert_eq!(hdp(&points, q).unwrap(), hdp(&PointSet::from_rows(&moved).unwrap(), q).unwrap());
    }

    #[test]
    fn trimmed_mean_rotates(r in grid_rows(15, 2), delta in 0.0..0.5f64) {
        // quarter turn keeps every distance bit-identical
        let rotated: Vec<Vec<f64>> = r.iter().map(|p| vec![-p[1], p[0]]).collect();
        let a = trimmed_mean(&PointSet::from_rows(&r).unwrap(), delta).unwrap();
        let b = trimmed_mean(&PointSet::from_rows(&rotated).unwrap(), delta).unwrap();
        prop_assert_eq!(a.medoid_index, b.medoid_index);
        prop_assert_eq!(a.radius, b.radius);
        prop_assert!((b.center[0] + a.center[1]).abs() <= 1e-9);
        prop_assert!((b.center[1] - a.center[0]).abs() <= 1e-9);
    }

    #[test]
    fn hdp_postconditions(r in rows(20, 2), q in 0.01..=1.0f64) {
        let points = PointSet::from_rows(&r).unwrap();
        let h = hdp(&points, q).unwrap();
        let dm = pairwise_distances(&points);
        let rank = quantile_rank(r.len(), q);
        let within = (0..r.len()).filter(|&j| dm.get(h.index, j) <= h.radius).count();
        prop_assert!(within >= rank);
        for i in 0..r.len() {
            prop_assert!(order_stat(dm.row(i), rank).unwrap() >= h.radius);
        }
    }
}

fn clustered(seed: u64, k: usize, d: usize, per: usize) -> (PointSet, LabelVector, CentroidSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centroids = gen_centroids(k, d, 10.0, &mut rng).unwrap();
    let spec = MixtureSpec {
        centroids: centroids.clone(),
        counts: vec![per; k],
        law: ErrorLaw::StudentT {
            nu: 2.0,
            sigma: 2.0,
            scale_convention: Default::default(),
        },
    };
    let (p, t) = sample_mixture(&spec, &mut rng).unwrap();
    (p, t, centroids)
}

proptest! {
    #![proptest_config(cfg(60))]

    #[test]
    fn cod_stops_and_labels_follow_centroids(seed in any::<u64>(), k in 2usize..5, max_iterations in 1usize..12, delta in 0.0..0.45f64) {
        let (points, _, _) = clustered(seed, k, 2, 15);
        let init = Init::Centroids(CentroidSet::from_indices(&points, &(0..k).map(|g| g * 15).collect::<Vec<_>>()).unwrap());
        let params = CodParams { delta, epsilon: 1e-8, max_iterations };
        let run = cod_cluster(&points, &init, &params).unwrap();
        prop_assert!(run.iterations() <= max_iterations.max(2));
        for w in run.history.windows(2) {
            prop_assert_eq!(&assign_labels(&points, &w[0].centroids).unwrap(), &w[1].labels);
        }
        prop_assert_eq!(run, cod_cluster(&points, &init, &params).unwrap());
    }

    #[test]
    fn cod_scales(seed in any::<u64>(), delta in 0.0..0.45f64) {
        let (points, _, _) = clustered(seed, 3, 2, 12);
        let scaled = points.map_rows(|r, out| out.iter_mut().zip(r).for_each(|(o, v)| *o = 2.0 * v)).unwrap();
        let idx = [0, 12, 24];
        let a = cod_cluster(&points, &Init::Centroids(CentroidSet::from_indices(&points, &idx).unwrap()),
            &CodParams { delta, epsilon: 1e-8, max_iterations: 20 }).unwrap();
        let b = cod_cluster(&scaled, &Init::Centroids(CentroidSet::from_indices(&scaled, &idx).unwrap()),
            &CodParams { delta, epsilon: 4e-8, max_iterations: 20 }).unwrap();
        prop_assert_eq!(a.history.len(), b.history.len());
        for (x, y) in a.history.iter().zip(&b.history) {
            prop_assert_eq!(&x.labels, &y.labels);
            for (u, v) in x.centroids.as_flat().iter().zip(y.centroids.as_flat()) {
                prop_assert_eq!(2.0 * u, *v);
            }
        }
    }

    #[test]
    fn mislabeling_bounds(k in 2usize..7, labels in proptest::collection::vec((0usize..7, 0usize..7), 1..80)) {
        let est = LabelVector::new(labels.iter().map(|l| l.0 % k).collect(), k).unwrap();
        let truth = LabelVector::new(labels.iter().map(|l| l.1 % k).collect(), k).unwrap();
        let p = mislabeling(&est, &truth, MislabelingMode::Permutations).unwrap();
        let m = mislabeling(&est, &truth, MislabelingMode::Mappings).unwrap();
        prop_assert!((0.0..=1.0 - 1.0 / k as f64 + 1e-12).contains(&p));
        prop_assert!(m <= p);
    }

    #[test]
    fn wcss_single_centroid_is_minimized_by_the_mean(r in rows(30, 3), nudge in proptest::collection::vec(-1.0..1.0f64, 3)) {
        let points = PointSet::from_rows(&r).unwrap();
        let mean = points.mean();
        let best = wcss(&points, &CentroidSet::from_rows(std::slice::from_ref(&mean)).unwrap()).unwrap();
        let other: Vec<f64> = mean.iter().zip(&nudge).map(|(m, e)| m + e).collect();
        let worse = wcss(&points, &CentroidSet::from_rows(&[other]).unwrap()).unwrap();
        // closed form: the excess is n·‖nudge‖²
        let excess = r.len() as f64 * nudge.iter().map(|e| e * e).sum::<f64>();
        prop_assert!((worse - best - excess).abs() <= 1e-6 * worse.max(1.0));
    }

    #[test]
    fn lambda_ignores_translation(seed in any::<u64>(), shift in -1e3..1e3f64) {
        let (points, truth, centroids) = clustered(seed, 3, 2, 10);
        let est = CentroidSet::from_indices(&points, &[0, 10, 20]).unwrap();
        let labels = assign_labels(&points, &est).unwrap();
        let a = diagnostics(&points, &truth, &labels, &centroids, &est, None).unwrap();
        let mv = |c: &CentroidSet| CentroidSet::from_flat(c.as_flat().iter().map(|v| v + shift).collect(), 2).unwrap();
        let b = diagnostics(&points, &truth, &labels, &mv(&centroids), &mv(&est), None).unwrap();
        prop_assert!((a.lambda - b.lambda).abs() <= 1e-9 * (1.0 + a.lambda));
        prop_assert!(a.h <= 1.0);
    }

    #[test]
    fn median_stays_inside_the_clean_values(clean in proptest::collection::vec(-10.0..10.0f64, 5..30), junk in proptest::collection::vec(-1e9..1e9f64, 0..30)) {
        let bad = junk.len().min((clean.len() - 1) / 2);
        let mut values = clean.clone();
        values.extend_from_slice(&junk[..bad]);
        let points = PointSet::from_values(&values).unwrap();
        let all: Vec<usize> = (0..values.len()).collect();
        let med = coordinatewise_median(&points, &all)[0];
        let lo = clean.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = clean.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= med && med <= hi);
    }

    #[test]
    fn generated_centroids_hit_the_separation(seed in any::<u64>(), k in 2usize..6, d in 1usize..6, sep in 0.5..100.0f64) {
        let c = gen_centroids(k, d, sep, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!((c.min_separation() - sep).abs() <= 1e-9 * sep);
    }

    #[test]
    fn mixture_is_a_function_of_the_seed(seed in any::<u64>()) {
        let (a, ta, _) = clustered(seed, 2, 3, 5);
        let (b, tb, _) = clustered(seed, 2, 3, 5);
        prop_assert_eq!(a, b);
        prop_assert_eq!(ta, tb);
    }
}

#[test]
fn degenerate_gaussian_puts_points_on_their_centroid() {
    let centroids = CentroidSet::from_rows(&[[0.0, 1.0], [5.0, -2.0], [9.0, 9.0]]).unwrap();
    let spec = MixtureSpec {
        centroids: centroids.clone(),
        counts: vec![3, 1, 4],
        law: ErrorLaw::Gaussian { sigma: 0.0 },
    };
    let (points, truth) = sample_mixture(&spec, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    for (row, &g) in points.rows().zip(truth.as_slice()) {
        assert_eq!(row, centroids.center(g));
    }
}
