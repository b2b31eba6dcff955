//! Synthetic data: mixture sampling around well-separated centroids,
//! adversarial outlier injection, and the two constructions on which Lloyd's
//! algorithm stalls.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::geometry::{distance, snap_to_integer, CentroidSet, LabelVector, PointSet, OUTLIER};

/// How σ enters the multivariate t law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleConvention {
    /// Scale matrix σ²I: σ is the per-coordinate scale of the Gaussian part.
    #[default]
    PerCoordinate,
    /// Scale matrix σI, as in the density `[1 + ‖x‖²/(σν)]^{−(ν+d)/2}`.
    MatrixScalar,
}

/// Distribution of the error `w` around a centroid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ErrorLaw {
    Gaussian {
        sigma: f64,
    },
    /// Multivariate t with `nu` degrees of freedom: `z / sqrt(W/ν)` with
    /// spherical Gaussian `z` and `W ~ χ²_ν`.
    StudentT {
        nu: f64,
        sigma: f64,
        #[serde(default)]
        scale_convention: ScaleConvention,
    },
    /// Independent uniform coordinates on `[−half_width, half_width]`.
    UniformBox {
        half_width: f64,
    },
    /// Uniform direction with radius `σR`, `P(R > x) = 1/(1 + x^{1−ε})`.
    RadialHeavy {
        sigma: f64,
        epsilon: f64,
    },
}

impl ErrorLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ErrorLaw::Gaussian { sigma } => {
                ensure!(sigma >= 0.0, "sigma must be >= 0, got {sigma}")
            }
            ErrorLaw::StudentT { nu, sigma, .. } => {
                ensure!(nu > 0.0, "degrees of freedom must be > 0, got {nu}");
                ensure!(sigma > 0.0, "sigma must be > 0, got {sigma}");
            }
            ErrorLaw::UniformBox { half_width } => {
                ensure!(
                    half_width >= 0.0,
                    "half width must be >= 0, got {half_width}"
                )
            }
            ErrorLaw::RadialHeavy { sigma, epsilon } => {
                ensure!(sigma > 0.0, "sigma must be > 0, got {sigma}");
                ensure!(
                    epsilon > 0.0 && epsilon < 1.0,
                    "tail exponent epsilon {epsilon} outside (0, 1)"
                );
            }
        }
        Ok(())
    }

    /// Writes one error draw into `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match *self {
            ErrorLaw::Gaussian { sigma } => {
                for o in out.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *o = sigma * z;
                }
            }
            ErrorLaw::StudentT {
                nu,
                sigma,
                scale_convention,
            } => {
                let scale = match scale_convention {
                    ScaleConvention::PerCoordinate => sigma,
                    ScaleConvention::MatrixScalar => sigma.sqrt(),
                };
                for o in out.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *o = scale * z;
                }
                let chi = ChiSquared::new(nu).expect("validated degrees of freedom");
                let w: f64 = chi.sample(rng);
                let factor = (w / nu).sqrt();
                out.iter_mut().for_each(|o| *o /= factor);
            }
            ErrorLaw::UniformBox { half_width } => {
                for o in out.iter_mut() {
                    *o = half_width * rng.random_range(-1.0..=1.0);
                }
            }
            ErrorLaw::RadialHeavy { sigma, epsilon } => {
                let r = sigma * heavy_radius(rng, epsilon);
                unit_direction(rng, out);
                out.iter_mut().for_each(|o| *o *= r);
            }
        }
    }
}

/// Inverse-CDF draw with `P(R > x) = 1/(1 + x^{1−ε})`.
pub fn heavy_radius<R: Rng + ?Sized>(rng: &mut R, epsilon: f64) -> f64 {
    let u = 1.0 - rng.random::<f64>(); // (0, 1]
    ((1.0 - u) / u).powf(1.0 / (1.0 - epsilon))
}

fn unit_direction<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        for o in out.iter_mut() {
            *o = rng.sample(StandardNormal);
        }
        let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            out.iter_mut().for_each(|o| *o /= norm);
            return;
        }
    }
}

/// Draws `k` centers uniformly in `[−1, 1]^d` and rescales them so that the
/// closest pair is exactly `delta_min` apart.
pub fn gen_centroids<R: Rng + ?Sized>(
    k: usize,
    d: usize,
    delta_min: f64,
    rng: &mut R,
) -> Result<CentroidSet> {
    ensure!(k >= 1 && d >= 1, "need k >= 1 and d >= 1");
    ensure!(
        delta_min > 0.0,
        "separation must be positive, got {delta_min}"
    );
    loop {
        let raw: Vec<f64> = (0..k * d).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let centroids = CentroidSet::from_flat(raw, d)?;
        if k == 1 {
            return Ok(centroids);
        }
        let sep = centroids.min_separation();
        if sep < 1e-6 {
            continue;
        }
        let factor = delta_min / sep;
        let scaled = centroids.as_flat().iter().map(|v| v * factor).collect();
        return CentroidSet::from_flat(scaled, d);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub centroids: CentroidSet,
    /// Points per cluster.
    pub counts: Vec<usize>,
    pub law: ErrorLaw,
}

impl MixtureSpec {
    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.counts.len() == self.centroids.k(),
            "{} counts for {} centroids",
            self.counts.len(),
            self.centroids.k()
        );
        ensure!(
            self.counts.iter().all(|&c| c >= 1),
            "every cluster needs a point"
        );
        if self.centroids.k() > 1 {
            ensure!(
                self.centroids.min_separation() > 0.0,
                "centroids must be distinct"
            );
        }
        self.law.validate()
    }
}

/// `counts[g]` draws `θ_g + w` per cluster, clusters in order.
pub fn sample_mixture<R: Rng + ?Sized>(
    spec: &MixtureSpec,
    rng: &mut R,
) -> Result<(PointSet, LabelVector)> {
    spec.validate()?;
    let d = spec.centroids.d();
    let n = spec.n();
    let mut data = vec![0.0; n * d];
    let mut labels = Vec::with_capacity(n);
    let mut rows = data.chunks_exact_mut(d);
    for (g, &count) in spec.counts.iter().enumerate() {
        let center = spec.centroids.center(g);
        for _ in 0..count {
            let row = rows.next().expect("buffer sized for n rows");
            spec.law.sample_into(rng, row);
            row.iter_mut().zip(center).for_each(|(w, c)| *w += c);
            labels.push(g);
        }
    }
    Ok((
        PointSet::from_flat(data, d)?,
        LabelVector::new(labels, spec.centroids.k())?,
    ))
}

/// Placement of adversarial points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum OutlierStrategy {
    /// Tight ball of radius Δ/100 placed `multiple·Δ` beyond the centroid
    /// hull in a random direction.
    FarClump { multiple: f64 },
    /// Midpoints of centroid pairs, round robin.
    Midpoints,
    /// Uniform on a sphere of `radius` around the data mean.
    Ring { radius: f64 },
}

impl Default for OutlierStrategy {
    fn default() -> Self {
        OutlierStrategy::FarClump { multiple: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierSpec {
    pub count: usize,
    #[serde(flatten)]
    pub strategy: OutlierStrategy,
}

impl OutlierSpec {
    /// `⌊nα(1−ψ)⌋` outliers.
    pub fn from_budget(n: usize, alpha: f64, psi: f64, strategy: OutlierStrategy) -> Result<Self> {
        ensure!(psi > 0.0 && psi <= 1.0, "psi {psi} outside (0, 1]");
        ensure!(alpha > 0.0 && alpha <= 1.0, "alpha {alpha} outside (0, 1]");
        let count = snap_to_integer(n as f64 * alpha * (1.0 - psi)).floor() as usize;
        Ok(Self { count, strategy })
    }
}

/// Data with appended outliers.
#[derive(Debug, Clone, PartialEq)]
pub struct Contaminated {
    pub points: PointSet,
    /// Original labels followed by [`OUTLIER`] for every injected point.
    pub truth: LabelVector,
    /// `true` for original points.
    pub keep_mask: Vec<bool>,
}

/// Appends `spec.count` adversarial points placed relative to the true
/// `centroids`.
pub fn inject_outliers<R: Rng + ?Sized>(
    points: &PointSet,
    labels: &LabelVector,
    centroids: &CentroidSet,
    spec: &OutlierSpec,
    rng: &mut R,
) -> Result<Contaminated> {
    ensure!(
        labels.len() == points.n(),
        "labels cover {} points, data has {}",
        labels.len(),
        points.n()
    );
    ensure!(centroids.d() == points.d(), "centroid dimension mismatch");
    let n = points.n();
    let mut keep_mask = vec![true; n];
    if spec.count == 0 {
        return Ok(Contaminated {
            points: points.clone(),
            truth: labels.clone(),
            keep_mask,
        });
    }
    let d = points.d();
    let mut extra = vec![0.0; spec.count * d];
    match spec.strategy {
        OutlierStrategy::FarClump { multiple } => {
            ensure!(multiple > 0.0, "distance multiple must be positive");
            ensure!(
                centroids.k() >= 2,
                "far clump needs at least two centroids for Δ"
            );
            let sep = centroids.min_separation();
            let hub = centroids.as_points().mean();
            let hull = centroids
                .centers()
                .map(|c| distance(c, &hub))
                .fold(0.0, f64::max);
            let mut dir = vec![0.0; d];
            unit_direction(rng, &mut dir);
            let reach = hull + multiple * sep;
            let clump: Vec<f64> = hub.iter().zip(&dir).map(|(h, u)| h + reach * u).collect();
            let mut offset = vec![0.0; d];
            for row in extra.chunks_exact_mut(d) {
                unit_direction(rng, &mut offset);
                let r = sep / 100.0 * rng.random::<f64>().powf(1.0 / d as f64);
                for j in 0..d {
                    row[j] = clump[j] + r * offset[j];
                }
            }
        }
        OutlierStrategy::Midpoints => {
            let k = centroids.k();
            ensure!(k >= 2, "midpoints need at least two centroids");
            let pairs: Vec<(usize, usize)> = (0..k)
                .flat_map(|g| (g + 1..k).map(move |h| (g, h)))
                .collect();
            for (i, row) in extra.chunks_exact_mut(d).enumerate() {
                let (g, h) = pairs[i % pairs.len()];
                let (a, b) = (centroids.center(g), centroids.center(h));
                for ((r, x), y) in row.iter_mut().zip(a).zip(b) {
                    *r = 0.5 * (x + y);
                }
            }
        }
        OutlierStrategy::Ring { radius } => {
            ensure!(radius >= 0.0, "ring radius must be >= 0");
            let center = points.mean();
            let mut dir = vec![0.0; d];
            for row in extra.chunks_exact_mut(d) {
                unit_direction(rng, &mut dir);
                for j in 0..d {
                    row[j] = center[j] + radius * dir[j];
                }
            }
        }
    }
    let injected = PointSet::from_flat(extra, d)?;
    let mut truth = labels.as_slice().to_vec();
    truth.extend(std::iter::repeat_n(OUTLIER, spec.count));
    keep_mask.extend(std::iter::repeat_n(false, spec.count));
    Ok(Contaminated {
        points: points.concat(&injected)?,
        truth: LabelVector::with_outliers(truth, labels.k())?,
        keep_mask,
    })
}

/// Three 1-D clusters at `−Δ/2`, `Δ/2`, `cΔ/(2β)` with `Uniform(−1, 1)`
/// errors, plus an initial labeling that moves `⌈nβ/3⌉` points of the far
/// cluster into the middle one.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeCentroidPathology {
    pub points: PointSet,
    pub truth: LabelVector,
    pub centroids: CentroidSet,
    pub init_labels: LabelVector,
}

/// `n` is rounded down to a multiple of 3.
pub fn lloyd_pathology_three<R: Rng + ?Sized>(
    n: usize,
    delta: f64,
    beta: f64,
    c: f64,
    rng: &mut R,
) -> Result<ThreeCentroidPathology> {
    ensure!(c > 2.0, "c must exceed 2, got {c}");
    ensure!(beta > 0.0 && beta < 1.0, "beta {beta} outside (0, 1)");
    ensure!(
        delta >= 4.0,
        "delta {delta} too small for disjoint clusters"
    );
    let per = n / 3;
    ensure!(per >= 1, "need at least 3 points");
    let centroids =
        CentroidSet::from_values(&[-delta / 2.0, delta / 2.0, c * delta / (2.0 * beta)])?;
    let spec = MixtureSpec {
        centroids: centroids.clone(),
        counts: vec![per; 3],
        law: ErrorLaw::UniformBox { half_width: 1.0 },
    };
    let (points, truth) = sample_mixture(&spec, rng)?;
    let flipped = (snap_to_integer(n as f64 * beta / 3.0).ceil() as usize).min(per);
    let mut init = truth.as_slice().to_vec();
    init[2 * per..2 * per + flipped]
        .iter_mut()
        .for_each(|l| *l = 1);
    Ok(ThreeCentroidPathology {
        points,
        truth,
        centroids,
        init_labels: LabelVector::new(init, 3)?,
    })
}

/// Two 1-D clusters at 0 and Δ with equal sizes and symmetric errors `±R`,
/// `P(R > x) = 1/(1 + x^{1−ε})`.
pub fn lloyd_pathology_heavy<R: Rng + ?Sized>(
    n: usize,
    delta: f64,
    epsilon_tail: f64,
    rng: &mut R,
) -> Result<(PointSet, LabelVector, CentroidSet)> {
    ensure!(
        epsilon_tail > 0.0 && epsilon_tail < 1.0,
        "tail exponent {epsilon_tail} outside (0, 1)"
    );
    ensure!(
        n >= 2 && n.is_multiple_of(2),
        "n must be even and positive, got {n}"
    );
    ensure!(delta > 0.0, "delta must be positive");
    let centroids = CentroidSet::from_values(&[0.0, delta])?;
    let spec = MixtureSpec {
        centroids: centroids.clone(),
        counts: vec![n / 2; 2],
        law: ErrorLaw::RadialHeavy {
            sigma: 1.0,
            epsilon: epsilon_tail,
        },
    };
    let (points, truth) = sample_mixture(&spec, rng)?;
    Ok((points, truth, centroids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_centroids_exactly_separated() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = gen_centroids(2, 1, 25.0, &mut rng).unwrap();
        assert!((distance(c.center(0), c.center(1)) - 25.0).abs() < 1e-9 * 25.0);
        assert_eq!(gen_centroids(1, 3, 25.0, &mut rng).unwrap().k(), 1);
    }

    #[test]
    fn degenerate_gaussian() {
        let spec = MixtureSpec {
            centroids: CentroidSet::from_rows(&[[0.0, 1.0], [5.0, 5.0]]).unwrap(),
            counts: vec![3, 2],
            law: ErrorLaw::Gaussian { sigma: 0.0 },
        };
        let (p, z) = sample_mixture(&spec, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        for (row, &g) in p.rows().zip(z.as_slice()) {
            assert_eq!(row, spec.centroids.center(g));
        }
    }

    #[test]
    fn rejects_bad_t_parameters() {
        let centroids = CentroidSet::from_values(&[0.0, 1.0]).unwrap();
        for law in [
            ErrorLaw::StudentT {
                nu: 0.0,
                sigma: 1.0,
                scale_convention: Default::default(),
            },
            ErrorLaw::StudentT {
                nu: 3.0,
                sigma: 0.0,
                scale_convention: Default::default(),
            },
        ] {
            let spec = MixtureSpec {
                centroids: centroids.clone(),
                counts: vec![1, 1],
                law,
            };
            assert!(sample_mixture(&spec, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
        }
    }

    #[test]
    fn zero_outliers_is_identity() {
        let p = PointSet::from_values(&[0.0, 10.0]).unwrap();
        let z = LabelVector::new(vec![0, 1], 2).unwrap();
        let c = CentroidSet::from_values(&[0.0, 10.0]).unwrap();
        let spec = OutlierSpec {
            count: 0,
            strategy: OutlierStrategy::default(),
        };
        let out = inject_outliers(&p, &z, &c, &spec, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(out.points, p);
        assert_eq!(out.keep_mask, vec![true, true]);
    }

    #[test]
    fn midpoints_sit_between_centroids() {
        let p = PointSet::from_values(&[0.0, 10.0]).unwrap();
        let z = LabelVector::new(vec![0, 1], 2).unwrap();
        let c = CentroidSet::from_values(&[0.0, 10.0]).unwrap();
        let spec = OutlierSpec {
            count: 2,
            strategy: OutlierStrategy::Midpoints,
        };
        let out = inject_outliers(&p, &z, &c, &spec, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(out.points.as_flat(), &[0.0, 10.0, 5.0, 5.0]);
        assert_eq!(out.truth.as_slice()[2], OUTLIER);
    }

    #[test]
    fn ring_radius() {
        let p = PointSet::from_rows(&[[0.0, 0.0], [2.0, 0.0]]).unwrap();
        let z = LabelVector::new(vec![0, 1], 2).unwrap();
        let c = CentroidSet::from(p.clone());
        let spec = OutlierSpec {
            count: 5,
            strategy: OutlierStrategy::Ring { radius: 7.0 },
        };
        let out = inject_outliers(&p, &z, &c, &spec, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        for i in 2..7 {
            assert!((distance(out.points.row(i), &[1.0, 0.0]) - 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn outlier_budget() {
        let s = OutlierSpec::from_budget(400, 0.5, 0.9, OutlierStrategy::Midpoints).unwrap();
        assert_eq!(s.count, 20);
        assert!(OutlierSpec::from_budget(400, 0.5, 0.0, OutlierStrategy::Midpoints).is_err());
    }

    #[test]
    fn three_centroid_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = lloyd_pathology_three(300, 100.0, 0.3, 3.0, &mut rng).unwrap();
        let flipped = p
            .truth
            .as_slice()
            .iter()
            .zip(p.init_labels.as_slice())
            .filter(|(z, i)| z != i)
            .count();
        assert_eq!(flipped, 30);
        assert!(p
            .truth
            .as_slice()
            .iter()
            .zip(p.init_labels.as_slice())
            .all(|(&z, &i)| z == i || (z == 2 && i == 1)));
        for (row, &g) in p.points.rows().zip(p.truth.as_slice()) {
            assert!((row[0] - p.centroids.center(g)[0]).abs() < 1.0);
        }
        assert!(lloyd_pathology_three(300, 100.0, 0.3, 2.0, &mut rng).is_err());
    }

    #[test]
    fn heavy_pathology_rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(lloyd_pathology_heavy(100, 20.0, 1.0, &mut rng).is_err());
        assert!(lloyd_pathology_heavy(101, 20.0, 0.5, &mut rng).is_err());
        let (p, z, _) = lloyd_pathology_heavy(100, 20.0, 0.5, &mut rng).unwrap();
        assert_eq!((p.n(), z.counts()), (100, vec![50, 50]));
    }
}
