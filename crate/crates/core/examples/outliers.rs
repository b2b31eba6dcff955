//! Adversarial outliers: a far clump appended to a clean two-cluster sample.
//! Mislabeling is scored on the original points only.
//!
//! ```text
//! cargo run --example outliers -- [count]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robust_cluster::baselines::{lloyd, LloydParams};
use robust_cluster::metrics::{mislabeling_on_mask, MislabelingMode};
use robust_cluster::synth::{
    gen_centroids, inject_outliers, sample_mixture, ErrorLaw, MixtureSpec, OutlierSpec,
    OutlierStrategy,
};
use robust_cluster::{cod_cluster, default_params, iodk, CodParams, Init, Result};

fn main() -> Result<()> {
    let count: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let centroids = gen_centroids(2, 2, 50.0, &mut rng)?;
    let spec = MixtureSpec {
        centroids: centroids.clone(),
        counts: vec![200, 200],
        law: ErrorLaw::Gaussian { sigma: 1.0 },
    };
    let (points, truth) = sample_mixture(&spec, &mut rng)?;
    let out = OutlierSpec {
        count,
        strategy: OutlierStrategy::FarClump { multiple: 50.0 },
    };
    let c = inject_outliers(&points, &truth, &centroids, &out, &mut rng)?;
    println!("{} clean points, {count} outliers", points.n());

    // the initialization is computed on the contaminated data
    let iod = iodk(&c.points, &default_params(points.n(), 2, 0.5)?)?;
    let init = Init::Centroids(iod.centroids);
    let cod = cod_cluster(&c.points, &init, &CodParams::with_delta(0.3))?;
    let ll = lloyd(&c.points, &init, &LloydParams::default(), &mut rng)?;
    for (name, labels) in [("cod", &cod.labels), ("lloyd", &ll.labels)] {
        let loss = mislabeling_on_mask(
            labels,
            &c.truth,
            &c.keep_mask,
            MislabelingMode::Permutations,
        )?;
        println!("{name:<6} mislabeling on clean points {loss:.3}");
    }
    Ok(())
}
