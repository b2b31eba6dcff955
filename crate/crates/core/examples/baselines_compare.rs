//! COD against Lloyd, k-median and the usual seedings on one Cauchy-like
//! sample.
//!
//! ```text
//! cargo run --example baselines_compare -- [seed]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robust_cluster::baselines::{kmeanspp_init, kmedian_hybrid, lloyd, random_init, LloydParams};
use robust_cluster::metrics::{mislabeling, MislabelingMode};
use robust_cluster::synth::{gen_centroids, sample_mixture, ErrorLaw, MixtureSpec};
use robust_cluster::{cod_cluster, default_params, iodk, CodParams, Init, Result};

fn main() -> Result<()> {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centroids = gen_centroids(2, 5, 25.0, &mut rng)?;
    let spec = MixtureSpec {
        centroids,
        counts: vec![200, 200],
        law: ErrorLaw::StudentT {
            nu: 1.0,
            sigma: 5.0,
            scale_convention: Default::default(),
        },
    };
    let (points, truth) = sample_mixture(&spec, &mut rng)?;
    let score = |labels: &_| mislabeling(labels, &truth, MislabelingMode::Permutations);

    let iod = Init::Centroids(iodk(&points, &default_params(points.n(), 2, 0.5)?)?.centroids);
    let pp = Init::Centroids(kmeanspp_init(&points, 2, &mut rng)?);
    let random = Init::Centroids(random_init(&points, 2, &mut rng)?);
    let lp = LloydParams::default();

    let cod = cod_cluster(&points, &iod, &CodParams::with_delta(0.3))?;
    println!("cod    + iod       {:.3}", score(&cod.labels)?);
    for (name, init) in [("iod", &iod), ("k-means++", &pp), ("random", &random)] {
        let run = lloyd(&points, init, &lp, &mut rng)?;
        println!("lloyd  + {name:<10} {:.3}", score(&run.labels)?);
    }
    let km = kmedian_hybrid(&points, &iod, &lp, &mut rng)?;
    println!("median + iod       {:.3}", score(&km.labels)?);
    Ok(())
}
