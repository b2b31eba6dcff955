//! Clustering a heavy-tailed mixture with COD started from IOD.
//!
//! ```text
//! cargo run --example cod_clustering -- [nu] [seed]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robust_cluster::metrics::{diagnostics, mislabeling, MislabelingMode};
use robust_cluster::synth::{gen_centroids, sample_mixture, ErrorLaw, MixtureSpec};
use robust_cluster::{cod_cluster, default_params, iodk, CodParams, Init, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let nu: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, d, sigma) = (2, 5, 5.0);
    let centroids = gen_centroids(k, d, 25.0, &mut rng)?;
    let spec = MixtureSpec {
        centroids: centroids.clone(),
        counts: vec![200; k],
        law: ErrorLaw::StudentT {
            nu,
            sigma,
            scale_convention: Default::default(),
        },
    };
    let (points, truth) = sample_mixture(&spec, &mut rng)?;

    let init = iodk(&points, &default_params(points.n(), k, 1.0 / k as f64)?)?;
    println!(
        "IOD picked rows {:?} (totdist {:.2})",
        init.indices, init.totdist
    );
    let run = cod_cluster(
        &points,
        &Init::Centroids(init.centroids),
        &CodParams::with_delta(0.3),
    )?;
    for s in &run.history {
        println!(
            "iteration {:>2}  movement {:<12} sizes {:?}",
            s.iteration,
            s.movement.map_or("-".into(), |m| format!("{m:.3e}")),
            s.labels.counts()
        );
    }
    let loss = mislabeling(&run.labels, &truth, MislabelingMode::Permutations)?;
    let diag = diagnostics(
        &points,
        &truth,
        &run.labels,
        &centroids,
        &run.centroids,
        Some(sigma),
    )?;
    println!("nu={nu}: mislabeling {loss:.4}");
    println!(
        "H={:.3}  Λ={:.3}  Δ={:.1}  α={:.3}  SNR={:.2}",
        diag.h,
        diag.lambda,
        diag.delta,
        diag.alpha,
        diag.snr.unwrap_or(f64::NAN)
    );
    Ok(())
}
