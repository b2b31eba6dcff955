//! IOD on three one-dimensional clusters, with the default parameters and
//! with hand-picked ones.
//!
//! ```text
//! cargo run --example iod_init
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robust_cluster::synth::{sample_mixture, ErrorLaw, MixtureSpec};
use robust_cluster::{default_params, iodk, CentroidSet, IodParams, Result};

fn main() -> Result<()> {
    let spec = MixtureSpec {
        centroids: CentroidSet::from_values(&[0.0, 100.0, 200.0])?,
        counts: vec![60, 50, 40],
        law: ErrorLaw::Gaussian { sigma: 3.0 },
    };
    let (points, _) = sample_mixture(&spec, &mut ChaCha8Rng::seed_from_u64(3))?;
    let n = points.n();

    let params = default_params(n, 3, 40.0 / n as f64)?;
    println!(
        "default params: m1={} m={} beta={:.4}",
        params.m1, params.m, params.beta
    );
    show(&iodk(&points, &params)?);

    let coarse = IodParams::new(10, 5, 0.1, 3);
    println!("coarse params: m1=10 m=5 beta=0.1");
    show(&iodk(&points, &coarse)?);
    Ok(())
}

fn show(r: &robust_cluster::IodResult) {
    let mut c: Vec<f64> = r.centroids.as_flat().to_vec();
    c.sort_by(f64::total_cmp);
    println!(
        "  centroids {:?}\n  rows {:?}  steps {:?}  totdist {:.3}  skipped {}",
        c.iter()
            .map(|v| (v * 100.0).round() / 100.0)
            .collect::<Vec<_>>(),
        r.indices,
        r.chosen_steps,
        r.totdist,
        r.skipped_branches
    );
}
