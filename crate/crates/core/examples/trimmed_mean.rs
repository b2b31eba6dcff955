//! Trimmed mean and high density point on a contaminated sample.
//!
//! ```text
//! cargo run --example trimmed_mean
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robust_cluster::synth::{sample_mixture, ErrorLaw, MixtureSpec};
use robust_cluster::{hdp, trimmed_mean, CentroidSet, PointSet, Result};

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = MixtureSpec {
        centroids: CentroidSet::from_rows(&[[3.0, -1.0]])?,
        counts: vec![90],
        law: ErrorLaw::Gaussian { sigma: 1.0 },
    };
    let (clean, _) = sample_mixture(&spec, &mut rng)?;
    // ten points far off to one side
    let junk = PointSet::from_rows(&[[500.0, 500.0]; 10])?;
    let points = clean.concat(&junk)?;

    println!("sample mean       {:?}", rounded(&points.mean()));
    for delta in [0.1, 0.2, 0.3] {
        let tm = trimmed_mean(&points, delta)?;
        println!(
            "trimmed mean δ={delta}  {:?}  medoid #{} radius {:.3} kept {}",
            rounded(&tm.center),
            tm.medoid_index,
            tm.radius,
            tm.kept_indices.len()
        );
    }
    let h = hdp(&points, 0.5)?;
    println!(
        "high density point (q=0.5): #{} at {:?}, radius {:.3}",
        h.index,
        rounded(points.row(h.index)),
        h.radius
    );
    Ok(())
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1000.0).round() / 1000.0).collect()
}
