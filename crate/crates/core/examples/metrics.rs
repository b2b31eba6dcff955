//! Mislabeling under both alignment modes, WCSS and the diagnostics on a
//! hand-made example.
//!
//! ```text
//! cargo run --example metrics
//! ```

use robust_cluster::metrics::{confusion_matrix, diagnostics, mislabeling, wcss, MislabelingMode};
use robust_cluster::{CentroidSet, LabelVector, PointSet, Result};

fn main() -> Result<()> {
    let points = PointSet::from_values(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0])?;
    let truth = LabelVector::new(vec![0, 0, 0, 1, 1, 1], 2)?;
    // swapped names and one point on the wrong side
    let est = LabelVector::new(vec![1, 1, 0, 0, 0, 0], 2)?;

    println!("confusion {:?}", confusion_matrix(&est, &truth)?);
    for mode in [MislabelingMode::Permutations, MislabelingMode::Mappings] {
        println!("{mode:?}: {:.4}", mislabeling(&est, &truth, mode)?);
    }

    let true_c = CentroidSet::from_values(&[1.0, 11.0])?;
    let est_c = CentroidSet::from_values(&[9.0, 0.5])?;
    println!("wcss at the true centroids {:.2}", wcss(&points, &true_c)?);
    println!("wcss at the estimate       {:.2}", wcss(&points, &est_c)?);

    let d = diagnostics(&points, &truth, &est, &true_c, &est_c, Some(1.0))?;
    println!(
        "H={:.3} Λ={:.3} Δ={} α={} SNR={:?} alignment {:?}",
        d.h, d.lambda, d.delta, d.alpha, d.snr, d.alignment
    );
    Ok(())
}
