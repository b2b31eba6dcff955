//! The two constructions on which Lloyd's algorithm stalls, run against COD.
//!
//! ```text
//! cargo run --release --example lloyd_pathology -- [reps]
//! ```

use robust_cluster::bench::pathology_suite;
use robust_cluster::Result;

fn main() -> Result<()> {
    let reps: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    print!("{}", pathology_suite(reps, 0)?.render());
    Ok(())
}
