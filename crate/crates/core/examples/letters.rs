//! Letter-recognition clustering with an outlier class.
//!
//! ```text
//! LETTERS_DATA=data/letter-recognition.data cargo run --release --example letters
//! ```
//!
//! `scripts/fetch_letters.sh` downloads the file.

use robust_cluster::bench::{reproduce_table, LETTERS_ENV};
use robust_cluster::dataset::{ingest_letters, LETTERS_FORMAT};
use robust_cluster::reference::TableId;
use robust_cluster::Result;

fn main() -> Result<()> {
    let Some(path) = std::env::args()
        .nth(1)
        .or_else(|| std::env::var(LETTERS_ENV).ok())
    else {
        eprintln!("pass the data file or set {LETTERS_ENV}; rows look like {LETTERS_FORMAT}");
        std::process::exit(2);
    };
    let sample = ingest_letters(&path, &['W', 'V'], 100, Some('R'), 20, 0)?;
    println!(
        "sampled {} rows ({} kept for scoring) from {path}",
        sample.dataset.points.n(),
        sample.keep_mask.iter().filter(|&&k| k).count()
    );
    let report = reproduce_table(TableId::Letters, 5, 1.0, 0, Some(path.as_ref()), None)?;
    print!("{}", report.render());
    Ok(())
}
