//! One of the simulation tables, next to the published numbers.
//!
//! ```text
//! cargo run --release --example reproduce_table -- nu 5 0.5
//! ```
//!
//! Arguments are the table (`nu`, `sigma`, `dim`), repetitions per cell
//! and a multiplier on the per-cluster sample size.

use robust_cluster::bench::reproduce_table;
use robust_cluster::reference::TableId;
use robust_cluster::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let table: TableId = args.next().as_deref().unwrap_or("sigma").parse()?;
    let reps: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let scale: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let report = reproduce_table(table, reps, scale, 0, None, None)?;
    print!("{}", report.render());
    Ok(())
}
