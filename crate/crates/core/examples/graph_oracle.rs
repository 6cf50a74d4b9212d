//! Cycle-graph product oracle: the closed-form spectrum, the block
//! structure of B and the permutation average of diag(C), on a small
//! instance so it runs in seconds.
//!
//! cargo run --release --example graph_oracle -- [n] [m] [trials]

use evflow::graph::{verify_graph, StudyConfig};

fn main() -> evflow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: usize| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let cfg = StudyConfig {
        n: arg(1, 5),
        m: arg(2, 11),
        trials: arg(3, 300),
        ..StudyConfig::default()
    };
    let report = verify_graph(&cfg)?;
    for c in &report.checks {
        println!("{:<20} {}", c.name, if c.passed { "pass" } else { "fail" });
        println!("    {}", c.detail);
    }
    Ok(())
}
