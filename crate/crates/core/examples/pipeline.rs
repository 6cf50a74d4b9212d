//! The full pipeline from a config, the same path as `evflow run`: writes
//! the diagram, scores, embedding and metrics to the output directory.
//!
//! cargo run --release --example pipeline -- [out_dir]

use std::path::PathBuf;

use nalgebra::DMatrix;

use evflow::io::write_csv;
use evflow::pipeline::{run_pipeline, write_dataset, EpsilonPolicy, RunConfig};
use evflow::synthetic::{gen_flat_2d, ScaleSet};

fn main() -> evflow::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "pipeline_demo".into()));
    std::fs::create_dir_all(&dir)?;
    let (a, b, lat) = gen_flat_2d(300, &ScaleSet::uniform(2.0)?, 0)?;
    write_dataset(&dir.join("view1.csv"), a.rows())?;
    write_dataset(&dir.join("view2.csv"), b.rows())?;
    let x = DMatrix::from_column_slice(lat.x.len(), 1, &lat.x);
    write_csv(&dir.join("x.csv"), &x, Some(&["x"]))?;

    let mut cfg = RunConfig::new(vec![dir.join("view1.csv"), dir.join("view2.csv")], dir.join("run"));
    cfg.epsilon = EpsilonPolicy::Fixed(vec![0.3, 0.3]);
    cfg.n_t = 61;
    cfg.k = 12;
    cfg.target = Some(dir.join("x.csv"));
    let report = run_pipeline(&cfg)?;

    match report.t_star() {
        Some(t) => println!("t* = {t:.3}"),
        None => println!("t* undefined"),
    }
    println!("{}", report.metrics_csv());
    println!("config used:\n{}", cfg.echo());
    Ok(())
}
