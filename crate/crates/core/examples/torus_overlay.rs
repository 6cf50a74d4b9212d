//! Kernel spectrum of one torus view against the product-of-circles
//! prediction. The embedded torus is not flat, so expect rough agreement
//! for the low modes only.
//!
//! cargo run --release --example torus_overlay -- [n] [epsilon]

use evflow::diffusion::build_kernel;
use evflow::spd::evd;
use evflow::synthetic::{analytic_torus_eigenvalue, gen_torus, predicted_kernel_eigenvalue, CommonAngle, TorusRadii};

fn main() -> evflow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(800);
    let eps: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(4.0);
    let r = TorusRadii { major: 10.0, minor: 5.0 };
    let (a, _, _) = gen_torus(n, r, TorusRadii { major: 10.0, minor: 3.0 }, CommonAngle::Poloidal, 0)?;
    let kernel = build_kernel(&a, eps)?;
    let eig = evd(&kernel.k)?;

    // Index k starts at 1: frequency ⌊k/2⌋ gives the constant once and
    // every other frequency twice.
    let mut predicted: Vec<f64> = (1..10)
        .flat_map(|i| (1..10).map(move |j| (i, j)))
        .map(|(i, j)| analytic_torus_eigenvalue(r.minor, r.major, i, j))
        .collect();
    predicted.sort_by(f64::total_cmp);
    println!("{:>3} {:>10} {:>10}", "k", "kernel", "predicted");
    for k in 0..10 {
        println!(
            "{k:>3} {:>10.4} {:>10.4}",
            eig.values()[k],
            predicted_kernel_eigenvalue(predicted[k], eps)?
        );
    }
    Ok(())
}
