//! Three views of one latent variable: leading spectra over the convex hull
//! of their kernels, on a grid of (t₁, t₂) in [0, 1]².
//!
//! The views must give strictly positive definite kernels; large n at this
//! ε makes them numerically singular.
//!
//! cargo run --release --example convex_hull -- [n]

use evflow::diffusion::build_kernel;
use evflow::spd::SpdKernel;
use evflow::synthetic::{convex_hull_point, gen_flat_three};

fn main() -> evflow::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(80);
    let (views, _) = gen_flat_three(n, 0)?;
    let kernels: Vec<SpdKernel> = views
        .iter()
        .map(|v| SpdKernel::new(build_kernel(v, 0.05)?.k))
        .collect::<evflow::Result<_>>()?;
    let steps = 4;
    for i in 0..=steps {
        for j in 0..=steps {
            let (t1, t2) = (i as f64 / steps as f64, j as f64 / steps as f64);
            let k = convex_hull_point(&kernels[0], &kernels[1], &kernels[2], t1, t2)?;
            let top: Vec<String> = k.eig().values().iter().skip(1).take(4).map(|v| format!("{v:.4}")).collect();
            println!("t1 = {t1:4.2} t2 = {t2:4.2}  {}", top.join(" "));
        }
    }
    Ok(())
}
