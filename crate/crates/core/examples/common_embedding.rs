//! Embedding from γ(t*) on the flat suite, compared with the single-view
//! diffusion maps by correlation with the shared latent x.
//!
//! cargo run --release --example common_embedding -- [n]

use evflow::cmr::{cmr_curve, common_embedding, dispersion_for_diagram, EmbeddingMode, PathProduct, DEFAULT_THRESHOLD};
use evflow::diffusion::{build_kernel, diffusion_map_embedding};
use evflow::evfd::{endpoints, evfd_visiting, GeodesicPath, GeometryChoice};
use evflow::synthetic::{gen_flat_2d, ScaleSet};

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    (cov / (va * vb).sqrt()).abs()
}

fn main() -> evflow::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(400);
    let n_t = 41;
    // The view-specific directions are longer than the shared one, so each
    // view's own leading mode is not about x.
    let (a, b, lat) = gen_flat_2d(n, &ScaleSet::new(2.0, 2.0, 3.0, 3.0)?, 0)?;
    let (k1, k2) = (build_kernel(&a, 0.3)?, build_kernel(&b, 0.3)?);
    let (e1, e2) = endpoints(&k1.k, &k2.k, GeometryChoice::Auto)?;
    let path = GeodesicPath::new(&e1, &e2)?;
    let mut product = PathProduct::new(n_t)?;
    let diagram = evfd_visiting(&path, n_t, 12, true, |e| product.push(e))?;
    let scores = dispersion_for_diagram(&diagram, &product.finish()?)?;
    let report = cmr_curve(&diagram, &scores, DEFAULT_THRESHOLD)?;

    let gamma = path.eig(report.t_star)?;
    let common = common_embedding(&gamma, &report, 2, EmbeddingMode::TopEll)?;
    let view1 = diffusion_map_embedding(&k1, 1.0, 2)?;
    let view2 = diffusion_map_embedding(&k2, 1.0, 2)?;
    println!("t* = {:.3}", report.t_star);
    println!("|corr(first coordinate, x)|:");
    println!("  gamma(t*)  {:.3}", corr(&common.column(0), &lat.x));
    println!("  view 1     {:.3}", corr(&view1.column(0), &lat.x));
    println!("  view 2     {:.3}", corr(&view2.column(0), &lat.x));
    Ok(())
}
