//! Spectra of γ(0.4) and L(0.4) on a 1D strip seen at two scales, each fit
//! to log μₖ = −c·k² for k = 1..9.
//!
//! cargo run --release --example weyl_contrast -- [n] [epsilon]

use evflow::baselines::linear_interpolation_matrix;
use evflow::diffusion::build_kernel;
use evflow::evfd::{endpoints, GeodesicPath, GeometryChoice};
use evflow::spd::evd;
use evflow::synthetic::gen_strip_1d;

/// Least-squares c through the origin and the centred R².
fn weyl_fit(values: &[f64]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = (1..=9).map(|k| ((k * k) as f64, values[k].ln())).collect();
    let c = -pts.iter().map(|(x, y)| x * y).sum::<f64>() / pts.iter().map(|(x, _)| x * x).sum::<f64>();
    let mean = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let ss_res: f64 = pts.iter().map(|(x, y)| (y + c * x).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|(_, y)| (y - mean).powi(2)).sum();
    (c, 1.0 - ss_res / ss_tot)
}

fn main() -> evflow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let eps: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.01);
    let (a, b, _) = gen_strip_1d(n, 1.0, 5.0, 0)?;
    let (k1, k2) = (build_kernel(&a, eps)?, build_kernel(&b, eps)?);
    let (e1, e2) = endpoints(&k1.k, &k2.k, GeometryChoice::Auto)?;
    let path = GeodesicPath::new(&e1, &e2)?;
    let g = path.eig(0.4)?;
    let l = evd(&linear_interpolation_matrix(&k1.k, &k2.k, 0.4)?)?;
    if g.len() < 10 {
        return Err(evflow::Error::RankTooHigh { requested: 10, available: g.len() });
    }
    let gv: Vec<f64> = g.values().iter().copied().collect();
    let lv: Vec<f64> = l.values().iter().copied().collect();
    let (cg, rg) = weyl_fit(&gv);
    let (cl, rl) = weyl_fit(&lv);
    println!("n = {n}, epsilon = {eps}, geometry = {:?}", path.geometry());
    println!("k   log mu gamma(0.4)   log mu L(0.4)");
    for k in 0..10 {
        println!("{k}   {:>16.6}   {:>13.6}", gv[k].ln(), lv[k].ln());
    }
    println!("gamma(0.4): c = {cg:.5}, R^2 = {rg:.5}");
    println!("L(0.4):     c = {cl:.5}, R^2 = {rl:.5}");
    Ok(())
}
