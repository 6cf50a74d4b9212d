//! Smoothness of the shared latent x in the leading eigenvectors of the
//! geodesic midpoint, the linear interpolation, alternating diffusion and
//! each single view.
//!
//! cargo run --release --example baselines -- [n]

use nalgebra::DVector;

use evflow::baselines::{
    alternating_diffusion_kernel, linear_interpolation_matrix, smoothness_from_eig, SmoothnessQuery,
};
use evflow::diffusion::build_kernel;
use evflow::evfd::{endpoints, GeodesicPath, GeometryChoice};
use evflow::spd::evd;
use evflow::synthetic::{gen_flat_2d, ScaleSet};

fn main() -> evflow::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let (a, b, lat) = gen_flat_2d(n, &ScaleSet::new(2.0, 2.0, 3.0, 3.0)?, 0)?;
    let (k1, k2) = (build_kernel(&a, 0.3)?, build_kernel(&b, 0.3)?);
    let (e1, e2) = endpoints(&k1.k, &k2.k, GeometryChoice::Auto)?;
    let path = GeodesicPath::new(&e1, &e2)?;
    let ad = alternating_diffusion_kernel(&k1, &k2, 1, None)?;

    let x = DVector::from_vec(lat.x.clone());
    let mean = x.mean();
    let query = SmoothnessQuery::Vector(x.map(|v| v - mean));
    let spectra = [
        ("geodesic t=0.5", path.eig(0.5)?),
        ("linear t=0.5", evd(&linear_interpolation_matrix(&k1.k, &k2.k, 0.5)?)?),
        ("alternating", evd(&ad.k)?),
        ("view 1", evd(&k1.k)?),
        ("view 2", evd(&k2.k)?),
    ];
    println!("{:<16} {:>6} {:>6} {:>6}", "kernel", "l=3", "l=5", "l=10");
    for (name, eig) in &spectra {
        let s: Vec<String> = [3, 5, 10]
            .iter()
            .map(|&l| smoothness_from_eig(eig, &query, l).map(|v| format!("{v:6.3}")))
            .collect::<evflow::Result<_>>()?;
        println!("{name:<16} {}", s.join(" "));
    }
    Ok(())
}
