//! Eigenvalue flow diagram of the flat two-view suite, scored with the
//! dispersion estimator. Prints t* and the common columns, writes the SVG.
//!
//! cargo run --release --example flow_diagram -- [n] [out.svg]

use evflow::cmr::{cmr_curve, dispersion_for_diagram, PathProduct, DEFAULT_THRESHOLD};
use evflow::diffusion::build_kernel;
use evflow::evfd::{endpoints, evfd_visiting, GeodesicPath, GeometryChoice};
use evflow::svg::emit_diagram_svg;
use evflow::synthetic::{gen_flat_2d, ScaleSet};

fn main() -> evflow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(400);
    let out = args.get(2).cloned().unwrap_or_else(|| "flow_diagram.svg".into());
    let n_t = 61;

    let (a, b, _) = gen_flat_2d(n, &ScaleSet::uniform(2.0)?, 0)?;
    let (k1, k2) = (build_kernel(&a, 0.3)?, build_kernel(&b, 0.3)?);
    let (e1, e2) = endpoints(&k1.k, &k2.k, GeometryChoice::Auto)?;
    let path = GeodesicPath::new(&e1, &e2)?;
    println!("geometry: {:?}", path.geometry());

    let mut product = PathProduct::new(n_t)?;
    let diagram = evfd_visiting(&path, n_t, 12, true, |e| product.push(e))?;
    let scores = dispersion_for_diagram(&diagram, &product.finish()?)?;
    let report = cmr_curve(&diagram, &scores, DEFAULT_THRESHOLD)?;

    println!("t* = {:.3}", report.t_star);
    println!("common columns at t*: {:?}", report.common_set);
    let w: Vec<String> = report.w.iter().map(|w| format!("{w:.2}")).collect();
    println!("scores at t*: {}", w.join(" "));
    emit_diagram_svg(&diagram, Some(&report), out.as_ref())?;
    println!("wrote {out}");
    Ok(())
}
