//! Fixed-rank curve between two rank-p PSD matrices: principal angles
//! between the ranges and the rank at each grid point.
//!
//! cargo run --release --example spsd_path -- [n] [p]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use evflow::evfd::uniform_grid;
use evflow::spd::{evd, SpsdCurve, SpsdKernel, SymMatrix};

fn random_psd(rng: &mut ChaCha8Rng, n: usize, p: usize) -> evflow::Result<SpsdKernel> {
    let basis = DMatrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
    let g = DMatrix::from_fn(p, p, |_, _| rng.gen_range(-1.0..1.0));
    let core = SymMatrix::symmetrized(&g * g.transpose() + DMatrix::identity(p, p))?;
    SpsdKernel::new(basis, core)
}

fn main() -> evflow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(40);
    let p: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (a, b) = (random_psd(&mut rng, n, p)?, random_psd(&mut rng, n, p)?);
    let curve = SpsdCurve::new(&a, &b)?;
    let angles: Vec<String> = curve.angles().iter().map(|a| format!("{a:.3}")).collect();
    println!("principal angles: {}", angles.join(" "));
    for &t in &uniform_grid(6)? {
        let point = curve.point(t)?.to_dense();
        let e = evd(&point)?;
        let top = e.values()[0];
        let rank = e.values().iter().filter(|&&v| v > 1e-10 * top).count();
        println!("t = {t:3.1}  rank {rank}  top eigenvalue {top:.4}");
    }
    Ok(())
}
