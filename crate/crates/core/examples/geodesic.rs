//! Points on the affine-invariant geodesic between two random SPD matrices:
//! endpoint checks, the t ↔ 1 − t symmetry and the eigenvalues along the way.
//!
//! cargo run --release --example geodesic -- [n] [seed]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use evflow::spd::{affine_invariant_distance, geodesic_point, SpdKernel, SymMatrix};

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> evflow::Result<SpdKernel> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let m = &g * g.transpose() + DMatrix::identity(n, n) * 0.1;
    SpdKernel::new(SymMatrix::symmetrized(m)?)
}

fn main() -> evflow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (random_spd(&mut rng, n)?, random_spd(&mut rng, n)?);

    println!("distance d(A, B) = {:.6}", affine_invariant_distance(&a, &b)?);
    let start = geodesic_point(&a, &b, 0.0)?;
    let end = geodesic_point(&a, &b, 1.0)?;
    println!(
        "endpoint errors: {:.2e} {:.2e}",
        (start.matrix().matrix() - a.matrix().matrix()).norm(),
        (end.matrix().matrix() - b.matrix().matrix()).norm()
    );
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let g = geodesic_point(&a, &b, t)?;
        let mirror = geodesic_point(&b, &a, 1.0 - t)?;
        let values: Vec<String> = g.eig().values().iter().map(|v| format!("{v:8.4}")).collect();
        println!(
            "t = {t:4.2}  |γ_AB(t) − γ_BA(1−t)| = {:.1e}  eigenvalues {}",
            (g.matrix().matrix() - mirror.matrix().matrix()).norm(),
            values.join(" ")
        );
    }
    Ok(())
}
