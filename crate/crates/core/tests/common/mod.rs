//! Random matrices shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use evflow::spd::{SpdKernel, SymMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    // Box-Muller keeps the tests on the plain `rand` API.
    DMatrix::from_fn(rows, cols, |_, _| {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        let v: f64 = rng.gen();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    })
}

pub fn orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    gaussian(rng, n, n).qr().q()
}

/// V diag(values) Vᵀ.
pub fn with_basis(v: &DMatrix<f64>, values: &[f64]) -> SymMatrix {
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(values));
    SymMatrix::symmetrized(v * d * v.transpose()).unwrap()
}

/// Spectrum drawn log-uniformly from [1e-2, 1].
pub fn spectrum(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(rng.gen_range(-2.0..0.0))).collect()
}

pub fn random_spd(rng: &mut impl Rng, n: usize) -> SpdKernel {
    let v = orthogonal(rng, n);
    let s = spectrum(rng, n);
    SpdKernel::new(with_basis(&v, &s)).unwrap()
}

pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
