//! Reference kernels and evaluation metrics: straight-line interpolation,
//! alternating diffusion, the truncated smoothness score and the
//! polynomial distance fit.

use nalgebra::{DMatrix, DVector};

use crate::diffusion::{affinity_from_sq_dists, median_of_pairs, normalize_to_spd, KernelBundle};
use crate::error::{Error, Result};
use crate::spd::{fractional_power, EigenDecomposition, SpdKernel, SymMatrix};

/// L(t) = (1 − t)K₁ + tK₂.
pub fn linear_interpolation_point(k1: &SpdKernel, k2: &SpdKernel, t: f64) -> Result<SpdKernel> {
    if k1.order() != k2.order() {
        return Err(Error::DimensionMismatch(k1.order(), k2.order()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} is outside [0, 1]")));
    }
    SpdKernel::with_floor(linear_interpolation_matrix(k1.matrix(), k2.matrix(), t)?, 0.0)
}

/// L(t) without the positivity check, for kernels that are only
/// semidefinite.
pub fn linear_interpolation_matrix(k1: &SymMatrix, k2: &SymMatrix, t: f64) -> Result<SymMatrix> {
    if k1.order() != k2.order() {
        return Err(Error::DimensionMismatch(k1.order(), k2.order()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} is outside [0, 1]")));
    }
    SymMatrix::symmetrized(k1.matrix() * (1.0 - t) + k2.matrix() * t)
}

/// Alternating diffusion: A_AD = A₂ᵀA₁ᵀ, distances between the columns of
/// A_ADˢ, a Gaussian affinity on those distances (median scale unless
/// `epsilon` is given), and the usual two-step normalization.
pub fn alternating_diffusion_kernel(
    b1: &KernelBundle,
    b2: &KernelBundle,
    steps: u32,
    epsilon: Option<f64>,
) -> Result<KernelBundle> {
    if b1.order() != b2.order() {
        return Err(Error::DimensionMismatch(b1.order(), b2.order()));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("alternating diffusion needs at least one step".into()));
    }
    let ad = b2.a.transpose() * b1.a.transpose();
    let mut p = ad.clone();
    for _ in 1..steps {
        p = &p * &ad;
    }
    let d2 = column_sq_dists(&p);
    let eps = match epsilon {
        Some(e) => e,
        None => median_of_pairs(&d2)?,
    };
    let mut bundle = normalize_to_spd(&affinity_from_sq_dists(&d2, eps)?)?;
    bundle.epsilon = Some(eps);
    Ok(bundle)
}

fn column_sq_dists(p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = p.ncols();
    let gram = p.transpose() * p;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (gram[(i, i)] + gram[(j, j)] - 2.0 * gram[(i, j)]).max(0.0)
        }
    })
}

/// The product variant K̃₁^{s₁}K̃₂^{s₂} with K̃ᵢ = Kᵢ^{1/(s₁+s₂)}: s₂ steps
/// on the finer second kernel followed by s₁ on the first. For commuting
/// kernels it coincides with γ(s₂/(s₁+s₂)).
pub fn alternating_product(k1: &SpdKernel, k2: &SpdKernel, s1: u32, s2: u32) -> Result<DMatrix<f64>> {
    if k1.order() != k2.order() {
        return Err(Error::DimensionMismatch(k1.order(), k2.order()));
    }
    if s1 == 0 || s2 == 0 {
        return Err(Error::InvalidParameter("step counts must be positive".into()));
    }
    let total = (s1 + s2) as f64;
    let a = fractional_power(k1, s1 as f64 / total)?;
    let b = fractional_power(k2, s2 as f64 / total)?;
    Ok(a.matrix().matrix() * b.matrix().matrix())
}

/// A target for the smoothness score.
#[derive(Clone, Debug)]
pub enum SmoothnessQuery {
    Vector(DVector<f64>),
    /// n × d, one row per sample.
    Matrix(DMatrix<f64>),
}

/// ‖V_ℓᵀx‖² / ‖x‖² with V_ℓ the leading ℓ eigenvectors of the kernel
/// (Frobenius norms for a matrix target).
pub fn smoothness_score(k: &SpdKernel, query: &SmoothnessQuery, ell: usize) -> Result<f64> {
    smoothness_from_eig(k.eig(), query, ell)
}

/// Same score from a precomputed descending eigendecomposition, possibly
/// truncated to a rank p ≥ ℓ.
pub fn smoothness_from_eig(eig: &EigenDecomposition, query: &SmoothnessQuery, ell: usize) -> Result<f64> {
    let n = eig.vectors().nrows();
    if ell > eig.len() {
        return Err(Error::RankTooHigh {
            requested: ell,
            available: eig.len(),
        });
    }
    let x = match query {
        SmoothnessQuery::Vector(v) => DMatrix::from_column_slice(v.len(), 1, v.as_slice()),
        SmoothnessQuery::Matrix(m) => m.clone(),
    };
    if x.nrows() != n {
        return Err(Error::DimensionMismatch(x.nrows(), n));
    }
    let total = x.norm_squared();
    if total == 0.0 {
        return Err(Error::ZeroVector);
    }
    if ell == n && eig.len() == n {
        // A complete orthonormal basis keeps all of the energy.
        return Ok(1.0);
    }
    let v = eig.vectors().columns(0, ell);
    let proj = v.transpose() * &x;
    Ok((proj.norm_squared() / total).min(1.0))
}

/// Least-squares residual of fitting `dist_latent` by a polynomial of
/// `degree` in `dist_kernel`.
pub fn polyfit_correspondence(dist_kernel: &[f64], dist_latent: &[f64], degree: usize) -> Result<f64> {
    Ok(polyfit(dist_kernel, dist_latent, degree)?.1)
}

/// Coefficients (constant first) and residual sum of squares.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<(Vec<f64>, f64)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    if degree == 0 || degree > 5 {
        return Err(Error::InvalidParameter(format!("degree must be in 1..=5, got {degree}")));
    }
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(hi > lo) {
        return Err(Error::DegenerateDesign);
    }
    let m = x.len();
    let cols = degree + 1;
    let design = DMatrix::from_fn(m, cols, |i, c| x[i].powi(c as i32));
    let scale: Vec<f64> = (0..cols)
        .map(|c| design.column(c).norm().max(f64::MIN_POSITIVE))
        .collect();
    let mut scaled = design.clone();
    for (c, mut col) in scaled.column_iter_mut().enumerate() {
        col /= scale[c];
    }
    let yv = DVector::from_column_slice(y);
    let normal = scaled.transpose() * &scaled;
    let rhs = scaled.transpose() * &yv;
    let sol = normal
        .cholesky()
        .map(|c| c.solve(&rhs))
        .or_else(|| {
            let svd = (scaled.transpose() * &scaled).svd(true, true);
            svd.solve(&rhs, 1e-14).ok()
        })
        .ok_or(Error::DegenerateDesign)?;
    let coef: Vec<f64> = (0..cols).map(|c| sol[c] / scale[c]).collect();
    let resid = (&design * DVector::from_vec(coef.clone()) - yv).norm_squared();
    Ok((coef, resid))
}
