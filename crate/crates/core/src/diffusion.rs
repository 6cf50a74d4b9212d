//! Diffusion-maps kernels built from point clouds.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::spd::{evd, EigenDecomposition, SpdKernel, SymMatrix};

/// n samples by d features, optionally with per-feature metric weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    rows: DMatrix<f64>,
    weights: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(rows: DMatrix<f64>) -> Result<Self> {
        if rows.nrows() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a dataset needs at least 2 samples, got {}",
                rows.nrows()
            )));
        }
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset"));
        }
        Ok(Dataset {
            rows,
            weights: None,
        })
    }

    /// Rows given as slices of equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        Self::new(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
    }

    /// Diagonal metric: ‖s‖² = Σ w_f s_f².
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.dim() {
            return Err(Error::DimensionMismatch(weights.len(), self.dim()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("metric weights must be finite and >= 0".into()));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn rows(&self) -> &DMatrix<f64> {
        &self.rows
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// All pairwise squared distances under the (weighted) metric.
    pub fn squared_distances(&self) -> DMatrix<f64> {
        let n = self.len();
        let d = self.dim();
        let w = self.weights.clone().unwrap_or_else(|| vec![1.0; d]);
        // Each row is computed independently, so the parallel schedule
        // cannot change a single bit of the output.
        let cols: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|j| {
                (0..n)
                    .map(|i| {
                        (0..d)
                            .map(|f| w[f] * (self.rows[(i, f)] - self.rows[(j, f)]).powi(2))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        DMatrix::from_fn(n, n, |i, j| cols[j][i])
    }
}

/// W_ij = exp(−‖sᵢ − sⱼ‖² / ε).
pub fn gaussian_affinity(data: &Dataset, epsilon: f64) -> Result<SymMatrix> {
    check_scale(epsilon)?;
    affinity_from_sq_dists(&data.squared_distances(), epsilon)
}

pub(crate) fn affinity_from_sq_dists(d2: &DMatrix<f64>, epsilon: f64) -> Result<SymMatrix> {
    check_scale(epsilon)?;
    SymMatrix::symmetrized(d2.map(|v| (-v / epsilon).exp()))
}

fn check_scale(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::NonPositiveScale(epsilon));
    }
    Ok(())
}

/// Median of the pairwise squared distances over i < j.
pub fn median_scale(data: &Dataset) -> Result<f64> {
    median_of_pairs(&data.squared_distances())
}

pub(crate) fn median_of_pairs(d2: &DMatrix<f64>) -> Result<f64> {
    let n = d2.nrows();
    let mut v: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n {
        for i in 0..j {
            v.push(d2[(i, j)]);
        }
    }
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::DegenerateData);
    }
    v.sort_by(f64::total_cmp);
    let m = v.len();
    let med = if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    };
    if med <= 0.0 {
        // More than half the pairs coincide; fall back to the smallest
        // positive distance so the kernel stays well defined.
        return Ok(v.into_iter().find(|&x| x > 0.0).unwrap_or(1.0));
    }
    Ok(med)
}

/// The diffusion-maps matrices derived from one affinity.
#[derive(Clone, Debug)]
pub struct KernelBundle {
    pub w: SymMatrix,
    pub k_bar: SymMatrix,
    /// Row-stochastic D⁻¹K̄.
    pub a: DMatrix<f64>,
    /// Symmetric conjugate D^{-1/2} K̄ D^{-1/2}.
    pub k: SymMatrix,
    pub d_bar: DVector<f64>,
    pub d: DVector<f64>,
    pub epsilon: Option<f64>,
    eig: EigenDecomposition,
}

/// K̄ = D̄⁻¹WD̄⁻¹, A = D⁻¹K̄, K = D^{-1/2}K̄D^{-1/2}.
pub fn normalize_to_spd(w: &SymMatrix) -> Result<KernelBundle> {
    let n = w.order();
    let wm = w.matrix();
    if wm.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter("affinity has negative entries".into()));
    }
    let d_bar = row_sums(wm)?;
    let k_bar = DMatrix::from_fn(n, n, |i, j| wm[(i, j)] / (d_bar[i] * d_bar[j]));
    let d = row_sums(&k_bar)?;
    let a = DMatrix::from_fn(n, n, |i, j| k_bar[(i, j)] / d[i]);
    let dh = d.map(f64::sqrt);
    let k = SymMatrix::symmetrized(DMatrix::from_fn(n, n, |i, j| {
        k_bar[(i, j)] / (dh[i] * dh[j])
    }))?;
    let eig = evd(&k)?;
    Ok(KernelBundle {
        w: w.clone(),
        k_bar: SymMatrix::symmetrized(k_bar)?,
        a,
        k,
        d_bar,
        d,
        epsilon: None,
        eig,
    })
}

fn row_sums(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    let s = DVector::from_iterator(m.nrows(), m.row_iter().map(|r| r.sum()));
    if let Some(i) = s.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::ZeroRowSum(i));
    }
    Ok(s)
}

/// Affinity plus normalization in one step.
pub fn build_kernel(data: &Dataset, epsilon: f64) -> Result<KernelBundle> {
    let mut b = normalize_to_spd(&gaussian_affinity(data, epsilon)?)?;
    b.epsilon = Some(epsilon);
    Ok(b)
}

impl KernelBundle {
    pub fn order(&self) -> usize {
        self.k.order()
    }

    /// Eigenpairs of the symmetric K (shared eigenvalues with A).
    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    /// K as an SPD kernel with the default positivity floor.
    pub fn spd_kernel(&self) -> Result<SpdKernel> {
        SpdKernel::new(self.k.clone())
    }

    /// Right eigenvectors of A, scaled so the stationary-weighted norm is 1
    /// (the first one is the constant vector).
    pub fn right_eigenvectors(&self) -> DMatrix<f64> {
        let total: f64 = self.d.sum();
        let mut v = self.eig.vectors().clone();
        for (i, mut row) in v.row_iter_mut().enumerate() {
            row *= (total / self.d[i]).sqrt();
        }
        v
    }

    /// Stationary distribution D / Σ D (the first left eigenvector of A).
    pub fn stationary(&self) -> DVector<f64> {
        &self.d / self.d.sum()
    }
}

/// Ψ_t(xᵢ) = (μ₂ᵗ v₂(xᵢ), …, μ_{ℓ+1}ᵗ v_{ℓ+1}(xᵢ)).
pub fn diffusion_map_embedding(bundle: &KernelBundle, t: f64, ell: usize) -> Result<Embedding> {
    let n = bundle.order();
    if ell == 0 || ell + 1 > n {
        return Err(Error::RankTooHigh {
            requested: ell + 1,
            available: n,
        });
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("diffusion time must be positive, got {t}")));
    }
    let v = bundle.right_eigenvectors();
    let mu = bundle.eig.values();
    let coords = DMatrix::from_fn(n, ell, |i, c| {
        let k = c + 1;
        mu[k].max(0.0).powf(t) * v[(i, k)]
    });
    Embedding::new(coords, t, (1..=ell).collect())
}

/// Σ_l (p_t(i,l) − p_t(j,l))² / π(l) with p_t = Aᵗ and π stationary,
/// for integer t.
pub fn diffusion_distance(bundle: &KernelBundle, t: u32, i: usize, j: usize) -> Result<f64> {
    let n = bundle.order();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, size: n });
        }
    }
    let mut p = DMatrix::identity(n, n);
    for _ in 0..t {
        p = &p * &bundle.a;
    }
    let pi = bundle.stationary();
    Ok((0..n)
        .map(|l| (p[(i, l)] - p[(j, l)]).powi(2) / pi[l])
        .sum())
}

/// ‖δᵢᵀAˢ − δⱼᵀAˢ‖₂.
pub fn unnormalized_diffusion_distance(
    bundle: &KernelBundle,
    steps: u32,
    i: usize,
    j: usize,
) -> Result<f64> {
    unnormalized_from_operator(&bundle.a, steps, &[(i, j)]).map(|v| v[0])
}

/// Batch form over many pairs, sharing one power of the operator.
pub fn unnormalized_from_operator(
    a: &DMatrix<f64>,
    steps: u32,
    pairs: &[(usize, usize)],
) -> Result<Vec<f64>> {
    let n = a.nrows();
    for &(i, j) in pairs {
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, size: n });
            }
        }
    }
    let mut p = DMatrix::identity(n, n);
    for _ in 0..steps {
        p = &p * a;
    }
    Ok(pairs
        .iter()
        .map(|&(i, j)| (p.row(i) - p.row(j)).norm())
        .collect())
}
