//! Symmetric matrices, spectral calculus, and the two geodesic interpolations:
//! the affine-invariant path between SPD kernels and Bonnabel's fixed-rank
//! curve between positive semidefinite kernels of equal rank.

use faer::dyn_stack::{GlobalPodBuffer, PodStack};
use faer::linalg::evd::{compute_hermitian_evd, compute_hermitian_evd_req, ComputeVectors};
use faer::Parallelism;
use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};

/// Default relative positivity floor: eigenvalues at or below
/// `DEFAULT_FLOOR * largest` are treated as zero.
pub const DEFAULT_FLOOR: f64 = 1e-12;

const SYMMETRY_TOL: f64 = 1e-12;
const ZERO_ANGLE: f64 = 1e-10;

/// A finite real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Validates squareness, finiteness and symmetry to 1e-12 relative,
    /// then stores the exactly symmetrized matrix.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square_finite(&m)?;
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let mut worst = 0.0_f64;
        for j in 0..m.ncols() {
            for i in 0..j {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if worst > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(worst / scale));
        }
        Ok(Self::symmetrize(m))
    }

    /// Builds from a product chain that is symmetric up to round-off:
    /// M <- (M + Mᵀ)/2 without a tolerance check.
    pub fn symmetrized(m: DMatrix<f64>) -> Result<Self> {
        check_square_finite(&m)?;
        Ok(Self::symmetrize(m))
    }

    fn symmetrize(mut m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        for j in 0..n {
            for i in 0..j {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix(m)
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

fn check_square_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entries"));
    }
    Ok(())
}

/// Eigenpairs sorted by descending eigenvalue, each eigenvector flipped so
/// its largest-magnitude entry is positive (lowest index wins ties).
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    /// Sorts and sign-normalizes raw eigenpairs.
    pub(crate) fn from_unsorted(values: DVector<f64>, vectors: DMatrix<f64>) -> Self {
        let mut vectors = vectors;
        normalize_signs(&mut vectors);
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        // Clusters of (numerically) equal eigenvalues are ordered by their
        // sign-normalized eigenvectors so degenerate spectra come out the
        // same way on every run.
        let scale = values.amax().max(f64::MIN_POSITIVE);
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && values[order[end - 1]] - values[order[end]] <= 1e-12 * scale {
                end += 1;
            }
            if end - start > 1 {
                order[start..end].sort_by(|&a, &b| lex_cmp(&vectors, b, a));
            }
            start = end;
        }
        let values = DVector::from_iterator(n, order.iter().map(|&i| values[i]));
        let vectors = DMatrix::from_fn(vectors.nrows(), n, |r, c| vectors[(r, order[c])]);
        EigenDecomposition { values, vectors }
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    /// Orthonormal eigenvectors as columns.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// V f(Λ) Vᵀ, symmetrized.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        scaled_gram(&self.vectors, &d)
    }

    /// Keeps the leading `k` pairs.
    pub fn truncated(&self, k: usize) -> EigenDecomposition {
        let k = k.min(self.len());
        EigenDecomposition {
            values: self.values.rows(0, k).into_owned(),
            vectors: self.vectors.columns(0, k).into_owned(),
        }
    }
}

fn lex_cmp(v: &DMatrix<f64>, a: usize, b: usize) -> std::cmp::Ordering {
    for r in 0..v.nrows() {
        let o = v[(r, a)].total_cmp(&v[(r, b)]);
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Flips each column so its largest-magnitude entry is positive.
pub fn normalize_signs(v: &mut DMatrix<f64>) {
    for mut col in v.column_iter_mut() {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > best_abs {
                best_abs = x.abs();
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

/// G diag(d) Gᵀ, symmetrized.
pub(crate) fn scaled_gram(g: &DMatrix<f64>, d: &[f64]) -> DMatrix<f64> {
    let mut gd = g.clone();
    for (j, mut col) in gd.column_iter_mut().enumerate() {
        col *= d[j];
    }
    let m = gd * g.transpose();
    SymMatrix::symmetrize(m).0
}

/// Full symmetric eigendecomposition with the crate's ordering and sign
/// conventions.
pub fn evd(m: &SymMatrix) -> Result<EigenDecomposition> {
    let n = m.order();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    if m.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entries"));
    }
    // Sequential so results do not depend on the thread count.
    let par = Parallelism::None;
    let params = Default::default();
    let req = compute_hermitian_evd_req::<f64>(n, ComputeVectors::Yes, par, params)
        .map_err(|_| Error::InvalidParameter(format!("order {n} too large for workspace")))?;
    let mut buf = GlobalPodBuffer::new(req);
    let a = faer::mat::from_column_major_slice::<f64, usize, usize>(m.0.as_slice(), n, n);
    let mut s = faer::Col::<f64>::zeros(n);
    let mut u = faer::Mat::<f64>::zeros(n, n);
    compute_hermitian_evd(a, s.as_mut(), Some(u.as_mut()), par, PodStack::new(&mut buf), params);
    let values = DVector::from_fn(n, |i, _| s.read(i));
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigenvalues"));
    }
    let vectors = DMatrix::from_fn(n, n, |i, j| u.read(i, j));
    Ok(EigenDecomposition::from_unsorted(values, vectors))
}

/// A strictly positive definite kernel with its eigendecomposition cached.
#[derive(Clone, Debug)]
pub struct SpdKernel {
    matrix: SymMatrix,
    eig: EigenDecomposition,
    floor: f64,
}

impl SpdKernel {
    /// Uses the default relative floor.
    pub fn new(m: SymMatrix) -> Result<Self> {
        Self::with_floor(m, DEFAULT_FLOOR)
    }

    /// `rel_floor` is relative to the largest eigenvalue.
    pub fn with_floor(m: SymMatrix, rel_floor: f64) -> Result<Self> {
        let eig = evd(&m)?;
        Self::from_parts(m, eig, rel_floor)
    }

    pub(crate) fn from_parts(m: SymMatrix, eig: EigenDecomposition, rel_floor: f64) -> Result<Self> {
        let top = eig.values.iter().cloned().fold(0.0_f64, f64::max);
        let floor = rel_floor * top;
        let low = eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
        if eig.is_empty() || low <= floor || top <= 0.0 {
            return Err(Error::NotPositiveDefinite { value: low, floor });
        }
        Ok(SpdKernel {
            matrix: m,
            eig,
            floor,
        })
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    /// Absolute positivity floor used at construction.
    pub fn floor(&self) -> f64 {
        self.floor
    }

    fn power_matrix(&self, t: f64) -> DMatrix<f64> {
        self.eig.apply(|v| v.powf(t))
    }
}

/// K^t = V diag(λᵢᵗ) Vᵀ.
pub fn fractional_power(k: &SpdKernel, t: f64) -> Result<SpdKernel> {
    let m = SymMatrix::symmetrized(k.power_matrix(t))?;
    let values = DVector::from_iterator(k.eig.len(), k.eig.values.iter().map(|v| v.powf(t)));
    let eig = EigenDecomposition::from_unsorted(values, k.eig.vectors.clone());
    SpdKernel::from_parts(m, eig, 0.0)
}

/// Precomputed affine-invariant geodesic from K₁ to K₂.
///
/// C = K₁^{-1/2} K₂ K₁^{-1/2} = U diag(c) Uᵀ is diagonalized once and
/// γ(t) = G diag(cᵗ) Gᵀ with G = K₁^{1/2} U.
#[derive(Clone, Debug)]
pub struct SpdGeodesic {
    frame: DMatrix<f64>,
    ratios: DVector<f64>,
}

impl SpdGeodesic {
    pub fn new(k1: &SpdKernel, k2: &SpdKernel) -> Result<Self> {
        if k1.order() != k2.order() {
            return Err(Error::DimensionMismatch(k1.order(), k2.order()));
        }
        let half = k1.eig.apply(f64::sqrt);
        let inv_half = k1.eig.apply(|v| 1.0 / v.sqrt());
        let c = SymMatrix::symmetrized(&inv_half * k2.matrix.matrix() * &inv_half)?;
        let ce = evd(&c)?;
        let low = ce.values.min();
        if low <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                value: low,
                floor: 0.0,
            });
        }
        Ok(SpdGeodesic {
            frame: half * &ce.vectors,
            ratios: ce.values,
        })
    }

    /// Eigenvalues of K₁^{-1/2} K₂ K₁^{-1/2}, descending.
    pub fn ratios(&self) -> &DVector<f64> {
        &self.ratios
    }

    pub fn point_matrix(&self, t: f64) -> SymMatrix {
        let d: Vec<f64> = self.ratios.iter().map(|c| c.powf(t)).collect();
        SymMatrix(scaled_gram(&self.frame, &d))
    }

    pub fn point(&self, t: f64) -> Result<SpdKernel> {
        SpdKernel::with_floor(self.point_matrix(t), 0.0)
    }

    /// ‖log C‖_F.
    pub fn length(&self) -> f64 {
        self.ratios.iter().map(|c| c.ln().powi(2)).sum::<f64>().sqrt()
    }
}

/// γ(t) = K₁^{1/2}(K₁^{-1/2}K₂K₁^{-1/2})ᵗK₁^{1/2}.
pub fn geodesic_point(k1: &SpdKernel, k2: &SpdKernel, t: f64) -> Result<SpdKernel> {
    check_unit(t)?;
    SpdGeodesic::new(k1, k2)?.point(t)
}

/// ‖log(K₁^{-1/2}K₂K₁^{-1/2})‖_F.
pub fn affine_invariant_distance(k1: &SpdKernel, k2: &SpdKernel) -> Result<f64> {
    Ok(SpdGeodesic::new(k1, k2)?.length())
}

fn check_unit(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} is outside [0, 1]")));
    }
    Ok(())
}

/// A rank-p positive semidefinite matrix U R² Uᵀ with orthonormal U.
#[derive(Clone, Debug)]
pub struct SpsdKernel {
    basis: DMatrix<f64>,
    core: SymMatrix,
    core_eig: EigenDecomposition,
}

impl SpsdKernel {
    pub fn new(basis: DMatrix<f64>, core: SymMatrix) -> Result<Self> {
        let (n, p) = basis.shape();
        if core.order() != p {
            return Err(Error::DimensionMismatch(p, core.order()));
        }
        if p > n {
            return Err(Error::RankTooHigh {
                requested: p,
                available: n,
            });
        }
        let gram = basis.transpose() * &basis;
        let dev = (gram - DMatrix::<f64>::identity(p, p)).amax();
        if dev > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "range basis is not orthonormal (deviation {dev:e})"
            )));
        }
        let core_eig = evd(&core)?;
        let low = core_eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
        if p == 0 || low <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                value: low,
                floor: 0.0,
            });
        }
        Ok(SpsdKernel {
            basis,
            core,
            core_eig,
        })
    }

    pub fn order(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn core(&self) -> &SymMatrix {
        &self.core
    }

    /// The p nonzero eigenpairs in the ambient space.
    pub fn eig(&self) -> EigenDecomposition {
        let vectors = &self.basis * &self.core_eig.vectors;
        EigenDecomposition::from_unsorted(self.core_eig.values.clone(), vectors)
    }

    pub fn to_dense(&self) -> SymMatrix {
        let m = &self.basis * self.core.matrix() * self.basis.transpose();
        SymMatrix::symmetrize(m)
    }
}

/// Keeps the top-p eigenpairs: U = leading eigenvectors, R² = their eigenvalues.
pub fn truncate_to_rank(m: &SymMatrix, p: usize) -> Result<SpsdKernel> {
    truncate_eig(&evd(m)?, p)
}

pub(crate) fn truncate_eig(eig: &EigenDecomposition, p: usize) -> Result<SpsdKernel> {
    let n = eig.len();
    if p == 0 || p > n {
        return Err(Error::RankTooHigh {
            requested: p,
            available: n,
        });
    }
    let top = eig.values[0].max(0.0);
    if eig.values[p - 1] <= DEFAULT_FLOOR * top {
        return Err(Error::RankTooHigh {
            requested: p,
            available: count_above(eig.values(), DEFAULT_FLOOR),
        });
    }
    let t = eig.truncated(p);
    SpsdKernel::new(
        t.vectors,
        SymMatrix(DMatrix::from_diagonal(&t.values)),
    )
}

/// Number of eigenvalues strictly above `rel * largest`.
pub fn count_above(values: &DVector<f64>, rel: f64) -> usize {
    let top = values.iter().cloned().fold(0.0_f64, f64::max);
    values.iter().filter(|&&v| v > rel * top).count()
}

/// Bonnabel's fixed-rank curve between two rank-p kernels.
///
/// After aligning the ranges through the SVD of V_Aᵀ V_B, the range moves
/// along the Grassmann geodesic U(t) = U_A cos(Θt) + X sin(Θt) while the
/// p×p core follows the SPD geodesic between R_A² and R_B².
#[derive(Clone, Debug)]
pub struct SpsdCurve {
    start: DMatrix<f64>,
    direction: DMatrix<f64>,
    angles: Vec<f64>,
    cores: SpdGeodesic,
}

impl SpsdCurve {
    pub fn new(a: &SpsdKernel, b: &SpsdKernel) -> Result<Self> {
        if a.order() != b.order() {
            return Err(Error::DimensionMismatch(a.order(), b.order()));
        }
        if a.rank() != b.rank() {
            return Err(Error::RankMismatch(a.rank(), b.rank()));
        }
        let p = a.rank();
        let overlap = a.basis.transpose() * &b.basis;
        let svd = SVD::try_new(overlap, true, true, f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
        let oa = svd.u.ok_or(Error::NoConvergence)?;
        let ob = svd.v_t.ok_or(Error::NoConvergence)?.transpose();
        let ua = &a.basis * &oa;
        let ub = &b.basis * &ob;
        let angles: Vec<f64> = svd
            .singular_values
            .iter()
            .map(|s| s.clamp(-1.0, 1.0).acos())
            .collect();
        let mut direction = &ub - &ua * (ua.transpose() * &ub);
        for (j, mut col) in direction.column_iter_mut().enumerate() {
            let th = angles[j];
            if th.abs() < ZERO_ANGLE {
                col.fill(0.0);
            } else {
                col /= th.sin();
            }
        }
        // R_A² = U_Aᵀ A U_A reduces to O_Aᵀ R² O_A because U_Aᵀ V_A = O_Aᵀ.
        let ra = SymMatrix::symmetrized(oa.transpose() * a.core.matrix() * &oa)?;
        let rb = SymMatrix::symmetrized(ob.transpose() * b.core.matrix() * &ob)?;
        let cores = SpdGeodesic::new(
            &SpdKernel::with_floor(ra, 0.0)?,
            &SpdKernel::with_floor(rb, 0.0)?,
        )?;
        debug_assert_eq!(angles.len(), p);
        Ok(SpsdCurve {
            start: ua,
            direction,
            angles,
            cores,
        })
    }

    pub fn order(&self) -> usize {
        self.start.nrows()
    }

    pub fn rank(&self) -> usize {
        self.start.ncols()
    }

    /// Principal angles between the two ranges.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// U(t) = U_A cos(Θt) + X sin(Θt).
    pub fn basis(&self, t: f64) -> DMatrix<f64> {
        let mut u = self.start.clone();
        for j in 0..self.rank() {
            let th = self.angles[j] * t;
            let (s, c) = th.sin_cos();
            let mut col = u.column_mut(j);
            col *= c;
            col.axpy(s, &self.direction.column(j), 1.0);
        }
        u
    }

    pub fn core(&self, t: f64) -> SymMatrix {
        self.cores.point_matrix(t)
    }

    pub fn point(&self, t: f64) -> Result<SpsdKernel> {
        SpsdKernel::new(self.basis(t), self.core(t))
    }
}

/// γ̂(t) on the fixed-rank curve between `a` and `b`.
pub fn spsd_geodesic_point(a: &SpsdKernel, b: &SpsdKernel, t: f64) -> Result<SpsdKernel> {
    check_unit(t)?;
    SpsdCurve::new(a, b)?.point(t)
}
