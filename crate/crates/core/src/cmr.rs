//! Commonality scores, the common-to-specific ratio along the path, and the
//! embeddings taken at its maximum.

use nalgebra::{DMatrix, DMatrixView};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::evfd::{uniform_grid, FlowDiagram, GeodesicPath};
use crate::spd::{evd, EigenDecomposition, SymMatrix};
use crate::tracking::TrajectorySet;

/// Default hard-partition threshold on normalized scores.
pub const DEFAULT_THRESHOLD: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimator {
    /// Log-linearity of tracked trajectories.
    Arclength,
    /// Spread of each eigenvector over the eigenbasis of the path product.
    Dispersion,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Arclength => "arclength",
            Estimator::Dispersion => "dispersion",
        }
    }
}

/// Normalized commonality scores in [0, 1]; 0 means common.
#[derive(Clone, Debug)]
pub enum Scores {
    /// One score per tracked trajectory.
    PerTrajectory {
        w: Vec<f64>,
        trajectories: TrajectorySet,
    },
    /// One score per grid point and non-trivial diagram column.
    PerPoint(Vec<Vec<f64>>),
}

impl Scores {
    pub fn estimator(&self) -> Estimator {
        match self {
            Scores::PerTrajectory { .. } => Estimator::Arclength,
            Scores::PerPoint(_) => Estimator::Dispersion,
        }
    }

    /// Score of diagram column `c` (1-based, non-trivial) at grid point i.
    fn at(&self, i: usize, c: usize) -> f64 {
        match self {
            Scores::PerTrajectory { w, trajectories } => {
                let k = trajectories.perms()[i]
                    .iter()
                    .position(|&r| r + 1 == c)
                    .expect("permutation covers every column");
                w[k]
            }
            Scores::PerPoint(w) => w[i][c - 1],
        }
    }
}

/// Arclength score per trajectory: w = (a − l)/a with a the discrete arc
/// length of (t, log μ̃ₜ) and l the chord between its endpoints.
pub fn commonality_arclength(diagram: &FlowDiagram, traj: &TrajectorySet) -> Result<Vec<f64>> {
    if diagram.len() < 3 {
        return Err(Error::GridTooCoarse {
            needed: 3,
            got: diagram.len(),
        });
    }
    if traj.perms().len() != diagram.len() || traj.trajectories() != diagram.components() {
        return Err(Error::DimensionMismatch(traj.trajectories(), diagram.components()));
    }
    let grid = diagram.grid();
    Ok((0..traj.trajectories())
        .map(|k| {
            let logs: Vec<f64> = traj.follow(diagram, k).iter().map(|m| m.ln()).collect();
            arclength_score(grid, &logs)
        })
        .collect())
}

pub(crate) fn arclength_score(grid: &[f64], logs: &[f64]) -> f64 {
    let a: f64 = grid
        .windows(2)
        .zip(logs.windows(2))
        .map(|(t, y)| (t[1] - t[0]).hypot(y[1] - y[0]))
        .sum();
    let l = (grid[grid.len() - 1] - grid[0]).hypot(logs[logs.len() - 1] - logs[0]);
    ((a - l) / a).clamp(0.0, 1.0)
}

/// Eigenvectors of the symmetrized path product Γ = γ(t_N)⋯γ(t_1).
///
/// Each factor enters as γ(tᵢ)^{1/N}: the eigenvectors are unchanged and
/// the product keeps eigenvalues near their geometric mean along the path,
/// so components with small eigenvalues are not lost to round-off. The
/// chain is carried as Vᵢ Bᵢ with Vᵢ the eigenvectors at tᵢ, which keeps the
/// cost at O(p²n) per factor on fixed-rank paths.
pub fn dispersion_basis(path: &GeodesicPath, n_t: usize) -> Result<DMatrix<f64>> {
    let mut acc = PathProduct::new(n_t)?;
    for &t in &uniform_grid(n_t)? {
        acc.push(&path.eig(t)?)?;
    }
    acc.finish()
}

/// Running form of [`dispersion_basis`], fed one eigendecomposition per
/// grid point in increasing t. Lets a single sweep build both the diagram
/// and the basis.
#[derive(Clone, Debug)]
pub struct PathProduct {
    root: f64,
    remaining: usize,
    frame: Option<DMatrix<f64>>,
    coeffs: DMatrix<f64>,
}

impl PathProduct {
    pub fn new(n_t: usize) -> Result<Self> {
        if n_t < 2 {
            return Err(Error::GridTooCoarse { needed: 2, got: n_t });
        }
        Ok(PathProduct {
            root: 1.0 / n_t as f64,
            remaining: n_t,
            frame: None,
            coeffs: DMatrix::zeros(0, 0),
        })
    }

    pub fn push(&mut self, e: &EigenDecomposition) -> Result<()> {
        if self.remaining == 0 {
            return Err(Error::InvalidParameter("more factors than grid points".into()));
        }
        let scale: Vec<f64> = e.values().iter().map(|v| v.max(0.0).powf(self.root)).collect();
        let mut next = match &self.frame {
            None => e.vectors().transpose(),
            Some(prev) => (e.vectors().transpose() * prev) * &self.coeffs,
        };
        for (r, mut row) in next.row_iter_mut().enumerate() {
            row *= scale[r];
        }
        let top = next.amax();
        if !(top > 0.0) || !top.is_finite() {
            return Err(Error::NumericalUnderflow);
        }
        next /= top;
        self.coeffs = next;
        self.frame = Some(e.vectors().clone());
        self.remaining -= 1;
        Ok(())
    }

    /// Eigenvectors of the symmetrized product, once every factor is in.
    pub fn finish(self) -> Result<DMatrix<f64>> {
        if self.remaining != 0 {
            return Err(Error::InvalidParameter(format!("{} factors missing", self.remaining)));
        }
        let product = self.frame.expect("at least two factors") * self.coeffs;
        let sym = SymMatrix::symmetrized(product)?;
        Ok(evd(&sym)?.vectors().clone())
    }
}

/// Normalized entropy of each column of `vectors` over `basis`:
/// cⱼ = ⟨v, uⱼ⟩² / Σ ⟨v, uⱼ⟩², w = −Σ cⱼ log cⱼ / log n.
pub fn dispersion_scores(basis: &DMatrix<f64>, vectors: DMatrixView<'_, f64>) -> Vec<f64> {
    let n = basis.ncols();
    let norm = (n as f64).ln();
    let proj = basis.transpose() * vectors;
    proj.column_iter()
        .map(|col| {
            let total: f64 = col.iter().map(|x| x * x).sum();
            let h: f64 = col
                .iter()
                .map(|x| {
                    let c = x * x / total;
                    // Squared overlaps below round-off count as zero.
                    if c > f64::EPSILON {
                        -c * c.ln()
                    } else {
                        0.0
                    }
                })
                .sum();
            (h / norm).clamp(0.0, 1.0)
        })
        .collect()
}

/// Dispersion scores of the leading `n_e` non-trivial eigenvectors of γ(t0).
pub fn commonality_dispersion(path: &GeodesicPath, n_t: usize, t0: f64, n_e: usize) -> Result<Vec<f64>> {
    let basis = dispersion_basis(path, n_t)?;
    let e = path.eig(t0)?;
    if n_e + 1 > e.len() {
        return Err(Error::RankTooHigh {
            requested: n_e + 1,
            available: e.len(),
        });
    }
    Ok(dispersion_scores(&basis, e.vectors().columns(1, n_e)))
}

/// Dispersion scores at every grid point of a diagram that kept vectors.
pub fn dispersion_for_diagram(diagram: &FlowDiagram, basis: &DMatrix<f64>) -> Result<Scores> {
    let vectors = diagram.vectors().ok_or(Error::VectorsMissing)?;
    let k = diagram.components();
    Ok(Scores::PerPoint(
        vectors
            .iter()
            .map(|v| dispersion_scores(basis, v.columns(1, k)))
            .collect(),
    ))
}

/// Scores, the ratio curve and its maximizer.
#[derive(Clone, Debug)]
pub struct CommonalityReport {
    pub estimator: Estimator,
    /// Per trajectory (arclength) or per column at t* (dispersion).
    pub w: Vec<f64>,
    pub curve: Vec<f64>,
    /// Hard-partition ratio with the thresholded sets.
    pub hard_curve: Vec<f64>,
    /// Score of every non-trivial diagram column at every grid point.
    pub point_w: Vec<Vec<f64>>,
    pub t_star: f64,
    pub t_star_index: usize,
    /// Diagram columns at t* classified common.
    pub common_set: Vec<usize>,
    pub non_common_set: Vec<usize>,
    pub threshold: f64,
}

/// Σ(1 − wₖ)μₜᵏ / Σ wₖμₜᵏ over non-trivial components, its grid argmax,
/// and the thresholded common/non-common sets at the maximizer.
pub fn cmr_curve(diagram: &FlowDiagram, scores: &Scores, threshold: f64) -> Result<CommonalityReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!("threshold {threshold} not in (0, 1)")));
    }
    let k = diagram.components();
    match scores {
        Scores::PerTrajectory { w, trajectories } => {
            if w.len() != k || trajectories.perms().len() != diagram.len() {
                return Err(Error::DimensionMismatch(w.len(), k));
            }
        }
        Scores::PerPoint(w) => {
            if w.len() != diagram.len() || w.iter().any(|r| r.len() != k) {
                return Err(Error::DimensionMismatch(w.len(), diagram.len()));
            }
        }
    }
    let mut curve = Vec::with_capacity(diagram.len());
    let mut hard = Vec::with_capacity(diagram.len());
    let mut point_w = Vec::with_capacity(diagram.len());
    let (mut any_num, mut any_den) = (false, false);
    for (i, row) in diagram.values().iter().enumerate() {
        let (mut num, mut den, mut hn, mut hd) = (0.0, 0.0, 0.0, 0.0);
        let ws: Vec<f64> = (1..=k).map(|c| scores.at(i, c)).collect();
        for c in 1..=k {
            let w = ws[c - 1];
            num += (1.0 - w) * row[c];
            den += w * row[c];
            if w < threshold {
                hn += row[c];
            } else {
                hd += row[c];
            }
        }
        any_num |= num > 0.0;
        any_den |= den > 0.0;
        curve.push(ratio(num, den));
        hard.push(ratio(hn, hd));
        point_w.push(ws);
    }
    if !any_den {
        return Err(Error::AllCommon);
    }
    if !any_num {
        return Err(Error::AllNonCommon);
    }
    let mut t_star_index = 0;
    for (i, &c) in curve.iter().enumerate() {
        if c > curve[t_star_index] {
            t_star_index = i;
        }
    }
    let w: Vec<f64> = match scores {
        Scores::PerTrajectory { w, .. } => w.clone(),
        Scores::PerPoint(p) => p[t_star_index].clone(),
    };
    let (common_set, non_common_set): (Vec<usize>, Vec<usize>) =
        (1..=k).partition(|&c| scores.at(t_star_index, c) < threshold);
    Ok(CommonalityReport {
        estimator: scores.estimator(),
        w,
        curve,
        hard_curve: hard,
        point_w,
        t_star: diagram.grid()[t_star_index],
        t_star_index,
        common_set,
        non_common_set,
        threshold,
    })
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Which eigenvectors of γ(t*) make up the embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingMode {
    /// Columns 2..ℓ+1 (1-based), skipping the trivial one.
    TopEll,
    /// Only the columns classified common.
    CommonOnly,
}

/// Per-sample coordinates from the eigenvectors of γ(t*).
pub fn common_embedding(
    gamma_t_star: &EigenDecomposition,
    report: &CommonalityReport,
    ell: usize,
    mode: EmbeddingMode,
) -> Result<Embedding> {
    let indices: Vec<usize> = match mode {
        EmbeddingMode::TopEll => {
            if ell == 0 || ell + 1 > gamma_t_star.len() {
                return Err(Error::RankTooHigh {
                    requested: ell + 1,
                    available: gamma_t_star.len(),
                });
            }
            (1..=ell).collect()
        }
        EmbeddingMode::CommonOnly => {
            if report.common_set.is_empty() {
                return Err(Error::EmptyCommonSet);
            }
            report.common_set.clone()
        }
    };
    if let Some(&bad) = indices.iter().find(|&&c| c >= gamma_t_star.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            size: gamma_t_star.len(),
        });
    }
    let v = gamma_t_star.vectors();
    let coords = DMatrix::from_fn(v.nrows(), indices.len(), |i, c| v[(i, indices[c])]);
    Embedding::new(coords, report.t_star, indices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evfd::{compute_evfd, Endpoint, Geometry};
    use crate::spd::SpdKernel;
    use crate::tracking::TrajectorySet;

    fn flat_diagram(rows: Vec<Vec<f64>>) -> FlowDiagram {
        let n_t = rows.len();
        let width = rows[0].len();
        FlowDiagram::from_parts(uniform_grid(n_t).unwrap(), rows, None, Geometry::Spd, width).unwrap()
    }

    #[test]
    fn log_linear_trajectory_scores_zero() {
        let grid = uniform_grid(11).unwrap();
        let logs: Vec<f64> = grid.iter().map(|t| -0.3 - 1.7 * t).collect();
        assert!(arclength_score(&grid, &logs) < 1e-12);
    }

    #[test]
    fn quadratic_trajectory_matches_refined_quadrature() {
        let f = |t: f64| -2.0 * t * (1.0 - t) - 0.1;
        let grid = uniform_grid(201).unwrap();
        let logs: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
        let fine = uniform_grid(2001).unwrap();
        let fine_logs: Vec<f64> = fine.iter().map(|&t| f(t)).collect();
        let a = arclength_score(&grid, &logs);
        let b = arclength_score(&fine, &fine_logs);
        assert!((a - b).abs() < 1e-3);
        assert!(a > 0.0 && a < 1.0);
    }

    #[test]
    fn equal_eigenvalues_with_opposite_scores_give_unit_ratio() {
        let d = flat_diagram(vec![vec![1.0, 0.5, 0.5], vec![1.0, 0.4, 0.4], vec![1.0, 0.5, 0.5]]);
        let scores = Scores::PerTrajectory {
            w: vec![0.0, 1.0],
            trajectories: TrajectorySet::identity(3, 2),
        };
        let r = cmr_curve(&d, &scores, DEFAULT_THRESHOLD).unwrap();
        assert!(r.curve.iter().all(|&c| (c - 1.0).abs() < 1e-15));
        assert_eq!(r.common_set, vec![1]);
        assert_eq!(r.non_common_set, vec![2]);
    }

    #[test]
    fn all_common_is_reported() {
        let d = flat_diagram(vec![vec![1.0, 0.5], vec![1.0, 0.4], vec![1.0, 0.3]]);
        let scores = Scores::PerTrajectory {
            w: vec![0.0],
            trajectories: TrajectorySet::identity(3, 1),
        };
        assert!(matches!(cmr_curve(&d, &scores, 0.2), Err(Error::AllCommon)));
        let scores = Scores::PerTrajectory {
            w: vec![1.0],
            trajectories: TrajectorySet::identity(3, 1),
        };
        assert!(matches!(cmr_curve(&d, &scores, 0.2), Err(Error::AllNonCommon)));
    }

    #[test]
    fn uniform_overlap_has_maximal_entropy() {
        let n = 4;
        let basis = DMatrix::<f64>::identity(n, n);
        let v = DMatrix::from_element(n, 1, 0.5);
        let w = dispersion_scores(&basis, v.columns(0, 1));
        assert!((w[0] - 1.0).abs() < 1e-14);
        let e = DMatrix::from_fn(n, 1, |i, _| if i == 2 { 1.0 } else { 0.0 });
        assert!(dispersion_scores(&basis, e.columns(0, 1))[0].abs() < 1e-15);
    }

    #[test]
    fn commuting_kernels_are_all_common_under_both_estimators() {
        let a = Endpoint::Spd(SpdKernel::new(SymMatrix::from_diagonal(&[1.0, 0.8, 0.5, 0.2]).unwrap()).unwrap());
        let b = Endpoint::Spd(SpdKernel::new(SymMatrix::from_diagonal(&[1.0, 0.6, 0.3, 0.25]).unwrap()).unwrap());
        let path = GeodesicPath::new(&a, &b).unwrap();
        let w = commonality_dispersion(&path, 9, 0.5, 3).unwrap();
        assert!(w.iter().all(|&x| x < 1e-12), "{w:?}");
        let d = compute_evfd(&a, &b, 9, 3, true).unwrap();
        let tr = crate::tracking::track_trajectories(&d, &Default::default()).unwrap();
        let w = commonality_arclength(&d, &tr).unwrap();
        assert!(w.iter().all(|&x| x < 1e-9), "{w:?}");
    }

    #[test]
    fn embedding_modes() {
        let a = Endpoint::Spd(SpdKernel::new(SymMatrix::from_diagonal(&[1.0, 0.8, 0.5, 0.2]).unwrap()).unwrap());
        let d = compute_evfd(&a, &a, 3, 3, false).unwrap();
        let scores = Scores::PerTrajectory {
            w: vec![0.0, 0.9, 0.0],
            trajectories: TrajectorySet::identity(3, 3),
        };
        let r = cmr_curve(&d, &scores, 0.2).unwrap();
        let Endpoint::Spd(k) = &a else { unreachable!() };
        let e = common_embedding(k.eig(), &r, 3, EmbeddingMode::CommonOnly).unwrap();
        assert_eq!(e.indices(), &[1, 3]);
        let full = common_embedding(k.eig(), &r, 3, EmbeddingMode::TopEll).unwrap();
        assert_eq!(full.dim(), 3);
        assert!(common_embedding(k.eig(), &r, 4, EmbeddingMode::TopEll).is_err());
    }
}
