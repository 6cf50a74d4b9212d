//! The eigenvalue flow diagram: spectra of γ(t) on a uniform grid.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spd::{
    count_above, evd, truncate_eig, EigenDecomposition, SpdGeodesic, SpdKernel, SpsdCurve,
    SpsdKernel, SymMatrix, DEFAULT_FLOOR,
};

/// Relative eigenvalue tolerance used to choose the SPSD rank when the
/// caller does not fix one. Tighter tolerances leave p×p cores with
/// condition numbers near 1/tol, and the fixed-rank curve then stops being
/// symmetric under swapping its endpoints.
pub const DEFAULT_RANK_TOL: f64 = 1e-6;

/// Which manifold the path lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Spd,
    Spsd { rank: usize },
}

/// An endpoint of the path.
#[derive(Clone, Debug)]
pub enum Endpoint {
    Spd(SpdKernel),
    Spsd(SpsdKernel),
}

impl Endpoint {
    pub fn order(&self) -> usize {
        match self {
            Endpoint::Spd(k) => k.order(),
            Endpoint::Spsd(k) => k.order(),
        }
    }

    pub fn eig(&self) -> EigenDecomposition {
        match self {
            Endpoint::Spd(k) => k.eig().clone(),
            Endpoint::Spsd(k) => k.eig(),
        }
    }
}

/// Geometry selection for a pair of kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometryChoice {
    /// SPD unless either kernel has eigenvalues at or below the positivity
    /// floor, then SPSD with the rank picked by `DEFAULT_RANK_TOL`.
    Auto,
    Spd,
    /// Fixed rank, or `None` to pick it by `DEFAULT_RANK_TOL`.
    Spsd(Option<usize>),
}

/// Turns two symmetric kernels into endpoints of the chosen geometry.
pub fn endpoints(
    k1: &SymMatrix,
    k2: &SymMatrix,
    choice: GeometryChoice,
) -> Result<(Endpoint, Endpoint)> {
    if k1.order() != k2.order() {
        return Err(Error::DimensionMismatch(k1.order(), k2.order()));
    }
    let e1 = evd(k1)?;
    let e2 = evd(k2)?;
    let n = k1.order();
    let full = count_above(e1.values(), DEFAULT_FLOOR).min(count_above(e2.values(), DEFAULT_FLOOR));
    let spsd = match choice {
        GeometryChoice::Spd => None,
        GeometryChoice::Auto if full == n => None,
        GeometryChoice::Auto | GeometryChoice::Spsd(None) => Some(
            count_above(e1.values(), DEFAULT_RANK_TOL)
                .min(count_above(e2.values(), DEFAULT_RANK_TOL))
                .min(n.saturating_sub(1))
                .max(1),
        ),
        GeometryChoice::Spsd(Some(p)) => Some(p),
    };
    match spsd {
        None => Ok((
            Endpoint::Spd(SpdKernel::from_parts(k1.clone(), e1, DEFAULT_FLOOR)?),
            Endpoint::Spd(SpdKernel::from_parts(k2.clone(), e2, DEFAULT_FLOOR)?),
        )),
        Some(p) => Ok((
            Endpoint::Spsd(truncate_eig(&e1, p)?),
            Endpoint::Spsd(truncate_eig(&e2, p)?),
        )),
    }
}

/// γ(t) for either geometry, with per-point spectra.
#[derive(Clone, Debug)]
pub enum GeodesicPath {
    Spd(SpdGeodesic),
    Spsd(SpsdCurve),
}

impl GeodesicPath {
    pub fn new(k1: &Endpoint, k2: &Endpoint) -> Result<Self> {
        match (k1, k2) {
            (Endpoint::Spd(a), Endpoint::Spd(b)) => Ok(GeodesicPath::Spd(SpdGeodesic::new(a, b)?)),
            (Endpoint::Spsd(a), Endpoint::Spsd(b)) => {
                Ok(GeodesicPath::Spsd(SpsdCurve::new(a, b)?))
            }
            _ => Err(Error::InvalidParameter(
                "both endpoints must share a geometry".into(),
            )),
        }
    }

    pub fn geometry(&self) -> Geometry {
        match self {
            GeodesicPath::Spd(_) => Geometry::Spd,
            GeodesicPath::Spsd(c) => Geometry::Spsd { rank: c.rank() },
        }
    }

    pub fn order(&self) -> usize {
        match self {
            GeodesicPath::Spd(g) => g.ratios().len(),
            GeodesicPath::Spsd(c) => c.order(),
        }
    }

    /// Number of eigenpairs available at each point (n or p).
    pub fn spectrum_len(&self) -> usize {
        match self {
            GeodesicPath::Spd(g) => g.ratios().len(),
            GeodesicPath::Spsd(c) => c.rank(),
        }
    }

    /// γ(t) as a dense matrix.
    pub fn dense(&self, t: f64) -> SymMatrix {
        match self {
            GeodesicPath::Spd(g) => g.point_matrix(t),
            GeodesicPath::Spsd(c) => {
                let u = c.basis(t);
                let m = &u * c.core(t).matrix() * u.transpose();
                SymMatrix::symmetrized(m).expect("finite curve point")
            }
        }
    }

    /// All nonzero eigenpairs of γ(t): n of them on SPD, p on SPSD.
    pub fn eig(&self, t: f64) -> Result<EigenDecomposition> {
        match self {
            GeodesicPath::Spd(g) => evd(&g.point_matrix(t)),
            GeodesicPath::Spsd(c) => {
                let core = evd(&c.core(t))?;
                let vectors = c.basis(t) * core.vectors();
                Ok(EigenDecomposition::from_unsorted(core.values().clone(), vectors))
            }
        }
    }
}

/// Uniform grid of `n_t` points on [0, 1].
pub fn uniform_grid(n_t: usize) -> Result<Vec<f64>> {
    if n_t < 2 {
        return Err(Error::GridTooCoarse {
            needed: 2,
            got: n_t,
        });
    }
    let last = (n_t - 1) as f64;
    Ok((0..n_t).map(|i| i as f64 / last).collect())
}

/// Top K+1 eigenvalues of γ(tᵢ) along a uniform grid. Column 0 of every row
/// is the trivial top eigenvalue: it is stored but left out of commonality
/// scoring.
#[derive(Clone, Debug)]
pub struct FlowDiagram {
    grid: Vec<f64>,
    values: Vec<Vec<f64>>,
    vectors: Option<Vec<DMatrix<f64>>>,
    geometry: Geometry,
    order: usize,
    warnings: Vec<String>,
}

impl FlowDiagram {
    /// Assembles a diagram from precomputed spectra (used for fixtures and
    /// deserialized data). Rows of `values` must be descending and positive.
    pub fn from_parts(
        grid: Vec<f64>,
        values: Vec<Vec<f64>>,
        vectors: Option<Vec<DMatrix<f64>>>,
        geometry: Geometry,
        order: usize,
    ) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::GridTooCoarse {
                needed: 2,
                got: grid.len(),
            });
        }
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(values.len(), grid.len()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] != 0.0 || grid[grid.len() - 1] != 1.0 {
            return Err(Error::InvalidParameter("grid must increase strictly from 0 to 1".into()));
        }
        let width = values[0].len();
        for row in &values {
            if row.len() != width {
                return Err(Error::DimensionMismatch(row.len(), width));
            }
            if row.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(Error::NonFinite("diagram eigenvalues must be positive"));
            }
            if row.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::InvalidParameter("diagram rows must be descending".into()));
            }
        }
        if let Some(vs) = &vectors {
            if vs.len() != grid.len() || vs.iter().any(|v| v.ncols() != width || v.nrows() != order) {
                return Err(Error::InvalidParameter("eigenvector blocks do not match the diagram".into()));
            }
        }
        let mut d = FlowDiagram {
            grid,
            values,
            vectors,
            geometry,
            order,
            warnings: Vec::new(),
        };
        d.check_reference_multiplicity();
        Ok(d)
    }

    fn check_reference_multiplicity(&mut self) {
        let row = &self.values[0];
        for k in 1..row.len().saturating_sub(1) {
            if row[k] - row[k + 1] < 1e-10 * row[k] {
                self.warnings.push(format!(
                    "eigenvalues {} and {} coincide at t=0; reference order follows the eigenvector sign convention",
                    k,
                    k + 1
                ));
            }
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Row i holds the K+1 leading eigenvalues at grid point i.
    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// n × (K+1) eigenvector blocks, one per grid point, when kept.
    pub fn vectors(&self) -> Option<&[DMatrix<f64>]> {
        self.vectors.as_deref()
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Order n of the kernels.
    pub fn order(&self) -> usize {
        self.order
    }

    /// K: number of non-trivial components per point.
    pub fn components(&self) -> usize {
        self.values[0].len() - 1
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the flagged trivial eigenvalue in every row.
    pub fn trivial_index(&self) -> usize {
        0
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Drops the stored eigenvectors.
    pub fn without_vectors(mut self) -> Self {
        self.vectors = None;
        self
    }
}

/// Spectra of γ(tᵢ) for a uniform grid of `n_t` points, keeping the top
/// `k + 1` eigenpairs.
pub fn compute_evfd(
    k1: &Endpoint,
    k2: &Endpoint,
    n_t: usize,
    k: usize,
    keep_vectors: bool,
) -> Result<FlowDiagram> {
    let path = GeodesicPath::new(k1, k2)?;
    evfd_on_path(&path, n_t, k, keep_vectors)
}

pub fn evfd_on_path(path: &GeodesicPath, n_t: usize, k: usize, keep_vectors: bool) -> Result<FlowDiagram> {
    evfd_visiting(path, n_t, k, keep_vectors, |_| Ok(()))
}

/// [`evfd_on_path`], handing each full eigendecomposition to `visit`
/// before it is truncated.
pub fn evfd_visiting(
    path: &GeodesicPath,
    n_t: usize,
    k: usize,
    keep_vectors: bool,
    mut visit: impl FnMut(&EigenDecomposition) -> Result<()>,
) -> Result<FlowDiagram> {
    let grid = uniform_grid(n_t)?;
    if k + 1 > path.spectrum_len() {
        return Err(Error::RankTooHigh {
            requested: k + 1,
            available: path.spectrum_len(),
        });
    }
    let mut values = Vec::with_capacity(n_t);
    let mut vectors = Vec::with_capacity(if keep_vectors { n_t } else { 0 });
    for &t in &grid {
        let full = path.eig(t)?;
        visit(&full)?;
        let e = full.truncated(k + 1);
        values.push(e.values().iter().copied().collect());
        if keep_vectors {
            vectors.push(e.vectors().clone());
        }
    }
    FlowDiagram::from_parts(
        grid,
        values,
        keep_vectors.then_some(vectors),
        path.geometry(),
        path.order(),
    )
}
