//! Exact model on products of cycle graphs.
//!
//! Two product graphs G_x × G_y and G_x × G_z share the ring G_x, and G_z is
//! G_y relabelled by a permutation π. Every spectral quantity along the
//! geodesic between their kernels has a closed form or a cheap exact
//! computation, which makes this the reference oracle for the EVFD code.
//!
//! Vertex and spectral indices are 1-based in the public functions, to match
//! r(x, y) = (x − 1)m + y.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::spd::{evd, EigenDecomposition, SpdKernel, SymMatrix};

/// Ring of odd order N with K = A/2, A having 1 on the diagonal and ½ on the
/// two neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleKernel {
    order: usize,
}

impl CycleKernel {
    pub fn new(order: usize) -> Result<Self> {
        if order < 3 || order % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "cycle order must be odd and at least 3, got {order}"
            )));
        }
        Ok(CycleKernel { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn affinity(&self) -> DMatrix<f64> {
        let n = self.order;
        let mut a = DMatrix::identity(n, n);
        for i in 0..n {
            a[(i, (i + 1) % n)] = 0.5;
            a[((i + 1) % n, i)] = 0.5;
        }
        a
    }

    pub fn kernel(&self) -> DMatrix<f64> {
        self.affinity() / 2.0
    }

    /// ½(1 + cos(2π(k − 1)/N)).
    pub fn eigenvalue(&self, k: usize) -> f64 {
        0.5 * (1.0 + (TAU * (k - 1) as f64 / self.order as f64).cos())
    }

    /// v^k(x) = α(k)√(1/N) cos(2π(k − 1)(x − 1)/N + φ(k, N)).
    pub fn eigenvector_entry(&self, k: usize, x: usize) -> f64 {
        let n = self.order as f64;
        let alpha = if k == 1 { 1.0 } else { 2f64.sqrt() };
        let phi = 0.5 * PI * (k / ((self.order + 1) / 2 + 1)) as f64;
        alpha * (1.0 / n).sqrt() * (TAU * ((k - 1) * (x - 1)) as f64 / n + phi).cos()
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        DVector::from_fn(self.order, |k, _| self.eigenvalue(k + 1))
    }

    /// Column k − 1 holds v^k.
    pub fn eigenvectors(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.order, self.order, |x, k| self.eigenvector_entry(k + 1, x + 1))
    }
}

/// r(x, y) = (x − 1)m + y.
pub fn index_map(x: usize, y: usize, n: usize, m: usize) -> Result<usize> {
    if x == 0 || x > n {
        return Err(Error::IndexOutOfRange { index: x, size: n });
    }
    if y == 0 || y > m {
        return Err(Error::IndexOutOfRange { index: y, size: m });
    }
    Ok((x - 1) * m + y)
}

/// Inverse of [`index_map`]: x = 1 + ⌊(r − 1)/m⌋, y = 1 + (r − 1) mod m.
pub fn vertex_of(r: usize, n: usize, m: usize) -> Result<(usize, usize)> {
    if r == 0 || r > n * m {
        return Err(Error::IndexOutOfRange { index: r, size: n * m });
    }
    Ok((1 + (r - 1) / m, 1 + (r - 1) % m))
}

/// K_xy = (A_x ⊗ I_m + I_n ⊗ A_y)/4 for two rings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductKernel {
    pub x: CycleKernel,
    pub y: CycleKernel,
}

impl ProductKernel {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        Ok(ProductKernel {
            x: CycleKernel::new(n)?,
            y: CycleKernel::new(m)?,
        })
    }

    pub fn n(&self) -> usize {
        self.x.order()
    }

    pub fn m(&self) -> usize {
        self.y.order()
    }

    pub fn size(&self) -> usize {
        self.n() * self.m()
    }

    pub fn kernel(&self) -> DMatrix<f64> {
        let (n, m) = (self.n(), self.m());
        let ax = self.x.affinity();
        let ay = self.y.affinity();
        let sum = ax.kronecker(&DMatrix::identity(m, m)) + DMatrix::identity(n, n).kronecker(&ay);
        sum / 4.0
    }

    /// μ^{(k,l)} = ½(μ_x^k + μ_y^l), listed in r(k, l) order (not sorted).
    pub fn analytic_values(&self) -> DVector<f64> {
        let m = self.m();
        DVector::from_fn(self.size(), |r, _| {
            let (k, l) = (1 + r / m, 1 + r % m);
            0.5 * (self.x.eigenvalue(k) + self.y.eigenvalue(l))
        })
    }

    /// v^{(k,l)}(r) = v_x^k(x(r)) v_y^l(y(r)), column r(k, l) − 1.
    pub fn analytic_vectors(&self) -> DMatrix<f64> {
        self.x.eigenvectors().kronecker(&self.y.eigenvectors())
    }

    /// K_xz = Π K_xy Πᵀ.
    pub fn permuted_kernel(&self, pi: &GraphPermutation) -> Result<DMatrix<f64>> {
        let lift = pi.lift(self.n());
        if lift.nrows() != self.size() {
            return Err(Error::DimensionMismatch(lift.nrows(), self.size()));
        }
        Ok(&lift * self.kernel() * lift.transpose())
    }
}

/// A bijection of {1, …, m} stored 0-based: `image[y]` = π(y).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphPermutation {
    image: Vec<usize>,
}

impl GraphPermutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let m = image.len();
        let mut seen = vec![false; m];
        for &v in &image {
            if v >= m || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        Ok(GraphPermutation { image })
    }

    pub fn identity(m: usize) -> Self {
        GraphPermutation {
            image: (0..m).collect(),
        }
    }

    /// Uniform draw; trial i of a study uses stream i of the seed.
    pub fn random(m: usize, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut image: Vec<usize> = (0..m).collect();
        image.shuffle(&mut rng);
        GraphPermutation { image }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// P_π with P[π(y), y] = 1.
    pub fn matrix(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut p = DMatrix::zeros(m, m);
        for (y, &z) in self.image.iter().enumerate() {
            p[(z, y)] = 1.0;
        }
        p
    }

    /// Π = I_n ⊗ P_π.
    pub fn lift(&self, n: usize) -> DMatrix<f64> {
        DMatrix::identity(n, n).kronecker(&self.matrix())
    }
}

/// The matrices of the five-step construction of γ(t).
#[derive(Clone, Debug)]
pub struct BcmChain {
    /// Analytic eigenvectors V of K_xy in r order.
    pub v: DMatrix<f64>,
    /// Diagonal of S in r order.
    pub s: DVector<f64>,
    /// B = VᵀΠV.
    pub b: DMatrix<f64>,
    /// C = BSBᵀ.
    pub c: DMatrix<f64>,
    /// C_S = S^{-1/2} C S^{-1/2}.
    pub c_s: DMatrix<f64>,
}

pub fn bcm_chain(pk: &ProductKernel, pi: &GraphPermutation) -> Result<BcmChain> {
    if pi.len() != pk.m() {
        return Err(Error::DimensionMismatch(pi.len(), pk.m()));
    }
    let v = pk.analytic_vectors();
    let s = pk.analytic_values();
    let b = v.transpose() * pi.lift(pk.n()) * &v;
    let c = &b * DMatrix::from_diagonal(&s) * b.transpose();
    let c_s = scale_sym(&c, &s.map(|x| 1.0 / x.sqrt()));
    Ok(BcmChain { v, s, b, c, c_s })
}

fn scale_sym(m: &DMatrix<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| d[i] * m[(i, j)] * d[j])
}

fn sym_power(m: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    let e = evd(&SymMatrix::symmetrized(m.clone())?)?;
    if e.values().iter().any(|&v| v <= 0.0) {
        return Err(Error::NotPositiveDefinite {
            value: e.values().min(),
            floor: 0.0,
        });
    }
    Ok(e.apply(|v| v.powf(t)))
}

impl BcmChain {
    /// F_t = S^{1/2} C_Sᵗ S^{1/2}.
    pub fn flow_matrix(&self, t: f64) -> Result<DMatrix<f64>> {
        Ok(scale_sym(&sym_power(&self.c_s, t)?, &self.s.map(f64::sqrt)))
    }

    /// γ(t) = V F_t Vᵀ.
    pub fn gamma(&self, t: f64) -> Result<DMatrix<f64>> {
        Ok(&self.v * self.flow_matrix(t)? * self.v.transpose())
    }
}

/// The m × m block b = V_yᵀ P_π V_y repeated along the diagonal of B.
pub fn block_b(y: &CycleKernel, pi: &GraphPermutation) -> Result<DMatrix<f64>> {
    if pi.len() != y.order() {
        return Err(Error::DimensionMismatch(pi.len(), y.order()));
    }
    let vy = y.eigenvectors();
    Ok(vy.transpose() * pi.matrix() * vy)
}

/// c̄(r) = ½ + ¼cos(2π(x(r) − 1)/n) + ¼δ(y(r), 1), the large-m mean of
/// diag(C) over uniform permutations.
pub fn mean_c_diagonal(n: usize, m: usize, r: usize) -> Result<f64> {
    let (x, y) = vertex_of(r, n, m)?;
    let common = if y == 1 { 0.25 } else { 0.0 };
    Ok(0.5 + 0.25 * (TAU * (x - 1) as f64 / n as f64).cos() + common)
}

/// The exact mean of diag(C) for finite m. Off the common rows the
/// squared block entries average 1/(m − 1) over the m − 1 non-constant
/// modes, giving ¼ + ¼cos(2π(x − 1)/n) + ¼(m − 2)/(m − 1).
pub fn mean_c_diagonal_exact(n: usize, m: usize, r: usize) -> Result<f64> {
    let (x, y) = vertex_of(r, n, m)?;
    let cx = (TAU * (x - 1) as f64 / n as f64).cos();
    if y == 1 {
        return Ok(0.75 + 0.25 * cx);
    }
    Ok(0.25 + 0.25 * cx + 0.25 * (m as f64 - 2.0) / (m as f64 - 1.0))
}

/// F̄_t(r, r) = c̄(r)ᵗ (μ^{(x(r),y(r))})^{1−t}.
pub fn mean_flow_eigenvalue(n: usize, m: usize, r: usize, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} is outside [0, 1]")));
    }
    let pk = ProductKernel::new(n, m)?;
    let (x, y) = vertex_of(r, n, m)?;
    let mu = 0.5 * (pk.x.eigenvalue(x) + pk.y.eigenvalue(y));
    Ok(mean_c_diagonal(n, m, r)?.powf(t) * mu.powf(1.0 - t))
}

/// Squared diffusion distance Σ_r S_γ(r)^{2s}(V(p₁, r) − V(p₂, r))² split
/// into the part over `common` spectral indices and the rest. Indices are
/// 1-based: vertices p₁, p₂ and spectral positions in descending order.
pub fn diffusion_distance_decomposition(
    gamma_t: &SpdKernel,
    steps: u32,
    p1: usize,
    p2: usize,
    common: &[usize],
) -> Result<(f64, f64)> {
    let eig = gamma_t.eig();
    let n = gamma_t.order();
    for &p in [p1, p2].iter().chain(common) {
        if p == 0 || p > n {
            return Err(Error::IndexOutOfRange { index: p, size: n });
        }
    }
    let mut in_common = vec![false; n];
    for &c in common {
        in_common[c - 1] = true;
    }
    let (mut dc, mut dnc) = (0.0, 0.0);
    for r in 0..n {
        let w = eig.values()[r].powi(2 * steps as i32);
        let diff = eig.vectors()[(p1 - 1, r)] - eig.vectors()[(p2 - 1, r)];
        if in_common[r] {
            dc += w * diff * diff;
        } else {
            dnc += w * diff * diff;
        }
    }
    Ok((dc, dnc))
}

/// Spectral positions (1-based, descending order) whose eigenvector puts
/// more than half its energy on the common modes v^{(k,1)}.
pub fn common_indices(eig: &EigenDecomposition, pk: &ProductKernel) -> Vec<usize> {
    let v = pk.analytic_vectors();
    let m = pk.m();
    let common: Vec<usize> = (0..pk.n()).map(|k| k * m).collect();
    (0..eig.len())
        .filter(|&r| {
            let col = eig.vectors().column(r);
            let energy: f64 = common.iter().map(|&c| v.column(c).dot(&col).powi(2)).sum();
            energy > 0.5
        })
        .map(|r| r + 1)
        .collect()
}

/// Monte-Carlo study settings.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub alphas: Vec<f64>,
    /// Grid used for the Jensen-gap scan.
    pub t_grid: Vec<f64>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            n: 11,
            m: 31,
            trials: 2000,
            seed: 0,
            alphas: vec![0.1, 0.2, 0.5],
            t_grid: (1..10).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

/// Outcome of one proposition check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Value,
}

/// All checks of a study.
#[derive(Clone, Debug)]
pub struct GraphReport {
    pub config: StudyConfig,
    pub checks: Vec<Check>,
}

impl GraphReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.config.n,
            "m": self.config.m,
            "trials": self.config.trials,
            "seed": self.config.seed,
            "all_passed": self.all_passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "passed": c.passed,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Per-trial quantities that only depend on the m × m block.
struct Trial {
    b: DMatrix<f64>,
    /// b D_y bᵀ; C restricted to block k is ½μ_x^k I + ½ of this.
    q: DMatrix<f64>,
}

fn trial(y: &CycleKernel, dy: &DMatrix<f64>, cfg: &StudyConfig, i: usize) -> Result<Trial> {
    let pi = GraphPermutation::random(cfg.m, cfg.seed, i as u64);
    let b = block_b(y, &pi)?;
    let q = &b * dy * b.transpose();
    Ok(Trial { b, q })
}

/// Runs every proposition check on the given instance.
pub fn verify_graph(cfg: &StudyConfig) -> Result<GraphReport> {
    let pk = ProductKernel::new(cfg.n, cfg.m)?;
    if cfg.trials < 2 {
        return Err(Error::InvalidParameter("need at least two trials".into()));
    }
    let (n, m) = (cfg.n, cfg.m);
    let mut checks = Vec::new();

    // Analytic spectrum against a numerical EVD of the assembled kernel.
    let k = pk.kernel();
    let numeric = evd(&SymMatrix::new(k.clone())?)?;
    let mut analytic: Vec<f64> = pk.analytic_values().iter().copied().collect();
    analytic.sort_by(|a, b| b.total_cmp(a));
    let value_err = analytic
        .iter()
        .zip(numeric.values().iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let v = pk.analytic_vectors();
    let s = pk.analytic_values();
    let vector_err = (&k * &v - &v * DMatrix::from_diagonal(&s)).amax();
    let ortho_err = (v.transpose() * &v - DMatrix::identity(n * m, n * m)).amax();
    checks.push(Check {
        name: "analytic_spectrum",
        passed: value_err < 1e-9 && vector_err < 1e-9 && ortho_err < 1e-9,
        detail: json!({ "eigenvalue_error": value_err, "eigenvector_residual": vector_err, "orthonormality_error": ortho_err }),
    });

    // One random permutation through the full chain.
    let pi = GraphPermutation::random(m, cfg.seed, u64::MAX);
    let chain = bcm_chain(&pk, &pi)?;
    let b0 = block_b(&pk.y, &pi)?;
    let block_err = (&chain.b - DMatrix::identity(n, n).kronecker(&b0)).amax();
    let mut edge = (b0[(0, 0)] - 1.0).abs();
    for l in 1..m {
        edge = edge.max(b0[(0, l)].abs()).max(b0[(l, 0)].abs());
    }
    checks.push(Check {
        name: "b_block_structure",
        passed: block_err < 1e-12 && edge < 1e-12,
        detail: json!({ "block_error": block_err, "first_row_column_error": edge }),
    });

    let r32 = index_map(2, 1, n, m)?;
    let c32 = chain.c[(r32 - 1, r32 - 1)];
    let c32_formula = 0.75 + 0.25 * (TAU / n as f64).cos();
    checks.push(Check {
        name: "c_common_entry",
        passed: (c32 - c32_formula).abs() < 1e-3,
        detail: json!({ "r": r32, "value": c32, "formula": c32_formula }),
    });

    let kxy = SpdKernel::new(SymMatrix::new(k)?)?;
    let kxz = SpdKernel::new(SymMatrix::symmetrized(pk.permuted_kernel(&pi)?)?)?;
    let mut recast_err: f64 = 0.0;
    for &t in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        let direct = crate::spd::geodesic_point(&kxy, &kxz, t)?;
        recast_err = recast_err.max((chain.gamma(t)? - direct.matrix().matrix()).amax());
    }
    checks.push(Check {
        name: "gamma_recast",
        passed: recast_err < 1e-8,
        detail: json!({ "max_abs_error": recast_err }),
    });

    // Monte Carlo over permutations, reduced to the m × m block.
    let dy = DMatrix::from_diagonal(&pk.y.eigenvalues());
    let trials: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| trial(&pk.y, &dy, cfg, i))
        .collect::<Result<_>>()?;
    let nt = cfg.trials as f64;

    // diag(C)(r) = ½μ_x^{x(r)} + ½q(y(r), y(r)).
    let mut mean_q = vec![0.0; m];
    let mut sq_q = vec![0.0; m];
    for tr in &trials {
        for l in 0..m {
            mean_q[l] += tr.q[(l, l)];
            sq_q[l] += tr.q[(l, l)].powi(2);
        }
    }
    let mut worst_paper: f64 = 0.0;
    let mut worst_exact: f64 = 0.0;
    let mut rows = Vec::new();
    for r in 1..=n * m {
        let (x, y) = vertex_of(r, n, m)?;
        let mq = mean_q[y - 1] / nt;
        let var = (sq_q[y - 1] / nt - mq * mq).max(0.0) * nt / (nt - 1.0);
        let mean = 0.5 * pk.x.eigenvalue(x) + 0.5 * mq;
        let se = (0.5 * (var / nt).sqrt()).max(1e-12);
        let zp = (mean - mean_c_diagonal(n, m, r)?).abs() / se;
        let ze = (mean - mean_c_diagonal_exact(n, m, r)?).abs() / se;
        worst_paper = worst_paper.max(zp);
        worst_exact = worst_exact.max(ze);
        if x == 1 {
            rows.push(json!({ "y": y, "mean": mean, "se": se, "z_formula": zp, "z_exact": ze }));
        }
    }
    checks.push(Check {
        name: "mean_c_diagonal",
        passed: worst_paper <= 3.0,
        detail: json!({
            "max_z_formula": worst_paper,
            "max_z_finite_m": worst_exact,
            "finite_m_within_3_se": worst_exact <= 3.0,
            "first_block": rows,
        }),
    });

    // Tail bounds: b entries with l, l' > 1 and off-diagonal C entries.
    let mut tails = Vec::new();
    let mut tails_ok = true;
    for &alpha in &cfg.alphas {
        let mut worst_b: f64 = 0.0;
        let mut worst_c: f64 = 0.0;
        for l in 0..m {
            for lp in 0..m {
                if l == lp && l == 0 {
                    continue;
                }
                if l > 0 && lp > 0 {
                    let hits = trials.iter().filter(|tr| tr.b[(l, lp)].abs() >= alpha).count();
                    worst_b = worst_b.max(hits as f64 / nt);
                }
                if l != lp {
                    let hits = trials.iter().filter(|tr| (0.5 * tr.q[(l, lp)]).abs() >= alpha).count();
                    worst_c = worst_c.max(hits as f64 / nt);
                }
            }
        }
        let bound_b = (2.0 / m as f64).sqrt() / alpha;
        let bound_c = (1.0 / (32.0 * (m as f64 - 1.0))).sqrt() / alpha;
        tails_ok &= worst_b <= bound_b && worst_c <= bound_c;
        tails.push(json!({
            "alpha": alpha,
            "b_frequency": worst_b, "b_bound": bound_b,
            "c_frequency": worst_c, "c_bound": bound_c,
        }));
    }
    checks.push(Check {
        name: "tail_bounds",
        passed: tails_ok,
        detail: Value::Array(tails),
    });

    // Jensen gap against the exact mean, block by block (C_S is block
    // diagonal with block k equal to S_k^{-1/2} C_k S_k^{-1/2}).
    let mut gaps = Vec::new();
    let mut gap_max: f64 = 0.0;
    for &t in &cfg.t_grid {
        let (mut num, mut den) = (0.0, 0.0);
        for kx in 1..=n {
            let sk = DVector::from_fn(m, |l, _| 0.5 * (pk.x.eigenvalue(kx) + pk.y.eigenvalue(l + 1)));
            let inv = sk.map(|v| 1.0 / v.sqrt());
            let mut acc = DMatrix::zeros(m, m);
            for tr in &trials {
                let ck = DMatrix::identity(m, m) * (0.5 * pk.x.eigenvalue(kx)) + &tr.q * 0.5;
                acc += sym_power(&scale_sym(&ck, &inv), t)?;
            }
            acc /= nt;
            let bar = DMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    let r = (kx - 1) * m + i + 1;
                    (mean_c_diagonal_exact(n, m, r).unwrap() / sk[i]).powf(t)
                } else {
                    0.0
                }
            });
            num += (&bar - acc).norm_squared();
            den += bar.norm_squared();
        }
        let gap = num / den;
        gap_max = gap_max.max(gap);
        gaps.push(json!({ "t": t, "gap": gap }));
    }
    checks.push(Check {
        name: "jensen_gap",
        passed: gap_max < 0.05,
        detail: json!({ "max": gap_max, "curve": gaps }),
    });

    Ok(GraphReport {
        config: cfg.clone(),
        checks,
    })
}
