//! Simulation generators with closed-form spectral predictions.
//!
//! Randomness is counter based: sample i draws from a ChaCha stream keyed
//! by (seed, i), so generation can run in parallel and still reproduce bit
//! for bit.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::diffusion::Dataset;
use crate::error::{Error, Result};
use crate::spd::{geodesic_point, SpdKernel};

/// The manifold a latent coordinate lives on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LatentManifold {
    Interval { lo: f64, hi: f64 },
    /// Angles in [0, 2π).
    Circle,
}

impl LatentManifold {
    pub const CENTERED: LatentManifold = LatentManifold::Interval { lo: -0.5, hi: 0.5 };
    pub const UNIT: LatentManifold = LatentManifold::Interval { lo: 0.0, hi: 1.0 };

    fn sample(self, rng: &mut impl Rng) -> f64 {
        match self {
            LatentManifold::Interval { lo, hi } => rng.gen_range(lo..hi),
            LatentManifold::Circle => rng.gen_range(0.0..TAU),
        }
    }

    pub fn contains(self, v: f64) -> bool {
        match self {
            LatentManifold::Interval { lo, hi } => (lo..=hi).contains(&v),
            LatentManifold::Circle => (0.0..=TAU).contains(&v),
        }
    }
}

/// Hidden per-sample coordinates: x is shared, y and z belong to one view
/// each.
#[derive(Clone, Debug, PartialEq)]
pub struct LatentTriple {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub manifold: LatentManifold,
    pub seed: u64,
}

impl LatentTriple {
    /// n i.i.d. uniform samples per coordinate.
    pub fn sample(n: usize, manifold: LatentManifold, seed: u64) -> Result<Self> {
        let cols = sample_columns(n, 3, manifold, seed)?;
        let mut it = cols.into_iter();
        Ok(LatentTriple {
            x: it.next().unwrap(),
            y: it.next().unwrap(),
            z: it.next().unwrap(),
            manifold,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

fn sample_columns(n: usize, d: usize, manifold: LatentManifold, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {n}")));
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            (0..d).map(|_| manifold.sample(&mut rng)).collect()
        })
        .collect();
    Ok((0..d).map(|c| rows.iter().map(|r| r[c]).collect()).collect())
}

fn dataset(cols: &[Vec<f64>]) -> Result<Dataset> {
    let n = cols[0].len();
    Dataset::new(DMatrix::from_fn(n, cols.len(), |i, c| cols[c][i]))
}

/// Scales of the two linear flat views: view 1 is (ℓx¹x, ℓy¹y), view 2 is
/// (ℓx²x, ℓz²z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleSet {
    pub lx1: f64,
    pub lx2: f64,
    pub ly1: f64,
    pub lz2: f64,
}

impl ScaleSet {
    pub fn new(lx1: f64, lx2: f64, ly1: f64, lz2: f64) -> Result<Self> {
        let s = ScaleSet { lx1, lx2, ly1, lz2 };
        for v in [lx1, lx2, ly1, lz2] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveScale(v));
            }
        }
        Ok(s)
    }

    pub fn uniform(l: f64) -> Result<Self> {
        ScaleSet::new(l, l, l, l)
    }
}

/// Both linear views of a given latent sample.
pub fn linear_views(lat: &LatentTriple, s: &ScaleSet) -> Result<(Dataset, Dataset)> {
    let scale = |v: &[f64], l: f64| v.iter().map(|a| a * l).collect::<Vec<_>>();
    let v1 = dataset(&[scale(&lat.x, s.lx1), scale(&lat.y, s.ly1)])?;
    let v2 = dataset(&[scale(&lat.x, s.lx2), scale(&lat.z, s.lz2)])?;
    Ok((v1, v2))
}

/// Two flat 2D views sharing x, latents uniform on [−1/2, 1/2].
pub fn gen_flat_2d(n: usize, scales: &ScaleSet, seed: u64) -> Result<(Dataset, Dataset, LatentTriple)> {
    let lat = LatentTriple::sample(n, LatentManifold::CENTERED, seed)?;
    let (a, b) = linear_views(&lat, scales)?;
    Ok((a, b, lat))
}

/// One-dimensional strip measured at two scales: s⁽ᵛ⁾ = ℓ⁽ᵛ⁾x.
pub fn gen_strip_1d(n: usize, l1: f64, l2: f64, seed: u64) -> Result<(Dataset, Dataset, Vec<f64>)> {
    for l in [l1, l2] {
        if !(l > 0.0) {
            return Err(Error::NonPositiveScale(l));
        }
    }
    let x = sample_columns(n, 1, LatentManifold::CENTERED, seed)?.remove(0);
    let a = dataset(&[x.iter().map(|v| v * l1).collect()])?;
    let b = dataset(&[x.iter().map(|v| v * l2).collect()])?;
    Ok((a, b, x))
}

/// Three flat views (x, y), (x, z), (x, w) for the three-kernel hull.
pub fn gen_flat_three(n: usize, seed: u64) -> Result<([Dataset; 3], Vec<f64>)> {
    let cols = sample_columns(n, 4, LatentManifold::CENTERED, seed)?;
    let views = [
        dataset(&[cols[0].clone(), cols[1].clone()])?,
        dataset(&[cols[0].clone(), cols[2].clone()])?,
        dataset(&[cols[0].clone(), cols[3].clone()])?,
    ];
    Ok((views, cols[0].clone()))
}

/// Which angle of the torus carries the shared variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommonAngle {
    Poloidal,
    Toroidal,
}

/// Major and minor radii of one torus view.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusRadii {
    pub major: f64,
    pub minor: f64,
}

impl TorusRadii {
    fn validate(self) -> Result<Self> {
        for v in [self.major, self.minor] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveScale(v));
            }
        }
        Ok(self)
    }
}

fn torus_point(r: TorusRadii, poloidal: f64, toroidal: f64) -> [f64; 3] {
    let ring = r.major + r.minor * poloidal.cos();
    [ring * toroidal.cos(), ring * toroidal.sin(), r.minor * poloidal.sin()]
}

/// Two tori in ℝ³ sharing the angle x; y and z are the view-specific angles.
pub fn gen_torus(
    n: usize,
    view1: TorusRadii,
    view2: TorusRadii,
    common: CommonAngle,
    seed: u64,
) -> Result<(Dataset, Dataset, LatentTriple)> {
    let (r1, r2) = (view1.validate()?, view2.validate()?);
    let lat = LatentTriple::sample(n, LatentManifold::Circle, seed)?;
    let build = |r: TorusRadii, own: &[f64]| {
        let pts: Vec<[f64; 3]> = (0..n)
            .map(|i| match common {
                CommonAngle::Poloidal => torus_point(r, lat.x[i], own[i]),
                CommonAngle::Toroidal => torus_point(r, own[i], lat.x[i]),
            })
            .collect();
        Dataset::new(DMatrix::from_fn(n, 3, |i, c| pts[i][c]))
    };
    let a = build(r1, &lat.y)?;
    let b = build(r2, &lat.z)?;
    Ok((a, b, lat))
}

/// The two warped second views.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Warp {
    /// (ℓx²x, ℓz²(1 − √z)): warps the view-specific coordinate.
    H1,
    /// (ℓx¹(1 − √x), ℓz²z): warps the shared coordinate.
    H2,
}

fn sqrt_warp(v: f64) -> Result<f64> {
    if v < 0.0 {
        return Err(Error::DomainError(v));
    }
    Ok(1.0 - v.sqrt())
}

/// Second view under a square-root warp; latents must lie in [0, 1].
pub fn nonlinear_measurement(lat: &LatentTriple, which: Warp, s: &ScaleSet) -> Result<Dataset> {
    let n = lat.len();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let (x, z) = (lat.x[i], lat.z[i]);
        match which {
            Warp::H1 => {
                a.push(s.lx2 * x);
                b.push(s.lz2 * sqrt_warp(z)?);
            }
            Warp::H2 => {
                a.push(s.lx1 * sqrt_warp(x)?);
                b.push(s.lz2 * z);
            }
        }
    }
    dataset(&[a, b])
}

/// Neumann Laplacian eigenvalue of the rectangle [0, ℓx] × [0, ℓy].
pub fn analytic_flat_eigenvalue(lx: f64, ly: f64, kx: usize, ky: usize) -> f64 {
    (kx as f64 * PI / lx).powi(2) + (ky as f64 * PI / ly).powi(2)
}

/// Laplacian eigenvalue on a product of circles of radii `minor` and
/// `major`. Index k counts the real Fourier pair cos/sin, so frequency
/// ⌊k/2⌋ appears twice.
pub fn analytic_torus_eigenvalue(minor: f64, major: f64, kx: usize, ky: usize) -> f64 {
    let fx = (kx / 2) as f64;
    let fy = (ky / 2) as f64;
    (fx / minor).powi(2) + (fy / major).powi(2)
}

/// μ = exp(−ε²λ/4) with ε the bandwidth.
pub fn continuous_to_discrete_eig(lambda: f64, epsilon: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("eigenvalue must be ≥ 0, got {lambda}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::NonPositiveScale(epsilon));
    }
    Ok((-epsilon * epsilon * lambda / 4.0).exp())
}

/// The same map written for the affinity scale of exp(−d²/ε), which plays
/// the role of ε².
pub fn predicted_kernel_eigenvalue(lambda: f64, affinity_scale: f64) -> Result<f64> {
    continuous_to_discrete_eig(lambda, affinity_scale.sqrt())
}

/// Predicted kernel eigenvalues of the shared modes kx = 1..=count of a
/// flat view with common extent `lx`.
pub fn flat_common_spectrum(lx: f64, affinity_scale: f64, count: usize) -> Result<Vec<f64>> {
    (1..=count)
        .map(|k| predicted_kernel_eigenvalue(analytic_flat_eigenvalue(lx, 1.0, k, 0), affinity_scale))
        .collect()
}

/// ℓ⁽ᵗ⁾ = √(ℓ̄¹ℓ̄² / ((1 − t)ℓ̄¹ + tℓ̄²)) with ℓ̄ᵛ = ℓxᵛ/εᵛ.
pub fn effective_length(lx: (f64, f64), epsilon: (f64, f64), t: f64) -> Result<f64> {
    for v in [lx.0, lx.1, epsilon.0, epsilon.1] {
        if !(v > 0.0) {
            return Err(Error::NonPositiveScale(v));
        }
    }
    let b1 = lx.0 / epsilon.0;
    let b2 = lx.1 / epsilon.1;
    Ok((b1 * b2 / ((1.0 - t) * b1 + t * b2)).sqrt())
}

/// γ₁,₂,₃(t₁, t₂): the geodesic from γ₁→₂(t₁) toward K₃.
pub fn convex_hull_point(k1: &SpdKernel, k2: &SpdKernel, k3: &SpdKernel, t1: f64, t2: f64) -> Result<SpdKernel> {
    let base = geodesic_point(k1, k2, t1)?;
    geodesic_point(&base, k3, t2)
}
