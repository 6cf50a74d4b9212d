//! Eigenvalue flow diagrams along the affine-invariant geodesic between two
//! diffusion kernels.
//!
//! Two aligned measurements of the same samples each give a diffusion
//! kernel. Walking the SPD geodesic between them and following the spectrum
//! of every intermediate kernel separates eigenvectors shared by both
//! measurements (their eigenvalues move log-linearly) from those tied to a
//! single measurement (suppressed in the middle of the path). The crate
//! builds the kernels, the flow diagram, trajectory tracking, commonality
//! scores and the common-manifold embedding, along with synthetic
//! generators and an exact cycle-graph model for verification.

pub mod baselines;
pub mod cmr;
pub mod diffusion;
pub mod embedding;
pub mod error;
pub mod evfd;
pub mod graph;
pub mod io;
pub mod pipeline;
pub mod spd;
pub mod svg;
pub mod synthetic;
pub mod tracking;

pub use error::{Error, Result};
