//! Trajectory tracking across an eigenvalue crossing. Two components trade
//! places twice; the tracker recovers which diagram column each one
//! occupies.
//!
//! cargo run --release --example tracking

use nalgebra::{DMatrix, DVector};

use evflow::evfd::{uniform_grid, FlowDiagram, Geometry};
use evflow::tracking::{track_trajectories, TrackingParams};

fn main() -> evflow::Result<()> {
    let grid = uniform_grid(41)?;
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    for &t in &grid {
        // log μ_b − log μ_a changes sign at t = 0.2 and t = 0.8.
        let (la, lb) = (-1.0, -1.0 + 2.0 * (t - 0.2) * (t - 0.8));
        let th = 0.2 * t;
        let va = DVector::from_vec(vec![0.0, th.cos(), th.sin(), 0.0]);
        let vb = DVector::from_vec(vec![0.0, -th.sin(), th.cos(), 0.0]);
        let (hi, lo) = if lb > la { ((lb, vb), (la, va)) } else { ((la, va), (lb, vb)) };
        values.push(vec![1.0, hi.0.exp(), lo.0.exp()]);
        let mut m = DMatrix::zeros(4, 3);
        m[(0, 0)] = 1.0;
        m.set_column(1, &hi.1);
        m.set_column(2, &lo.1);
        vectors.push(m);
    }
    let diagram = FlowDiagram::from_parts(grid.clone(), values, Some(vectors), Geometry::Spd, 4)?;
    let traj = track_trajectories(&diagram, &TrackingParams::default())?;
    for (i, &t) in grid.iter().enumerate().step_by(4) {
        println!(
            "t = {t:4.2}  trajectory a in column {}, b in column {}",
            traj.column(i, 0),
            traj.column(i, 1)
        );
    }
    Ok(())
}
