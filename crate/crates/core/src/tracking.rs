//! Resolving eigenvalue trajectories across crossings.
//!
//! Hidden states are windows of L consecutive permutations. A permutation
//! maps each trajectory (identified by its rank at t = 0) to its rank at the
//! current grid point. Transitions may change at most two adjacent-rank
//! swaps across the window, and the observation likelihood is the mean
//! absolute overlap between the eigenvectors assigned to each trajectory at
//! the two ends of the window. The most likely sequence is found by a beam
//! search over reachable states.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::evfd::FlowDiagram;

/// Tracking hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackingParams {
    /// Window length L (permutations per state).
    pub window: usize,
    /// Probability of one swap across a window.
    pub p1: f64,
    /// Probability of two swaps across a window.
    pub p2: f64,
    pub beam_width: usize,
}

impl Default for TrackingParams {
    fn default() -> Self {
        TrackingParams {
            window: 3,
            p1: 0.05,
            p2: 0.01,
            beam_width: 64,
        }
    }
}

impl TrackingParams {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidParameter(format!(
                "tracking window must be at least 2, got {}",
                self.window
            )));
        }
        if !(self.p1 > 0.0 && self.p2 > 0.0 && self.p1 + self.p2 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need p1, p2 > 0 and p1 + p2 < 1, got {} and {}",
                self.p1, self.p2
            )));
        }
        if self.beam_width == 0 {
            return Err(Error::InvalidParameter("beam width must be positive".into()));
        }
        Ok(())
    }
}

/// A bijection on trajectory indices: `perm[k]` is the rank of trajectory k.
pub type Permutation = Vec<usize>;

/// Number of transpositions separating two permutations: N − #cycles(a⁻¹b).
pub fn swap_distance(a: &[usize], b: &[usize]) -> usize {
    let n = a.len();
    let mut inv = vec![0; n];
    for (k, &r) in a.iter().enumerate() {
        inv[r] = k;
    }
    // σ = a⁻¹ ∘ b as a map on trajectory indices.
    let sigma: Vec<usize> = b.iter().map(|&r| inv[r]).collect();
    let mut seen = vec![false; n];
    let mut cycles = 0;
    for s in 0..n {
        if !seen[s] {
            cycles += 1;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = sigma[x];
            }
        }
    }
    n - cycles
}

/// Per-grid-point permutations of the non-trivial components.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySet {
    perms: Vec<Permutation>,
}

impl TrajectorySet {
    pub fn new(perms: Vec<Permutation>) -> Result<Self> {
        let n = perms.first().map_or(0, Vec::len);
        for p in &perms {
            let mut seen = vec![false; n];
            if p.len() != n || p.iter().any(|&r| r >= n || std::mem::replace(&mut seen[r], true)) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        Ok(TrajectorySet { perms })
    }

    /// Identity at every one of `n_t` points.
    pub fn identity(n_t: usize, n_e: usize) -> Self {
        TrajectorySet {
            perms: vec![(0..n_e).collect(); n_t],
        }
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn trajectories(&self) -> usize {
        self.perms.first().map_or(0, Vec::len)
    }

    /// Diagram column (1-based, skipping the trivial one) of trajectory k at
    /// grid point i.
    pub fn column(&self, i: usize, k: usize) -> usize {
        self.perms[i][k] + 1
    }

    /// μ̃ᵢᵏ = μ at grid point i of trajectory k.
    pub fn follow(&self, diagram: &FlowDiagram, k: usize) -> Vec<f64> {
        (0..diagram.len())
            .map(|i| diagram.values()[i][self.column(i, k)])
            .collect()
    }
}

#[derive(Clone)]
struct State {
    window: Vec<usize>, // ids into the permutation table
    score: f64,
    parent: usize,
}

/// Most likely permutation sequence for the diagram's non-trivial components.
pub fn track_trajectories(diagram: &FlowDiagram, params: &TrackingParams) -> Result<TrajectorySet> {
    params.validate()?;
    let vectors = diagram.vectors().ok_or(Error::VectorsMissing)?;
    let n_e = diagram.components();
    let n_t = diagram.len();
    if n_e == 0 {
        return Ok(TrajectorySet::identity(n_t, 0));
    }
    let ln_stay = (1.0 - params.p1 - params.p2).ln();
    let ln_one = params.p1.ln();
    let ln_two = params.p2.ln();

    // Permutations are interned so states compare by small integer ids.
    let mut table: Vec<Permutation> = vec![(0..n_e).collect()];
    let mut index: HashMap<Permutation, usize> = HashMap::new();
    index.insert(table[0].clone(), 0);

    let moves = candidate_moves(n_e);
    let mut beams: Vec<Vec<State>> = vec![vec![State {
        window: vec![0; params.window],
        score: 0.0,
        parent: usize::MAX,
    }]];

    for i in 1..n_t {
        let anchor = (i + 1).saturating_sub(params.window);
        let overlap = overlaps(&vectors[anchor], &vectors[i], n_e);
        let mut best: HashMap<Vec<usize>, State> = HashMap::new();
        for (si, s) in beams[i - 1].iter().enumerate() {
            let last = table[s.window[params.window - 1]].clone();
            let first = &table[s.window[0]].clone();
            for mv in &moves {
                let cand = apply_move(&last, mv);
                let ln_p = match swap_distance(first, &cand) {
                    0 => ln_stay,
                    1 => ln_one,
                    2 => ln_two,
                    _ => continue,
                };
                let id = *index.entry(cand.clone()).or_insert_with(|| {
                    table.push(cand.clone());
                    table.len() - 1
                });
                let mut window = s.window[1..].to_vec();
                window.push(id);
                let head = &table[window[0]];
                let lik: f64 = (0..n_e).map(|k| overlap[(head[k], cand[k])]).sum::<f64>() / n_e as f64;
                if !(lik > 0.0) {
                    continue;
                }
                let score = s.score + ln_p + lik.ln();
                let keep = match best.get(&window) {
                    Some(prev) => score > prev.score,
                    None => true,
                };
                if keep {
                    best.insert(
                        window.clone(),
                        State {
                            window,
                            score,
                            parent: si,
                        },
                    );
                }
            }
        }
        if best.is_empty() {
            return Err(Error::BeamExhausted(i));
        }
        let mut next: Vec<State> = best.into_values().collect();
        next.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.window.cmp(&b.window)));
        next.truncate(params.beam_width);
        beams.push(next);
    }

    let mut perms = vec![Vec::new(); n_t];
    let mut at = 0usize; // beams are sorted, the best final state is first
    for i in (0..n_t).rev() {
        let s = &beams[i][at];
        perms[i] = table[s.window[params.window - 1]].clone();
        at = s.parent;
    }
    TrajectorySet::new(perms)
}

/// |⟨v_a^r, v_b^s⟩| over the non-trivial columns.
fn overlaps(a: &DMatrix<f64>, b: &DMatrix<f64>, n_e: usize) -> DMatrix<f64> {
    let va = a.columns(1, n_e);
    let vb = b.columns(1, n_e);
    (va.transpose() * vb).map(f64::abs)
}

/// Rank transpositions to apply: none, one adjacent pair, or two.
fn candidate_moves(n_e: usize) -> Vec<Vec<usize>> {
    let mut moves = vec![vec![]];
    for j in 0..n_e.saturating_sub(1) {
        moves.push(vec![j]);
    }
    for j in 0..n_e.saturating_sub(1) {
        for l in j + 1..n_e.saturating_sub(1) {
            moves.push(vec![j, l]);
        }
    }
    moves
}

/// Swaps the ranks (j, j+1) for each j in `mv`, in order.
fn apply_move(perm: &[usize], mv: &[usize]) -> Permutation {
    let mut p = perm.to_vec();
    for &j in mv {
        for r in p.iter_mut() {
            if *r == j {
                *r = j + 1;
            } else if *r == j + 1 {
                *r = j;
            }
        }
    }
    p
}
