//! One PASS/FAIL line per acceptance criterion, with the measured numbers.
//! Exits non-zero only if a criterion panics; FAIL lines are reported, not
//! hidden.

mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use common::*;
use evflow::baselines::{alternating_product, linear_interpolation_matrix, smoothness_score, SmoothnessQuery};
use evflow::diffusion::build_kernel;
use evflow::evfd::{compute_evfd, endpoints, uniform_grid, Endpoint, FlowDiagram, GeodesicPath, Geometry, GeometryChoice};
use evflow::graph::{verify_graph, StudyConfig};
use evflow::io::write_csv;
use evflow::pipeline::{compute, run_pipeline, EpsilonPolicy, RunConfig};
use evflow::spd::{evd, geodesic_point, spsd_geodesic_point, SpdKernel, SpsdKernel, SymMatrix};
use evflow::synthetic::{
    analytic_flat_eigenvalue, gen_flat_2d, gen_flat_three, gen_strip_1d, predicted_kernel_eigenvalue, ScaleSet,
};
use evflow::tracking::{track_trajectories, TrackingParams};

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(id: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    println!(
        "{} {id:>2} {name}: {} ({:.1} s)",
        if o.passed { "PASS" } else { "FAIL" },
        o.detail,
        start.elapsed().as_secs_f64()
    );
    o.passed
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("evflow-acc-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn geodesic_correctness() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let (mut endpoint, mut symmetry, mut congruence, mut commuting) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = r.gen_range(2..=20);
        let t: f64 = r.gen();
        let (a, b) = (random_spd(&mut r, n), random_spd(&mut r, n));
        let g0 = geodesic_point(&a, &b, 0.0).unwrap();
        let g1 = geodesic_point(&a, &b, 1.0).unwrap();
        endpoint = endpoint
            .max(rel_err(g0.matrix().matrix(), a.matrix().matrix()))
            .max(rel_err(g1.matrix().matrix(), b.matrix().matrix()));
        let fwd = geodesic_point(&a, &b, t).unwrap();
        let back = geodesic_point(&b, &a, 1.0 - t).unwrap();
        symmetry = symmetry.max(rel_err(fwd.matrix().matrix(), back.matrix().matrix()));

        let scales: Vec<f64> = (0..n).map(|i| 0.5 + 1.5 * i as f64 / n as f64).collect();
        let g = orthogonal(&mut r, n) * DMatrix::from_diagonal(&DVector::from_vec(scales)) * orthogonal(&mut r, n);
        let congr = |k: &SpdKernel| {
            SpdKernel::new(SymMatrix::symmetrized(&g * k.matrix().matrix() * g.transpose()).unwrap()).unwrap()
        };
        let lhs = geodesic_point(&congr(&a), &congr(&b), t).unwrap();
        let rhs = &g * fwd.matrix().matrix() * g.transpose();
        congruence = congruence.max(rel_err(lhs.matrix().matrix(), &rhs));

        let v = orthogonal(&mut r, n);
        let (s1, s2) = (spectrum(&mut r, n), spectrum(&mut r, n));
        let c1 = SpdKernel::new(with_basis(&v, &s1)).unwrap();
        let c2 = SpdKernel::new(with_basis(&v, &s2)).unwrap();
        let gc = geodesic_point(&c1, &c2, t).unwrap();
        let mut want: Vec<f64> = s1.iter().zip(&s2).map(|(x, y)| x.powf(1.0 - t) * y.powf(t)).collect();
        want.sort_by(|x, y| y.total_cmp(x));
        for (got, w) in gc.eig().values().iter().zip(&want) {
            commuting = commuting.max((got - w).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        passed: endpoint <= 1e-9 && symmetry <= 1e-9 && congruence <= 1e-9 && commuting <= 1e-10 && secs < 5.0,
        detail: format!(
            "100 pairs: endpoint {endpoint:.1e}, symmetry {symmetry:.1e}, congruence {congruence:.1e}, commuting eigenvalues {commuting:.1e}, {secs:.2} s"
        ),
    }
}

fn log_linearity() -> Outcome {
    let mut r = rng(2);
    let mut deviation = 0.0f64;
    for _ in 0..20 {
        let n = r.gen_range(4..=20);
        let v = orthogonal(&mut r, n);
        let (s1, s2) = (spectrum(&mut r, n), spectrum(&mut r, n));
        let a = Endpoint::Spd(SpdKernel::new(with_basis(&v, &s1)).unwrap());
        let b = Endpoint::Spd(SpdKernel::new(with_basis(&v, &s2)).unwrap());
        let d = compute_evfd(&a, &b, 21, n - 1, false).unwrap();
        for (row, &t) in d.values().iter().zip(d.grid()) {
            let mut want: Vec<f64> = s1.iter().zip(&s2).map(|(x, y)| (1.0 - t) * x.ln() + t * y.ln()).collect();
            want.sort_by(|x, y| y.total_cmp(x));
            for (mu, w) in row.iter().zip(&want) {
                deviation = deviation.max((mu.ln() - w).abs());
            }
        }
    }

    // Near-common: V₂ = orth(V₁ + εE) with ‖E‖ = 1.
    let n = 10;
    let mut slopes = Vec::new();
    for trial in 0..5 {
        let mut r = rng(100 + trial);
        let v1 = orthogonal(&mut r, n);
        let mut e = gaussian(&mut r, n, n);
        e /= e.norm();
        let s1: Vec<f64> = (0..n).map(|k| (-0.4 * k as f64).exp()).collect();
        let s2: Vec<f64> = (0..n).map(|k| (-0.7 * k as f64).exp()).collect();
        let k1 = SpdKernel::new(with_basis(&v1, &s1)).unwrap();
        let eps = [1e-4, 1e-3, 1e-2];
        let res: Vec<f64> = eps
            .iter()
            .map(|&ep| {
                let v2 = (&v1 + &e * ep).qr().q();
                // Keep column signs aligned with V₁.
                let mut v2 = v2;
                for j in 0..n {
                    if v2.column(j).dot(&v1.column(j)) < 0.0 {
                        v2.column_mut(j).neg_mut();
                    }
                }
                let k2 = SpdKernel::new(with_basis(&v2, &s2)).unwrap();
                let g = geodesic_point(&k1, &k2, 0.5).unwrap();
                (0..3)
                    .map(|k| {
                        let vk = v1.column(k).clone_owned();
                        let target = s1[k].sqrt() * s2[k].sqrt();
                        (g.matrix().matrix() * &vk - vk * target).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = res.iter().map(|e| e.ln()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        slopes.push(slope);
    }
    let worst = slopes.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    Outcome {
        passed: deviation <= 1e-9 && worst <= 0.2,
        detail: format!(
            "max log-linear deviation {deviation:.1e}; near-common residual slopes {:?}",
            slopes.iter().map(|s| (s * 1000.0).round() / 1000.0).collect::<Vec<_>>()
        ),
    }
}

fn flat_run(dir: &Path, scales: &ScaleSet, seed: u64) -> (RunConfig, Vec<f64>) {
    let (a, b, lat) = gen_flat_2d(1000, scales, seed).unwrap();
    write_csv(&dir.join("a.csv"), a.rows(), None).unwrap();
    write_csv(&dir.join("b.csv"), b.rows(), None).unwrap();
    let mut cfg = RunConfig::new(vec![dir.join("a.csv"), dir.join("b.csv")], dir.join("out"));
    cfg.epsilon = EpsilonPolicy::Fixed(vec![0.3, 0.3]);
    cfg.n_t = 200;
    cfg.k = 20;
    cfg.ell = 1;
    cfg.baseline_ad = false;
    cfg.baseline_linear = false;
    (cfg, lat.x)
}

/// Relative error of the leading 5 non-trivial eigenvalues of a diagram
/// row against the sorted analytic spectrum of an ℓa × ℓb rectangle.
fn overlay_error(row: &[f64], la: f64, lb: f64, eps: f64) -> f64 {
    let mut lambda: Vec<f64> = (0..8)
        .flat_map(|i| (0..8).map(move |j| (i, j)))
        .filter(|&(i, j)| i + j > 0)
        .map(|(i, j)| analytic_flat_eigenvalue(la, lb, i, j))
        .collect();
    lambda.sort_by(f64::total_cmp);
    (0..5)
        .map(|k| {
            let want = predicted_kernel_eigenvalue(lambda[k], eps).unwrap();
            (row[k + 1] - want).abs() / want
        })
        .fold(0.0, f64::max)
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn flat_suite() -> Outcome {
    let start = Instant::now();
    let dir = scratch("flat");
    let sym_scales = ScaleSet::uniform(2.0).unwrap();
    let (cfg, x) = flat_run(&dir, &sym_scales, 1);
    let sym = compute(&cfg).unwrap();
    let values = sym.diagram.values();
    let overlay = overlay_error(&values[0], 2.0, 2.0, 0.3).max(overlay_error(&values[values.len() - 1], 2.0, 2.0, 0.3));
    let t_sym = sym.t_star();
    let rho = pearson(&sym.embedding.column(0), &x);

    let noisy_scales = ScaleSet::new(2.0, 2.0, 30.0, 20.0).unwrap();
    let (cfg, _) = flat_run(&dir, &noisy_scales, 1);
    let noisy = compute(&cfg).unwrap();
    let t_noisy = noisy.t_star();
    let secs = start.elapsed().as_secs_f64();

    let ok_sym = t_sym.is_some_and(|t| (t - 0.5).abs() <= 0.05);
    let ok_noisy = t_noisy.is_some_and(|t| (t - 0.6).abs() <= 0.07);
    Outcome {
        passed: overlay <= 0.05 && ok_sym && ok_noisy && rho.abs() >= 0.9 && secs < 120.0,
        detail: format!(
            "boundary overlay max rel err {overlay:.3}; symmetric t* = {} [{}]; (30,20) t* = {} [{}], want 0.6 ± 0.07; |rho(embedding, x)| = {:.3}; both runs {secs:.0} s (limit 120 s)",
            t_sym.map_or("none".into(), |t| format!("{t:.3}")),
            if ok_sym { "ok" } else { "off" },
            t_noisy.map_or("none".into(), |t| format!("{t:.3}")),
            if ok_noisy { "ok" } else { "off" },
            rho.abs()
        ),
    }
}

/// Least-squares c through the origin for log μₖ = −c·k², k = 1..9, and
/// the centred R².
fn weyl_r2(values: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = (1..=9).map(|k| ((k * k) as f64, values[k].ln())).collect();
    let c = -pts.iter().map(|(x, y)| x * y).sum::<f64>() / pts.iter().map(|(x, _)| x * x).sum::<f64>();
    let mean = pts.iter().map(|p| p.1).sum::<f64>() / 9.0;
    let ss_res: f64 = pts.iter().map(|(x, y)| (y + c * x).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|(_, y)| (y - mean).powi(2)).sum();
    1.0 - ss_res / ss_tot
}

fn weyl_contrast() -> Outcome {
    let (a, b, _) = gen_strip_1d(500, 1.0, 5.0, 0).unwrap();
    let eps = 0.01;
    let (k1, k2) = (build_kernel(&a, eps).unwrap(), build_kernel(&b, eps).unwrap());
    let (e1, e2) = endpoints(&k1.k, &k2.k, GeometryChoice::Auto).unwrap();
    let path = GeodesicPath::new(&e1, &e2).unwrap();
    let g = path.eig(0.4).unwrap();
    let l = evd(&linear_interpolation_matrix(&k1.k, &k2.k, 0.4).unwrap()).unwrap();
    let gv: Vec<f64> = g.values().iter().copied().collect();
    let lv: Vec<f64> = l.values().iter().copied().collect();
    let (rg, rl) = (weyl_r2(&gv), weyl_r2(&lv));
    Outcome {
        passed: rg >= 0.99 && rl < rg,
        detail: format!("R^2 gamma(0.4) = {rg:.4}, R^2 L(0.4) = {rl:.4} (n = 500, epsilon = {eps})"),
    }
}

fn graph_oracle() -> Outcome {
    let start = Instant::now();
    let report = verify_graph(&StudyConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let names = [
        "analytic_spectrum",
        "c_common_entry",
        "b_block_structure",
        "mean_c_diagonal",
        "tail_bounds",
        "gamma_recast",
    ];
    let failed: Vec<&str> = names.iter().copied().filter(|n| !report.check(n).is_some_and(|c| c.passed)).collect();
    let mean = &report.check("mean_c_diagonal").unwrap().detail;
    Outcome {
        passed: failed.is_empty() && secs < 60.0,
        detail: format!(
            "failed checks {:?}; diag(C) max z large-m formula {:.2}, finite-m form {:.2}; C(32,32) = {}; {secs:.1} s (limit 60 s)",
            failed,
            mean["max_z_formula"].as_f64().unwrap_or(f64::NAN),
            mean["max_z_finite_m"].as_f64().unwrap_or(f64::NAN),
            report.check("c_common_entry").unwrap().detail["value"]
        ),
    }
}

fn ad_equivalence() -> Outcome {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let n = r.gen_range(2..=15);
        let v = orthogonal(&mut r, n);
        let a = SpdKernel::new(with_basis(&v, &spectrum(&mut r, n))).unwrap();
        let b = SpdKernel::new(with_basis(&v, &spectrum(&mut r, n))).unwrap();
        let (s1, s2) = (r.gen_range(1..5u32), r.gen_range(1..5u32));
        let ad = alternating_product(&a, &b, s1, s2).unwrap();
        let g = geodesic_point(&a, &b, s2 as f64 / (s1 + s2) as f64).unwrap();
        worst = worst.max(rel_err(&ad, g.matrix().matrix()));
    }
    Outcome {
        passed: worst <= 1e-8,
        detail: format!("30 commuting instances, max relative gap {worst:.1e}"),
    }
}

fn tracking() -> Outcome {
    // Two trajectories whose log-eigenvalues cross at t = 0.065 and 0.875,
    // with eigenvectors slowly rotating in their plane.
    let grid = uniform_grid(101).unwrap();
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    for &t in &grid {
        let la = -1.0;
        let lb = -1.0 + 2.0 * (t - 0.065) * (t - 0.875);
        let th = 0.3 * t;
        let va = DVector::from_vec(vec![0.0, th.cos(), th.sin(), 0.0]);
        let vb = DVector::from_vec(vec![0.0, -th.sin(), th.cos(), 0.0]);
        let (first, second) = if lb > la { ((lb, vb), (la, va)) } else { ((la, va), (lb, vb)) };
        values.push(vec![1.0, first.0.exp(), second.0.exp()]);
        let mut m = DMatrix::zeros(4, 3);
        m[(0, 0)] = 1.0;
        m.set_column(1, &first.1);
        m.set_column(2, &second.1);
        vectors.push(m);
    }
    let d = FlowDiagram::from_parts(grid.clone(), values, Some(vectors), Geometry::Spd, 4).unwrap();
    let traj = track_trajectories(&d, &TrackingParams::default()).unwrap();
    let swapped: Vec<f64> = grid
        .iter()
        .zip(traj.perms())
        .filter(|(_, p)| p[0] != 0)
        .map(|(&t, _)| t)
        .collect();
    let schedule_ok = swapped.first().is_some_and(|&t| (t - 0.07).abs() < 1e-9)
        && swapped.last().is_some_and(|&t| (t - 0.87).abs() < 1e-9)
        && swapped.len() == 81;

    let mut r = rng(7);
    let k = SpdKernel::new(with_basis(&orthogonal(&mut r, 8), &spectrum(&mut r, 8))).unwrap();
    let e = Endpoint::Spd(k);
    let constant = compute_evfd(&e, &e, 25, 5, true).unwrap();
    let id: Vec<usize> = (0..5).collect();
    let ident_ok = track_trajectories(&constant, &TrackingParams::default())
        .unwrap()
        .perms()
        .iter()
        .all(|p| *p == id);
    Outcome {
        passed: schedule_ok && ident_ok,
        detail: format!(
            "swapped on t in [{:.2}, {:.2}] ({} points), identity on constant diagram: {ident_ok}",
            swapped.first().copied().unwrap_or(f64::NAN),
            swapped.last().copied().unwrap_or(f64::NAN),
            swapped.len()
        ),
    }
}

fn spsd_path() -> Outcome {
    let mut r = rng(8);
    let (n, p) = (30, 6);
    let core = |r: &mut rand_chacha::ChaCha8Rng| {
        let q = orthogonal(r, p);
        with_basis(&q, &spectrum(r, p))
    };
    let basis = |r: &mut rand_chacha::ChaCha8Rng| orthogonal(r, n).columns(0, p).into_owned();
    let (mut rank_ok, mut endpoint, mut shared) = (true, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let a = SpsdKernel::new(basis(&mut r), core(&mut r)).unwrap();
        let b = SpsdKernel::new(basis(&mut r), core(&mut r)).unwrap();
        for &t in &uniform_grid(21).unwrap() {
            let g = spsd_geodesic_point(&a, &b, t).unwrap().to_dense();
            let e = evd(&g).unwrap();
            let top = e.values()[0];
            rank_ok &= e.values().iter().filter(|&&v| v > 1e-10 * top).count() == p;
        }
        let g0 = spsd_geodesic_point(&a, &b, 0.0).unwrap().to_dense();
        let g1 = spsd_geodesic_point(&a, &b, 1.0).unwrap().to_dense();
        endpoint = endpoint
            .max(rel_err(g0.matrix(), a.to_dense().matrix()))
            .max(rel_err(g1.matrix(), b.to_dense().matrix()));

        let u = basis(&mut r);
        let (ca, cb) = (core(&mut r), core(&mut r));
        let a = SpsdKernel::new(u.clone(), ca.clone()).unwrap();
        let b = SpsdKernel::new(u.clone(), cb.clone()).unwrap();
        let (ka, kb) = (SpdKernel::new(ca).unwrap(), SpdKernel::new(cb).unwrap());
        for t in [0.25, 0.5, 0.8] {
            let curve = spsd_geodesic_point(&a, &b, t).unwrap().to_dense();
            let want = &u * geodesic_point(&ka, &kb, t).unwrap().matrix().matrix() * u.transpose();
            shared = shared.max(rel_err(curve.matrix(), &want));
        }
    }
    Outcome {
        passed: rank_ok && endpoint <= 1e-8 && shared <= 1e-8,
        detail: format!("rank kept at every grid point: {rank_ok}; endpoint err {endpoint:.1e}; shared-range err {shared:.1e}"),
    }
}

fn smoothness() -> Outcome {
    let mut r = rng(9);
    let n = 12;
    let k = random_spd(&mut r, n);
    let q = SmoothnessQuery::Vector(DVector::from_column_slice(gaussian(&mut r, n, 1).as_slice()));
    let s: Vec<f64> = (0..=n).map(|l| smoothness_score(&k, &q, l).unwrap()).collect();
    let full = s[n] == 1.0;
    let monotone = s.windows(2).all(|w| w[0] <= w[1]);
    let j = 4;
    let v = k.eig().vectors().column(j).clone_owned();
    let ev = SmoothnessQuery::Vector(v.clone());
    let mut eig_err = 0.0f64;
    for l in 0..=n {
        let want = if l > j { 1.0 } else { 0.0 };
        eig_err = eig_err.max((smoothness_score(&k, &ev, l).unwrap() - want).abs());
    }
    let orth = SmoothnessQuery::Vector(k.eig().vectors().column(n - 1).clone_owned());
    let orth_score = smoothness_score(&k, &orth, n - 1).unwrap();
    Outcome {
        passed: full && monotone && eig_err <= 1e-12 && orth_score <= 1e-12,
        detail: format!(
            "S^n = {}; monotone {monotone}; eigenvector query err {eig_err:.1e}; orthogonal query score {orth_score:.1e}",
            s[n]
        ),
    }
}

fn determinism() -> Outcome {
    let dir = scratch("det");
    let (a, b, lat) = gen_flat_2d(200, &ScaleSet::new(2.0, 2.0, 8.0, 4.0).unwrap(), 11).unwrap();
    write_csv(&dir.join("a.csv"), a.rows(), None).unwrap();
    write_csv(&dir.join("b.csv"), b.rows(), None).unwrap();
    let x = DMatrix::from_column_slice(lat.x.len(), 1, &lat.x);
    write_csv(&dir.join("x.csv"), &x, Some(&["x"])).unwrap();
    let (views, _) = gen_flat_three(80, 12).unwrap();
    for (i, v) in views.iter().enumerate() {
        write_csv(&dir.join(format!("v{i}.csv")), v.rows(), None).unwrap();
    }

    let mut configs = Vec::new();
    let mut base = RunConfig::new(vec![dir.join("a.csv"), dir.join("b.csv")], dir.join("dispersion"));
    base.n_t = 60;
    base.target = Some(dir.join("x.csv"));
    configs.push(base.clone());
    let mut arc = base.clone();
    arc.estimator = evflow::cmr::Estimator::Arclength;
    arc.geometry = GeometryChoice::Spsd(Some(40));
    arc.output = dir.join("arclength");
    configs.push(arc);
    let mut three = RunConfig::new((0..3).map(|i| dir.join(format!("v{i}.csv"))).collect(), dir.join("three"));
    three.epsilon = EpsilonPolicy::Fixed(vec![0.05; 3]);
    three.n_t = 21;
    three.k = 4;
    three.hull_grid = 3;
    configs.push(three);

    let mut compared = 0;
    let mut differing = Vec::new();
    for cfg in &configs {
        run_pipeline(cfg).unwrap();
        let files: Vec<PathBuf> = {
            let mut f: Vec<PathBuf> = fs::read_dir(&cfg.output).unwrap().map(|e| e.unwrap().path()).collect();
            f.sort();
            f
        };
        let first: Vec<Vec<u8>> = files.iter().map(|f| fs::read(f).unwrap()).collect();
        run_pipeline(cfg).unwrap();
        for (f, bytes) in files.iter().zip(&first) {
            compared += 1;
            if &fs::read(f).unwrap() != bytes {
                differing.push(f.display().to_string());
            }
        }
    }
    Outcome {
        passed: differing.is_empty(),
        detail: format!("{} configs, {compared} files compared, differing: {differing:?}", configs.len()),
    }
}

fn main() {
    let results = [
        report(1, "geodesic correctness", geodesic_correctness),
        report(2, "log-linearity", log_linearity),
        report(3, "flat-manifold suite", flat_suite),
        report(4, "Weyl's-law contrast", weyl_contrast),
        report(5, "graph oracle", graph_oracle),
        report(6, "AD equivalence", ad_equivalence),
        report(7, "tracking", tracking),
        report(8, "SPSD path", spsd_path),
        report(9, "smoothness metric", smoothness),
        report(10, "determinism", determinism),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
}
