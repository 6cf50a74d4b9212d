//! End-to-end run: aligned CSV inputs to kernels, flow diagram, tracking,
//! commonality, embedding, baselines, and the files written for a run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::baselines::{
    alternating_diffusion_kernel, linear_interpolation_matrix, smoothness_from_eig, SmoothnessQuery,
};
use crate::cmr::{
    cmr_curve, commonality_arclength, common_embedding, dispersion_for_diagram, PathProduct,
    CommonalityReport, EmbeddingMode, Estimator, Scores, DEFAULT_THRESHOLD,
};
use crate::diffusion::{build_kernel, median_scale, Dataset, KernelBundle};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::evfd::{endpoints, evfd_visiting, FlowDiagram, GeodesicPath, Geometry, GeometryChoice};
use crate::io::{fmt17, load_aligned_csv, parse_key_values, read_csv_matrix, write_csv};
use crate::spd::evd;
use crate::svg::emit_diagram_svg;
use crate::synthetic::convex_hull_point;
use crate::tracking::{track_trajectories, TrackingParams, TrajectorySet};

/// Kernel scale per view.
#[derive(Clone, Debug, PartialEq)]
pub enum EpsilonPolicy {
    Median,
    Fixed(Vec<f64>),
}

/// Everything a run needs. Parsed from flat `key = value` text.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub epsilon: EpsilonPolicy,
    pub n_t: usize,
    pub k: usize,
    pub geometry: GeometryChoice,
    pub tracking: TrackingParams,
    pub track: bool,
    pub estimator: Estimator,
    pub threshold: f64,
    pub embedding: EmbeddingMode,
    pub ell: usize,
    pub baseline_linear: bool,
    pub baseline_ad: bool,
    pub ad_steps: u32,
    /// Optional n × d target for the smoothness table.
    pub target: Option<PathBuf>,
    pub metric_ell: usize,
    pub seed: u64,
    pub output: PathBuf,
    /// Points per axis of the (t₁, t₂) grid when there are three inputs.
    pub hull_grid: usize,
}

impl RunConfig {
    /// Defaults for everything but the inputs and the output directory.
    pub fn new(inputs: Vec<PathBuf>, output: PathBuf) -> Self {
        RunConfig {
            inputs,
            epsilon: EpsilonPolicy::Median,
            n_t: 200,
            k: 10,
            geometry: GeometryChoice::Auto,
            tracking: TrackingParams::default(),
            track: true,
            estimator: Estimator::Dispersion,
            threshold: DEFAULT_THRESHOLD,
            embedding: EmbeddingMode::TopEll,
            ell: 2,
            baseline_linear: true,
            baseline_ad: true,
            ad_steps: 1,
            target: None,
            metric_ell: 5,
            seed: 0,
            output,
            hull_grid: 5,
        }
    }

    /// Parses config text. Relative paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = RunConfig::new(Vec::new(), PathBuf::new());
        let mut have_output = false;
        let mut rank: Option<usize> = None;
        let mut geometry = "auto".to_string();
        for (key, value) in parse_key_values(text)? {
            let v = value.as_str();
            match key.as_str() {
                "inputs" => {
                    cfg.inputs = list(v).map(|p| base.join(p)).collect();
                }
                "epsilon" => {
                    cfg.epsilon = if v == "median" {
                        EpsilonPolicy::Median
                    } else {
                        EpsilonPolicy::Fixed(list(v).map(|x| num(&key, x)).collect::<Result<_>>()?)
                    }
                }
                "n_t" => cfg.n_t = num(&key, v)?,
                "k" => cfg.k = num(&key, v)?,
                "geometry" => geometry = v.to_string(),
                "rank" => rank = Some(num(&key, v)?),
                "tracking_window" => cfg.tracking.window = num(&key, v)?,
                "tracking_p1" => cfg.tracking.p1 = num(&key, v)?,
                "tracking_p2" => cfg.tracking.p2 = num(&key, v)?,
                "tracking_beam" => cfg.tracking.beam_width = num(&key, v)?,
                "track" => cfg.track = flag(&key, v)?,
                "estimator" => {
                    cfg.estimator = match v {
                        "dispersion" => Estimator::Dispersion,
                        "arclength" => Estimator::Arclength,
                        _ => return Err(bad(&key, v)),
                    }
                }
                "threshold" => cfg.threshold = num(&key, v)?,
                "embedding" => {
                    cfg.embedding = match v {
                        "top" => EmbeddingMode::TopEll,
                        "common" => EmbeddingMode::CommonOnly,
                        _ => return Err(bad(&key, v)),
                    }
                }
                "ell" => cfg.ell = num(&key, v)?,
                "baseline_linear" => cfg.baseline_linear = flag(&key, v)?,
                "baseline_ad" => cfg.baseline_ad = flag(&key, v)?,
                "ad_steps" => cfg.ad_steps = num(&key, v)?,
                "target" => cfg.target = Some(base.join(v)),
                "metric_ell" => cfg.metric_ell = num(&key, v)?,
                "seed" => cfg.seed = num(&key, v)?,
                "output" => {
                    cfg.output = base.join(v);
                    have_output = true;
                }
                "hull_grid" => cfg.hull_grid = num(&key, v)?,
                _ => return Err(Error::Config(format!("unknown key `{key}`"))),
            }
        }
        cfg.geometry = match (geometry.as_str(), rank) {
            ("auto", None) => GeometryChoice::Auto,
            ("spd", None) => GeometryChoice::Spd,
            ("spsd", p) => GeometryChoice::Spsd(p),
            ("auto" | "spd", Some(_)) => {
                return Err(Error::Config("`rank` only applies to geometry = spsd".into()))
            }
            (g, _) => return Err(bad("geometry", g)),
        };
        if !have_output {
            return Err(Error::Config("missing key `output`".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let base = std::path::absolute(dir)?;
        RunConfig::parse(&text, &base)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(2..=3).contains(&self.inputs.len()) {
            return fail(format!("need 2 or 3 inputs, got {}", self.inputs.len()));
        }
        if let EpsilonPolicy::Fixed(e) = &self.epsilon {
            if e.len() != self.inputs.len() {
                return fail(format!("{} epsilon values for {} inputs", e.len(), self.inputs.len()));
            }
            if e.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return fail("epsilon values must be positive".into());
            }
        }
        if self.n_t < 3 {
            return fail(format!("n_t must be at least 3, got {}", self.n_t));
        }
        if self.k == 0 {
            return fail("k must be positive".into());
        }
        if let GeometryChoice::Spsd(Some(p)) = self.geometry {
            if p <= self.k {
                return fail(format!("rank {p} must exceed k = {}", self.k));
            }
        }
        self.tracking.validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return fail(format!("threshold {} not in (0, 1)", self.threshold));
        }
        if self.ell == 0 || self.metric_ell == 0 || self.ad_steps == 0 {
            return fail("ell, metric_ell and ad_steps must be positive".into());
        }
        if self.hull_grid < 2 {
            return fail(format!("hull_grid must be at least 2, got {}", self.hull_grid));
        }
        Ok(())
    }

    /// The config as parseable text with absolute paths.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let paths: Vec<String> = self.inputs.iter().map(|p| p.display().to_string()).collect();
        let _ = writeln!(s, "inputs = {}", paths.join(", "));
        let eps = match &self.epsilon {
            EpsilonPolicy::Median => "median".to_string(),
            EpsilonPolicy::Fixed(v) => v.iter().map(|x| fmt17(*x)).collect::<Vec<_>>().join(", "),
        };
        let _ = writeln!(s, "epsilon = {eps}");
        let _ = writeln!(s, "n_t = {}", self.n_t);
        let _ = writeln!(s, "k = {}", self.k);
        match self.geometry {
            GeometryChoice::Auto => s.push_str("geometry = auto\n"),
            GeometryChoice::Spd => s.push_str("geometry = spd\n"),
            GeometryChoice::Spsd(p) => {
                s.push_str("geometry = spsd\n");
                if let Some(p) = p {
                    let _ = writeln!(s, "rank = {p}");
                }
            }
        }
        let _ = writeln!(s, "tracking_window = {}", self.tracking.window);
        let _ = writeln!(s, "tracking_p1 = {}", fmt17(self.tracking.p1));
        let _ = writeln!(s, "tracking_p2 = {}", fmt17(self.tracking.p2));
        let _ = writeln!(s, "tracking_beam = {}", self.tracking.beam_width);
        let _ = writeln!(s, "track = {}", self.track);
        let _ = writeln!(s, "estimator = {}", self.estimator.name());
        let _ = writeln!(s, "threshold = {}", fmt17(self.threshold));
        let mode = match self.embedding {
            EmbeddingMode::TopEll => "top",
            EmbeddingMode::CommonOnly => "common",
        };
        let _ = writeln!(s, "embedding = {mode}");
        let _ = writeln!(s, "ell = {}", self.ell);
        let _ = writeln!(s, "baseline_linear = {}", self.baseline_linear);
        let _ = writeln!(s, "baseline_ad = {}", self.baseline_ad);
        let _ = writeln!(s, "ad_steps = {}", self.ad_steps);
        if let Some(t) = &self.target {
            let _ = writeln!(s, "target = {}", t.display());
        }
        let _ = writeln!(s, "metric_ell = {}", self.metric_ell);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "output = {}", self.output.display());
        let _ = writeln!(s, "hull_grid = {}", self.hull_grid);
        s
    }
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| bad(key, v))
}

fn flag(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, v)),
    }
}

fn bad(key: &str, v: &str) -> Error {
    Error::Config(format!("invalid value `{v}` for `{key}`"))
}

/// One row of the smoothness table.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub method: &'static str,
    /// Path position, when the method has one.
    pub t: Option<f64>,
    pub ell: usize,
    pub smoothness: f64,
}

/// Leading spectra over the (t₁, t₂) grid of the three-kernel hull.
#[derive(Clone, Debug)]
pub struct HullGrid {
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    /// values[i][j] holds the K+1 leading eigenvalues at (t1[i], t2[j]).
    pub values: Vec<Vec<Vec<f64>>>,
}

/// All results of a run. Timings are kept apart so the written files stay
/// byte-identical between runs.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub config: RunConfig,
    pub epsilons: Vec<f64>,
    pub diagram: FlowDiagram,
    pub trajectories: TrajectorySet,
    /// Scores of every non-trivial column at every grid point.
    pub point_w: Vec<Vec<f64>>,
    /// `None` when the ratio is undefined (every or no component common).
    pub report: Option<CommonalityReport>,
    pub embedding: Embedding,
    pub metrics: Vec<MetricRow>,
    pub hull: Option<HullGrid>,
    pub notes: Vec<String>,
    pub timings: Vec<(&'static str, f64)>,
}

struct Clock {
    start: Instant,
    laps: Vec<(&'static str, f64)>,
}

impl Clock {
    fn new() -> Self {
        Clock {
            start: Instant::now(),
            laps: Vec::new(),
        }
    }

    fn lap(&mut self, stage: &'static str) {
        let now = Instant::now();
        self.laps.push((stage, (now - self.start).as_secs_f64()));
        self.start = now;
    }
}

/// Runs every stage and writes the outputs into `config.output`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport> {
    let report = compute(config)?;
    report.write(&config.output).map_err(Error::at("output"))?;
    Ok(report)
}

/// Runs every stage without writing anything.
pub fn compute(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let mut clock = Clock::new();
    let data = load_aligned_csv(&config.inputs).map_err(Error::at("load"))?;
    let target = match &config.target {
        Some(p) => {
            let m = read_csv_matrix(p).map_err(Error::at("load"))?;
            if m.nrows() != data[0].len() {
                return Err(Error::at("load")(Error::RowCountMismatch(data[0].len(), m.nrows())));
            }
            Some(m)
        }
        None => None,
    };
    clock.lap("load");

    let (bundles, epsilons) = kernels(&data, &config.epsilon).map_err(Error::at("kernel"))?;
    clock.lap("kernel");

    let (e1, e2) = endpoints(&bundles[0].k, &bundles[1].k, config.geometry).map_err(Error::at("geometry"))?;
    let path = GeodesicPath::new(&e1, &e2).map_err(Error::at("geometry"))?;
    // The dispersion basis needs every eigenpair along the path; collect it
    // during the same sweep.
    let mut product = match config.estimator {
        Estimator::Dispersion => Some(PathProduct::new(config.n_t).map_err(Error::at("evfd"))?),
        Estimator::Arclength => None,
    };
    let diagram = evfd_visiting(&path, config.n_t, config.k, true, |e| match product.as_mut() {
        Some(p) => p.push(e),
        None => Ok(()),
    })
    .map_err(Error::at("evfd"))?;
    clock.lap("evfd");

    let trajectories = if config.track {
        track_trajectories(&diagram, &config.tracking).map_err(Error::at("tracking"))?
    } else {
        TrajectorySet::identity(diagram.len(), diagram.components())
    };
    clock.lap("tracking");

    let scores = match config.estimator {
        Estimator::Arclength => Scores::PerTrajectory {
            w: commonality_arclength(&diagram, &trajectories).map_err(Error::at("commonality"))?,
            trajectories: trajectories.clone(),
        },
        Estimator::Dispersion => {
            let product = product.take().expect("collected for the dispersion estimator");
            let basis = product.finish().map_err(Error::at("commonality"))?;
            dispersion_for_diagram(&diagram, &basis).map_err(Error::at("commonality"))?
        }
    };
    let point_w = point_scores(&diagram, &scores);
    let mut notes: Vec<String> = diagram.warnings().to_vec();
    let report = match cmr_curve(&diagram, &scores, config.threshold) {
        Ok(r) => Some(r),
        Err(e @ (Error::AllCommon | Error::AllNonCommon)) => {
            notes.push(format!("t_star undefined: {e}; embedding taken at t = 0.5"));
            None
        }
        Err(e) => return Err(Error::at("commonality")(e)),
    };
    clock.lap("commonality");

    let t_star = report.as_ref().map_or(0.5, |r| r.t_star);
    let gamma = path.eig(t_star).map_err(Error::at("embedding"))?;
    let embedding = match &report {
        Some(r) => common_embedding(&gamma, r, config.ell, config.embedding),
        None => {
            if config.embedding == EmbeddingMode::CommonOnly {
                notes.push("common-only embedding needs t_star; top components used".into());
            }
            let stand_in = CommonalityReport {
                estimator: config.estimator,
                w: Vec::new(),
                curve: Vec::new(),
                hard_curve: Vec::new(),
                point_w: Vec::new(),
                t_star,
                t_star_index: diagram.len() / 2,
                common_set: Vec::new(),
                non_common_set: Vec::new(),
                threshold: config.threshold,
            };
            common_embedding(&gamma, &stand_in, config.ell, EmbeddingMode::TopEll)
        }
    }
    .map_err(Error::at("embedding"))?;
    clock.lap("embedding");

    let mut metrics = Vec::new();
    if let Some(m) = &target {
        let q = SmoothnessQuery::Matrix(m.clone());
        let ell = config.metric_ell;
        let row = |method, t, eig: &crate::spd::EigenDecomposition| -> Result<MetricRow> {
            Ok(MetricRow {
                method,
                t,
                ell,
                smoothness: smoothness_from_eig(eig, &q, ell)?,
            })
        };
        let mut rows = || -> Result<()> {
            metrics.push(row("geodesic", Some(t_star), &gamma)?);
            metrics.push(row("kernel_1", Some(0.0), bundles[0].eig())?);
            metrics.push(row("kernel_2", Some(1.0), bundles[1].eig())?);
            if config.baseline_linear {
                let l = linear_interpolation_matrix(&bundles[0].k, &bundles[1].k, t_star)?;
                metrics.push(row("linear", Some(t_star), &evd(&l)?)?);
            }
            if config.baseline_ad {
                let ad = alternating_diffusion_kernel(&bundles[0], &bundles[1], config.ad_steps, None)?;
                metrics.push(row("alternating_diffusion", None, ad.eig())?);
            }
            Ok(())
        };
        rows().map_err(Error::at("baselines"))?;
    }
    clock.lap("baselines");

    let hull = if bundles.len() == 3 {
        Some(hull_grid(&bundles, config.hull_grid, config.k).map_err(Error::at("hull"))?)
    } else {
        None
    };
    clock.lap("hull");

    Ok(RunReport {
        config: config.clone(),
        epsilons,
        diagram,
        trajectories,
        point_w,
        report,
        embedding,
        metrics,
        hull,
        notes,
        timings: clock.laps,
    })
}

fn kernels(data: &[Dataset], policy: &EpsilonPolicy) -> Result<(Vec<KernelBundle>, Vec<f64>)> {
    let mut bundles = Vec::with_capacity(data.len());
    let mut eps = Vec::with_capacity(data.len());
    for (i, d) in data.iter().enumerate() {
        let e = match policy {
            EpsilonPolicy::Median => median_scale(d)?,
            EpsilonPolicy::Fixed(v) => v[i],
        };
        bundles.push(build_kernel(d, e)?);
        eps.push(e);
    }
    Ok((bundles, eps))
}

fn point_scores(diagram: &FlowDiagram, scores: &Scores) -> Vec<Vec<f64>> {
    match scores {
        Scores::PerPoint(w) => w.clone(),
        Scores::PerTrajectory { w, trajectories } => trajectories
            .perms()
            .iter()
            .map(|perm| {
                let mut row = vec![0.0; diagram.components()];
                for (traj, &r) in perm.iter().enumerate() {
                    row[r] = w[traj];
                }
                row
            })
            .collect(),
    }
}

fn hull_grid(bundles: &[KernelBundle], points: usize, k: usize) -> Result<HullGrid> {
    let ks = [bundles[0].spd_kernel()?, bundles[1].spd_kernel()?, bundles[2].spd_kernel()?];
    let axis: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let mut values = Vec::with_capacity(points);
    for &t1 in &axis {
        let mut row = Vec::with_capacity(points);
        for &t2 in &axis {
            let p = convex_hull_point(&ks[0], &ks[1], &ks[2], t1, t2)?;
            row.push(p.eig().values().iter().take(k + 1).copied().collect());
        }
        values.push(row);
    }
    Ok(HullGrid {
        t1: axis.clone(),
        t2: axis,
        values,
    })
}

impl RunReport {
    pub fn t_star(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.t_star)
    }

    /// For each grid point, the trajectory id in every non-trivial column.
    pub fn column_trajectories(&self) -> Vec<Vec<usize>> {
        self.trajectories
            .perms()
            .iter()
            .map(|perm| {
                let mut row = vec![0; perm.len()];
                for (traj, &r) in perm.iter().enumerate() {
                    row[r] = traj;
                }
                row
            })
            .collect()
    }

    pub fn diagram_json(&self) -> Value {
        let (geometry, rank) = match self.diagram.geometry() {
            Geometry::Spd => ("spd", Value::Null),
            Geometry::Spsd { rank } => ("spsd", json!(rank)),
        };
        let r = self.report.as_ref();
        let w = match r {
            Some(r) => r.w.clone(),
            None => self.point_w[self.diagram.len() / 2].clone(),
        };
        json!({
            "grid": self.diagram.grid(),
            "eigenvalues": self.diagram.values(),
            "trajectories": self.column_trajectories(),
            "w": w,
            "cmr": r.map(|r| r.curve.clone()),
            "t_star": r.map(|r| r.t_star),
            "common_set": r.map(|r| r.common_set.clone()).unwrap_or_default(),
            "meta": {
                "version": env!("CARGO_PKG_VERSION"),
                "samples": self.diagram.order(),
                "views": self.config.inputs.len(),
                "epsilon": self.epsilons,
                "geometry": geometry,
                "rank": rank,
                "estimator": self.config.estimator.name(),
                "threshold": self.config.threshold,
                "trivial_column": self.diagram.trivial_index(),
                "t_star_index": r.map(|r| r.t_star_index),
                "hard_cmr": r.map(|r| r.hard_curve.clone()),
                "non_common_set": r.map(|r| r.non_common_set.clone()).unwrap_or_default(),
                "point_w": self.point_w,
                "embedding_columns": self.embedding.indices(),
                "embedding_t": self.embedding.source_t(),
                "seed": self.config.seed,
                "notes": self.notes,
            }
        })
    }

    pub fn metrics_csv(&self) -> String {
        let mut s = String::from("method,t,ell,smoothness\n");
        for m in &self.metrics {
            let t = m.t.map(fmt17).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{}", m.method, t, m.ell, fmt17(m.smoothness));
        }
        s
    }

    pub fn hull_json(&self) -> Option<Value> {
        self.hull.as_ref().map(|h| {
            json!({
                "t1": h.t1,
                "t2": h.t2,
                "eigenvalues": h.values,
                "trivial_column": 0,
            })
        })
    }

    /// Provenance block: a valid config preceded by comment lines.
    pub fn provenance(&self) -> String {
        format!("# evflow {}\n{}", env!("CARGO_PKG_VERSION"), self.config.echo())
    }

    /// Writes diagram.json, diagram.svg, embedding.csv, metrics.csv,
    /// provenance.cfg and, with three inputs, hull.json.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(&self.diagram_json()).expect("json values serialize");
        fs::write(dir.join("diagram.json"), json + "\n")?;
        emit_diagram_svg(&self.diagram, self.report.as_ref(), &dir.join("diagram.svg"))?;
        let header: Vec<String> = self.embedding.indices().iter().map(|c| format!("phi{c}")).collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        write_csv(&dir.join("embedding.csv"), self.embedding.coords(), Some(&header))?;
        fs::write(dir.join("metrics.csv"), self.metrics_csv())?;
        fs::write(dir.join("provenance.cfg"), self.provenance())?;
        if let Some(h) = self.hull_json() {
            let text = serde_json::to_string_pretty(&h).expect("json values serialize");
            fs::write(dir.join("hull.json"), text + "\n")?;
        }
        Ok(())
    }
}

/// Writes a dataset as CSV with a `x1,x2,...` header.
pub fn write_dataset(path: &Path, rows: &DMatrix<f64>) -> Result<()> {
    let header: Vec<String> = (1..=rows.ncols()).map(|j| format!("x{j}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(path, rows, Some(&header))
}
