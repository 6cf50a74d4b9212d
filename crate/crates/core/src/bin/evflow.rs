use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use evflow::graph::{verify_graph, GraphPermutation, ProductKernel, StudyConfig};
use evflow::io::write_csv;
use evflow::pipeline::{run_pipeline, write_dataset, RunConfig};
use evflow::synthetic::{gen_flat_2d, gen_torus, CommonAngle, LatentTriple, ScaleSet, TorusRadii};
use evflow::Error;

#[derive(Parser)]
#[command(name = "evflow", version, about = "Eigenvalue flow diagrams between two aligned datasets")]
struct Cli {
    /// Seed for synthetic data and Monte-Carlo studies.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a synthetic suite and a matching run config.
    Synth {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        out: PathBuf,
        /// Samples per view (flat and torus suites).
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// lx1,lx2,ly1,lz2 for the flat suite.
        #[arg(long, value_delimiter = ',', default_values_t = [2.0, 2.0, 2.0, 2.0])]
        scales: Vec<f64>,
    },
    /// Check the cycle-graph propositions and print a JSON report.
    Verify {
        #[arg(long, value_enum)]
        suite: VerifySuite,
        /// Permutation trials.
        #[arg(long, default_value_t = 2000)]
        trials: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Flat,
    Torus,
    Graph,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifySuite {
    Graph,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let seed = cli.seed.unwrap_or(0);
    let outcome = match cli.command {
        Command::Run { config } => run(&config, cli.seed),
        Command::Synth { suite, out, n, scales } => synth(suite, &out, n, &scales, seed),
        Command::Verify { trials, .. } => verify(trials, seed),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn run(path: &Path, seed: Option<u64>) -> Result<ExitCode, Error> {
    let mut cfg = RunConfig::from_file(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = run_pipeline(&cfg)?;
    for (stage, secs) in &report.timings {
        eprintln!("{stage:>12}: {secs:.3} s");
    }
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    match report.t_star() {
        Some(t) => println!("t* = {t:.4}"),
        None => println!("t* undefined"),
    }
    println!("outputs written to {}", cfg.output.display());
    Ok(ExitCode::SUCCESS)
}

fn synth(suite: Suite, out: &Path, n: usize, scales: &[f64], seed: u64) -> Result<ExitCode, Error> {
    fs::create_dir_all(out)?;
    let (a, b, lat, eps) = match suite {
        Suite::Graph => return synth_graph(out, seed),
        Suite::Flat => {
            if scales.len() != 4 {
                return Err(Error::InvalidParameter(format!("--scales takes 4 values, got {}", scales.len())));
            }
            let s = ScaleSet::new(scales[0], scales[1], scales[2], scales[3])?;
            let (a, b, lat) = gen_flat_2d(n, &s, seed)?;
            (a, b, lat, "0.3, 0.3")
        }
        Suite::Torus => {
            let r1 = TorusRadii { major: 10.0, minor: 5.0 };
            let r2 = TorusRadii { major: 10.0, minor: 3.0 };
            let (a, b, lat) = gen_torus(n, r1, r2, CommonAngle::Poloidal, seed)?;
            (a, b, lat, "median")
        }
    };
    write_dataset(&out.join("view1.csv"), a.rows())?;
    write_dataset(&out.join("view2.csv"), b.rows())?;
    write_latent(&out.join("latent.csv"), &lat)?;
    let cfg = format!(
        "# synthetic {} suite, seed {seed}\ninputs = view1.csv, view2.csv\nepsilon = {eps}\n\
         n_t = 200\nk = 20\ntarget = latent_x.csv\noutput = run\nseed = {seed}\n",
        match suite {
            Suite::Flat => "flat",
            _ => "torus",
        }
    );
    let x = DMatrix::from_column_slice(lat.x.len(), 1, &lat.x);
    write_csv(&out.join("latent_x.csv"), &x, Some(&["x"]))?;
    fs::write(out.join("run.cfg"), cfg)?;
    println!("wrote {} samples to {}", a.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn write_latent(path: &Path, lat: &LatentTriple) -> Result<(), Error> {
    let m = DMatrix::from_fn(lat.len(), 3, |i, c| [lat.x[i], lat.y[i], lat.z[i]][c]);
    write_csv(path, &m, Some(&["x", "y", "z"]))
}

fn synth_graph(out: &Path, seed: u64) -> Result<ExitCode, Error> {
    let pk = ProductKernel::new(11, 31)?;
    let pi = GraphPermutation::random(pk.m(), seed, 0);
    write_csv(&out.join("kernel1.csv"), &pk.kernel(), None)?;
    write_csv(&out.join("kernel2.csv"), &pk.permuted_kernel(&pi)?, None)?;
    let image: Vec<f64> = pi.image().iter().map(|&v| v as f64).collect();
    let image = DMatrix::from_column_slice(image.len(), 1, &image);
    write_csv(&out.join("permutation.csv"), &image, Some(&["image"]))?;
    let values = pk.analytic_values();
    let values = DMatrix::from_column_slice(values.len(), 1, values.as_slice());
    write_csv(&out.join("spectrum.csv"), &values, Some(&["eigenvalue"]))?;
    println!("wrote {}x{} product-graph kernels to {}", pk.size(), pk.size(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn verify(trials: usize, seed: u64) -> Result<ExitCode, Error> {
    let cfg = StudyConfig {
        trials,
        seed,
        ..StudyConfig::default()
    };
    let report = verify_graph(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("json values serialize"));
    for c in &report.checks {
        eprintln!("{:<20} {}", c.name, if c.passed { "pass" } else { "FAIL" });
    }
    // A proposition that does not hold numerically is reported as a
    // numerical failure.
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}
