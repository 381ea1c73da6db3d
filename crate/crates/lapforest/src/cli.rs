//! Command-line front end: `analyze`, `simulate`, and `fuzz`.
//!
//! Exit codes: 0 when every requested check passes, 1 on usage or input
//! errors, 2 when a mathematical cross-check fails.

use crate::digraph::Digraph;
use crate::dynamics::{self, TrajectoryRecord};
use crate::random;
use crate::report::{self, AnalysisOptions};
use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT_ERROR: u8 = 1;
pub const EXIT_CHECK_FAILURE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "lapforest",
    about = "Digraph Laplacian analysis: components, in-forests, spectra, and consensus dynamics, cross-verified"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an edge-list file and run the full cross-check battery.
    Analyze {
        /// Edge-list file ("n m" header, then "i j [w]" lines).
        path: PathBuf,
        /// Resolvent parameter for the projector route.
        #[arg(long, default_value_t = crate::spectral::DEFAULT_RESOLVENT_TAU)]
        tau: f64,
        /// Perron step size (default 1/(2 max out-degree)).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Spectral tolerance (default 1e-9 * max(1, max out-degree)).
        #[arg(long)]
        tol: Option<f64>,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Write the report to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the consensus dynamics and export the trajectory as CSV.
    Simulate {
        path: PathBuf,
        /// Continuous flow x' = -Lx or the discrete Perron iteration.
        #[arg(long, value_enum)]
        mode: SimulationMode,
        /// Initial state as a comma-separated list, e.g. "5,0,0".
        #[arg(long)]
        x0: Option<String>,
        /// Seed for a random initial state in [-1, 1]^n (used when --x0 is absent).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Discrete steps.
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Continuous horizon.
        #[arg(long = "t-end", default_value_t = 20.0)]
        t_end: f64,
        /// Continuous step size (default 0.25 / max out-degree).
        #[arg(long)]
        dt: Option<f64>,
        /// Perron step size for discrete mode.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Write the CSV to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate random digraphs and run the cross-check battery on each.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long = "n-max", default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Draw arc weights from [0.5, 10] instead of unit weights.
        #[arg(long)]
        weighted: bool,
        /// Sweep every digraph on up to min(n_max, 4) vertices instead of sampling.
        #[arg(long)]
        exhaustive: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SimulationMode {
    Continuous,
    Discrete,
}

pub fn run() -> u8 {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            path,
            tau,
            epsilon,
            tol,
            json,
            out,
        } => cmd_analyze(&path, tau, epsilon, tol, json, out.as_deref()),
        Command::Simulate {
            path,
            mode,
            x0,
            seed,
            steps,
            t_end,
            dt,
            epsilon,
            out,
        } => cmd_simulate(&path, mode, x0, seed, steps, t_end, dt, epsilon, out.as_deref()),
        Command::Fuzz {
            count,
            n_max,
            seed,
            weighted,
            exhaustive,
        } => cmd_fuzz(count, n_max, seed, weighted, exhaustive),
    }
}

fn load_digraph(path: &Path) -> Result<Digraph, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Digraph::parse_edge_list(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_analyze(
    path: &Path,
    tau: f64,
    epsilon: Option<f64>,
    tol: Option<f64>,
    json: bool,
    out: Option<&Path>,
) -> u8 {
    let g = match load_digraph(path) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };
    let opts = AnalysisOptions {
        tau,
        epsilon,
        tolerance: tol,
        ..AnalysisOptions::default()
    };
    let report = match report::analyze(&g, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };
    let rendered = if json {
        let mut s = serde_json::to_string_pretty(&report.to_json()).expect("serializable report");
        s.push('\n');
        s
    } else {
        report.render_text()
    };
    if let Err(e) = write_output(out, &rendered) {
        eprintln!("error: {e}");
        return EXIT_INPUT_ERROR;
    }
    if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILURE
    }
}

fn parse_x0(n: usize, x0: Option<&str>, seed: u64) -> Result<DVector<f64>, String> {
    match x0 {
        Some(list) => {
            let values: Result<Vec<f64>, _> =
                list.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let values = values.map_err(|e| format!("cannot parse --x0: {e}"))?;
            if values.len() != n {
                return Err(format!(
                    "--x0 has {} entries but the graph has {} vertices",
                    values.len(),
                    n
                ));
            }
            Ok(DVector::from_vec(values))
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(DVector::from_fn(n, |_, _| rng.gen_range(-1.0..=1.0)))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    path: &Path,
    mode: SimulationMode,
    x0: Option<String>,
    seed: u64,
    steps: usize,
    t_end: f64,
    dt: Option<f64>,
    epsilon: Option<f64>,
    out: Option<&Path>,
) -> u8 {
    let g = match load_digraph(path) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };
    let l = crate::digraph::laplacian(&g);
    let x0 = match parse_x0(g.n(), x0.as_deref(), seed) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };

    let record: Result<TrajectoryRecord, dynamics::DynamicsError> = match mode {
        SimulationMode::Discrete => {
            dynamics::perron(&l, epsilon).and_then(|p| dynamics::simulate_discrete(&p, &x0, steps))
        }
        SimulationMode::Continuous => {
            let dt = dt.unwrap_or_else(|| {
                if l.max_diagonal() > 0.0 {
                    0.25 / l.max_diagonal()
                } else {
                    t_end / 100.0
                }
            });
            dynamics::simulate_continuous(&l, &x0, t_end, dt)
        }
    };
    let record = match record {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };

    if let Err(e) = write_output(out, &record.to_csv()) {
        eprintln!("error: {e}");
        return EXIT_INPUT_ERROR;
    }
    eprintln!(
        "final deviation from projected limit (inf-norm): {:e}",
        record.final_deviation()
    );
    EXIT_OK
}

struct FuzzTally {
    per_check: BTreeMap<&'static str, (usize, usize)>,
    failures: usize,
    reported_failures: usize,
}

impl FuzzTally {
    fn new() -> Self {
        Self {
            per_check: BTreeMap::new(),
            failures: 0,
            reported_failures: 0,
        }
    }

    fn record(&mut self, g: &Digraph, checks: &[report::CheckResult]) {
        for c in checks {
            let entry = self.per_check.entry(c.name).or_insert((0, 0));
            entry.1 += 1;
            if c.pass {
                entry.0 += 1;
            } else {
                self.failures += 1;
                // Serialize the first few offenders so they can be replayed
                // through `analyze` directly.
                if self.reported_failures < 5 {
                    self.reported_failures += 1;
                    eprintln!(
                        "FAIL {} (discrepancy {:e}, threshold {:e}); offending graph:",
                        c.name, c.discrepancy, c.threshold
                    );
                    eprint!("{}", g.to_edge_list());
                }
            }
        }
    }
}

fn cmd_fuzz(count: usize, n_max: usize, seed: u64, weighted: bool, exhaustive: bool) -> u8 {
    if count == 0 {
        eprintln!("error: --count must be at least 1");
        return EXIT_INPUT_ERROR;
    }
    let opts = AnalysisOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = FuzzTally::new();
    let mut instances = 0usize;

    let run_instance = |g: &Digraph, rng: &mut ChaCha8Rng, tally: &mut FuzzTally| -> Result<(), String> {
        let report = report::analyze(g, &opts).map_err(|e| e.to_string())?;
        tally.record(g, &report.checks);
        let x0 = DVector::from_fn(g.n(), |_, _| rng.gen_range(-1.0..=1.0));
        let checks = report::dynamics_checks(g, &x0, &opts).map_err(|e| e.to_string())?;
        tally.record(g, &checks);
        Ok(())
    };

    if exhaustive {
        for n in 1..=n_max.min(4) {
            for g in random::all_digraphs(n) {
                instances += 1;
                if let Err(e) = run_instance(&g, &mut rng, &mut tally) {
                    eprintln!("error: {e}");
                    return EXIT_INPUT_ERROR;
                }
            }
        }
    } else {
        for _ in 0..count {
            let g = random::random_digraph(&mut rng, n_max, weighted);
            instances += 1;
            if let Err(e) = run_instance(&g, &mut rng, &mut tally) {
                eprintln!("error: {e}");
                return EXIT_INPUT_ERROR;
            }
        }
    }

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "fuzz: {instances} instance(s), n_max = {n_max}, seed = {seed}, weighted = {weighted}, exhaustive = {exhaustive}"
    );
    for (name, (passes, runs)) in &tally.per_check {
        let _ = writeln!(summary, "  {name:<48} {passes}/{runs}");
    }
    if tally.failures == 0 {
        let _ = writeln!(summary, "all checks passed");
        print!("{summary}");
        EXIT_OK
    } else {
        let _ = writeln!(summary, "{} check failure(s)", tally.failures);
        print!("{summary}");
        EXIT_CHECK_FAILURE
    }
}
