//! Parameter sweeps: configuration files, replication seeds, CSV output and
//! per-point summaries.
//!
//! Algorithms at the same grid point and replication share a seed, so they
//! see the same requests, holding times, failure times and unreliable
//! elements.

use std::collections::BTreeSet;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::CostModel;
use crate::routing::Algorithm;
use crate::simulator::{self, load_per_wavelength, SimConfig, SimError};
use crate::stats::EstimatorKind;
use crate::topology::{ConversionMode, Element, ReliabilityClass, Topology, TopologyError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("config: {0}")]
    Invalid(String),
    #[error("{path}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}")]
    Topology {
        path: PathBuf,
        source: TopologyError,
    },
    #[error("{algorithm} at lambda_T={lambda_t}, ratio={ratio}, replication {replication}")]
    Run {
        algorithm: Algorithm,
        lambda_t: f64,
        ratio: f64,
        replication: u32,
        source: SimError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl ExperimentError {
    /// Whether the error comes from bad input or I/O rather than a run that
    /// broke an invariant.
    pub fn is_config(&self) -> bool {
        match self {
            ExperimentError::Run { source, .. } => source.is_config(),
            _ => true,
        }
    }
}

/// Which elements may be marked unreliable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReliabilityPool {
    /// Routers and links together.
    #[default]
    All,
    RoutersOnly,
}

/// Everything needed to run a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub topology: PathBuf,
    /// Overrides the mode line of the topology file.
    pub mode: Option<ConversionMode>,
    pub algorithms: Vec<Algorithm>,
    pub lambda_t: Vec<f64>,
    pub reliability_ratios: Vec<f64>,
    pub reliability_pool: ReliabilityPool,
    pub replications: u32,
    pub base_seed: u64,
    /// Template for every run; `arrival_rate` is set per grid point.
    pub sim: SimConfig,
    pub wallclock: bool,
    pub state_dump: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            topology: PathBuf::from("data/example6.topo"),
            mode: None,
            algorithms: Algorithm::ALL.to_vec(),
            lambda_t: vec![1.0],
            reliability_ratios: vec![0.05356],
            reliability_pool: ReliabilityPool::All,
            replications: 10,
            base_seed: 1,
            sim: SimConfig {
                check_invariants: false,
                ..SimConfig::default()
            },
            wallclock: false,
            state_dump: None,
        }
    }
}

/// Parses a number, also accepting a fraction such as `1/1500`.
fn parse_number(v: &str) -> Result<f64, String> {
    let bad = || format!("not a number: `{v}`");
    match v.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0.0 {
                return Err(bad());
            }
            Ok(a / b)
        }
        None => v.parse().map_err(|_| bad()),
    }
}

fn parse_list<T>(v: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(f)
        .collect()
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("not a boolean: `{v}`")),
    }
}

fn parse_int<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("not an integer: `{v}`"))
}

impl ExperimentConfig {
    /// Parses `key = value` lines. Relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ExperimentError> {
        let mut cfg = ExperimentConfig::default();
        let mut kalman = (0.0, 1.0);
        let mut use_kalman = false;
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| ExperimentError::Config { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("`{key}` given twice")));
            }
            let sim = &mut cfg.sim;
            let res: Result<(), String> = (|| {
                match key {
                    "topology" => cfg.topology = base_dir.join(value),
                    "mode" => cfg.mode = Some(value.parse()?),
                    "algorithms" => cfg.algorithms = parse_list(value, |s| s.parse())?,
                    "lambda_t" => cfg.lambda_t = parse_list(value, parse_number)?,
                    "reliability_ratios" => cfg.reliability_ratios = parse_list(value, parse_number)?,
                    "reliability_pool" => {
                        cfg.reliability_pool = match value {
                            "all" => ReliabilityPool::All,
                            "routers" => ReliabilityPool::RoutersOnly,
                            _ => return Err(format!("expected all or routers, got `{value}`")),
                        }
                    }
                    "replications" => cfg.replications = parse_int(value)?,
                    "base_seed" => cfg.base_seed = parse_int(value)?,
                    "requests" => sim.requests = parse_int(value)?,
                    "warmup_fraction" => sim.warmup_fraction = parse_number(value)?,
                    "mean_holding" => sim.mean_holding = parse_number(value)?,
                    "failure_rate_reliable" => sim.failure_rate_reliable = parse_number(value)?,
                    "failure_rate_unreliable" => sim.failure_rate_unreliable = parse_number(value)?,
                    "swap_failure_rates" => sim.swap_failure_rates = parse_bool(value)?,
                    "wavelength_policy" => sim.policy = value.parse()?,
                    "failure_bound" => sim.cost_model.failure_bound = value.parse()?,
                    "repack_threshold" => sim.cost_model.repack_threshold = parse_number(value)?,
                    "estimator" => {
                        use_kalman = match value {
                            "meanvar" => false,
                            "kalman" => true,
                            _ => return Err(format!("expected meanvar or kalman, got `{value}`")),
                        }
                    }
                    "kalman_process_noise" => kalman.0 = parse_number(value)?,
                    "kalman_measurement_noise" => kalman.1 = parse_number(value)?,
                    "scan_interval" => sim.scan_interval = Some(parse_number(value)?),
                    "scan_window" => sim.scan_window = parse_int(value)?,
                    "wi_link_repacking" => sim.wi_link_repacking = parse_bool(value)?,
                    "learn_failures" => sim.learn_failures = parse_bool(value)?,
                    "drain" => sim.drain = parse_bool(value)?,
                    "check_invariants" => sim.check_invariants = parse_bool(value)?,
                    "wallclock" => cfg.wallclock = parse_bool(value)?,
                    "state_dump" => cfg.state_dump = Some(base_dir.join(value)),
                    _ => return Err(format!("unknown key `{key}`")),
                }
                Ok(())
            })();
            res.map_err(err)?;
        }
        if use_kalman {
            cfg.sim.estimator = EstimatorKind::Kalman {
                process_noise: kalman.0,
                measurement_noise: kalman.1,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Invalid(m.to_string()));
        if self.replications == 0 {
            return bad("replications must be at least 1");
        }
        if self.algorithms.is_empty() || self.lambda_t.is_empty() || self.reliability_ratios.is_empty() {
            return bad("algorithms, lambda_t and reliability_ratios must be nonempty");
        }
        if self.reliability_ratios.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return bad("reliability ratios must lie in [0, 1]");
        }
        if self.lambda_t.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return bad("lambda_t values must be positive");
        }
        let m: &CostModel = &self.sim.cost_model;
        if !(m.repack_threshold > 0.0 && m.repack_threshold <= 1.0) {
            return bad("repack_threshold must lie in (0, 1]");
        }
        if let EstimatorKind::Kalman {
            process_noise,
            measurement_noise,
        } = self.sim.estimator
        {
            if !(process_noise >= 0.0 && measurement_noise > 0.0) {
                return bad("kalman noise must satisfy q >= 0 and r > 0");
            }
        }
        self.sim
            .validate()
            .or_else(|e| match e {
                // the per-point arrival rate is filled in later
                SimError::Config(m) if m.starts_with("arrival_rate") => Ok(()),
                SimError::Config(m) => Err(ExperimentError::Invalid(m)),
                other => Err(ExperimentError::Invalid(other.to_string())),
            })
    }

    pub fn load_topology(&self) -> Result<Topology, ExperimentError> {
        let text = fs::read_to_string(&self.topology).map_err(|source| ExperimentError::Io {
            path: self.topology.clone(),
            source,
        })?;
        let t = Topology::parse(&text).map_err(|source| ExperimentError::Topology {
            path: self.topology.clone(),
            source,
        })?;
        Ok(match self.mode {
            Some(m) => t.with_mode(m),
            None => t,
        })
    }

    /// Renders the config back to the file format.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let s = &self.sim;
        let mut out = vec![
            format!("topology = {}", self.topology.display()),
            format!(
                "algorithms = {}",
                self.algorithms.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(",")
            ),
            format!("lambda_t = {}", join(&self.lambda_t)),
            format!("reliability_ratios = {}", join(&self.reliability_ratios)),
            format!(
                "reliability_pool = {}",
                match self.reliability_pool {
                    ReliabilityPool::All => "all",
                    ReliabilityPool::RoutersOnly => "routers",
                }
            ),
            format!("replications = {}", self.replications),
            format!("base_seed = {}", self.base_seed),
            format!("requests = {}", s.requests),
            format!("warmup_fraction = {}", s.warmup_fraction),
            format!("mean_holding = {}", s.mean_holding),
            format!("failure_rate_reliable = {}", s.failure_rate_reliable),
            format!("failure_rate_unreliable = {}", s.failure_rate_unreliable),
            format!("swap_failure_rates = {}", s.swap_failure_rates),
            format!("wavelength_policy = {}", s.policy.as_str()),
            format!("failure_bound = {}", s.cost_model.failure_bound.as_str()),
            format!("repack_threshold = {}", s.cost_model.repack_threshold),
            format!("scan_window = {}", s.scan_window),
            format!("wi_link_repacking = {}", s.wi_link_repacking),
            format!("learn_failures = {}", s.learn_failures),
            format!("drain = {}", s.drain),
            format!("check_invariants = {}", s.check_invariants),
            format!("wallclock = {}", self.wallclock),
        ];
        if let Some(m) = self.mode {
            out.push(format!("mode = {}", m.as_str()));
        }
        if let Some(d) = s.scan_interval {
            out.push(format!("scan_interval = {d}"));
        }
        match s.estimator {
            EstimatorKind::MeanVar => out.push("estimator = meanvar".into()),
            EstimatorKind::Kalman {
                process_noise,
                measurement_noise,
            } => {
                out.push("estimator = kalman".into());
                out.push(format!("kalman_process_noise = {process_noise}"));
                out.push(format!("kalman_measurement_noise = {measurement_noise}"));
            }
        }
        if let Some(p) = &self.state_dump {
            out.push(format!("state_dump = {}", p.display()));
        }
        out.join("\n") + "\n"
    }
}

/// Number of unreliable elements for a ratio over `pool` elements.
pub fn unreliable_count(ratio: f64, pool: usize) -> usize {
    // tolerate ratios like 0.3 × 10 landing a hair above an integer
    ((ratio * pool as f64 - 1e-9).ceil().max(0.0) as usize).min(pool)
}

/// Marks ⌈ratio × pool size⌉ elements unreliable, chosen uniformly with the
/// given seed, and the rest reliable.
pub fn assign_reliability_classes(
    topology: &Topology,
    ratio: f64,
    seed: u64,
    pool: ReliabilityPool,
) -> Topology {
    let candidates: Vec<Element> = match pool {
        ReliabilityPool::All => topology.elements().collect(),
        ReliabilityPool::RoutersOnly => topology.routers().iter().map(|r| Element::Router(r.id)).collect(),
    };
    let k = unreliable_count(ratio, candidates.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = topology.clone();
    for e in topology.elements().collect::<Vec<_>>() {
        out.set_class(e, ReliabilityClass::Reliable);
    }
    for i in sample(&mut rng, candidates.len(), k).into_vec() {
        out.set_class(candidates[i], ReliabilityClass::Unreliable);
    }
    out
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `rep` at grid point `grid`: splitmix64 applied to the
/// base seed, then mixed with the grid index, then with the replication.
pub fn derive_seed(base: u64, grid: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ grid) ^ rep)
}

// separates the reliability-class stream from the simulation seeds
const CLASS_SALT: u64 = 0x636c_6173_7365_7321;

/// One replication's outcome, as written to the sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub algorithm: Algorithm,
    #[serde(rename = "lambda_T")]
    pub lambda_t: f64,
    pub load_per_wavelength: f64,
    pub reliability_ratio: f64,
    pub seed: u64,
    pub offered: u64,
    pub blocked: u64,
    pub accepted: u64,
    pub reconfig_events: u64,
    pub blocking_prob: f64,
    pub reconfig_prob: f64,
    pub wallclock_s: f64,
}

pub const CSV_HEADER: &str = "algorithm,lambda_T,load_per_wavelength,reliability_ratio,seed,offered,blocked,accepted,reconfig_events,blocking_prob,reconfig_prob,wallclock_s";

#[derive(Debug, Clone, Serialize)]
pub struct StateDump {
    pub algorithm: Algorithm,
    pub lambda_t: f64,
    pub reliability_ratio: f64,
    pub seed: u64,
    pub stats: serde_json::Value,
}

/// Event trace of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub lambda_t: f64,
    pub reliability_ratio: f64,
    pub seed: u64,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub dumps: Vec<StateDump>,
    pub traces: Vec<RunTrace>,
}

/// Writes traces run by run, each under a `# run ...` header line.
pub fn write_traces<W: Write>(traces: &[RunTrace], mut w: W) -> std::io::Result<()> {
    for t in traces {
        writeln!(
            w,
            "# run algorithm={} lambda_T={} reliability_ratio={} seed={}",
            t.algorithm, t.lambda_t, t.reliability_ratio, t.seed
        )?;
        for l in &t.lines {
            writeln!(w, "{l}")?;
        }
    }
    Ok(())
}

struct Job {
    algorithm: Algorithm,
    lambda_t: f64,
    ratio: f64,
    ratio_idx: usize,
    rep: u32,
    seed: u64,
}

fn jobs(cfg: &ExperimentConfig) -> Vec<Job> {
    let mut out = Vec::new();
    let mut seeds = BTreeSet::new();
    for (ri, &ratio) in cfg.reliability_ratios.iter().enumerate() {
        for (li, &lambda_t) in cfg.lambda_t.iter().enumerate() {
            let grid = (ri * cfg.lambda_t.len() + li) as u64;
            for &algorithm in &cfg.algorithms {
                for rep in 0..cfg.replications {
                    let seed = derive_seed(cfg.base_seed, grid, rep as u64);
                    out.push(Job {
                        algorithm,
                        lambda_t,
                        ratio,
                        ratio_idx: ri,
                        rep,
                        seed,
                    });
                }
            }
            for rep in 0..cfg.replications {
                let fresh = seeds.insert(derive_seed(cfg.base_seed, grid, rep as u64));
                assert!(fresh, "derived seed collision at grid point {grid}, replication {rep}");
            }
        }
    }
    out
}

fn run_job(
    cfg: &ExperimentConfig,
    topology: &Topology,
    job: &Job,
) -> Result<(SweepRow, Option<StateDump>, Option<RunTrace>), ExperimentError> {
    // only when asked: there is no clock on wasm32-unknown-unknown
    let start = cfg.wallclock.then(Instant::now);
    let classes_seed = derive_seed(cfg.base_seed ^ CLASS_SALT, job.ratio_idx as u64, job.rep as u64);
    let t = assign_reliability_classes(topology, job.ratio, classes_seed, cfg.reliability_pool);
    let sim_cfg = SimConfig {
        arrival_rate: job.lambda_t,
        dump_stats: cfg.state_dump.is_some(),
        ..cfg.sim.clone()
    };
    let wrap = |source: SimError| ExperimentError::Run {
        algorithm: job.algorithm,
        lambda_t: job.lambda_t,
        ratio: job.ratio,
        replication: job.rep,
        source,
    };
    let out = simulator::run(&sim_cfg, &t, job.algorithm, job.seed).map_err(wrap)?;
    let load = load_per_wavelength(
        job.lambda_t,
        out.mean_hops,
        t.mean_wavelengths(),
        t.total_fibers() as f64,
    )
    .map_err(wrap)?;
    let m = out.metrics;
    let row = SweepRow {
        algorithm: job.algorithm,
        lambda_t: job.lambda_t,
        load_per_wavelength: load,
        reliability_ratio: job.ratio,
        seed: job.seed,
        offered: m.offered,
        blocked: m.blocked,
        accepted: m.accepted,
        reconfig_events: m.reconfig_events,
        blocking_prob: m.blocking_probability(),
        reconfig_prob: m.reconfiguration_probability(),
        wallclock_s: start.map_or(0.0, |t| t.elapsed().as_secs_f64()),
    };
    let dump = out.stats_dump.map(|stats| StateDump {
        algorithm: job.algorithm,
        lambda_t: job.lambda_t,
        reliability_ratio: job.ratio,
        seed: job.seed,
        stats,
    });
    let trace = out.trace.map(|lines| RunTrace {
        algorithm: job.algorithm,
        lambda_t: job.lambda_t,
        reliability_ratio: job.ratio,
        seed: job.seed,
        lines,
    });
    Ok((row, dump, trace))
}

/// Runs every grid point and replication. Rows come back ordered by
/// reliability ratio, load, algorithm and replication regardless of how the
/// runs were scheduled.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, ExperimentError> {
    cfg.validate()?;
    let topology = cfg.load_topology()?;
    run_sweep_on(cfg, &topology)
}

/// [`run_sweep`] with an already loaded topology.
pub fn run_sweep_on(cfg: &ExperimentConfig, topology: &Topology) -> Result<SweepResult, ExperimentError> {
    cfg.validate()?;
    let jobs = jobs(cfg);
    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        jobs.par_iter().map(|j| run_job(cfg, topology, j)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = jobs.iter().map(|j| run_job(cfg, topology, j)).collect();
    let mut out = SweepResult::default();
    for r in results {
        let (row, dump, trace) = r?;
        out.rows.push(row);
        out.dumps.extend(dump);
        out.traces.extend(trace);
    }
    Ok(out)
}

pub fn write_rows<W: Write>(rows: &[SweepRow], w: W) -> Result<(), ExperimentError> {
    let mut wtr = csv::Writer::from_writer(w);
    if rows.is_empty() {
        wtr.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_rows<R: Read>(r: R) -> Result<Vec<SweepRow>, ExperimentError> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    if header.join(",") != CSV_HEADER {
        return Err(ExperimentError::Invalid(format!(
            "unexpected CSV header `{}`",
            header.join(",")
        )));
    }
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_state_dump<W: Write>(dumps: &[StateDump], w: W) -> Result<(), ExperimentError> {
    serde_json::to_writer_pretty(w, dumps)?;
    Ok(())
}

/// Mean and standard error of the mean; the error is `None` for one sample.
pub fn mean_and_se(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

/// Replication statistics for one (algorithm, load, ratio) point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub lambda_t: f64,
    pub reliability_ratio: f64,
    pub replications: usize,
    pub load_per_wavelength: f64,
    pub blocking_mean: f64,
    pub blocking_se: Option<f64>,
    pub reconfig_mean: f64,
    pub reconfig_se: Option<f64>,
    /// Relative improvement of MRPR over each baseline, on MRPR rows only.
    pub blocking_gain_vs_aur: Option<f64>,
    pub blocking_gain_vs_llr: Option<f64>,
    pub reconfig_gain_vs_aur: Option<f64>,
    pub reconfig_gain_vs_llr: Option<f64>,
}

pub const SUMMARY_HEADER: &str = "algorithm,lambda_T,reliability_ratio,replications,load_per_wavelength,blocking_mean,blocking_se,reconfig_mean,reconfig_se,mrpr_blocking_gain_vs_aur,mrpr_blocking_gain_vs_llr,mrpr_reconfig_gain_vs_aur,mrpr_reconfig_gain_vs_llr";

/// Groups rows by point in order of first appearance.
pub fn summarize(rows: &[SweepRow]) -> Vec<SummaryRow> {
    let key = |r: &SweepRow| (r.algorithm, r.lambda_t.to_bits(), r.reliability_ratio.to_bits());
    let mut keys = Vec::new();
    for r in rows {
        if !keys.contains(&key(r)) {
            keys.push(key(r));
        }
    }
    let mut out: Vec<SummaryRow> = keys
        .iter()
        .map(|k| {
            let group: Vec<&SweepRow> = rows.iter().filter(|r| key(r) == *k).collect();
            let col = |f: fn(&SweepRow) -> f64| group.iter().map(|r| f(r)).collect::<Vec<_>>();
            let (blocking_mean, blocking_se) = mean_and_se(&col(|r| r.blocking_prob));
            let (reconfig_mean, reconfig_se) = mean_and_se(&col(|r| r.reconfig_prob));
            let (load, _) = mean_and_se(&col(|r| r.load_per_wavelength));
            SummaryRow {
                algorithm: group[0].algorithm,
                lambda_t: group[0].lambda_t,
                reliability_ratio: group[0].reliability_ratio,
                replications: group.len(),
                load_per_wavelength: load,
                blocking_mean,
                blocking_se,
                reconfig_mean,
                reconfig_se,
                blocking_gain_vs_aur: None,
                blocking_gain_vs_llr: None,
                reconfig_gain_vs_aur: None,
                reconfig_gain_vs_llr: None,
            }
        })
        .collect();
    let gain = |base: f64, mrpr: f64| (base > 0.0).then(|| (base - mrpr) / base);
    let snapshot = out.clone();
    for row in out.iter_mut().filter(|r| r.algorithm == Algorithm::Mrpr) {
        let find = |alg| {
            snapshot.iter().find(|r| {
                r.algorithm == alg
                    && r.lambda_t == row.lambda_t
                    && r.reliability_ratio == row.reliability_ratio
            })
        };
        if let Some(b) = find(Algorithm::Aur) {
            row.blocking_gain_vs_aur = gain(b.blocking_mean, row.blocking_mean);
            row.reconfig_gain_vs_aur = gain(b.reconfig_mean, row.reconfig_mean);
        }
        if let Some(b) = find(Algorithm::Llr) {
            row.blocking_gain_vs_llr = gain(b.blocking_mean, row.blocking_mean);
            row.reconfig_gain_vs_llr = gain(b.reconfig_mean, row.reconfig_mean);
        }
    }
    out
}

/// Missing values are written as `NA`.
pub fn write_summary<W: Write>(rows: &[SummaryRow], w: W) -> Result<(), ExperimentError> {
    let opt = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| v.to_string());
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SUMMARY_HEADER.split(','))?;
    for r in rows {
        wtr.write_record([
            r.algorithm.to_string(),
            r.lambda_t.to_string(),
            r.reliability_ratio.to_string(),
            r.replications.to_string(),
            r.load_per_wavelength.to_string(),
            r.blocking_mean.to_string(),
            opt(r.blocking_se),
            r.reconfig_mean.to_string(),
            opt(r.reconfig_se),
            opt(r.blocking_gain_vs_aur),
            opt(r.blocking_gain_vs_llr),
            opt(r.reconfig_gain_vs_aur),
            opt(r.reconfig_gain_vs_llr),
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::FailureBound;

    fn example() -> Topology {
        Topology::parse(include_str!("../../../data/example6.topo")).unwrap()
    }

    fn unreliable(t: &Topology) -> Vec<Element> {
        t.elements()
            .filter(|&e| t.class_of(e) == ReliabilityClass::Unreliable)
            .collect()
    }

    #[test]
    fn reliability_assignment() {
        let t = example();
        assert_eq!(t.element_count(), 19);
        assert!(unreliable(&assign_reliability_classes(&t, 0.0, 1, ReliabilityPool::All)).is_empty());
        assert_eq!(unreliable(&assign_reliability_classes(&t, 1.0, 1, ReliabilityPool::All)).len(), 19);
        let a = assign_reliability_classes(&t, 0.05356, 4, ReliabilityPool::All);
        assert_eq!(unreliable(&a).len(), 2);
        assert_eq!(a, assign_reliability_classes(&t, 0.05356, 4, ReliabilityPool::All));
        let r = assign_reliability_classes(&t, 0.12, 4, ReliabilityPool::RoutersOnly);
        let u = unreliable(&r);
        assert_eq!(u.len(), 1);
        assert!(matches!(u[0], Element::Router(_)));
        assert_eq!(unreliable_count(0.3, 10), 3);
        assert_eq!(unreliable_count(0.31, 10), 4);
    }

    #[test]
    fn fractions_and_lists() {
        assert_eq!(parse_number("1/1500").unwrap(), 1.0 / 1500.0);
        assert_eq!(parse_number("0.25").unwrap(), 0.25);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("x").is_err());
        assert_eq!(parse_list("1, 2,3", parse_number).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn config_parse_and_render() {
        let text = "# sweep\ntopology = topo.txt\nalgorithms = mrpr, llr\nlambda_t = 2,4\n\
                    reliability_ratios = 0, 0.5\nreplications = 3\nbase_seed = 9\nrequests = 500\n\
                    failure_rate_unreliable = 1/1500  # printed rate\nestimator = kalman\n\
                    kalman_measurement_noise = 4\nfailure_bound = exponential\nmode = spn\n\
                    scan_interval = 0.5\nstate_dump = dump.json\n";
        let cfg = ExperimentConfig::parse(text, Path::new("/cfg")).unwrap();
        assert_eq!(cfg.topology, PathBuf::from("/cfg/topo.txt"));
        assert_eq!(cfg.algorithms, vec![Algorithm::Mrpr, Algorithm::Llr]);
        assert_eq!(cfg.lambda_t, vec![2.0, 4.0]);
        assert_eq!(cfg.replications, 3);
        assert_eq!(cfg.sim.requests, 500);
        assert_eq!(cfg.sim.failure_rate_unreliable, 1.0 / 1500.0);
        assert_eq!(cfg.sim.cost_model.failure_bound, FailureBound::Exponential);
        assert_eq!(cfg.mode, Some(ConversionMode::SharePerNode));
        assert_eq!(
            cfg.sim.estimator,
            EstimatorKind::Kalman {
                process_noise: 0.0,
                measurement_noise: 4.0
            }
        );
        let again = ExperimentConfig::parse(&cfg.to_text(), Path::new("/elsewhere")).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn config_errors() {
        let p = Path::new(".");
        let line_of = |text: &str| match ExperimentConfig::parse(text, p) {
            Err(ExperimentError::Config { line, .. }) => Some(line),
            _ => None,
        };
        assert_eq!(line_of("requests = 10\nbogus = 1"), Some(2));
        assert_eq!(line_of("no equals sign"), Some(1));
        assert_eq!(line_of("replications = -1"), Some(1));
        assert_eq!(line_of("requests = 1\nrequests = 2"), Some(2));
        for text in ["replications = 0", "reliability_ratios = 1.5", "lambda_t = 0", "algorithms = ,"] {
            assert!(matches!(
                ExperimentConfig::parse(text, p),
                Err(ExperimentError::Invalid(_))
            ));
        }
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let mut seen = BTreeSet::new();
        for grid in 0..200 {
            for rep in 0..50 {
                assert!(seen.insert(derive_seed(42, grid, rep)));
            }
        }
        assert_ne!(derive_seed(1, 0, 0), derive_seed(2, 0, 0));
    }

    fn row(alg: Algorithm, bp: f64, rp: f64) -> SweepRow {
        SweepRow {
            algorithm: alg,
            lambda_t: 1.0,
            load_per_wavelength: 0.1,
            reliability_ratio: 0.05356,
            seed: 3,
            offered: 10,
            blocked: 1,
            accepted: 9,
            reconfig_events: 0,
            blocking_prob: bp,
            reconfig_prob: rp,
            wallclock_s: 0.0,
        }
    }

    #[test]
    fn summary_examples() {
        let s = summarize(&[row(Algorithm::Aur, 0.1, 0.2)]);
        assert_eq!(s[0].blocking_se, None);
        let s = summarize(&[row(Algorithm::Aur, 0.1, 0.2), row(Algorithm::Aur, 0.1, 0.2)]);
        assert_eq!(s[0].blocking_se, Some(0.0));
        let s = summarize(&[row(Algorithm::Aur, 0.1, 0.2), row(Algorithm::Aur, 0.2, 0.2)]);
        assert!((s[0].blocking_mean - 0.15).abs() < 1e-15);

        let s = summarize(&[
            row(Algorithm::Mrpr, 0.1, 0.03),
            row(Algorithm::Aur, 0.1, 0.04),
            row(Algorithm::Llr, 0.2, 0.0),
        ]);
        assert_eq!(s.len(), 3);
        let m = &s[0];
        assert!((m.reconfig_gain_vs_aur.unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(m.reconfig_gain_vs_llr, None);
        assert!((m.blocking_gain_vs_llr.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(s[1].reconfig_gain_vs_aur, None);

        let mut buf = Vec::new();
        write_summary(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(SUMMARY_HEADER));
        assert!(text.lines().nth(2).unwrap().ends_with("NA,NA,NA,NA"));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            row(Algorithm::Mrpr, 1.0 / 3.0, 0.1 + 0.2),
            row(Algorithm::Llr, 0.0, 1e-300),
        ];
        let mut buf = Vec::new();
        write_rows(&rows, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with(CSV_HEADER));
        assert_eq!(read_rows(buf.as_slice()).unwrap(), rows);

        let mut buf = Vec::new();
        write_rows(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), CSV_HEADER);
        assert!(read_rows("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn sweep_cardinality_and_order() {
        let cfg = ExperimentConfig {
            lambda_t: vec![2.0, 4.0],
            reliability_ratios: vec![0.1],
            replications: 2,
            sim: SimConfig {
                requests: 300,
                ..ExperimentConfig::default().sim
            },
            ..ExperimentConfig::default()
        };
        let res = run_sweep_on(&cfg, &example()).unwrap();
        assert_eq!(res.rows.len(), 12);
        let algs: Vec<Algorithm> = res.rows.iter().take(6).map(|r| r.algorithm).collect();
        assert_eq!(
            algs,
            vec![
                Algorithm::Mrpr,
                Algorithm::Mrpr,
                Algorithm::Aur,
                Algorithm::Aur,
                Algorithm::Llr,
                Algorithm::Llr
            ]
        );
        assert_eq!(res.rows[0].seed, res.rows[2].seed, "algorithms share seeds");
        assert_ne!(res.rows[0].seed, res.rows[1].seed);
        assert!(res.rows.iter().all(|r| r.wallclock_s == 0.0));
        assert!(res.dumps.is_empty());
    }
}
