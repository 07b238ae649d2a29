use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use wdmsim::auxgraph::{build_spn_graph, CostInputs, CostSettings};
use wdmsim::experiment::{
    read_rows, run_sweep, summarize, write_rows, write_state_dump, write_summary, write_traces,
    ExperimentConfig, ExperimentError,
};
use wdmsim::simulator::{SimConfig, Simulation};
use wdmsim::topology::ConversionMode;
use wdmsim::{Algorithm, Topology};

#[derive(Parser)]
#[command(name = "wdmsim", version, about = "Lightpath routing simulator for optical networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a config file and write one CSV row per run.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Replaces `base_seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Run only this algorithm.
        #[arg(long)]
        algorithm: Option<Algorithm>,
        /// Write a per-event trace of every run to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Per-point means, standard errors and MRPR gains of a sweep CSV.
    Summarize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Print the layered auxiliary graph for one request in Graphviz format.
    Auxgraph {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        source: String,
        #[arg(long)]
        dest: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Exit code 1 for bad input or I/O, 2 for a run that broke an invariant.
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        if e.is_config() {
            Failure::Config(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(Failure::Config)
}

fn io<T>(r: std::io::Result<T>, path: &Path) -> Result<T, Failure> {
    r.with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Config)
}

fn simulate(
    config: PathBuf,
    output: PathBuf,
    seed: Option<u64>,
    algorithm: Option<Algorithm>,
    trace: Option<PathBuf>,
) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::from_file(&config)?;
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    if let Some(a) = algorithm {
        cfg.algorithms = vec![a];
    }
    cfg.sim.trace = trace.is_some();
    let result = run_sweep(&cfg)?;
    let mut out = create(&output)?;
    write_rows(&result.rows, &mut out)?;
    io(out.flush(), &output)?;
    if let Some(path) = trace {
        let mut w = create(&path)?;
        io(write_traces(&result.traces, &mut w), &path)?;
        io(w.flush(), &path)?;
    }
    if let Some(path) = &cfg.state_dump {
        let mut w = create(path)?;
        write_state_dump(&result.dumps, &mut w)?;
        io(w.flush(), path)?;
    }
    eprintln!("wrote {} rows to {}", result.rows.len(), output.display());
    Ok(())
}

fn summarize_cmd(input: PathBuf, output: PathBuf) -> Result<(), Failure> {
    let file = File::open(&input)
        .with_context(|| format!("cannot open {}", input.display()))
        .map_err(Failure::Config)?;
    let rows = read_rows(file)?;
    if rows.is_empty() {
        return Err(Failure::Config(anyhow::anyhow!("{} has no rows", input.display())));
    }
    let mut out = create(&output)?;
    write_summary(&summarize(&rows), &mut out)?;
    io(out.flush(), &output)
}

fn auxgraph(
    topology: PathBuf,
    source: String,
    dest: String,
    output: Option<PathBuf>,
) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&topology)
        .with_context(|| format!("cannot read {}", topology.display()))
        .map_err(Failure::Config)?;
    let t = Topology::parse(&text)
        .with_context(|| topology.display().to_string())
        .map_err(Failure::Config)?
        .with_mode(ConversionMode::SharePerNode);
    let lookup = |label: &str| {
        t.router_by_label(label)
            .ok_or_else(|| Failure::Config(anyhow::anyhow!("no router labelled `{label}`")))
    };
    let (s, d) = (lookup(&source)?, lookup(&dest)?);
    if s == d {
        return Err(Failure::Config(anyhow::anyhow!("source and destination must differ")));
    }
    // priors only: what a router knows before any traffic
    let config = SimConfig::default();
    let sim = Simulation::new(&t, config.clone(), Algorithm::Mrpr, 0)
        .map_err(|e| Failure::Config(e.into()))?;
    let settings = CostSettings {
        model: config.cost_model,
        mean_holding: config.mean_holding,
        wi_link_repacking: false,
    };
    let inputs = CostInputs::from_stats(&t, sim.state(), sim.stats(), &settings, s, d);
    let aux = build_spn_graph(&t, sim.state(), &inputs, &config.cost_model, s, d)
        .map_err(|e| Failure::Config(e.into()))?;
    let dot = aux.to_dot(&t);
    match output {
        Some(path) => io(std::fs::write(&path, dot), &path),
        None => {
            print!("{dot}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Simulate {
            config,
            output,
            seed,
            algorithm,
            trace,
        } => simulate(config, output, seed, algorithm, trace),
        Command::Summarize { input, output } => summarize_cmd(input, output),
        Command::Auxgraph {
            topology,
            source,
            dest,
            output,
        } => auxgraph(topology, source, dest, output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("runtime error: {e:#}");
            ExitCode::from(2)
        }
    }
}
