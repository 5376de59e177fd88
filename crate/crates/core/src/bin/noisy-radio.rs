use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use noisy_radio::harness::{
    apply_axis, gap_report, geometric_chernoff_budget, run_experiment, sweep_csv, Axis, ExperimentConfig, GapConfig,
    SweepRow,
};
use noisy_radio::topo::{cluster_map_text, generate, TopologySpec};
use noisy_radio::Error;

#[derive(Parser)]
#[command(name = "noisy-radio", version, about = "Broadcast experiments on noisy radio networks")]
struct Cli {
    /// Base seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trial count; overrides the config.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Round budget per trial; overrides the config.
    #[arg(long, global = true)]
    max_rounds: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment and print its JSON result.
    Run { config: PathBuf },
    /// Run one experiment per axis value and print CSV.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Coding over routing throughput on one topology.
    Gap { config: PathBuf },
    /// Write a topology as an edge list (plus a `.clusters` sidecar for WCT).
    GenTopo {
        spec: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Geometric Chernoff round budget.
    Budget {
        #[arg(long)]
        count: u64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
}

fn read(path: &PathBuf) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn overrides(cli: &Cli, cfg: &mut ExperimentConfig) {
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    if let Some(m) = cli.max_rounds {
        cfg.max_rounds = m;
    }
}

fn experiment(cli: &Cli, path: &PathBuf) -> Result<(ExperimentConfig, Option<PathBuf>), Error> {
    let mut cfg = ExperimentConfig::from_json(&read(path)?)?;
    overrides(cli, &mut cfg);
    cfg.validate()?;
    let out = cli.out.clone().or_else(|| cfg.out.clone().map(PathBuf::from));
    Ok((cfg, out))
}

fn main_inner(cli: &Cli) -> Result<(), Error> {
    match &cli.cmd {
        Cmd::Run { config } => {
            let (cfg, out) = experiment(cli, config)?;
            let r = run_experiment(&cfg)?;
            emit(out.as_ref(), &(r.to_json() + "\n"))
        }
        Cmd::Sweep { config, axis, values } => {
            let (cfg, out) = experiment(cli, config)?;
            let axis: Axis = axis.parse()?;
            if values.is_empty() {
                return Err(Error::Config("--values is empty".into()));
            }
            let cfgs = values.iter().map(|&v| apply_axis(&cfg, axis, v)).collect::<Result<Vec<_>, _>>()?;
            let mut rows = Vec::new();
            for (c, &value) in cfgs.iter().zip(values) {
                rows.push(SweepRow { value, result: run_experiment(c)? });
            }
            emit(out.as_ref(), &sweep_csv(axis, &rows))
        }
        Cmd::Gap { config } => {
            let mut g: GapConfig = serde_json::from_str(&read(config)?)?;
            if let Some(s) = cli.seed {
                g.seed = s;
            }
            if let Some(t) = cli.trials {
                g.trials = t;
            }
            if let Some(m) = cli.max_rounds {
                g.max_rounds = m;
            }
            let r = gap_report(&g)?;
            emit(cli.out.as_ref(), &(serde_json::to_string_pretty(&r)? + "\n"))
        }
        Cmd::GenTopo { spec, output } => {
            let mut s: TopologySpec = serde_json::from_str(&read(spec)?)?;
            if let Some(seed) = cli.seed {
                if let TopologySpec::RandomConnected { seed: x, .. } | TopologySpec::Wct { seed: x, .. } = &mut s {
                    *x = seed;
                }
            }
            let g = generate(&s)?;
            let out = output.clone().or_else(|| cli.out.clone());
            emit(out.as_ref(), &g.topology.to_edge_list())?;
            if let Some(clusters) = &g.clusters {
                let text = cluster_map_text(clusters);
                match &out {
                    Some(p) => {
                        let mut side = p.clone().into_os_string();
                        side.push(".clusters");
                        fs::write(&side, text).map_err(|e| Error::Io(e.to_string()))?;
                    }
                    None => print!("{text}"),
                }
            }
            Ok(())
        }
        Cmd::Budget { count, delta, p } => {
            let b = geometric_chernoff_budget(*count, *delta, *p).map_err(|e| Error::Config(e.to_string()))?;
            emit(cli.out.as_ref(), &(serde_json::to_string_pretty(&b)? + "\n"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::UndefinedGap(_) | Error::Generation(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
