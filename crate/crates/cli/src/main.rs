use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::LazyLock;

use anyhow::{bail, Context, Result};
use attnet_core::config::{load_config, KEYS};
use attnet_core::experiment::{
    replication_rng, run_experiment_exporting, run_experiment_with, run_sweep, ReplicationSummary,
};
use attnet_core::io::{export_network, import_network};
use attnet_core::metrics::correlation_report_with;
use attnet_core::netgen::generate_network;
use attnet_core::{CorrelationReport, Execution, GenParams, SimulationConfig};
use clap::{Args, Parser, Subcommand};

static CONFIG_HELP: LazyLock<String> = LazyLock::new(|| {
    let mut out = String::from("Configuration keys (key = value, one per line, # comments):\n");
    for (key, default, description) in KEYS {
        let _ = writeln!(out, "  {key:<20} default {default:<14} {description}");
    }
    out.push_str(
        "\nn and m are run-scale choices; p_close, p_mutual, the mechanism weights and the\n\
         threshold are the model's calibration. Replication r uses seed base_seed + r.",
    );
    out
});

/// Attitude similarity simulations on scale-free friendship networks.
#[derive(Parser)]
#[command(name = "attnet", version, after_long_help = CONFIG_HELP.as_str())]
struct Cli {
    /// Run replications one after another instead of in parallel.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a network and write nodes.csv and ties.csv into a directory.
    ///
    /// The network is the initial network of a replication seeded with --seed.
    Generate {
        #[arg(long, default_value_t = GenParams::default().n)]
        n: usize,
        #[arg(long, default_value_t = GenParams::default().m)]
        m: usize,
        #[arg(long, default_value_t = GenParams::default().p_close)]
        p_close: f64,
        #[arg(long, default_value_t = GenParams::default().p_mutual)]
        p_mutual: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory.
        #[arg(long, default_value = "network")]
        out: PathBuf,
    },
    /// Run a full experiment and write its result tables.
    #[command(after_long_help = CONFIG_HELP.as_str())]
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Also export each replication's final network.
        #[arg(long)]
        export_networks: bool,
    },
    /// Print the correlation report of an exported network as CSV.
    Analyze {
        /// Directory holding nodes.csv and ties.csv.
        network: PathBuf,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one experiment per value of a single configuration key.
    #[command(after_long_help = CONFIG_HELP.as_str())]
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Key to vary, e.g. contagion_weight or homophily_threshold.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file; absent keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides base_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides output_dir.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides any key, e.g. --set iterations=2000. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl RunArgs {
    fn config(&self) -> Result<SimulationConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => SimulationConfig::default(),
        };
        for kv in &self.overrides {
            let Some((key, value)) = kv.split_once('=') else {
                bail!("--set expects KEY=VALUE, got {kv:?}");
            };
            cfg.set(key.trim(), value)?;
        }
        if let Some(seed) = self.seed {
            cfg.base_seed = seed;
        }
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn report_csv(report: &CorrelationReport) -> String {
    let mut out = String::from("relation_class,correlation,n_effective\n");
    for e in report.entries() {
        let value = e.value.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{value},{}", e.class, e.n_effective);
    }
    out
}

fn print_summary(summary: &ReplicationSummary) {
    println!("relation_class       mean     std  defined");
    for s in &summary.final_stats {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
        println!(
            "{:<16} {:>8} {:>7} {:>8}",
            s.class,
            fmt(s.mean),
            fmt(s.std_dev),
            s.defined
        );
    }
}

fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Generate {
            n,
            m,
            p_close,
            p_mutual,
            seed,
            out,
        } => {
            let params = GenParams {
                n,
                m,
                p_close,
                p_mutual,
            };
            let net = generate_network(&params, &mut replication_rng(seed))?;
            export_network(&net, &out)?;
            eprintln!(
                "{} nodes, {} base ties, {} close ties -> {}",
                net.node_count(),
                net.base_tie_count(),
                net.close_tie_count(),
                out.display()
            );
        }
        Command::Simulate {
            run,
            export_networks,
        } => {
            let cfg = run.config()?;
            let summary = if export_networks {
                run_experiment_exporting(&cfg, exec)?
            } else {
                run_experiment_with(&cfg, exec)?
            };
            print_summary(&summary);
            eprintln!("results in {}", cfg.output_dir.display());
        }
        Command::Analyze { network, out } => {
            let net = import_network(&network)?;
            let csv = report_csv(&correlation_report_with(&net, exec));
            match out {
                Some(path) => {
                    fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{csv}"),
            }
        }
        Command::Sweep { run, param, values } => {
            let cfg = run.config()?;
            for point in run_sweep(&cfg, &param, &values, exec)? {
                println!("{param} = {}", point.value);
                print_summary(&point.summary);
            }
            eprintln!("results in {}", cfg.output_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
