//! Replication harness.
//!
//! Replication `r` is seeded with `base_seed + r` and owns its network and
//! RNG, so replications can run in any order or in parallel. Results are
//! gathered by index and written by a single writer, which makes every
//! output byte a function of the configuration alone.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::SimulationConfig;
use crate::error::ExperimentError;
use crate::graph::{AttitudeNetwork, RelationClass};
use crate::io::export_network;
use crate::mechanisms::{run_simulation, Snapshot};
use crate::metrics::CorrelationReport;
use crate::netgen::generate_network;
use crate::par::{map_indexed, Execution};

pub const CONFIG_FILE: &str = "config.txt";
pub const FINAL_FILE: &str = "final.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SUMMARY_SERIES_FILE: &str = "summary_timeseries.csv";
pub const REPLICATION_DIR: &str = "replications";
pub const SWEEP_FILE: &str = "sweep.csv";
/// Per-replication final networks, written only on request.
pub const NETWORK_DIR: &str = "networks";

/// The RNG every replication draws from.
pub type ReplicationRng = ChaCha8Rng;

pub fn replication_rng(seed: u64) -> ReplicationRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub replication: usize,
    pub seed: u64,
    pub snapshots: Vec<Snapshot>,
}

impl ReplicationResult {
    pub fn final_report(&self) -> &CorrelationReport {
        &self
            .snapshots
            .last()
            .expect("at least the initial snapshot")
            .report
    }
}

/// Generates the network for replication `r` and runs the schedule on it.
/// Returns the final network alongside the snapshots.
pub fn run_replication_with_network(
    config: &SimulationConfig,
    r: usize,
) -> Result<(ReplicationResult, AttitudeNetwork), ExperimentError> {
    let seed = config.replication_seed(r);
    let mut rng = replication_rng(seed);
    let mut net = generate_network(&config.gen, &mut rng)?;
    let snapshots = run_simulation(&mut net, &config.mechanisms, &config.schedule, &mut rng)?;
    Ok((
        ReplicationResult {
            replication: r,
            seed,
            snapshots,
        },
        net,
    ))
}

pub fn run_replication(
    config: &SimulationConfig,
    r: usize,
) -> Result<ReplicationResult, ExperimentError> {
    run_replication_with_network(config, r).map(|(res, _)| res)
}

/// Runs every replication and returns them in index order.
pub fn run_replications(
    config: &SimulationConfig,
    exec: Execution,
) -> Result<Vec<ReplicationResult>, ExperimentError> {
    config.validate()?;
    map_indexed(exec, config.replications, |r| run_replication(config, r))
        .into_iter()
        .collect()
}

/// Mean, spread and range of the defined correlations of one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassStats {
    pub class: RelationClass,
    /// `None` when no replication produced a defined value.
    pub mean: Option<f64>,
    /// Sample standard deviation; zero for a single value.
    pub std_dev: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub defined: usize,
    pub undefined: usize,
}

impl ClassStats {
    /// Statistics of `values`, where `None` marks an undefined correlation.
    /// Values are sorted before summation, so the result does not depend on
    /// their order.
    pub fn from_values(class: RelationClass, values: &[Option<f64>]) -> Self {
        let mut defined: Vec<f64> = values.iter().flatten().copied().collect();
        defined.sort_by(f64::total_cmp);
        let undefined = values.len() - defined.len();
        let n = defined.len();
        if n == 0 {
            return ClassStats {
                class,
                mean: None,
                std_dev: None,
                min: None,
                max: None,
                defined: 0,
                undefined,
            };
        }
        let mean = defined.iter().sum::<f64>() / n as f64;
        let std_dev = if n > 1 {
            let ss: f64 = defined.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        ClassStats {
            class,
            mean: Some(mean),
            std_dev: Some(std_dev),
            min: defined.first().copied(),
            max: defined.last().copied(),
            defined: n,
            undefined,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub iteration: usize,
    pub stats: [ClassStats; 7],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSummary {
    pub replications: usize,
    /// Statistics of the final correlations, in [`RelationClass::ALL`] order.
    pub final_stats: [ClassStats; 7],
    /// Cross-replication statistics at every snapshot iteration.
    pub series: Vec<SeriesPoint>,
}

impl ReplicationSummary {
    pub fn from_results(results: &[ReplicationResult]) -> Self {
        let finals: Vec<&CorrelationReport> = results.iter().map(|r| r.final_report()).collect();
        let final_stats = stats_of(&finals);
        let len = results.iter().map(|r| r.snapshots.len()).min().unwrap_or(0);
        let series = (0..len)
            .map(|k| {
                let reports: Vec<&CorrelationReport> =
                    results.iter().map(|r| &r.snapshots[k].report).collect();
                SeriesPoint {
                    iteration: results[0].snapshots[k].iteration,
                    stats: stats_of(&reports),
                }
            })
            .collect();
        ReplicationSummary {
            replications: results.len(),
            final_stats,
            series,
        }
    }

    pub fn get(&self, class: RelationClass) -> &ClassStats {
        &self.final_stats[class.row()]
    }

    pub fn mean(&self, class: RelationClass) -> Option<f64> {
        self.get(class).mean
    }
}

fn stats_of(reports: &[&CorrelationReport]) -> [ClassStats; 7] {
    RelationClass::ALL.map(|class| {
        let values: Vec<Option<f64>> = reports.iter().map(|r| r.value(class)).collect();
        ClassStats::from_values(class, &values)
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write(path: &Path, text: &str) -> Result<(), ExperimentError> {
    fs::write(path, text).map_err(io_err(path))
}

pub const SERIES_HEADER: &str = "replication,iteration,relation_class,correlation,n_effective";

/// Time-series rows of one replication.
pub fn replication_csv(result: &ReplicationResult) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for snap in &result.snapshots {
        for e in snap.report.entries() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                result.replication,
                snap.iteration,
                e.class,
                opt(e.value),
                e.n_effective
            );
        }
    }
    out
}

pub fn final_csv(results: &[ReplicationResult]) -> String {
    let mut out = String::from("replication,seed,relation_class,correlation,n_effective\n");
    for r in results {
        for e in r.final_report().entries() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.replication,
                r.seed,
                e.class,
                opt(e.value),
                e.n_effective
            );
        }
    }
    out
}

const STATS_HEADER: &str = "mean,std,min,max,n_defined,n_undefined";

fn stats_row(s: &ClassStats) -> String {
    format!(
        "{},{},{},{},{},{}",
        opt(s.mean),
        opt(s.std_dev),
        opt(s.min),
        opt(s.max),
        s.defined,
        s.undefined
    )
}

pub fn summary_csv(summary: &ReplicationSummary) -> String {
    let mut out = format!("relation_class,{STATS_HEADER}\n");
    for s in &summary.final_stats {
        let _ = writeln!(out, "{},{}", s.class, stats_row(s));
    }
    out
}

pub fn summary_series_csv(summary: &ReplicationSummary) -> String {
    let mut out = format!("iteration,relation_class,{STATS_HEADER}\n");
    for p in &summary.series {
        for s in &p.stats {
            let _ = writeln!(out, "{},{},{}", p.iteration, s.class, stats_row(s));
        }
    }
    out
}

/// Configuration plus run metadata, written next to the result tables.
pub fn metadata_text(config: &SimulationConfig) -> String {
    let mut out = String::new();
    out.push_str("# attnet experiment configuration\n");
    out.push_str("# replication r uses seed base_seed + r\n");
    out.push_str("# ego-alter cells with no alters are dropped pairwise before correlating\n");
    out.push_str("# distances 2-4 are measured on the undirected close-friend layer\n");
    out.push_str(&config.to_text());
    out
}

/// Makes sure `dir` exists and is writable by writing the metadata file.
fn prepare_output(config: &SimulationConfig) -> Result<PathBuf, ExperimentError> {
    let dir = config.output_dir.clone();
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    write(&dir.join(CONFIG_FILE), &metadata_text(config))?;
    Ok(dir)
}

pub fn write_results(
    dir: &Path,
    results: &[ReplicationResult],
    summary: &ReplicationSummary,
) -> Result<(), ExperimentError> {
    let reps = dir.join(REPLICATION_DIR);
    fs::create_dir_all(&reps).map_err(io_err(&reps))?;
    for r in results {
        write(
            &reps.join(format!("rep_{:05}.csv", r.replication)),
            &replication_csv(r),
        )?;
    }
    write(&dir.join(FINAL_FILE), &final_csv(results))?;
    write(&dir.join(SUMMARY_FILE), &summary_csv(summary))?;
    write(&dir.join(SUMMARY_SERIES_FILE), &summary_series_csv(summary))?;
    Ok(())
}

/// Runs all replications of `config` and writes the result tables into its
/// output directory.
pub fn run_experiment(config: &SimulationConfig) -> Result<ReplicationSummary, ExperimentError> {
    run_experiment_with(config, Execution::default())
}

pub fn run_experiment_with(
    config: &SimulationConfig,
    exec: Execution,
) -> Result<ReplicationSummary, ExperimentError> {
    config.validate()?;
    let dir = prepare_output(config)?;
    let results = run_replications(config, exec)?;
    let summary = ReplicationSummary::from_results(&results);
    write_results(&dir, &results, &summary)?;
    Ok(summary)
}

/// [`run_experiment_with`], additionally exporting every replication's final
/// network to `networks/rep_NNNNN/`.
pub fn run_experiment_exporting(
    config: &SimulationConfig,
    exec: Execution,
) -> Result<ReplicationSummary, ExperimentError> {
    config.validate()?;
    let dir = prepare_output(config)?;
    let runs: Vec<(ReplicationResult, AttitudeNetwork)> =
        map_indexed(exec, config.replications, |r| {
            run_replication_with_network(config, r)
        })
        .into_iter()
        .collect::<Result<_, _>>()?;
    let networks = dir.join(NETWORK_DIR);
    for (result, net) in &runs {
        export_network(
            net,
            &networks.join(format!("rep_{:05}", result.replication)),
        )?;
    }
    let results: Vec<ReplicationResult> = runs.into_iter().map(|(r, _)| r).collect();
    let summary = ReplicationSummary::from_results(&results);
    write_results(&dir, &results, &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: String,
    pub summary: ReplicationSummary,
}

/// Runs one experiment per value of `param`, each in its own
/// `<output_dir>/<param>=<value>` directory, and writes `sweep.csv` with
/// the final statistics of every point.
pub fn run_sweep(
    base: &SimulationConfig,
    param: &str,
    values: &[String],
    exec: Execution,
) -> Result<Vec<SweepPoint>, ExperimentError> {
    let mut configs = Vec::with_capacity(values.len());
    for value in values {
        let mut cfg = base.clone();
        cfg.set(param, value)?;
        cfg.output_dir = base.output_dir.join(format!("{param}={value}"));
        cfg.validate()?;
        configs.push(cfg);
    }
    fs::create_dir_all(&base.output_dir).map_err(io_err(&base.output_dir))?;
    let mut points = Vec::with_capacity(configs.len());
    let mut table = format!("param,value,relation_class,{STATS_HEADER}\n");
    for (cfg, value) in configs.iter().zip(values) {
        let summary = run_experiment_with(cfg, exec)?;
        for s in &summary.final_stats {
            let _ = writeln!(table, "{param},{value},{},{}", s.class, stats_row(s));
        }
        points.push(SweepPoint {
            value: value.clone(),
            summary,
        });
    }
    write(&base.output_dir.join(SWEEP_FILE), &table)?;
    Ok(points)
}
