//! Simulation engine for attitude similarity in friendship networks.
//!
//! A run grows a scale-free friendship network, promotes some friendships to
//! directed close-friend ties, lets one or more attitude mechanisms act on it
//! (contagion, homophily, confounding) and measures how strongly each node's
//! attitude correlates with its alters' attitudes, per tie type and per
//! degree of separation.
//!
//! ```
//! use attnet_core::{experiment, GenParams, MechanismParams, MechanismSchedule};
//! use attnet_core::{mechanisms::run_simulation, netgen::generate_network, RelationClass};
//!
//! let mut rng = experiment::replication_rng(7);
//! let gen = GenParams { n: 200, ..GenParams::default() };
//! let mut net = generate_network(&gen, &mut rng).unwrap();
//! let schedule = MechanismSchedule { iterations: 2_000, snapshot_every: 1_000, ..Default::default() };
//! let snaps = run_simulation(&mut net, &MechanismParams::default(), &schedule, &mut rng).unwrap();
//! assert_eq!(snaps.len(), 3);
//! let mutual = snaps[2].report.value(RelationClass::Mutual);
//! assert!(mutual.unwrap() > 0.0);
//! ```

pub mod config;
pub mod error;
pub mod experiment;
pub mod fingerprint;
pub mod graph;
pub mod io;
pub mod mechanisms;
pub mod metrics;
pub mod netgen;
pub mod par;

pub use config::SimulationConfig;
pub use error::{
    ConfigError, ExperimentError, GenError, GraphError, MetricsError, NetworkIoError, SimError,
};
pub use experiment::{ReplicationResult, ReplicationSummary};
pub use graph::{Attitude, AttitudeNetwork, NodeId, RelationClass, TieKind};
pub use mechanisms::{Mechanism, MechanismParams, MechanismSchedule, ScheduleMode, Snapshot};
pub use metrics::{CorrelationReport, EgoAlterMatrix};
pub use netgen::GenParams;
pub use par::Execution;
