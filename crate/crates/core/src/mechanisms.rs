//! Attitude-shaping mechanisms and the simulation loop.
//!
//! Each mechanism is a single stochastic step over a network:
//!
//! * contagion: the source of a random close tie moves its attitude toward
//!   the friend it names, at twice the weight when the tie is mutual;
//! * homophily: two random strong-attitude nodes become mutual close friends;
//! * confounding: a random node and a random friend of it are both pulled
//!   toward a shared external stimulus.
//!
//! Every update is a convex combination of values in `[0, 1]`, so attitudes
//! never leave the unit interval.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::SimError;
use crate::graph::{Attitude, AttitudeNetwork, NodeId};
use crate::metrics::{correlation_report, CorrelationReport};

pub const DEFAULT_CONTAGION_WEIGHT: f64 = 0.05;
pub const DEFAULT_HOMOPHILY_THRESHOLD: f64 = 0.8;
pub const DEFAULT_CONFOUNDING_WEIGHT: f64 = 1.0;
pub const DEFAULT_ITERATIONS: usize = 50_000;
pub const DEFAULT_SNAPSHOT_EVERY: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismParams {
    /// Contagion weight in `(0, 0.5]`; doubled on mutual ties.
    pub contagion_weight: f64,
    /// Attitude at or above which a node counts as strong, in `(0, 1)`.
    pub homophily_threshold: f64,
    /// Pull toward the confounding stimulus, in `(0, 1]`.
    pub confounding_weight: f64,
}

impl Default for MechanismParams {
    fn default() -> Self {
        MechanismParams {
            contagion_weight: DEFAULT_CONTAGION_WEIGHT,
            homophily_threshold: DEFAULT_HOMOPHILY_THRESHOLD,
            confounding_weight: DEFAULT_CONFOUNDING_WEIGHT,
        }
    }
}

impl MechanismParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let w = self.contagion_weight;
        if !(w > 0.0 && w <= 0.5) {
            return Err(invalid(
                "contagion_weight",
                format!("{w} is outside (0, 0.5]"),
            ));
        }
        let t = self.homophily_threshold;
        if !(t > 0.0 && t < 1.0) {
            return Err(invalid(
                "homophily_threshold",
                format!("{t} is outside (0, 1)"),
            ));
        }
        let c = self.confounding_weight;
        if !(c > 0.0 && c <= 1.0) {
            return Err(invalid(
                "confounding_weight",
                format!("{c} is outside (0, 1]"),
            ));
        }
        Ok(())
    }
}

fn invalid(field: &'static str, reason: String) -> SimError {
    SimError::InvalidParam { field, reason }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mechanism {
    Contagion,
    Homophily,
    Confounding,
}

impl Mechanism {
    pub const ALL: [Mechanism; 3] = [
        Mechanism::Contagion,
        Mechanism::Homophily,
        Mechanism::Confounding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Contagion => "contagion",
            Mechanism::Homophily => "homophily",
            Mechanism::Confounding => "confounding",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleMode {
    PureContagion,
    PureHomophily,
    PureConfounding,
    /// Per-iteration mechanism probabilities, summing to one.
    Mixed {
        contagion: f64,
        homophily: f64,
        confounding: f64,
    },
}

impl ScheduleMode {
    pub fn pure(mechanism: Mechanism) -> Self {
        match mechanism {
            Mechanism::Contagion => ScheduleMode::PureContagion,
            Mechanism::Homophily => ScheduleMode::PureHomophily,
            Mechanism::Confounding => ScheduleMode::PureConfounding,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScheduleMode::PureContagion => "PureContagion",
            ScheduleMode::PureHomophily => "PureHomophily",
            ScheduleMode::PureConfounding => "PureConfounding",
            ScheduleMode::Mixed { .. } => "Mixed",
        }
    }
}

impl FromStr for ScheduleMode {
    type Err = String;

    /// Parses the mode name; `Mixed` starts as an even split to be filled in
    /// by the caller.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "purecontagion" | "contagion" => Ok(ScheduleMode::PureContagion),
            "purehomophily" | "homophily" => Ok(ScheduleMode::PureHomophily),
            "pureconfounding" | "confounding" => Ok(ScheduleMode::PureConfounding),
            "mixed" => Ok(ScheduleMode::Mixed {
                contagion: 1.0 / 3.0,
                homophily: 1.0 / 3.0,
                confounding: 1.0 / 3.0,
            }),
            _ => Err(format!(
                "unknown mode `{s}` (expected PureContagion, PureHomophily, PureConfounding or Mixed)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismSchedule {
    pub mode: ScheduleMode,
    pub iterations: usize,
    pub snapshot_every: usize,
}

impl Default for MechanismSchedule {
    fn default() -> Self {
        MechanismSchedule {
            mode: ScheduleMode::PureContagion,
            iterations: DEFAULT_ITERATIONS,
            snapshot_every: DEFAULT_SNAPSHOT_EVERY,
        }
    }
}

impl MechanismSchedule {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.snapshot_every == 0 {
            return Err(invalid("snapshot_every", "must be positive".into()));
        }
        if let ScheduleMode::Mixed {
            contagion,
            homophily,
            confounding,
        } = self.mode
        {
            for (field, p) in [
                ("mix_contagion", contagion),
                ("mix_homophily", homophily),
                ("mix_confounding", confounding),
            ] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(field, format!("{p} is not a probability")));
                }
            }
            let sum = contagion + homophily + confounding;
            if (sum - 1.0).abs() > 1e-12 {
                return Err(invalid(
                    "mix_contagion",
                    format!("mix probabilities sum to {sum}, not 1"),
                ));
            }
        }
        Ok(())
    }

    /// Iterations at which a snapshot is taken: 0, every `snapshot_every`,
    /// and the last iteration.
    pub fn snapshot_iterations(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..=self.iterations)
            .step_by(self.snapshot_every.max(1))
            .collect();
        if out.last() != Some(&self.iterations) {
            out.push(self.iterations);
        }
        out
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> Mechanism {
        match self.mode {
            ScheduleMode::PureContagion => Mechanism::Contagion,
            ScheduleMode::PureHomophily => Mechanism::Homophily,
            ScheduleMode::PureConfounding => Mechanism::Confounding,
            ScheduleMode::Mixed {
                contagion,
                homophily,
                ..
            } => {
                let u: f64 = rng.gen();
                if u < contagion {
                    Mechanism::Contagion
                } else if u < contagion + homophily {
                    Mechanism::Homophily
                } else {
                    Mechanism::Confounding
                }
            }
        }
    }
}

/// `target * weight + current * (1 - weight)`.
#[inline]
pub fn weighted_pull(current: f64, target: f64, weight: f64) -> f64 {
    target * weight + current * (1.0 - weight)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContagionOutcome {
    Updated {
        ego: NodeId,
        alter: NodeId,
        mutual: bool,
        before: f64,
        after: f64,
    },
    NoCloseTies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomophilyOutcome {
    TieCreated(NodeId, NodeId),
    AlreadyTied(NodeId, NodeId),
    TooFewStrong { eligible: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConfoundingOutcome {
    Influenced {
        node: NodeId,
        friend: NodeId,
        stimulus: f64,
        node_before: f64,
        node_after: f64,
        friend_before: f64,
        friend_after: f64,
    },
    Isolated(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepReport {
    Contagion(ContagionOutcome),
    Homophily(HomophilyOutcome),
    Confounding(ConfoundingOutcome),
}

impl StepReport {
    pub fn is_noop(&self) -> bool {
        matches!(
            self,
            StepReport::Contagion(ContagionOutcome::NoCloseTies)
                | StepReport::Homophily(HomophilyOutcome::AlreadyTied(..))
                | StepReport::Homophily(HomophilyOutcome::TooFewStrong { .. })
                | StepReport::Confounding(ConfoundingOutcome::Isolated(_))
        )
    }
}

fn set(network: &mut AttitudeNetwork, node: NodeId, value: f64) {
    let a = Attitude::new(value).expect("convex update left [0, 1]");
    network.set_attitude(node, a).expect("node exists");
}

/// Samples one directed close tie uniformly and pulls its source toward
/// its target.
pub fn contagion_step<R: Rng + ?Sized>(
    network: &mut AttitudeNetwork,
    params: &MechanismParams,
    rng: &mut R,
) -> ContagionOutcome {
    let ties = network.close_ties();
    if ties.is_empty() {
        let _: u64 = rng.gen();
        return ContagionOutcome::NoCloseTies;
    }
    let (ego, alter) = ties[rng.gen_range(0..ties.len())];
    let mutual = network.has_close_tie(alter, ego);
    let weight = if mutual {
        2.0 * params.contagion_weight
    } else {
        params.contagion_weight
    };
    let before = network.attitude(ego);
    let after = weighted_pull(before, network.attitude(alter), weight);
    set(network, ego, after);
    ContagionOutcome::Updated {
        ego,
        alter,
        mutual,
        before,
        after,
    }
}

/// Ties two random strong-attitude nodes with a base tie and a mutual
/// close pair.
pub fn homophily_step<R: Rng + ?Sized>(
    network: &mut AttitudeNetwork,
    params: &MechanismParams,
    rng: &mut R,
) -> HomophilyOutcome {
    let strong: Vec<NodeId> = network
        .nodes()
        .filter(|&v| network.attitude(v) >= params.homophily_threshold)
        .collect();
    if strong.len() < 2 {
        let _: u64 = rng.gen();
        return HomophilyOutcome::TooFewStrong {
            eligible: strong.len(),
        };
    }
    let i = rng.gen_range(0..strong.len());
    let mut j = rng.gen_range(0..strong.len() - 1);
    if j >= i {
        j += 1;
    }
    let (a, b) = (strong[i], strong[j]);
    if network.has_base_tie(a, b) {
        return HomophilyOutcome::AlreadyTied(a, b);
    }
    network.add_base_tie(a, b).expect("distinct existing nodes");
    network.add_close_tie(a, b).expect("base tie just added");
    network.add_close_tie(b, a).expect("base tie just added");
    HomophilyOutcome::TieCreated(a, b)
}

/// Pulls a random node and one of its friends toward a shared uniform
/// stimulus.
pub fn confounding_step<R: Rng + ?Sized>(
    network: &mut AttitudeNetwork,
    params: &MechanismParams,
    rng: &mut R,
) -> ConfoundingOutcome {
    let node = NodeId(rng.gen_range(0..network.node_count()));
    let friends = network.base_neighbors(node);
    if friends.is_empty() {
        return ConfoundingOutcome::Isolated(node);
    }
    let friend = friends[rng.gen_range(0..friends.len())];
    let stimulus: f64 = rng.gen();
    let w = params.confounding_weight;
    let node_before = network.attitude(node);
    let friend_before = network.attitude(friend);
    let node_after = weighted_pull(node_before, stimulus, w);
    let friend_after = weighted_pull(friend_before, stimulus, w);
    set(network, node, node_after);
    set(network, friend, friend_after);
    ConfoundingOutcome::Influenced {
        node,
        friend,
        stimulus,
        node_before,
        node_after,
        friend_before,
        friend_after,
    }
}

pub fn apply_step<R: Rng + ?Sized>(
    mechanism: Mechanism,
    network: &mut AttitudeNetwork,
    params: &MechanismParams,
    rng: &mut R,
) -> StepReport {
    match mechanism {
        Mechanism::Contagion => StepReport::Contagion(contagion_step(network, params, rng)),
        Mechanism::Homophily => StepReport::Homophily(homophily_step(network, params, rng)),
        Mechanism::Confounding => StepReport::Confounding(confounding_step(network, params, rng)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: usize,
    pub report: CorrelationReport,
}

/// Runs the schedule and collects a correlation report at every snapshot
/// iteration.
pub fn run_simulation<R: Rng + ?Sized>(
    network: &mut AttitudeNetwork,
    params: &MechanismParams,
    schedule: &MechanismSchedule,
    rng: &mut R,
) -> Result<Vec<Snapshot>, SimError> {
    let mut out = Vec::new();
    run_simulation_with(network, params, schedule, rng, |s| out.push(s.clone()))?;
    Ok(out)
}

/// Like [`run_simulation`] but hands each snapshot to `observe` instead of
/// collecting them.
pub fn run_simulation_with<R, F>(
    network: &mut AttitudeNetwork,
    params: &MechanismParams,
    schedule: &MechanismSchedule,
    rng: &mut R,
    mut observe: F,
) -> Result<(), SimError>
where
    R: Rng + ?Sized,
    F: FnMut(&Snapshot),
{
    params.validate()?;
    schedule.validate()?;
    let snap = |network: &AttitudeNetwork, iteration: usize| Snapshot {
        iteration,
        report: correlation_report(network),
    };
    observe(&snap(network, 0));
    for t in 1..=schedule.iterations {
        let mechanism = schedule.pick(rng);
        apply_step(mechanism, network, params, rng);
        if t % schedule.snapshot_every == 0 || t == schedule.iterations {
            observe(&snap(network, t));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair(a: f64, b: f64, mutual: bool) -> AttitudeNetwork {
        let mut net = AttitudeNetwork::new();
        let x = net.add_node(a).unwrap();
        let y = net.add_node(b).unwrap();
        net.add_base_tie(x, y).unwrap();
        net.add_close_tie(x, y).unwrap();
        if mutual {
            net.add_close_tie(y, x).unwrap();
        }
        net
    }

    fn params(w: f64) -> MechanismParams {
        MechanismParams {
            contagion_weight: w,
            ..MechanismParams::default()
        }
    }

    #[test]
    fn contagion_one_way_and_mutual() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut net = pair(0.2, 0.6, false);
        let out = contagion_step(&mut net, &params(0.1), &mut rng);
        match out {
            ContagionOutcome::Updated {
                ego, mutual, after, ..
            } => {
                assert_eq!(ego, NodeId(0));
                assert!(!mutual);
                assert!((after - 0.24).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(net.attitude(NodeId(1)), 0.6);

        // In a mutual pair either direction may be drawn; check both.
        let mut seen = [false; 2];
        for seed in 0..20 {
            let mut net = pair(0.2, 0.6, true);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if let ContagionOutcome::Updated {
                ego, mutual, after, ..
            } = contagion_step(&mut net, &params(0.1), &mut rng)
            {
                assert!(mutual);
                let expected = if ego == NodeId(0) { 0.28 } else { 0.52 };
                assert!((after - expected).abs() < 1e-15);
                seen[ego.0] = true;
            }
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn contagion_fixed_point_and_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut net = pair(0.5, 0.5, false);
        contagion_step(&mut net, &params(0.37), &mut rng);
        assert_eq!(net.attitudes(), &[0.5, 0.5]);

        let mut net = AttitudeNetwork::new();
        net.add_node(0.3).unwrap();
        assert_eq!(
            contagion_step(&mut net, &params(0.1), &mut rng),
            ContagionOutcome::NoCloseTies
        );
    }

    #[test]
    fn homophily_forced_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut net = AttitudeNetwork::new();
        for a in [0.9, 0.85, 0.1] {
            net.add_node(a).unwrap();
        }
        let p = MechanismParams::default();
        let out = homophily_step(&mut net, &p, &mut rng);
        let (a, b) = match out {
            HomophilyOutcome::TieCreated(a, b) => (a.min(b), a.max(b)),
            other => panic!("{other:?}"),
        };
        assert_eq!((a, b), (NodeId(0), NodeId(1)));
        assert!(net.is_mutual(a, b));
        assert_eq!(net.base_tie_count(), 1);
        assert_eq!(net.attitudes(), &[0.9, 0.85, 0.1]);

        assert!(matches!(
            homophily_step(&mut net, &p, &mut rng),
            HomophilyOutcome::AlreadyTied(..)
        ));
        assert_eq!(net.base_tie_count(), 1);
        assert_eq!(net.close_tie_count(), 2);
    }

    #[test]
    fn homophily_too_few_strong() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut net = AttitudeNetwork::new();
        for a in [0.9, 0.1, 0.1] {
            net.add_node(a).unwrap();
        }
        assert_eq!(
            homophily_step(&mut net, &MechanismParams::default(), &mut rng),
            HomophilyOutcome::TooFewStrong { eligible: 1 }
        );
        assert_eq!(net.base_tie_count(), 0);
    }

    #[test]
    fn confounding_update_values() {
        assert_eq!(weighted_pull(0.2, 1.0, 0.5), 0.6);
        assert_eq!(weighted_pull(0.6, 1.0, 0.5), 0.8);
        assert_eq!(weighted_pull(0.37, 0.9, 0.0), 0.37);
        assert_eq!(weighted_pull(0.25, 0.25, 0.7), 0.25);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut net = pair(0.2, 0.6, false);
        let p = MechanismParams {
            confounding_weight: 0.5,
            ..MechanismParams::default()
        };
        match confounding_step(&mut net, &p, &mut rng) {
            ConfoundingOutcome::Influenced {
                node,
                friend,
                stimulus,
                node_after,
                friend_after,
                ..
            } => {
                assert_eq!(net.attitude(node), node_after);
                assert_eq!(net.attitude(friend), friend_after);
                let before = [0.2, 0.6];
                assert_eq!(node_after, weighted_pull(before[node.0], stimulus, 0.5));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(net.close_tie_count(), 1);

        let mut lone = AttitudeNetwork::new();
        lone.add_node(0.5).unwrap();
        assert_eq!(
            confounding_step(&mut lone, &p, &mut rng),
            ConfoundingOutcome::Isolated(NodeId(0))
        );
    }

    #[test]
    fn parameter_validation() {
        assert!(MechanismParams::default().validate().is_ok());
        assert!(matches!(
            params(0.9).validate(),
            Err(SimError::InvalidParam {
                field: "contagion_weight",
                ..
            })
        ));
        assert!(params(0.5).validate().is_ok());
        let bad = MechanismSchedule {
            mode: ScheduleMode::Mixed {
                contagion: 0.5,
                homophily: 0.5,
                confounding: 0.5,
            },
            ..MechanismSchedule::default()
        };
        assert!(bad.validate().is_err());
        let zero = MechanismSchedule {
            snapshot_every: 0,
            ..MechanismSchedule::default()
        };
        assert!(zero.validate().is_err());
    }

    #[test]
    fn snapshot_iterations_include_ends() {
        let s = |iterations, snapshot_every| MechanismSchedule {
            mode: ScheduleMode::PureContagion,
            iterations,
            snapshot_every,
        };
        assert_eq!(s(0, 10).snapshot_iterations(), vec![0]);
        assert_eq!(s(20, 10).snapshot_iterations(), vec![0, 10, 20]);
        assert_eq!(s(25, 10).snapshot_iterations(), vec![0, 10, 20, 25]);
    }

    #[test]
    fn zero_iterations_yield_initial_report() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut net = pair(0.1, 0.9, true);
        let schedule = MechanismSchedule {
            iterations: 0,
            ..MechanismSchedule::default()
        };
        let snaps =
            run_simulation(&mut net, &MechanismParams::default(), &schedule, &mut rng).unwrap();
        assert_eq!(snaps.len(), 1);
        assert_eq!(snaps[0].iteration, 0);
        assert_eq!(snaps[0].report, correlation_report(&net));
    }

    #[test]
    fn mode_names_parse() {
        assert_eq!("PureContagion".parse(), Ok(ScheduleMode::PureContagion));
        assert_eq!("homophily".parse(), Ok(ScheduleMode::PureHomophily));
        assert!("Mixed".parse::<ScheduleMode>().is_ok());
        assert!("sideways".parse::<ScheduleMode>().is_err());
    }
}
