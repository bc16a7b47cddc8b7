//! Ego-alter similarity.
//!
//! For every node the ego-alter matrix holds the node's own attitude and the
//! mean attitude of its alters in each [`RelationClass`]. Pearson
//! correlation between the ego row and each alter row is the similarity
//! measure; which classes correlate, and how strongly, tells the mechanisms
//! apart.
//!
//! Nodes with no alters in a class have a missing cell for that class and
//! are dropped pairwise when that class is correlated.

use crate::error::{GraphError, MetricsError};
use crate::graph::{AttitudeNetwork, NodeId, RelationClass, MAX_SEPARATION};
use crate::par::{map_indexed, Execution};

/// Minimum number of retained pairs for a defined correlation.
pub const MIN_PAIRS: usize = 3;

/// Mean attitude of `node`'s alters in `class`, `None` when it has none.
pub fn alter_average(
    network: &AttitudeNetwork,
    node: NodeId,
    class: RelationClass,
) -> Result<Option<f64>, GraphError> {
    let alters = network.alters(node, class)?;
    Ok(mean_attitude(network, &alters))
}

fn mean_attitude(network: &AttitudeNetwork, alters: &[NodeId]) -> Option<f64> {
    if alters.is_empty() {
        return None;
    }
    let sum: f64 = alters.iter().map(|&a| network.attitude(a)).sum();
    Some(sum / alters.len() as f64)
}

/// One column per node: ego attitude plus one alter average per relation
/// class, in [`RelationClass::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoAlterMatrix {
    ego: Vec<f64>,
    rows: [Vec<Option<f64>>; 7],
}

impl EgoAlterMatrix {
    pub fn node_count(&self) -> usize {
        self.ego.len()
    }

    pub fn ego_row(&self) -> &[f64] {
        &self.ego
    }

    pub fn row(&self, class: RelationClass) -> &[Option<f64>] {
        &self.rows[class.row()]
    }

    pub fn cell(&self, node: NodeId, class: RelationClass) -> Option<f64> {
        self.rows[class.row()][node.0]
    }
}

pub fn build_matrix(network: &AttitudeNetwork) -> EgoAlterMatrix {
    build_matrix_with(network, Execution::default())
}

/// [`build_matrix`] with an explicit execution strategy. Columns are
/// independent, so the result does not depend on `exec`.
pub fn build_matrix_with(network: &AttitudeNetwork, exec: Execution) -> EgoAlterMatrix {
    let columns = map_indexed(exec, network.node_count(), |i| column(network, NodeId(i)));
    let mut rows: [Vec<Option<f64>>; 7] = Default::default();
    for r in &mut rows {
        r.reserve_exact(columns.len());
    }
    for col in &columns {
        for (r, cell) in rows.iter_mut().zip(col) {
            r.push(*cell);
        }
    }
    EgoAlterMatrix {
        ego: network.attitudes().to_vec(),
        rows,
    }
}

fn column(network: &AttitudeNetwork, v: NodeId) -> [Option<f64>; 7] {
    let mut shells = network.distance_shells(v, MAX_SEPARATION);
    let mut out = [None; 7];
    for class in RelationClass::ALL {
        let alters = match class.distance() {
            Some(d) => std::mem::take(&mut shells[d]),
            None => network.alters(v, class).expect("node exists"),
        };
        out[class.row()] = mean_attitude(network, &alters);
    }
    out
}

/// Running co-moments for a paired sample (Welford's update).
#[derive(Debug, Clone, Copy, Default)]
struct CoMoments {
    n: usize,
    mean_x: f64,
    mean_y: f64,
    m2_x: f64,
    m2_y: f64,
    c_xy: f64,
}

impl CoMoments {
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        let n = self.n as f64;
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        self.mean_x += dx / n;
        self.mean_y += dy / n;
        self.m2_x += dx * (x - self.mean_x);
        self.m2_y += dy * (y - self.mean_y);
        self.c_xy += dx * (y - self.mean_y);
    }

    fn correlation(&self) -> Option<f64> {
        if self.n < MIN_PAIRS || self.m2_x <= 0.0 || self.m2_y <= 0.0 {
            return None;
        }
        let r = self.c_xy / (self.m2_x.sqrt() * self.m2_y.sqrt());
        Some(r.clamp(-1.0, 1.0))
    }
}

/// Pearson correlation over the pairs where both sides are present.
///
/// Returns the coefficient (or `None` when fewer than [`MIN_PAIRS`] pairs
/// survive or either side has zero variance) and the retained pair count.
pub fn pearson(x: &[Option<f64>], y: &[Option<f64>]) -> Result<(Option<f64>, usize), MetricsError> {
    if x.len() != y.len() {
        return Err(MetricsError::LengthMismatch(x.len(), y.len()));
    }
    let mut acc = CoMoments::default();
    for (a, b) in x.iter().zip(y) {
        if let (Some(a), Some(b)) = (a, b) {
            acc.push(*a, *b);
        }
    }
    Ok((acc.correlation(), acc.n))
}

/// [`pearson`] for fully observed samples.
pub fn pearson_complete(x: &[f64], y: &[f64]) -> Result<Option<f64>, MetricsError> {
    if x.len() != y.len() {
        return Err(MetricsError::LengthMismatch(x.len(), y.len()));
    }
    let mut acc = CoMoments::default();
    for (&a, &b) in x.iter().zip(y) {
        acc.push(a, b);
    }
    Ok(acc.correlation())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassCorrelation {
    pub class: RelationClass,
    /// `None` when undefined.
    pub value: Option<f64>,
    /// Nodes with at least one alter in the class.
    pub n_effective: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    entries: [ClassCorrelation; 7],
}

impl CorrelationReport {
    pub fn from_matrix(matrix: &EgoAlterMatrix) -> Self {
        let ego: Vec<Option<f64>> = matrix.ego_row().iter().copied().map(Some).collect();
        let entries = RelationClass::ALL.map(|class| {
            let (value, n_effective) =
                pearson(&ego, matrix.row(class)).expect("matrix rows share one length");
            ClassCorrelation {
                class,
                value,
                n_effective,
            }
        });
        CorrelationReport { entries }
    }

    pub fn from_entries(entries: [ClassCorrelation; 7]) -> Self {
        CorrelationReport { entries }
    }

    pub fn get(&self, class: RelationClass) -> &ClassCorrelation {
        &self.entries[class.row()]
    }

    pub fn value(&self, class: RelationClass) -> Option<f64> {
        self.get(class).value
    }

    pub fn entries(&self) -> &[ClassCorrelation; 7] {
        &self.entries
    }
}

pub fn correlation_report(network: &AttitudeNetwork) -> CorrelationReport {
    CorrelationReport::from_matrix(&build_matrix(network))
}

pub fn correlation_report_with(network: &AttitudeNetwork, exec: Execution) -> CorrelationReport {
    CorrelationReport::from_matrix(&build_matrix_with(network, exec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mutual_pair(a: f64, b: f64) -> AttitudeNetwork {
        let mut net = AttitudeNetwork::new();
        let x = net.add_node(a).unwrap();
        let y = net.add_node(b).unwrap();
        net.add_base_tie(x, y).unwrap();
        net.add_close_tie(x, y).unwrap();
        net.add_close_tie(y, x).unwrap();
        net
    }

    fn some(v: &[f64]) -> Vec<Option<f64>> {
        v.iter().copied().map(Some).collect()
    }

    #[test]
    fn alter_average_cases() {
        // ego 0 mutual with 1 and 2; 3 hangs off 1 one way
        let mut net = AttitudeNetwork::new();
        for a in [0.5, 0.1, 0.3, 0.7] {
            net.add_node(a).unwrap();
        }
        let v: Vec<NodeId> = net.nodes().collect();
        for (a, b) in [(0, 1), (0, 2), (1, 3)] {
            net.add_base_tie(v[a], v[b]).unwrap();
        }
        for (a, b) in [(0, 1), (1, 0), (0, 2), (2, 0), (3, 1)] {
            net.add_close_tie(v[a], v[b]).unwrap();
        }
        let avg = alter_average(&net, v[0], RelationClass::Mutual)
            .unwrap()
            .unwrap();
        assert!((avg - 0.2).abs() < 1e-15);
        assert_eq!(
            alter_average(&net, v[0], RelationClass::Distance2).unwrap(),
            Some(0.7)
        );
        assert_eq!(
            alter_average(&net, v[3], RelationClass::Incoming).unwrap(),
            None
        );
        assert!(alter_average(&net, NodeId(10), RelationClass::Incoming).is_err());
    }

    #[test]
    fn two_node_matrix() {
        let m = build_matrix(&mutual_pair(0.3, 0.7));
        assert_eq!(m.ego_row(), &[0.3, 0.7]);
        for c in [
            RelationClass::AllClose,
            RelationClass::Incoming,
            RelationClass::Outgoing,
            RelationClass::Mutual,
        ] {
            assert_eq!(m.row(c), &[Some(0.7), Some(0.3)]);
        }
        for c in [
            RelationClass::Distance2,
            RelationClass::Distance3,
            RelationClass::Distance4,
        ] {
            assert_eq!(m.row(c), &[None, None]);
        }
    }

    #[test]
    fn incoming_only_node_has_missing_outgoing() {
        let mut net = AttitudeNetwork::new();
        let a = net.add_node(0.2).unwrap();
        let b = net.add_node(0.4).unwrap();
        net.add_base_tie(a, b).unwrap();
        net.add_close_tie(b, a).unwrap();
        let m = build_matrix(&net);
        assert_eq!(m.cell(a, RelationClass::Incoming), Some(0.4));
        assert_eq!(m.cell(a, RelationClass::Outgoing), None);
        assert_eq!(m.cell(a, RelationClass::Mutual), None);
    }

    #[test]
    fn matrix_has_ego_plus_seven_rows() {
        let m = build_matrix(&mutual_pair(0.1, 0.2));
        assert_eq!(RelationClass::ALL.len(), 7);
        assert_eq!(m.rows.len() + 1, 8);
    }

    #[test]
    fn pearson_basic_cases() {
        let x = some(&[1.0, 2.0, 3.0]);
        let (r, n) = pearson(&x, &some(&[2.0, 4.0, 6.0])).unwrap();
        assert_eq!(n, 3);
        assert!((r.unwrap() - 1.0).abs() < 1e-15);
        let (r, _) = pearson(&x, &some(&[3.0, 2.0, 1.0])).unwrap();
        assert!((r.unwrap() + 1.0).abs() < 1e-15);
        let (r, _) = pearson(&some(&[0.5, 0.5, 0.5]), &x).unwrap();
        assert_eq!(r, None);
        let (r, _) = pearson(&some(&[0.1, 0.1, 0.1, 0.1]), &some(&[0.3, 0.2, 0.9, 0.4])).unwrap();
        assert_eq!(r, None);
        assert_eq!(
            pearson(&x, &some(&[1.0])),
            Err(MetricsError::LengthMismatch(3, 1))
        );
    }

    #[test]
    fn pearson_drops_missing_pairs() {
        let x = vec![Some(1.0), None, Some(2.0), Some(3.0), Some(9.0)];
        let y = vec![Some(1.0), Some(5.0), Some(2.0), Some(3.0), None];
        let (r, n) = pearson(&x, &y).unwrap();
        assert_eq!(n, 3);
        assert!((r.unwrap() - 1.0).abs() < 1e-15);
        let y = vec![Some(1.0), Some(5.0), None, Some(3.0), None];
        assert_eq!(pearson(&x, &y).unwrap(), (None, 2));
    }

    #[test]
    fn identical_attitudes_give_undefined_report() {
        let mut net = AttitudeNetwork::new();
        for _ in 0..6 {
            net.add_node(0.4).unwrap();
        }
        for i in 0..5 {
            net.add_base_tie(NodeId(i), NodeId(i + 1)).unwrap();
            net.add_close_tie(NodeId(i), NodeId(i + 1)).unwrap();
        }
        let report = correlation_report(&net);
        assert!(report.entries().iter().all(|e| e.value.is_none()));
        assert_eq!(report.get(RelationClass::AllClose).n_effective, 6);
        assert_eq!(report.get(RelationClass::Outgoing).n_effective, 5);
    }
}
