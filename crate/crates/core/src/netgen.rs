//! Scale-free friendship networks and the close-friend layer built on them.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::GenError;
use crate::graph::{AttitudeNetwork, NodeId};

/// Default probability that a base tie becomes a close tie.
pub const DEFAULT_P_CLOSE: f64 = 0.67;
/// Default probability that a spawned close tie is mutual.
pub const DEFAULT_P_MUTUAL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    /// Total node count, must exceed `m`.
    pub n: usize,
    /// Ties brought by every new node.
    pub m: usize,
    pub p_close: f64,
    pub p_mutual: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 1000,
            m: 3,
            p_close: DEFAULT_P_CLOSE,
            p_mutual: DEFAULT_P_MUTUAL,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.m == 0 {
            return Err(invalid("m", "must be at least 1"));
        }
        if self.n <= self.m {
            return Err(invalid(
                "n",
                format!("must exceed m (n = {}, m = {})", self.n, self.m),
            ));
        }
        for (field, p) in [("p_close", self.p_close), ("p_mutual", self.p_mutual)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(field, format!("{p} is not a probability")));
            }
        }
        Ok(())
    }
}

fn invalid(field: &'static str, reason: impl Into<String>) -> GenError {
    GenError::InvalidParam {
        field,
        reason: reason.into(),
    }
}

/// Preferential-attachment probabilities, `k_i / sum_j k_j`, indexed by node.
#[derive(Debug, Clone)]
pub struct AttachmentDistribution {
    weights: Vec<f64>,
    index: WeightedIndex<usize>,
}

impl AttachmentDistribution {
    pub fn from_degrees(degrees: &[usize]) -> Result<Self, GenError> {
        let total: usize = degrees.iter().sum();
        if total == 0 {
            return Err(GenError::DegenerateDistribution);
        }
        let weights: Vec<f64> = degrees.iter().map(|&k| k as f64 / total as f64).collect();
        let index = WeightedIndex::new(degrees).map_err(|_| GenError::DegenerateDistribution)?;
        Ok(AttachmentDistribution { weights, index })
    }

    pub fn weight(&self, node: NodeId) -> f64 {
        self.weights[node.0]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        NodeId(self.index.sample(rng))
    }
}

/// Attachment distribution over the current base-layer degrees.
pub fn attachment_distribution(
    network: &AttitudeNetwork,
) -> Result<AttachmentDistribution, GenError> {
    let degrees: Vec<usize> = network.nodes().map(|v| network.base_degree(v)).collect();
    AttachmentDistribution::from_degrees(&degrees)
}

/// Grows a Barabási–Albert network.
///
/// Starts from a clique on the first `m` nodes; each later node attaches to
/// `m` distinct existing nodes drawn with probability proportional to their
/// current degree. Attitudes are i.i.d. uniform on `[0, 1)`.
pub fn generate_ba<R: Rng + ?Sized>(
    params: &GenParams,
    rng: &mut R,
) -> Result<AttitudeNetwork, GenError> {
    params.validate()?;
    let GenParams { n, m, .. } = *params;
    let mut net = AttitudeNetwork::with_capacity(n);
    for _ in 0..n {
        net.add_node(rng.gen::<f64>())?;
    }
    for a in 0..m {
        for b in a + 1..m {
            net.add_base_tie(NodeId(a), NodeId(b))?;
        }
    }

    // Each tie contributes both endpoints, so a uniform draw from the urn
    // picks node i with probability k_i / sum_j k_j.
    let mut urn: Vec<NodeId> = Vec::with_capacity(2 * (m * (m - 1) / 2 + (n - m) * m));
    for &(a, b) in net.base_ties() {
        urn.push(a);
        urn.push(b);
    }
    let mut targets: Vec<NodeId> = Vec::with_capacity(m);
    for v in m..n {
        targets.clear();
        while targets.len() < m {
            let t = if urn.is_empty() {
                // m = 1: the lone seed node has no degree yet.
                NodeId(rng.gen_range(0..v))
            } else {
                urn[rng.gen_range(0..urn.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        let new = NodeId(v);
        for &t in &targets {
            net.add_base_tie(new, t)?;
            urn.push(new);
            urn.push(t);
        }
    }
    Ok(net)
}

/// Promotes base ties to directed close ties.
///
/// Each base tie independently spawns close ties with probability
/// `p_close`; a spawned tie is mutual with probability `p_mutual`, otherwise
/// it points one way with the direction chosen by a fair coin.
pub fn derive_close_ties<R: Rng + ?Sized>(
    network: &mut AttitudeNetwork,
    params: &GenParams,
    rng: &mut R,
) -> Result<(), GenError> {
    params.validate()?;
    if network.close_tie_count() > 0 {
        return Err(GenError::CloseLayerPopulated(network.close_tie_count()));
    }
    if network.base_tie_count() == 0 {
        return Err(GenError::NoBaseTies);
    }
    let ties = network.base_ties().to_vec();
    for (a, b) in ties {
        if !rng.gen_bool(params.p_close) {
            continue;
        }
        if rng.gen_bool(params.p_mutual) {
            network.add_close_tie(a, b)?;
            network.add_close_tie(b, a)?;
        } else if rng.gen_bool(0.5) {
            network.add_close_tie(a, b)?;
        } else {
            network.add_close_tie(b, a)?;
        }
    }
    Ok(())
}

/// Base network plus close layer in one call, drawing from a single stream.
pub fn generate_network<R: Rng + ?Sized>(
    params: &GenParams,
    rng: &mut R,
) -> Result<AttitudeNetwork, GenError> {
    let mut net = generate_ba(params, rng)?;
    derive_close_ties(&mut net, params, rng)?;
    Ok(net)
}

/// Empirical complementary CDF of a degree sequence: `(k, P(K >= k))` for
/// each distinct degree, ascending in `k`.
pub fn degree_ccdf(degrees: &[usize]) -> Vec<(usize, f64)> {
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let k = sorted[i];
        out.push((k, (sorted.len() - i) as f64 / n));
        while i < sorted.len() && sorted[i] == k {
            i += 1;
        }
    }
    out
}

/// Least-squares slope of `ln P(K >= k)` against `ln k`, sampled on
/// logarithmic bins.
///
/// Bin edges grow by `2^(1/4)` from the minimum positive degree. Bins whose
/// tail holds fewer than `min_tail` nodes are dropped, which keeps the
/// finite-size cutoff from dominating the fit. Returns `None` with fewer than
/// three usable points.
pub fn ccdf_loglog_slope(degrees: &[usize], min_tail: usize) -> Option<f64> {
    let mut sorted: Vec<usize> = degrees.iter().copied().filter(|&k| k > 0).collect();
    sorted.sort_unstable();
    let n = sorted.len();
    let k_min = *sorted.first()? as f64;
    let k_max = *sorted.last()? as f64;
    let ratio = 2f64.powf(0.25);
    let mut points = Vec::new();
    let mut edge = k_min;
    while edge <= k_max {
        let tail = n - sorted.partition_point(|&k| (k as f64) < edge);
        if tail < min_tail {
            break;
        }
        points.push((edge.ln(), (tail as f64 / n as f64).ln()));
        edge *= ratio;
    }
    if points.len() < 3 {
        return None;
    }
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
