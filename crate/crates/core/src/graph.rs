//! Dual-layer friendship graph.
//!
//! The base layer holds undirected friendship ties. The close layer holds
//! directed "names as a close friend" ties, each of which must sit on top of
//! a base tie. Every node carries one attitude scalar in `[0, 1]`.
//!
//! Networks are append-only: nodes and ties are never removed, so a
//! [`NodeId`] stays valid for the lifetime of the network.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::error::GraphError;

/// Dense node index, `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i)
    }
}

/// An attitude value, always inside the closed unit interval.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Attitude(f64);

impl Attitude {
    pub fn new(value: f64) -> Result<Self, GraphError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Attitude(value))
        } else {
            Err(GraphError::AttitudeOutOfRange(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Attitude {
    type Error = GraphError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Attitude::new(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TieKind {
    /// Undirected friendship.
    BaseFriend,
    /// Directed close friendship, `src` names `dst`.
    CloseFriend,
}

/// Which alters of an ego are averaged together.
///
/// The first four classes are defined on the close layer only. The distance
/// classes use exact shortest-path distance on the undirected projection of
/// the close layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationClass {
    /// Every close tie touching the ego, either direction (distance 1).
    AllClose,
    Distance2,
    Distance3,
    Distance4,
    /// Alters that name the ego.
    Incoming,
    /// Alters the ego names.
    Outgoing,
    /// Alters tied to the ego in both directions.
    Mutual,
}

impl RelationClass {
    /// All classes in ego-alter matrix row order.
    pub const ALL: [RelationClass; 7] = [
        RelationClass::AllClose,
        RelationClass::Distance2,
        RelationClass::Distance3,
        RelationClass::Distance4,
        RelationClass::Incoming,
        RelationClass::Outgoing,
        RelationClass::Mutual,
    ];

    /// Stable short name used in output tables.
    pub fn name(self) -> &'static str {
        match self {
            RelationClass::AllClose => "all",
            RelationClass::Distance2 => "distance2",
            RelationClass::Distance3 => "distance3",
            RelationClass::Distance4 => "distance4",
            RelationClass::Incoming => "incoming",
            RelationClass::Outgoing => "outgoing",
            RelationClass::Mutual => "mutual",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        RelationClass::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Separation degree for distance-based classes; `AllClose` is degree 1.
    pub fn distance(self) -> Option<usize> {
        match self {
            RelationClass::AllClose => Some(1),
            RelationClass::Distance2 => Some(2),
            RelationClass::Distance3 => Some(3),
            RelationClass::Distance4 => Some(4),
            _ => None,
        }
    }

    /// Position in [`RelationClass::ALL`].
    pub fn row(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RelationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The deepest separation degree the ego-alter measure looks at.
pub const MAX_SEPARATION: usize = 4;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttitudeNetwork {
    attitudes: Vec<f64>,
    base_adj: Vec<Vec<NodeId>>,
    out_close: Vec<Vec<NodeId>>,
    in_close: Vec<Vec<NodeId>>,
    // Insertion-ordered tie lists; base pairs are stored as (min, max).
    base_ties: Vec<(NodeId, NodeId)>,
    close_ties: Vec<(NodeId, NodeId)>,
    base_set: HashSet<(NodeId, NodeId)>,
    close_set: HashSet<(NodeId, NodeId)>,
}

impl AttitudeNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(nodes: usize) -> Self {
        AttitudeNetwork {
            attitudes: Vec::with_capacity(nodes),
            base_adj: Vec::with_capacity(nodes),
            out_close: Vec::with_capacity(nodes),
            in_close: Vec::with_capacity(nodes),
            ..Default::default()
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.attitudes.len()
    }

    #[inline]
    pub fn base_tie_count(&self) -> usize {
        self.base_ties.len()
    }

    #[inline]
    pub fn close_tie_count(&self) -> usize {
        self.close_ties.len()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.node_count()).map(NodeId)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.0 < self.node_count()
    }

    fn check(&self, node: NodeId) -> Result<(), GraphError> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(GraphError::MissingNode(node))
        }
    }

    pub fn add_node(&mut self, attitude: f64) -> Result<NodeId, GraphError> {
        let attitude = Attitude::new(attitude)?;
        let id = NodeId(self.node_count());
        self.attitudes.push(attitude.value());
        self.base_adj.push(Vec::new());
        self.out_close.push(Vec::new());
        self.in_close.push(Vec::new());
        Ok(id)
    }

    pub fn attitude(&self, node: NodeId) -> f64 {
        self.attitudes[node.0]
    }

    pub fn attitudes(&self) -> &[f64] {
        &self.attitudes
    }

    pub fn set_attitude(&mut self, node: NodeId, attitude: Attitude) -> Result<(), GraphError> {
        self.check(node)?;
        self.attitudes[node.0] = attitude.value();
        Ok(())
    }

    /// Adds the undirected tie `{a, b}`. Returns `false` if it already existed.
    pub fn add_base_tie(&mut self, a: NodeId, b: NodeId) -> Result<bool, GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        self.check(a)?;
        self.check(b)?;
        let key = canonical(a, b);
        if !self.base_set.insert(key) {
            return Ok(false);
        }
        self.base_ties.push(key);
        self.base_adj[a.0].push(b);
        self.base_adj[b.0].push(a);
        Ok(true)
    }

    /// Adds the directed close tie `src -> dst` on top of an existing base tie.
    pub fn add_close_tie(&mut self, src: NodeId, dst: NodeId) -> Result<bool, GraphError> {
        if src == dst {
            return Err(GraphError::SelfLoop(src));
        }
        self.check(src)?;
        self.check(dst)?;
        if !self.base_set.contains(&canonical(src, dst)) {
            return Err(GraphError::MissingBaseTie(src, dst));
        }
        if !self.close_set.insert((src, dst)) {
            return Ok(false);
        }
        self.close_ties.push((src, dst));
        self.out_close[src.0].push(dst);
        self.in_close[dst.0].push(src);
        Ok(true)
    }

    pub fn has_base_tie(&self, a: NodeId, b: NodeId) -> bool {
        self.base_set.contains(&canonical(a, b))
    }

    pub fn has_close_tie(&self, src: NodeId, dst: NodeId) -> bool {
        self.close_set.contains(&(src, dst))
    }

    pub fn is_mutual(&self, a: NodeId, b: NodeId) -> bool {
        self.has_close_tie(a, b) && self.has_close_tie(b, a)
    }

    /// Base ties in insertion order, each as `(min, max)`.
    pub fn base_ties(&self) -> &[(NodeId, NodeId)] {
        &self.base_ties
    }

    /// Close ties in insertion order, as `(src, dst)`.
    pub fn close_ties(&self) -> &[(NodeId, NodeId)] {
        &self.close_ties
    }

    pub fn base_neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.base_adj[node.0]
    }

    pub fn base_degree(&self, node: NodeId) -> usize {
        self.base_adj[node.0].len()
    }

    pub fn close_out(&self, node: NodeId) -> &[NodeId] {
        &self.out_close[node.0]
    }

    pub fn close_in(&self, node: NodeId) -> &[NodeId] {
        &self.in_close[node.0]
    }

    /// Alters of `node` in the given relation class, sorted by id.
    pub fn alters(&self, node: NodeId, class: RelationClass) -> Result<Vec<NodeId>, GraphError> {
        self.check(node)?;
        let mut out = match class {
            RelationClass::Incoming => self.in_close[node.0].clone(),
            RelationClass::Outgoing => self.out_close[node.0].clone(),
            RelationClass::Mutual => self.out_close[node.0]
                .iter()
                .copied()
                .filter(|&x| self.has_close_tie(x, node))
                .collect(),
            RelationClass::AllClose => {
                let mut v = self.out_close[node.0].clone();
                v.extend_from_slice(&self.in_close[node.0]);
                v.sort_unstable();
                v.dedup();
                v
            }
            RelationClass::Distance2 | RelationClass::Distance3 | RelationClass::Distance4 => {
                let d = class.distance().expect("distance class");
                let mut shells = self.distance_shells(node, d);
                std::mem::take(&mut shells[d])
            }
        };
        out.sort_unstable();
        Ok(out)
    }

    /// Breadth-first shells around `node` on the undirected close layer.
    ///
    /// `shells[d]` holds the nodes at exact distance `d` for `d` in
    /// `0..=max_depth`, each shell sorted by id. `shells[0]` is `[node]`.
    pub fn distance_shells(&self, node: NodeId, max_depth: usize) -> Vec<Vec<NodeId>> {
        let mut shells = vec![Vec::new(); max_depth + 1];
        let mut seen = vec![false; self.node_count()];
        seen[node.0] = true;
        shells[0].push(node);
        let mut queue = VecDeque::from([(node, 0usize)]);
        while let Some((v, d)) = queue.pop_front() {
            if d == max_depth {
                continue;
            }
            for &w in self.out_close[v.0].iter().chain(&self.in_close[v.0]) {
                if !seen[w.0] {
                    seen[w.0] = true;
                    shells[d + 1].push(w);
                    queue.push_back((w, d + 1));
                }
            }
        }
        for s in &mut shells {
            s.sort_unstable();
        }
        shells
    }

    /// True when every node can reach every other through base ties.
    pub fn is_base_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![NodeId(0)];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.base_adj[v.0] {
                if !seen[w.0] {
                    seen[w.0] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }
}

#[inline]
fn canonical(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}
