//! Binary partition tree and its two construction algorithms.
//!
//! Both builders decide whether a dequeued node is branched, run the
//! configured splitter, and record every branch in `build_log`; they
//! differ only in visit order. The FIFO builder visits breadth-first and
//! gates branchings on node cardinality and the splitter objective. The
//! priority builder always visits the node with the highest variance
//! next and stops after a fixed number of branchings, which pins the
//! dictionary cardinality.

use std::collections::{BinaryHeap, VecDeque};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clustering::{split, ClusteringMethod, SplitterKind};
use crate::data::{dist_sq, DataSet, Shape};
use crate::dictionary::{representative_values, RepresentativePolicy};
use crate::error::{Error, Result};

/// A node of the partition tree: an index set, its level, and its
/// (unnormalized) representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    pub level: usize,
    /// Sorted 1-based sample ids.
    pub indices: Vec<usize>,
    /// Unnormalized representative values (row-major for patches).
    pub representative: Vec<f64>,
    pub parent: Option<usize>,
    pub children: Option<(usize, usize)>,
    /// The cluster maxoid, present when the node came out of the
    /// 2-maxoids splitter.
    pub maxoid_hint: Option<Vec<f64>>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// One branching, in discovery order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchEvent {
    /// Id of the node that was branched.
    pub node: usize,
    /// Splitter objective of the accepted split.
    pub objective: f64,
    /// Variance of the branched node.
    pub variance: f64,
}

/// Tree construction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Breadth-first; branch while the node exceeds `mincard` and the
    /// splitter objective exceeds `epsilon`.
    Fifo { epsilon: f64 },
    /// Highest-variance-first; stop after `cardinality - 1` branchings.
    Priority { cardinality: usize },
}

/// Everything a builder needs besides the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub strategy: Strategy,
    /// Nodes with at most this many samples are never branched.
    pub mincard: usize,
    pub clustering: ClusteringMethod,
    pub representative: RepresentativePolicy,
}

impl BuildConfig {
    fn validate(&self, data: &DataSet) -> Result<()> {
        if self.mincard < 1 {
            return Err(Error::InvalidConfig("mincard must be at least 1".into()));
        }
        if self.clustering.lloyd_iters < 1 {
            return Err(Error::InvalidConfig(
                "lloyd_iters must be at least 1".into(),
            ));
        }
        match self.strategy {
            Strategy::Fifo { epsilon } => {
                if epsilon.is_nan() || epsilon < 0.0 {
                    return Err(Error::InvalidConfig("epsilon must be >= 0".into()));
                }
            }
            Strategy::Priority { cardinality } => {
                if cardinality < 2 {
                    return Err(Error::InvalidConfig(
                        "cardinality must be at least 2".into(),
                    ));
                }
            }
        }
        if self.representative == RepresentativePolicy::Maxoid
            && self.clustering.kind != SplitterKind::TwoMaxoids
        {
            return Err(Error::InvalidConfig(
                "maxoid representatives require the 2-maxoids splitter".into(),
            ));
        }
        match self.representative {
            RepresentativePolicy::RankR(r) => {
                let (m1, m2) = data.shape().patch_dims().ok_or(Error::PatchShapeRequired)?;
                let max = m1.min(m2);
                if r < 1 || r > max {
                    return Err(Error::RankOutOfRange { rank: r, max });
                }
            }
            RepresentativePolicy::DctMTerm(m) => {
                let n = data.shape().len();
                if m < 1 || m > n {
                    return Err(Error::TermsOutOfRange { terms: m, max: n });
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// A built partition tree. Nodes are stored in creation order and node
/// ids index into that order, the root being node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionTree {
    shape: Shape,
    n_samples: usize,
    nodes: Vec<TreeNode>,
    build_log: Vec<BranchEvent>,
    /// Which builder produced the tree ("fifo", "priority" or "halving").
    built_by: String,
    config: BuildConfig,
}

impl PartitionTree {
    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn built_by(&self) -> &str {
        &self.built_by
    }

    pub fn config(&self) -> &BuildConfig {
        &self.config
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> Result<&TreeNode> {
        self.nodes.get(id).ok_or(Error::UnknownNodeId(id))
    }

    pub fn build_log(&self) -> &[BranchEvent] {
        &self.build_log
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.iter().filter(|n| !n.is_leaf()).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Leaves in node-creation order.
    pub fn leaves(&self) -> Vec<&TreeNode> {
        self.nodes.iter().filter(|n| n.is_leaf()).collect()
    }

    /// Breadth-first slice of the subtree under `node_id`, limited to
    /// `max_depth` levels below it (depth 0 is the node itself).
    pub fn subtree(&self, node_id: usize, max_depth: usize) -> Result<Vec<&TreeNode>> {
        let start = self.node(node_id)?;
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back((start, 0usize));
        while let Some((node, depth)) = queue.pop_front() {
            out.push(node);
            if depth == max_depth {
                continue;
            }
            if let Some((l, r)) = node.children {
                queue.push_back((self.node(l)?, depth + 1));
                queue.push_back((self.node(r)?, depth + 1));
            }
        }
        Ok(out)
    }

    /// Checks every structural invariant, returning a list of violations
    /// (empty when the tree is valid). Each violation names the invariant
    /// it breaks.
    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if self.nodes.is_empty() {
            bad.push("structure: tree has no nodes".into());
            return bad;
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                bad.push(format!("structure: node at slot {} has id {}", i, node.id));
            }
            if node.indices.is_empty() {
                bad.push(format!("nonempty: node {} has an empty index set", node.id));
            }
            if node.indices.windows(2).any(|w| w[0] >= w[1]) {
                bad.push(format!(
                    "ordering: node {} indices are not sorted and distinct",
                    node.id
                ));
            }
            if node.indices.iter().any(|&j| j < 1 || j > self.n_samples) {
                bad.push(format!(
                    "range: node {} references a sample id outside 1..={}",
                    node.id, self.n_samples
                ));
            }
            if node.representative.len() != self.shape.len() {
                bad.push(format!(
                    "representative: node {} has {} values, expected {}",
                    node.id,
                    node.representative.len(),
                    self.shape.len()
                ));
            }
        }
        let root = &self.nodes[0];
        if root.level != 0 || root.parent.is_some() {
            bad.push("root: node 0 must have level 0 and no parent".into());
        }
        let all: Vec<usize> = (1..=self.n_samples).collect();
        if root.indices != all {
            bad.push("root: root indices must be exactly 1..=N".into());
        }
        for node in &self.nodes {
            if let Some((l, r)) = node.children {
                let (lo, hi) = (l.min(r), l.max(r));
                if hi >= self.nodes.len() || lo == hi {
                    bad.push(format!("children: node {} has bad child ids", node.id));
                    continue;
                }
                let (cl, cr) = (&self.nodes[l], &self.nodes[r]);
                for c in [cl, cr] {
                    if c.parent != Some(node.id) {
                        bad.push(format!(
                            "parent: node {} does not point back to its parent {}",
                            c.id, node.id
                        ));
                    }
                    if c.level != node.level + 1 {
                        bad.push(format!(
                            "level: node {} level {} is not parent level {} + 1",
                            c.id, c.level, node.level
                        ));
                    }
                }
                let mut merged: Vec<usize> =
                    cl.indices.iter().chain(&cr.indices).copied().collect();
                merged.sort_unstable();
                let distinct = merged.windows(2).all(|w| w[0] < w[1]);
                if !distinct {
                    bad.push(format!("partition: children of node {} overlap", node.id));
                }
                if merged != node.indices {
                    bad.push(format!(
                        "partition: children of node {} do not cover it exactly",
                        node.id
                    ));
                }
                if cl.indices.is_empty() || cr.indices.is_empty() {
                    bad.push(format!("partition: node {} has an empty child", node.id));
                }
            }
        }
        let mut seen = vec![false; self.n_samples + 1];
        for leaf in self.nodes.iter().filter(|n| n.is_leaf()) {
            for &j in &leaf.indices {
                if j <= self.n_samples {
                    if seen[j] {
                        bad.push(format!(
                            "coverage: sample {} appears in more than one leaf",
                            j
                        ));
                    }
                    seen[j] = true;
                }
            }
        }
        for (j, &s) in seen.iter().enumerate().skip(1) {
            if !s {
                bad.push(format!("coverage: sample {} is in no leaf", j));
            }
        }
        for event in &self.build_log {
            match self.nodes.get(event.node) {
                Some(n) if !n.is_leaf() => {}
                _ => bad.push(format!(
                    "log: branch event references non-internal node {}",
                    event.node
                )),
            }
        }
        bad
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<PartitionTree> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<PartitionTree> {
        PartitionTree::from_json(&fs::read_to_string(path)?)
    }
}

/// Mean squared Frobenius distance of a node's samples to their centroid.
pub fn node_variance(data: &DataSet, node: &TreeNode) -> f64 {
    variance_of(data, &node.indices)
}

pub(crate) fn variance_of(data: &DataSet, indices: &[usize]) -> f64 {
    let c = data.centroid_of(indices);
    let total: f64 = indices
        .iter()
        .map(|&id| dist_sq(data.sample(id).values(), &c))
        .sum();
    total / indices.len() as f64
}

/// Shared builder state.
struct Builder<'a> {
    data: &'a DataSet,
    cfg: &'a BuildConfig,
    nodes: Vec<TreeNode>,
    build_log: Vec<BranchEvent>,
}

impl<'a> Builder<'a> {
    fn new(data: &'a DataSet, cfg: &'a BuildConfig) -> Result<Builder<'a>> {
        cfg.validate(data)?;
        let indices: Vec<usize> = (1..=data.len()).collect();
        // The root's maxoid is its member farthest from the centroid,
        // matching the update rule of the 2-maxoids splitter.
        let maxoid_hint = if cfg.clustering.kind == SplitterKind::TwoMaxoids {
            Some(root_maxoid(data, &indices))
        } else {
            None
        };
        let representative =
            representative_values(data, &indices, maxoid_hint.as_deref(), &cfg.representative)?;
        let root = TreeNode {
            id: 0,
            level: 0,
            indices,
            representative,
            parent: None,
            children: None,
            maxoid_hint,
        };
        Ok(Builder {
            data,
            cfg,
            nodes: vec![root],
            build_log: Vec::new(),
        })
    }

    /// Splits `node_id` and attaches the two children. Returns the child
    /// ids, or `None` when a FIFO split fails its epsilon gate.
    fn branch(&mut self, node_id: usize, epsilon: Option<f64>) -> Result<Option<(usize, usize)>> {
        let indices = self.nodes[node_id].indices.clone();
        let result = split(self.data, &indices, &self.cfg.clustering)?;
        if let Some(eps) = epsilon {
            if result.objective <= eps {
                return Ok(None);
            }
        }
        let variance = variance_of(self.data, &indices);
        let level = self.nodes[node_id].level + 1;
        let (hint_l, hint_r) = match result.hints {
            Some((l, r)) => (Some(l), Some(r)),
            None => (None, None),
        };
        let left_id = self.nodes.len();
        let right_id = left_id + 1;
        for (id, side_indices, hint) in [
            (left_id, result.left, hint_l),
            (right_id, result.right, hint_r),
        ] {
            let representative = representative_values(
                self.data,
                &side_indices,
                hint.as_deref(),
                &self.cfg.representative,
            )?;
            self.nodes.push(TreeNode {
                id,
                level,
                indices: side_indices,
                representative,
                parent: Some(node_id),
                children: None,
                maxoid_hint: hint,
            });
        }
        self.nodes[node_id].children = Some((left_id, right_id));
        self.build_log.push(BranchEvent {
            node: node_id,
            objective: result.objective,
            variance,
        });
        Ok(Some((left_id, right_id)))
    }

    fn finish(self, built_by: &str) -> PartitionTree {
        PartitionTree {
            shape: self.data.shape(),
            n_samples: self.data.len(),
            nodes: self.nodes,
            build_log: self.build_log,
            built_by: built_by.to_string(),
            config: self.cfg.clone(),
        }
    }
}

fn root_maxoid(data: &DataSet, indices: &[usize]) -> Vec<f64> {
    let c = data.centroid_of(indices);
    let mut best = indices[0];
    let mut best_d = -1.0;
    for &id in indices {
        let d = dist_sq(data.sample(id).values(), &c);
        if d > best_d {
            best_d = d;
            best = id;
        }
    }
    data.sample(best).values().to_vec()
}

/// Breadth-first construction: a dequeued node is branched iff its
/// cardinality exceeds `mincard` and the splitter objective exceeds
/// `epsilon`; otherwise it stays a leaf.
pub fn build_fifo(data: &DataSet, cfg: &BuildConfig) -> Result<PartitionTree> {
    let epsilon = match cfg.strategy {
        Strategy::Fifo { epsilon } => epsilon,
        Strategy::Priority { .. } => {
            return Err(Error::InvalidConfig(
                "build_fifo requires the fifo strategy".into(),
            ))
        }
    };
    let mut b = Builder::new(data, cfg)?;
    let mut queue = VecDeque::new();
    queue.push_back(0usize);
    while let Some(node_id) = queue.pop_front() {
        if b.nodes[node_id].indices.len() <= cfg.mincard {
            continue;
        }
        if let Some((l, r)) = b.branch(node_id, Some(epsilon))? {
            queue.push_back(l);
            queue.push_back(r);
        }
    }
    Ok(b.finish("fifo"))
}

#[derive(PartialEq)]
struct PriorityEntry {
    variance: f64,
    id: usize,
}

impl Eq for PriorityEntry {}

impl Ord for PriorityEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap on variance; equal variances dequeue the smaller id first.
        self.variance
            .total_cmp(&other.variance)
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for PriorityEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Highest-variance-first construction: branches until `cardinality - 1`
/// branchings have occurred or no remaining node exceeds `mincard`. With
/// enough data this yields a Haar dictionary of exactly `cardinality`
/// atoms.
pub fn build_priority(data: &DataSet, cfg: &BuildConfig) -> Result<PartitionTree> {
    let cardinality = match cfg.strategy {
        Strategy::Priority { cardinality } => cardinality,
        Strategy::Fifo { .. } => {
            return Err(Error::InvalidConfig(
                "build_priority requires the priority strategy".into(),
            ))
        }
    };
    let mut b = Builder::new(data, cfg)?;
    let mut queue = BinaryHeap::new();
    queue.push(PriorityEntry {
        variance: variance_of(data, &b.nodes[0].indices),
        id: 0,
    });
    let mut branchings = 0usize;
    while let Some(entry) = queue.pop() {
        if b.nodes[entry.id].indices.len() <= cfg.mincard {
            continue;
        }
        if branchings >= cardinality - 1 {
            break;
        }
        if let Some((l, r)) = b.branch(entry.id, None)? {
            branchings += 1;
            for child in [l, r] {
                queue.push(PriorityEntry {
                    variance: variance_of(data, &b.nodes[child].indices),
                    id: child,
                });
            }
        }
    }
    Ok(b.finish("priority"))
}

/// Builds the balanced tree that splits each index set into equal ordered
/// halves. Requires `N` to be a power of two. This mirrors the index sets
/// of the classical Haar wavelet transform and exists for the
/// transform-equivalence checks; it is not a learning method.
pub fn build_halving(data: &DataSet) -> Result<PartitionTree> {
    let n = data.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len: n });
    }
    let cfg = BuildConfig {
        strategy: Strategy::Fifo { epsilon: 0.0 },
        mincard: 1,
        clustering: ClusteringMethod::two_means(),
        representative: RepresentativePolicy::Centroid,
    };
    let mut b = Builder::new(data, &cfg)?;
    let mut queue = VecDeque::new();
    queue.push_back(0usize);
    while let Some(node_id) = queue.pop_front() {
        let indices = b.nodes[node_id].indices.clone();
        if indices.len() < 2 {
            continue;
        }
        let half = indices.len() / 2;
        let (left, right) = (indices[..half].to_vec(), indices[half..].to_vec());
        let objective = crate::clustering::wcss(b.data, &left, &right);
        let variance = variance_of(b.data, &indices);
        let level = b.nodes[node_id].level + 1;
        let left_id = b.nodes.len();
        let right_id = left_id + 1;
        for (id, side) in [(left_id, left), (right_id, right)] {
            let representative =
                representative_values(b.data, &side, None, &RepresentativePolicy::Centroid)?;
            b.nodes.push(TreeNode {
                id,
                level,
                indices: side,
                representative,
                parent: Some(node_id),
                children: None,
                maxoid_hint: None,
            });
        }
        b.nodes[node_id].children = Some((left_id, right_id));
        b.build_log.push(BranchEvent {
            node: node_id,
            objective,
            variance,
        });
        queue.push_back(left_id);
        queue.push_back(right_id);
    }
    Ok(b.finish("halving"))
}
