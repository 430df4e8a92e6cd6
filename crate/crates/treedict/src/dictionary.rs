//! Dictionary extraction from a partition tree.
//!
//! The Haar dictionary is the normalized root representative (low-pass
//! atom) followed by one normalized difference atom per internal node,
//! the difference being taken between the raw, unnormalized
//! representatives of the node's children. The leaves dictionary keeps
//! the low-pass atom and the normalized representatives of the leaves.
//! Difference or leaf atoms whose norm is zero (duplicate data) are
//! dropped with a logged warning rather than aborting training.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{dct_mterm_values, norm, rank_r_values, DataSet, Shape};
use crate::error::{Error, Result};
use crate::tree::{BuildConfig, PartitionTree, TreeNode};

/// How a node's representative is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentativePolicy {
    /// The node centroid.
    Centroid,
    /// The cluster maxoid stored by the 2-maxoids splitter.
    Maxoid,
    /// Truncated-SVD approximation of the centroid.
    RankR(usize),
    /// M-term DCT approximation of the centroid.
    DctMTerm(usize),
}

/// Role of an atom within its dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomKind {
    /// Normalized root representative.
    Lowpass,
    /// Normalized difference of two children representatives.
    Difference,
    /// Normalized leaf representative.
    Leaf,
    /// An atom that did not come out of a tree (imported or synthetic).
    External,
}

/// A unit-Frobenius-norm dictionary column with its tree provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    values: Vec<f64>,
    pub kind: AtomKind,
    /// Tree node the atom came from: the root for the low-pass atom, the
    /// branched node for a difference atom, the leaf for a leaf atom.
    pub source_node: usize,
    /// Level of the source node.
    pub level: usize,
    /// Position of the atom in the dictionary.
    pub order: usize,
}

impl Atom {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DictionaryKind {
    Haar,
    Leaves,
    External,
}

/// Where a dictionary came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub built_by: String,
    pub config: Option<BuildConfig>,
    pub tree_nodes: usize,
    pub branchings: usize,
    /// Zero-norm atoms dropped during extraction.
    pub dropped_atoms: usize,
}

/// An ordered collection of unit-norm atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dictionary {
    kind: DictionaryKind,
    shape: Shape,
    atoms: Vec<Atom>,
    provenance: Provenance,
}

impl Dictionary {
    pub fn kind(&self) -> DictionaryKind {
        self.kind
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Builds a dictionary from ready-made columns, which must already
    /// be unit-norm.
    pub fn from_unit_columns(
        shape: Shape,
        columns: Vec<Vec<f64>>,
        label: &str,
    ) -> Result<Dictionary> {
        let atoms = columns
            .into_iter()
            .enumerate()
            .map(|(i, values)| {
                if values.len() != shape.len() {
                    return Err(Error::ShapeMismatch {
                        expected: shape.len(),
                        got: values.len(),
                    });
                }
                if (norm(&values) - 1.0).abs() > 1e-9 {
                    return Err(Error::NonUnitNormAtom { order: i });
                }
                Ok(Atom {
                    values,
                    kind: AtomKind::External,
                    source_node: 0,
                    level: 0,
                    order: i,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Dictionary {
            kind: DictionaryKind::External,
            shape,
            atoms,
            provenance: Provenance {
                built_by: label.to_string(),
                config: None,
                tree_nodes: 0,
                branchings: 0,
                dropped_atoms: 0,
            },
        })
    }

    /// Verifies that every atom has unit Frobenius norm within `tol`.
    pub fn check_unit_norms(&self, tol: f64) -> Result<()> {
        for atom in &self.atoms {
            if (norm(&atom.values) - 1.0).abs() > tol {
                return Err(Error::NonUnitNormAtom { order: atom.order });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Dictionary> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Dictionary> {
        Dictionary::from_json(&fs::read_to_string(path)?)
    }

    /// Writes the dictionary as a plain n-row, K-column CSV matrix
    /// (one atom per column) for interop with external tools.
    pub fn save_matrix_csv(&self, path: &Path) -> Result<()> {
        let n = self.shape.len();
        let mut out = String::new();
        for row in 0..n {
            let line: Vec<String> = self
                .atoms
                .iter()
                .map(|a| format!("{}", a.values[row]))
                .collect();
            writeln!(out, "{}", line.join(",")).unwrap();
        }
        fs::write(path, out)?;
        Ok(())
    }
}

/// Representative of an index set under a policy, given the stored maxoid
/// when there is one.
pub(crate) fn representative_values(
    data: &DataSet,
    indices: &[usize],
    maxoid_hint: Option<&[f64]>,
    policy: &RepresentativePolicy,
) -> Result<Vec<f64>> {
    match policy {
        RepresentativePolicy::Centroid => Ok(data.centroid_of(indices)),
        RepresentativePolicy::Maxoid => maxoid_hint
            .map(|h| h.to_vec())
            .ok_or(Error::MaxoidHintMissing { node: usize::MAX }),
        RepresentativePolicy::RankR(r) => {
            let (m1, m2) = data.shape().patch_dims().ok_or(Error::PatchShapeRequired)?;
            rank_r_values(&data.centroid_of(indices), m1, m2, *r)
        }
        RepresentativePolicy::DctMTerm(m) => {
            dct_mterm_values(&data.centroid_of(indices), data.shape(), *m)
        }
    }
}

/// Representative of a tree node under a policy. The maxoid policy reads
/// the maxoid stored on the node and fails when there is none.
pub fn representative(
    data: &DataSet,
    node: &TreeNode,
    policy: &RepresentativePolicy,
) -> Result<Vec<f64>> {
    representative_values(data, &node.indices, node.maxoid_hint.as_deref(), policy).map_err(|e| {
        match e {
            Error::MaxoidHintMissing { .. } => Error::MaxoidHintMissing { node: node.id },
            other => other,
        }
    })
}

fn normalized(values: Vec<f64>) -> Option<Vec<f64>> {
    let n = norm(&values);
    if n == 0.0 {
        return None;
    }
    Some(values.into_iter().map(|v| v / n).collect())
}

fn lowpass_atom(
    tree: &PartitionTree,
    data: &DataSet,
    policy: &RepresentativePolicy,
) -> Result<Atom> {
    let raw = representative(data, tree.root(), policy)?;
    let values = normalized(raw).ok_or(Error::ZeroLowpassAtom)?;
    Ok(Atom {
        values,
        kind: AtomKind::Lowpass,
        source_node: 0,
        level: 0,
        order: 0,
    })
}

fn provenance(tree: &PartitionTree, dropped: usize) -> Provenance {
    Provenance {
        built_by: tree.built_by().to_string(),
        config: Some(tree.config().clone()),
        tree_nodes: tree.nodes().len(),
        branchings: tree.build_log().len(),
        dropped_atoms: dropped,
    }
}

/// Extracts the Haar dictionary: the low-pass atom plus one normalized
/// children-difference atom per internal node, in branch discovery order.
pub fn extract_haar(
    tree: &PartitionTree,
    data: &DataSet,
    policy: &RepresentativePolicy,
) -> Result<Dictionary> {
    let mut atoms = vec![lowpass_atom(tree, data, policy)?];
    let mut dropped = 0;
    for event in tree.build_log() {
        let node = tree.node(event.node)?;
        let (l, r) = node.children.expect("logged nodes are internal");
        let left = representative(data, tree.node(l)?, policy)?;
        let right = representative(data, tree.node(r)?, policy)?;
        let diff: Vec<f64> = left.iter().zip(&right).map(|(a, b)| a - b).collect();
        match normalized(diff) {
            Some(values) => {
                let order = atoms.len();
                atoms.push(Atom {
                    values,
                    kind: AtomKind::Difference,
                    source_node: node.id,
                    level: node.level,
                    order,
                });
            }
            None => {
                dropped += 1;
                log::warn!(
                    "dropping zero difference atom at node {} (identical children representatives)",
                    node.id
                );
            }
        }
    }
    Ok(Dictionary {
        kind: DictionaryKind::Haar,
        shape: tree.shape(),
        atoms,
        provenance: provenance(tree, dropped),
    })
}

/// Extracts the leaves dictionary: the low-pass atom plus the normalized
/// leaf representatives in leaf creation order. On a root-only tree this
/// is just the low-pass atom.
pub fn extract_leaves(
    tree: &PartitionTree,
    data: &DataSet,
    policy: &RepresentativePolicy,
) -> Result<Dictionary> {
    let mut atoms = vec![lowpass_atom(tree, data, policy)?];
    let mut dropped = 0;
    for leaf in tree.leaves() {
        if leaf.id == 0 {
            continue;
        }
        let raw = representative(data, leaf, policy)?;
        match normalized(raw) {
            Some(values) => {
                let order = atoms.len();
                atoms.push(Atom {
                    values,
                    kind: AtomKind::Leaf,
                    source_node: leaf.id,
                    level: leaf.level,
                    order,
                });
            }
            None => {
                dropped += 1;
                log::warn!("dropping zero leaf representative at node {}", leaf.id);
            }
        }
    }
    Ok(Dictionary {
        kind: DictionaryKind::Leaves,
        shape: tree.shape(),
        atoms,
        provenance: provenance(tree, dropped),
    })
}

/// Depth-pruned subdictionary of a Haar dictionary: keeps the low-pass
/// atom and the difference atoms whose source node sits above
/// `max_level`. Atom order is preserved and re-indexed.
pub fn subdictionary_by_depth(
    dict: &Dictionary,
    tree: &PartitionTree,
    max_level: usize,
) -> Result<Dictionary> {
    if dict.kind != DictionaryKind::Haar {
        return Err(Error::WrongDictionaryKind { expected: "haar" });
    }
    let mut atoms = Vec::new();
    for atom in &dict.atoms {
        let keep = match atom.kind {
            AtomKind::Lowpass => true,
            _ => {
                // Level metadata must agree with the tree it came from.
                let node = tree.node(atom.source_node)?;
                debug_assert_eq!(node.level, atom.level);
                atom.level < max_level
            }
        };
        if keep {
            let mut kept = atom.clone();
            kept.order = atoms.len();
            atoms.push(kept);
        }
    }
    Ok(Dictionary {
        kind: DictionaryKind::Haar,
        shape: dict.shape,
        atoms,
        provenance: dict.provenance.clone(),
    })
}
