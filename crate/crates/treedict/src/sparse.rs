//! Orthogonal Matching Pursuit against a dictionary, plus the per-atom
//! usage statistic eta.
//!
//! At each step OMP picks the atom with the largest absolute correlation
//! against the current residual (ties go to the lowest atom position),
//! refits all active coefficients by least squares and updates the
//! residual. The active-set system is maintained as an incremental QR
//! factorization, so each step costs O(nS) and the refit is a single
//! back-substitution.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{norm, DataSet, Sample};
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};

/// Sparse encoding of one sample: active atom positions and their
/// least-squares coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeColumn {
    pub support: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
}

/// Column-sparse encoding of a whole data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseCode {
    columns: Vec<CodeColumn>,
    sparsity: usize,
    dict_len: usize,
}

impl SparseCode {
    pub fn columns(&self) -> &[CodeColumn] {
        &self.columns
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    pub fn dict_len(&self) -> usize {
        self.dict_len
    }

    pub fn mean_residual(&self) -> f64 {
        if self.columns.is_empty() {
            return 0.0;
        }
        self.columns.iter().map(|c| c.residual_norm).sum::<f64>() / self.columns.len() as f64
    }

    /// Number of distinct atoms used by at least one column.
    pub fn atoms_used(&self) -> usize {
        let mut used = vec![false; self.dict_len];
        for col in &self.columns {
            for &k in &col.support {
                used[k] = true;
            }
        }
        used.iter().filter(|&&u| u).count()
    }

    /// Writes the code as `column,atom,coefficient` triplets, one per
    /// nonzero, with 1-based column ids.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("column,atom,coefficient\n");
        for (j, col) in self.columns.iter().enumerate() {
            for (k, c) in col.support.iter().zip(&col.coefficients) {
                writeln!(out, "{},{},{}", j + 1, k, c).unwrap();
            }
        }
        fs::write(path, out)?;
        Ok(())
    }
}

/// Per-atom usage: `eta[k]` is the sum of `|X_kj|` over all columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsageStats {
    pub eta: Vec<f64>,
    /// Atom orders, copied from the dictionary.
    pub orders: Vec<usize>,
    /// Source-node levels, copied from the dictionary.
    pub levels: Vec<usize>,
}

impl UsageStats {
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("order,level,eta\n");
        for i in 0..self.eta.len() {
            writeln!(out, "{},{},{}", self.orders[i], self.levels[i], self.eta[i]).unwrap();
        }
        fs::write(path, out)?;
        Ok(())
    }
}

fn validate_inputs(y: &Sample, dict: &Dictionary, sparsity: usize) -> Result<()> {
    if sparsity < 1 {
        return Err(Error::InvalidConfig("sparsity must be at least 1".into()));
    }
    if dict.is_empty() {
        return Err(Error::InvalidConfig("dictionary has no atoms".into()));
    }
    if dict.shape().len() != y.shape().len() {
        return Err(Error::ShapeMismatch {
            expected: dict.shape().len(),
            got: y.shape().len(),
        });
    }
    dict.check_unit_norms(1e-9)
}

/// Encodes one sample. `tol` is the residual-norm stopping threshold and
/// defaults to `1e-9 * ||y||`.
pub fn omp_encode(
    y: &Sample,
    dict: &Dictionary,
    sparsity: usize,
    tol: Option<f64>,
) -> Result<CodeColumn> {
    omp_encode_trace(y, dict, sparsity, tol).map(|(col, _)| col)
}

/// Like [`omp_encode`], also returning the residual norm after each
/// selection step (the trace starts with `||y||`).
pub fn omp_encode_trace(
    y: &Sample,
    dict: &Dictionary,
    sparsity: usize,
    tol: Option<f64>,
) -> Result<(CodeColumn, Vec<f64>)> {
    validate_inputs(y, dict, sparsity)?;
    let n = dict.shape().len();
    let y_norm = norm(y.values());
    let tol = tol.unwrap_or(1e-9 * y_norm);

    let mut residual = y.values().to_vec();
    let mut residual_norm = y_norm;
    let mut trace = vec![residual_norm];

    let mut support: Vec<usize> = Vec::new();
    let mut active = vec![false; dict.len()];
    // Orthonormalized active atoms and the R factor (column-major,
    // R[j] holds the j+1 entries of column j).
    let mut q_cols: Vec<Vec<f64>> = Vec::new();
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut z: Vec<f64> = Vec::new();

    while support.len() < sparsity {
        if residual_norm <= tol {
            break;
        }
        // Atom most correlated with the residual; ties to the lowest
        // position. Active atoms are excluded outright even though their
        // correlation is zero up to round-off.
        let mut best = None;
        let mut best_corr = 0.0;
        for (k, atom) in dict.atoms().iter().enumerate() {
            if active[k] {
                continue;
            }
            let c: f64 = atom
                .values()
                .iter()
                .zip(&residual)
                .map(|(a, r)| a * r)
                .sum();
            if c.abs() > best_corr {
                best_corr = c.abs();
                best = Some(k);
            }
        }
        let Some(k) = best else { break };
        if best_corr == 0.0 {
            break;
        }

        // Orthogonalize against the active set (modified Gram-Schmidt
        // with one reorthogonalization pass).
        let mut q = dict.atoms()[k].values().to_vec();
        let mut r_col = vec![0.0; q_cols.len()];
        for _pass in 0..2 {
            for (i, qi) in q_cols.iter().enumerate() {
                let proj: f64 = qi.iter().zip(&q).map(|(a, b)| a * b).sum();
                r_col[i] += proj;
                for (qq, a) in q.iter_mut().zip(qi) {
                    *qq -= proj * a;
                }
            }
        }
        let q_norm = norm(&q);
        if q_norm <= 1e-12 {
            log::warn!(
                "active-set system numerically singular after {} atoms; stopping early",
                support.len()
            );
            break;
        }
        for v in q.iter_mut() {
            *v /= q_norm;
        }
        let zk: f64 = q.iter().zip(&residual).map(|(a, b)| a * b).sum();
        for (r, qv) in residual.iter_mut().zip(&q) {
            *r -= zk * qv;
        }
        r_col.push(q_norm);
        q_cols.push(q);
        r_cols.push(r_col);
        z.push(zk);
        support.push(k);
        active[k] = true;
        residual_norm = norm(&residual);
        trace.push(residual_norm);
        debug_assert_eq!(residual.len(), n);
    }

    // Back-substitution: R x = z.
    let s = support.len();
    let mut coefficients = vec![0.0; s];
    for i in (0..s).rev() {
        let mut acc = z[i];
        for j in (i + 1)..s {
            acc -= r_cols[j][i] * coefficients[j];
        }
        coefficients[i] = acc / r_cols[i][i];
    }

    Ok((
        CodeColumn {
            support,
            coefficients,
            residual_norm,
        },
        trace,
    ))
}

/// Encodes every sample of a data set. Columns are independent and are
/// encoded in parallel; the result is identical to sequential encoding.
pub fn encode_all(
    data: &DataSet,
    dict: &Dictionary,
    sparsity: usize,
    tol: Option<f64>,
) -> Result<SparseCode> {
    validate_inputs(&data.samples()[0], dict, sparsity)?;
    let columns: Vec<CodeColumn> = data
        .samples()
        .par_iter()
        .map(|s| match omp_encode(s, dict, sparsity, tol) {
            Ok(col) => col,
            Err(err) => {
                // Keep encoding the remaining columns.
                log::warn!("sample {} could not be encoded: {}", s.id(), err);
                CodeColumn {
                    support: Vec::new(),
                    coefficients: Vec::new(),
                    residual_norm: norm(s.values()),
                }
            }
        })
        .collect();
    Ok(SparseCode {
        columns,
        sparsity,
        dict_len: dict.len(),
    })
}

/// Per-atom total absolute usage over all columns, with atom metadata
/// copied from the dictionary.
pub fn usage_stats(code: &SparseCode, dict: &Dictionary) -> UsageStats {
    let mut eta = vec![0.0; dict.len()];
    for col in code.columns() {
        for (&k, &c) in col.support.iter().zip(&col.coefficients) {
            eta[k] += c.abs();
        }
    }
    UsageStats {
        eta,
        orders: dict.atoms().iter().map(|a| a.order).collect(),
        levels: dict.atoms().iter().map(|a| a.level).collect(),
    }
}

/// Rebuilds the dense approximations `D x_j` as a data set with the same
/// shape as the dictionary atoms.
pub fn reconstruct(dict: &Dictionary, code: &SparseCode) -> Result<DataSet> {
    let n = dict.shape().len();
    let rows: Vec<Vec<f64>> = code
        .columns()
        .iter()
        .map(|col| {
            let mut out = vec![0.0; n];
            for (&k, &c) in col.support.iter().zip(&col.coefficients) {
                for (o, a) in out.iter_mut().zip(dict.atoms()[k].values()) {
                    *o += c * a;
                }
            }
            out
        })
        .collect();
    DataSet::from_rows(dict.shape(), rows)
}
