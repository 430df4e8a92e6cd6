//! Two-way splitters. Each partitions a node's index set into two nonempty
//! halves and reports the value of its clustering objective on the
//! proposed split, which the FIFO tree builder compares against its
//! epsilon threshold.
//!
//! Conventions shared by every splitter:
//! * index sets are sorted, 1-based sample ids;
//! * the returned `left` set is the one containing the smallest id,
//!   except for the 1-D feature splitter where `left` is the prefix of
//!   the sorted features (this is what makes the builders reproduce a
//!   fixed tree layout);
//! * all tie-breaks are by smaller sample id, so results are deterministic.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::data::{dist_sq, norm, spectral_norm_values, DataSet, Shape};
use crate::error::{Error, Result};

/// Outcome of one two-way split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// Value of the splitter's minimization function on this split.
    pub objective: f64,
    /// Representatives proposed by the splitter (maxoids only):
    /// the chosen member of `left` and of `right`.
    pub hints: Option<(Vec<f64>, Vec<f64>)>,
}

/// Which splitter to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitterKind {
    TwoMeans,
    TwoMaxoids,
    OneDFeature,
    Spectral,
}

/// Gaussian-bandwidth policy for the spectral similarity graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaPolicy {
    /// Median pairwise Frobenius distance within the node (1 if the
    /// median is zero).
    MedianPairwise,
}

/// Splitter selection plus shared iteration parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringMethod {
    pub kind: SplitterKind,
    /// Iteration cap for Lloyd's algorithm and the maxoid iteration.
    pub lloyd_iters: usize,
    /// Reserved for random restarts; the default configuration performs
    /// none and is fully deterministic.
    pub rng_seed: u64,
    pub sigma: SigmaPolicy,
    /// Node-size cap for spectral splits (the similarity graph is O(N^2)).
    pub spectral_max_points: usize,
}

impl ClusteringMethod {
    pub fn new(kind: SplitterKind) -> ClusteringMethod {
        ClusteringMethod {
            kind,
            lloyd_iters: 100,
            rng_seed: 0,
            sigma: SigmaPolicy::MedianPairwise,
            spectral_max_points: 2000,
        }
    }

    pub fn two_means() -> ClusteringMethod {
        ClusteringMethod::new(SplitterKind::TwoMeans)
    }

    pub fn two_maxoids() -> ClusteringMethod {
        ClusteringMethod::new(SplitterKind::TwoMaxoids)
    }

    pub fn one_d_feature() -> ClusteringMethod {
        ClusteringMethod::new(SplitterKind::OneDFeature)
    }

    pub fn spectral() -> ClusteringMethod {
        ClusteringMethod::new(SplitterKind::Spectral)
    }
}

/// Runs the configured splitter.
pub fn split(data: &DataSet, indices: &[usize], cfg: &ClusteringMethod) -> Result<SplitResult> {
    match cfg.kind {
        SplitterKind::TwoMeans => split_2means(data, indices, cfg),
        SplitterKind::TwoMaxoids => split_2maxoids(data, indices, cfg),
        SplitterKind::OneDFeature => split_1d_feature(data, indices),
        SplitterKind::Spectral => split_spectral(data, indices, cfg),
    }
}

fn check_splittable(indices: &[usize]) -> Result<()> {
    if indices.len() < 2 {
        return Err(Error::TooFewIndices { got: indices.len() });
    }
    Ok(())
}

/// Index of the member farthest from `from` (ties by smaller id),
/// skipping `skip`.
fn farthest_from(data: &DataSet, indices: &[usize], from: &[f64], skip: Option<usize>) -> usize {
    let mut best = usize::MAX;
    let mut best_d = -1.0;
    for &id in indices {
        if Some(id) == skip {
            continue;
        }
        let d = dist_sq(data.sample(id).values(), from);
        if d > best_d {
            best_d = d;
            best = id;
        }
    }
    best
}

/// Deterministic farthest-pair seeds: the member farthest from the node
/// centroid, then the member farthest from that one.
fn farthest_pair_seeds(data: &DataSet, indices: &[usize]) -> (usize, usize) {
    let centroid = data.centroid_of(indices);
    let first = farthest_from(data, indices, &centroid, None);
    let second = farthest_from(data, indices, data.sample(first).values(), Some(first));
    (first, second)
}

/// Orders a cluster pair so `left` holds the smallest id overall.
fn ordered_split(
    mut a: Vec<usize>,
    mut b: Vec<usize>,
    objective: f64,
    hints_ab: Option<(Vec<f64>, Vec<f64>)>,
) -> SplitResult {
    a.sort_unstable();
    b.sort_unstable();
    if a[0] < b[0] {
        SplitResult {
            left: a,
            right: b,
            objective,
            hints: hints_ab,
        }
    } else {
        SplitResult {
            left: b,
            right: a,
            objective,
            hints: hints_ab.map(|(ha, hb)| (hb, ha)),
        }
    }
}

/// Within-cluster sum of squared Frobenius distances to the two
/// cluster centroids.
pub fn wcss(data: &DataSet, left: &[usize], right: &[usize]) -> f64 {
    let mut total = 0.0;
    for part in [left, right] {
        if part.is_empty() {
            continue;
        }
        let c = data.centroid_of(part);
        for &id in part {
            total += dist_sq(data.sample(id).values(), &c);
        }
    }
    total
}

/// 2-means split by Lloyd's algorithm with deterministic farthest-pair
/// initialization. The objective is the WCSS of the final split.
pub fn split_2means(
    data: &DataSet,
    indices: &[usize],
    cfg: &ClusteringMethod,
) -> Result<SplitResult> {
    let (result, _trace) = lloyd_with_trace(data, indices, cfg)?;
    Ok(result)
}

/// Lloyd's iteration, additionally returning the per-iteration WCSS trace
/// (used to check that the objective never increases).
pub(crate) fn lloyd_with_trace(
    data: &DataSet,
    indices: &[usize],
    cfg: &ClusteringMethod,
) -> Result<(SplitResult, Vec<f64>)> {
    check_splittable(indices)?;
    let n = data.shape().len();
    let (s1, s2) = farthest_pair_seeds(data, indices);
    let mut c1 = data.sample(s1).values().to_vec();
    let mut c2 = data.sample(s2).values().to_vec();
    let mut assign = vec![false; indices.len()]; // false = cluster 1
    let mut trace = Vec::new();
    for _ in 0..cfg.lloyd_iters.max(1) {
        let mut next = Vec::with_capacity(indices.len());
        for &id in indices {
            let v = data.sample(id).values();
            // Ties go to the first cluster.
            next.push(dist_sq(v, &c2) < dist_sq(v, &c1));
        }
        repair_empty(data, indices, &mut next);
        let changed = next != assign;
        assign = next;
        let (mut sum1, mut sum2) = (vec![0.0; n], vec![0.0; n]);
        let (mut n1, mut n2) = (0usize, 0usize);
        for (k, &id) in indices.iter().enumerate() {
            let v = data.sample(id).values();
            if assign[k] {
                for (a, x) in sum2.iter_mut().zip(v) {
                    *a += x;
                }
                n2 += 1;
            } else {
                for (a, x) in sum1.iter_mut().zip(v) {
                    *a += x;
                }
                n1 += 1;
            }
        }
        for a in sum1.iter_mut() {
            *a /= n1 as f64;
        }
        for a in sum2.iter_mut() {
            *a /= n2 as f64;
        }
        c1 = sum1;
        c2 = sum2;
        let mut obj = 0.0;
        for (k, &id) in indices.iter().enumerate() {
            let v = data.sample(id).values();
            obj += dist_sq(v, if assign[k] { &c2 } else { &c1 });
        }
        trace.push(obj);
        if !changed {
            break;
        }
    }
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (k, &id) in indices.iter().enumerate() {
        if assign[k] {
            right.push(id);
        } else {
            left.push(id);
        }
    }
    let objective = *trace.last().expect("at least one iteration");
    Ok((ordered_split(left, right, objective, None), trace))
}

/// If one side of `assign` is empty, moves the member farthest from the
/// surviving side's centroid into it.
fn repair_empty(data: &DataSet, indices: &[usize], assign: &mut [bool]) {
    let count2 = assign.iter().filter(|&&b| b).count();
    let empty_side = if count2 == 0 {
        true
    } else if count2 == assign.len() {
        false
    } else {
        return;
    };
    // All members sit in the surviving cluster at this point.
    let c = data.centroid_of(indices);
    let mover = farthest_from(data, indices, &c, None);
    let k = indices.iter().position(|&id| id == mover).unwrap();
    assign[k] = empty_side;
}

/// 2-maxoids split: assignment to the nearest maxoid alternates with
/// re-electing each cluster's maxoid as its member farthest from the
/// cluster mean, so the representatives are extremal data points rather
/// than averages. The objective is the sum of squared distances to the
/// assigned maxoids; `hints` carries the two maxoids.
pub fn split_2maxoids(
    data: &DataSet,
    indices: &[usize],
    cfg: &ClusteringMethod,
) -> Result<SplitResult> {
    check_splittable(indices)?;
    let (mut m1, mut m2) = farthest_pair_seeds(data, indices);
    let mut assign: Vec<bool> = Vec::new();
    for _ in 0..cfg.lloyd_iters.max(1) {
        let (v1, v2) = (data.sample(m1).values(), data.sample(m2).values());
        let mut next = Vec::with_capacity(indices.len());
        for &id in indices {
            let v = data.sample(id).values();
            next.push(dist_sq(v, v2) < dist_sq(v, v1));
        }
        repair_empty(data, indices, &mut next);
        let changed = next != assign;
        assign = next;
        let cluster = |side: bool| -> Vec<usize> {
            indices
                .iter()
                .zip(&assign)
                .filter(|&(_, &s)| s == side)
                .map(|(&id, _)| id)
                .collect()
        };
        let (g1, g2) = (cluster(false), cluster(true));
        let new_m1 = farthest_from(data, &g1, &data.centroid_of(&g1), None);
        let new_m2 = farthest_from(data, &g2, &data.centroid_of(&g2), None);
        let stable = new_m1 == m1 && new_m2 == m2 && !changed;
        m1 = new_m1;
        m2 = new_m2;
        if stable {
            break;
        }
    }
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (k, &id) in indices.iter().enumerate() {
        if assign[k] {
            right.push(id);
        } else {
            left.push(id);
        }
    }
    let (v1, v2) = (data.sample(m1).values(), data.sample(m2).values());
    let mut objective = 0.0;
    for &id in &left {
        objective += dist_sq(data.sample(id).values(), v1);
    }
    for &id in &right {
        objective += dist_sq(data.sample(id).values(), v2);
    }
    Ok(ordered_split(
        left,
        right,
        objective,
        Some((v1.to_vec(), v2.to_vec())),
    ))
}

/// Per-sample deviation features `s_j = ||centroid - Y_j||_2` (spectral
/// norm for patches, Euclidean norm for flat samples), returned sorted
/// ascending with ties broken by sample id.
pub fn deviation_features(data: &DataSet, indices: &[usize]) -> Vec<(usize, f64)> {
    let centroid = data.centroid_of(indices);
    let mut feats: Vec<(usize, f64)> = indices
        .iter()
        .map(|&id| {
            let diff: Vec<f64> = centroid
                .iter()
                .zip(data.sample(id).values())
                .map(|(c, v)| c - v)
                .collect();
            let s = match data.shape() {
                Shape::Flat(_) => norm(&diff),
                Shape::Patch(m1, m2) => spectral_norm_values(&diff, m1, m2),
            };
            (id, s)
        })
        .collect();
    feats.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    feats
}

/// 1-D feature split: reduces each sample to its deviation feature and
/// solves the 1-D 2-means problem exactly by scanning every prefix/suffix
/// cut of the sorted features. `left` is the prefix. Fully deterministic;
/// the smallest cut position wins objective ties.
pub fn split_1d_feature(data: &DataSet, indices: &[usize]) -> Result<SplitResult> {
    check_splittable(indices)?;
    let feats = deviation_features(data, indices);
    let values: Vec<f64> = feats.iter().map(|&(_, s)| s).collect();
    let k = values.len();
    let mut prefix_sum = vec![0.0; k + 1];
    let mut prefix_sq = vec![0.0; k + 1];
    for (i, &v) in values.iter().enumerate() {
        prefix_sum[i + 1] = prefix_sum[i] + v;
        prefix_sq[i + 1] = prefix_sq[i] + v * v;
    }
    let total_sum = prefix_sum[k];
    let total_sq = prefix_sq[k];
    let mut best_mu = 1;
    let mut best_obj = f64::INFINITY;
    for mu in 1..k {
        let (s1, q1) = (prefix_sum[mu], prefix_sq[mu]);
        let (s2, q2) = (total_sum - s1, total_sq - q1);
        let obj = (q1 - s1 * s1 / mu as f64) + (q2 - s2 * s2 / (k - mu) as f64);
        if obj < best_obj {
            best_obj = obj;
            best_mu = mu;
        }
    }
    let mut left: Vec<usize> = feats[..best_mu].iter().map(|&(id, _)| id).collect();
    let mut right: Vec<usize> = feats[best_mu..].iter().map(|&(id, _)| id).collect();
    left.sort_unstable();
    right.sort_unstable();
    Ok(SplitResult {
        left,
        right,
        // Guard against -0.0 / tiny negatives from cancellation.
        objective: best_obj.max(0.0),
        hints: None,
    })
}

/// Spectral split: complete similarity graph with Gaussian weights
/// `exp(-d^2 / 2 sigma^2)`, symmetric normalized Laplacian, bipartition by
/// the signs of the Fiedler vector. The objective is the WCSS of the
/// resulting split.
pub fn split_spectral(
    data: &DataSet,
    indices: &[usize],
    cfg: &ClusteringMethod,
) -> Result<SplitResult> {
    check_splittable(indices)?;
    let k = indices.len();
    if k > cfg.spectral_max_points {
        return Err(Error::SpectralNodeTooLarge {
            got: k,
            max: cfg.spectral_max_points,
        });
    }
    if k == 2 {
        let split = ordered_split(vec![indices[0]], vec![indices[1]], 0.0, None);
        return Ok(SplitResult {
            objective: wcss(data, &split.left, &split.right),
            ..split
        });
    }
    // Pairwise distances and the bandwidth.
    let mut d = vec![0.0; k * k];
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            let dij = dist_sq(
                data.sample(indices[i]).values(),
                data.sample(indices[j]).values(),
            )
            .sqrt();
            d[i * k + j] = dij;
            d[j * k + i] = dij;
            pairs.push(dij);
        }
    }
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sigma = match cfg.sigma {
        SigmaPolicy::MedianPairwise => {
            let med = median_sorted(&pairs);
            if med > 0.0 {
                med
            } else {
                1.0
            }
        }
    };

    let mut w = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            if i != j {
                let dij = d[i * k + j];
                w[(i, j)] = (-dij * dij / (2.0 * sigma * sigma)).exp();
            }
        }
    }
    let deg: Vec<f64> = (0..k).map(|i| w.row(i).sum()).collect();
    let mut lap = DMatrix::<f64>::identity(k, k);
    for i in 0..k {
        for j in 0..k {
            if i != j {
                lap[(i, j)] = -w[(i, j)] / (deg[i] * deg[j]).sqrt();
            }
        }
    }
    let eigen = SymmetricEigen::try_new(lap, 1e-12, 100_000).ok_or(Error::EigenDidNotConverge)?;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .partial_cmp(&eigen.eigenvalues[b])
            .unwrap()
    });
    let fiedler = eigen.eigenvectors.column(order[1]);
    // Deterministic sign: first entry of significant magnitude is >= 0.
    let flip = fiedler
        .iter()
        .find(|v| v.abs() > 1e-12)
        .map(|v| *v < 0.0)
        .unwrap_or(false);
    let signed: Vec<f64> = fiedler.iter().map(|&v| if flip { -v } else { v }).collect();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (i, &v) in signed.iter().enumerate() {
        if v >= 0.0 {
            pos.push(indices[i]);
        } else {
            neg.push(indices[i]);
        }
    }
    if pos.is_empty() || neg.is_empty() {
        // Move the entry closest to zero to the empty side.
        let mut best = 0;
        for i in 1..k {
            if signed[i].abs() < signed[best].abs() {
                best = i;
            }
        }
        let id = indices[best];
        if pos.is_empty() {
            neg.retain(|&x| x != id);
            pos.push(id);
        } else {
            pos.retain(|&x| x != id);
            neg.push(id);
        }
    }
    let objective = wcss(data, &pos, &neg);
    Ok(ordered_split(pos, neg, objective, None))
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Test oracle: enumerates every bipartition of the index set and returns
/// the global WCSS minimizer. Ties are resolved toward the
/// lexicographically smallest left set containing the lowest id.
pub fn exhaustive_2means_oracle(data: &DataSet, indices: &[usize]) -> Result<SplitResult> {
    check_splittable(indices)?;
    const MAX: usize = 20;
    if indices.len() > MAX {
        return Err(Error::IndexSetTooLarge {
            got: indices.len(),
            max: MAX,
        });
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    let k = sorted.len();
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    for mask in 0..(1u32 << (k - 1)) {
        let mut left = vec![sorted[0]];
        let mut right = Vec::new();
        for (bit, &id) in sorted[1..].iter().enumerate() {
            if mask >> bit & 1 == 1 {
                left.push(id);
            } else {
                right.push(id);
            }
        }
        if right.is_empty() {
            continue;
        }
        let obj = wcss(data, &left, &right);
        let better = match &best {
            None => true,
            Some((bo, bl, _)) => obj < *bo || (obj == *bo && left < *bl),
        };
        if better {
            best = Some((obj, left, right));
        }
    }
    let (objective, left, right) = best.expect("at least one bipartition");
    Ok(SplitResult {
        left,
        right,
        objective,
        hints: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn flat(rows: Vec<Vec<f64>>) -> DataSet {
        let n = rows[0].len();
        DataSet::from_rows(Shape::Flat(n), rows).unwrap()
    }

    fn scalar(values: &[f64]) -> DataSet {
        flat(values.iter().map(|&v| vec![v]).collect())
    }

    fn ids(n: usize) -> Vec<usize> {
        (1..=n).collect()
    }

    #[test]
    fn two_means_separates_duplicates() {
        let data = flat(vec![
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![9.0, 9.0],
            vec![9.0, 9.0],
        ]);
        let split = split_2means(&data, &ids(4), &ClusteringMethod::two_means()).unwrap();
        assert_eq!(split.left, vec![1, 2]);
        assert_eq!(split.right, vec![3, 4]);
        assert_eq!(split.objective, 0.0);
    }

    #[test]
    fn two_means_rejects_singletons() {
        let data = scalar(&[1.0]);
        assert!(matches!(
            split_2means(&data, &[1], &ClusteringMethod::two_means()),
            Err(Error::TooFewIndices { got: 1 })
        ));
    }

    #[test]
    fn two_means_identical_points_still_bipartitions() {
        let data = scalar(&[3.0, 3.0, 3.0]);
        let split = split_2means(&data, &ids(3), &ClusteringMethod::two_means()).unwrap();
        assert!(!split.left.is_empty() && !split.right.is_empty());
        assert_eq!(split.objective, 0.0);
    }

    #[test]
    fn lloyd_objective_never_increases() {
        let mut rng = SplitMix64::new(21);
        for _ in 0..50 {
            let n = 3 + (rng.next_below(10) as usize);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.next_gaussian(), rng.next_gaussian()])
                .collect();
            let data = flat(rows);
            let (_, trace) =
                lloyd_with_trace(&data, &ids(n), &ClusteringMethod::two_means()).unwrap();
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "trace increased: {:?}", trace);
            }
        }
    }

    #[test]
    fn two_means_never_beats_oracle_and_split_is_partition() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..60 {
            let n = 2 + (rng.next_below(11) as usize);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.next_gaussian() * 3.0, rng.next_gaussian()])
                .collect();
            let data = flat(rows);
            let lloyd = split_2means(&data, &ids(n), &ClusteringMethod::two_means()).unwrap();
            let oracle = exhaustive_2means_oracle(&data, &ids(n)).unwrap();
            assert!(lloyd.objective >= oracle.objective - 1e-9);
            let mut all: Vec<usize> = lloyd.left.iter().chain(&lloyd.right).copied().collect();
            all.sort_unstable();
            assert_eq!(all, ids(n));
            assert!(!lloyd.left.is_empty() && !lloyd.right.is_empty());
        }
    }

    #[test]
    fn maxoids_two_samples() {
        let data = flat(vec![vec![0.0, 0.0], vec![5.0, 0.0]]);
        let split = split_2maxoids(&data, &ids(2), &ClusteringMethod::two_maxoids()).unwrap();
        assert_eq!(split.left, vec![1]);
        assert_eq!(split.right, vec![2]);
        let (h1, h2) = split.hints.unwrap();
        assert_eq!(h1, vec![0.0, 0.0]);
        assert_eq!(h2, vec![5.0, 0.0]);
    }

    #[test]
    fn maxoids_duplicates() {
        let data = flat(vec![
            vec![1.0, 2.0],
            vec![1.0, 2.0],
            vec![7.0, 0.0],
            vec![7.0, 0.0],
        ]);
        let split = split_2maxoids(&data, &ids(4), &ClusteringMethod::two_maxoids()).unwrap();
        assert_eq!(split.left, vec![1, 2]);
        assert_eq!(split.right, vec![3, 4]);
        let (h1, h2) = split.hints.unwrap();
        assert_eq!(h1, vec![1.0, 2.0]);
        assert_eq!(h2, vec![7.0, 0.0]);
    }

    /// Exhaustive reference for the maxoid objective: every bipartition,
    /// each side represented by its member farthest from the side's mean.
    fn maxoid_oracle(data: &DataSet, indices: &[usize]) -> (f64, Vec<usize>, Vec<usize>) {
        let k = indices.len();
        let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
        for mask in 0..(1u32 << (k - 1)) {
            let mut left = vec![indices[0]];
            let mut right = Vec::new();
            for (bit, &id) in indices[1..].iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    left.push(id);
                } else {
                    right.push(id);
                }
            }
            if right.is_empty() {
                continue;
            }
            let mut obj = 0.0;
            for part in [&left, &right] {
                let m = farthest_from(data, part, &data.centroid_of(part), None);
                let mv = data.sample(m).values();
                for &id in part.iter() {
                    obj += dist_sq(data.sample(id).values(), mv);
                }
            }
            if best.as_ref().is_none_or(|(bo, _, _)| obj < *bo) {
                best = Some((obj, left, right));
            }
        }
        best.unwrap()
    }

    #[test]
    fn maxoids_matches_exhaustive_objective_on_line() {
        let data = scalar(&[0.0, 1.0, 10.0, 11.0]);
        let split = split_2maxoids(&data, &ids(4), &ClusteringMethod::two_maxoids()).unwrap();
        assert_eq!(split.left, vec![1, 2]);
        assert_eq!(split.right, vec![3, 4]);
        let (obj, left, right) = maxoid_oracle(&data, &ids(4));
        assert_eq!(split.left, left);
        assert_eq!(split.right, right);
        assert!((split.objective - obj).abs() < 1e-12);
        // Hints are actual members.
        let (h1, h2) = split.hints.unwrap();
        assert!(data.samples().iter().any(|s| s.values() == h1.as_slice()));
        assert!(data.samples().iter().any(|s| s.values() == h2.as_slice()));
    }

    #[test]
    fn one_d_feature_prefix_split() {
        // Scalar data whose deviation features are exactly {0,0,0,10,10}:
        // three samples at the centroid, two at distance 10 on opposite
        // sides.
        let data = scalar(&[0.0, 0.0, 0.0, 10.0, -10.0]);
        let feats = deviation_features(&data, &ids(5));
        let values: Vec<f64> = feats.iter().map(|&(_, s)| s).collect();
        assert_eq!(values, vec![0.0, 0.0, 0.0, 10.0, 10.0]);
        let split = split_1d_feature(&data, &ids(5)).unwrap();
        assert_eq!(split.left, vec![1, 2, 3]);
        assert_eq!(split.right, vec![4, 5]);
        assert_eq!(split.objective, 0.0);
    }

    #[test]
    fn one_d_feature_deterministic() {
        let mut rng = SplitMix64::new(3);
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|_| (0..4).map(|_| rng.next_gaussian()).collect())
            .collect();
        let data = flat(rows);
        let a = split_1d_feature(&data, &ids(8)).unwrap();
        let b = split_1d_feature(&data, &ids(8)).unwrap();
        assert_eq!(format!("{:?}", a), format!("{:?}", b));
    }

    #[test]
    fn spectral_two_samples_forced() {
        let data = scalar(&[1.0, 4.0]);
        let split = split_spectral(&data, &ids(2), &ClusteringMethod::spectral()).unwrap();
        assert_eq!(split.left, vec![1]);
        assert_eq!(split.right, vec![2]);
    }

    #[test]
    fn spectral_groups_short_edges_of_rectangle() {
        let data = flat(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 10.0],
            vec![1.0, 10.0],
        ]);
        let split = split_spectral(&data, &ids(4), &ClusteringMethod::spectral()).unwrap();
        assert_eq!(split.left, vec![1, 2]);
        assert_eq!(split.right, vec![3, 4]);
    }

    #[test]
    fn spectral_recovers_separated_blobs() {
        let mut rows = Vec::new();
        let mut rng = SplitMix64::new(1);
        for _ in 0..5 {
            rows.push(vec![rng.next_gaussian()]);
        }
        for _ in 0..5 {
            rows.push(vec![100.0 + rng.next_gaussian()]);
        }
        let data = flat(rows);
        let split = split_spectral(&data, &ids(10), &ClusteringMethod::spectral()).unwrap();
        let oracle = exhaustive_2means_oracle(&data, &ids(10)).unwrap();
        assert_eq!(split.left, oracle.left);
        assert_eq!(split.right, oracle.right);
    }

    #[test]
    fn spectral_rejects_oversized_nodes() {
        let data = scalar(&[0.0, 1.0, 2.0]);
        let mut cfg = ClusteringMethod::spectral();
        cfg.spectral_max_points = 2;
        assert!(matches!(
            split_spectral(&data, &ids(3), &cfg),
            Err(Error::SpectralNodeTooLarge { .. })
        ));
    }

    #[test]
    fn oracle_basics() {
        let data = scalar(&[2.0, 9.0]);
        let split = exhaustive_2means_oracle(&data, &ids(2)).unwrap();
        assert_eq!(split.left, vec![1]);
        assert_eq!(split.right, vec![2]);
        assert_eq!(split.objective, 0.0);

        let dup = flat(vec![
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![9.0, 9.0],
            vec![9.0, 9.0],
        ]);
        let o = exhaustive_2means_oracle(&dup, &ids(4)).unwrap();
        let s = split_2means(&dup, &ids(4), &ClusteringMethod::two_means()).unwrap();
        assert_eq!(o.left, s.left);
        assert_eq!(o.right, s.right);

        let big = scalar(&[0.5; 21]);
        assert!(matches!(
            exhaustive_2means_oracle(&big, &ids(21)),
            Err(Error::IndexSetTooLarge { .. })
        ));
    }

    proptest! {
        /// Every splitter produces a disjoint, nonempty, covering
        /// bipartition with a finite nonnegative objective.
        #[test]
        fn all_splitters_bipartition(
            seed in 0u64..u64::MAX,
            n in 2usize..10,
            kind_pick in 0usize..4,
        ) {
            let mut rng = SplitMix64::new(seed);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..3)
                        .map(|_| {
                            if rng.next_f64() < 0.25 {
                                rng.next_below(2) as f64
                            } else {
                                rng.next_gaussian()
                            }
                        })
                        .collect()
                })
                .collect();
            let data = flat(rows);
            let kind = [
                SplitterKind::TwoMeans,
                SplitterKind::TwoMaxoids,
                SplitterKind::OneDFeature,
                SplitterKind::Spectral,
            ][kind_pick];
            let cfg = ClusteringMethod::new(kind);
            let result = split(&data, &ids(n), &cfg).unwrap();
            prop_assert!(!result.left.is_empty());
            prop_assert!(!result.right.is_empty());
            let mut all: Vec<usize> =
                result.left.iter().chain(&result.right).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, ids(n));
            prop_assert!(result.objective.is_finite());
            prop_assert!(result.objective >= 0.0);
            // Splitters are deterministic.
            let again = split(&data, &ids(n), &cfg).unwrap();
            prop_assert_eq!(result, again);
        }
    }
}
