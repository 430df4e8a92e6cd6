/*!
Multiscale dictionary learning on binary partition trees.

The training data (vectors or image patches) is organized into a binary
partition tree by recursive two-way clustering. Two dictionaries are read
off the tree:

* the **Haar dictionary**: the normalized root representative (low-pass
  atom) plus, for every internal node, the normalized difference of its
  children's representatives;
* the **leaves dictionary**: the low-pass atom plus the normalized
  representatives of the leaves.

Sparse coding against either dictionary is done with Orthogonal Matching
Pursuit. A classical Haar wavelet transform is included as a reference:
on scalar data split into equal halves, the tree construction reproduces
the wavelet coefficients up to explicit scaling factors, which the test
suite checks.

# Quick start

```
use treedict::{DataSet, Shape};
use treedict::clustering::ClusteringMethod;
use treedict::tree::{build_fifo, BuildConfig, Strategy};
use treedict::dictionary::{extract_haar, RepresentativePolicy};

let rows = vec![
    vec![0.0, 0.1], vec![0.1, 0.0], vec![5.0, 5.1], vec![5.1, 5.0],
];
let data = DataSet::from_rows(Shape::Flat(2), rows).unwrap();
let cfg = BuildConfig {
    strategy: Strategy::Fifo { epsilon: 0.0 },
    mincard: 1,
    clustering: ClusteringMethod::two_means(),
    representative: RepresentativePolicy::Centroid,
};
let tree = build_fifo(&data, &cfg).unwrap();
let dict = extract_haar(&tree, &data, &RepresentativePolicy::Centroid).unwrap();
assert_eq!(dict.len(), 1 + tree.internal_count());
```
*/

pub mod clustering;
pub mod data;
pub mod dictionary;
mod error;
pub mod haar;
pub mod imaging;
pub mod rng;
pub mod sparse;
pub mod tree;

pub use data::{DataSet, Sample, Shape};
pub use error::{Error, Result};
