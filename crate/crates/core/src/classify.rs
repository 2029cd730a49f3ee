//! 1-NN classification by manifold-ranking score or by Euclidean distance.
//!
//! Class labels are indices into a class list owned by the caller.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graphrank::{AffinityGraph, RankingSolver};

/// Train/test split over the nodes of a transductive graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledIndex {
    /// `(node, class)`, ascending by node.
    train: Vec<(usize, usize)>,
    /// Ascending.
    test: Vec<usize>,
}

impl LabeledIndex {
    /// Train and test nodes must be disjoint and together cover `0..n`.
    pub fn new(n: usize, mut train: Vec<(usize, usize)>, mut test: Vec<usize>) -> Result<Self> {
        train.sort_unstable();
        test.sort_unstable();
        let mut seen = vec![false; n];
        for node in train.iter().map(|&(node, _)| node).chain(test.iter().copied()) {
            match seen.get_mut(node) {
                Some(s) if !*s => *s = true,
                Some(_) => return Err(Error::InvalidInput(format!("node {node} listed twice"))),
                None => return Err(Error::out_of_range("node", node, format!("< {n}"))),
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidInput(format!("node {missing} is neither train nor test")));
        }
        Ok(Self { train, test })
    }

    pub fn train(&self) -> &[(usize, usize)] {
        &self.train
    }

    pub fn test(&self) -> &[usize] {
        &self.test
    }

    pub fn is_test(&self, node: usize) -> bool {
        self.test.binary_search(&node).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankPrediction {
    pub class: usize,
    /// Training node the prediction came from.
    pub node: usize,
    /// True when the query had no positive training score and the Euclidean
    /// 1-NN was used instead.
    pub fallback: bool,
}

/// Training node with the highest score, or `None` if no training node has a
/// positive score. Ties go to the lowest node index.
pub fn best_training_node(scores: &[f64], labels: &LabeledIndex, query: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for &(node, class) in labels.train() {
        if node == query {
            continue;
        }
        let s = scores[node];
        if s > 0.0 && best.is_none_or(|(_, _, b)| s > b) {
            best = Some((node, class, s));
        }
    }
    best.map(|(node, class, _)| (node, class))
}

/// Predicts from a precomputed score vector, falling back to Euclidean 1-NN
/// over `vectors` (one row per node) when no training node scores above 0.
pub fn predict_from_scores(
    scores: &[f64],
    vectors: Option<&DMatrix<f64>>,
    labels: &LabeledIndex,
    query: usize,
) -> Result<RankPrediction> {
    if let Some((node, class)) = best_training_node(scores, labels, query) {
        return Ok(RankPrediction {
            class,
            node,
            fallback: false,
        });
    }
    let vectors = vectors.ok_or(Error::NoFallback(query))?;
    let train: Vec<(usize, usize)> = labels.train().iter().copied().filter(|&(n, _)| n != query).collect();
    let q = vectors.row(query);
    let (node, class) = train
        .iter()
        .copied()
        .map(|(n, c)| ((vectors.row(n) - q).norm_squared(), n, c))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, n, c)| (n, c))
        .ok_or(Error::EmptyTrainingSet)?;
    Ok(RankPrediction {
        class,
        node,
        fallback: true,
    })
}

/// Ranks the graph from `test` and returns the label of the best-scoring
/// training node. `vectors` (one row per node) feeds the isolated-query
/// fallback.
pub fn rank_nn_classify(
    graph: &AffinityGraph,
    vectors: Option<&DMatrix<f64>>,
    labels: &LabeledIndex,
    test: usize,
    alpha: f64,
) -> Result<RankPrediction> {
    if !labels.is_test(test) {
        return Err(Error::InvalidInput(format!("node {test} is not a test node")));
    }
    let solver = RankingSolver::new(graph, alpha)?;
    predict_from_scores(solver.scores(test).as_slice(), vectors, labels, test)
}

/// Index of the training row closest to `query`; ties go to the lowest index.
pub fn nearest_index(train: &DMatrix<f64>, query: &DVector<f64>) -> Result<usize> {
    if train.nrows() == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if train.ncols() != query.len() {
        return Err(Error::DimensionMismatch {
            expected: train.ncols(),
            got: query.len(),
        });
    }
    let mut best = (f64::INFINITY, 0);
    for (i, row) in train.row_iter().enumerate() {
        let d: f64 = row.iter().zip(query.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best.0 {
            best = (d, i);
        }
    }
    Ok(best.1)
}

/// Label of the Euclidean nearest training row.
pub fn euclidean_nn_classify(train: &DMatrix<f64>, train_labels: &[usize], query: &DVector<f64>) -> Result<usize> {
    if train_labels.len() != train.nrows() {
        return Err(Error::DimensionMismatch {
            expected: train.nrows(),
            got: train_labels.len(),
        });
    }
    nearest_index(train, query).map(|i| train_labels[i])
}
