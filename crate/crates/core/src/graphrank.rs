//! Gaussian kNN affinity graphs and manifold ranking.
//!
//! Scores for a query node `q` are `f = (I − αS)⁻¹ y` with `y = e_q` and
//! `S = D^(−1/2) W D^(−1/2)` the symmetrically normalized affinity matrix.
//! Since `ρ(S) ≤ 1`, `I − αS` is symmetric positive definite for `α < 1` and
//! one Cholesky factorization serves every query.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::fmt::sig;

/// Gaussian kernel bandwidth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sigma {
    /// Median distance to the `k_g`-th neighbour (1 if that median is 0).
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffinityGraph {
    weights: DMatrix<f64>,
    normalized: DMatrix<f64>,
}

impl AffinityGraph {
    /// Wraps an explicit weight matrix, which must be square, exactly
    /// symmetric, nonnegative and zero on the diagonal.
    pub fn from_weights(weights: DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: weights.ncols(),
            });
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal weight at node {i}")));
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if w < 0.0 || !w.is_finite() {
                    return Err(Error::InvalidInput(format!("invalid weight {w} at ({i}, {j})")));
                }
                if w != weights[(j, i)] {
                    return Err(Error::InvalidInput(format!("asymmetric weight at ({i}, {j})")));
                }
            }
        }
        let degree: Vec<f64> = weights.row_iter().map(|r| r.sum()).collect();
        let normalized = DMatrix::from_fn(n, n, |i, j| {
            if degree[i] > 0.0 && degree[j] > 0.0 {
                weights[(i, j)] / (degree[i].sqrt() * degree[j].sqrt())
            } else {
                0.0
            }
        });
        Ok(Self { weights, normalized })
    }

    pub fn len(&self) -> usize {
        self.weights.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// `S = D^(−1/2) W D^(−1/2)`; rows of isolated nodes are zero.
    pub fn normalized(&self) -> &DMatrix<f64> {
        &self.normalized
    }

    /// Debug dump: one `i j w` line per nonzero upper-triangle edge.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let w = self.weights[(i, j)];
                if w != 0.0 {
                    writeln!(out, "{i} {j} {}", sig(w, 17)).expect("writing to a String");
                }
            }
        }
        out
    }

    pub fn write_edges(&self, path: &Path) -> Result<()> {
        fs::write(path, self.edge_list()).map_err(|e| Error::io(path, e))
    }
}

fn rows_of(vectors: &DMatrix<f64>) -> Vec<Vec<f64>> {
    vectors.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// For every row, its `k` nearest other rows as `(squared distance, index)`,
/// closest first, ties broken by index.
fn nearest_neighbors(rows: &[Vec<f64>], k: usize) -> Vec<Vec<(f64, usize)>> {
    rows.iter()
        .enumerate()
        .map(|(i, a)| {
            let mut cand: Vec<(f64, usize)> = rows
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, b)| (squared_distance(a, b), j))
                .collect();
            let by_dist = |x: &(f64, usize), y: &(f64, usize)| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1));
            if k < cand.len() {
                cand.select_nth_unstable_by(k - 1, by_dist);
                cand.truncate(k);
            }
            cand.sort_by(by_dist);
            cand
        })
        .collect()
}

fn check_k(n: usize, k_g: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::out_of_range("graph node count N", n, "≥ 2"));
    }
    if k_g == 0 || k_g > n - 1 {
        return Err(Error::out_of_range(
            "graph_k",
            k_g,
            format!("1 ≤ k_g ≤ N − 1 = {}", n - 1),
        ));
    }
    Ok(())
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median over all rows of the distance to the `k_g`-th nearest other row;
/// 1 when that median is 0.
pub fn auto_sigma(vectors: &DMatrix<f64>, k_g: usize) -> Result<f64> {
    check_k(vectors.nrows(), k_g)?;
    let knn = nearest_neighbors(&rows_of(vectors), k_g);
    let sigma = median(knn.iter().map(|nn| nn[k_g - 1].0.sqrt()).collect());
    Ok(if sigma > 0.0 { sigma } else { 1.0 })
}

/// Connects every row to its `k_g` nearest Euclidean neighbours with weight
/// `exp(−d²/(2σ²))` and symmetrizes by the elementwise maximum.
pub fn build_knn_graph(vectors: &DMatrix<f64>, k_g: usize, sigma: Sigma) -> Result<AffinityGraph> {
    let n = vectors.nrows();
    check_k(n, k_g)?;
    let rows = rows_of(vectors);
    let knn = nearest_neighbors(&rows, k_g);
    let sigma = match sigma {
        Sigma::Fixed(s) if s > 0.0 && s.is_finite() => s,
        Sigma::Fixed(s) => return Err(Error::out_of_range("sigma", s, "> 0")),
        Sigma::Auto => {
            let s = median(knn.iter().map(|nn| nn[k_g - 1].0.sqrt()).collect());
            if s > 0.0 {
                s
            } else {
                1.0
            }
        }
    };
    let two_sigma_sq = 2.0 * sigma * sigma;
    let mut weights = DMatrix::zeros(n, n);
    for (i, nn) in knn.iter().enumerate() {
        for &(d2, j) in nn {
            let w = (-d2 / two_sigma_sq).exp();
            let w = w.max(weights[(i, j)]);
            weights[(i, j)] = w;
            weights[(j, i)] = w;
        }
    }
    AffinityGraph::from_weights(weights)
}

/// How a [`RankingResult`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solve {
    ClosedForm,
    Iterative { iterations: usize, converged: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankingResult {
    pub query: usize,
    /// On the closed-form scale, `(I − αS)⁻¹ y`.
    pub scores: DVector<f64>,
    pub alpha: f64,
    pub solve: Solve,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::out_of_range("alpha", alpha, "0 ≤ α < 1"))
    }
}

fn check_query(graph: &AffinityGraph, query: usize) -> Result<()> {
    if query < graph.len() {
        Ok(())
    } else {
        Err(Error::out_of_range("query", query, format!("< {}", graph.len())))
    }
}

/// Factorized `I − αS`, reusable across queries.
pub struct RankingSolver {
    factor: Cholesky<f64, Dyn>,
    alpha: f64,
}

impl RankingSolver {
    pub fn new(graph: &AffinityGraph, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let n = graph.len();
        let system = DMatrix::identity(n, n) - graph.normalized() * alpha;
        let factor = Cholesky::new(system).ok_or(Error::Singular)?;
        Ok(Self { factor, alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.factor.l_dirty().nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Scores for a single seed node.
    pub fn scores(&self, query: usize) -> DVector<f64> {
        let mut y = DVector::zeros(self.len());
        y[query] = 1.0;
        self.factor.solve_mut(&mut y);
        y
    }
}

/// Exact manifold ranking `(I − αS)⁻¹ e_query`.
pub fn manifold_rank_closed(graph: &AffinityGraph, query: usize, alpha: f64) -> Result<RankingResult> {
    check_query(graph, query)?;
    let solver = RankingSolver::new(graph, alpha)?;
    Ok(RankingResult {
        query,
        scores: solver.scores(query),
        alpha,
        solve: Solve::ClosedForm,
    })
}

/// Fixed-point iteration `f ← αSf + (1 − α)y` from `f⁰ = y`, stopped when
/// `‖f_{t+1} − f_t‖∞ < tol`. The limit is `(1 − α)(I − αS)⁻¹ y`; scores are
/// divided by `1 − α` so they match [`manifold_rank_closed`].
pub fn manifold_rank_iterative(
    graph: &AffinityGraph,
    query: usize,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RankingResult> {
    check_query(graph, query)?;
    check_alpha(alpha)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::out_of_range("tol", tol, "> 0"));
    }
    let n = graph.len();
    let s = graph.normalized();
    let mut seed = DVector::zeros(n);
    seed[query] = 1.0 - alpha;
    let mut f = DVector::zeros(n);
    f[query] = 1.0;
    let mut next = DVector::zeros(n);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        next.copy_from(&seed);
        next.gemv(alpha, s, &f, 1.0);
        iterations += 1;
        let delta = (&next - &f).amax();
        std::mem::swap(&mut f, &mut next);
        if delta < tol {
            converged = true;
            break;
        }
    }
    Ok(RankingResult {
        query,
        scores: f / (1.0 - alpha),
        alpha,
        solve: Solve::Iterative { iterations, converged },
    })
}

/// Row `i` holds the closed-form scores of query `i`.
pub fn similarity_matrix(graph: &AffinityGraph, alpha: f64) -> Result<DMatrix<f64>> {
    let n = graph.len();
    let solver = RankingSolver::new(graph, alpha)?;
    let mut out = DMatrix::identity(n, n);
    solver.factor.solve_mut(&mut out);
    // column i of the inverse is the score vector of query i
    Ok(out.transpose())
}

#[cfg(test)]
mod tests {
    use nalgebra::{dmatrix, dvector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn chain() -> AffinityGraph {
        AffinityGraph::from_weights(dmatrix![0.0, 1.0, 0.0; 1.0, 0.0, 1.0; 0.0, 1.0, 0.0]).unwrap()
    }

    fn chain_expected() -> DVector<f64> {
        dvector![7.0 / 6.0, 2f64.sqrt() / 3.0, 1.0 / 6.0]
    }

    fn random_points(n: usize, d: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, d, |_, _| rng.random::<f64>())
    }

    // Gaussian elimination with partial pivoting, kept separate from the
    // Cholesky path under test.
    fn gauss_solve(mut a: DMatrix<f64>, mut b: DVector<f64>) -> DVector<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
                .unwrap();
            a.swap_rows(col, piv);
            b.swap_rows(col, piv);
            for r in col + 1..n {
                let f = a[(r, col)] / a[(col, col)];
                for c in col..n {
                    a[(r, c)] -= f * a[(col, c)];
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = DVector::zeros(n);
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|c| a[(r, c)] * x[c]).sum();
            x[r] = (b[r] - s) / a[(r, r)];
        }
        x
    }

    #[test]
    fn line_example_weights() {
        let pts = dmatrix![0.0; 1.0; 10.0];
        let g = build_knn_graph(&pts, 1, Sigma::Fixed(1.0)).unwrap();
        let w = g.weights();
        assert!((w[(0, 1)] - (-0.5f64).exp()).abs() < 1e-15);
        assert!((w[(0, 1)] - 0.60653).abs() < 1e-5);
        assert_eq!(w[(1, 2)], (-40.5f64).exp());
        assert_eq!(w[(0, 2)], 0.0);
        assert_eq!(w, &w.transpose());
    }

    #[test]
    fn duplicate_points_have_unit_weight() {
        let pts = dmatrix![0.0, 0.0; 3.0, 4.0; 0.0, 0.0; 9.0, 9.0];
        let g = build_knn_graph(&pts, 1, Sigma::Auto).unwrap();
        assert_eq!(g.weights()[(0, 2)], 1.0);
    }

    #[test]
    fn auto_sigma_median() {
        // 1st-neighbour distances: 1, 1, 2, 2 → median 1.5
        let pts = dmatrix![0.0; 1.0; 3.0; 5.0];
        assert_eq!(auto_sigma(&pts, 1).unwrap(), 1.5);
        let same = DMatrix::zeros(4, 2);
        assert_eq!(auto_sigma(&same, 2).unwrap(), 1.0);
    }

    #[test]
    fn k_out_of_range() {
        let pts = random_points(5, 2, 0);
        assert!(build_knn_graph(&pts, 0, Sigma::Auto).is_err());
        assert!(build_knn_graph(&pts, 5, Sigma::Auto).is_err());
        assert!(build_knn_graph(&pts, 4, Sigma::Auto).is_ok());
    }

    #[test]
    fn from_weights_validation() {
        assert!(AffinityGraph::from_weights(dmatrix![1.0, 0.0; 0.0, 0.0]).is_err());
        assert!(AffinityGraph::from_weights(dmatrix![0.0, 1.0; 0.5, 0.0]).is_err());
        assert!(AffinityGraph::from_weights(dmatrix![0.0, -1.0; -1.0, 0.0]).is_err());
    }

    #[test]
    fn chain_closed_form() {
        let g = chain();
        let s = 0.5f64.sqrt();
        assert!((g.normalized() - dmatrix![0.0, s, 0.0; s, 0.0, s; 0.0, s, 0.0]).amax() < 1e-15);
        let r = manifold_rank_closed(&g, 0, 0.5).unwrap();
        assert!((&r.scores - chain_expected()).amax() < 1e-10);
        let oracle = gauss_solve(DMatrix::identity(3, 3) - g.normalized() * 0.5, dvector![1.0, 0.0, 0.0]);
        assert!((&r.scores - oracle).amax() < 1e-12);
        assert_eq!(r.solve, Solve::ClosedForm);
    }

    #[test]
    fn chain_iterative() {
        let r = manifold_rank_iterative(&chain(), 0, 0.5, 1e-12, 10_000).unwrap();
        assert!((&r.scores - chain_expected()).amax() < 1e-8);
        assert!(matches!(r.solve, Solve::Iterative { converged: true, .. }));
    }

    #[test]
    fn alpha_zero_is_indicator() {
        let g = chain();
        let r = manifold_rank_closed(&g, 1, 0.0).unwrap();
        assert_eq!(r.scores, dvector![0.0, 1.0, 0.0]);
        let r = manifold_rank_iterative(&g, 1, 0.0, 1e-12, 10).unwrap();
        assert_eq!(r.scores, dvector![0.0, 1.0, 0.0]);
        assert_eq!(
            r.solve,
            Solve::Iterative {
                iterations: 1,
                converged: true
            }
        );
        assert_eq!(similarity_matrix(&g, 0.0).unwrap(), DMatrix::identity(3, 3));
    }

    #[test]
    fn iteration_cap_is_flagged() {
        let r = manifold_rank_iterative(&chain(), 0, 0.9, 1e-15, 3).unwrap();
        assert_eq!(
            r.solve,
            Solve::Iterative {
                iterations: 3,
                converged: false
            }
        );
    }

    #[test]
    fn bad_alpha_and_query() {
        let g = chain();
        assert!(manifold_rank_closed(&g, 0, 1.0).is_err());
        assert!(manifold_rank_closed(&g, 0, -0.1).is_err());
        assert!(manifold_rank_closed(&g, 3, 0.5).is_err());
        assert!(manifold_rank_iterative(&g, 0, 0.5, 0.0, 10).is_err());
    }

    #[test]
    fn similarity_rows_and_symmetry() {
        let m = similarity_matrix(&chain(), 0.5).unwrap();
        assert!((m.row(0).transpose() - chain_expected()).amax() < 1e-10);
        let g = build_knn_graph(&random_points(40, 3, 5), 5, Sigma::Auto).unwrap();
        let m = similarity_matrix(&g, 0.9).unwrap();
        assert!((&m - m.transpose()).amax() < 1e-9);
        for q in [0, 17, 39] {
            let r = manifold_rank_closed(&g, q, 0.9).unwrap();
            assert!((m.row(q).transpose() - r.scores).amax() < 1e-10);
        }
    }

    #[test]
    fn disconnected_components_score_zero() {
        // components {0, 2, 4} and {1, 3}
        let mut w = DMatrix::zeros(5, 5);
        for (i, j, v) in [(0, 2, 0.5), (2, 4, 0.7), (0, 4, 0.1), (1, 3, 0.9)] {
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
        let g = AffinityGraph::from_weights(w).unwrap();
        for alpha in [0.5, 0.99] {
            let r = manifold_rank_closed(&g, 2, alpha).unwrap();
            assert_eq!((r.scores[1], r.scores[3]), (0.0, 0.0));
            assert!(r.scores[0] > 0.0 && r.scores[4] > 0.0);
            let r = manifold_rank_iterative(&g, 3, alpha, 1e-12, 100_000).unwrap();
            assert_eq!((r.scores[0], r.scores[2], r.scores[4]), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn isolated_node_keeps_seed_only() {
        let g = AffinityGraph::from_weights(dmatrix![0.0, 1.0, 0.0; 1.0, 0.0, 0.0; 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(g.normalized().row(2).amax(), 0.0);
        let r = manifold_rank_closed(&g, 2, 0.8).unwrap();
        assert_eq!(r.scores, dvector![0.0, 0.0, 1.0]);
    }

    #[test]
    fn edge_dump() {
        let g = chain();
        assert_eq!(g.edge_list(), "0 1 1\n1 2 1\n");
    }

    #[test]
    fn spectral_radius_bounded() {
        let g = build_knn_graph(&random_points(30, 4, 8), 4, Sigma::Auto).unwrap();
        let eig = nalgebra::SymmetricEigen::new(g.normalized().clone());
        assert!(eig.eigenvalues.amax() <= 1.0 + 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn knn_graph_structure(n in 2usize..30, d in 1usize..5, seed: u64, k_frac in 0.0f64..1.0) {
            let pts = random_points(n, d, seed);
            let k = 1 + ((n - 2) as f64 * k_frac) as usize;
            // wide kernel so no weight underflows to zero
            let g = build_knn_graph(&pts, k, Sigma::Fixed(10.0)).unwrap();
            let w = g.weights();
            prop_assert_eq!(w, &w.transpose());
            for i in 0..n {
                prop_assert_eq!(w[(i, i)], 0.0);
                // max-symmetrization keeps every directed kNN edge
                prop_assert!(w.row(i).iter().filter(|&&v| v > 0.0).count() >= k);
            }
            prop_assert!(w.iter().all(|&v| v >= 0.0));
        }

        #[test]
        fn scores_nonnegative(n in 3usize..25, seed: u64, alpha in 0.0f64..0.99) {
            let g = build_knn_graph(&random_points(n, 2, seed), 2.min(n - 1), Sigma::Auto).unwrap();
            let q = (seed % n as u64) as usize;
            let r = manifold_rank_closed(&g, q, alpha).unwrap();
            prop_assert!(r.scores.iter().all(|&v| v >= -1e-12));
            prop_assert!(r.scores[q] >= 1.0 - 1e-12);
        }

        #[test]
        fn permutation_equivariance(n in 3usize..20, seed: u64) {
            let pts = random_points(n, 3, seed);
            let mut perm: Vec<usize> = (0..n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            // row perm[i] of the permuted graph is row i of the original
            let g = build_knn_graph(&pts, 3.min(n - 1), Sigma::Fixed(0.5)).unwrap();
            let w = g.weights();
            let mut pw = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    pw[(perm[i], perm[j])] = w[(i, j)];
                }
            }
            let pg = AffinityGraph::from_weights(pw).unwrap();
            let q = (seed % n as u64) as usize;
            let a = manifold_rank_closed(&g, q, 0.9).unwrap();
            let b = manifold_rank_closed(&pg, perm[q], 0.9).unwrap();
            for i in 0..n {
                prop_assert!((a.scores[i] - b.scores[perm[i]]).abs() <= 1e-9 * (1.0 + a.scores[i].abs()));
            }
        }
    }
}
