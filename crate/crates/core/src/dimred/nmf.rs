//! Frobenius-norm NMF with Lee–Seung multiplicative updates.
//!
//! Samples are stored as columns internally, `X̃ = Xᵀ ≈ W H` with `W` of
//! shape D×k (basis) and `H` of shape k×N (codes). The public API takes the
//! usual sample-per-row matrix.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matio::{read_matrix, write_matrix};
use crate::error::{Error, Result};

/// Denominator guard of the multiplicative updates.
pub const EPSILON: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct NmfModel {
    /// Nonnegative basis, D×k.
    pub w: DMatrix<f64>,
    pub iterations_run: usize,
    /// `‖X̃ − W H‖_F` after each iteration.
    pub objective_trace: Vec<f64>,
    pub epsilon: f64,
}

fn check_nonnegative(x: &DMatrix<f64>) -> Result<()> {
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            let value = x[(i, j)];
            if value < 0.0 || !value.is_finite() {
                return Err(Error::NegativeEntry { row: i, col: j, value });
            }
        }
    }
    Ok(())
}

/// Multiplies `target` entrywise by `numer / (denom + ε)`.
fn multiplicative_step(target: &mut DMatrix<f64>, numer: &DMatrix<f64>, denom: &DMatrix<f64>) {
    for ((t, n), d) in target.iter_mut().zip(numer.iter()).zip(denom.iter()) {
        *t *= n / (d + EPSILON);
    }
}

fn frobenius_error(xt: &DMatrix<f64>, w: &DMatrix<f64>, h: &DMatrix<f64>) -> f64 {
    let mut residual = xt.clone();
    residual.gemm(-1.0, w, h, 1.0);
    residual.norm()
}

fn converged(prev: f64, current: f64, tol: f64) -> bool {
    prev <= 0.0 || (prev - current) / prev < tol
}

/// Factorizes the N×D nonnegative matrix `x` (one sample per row) at rank
/// `k`. Returns the model and the k×N training codes `H`.
///
/// Iteration stops when the relative decrease of the objective falls below
/// `tol` or after `max_iter` iterations. `W` and `H` start uniform in
/// `(0, 1]` drawn from `seed`.
pub fn nmf_fit(x: &DMatrix<f64>, k: usize, max_iter: usize, tol: f64, seed: u64) -> Result<(NmfModel, DMatrix<f64>)> {
    check_nonnegative(x)?;
    let (n, d) = x.shape();
    if k == 0 || k > n.min(d) {
        return Err(Error::out_of_range(
            "nmf rank k",
            k,
            format!("1 ≤ k ≤ min(N, D) = {}", n.min(d)),
        ));
    }
    if max_iter == 0 {
        return Err(Error::out_of_range("nmf max_iter", max_iter, "≥ 1"));
    }

    let xt = x.transpose();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || 1.0 - rng.random::<f64>();
    let mut w = DMatrix::from_row_iterator(d, k, std::iter::repeat_with(&mut draw).take(d * k));
    let mut h = DMatrix::from_row_iterator(k, n, std::iter::repeat_with(&mut draw).take(k * n));

    let mut prev = frobenius_error(&xt, &w, &h);
    let mut trace = Vec::with_capacity(max_iter.min(4096));
    for _ in 0..max_iter {
        // W ← W ⊙ (X̃Hᵀ) / (W H Hᵀ + ε)
        let xht = &xt * h.transpose();
        let hht = &h * h.transpose();
        let whht = &w * hht;
        multiplicative_step(&mut w, &xht, &whht);
        // H ← H ⊙ (WᵀX̃) / (WᵀW H + ε)
        let wtx = w.tr_mul(&xt);
        let wtw = w.tr_mul(&w);
        let wtwh = wtw * &h;
        multiplicative_step(&mut h, &wtx, &wtwh);

        let current = frobenius_error(&xt, &w, &h);
        trace.push(current);
        if converged(prev, current, tol) {
            break;
        }
        prev = current;
    }

    let model = NmfModel {
        w,
        iterations_run: trace.len(),
        objective_trace: trace,
        epsilon: EPSILON,
    };
    Ok((model, h))
}

impl NmfModel {
    pub fn rank(&self) -> usize {
        self.w.ncols()
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    /// Encodes one sample with `W` frozen: `h` starts at `1/k` and follows the
    /// H-update until the relative decrease of `‖x − W h‖` drops below `tol`.
    pub fn transform(&self, x: &DVector<f64>, max_iter: usize, tol: f64) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if let Some(i) = x.iter().position(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Error::NegativeEntry {
                row: i,
                col: 0,
                value: x[i],
            });
        }
        let k = self.rank();
        let wtx = self.w.tr_mul(x);
        let wtw = self.w.tr_mul(&self.w);
        let error = |h: &DVector<f64>| (x - &self.w * h).norm();

        let mut h = DVector::from_element(k, 1.0 / k as f64);
        let mut prev = error(&h);
        for _ in 0..max_iter {
            let denom = &wtw * &h;
            for i in 0..k {
                h[i] *= wtx[i] / (denom[i] + self.epsilon);
            }
            let current = error(&h);
            if converged(prev, current, tol) {
                break;
            }
            prev = current;
        }
        Ok(h)
    }

    /// Encodes every row of `x`; returns one code per row.
    pub fn transform_rows(&self, x: &DMatrix<f64>, max_iter: usize, tol: f64) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(x.nrows(), self.rank());
        for i in 0..x.nrows() {
            let h = self
                .transform(&x.row(i).transpose(), max_iter, tol)
                .map_err(|e| match e {
                    Error::NegativeEntry { row, value, .. } => Error::NegativeEntry {
                        row: i,
                        col: row,
                        value,
                    },
                    e => e,
                })?;
            out.row_mut(i).copy_from(&h.transpose());
        }
        Ok(out)
    }

    /// Writes `nmf_w.mat` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        write_matrix(&dir.join("nmf_w.mat"), &self.w)
    }

    /// Reads `nmf_w.mat`; fit diagnostics are not persisted.
    pub fn load(dir: &Path) -> Result<Self> {
        let w = read_matrix(&dir.join("nmf_w.mat"))?;
        check_nonnegative(&w)?;
        Ok(Self {
            w,
            iterations_run: 0,
            objective_trace: Vec::new(),
            epsilon: EPSILON,
        })
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::dmatrix;

    use super::*;

    fn random_positive(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| rng.random::<f64>() + 0.05)
    }

    fn is_nonincreasing(trace: &[f64]) -> bool {
        trace.windows(2).all(|w| w[1] <= w[0] + 1e-9)
    }

    #[test]
    fn rank_one_exact() {
        // X̃ = [[1,2],[2,4]] is symmetric, so X = X̃ᵀ = X̃.
        let x = dmatrix![1.0, 2.0; 2.0, 4.0];
        let (model, h) = nmf_fit(&x, 1, 2000, 0.0, 7).unwrap();
        assert!(frobenius_error(&x.transpose(), &model.w, &h) <= 1e-6);
        assert!(*model.objective_trace.last().unwrap() <= 1e-6);
    }

    #[test]
    fn trace_nonincreasing_on_random_matrix() {
        let x = random_positive(20, 10, 3);
        for k in 1..=10 {
            let (model, h) = nmf_fit(&x, k, 300, 0.0, 11).unwrap();
            assert!(is_nonincreasing(&model.objective_trace), "k={k}");
            assert!(model.w.iter().all(|&v| v >= 0.0));
            assert!(h.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn recovers_known_factors() {
        let w0 = random_positive(10, 3, 21);
        let h0 = random_positive(3, 8, 22);
        let x = (&w0 * &h0).transpose();
        let (model, _) = nmf_fit(&x, 3, 2000, 0.0, 5).unwrap();
        assert_eq!(model.iterations_run, 2000);
        let err = *model.objective_trace.last().unwrap();
        assert!(err <= 1e-4, "final error {err}");
    }

    #[test]
    fn deterministic_given_seed() {
        let x = random_positive(12, 9, 1);
        let a = nmf_fit(&x, 4, 50, 1e-6, 99).unwrap();
        let b = nmf_fit(&x, 4, 50, 1e-6, 99).unwrap();
        assert_eq!(a, b);
        let c = nmf_fit(&x, 4, 50, 1e-6, 100).unwrap();
        assert_ne!(a.0.w, c.0.w);
    }

    #[test]
    fn tolerance_stops_early() {
        let x = random_positive(20, 10, 4);
        let (model, _) = nmf_fit(&x, 3, 500, 1e-3, 0).unwrap();
        assert!(model.iterations_run < 500);
        let t = &model.objective_trace;
        let n = t.len();
        assert!((t[n - 2] - t[n - 1]) / t[n - 2] < 1e-3);
    }

    #[test]
    fn rejects_negative_and_bad_rank() {
        let x = dmatrix![1.0, 0.0; 0.5, -0.25];
        match nmf_fit(&x, 1, 10, 0.0, 0).unwrap_err() {
            Error::NegativeEntry { row, col, .. } => assert_eq!((row, col), (1, 1)),
            e => panic!("{e}"),
        }
        let x = random_positive(4, 3, 0);
        assert!(nmf_fit(&x, 0, 10, 0.0, 0).is_err());
        assert!(nmf_fit(&x, 4, 10, 0.0, 0).is_err());
        assert!(nmf_fit(&x, 3, 0, 0.0, 0).is_err());
    }

    #[test]
    fn transform_recovers_code() {
        let x = random_positive(30, 10, 8);
        let (model, _) = nmf_fit(&x, 4, 200, 0.0, 2).unwrap();
        let h0 = DVector::from_vec(vec![0.7, 0.1, 1.3, 0.4]);
        let target = &model.w * &h0;
        let h = model.transform(&target, 100_000, 0.0).unwrap();
        let err = (&target - &model.w * &h).norm();
        assert!(err <= 1e-4, "residual {err}");
    }

    #[test]
    fn transform_zero_and_sign() {
        let x = random_positive(15, 8, 9);
        let (model, _) = nmf_fit(&x, 3, 100, 0.0, 2).unwrap();
        let h = model.transform(&DVector::zeros(8), 500, 1e-6).unwrap();
        assert!(h.iter().all(|&v| (0.0..=EPSILON).contains(&v)));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let v = DVector::from_fn(8, |_, _| rng.random::<f64>());
            let h = model.transform(&v, 500, 1e-6).unwrap();
            assert!(h.iter().all(|&c| c >= 0.0));
        }
        assert!(model.transform(&DVector::from_element(8, -1.0), 5, 0.0).is_err());
        assert!(model.transform(&DVector::zeros(7), 5, 0.0).is_err());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let (model, _) = nmf_fit(&random_positive(6, 5, 3), 2, 20, 0.0, 1).unwrap();
        model.save(dir.path()).unwrap();
        let back = NmfModel::load(dir.path()).unwrap();
        assert_eq!(back.w, model.w);
    }
}
