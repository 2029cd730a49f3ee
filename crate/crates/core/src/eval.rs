//! Stratified k-fold cross-validation over the five compared methods.
//!
//! Per fold, NMF, PCA and the automatic kernel bandwidth are fitted on the
//! training records only. Test labels are never read until scoring. The
//! ranking methods build one transductive graph over every record of the
//! dataset (training and test nodes of the fold).

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::{euclidean_nn_classify, predict_from_scores, LabeledIndex};
use crate::cli::Config;
use crate::dimred::{combine_rows, nmf_fit, pca_fit, NmfModel, PcaModel};
use crate::error::{Error, Result};
use crate::graphrank::{auto_sigma, build_knn_graph, RankingSolver, Sigma};
use crate::imaging::Dataset;

/// The compared methods, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Nmf,
    Pca,
    NmfPca,
    GraphRanking,
    NmfPcaGraphRanking,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Nmf,
        Method::Pca,
        Method::NmfPca,
        Method::GraphRanking,
        Method::NmfPcaGraphRanking,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Nmf => "NMF",
            Method::Pca => "PCA",
            Method::NmfPca => "NMF+PCA",
            Method::GraphRanking => "Graph ranking",
            Method::NmfPcaGraphRanking => "NMF+PCA+Graph ranking",
        }
    }

    /// File-name form, e.g. `nmf_pca_graph_ranking`.
    pub fn slug(self) -> String {
        self.name().to_lowercase().replace(['+', ' '], "_")
    }

    fn uses_nmf(self) -> bool {
        matches!(self, Method::Nmf | Method::NmfPca | Method::NmfPcaGraphRanking)
    }

    fn uses_pca(self) -> bool {
        matches!(self, Method::Pca | Method::NmfPca | Method::NmfPcaGraphRanking)
    }

    fn uses_ranking(self) -> bool {
        matches!(self, Method::GraphRanking | Method::NmfPcaGraphRanking)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPartition {
    pub n_folds: usize,
    /// Fold index of every record.
    pub assignment: Vec<usize>,
    pub seed: u64,
}

impl FoldPartition {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_folds];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Per class, shuffles the members with the seeded generator and deals them
/// round-robin to folds starting at fold 0.
pub fn make_folds(dataset: &Dataset, n_folds: usize, seed: u64) -> Result<FoldPartition> {
    if n_folds < 2 {
        return Err(Error::TooFewFolds);
    }
    let labels = dataset.class_indices()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    for class in 0..dataset.classes().len() {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for (slot, &i) in members.iter().enumerate() {
            assignment[i] = slot % n_folds;
        }
    }
    Ok(FoldPartition {
        n_folds,
        assignment,
        seed,
    })
}

/// Fraction of positions where `predicted` equals `truth`.
pub fn accuracy<T: PartialEq>(predicted: &[T], truth: &[T]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::InvalidInput("accuracy of an empty prediction list".into()));
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Reducers fitted on one fold's training records.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldModels {
    /// Model and training codes (one row per training record).
    pub nmf: Option<(NmfModel, DMatrix<f64>)>,
    pub pca: Option<PcaModel>,
}

fn select_rows(x: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), x.ncols(), |i, j| x[(rows[i], j)])
}

/// Fits whichever reducers `methods` need on `x[train]`.
pub fn fit_fold_models(x: &DMatrix<f64>, train: &[usize], methods: &[Method], config: &Config) -> Result<FoldModels> {
    let x_train = select_rows(x, train);
    let nmf = if methods.iter().any(|m| m.uses_nmf()) {
        let (model, h) = nmf_fit(
            &x_train,
            config.nmf_rank,
            config.nmf_max_iter,
            config.nmf_tol,
            config.seed,
        )?;
        Some((model, h.transpose()))
    } else {
        None
    };
    let pca = if methods.iter().any(|m| m.uses_pca()) {
        Some(pca_fit(&x_train, config.pca_dims)?)
    } else {
        None
    };
    Ok(FoldModels { nmf, pca })
}

/// NMF codes for every record: fitted codes for training rows, frozen-basis
/// encodings for the rest.
fn nmf_codes(
    x: &DMatrix<f64>,
    train: &[usize],
    nmf: &(NmfModel, DMatrix<f64>),
    config: &Config,
) -> Result<DMatrix<f64>> {
    let (model, train_codes) = nmf;
    let mut codes = DMatrix::zeros(x.nrows(), model.rank());
    let mut is_train = vec![false; x.nrows()];
    for (r, &i) in train.iter().enumerate() {
        codes.row_mut(i).copy_from(&train_codes.row(r));
        is_train[i] = true;
    }
    for i in (0..x.nrows()).filter(|&i| !is_train[i]) {
        let h = model.transform(&x.row(i).transpose(), config.nmf_max_iter, config.nmf_tol)?;
        codes.row_mut(i).copy_from(&h.transpose());
    }
    Ok(codes)
}

/// Representation of every record under `method`.
pub fn representation(
    method: Method,
    x: &DMatrix<f64>,
    train: &[usize],
    models: &FoldModels,
    config: &Config,
) -> Result<DMatrix<f64>> {
    let missing = |what: &str| Error::InvalidInput(format!("{} needs a fitted {what} model", method.name()));
    let nmf = || {
        models
            .nmf
            .as_ref()
            .ok_or_else(|| missing("NMF"))
            .and_then(|m| nmf_codes(x, train, m, config))
    };
    let pca = || {
        models
            .pca
            .as_ref()
            .ok_or_else(|| missing("PCA"))
            .and_then(|m| m.transform_rows(x))
    };
    match method {
        Method::Nmf => nmf(),
        Method::Pca => pca(),
        Method::NmfPca | Method::NmfPcaGraphRanking => Ok(combine_rows(&nmf()?, &pca()?)),
        Method::GraphRanking => Ok(x.clone()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoldOutcome {
    pub fold: usize,
    pub test: Vec<usize>,
    /// Predicted class index for each entry of `test`.
    pub predictions: Vec<usize>,
    /// Kernel bandwidth used by the ranking methods.
    pub sigma: Option<f64>,
    /// Test nodes that fell back to Euclidean 1-NN.
    pub fallbacks: usize,
}

/// Classifies one fold's test records given an already computed
/// representation. Only the labels of training records are read.
fn classify_fold(
    method: Method,
    reps: &DMatrix<f64>,
    train: &[usize],
    test: &[usize],
    labels: &[usize],
    config: &Config,
) -> Result<(Vec<usize>, Option<f64>, usize)> {
    let train_labels: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
    if !method.uses_ranking() {
        let train_reps = select_rows(reps, train);
        let predictions = test
            .iter()
            .map(|&i| euclidean_nn_classify(&train_reps, &train_labels, &reps.row(i).transpose()))
            .collect::<Result<Vec<_>>>()?;
        return Ok((predictions, None, 0));
    }
    let sigma = match config.sigma {
        Sigma::Auto => auto_sigma(&select_rows(reps, train), config.graph_k)?,
        Sigma::Fixed(s) => s,
    };
    let graph = build_knn_graph(reps, config.graph_k, Sigma::Fixed(sigma))?;
    let index = LabeledIndex::new(
        reps.nrows(),
        train.iter().copied().zip(train_labels).collect(),
        test.to_vec(),
    )?;
    let solver = RankingSolver::new(&graph, config.alpha)?;
    let mut fallbacks = 0;
    let mut predictions = Vec::with_capacity(test.len());
    for &q in test {
        let scores = solver.scores(q);
        let p = predict_from_scores(scores.as_slice(), Some(reps), &index, q)?;
        fallbacks += usize::from(p.fallback);
        predictions.push(p.class);
    }
    Ok((predictions, Some(sigma), fallbacks))
}

fn fold_split(partition: &FoldPartition, fold: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let test = partition.test_indices(fold);
    let train = partition.train_indices(fold);
    if test.is_empty() {
        return Err(Error::InvalidInput("fold has no test records".into()));
    }
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    Ok((train, test))
}

/// Fits and evaluates a single fold for a single method.
pub fn evaluate_fold(
    dataset: &Dataset,
    partition: &FoldPartition,
    fold: usize,
    method: Method,
    config: &Config,
) -> Result<(FoldModels, FoldOutcome)> {
    let run = || {
        let (train, test) = fold_split(partition, fold)?;
        let labels = dataset.class_indices()?;
        let x = dataset.matrix();
        let models = fit_fold_models(&x, &train, &[method], config)?;
        let reps = representation(method, &x, &train, &models, config)?;
        let (predictions, sigma, fallbacks) = classify_fold(method, &reps, &train, &test, &labels, config)?;
        Ok((
            models,
            FoldOutcome {
                fold,
                test,
                predictions,
                sigma,
                fallbacks,
            },
        ))
    };
    run().map_err(|e: Error| e.in_fold(fold))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub method: Method,
    pub classes: Vec<String>,
    pub per_fold_rates: Vec<f64>,
    pub average_rate: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<u64>>,
    /// Predicted class of every record, from the fold where it was tested.
    pub predictions: Vec<usize>,
    pub fallbacks: usize,
}

/// Cross-validates every method in `methods`, sharing the fitted reducers of
/// each fold between methods. Reports come back in [`Method::ALL`] order.
pub fn run_methods(
    dataset: &Dataset,
    partition: &FoldPartition,
    methods: &[Method],
    config: &Config,
) -> Result<Vec<EvalReport>> {
    if partition.assignment.len() != dataset.len() {
        return Err(Error::DimensionMismatch {
            expected: dataset.len(),
            got: partition.assignment.len(),
        });
    }
    let mut methods = methods.to_vec();
    methods.sort();
    methods.dedup();

    let labels = dataset.class_indices()?;
    let x = dataset.matrix();
    let n_classes = dataset.classes().len();
    let mut reports: Vec<EvalReport> = methods
        .iter()
        .map(|&method| EvalReport {
            method,
            classes: dataset.classes().to_vec(),
            per_fold_rates: Vec::with_capacity(partition.n_folds),
            average_rate: 0.0,
            confusion: vec![vec![0; n_classes]; n_classes],
            predictions: vec![0; dataset.len()],
            fallbacks: 0,
        })
        .collect();

    for fold in 0..partition.n_folds {
        let mut run = || -> Result<()> {
            let (train, test) = fold_split(partition, fold)?;
            let models = fit_fold_models(&x, &train, &methods, config)?;
            let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
            for report in reports.iter_mut() {
                let reps = representation(report.method, &x, &train, &models, config)?;
                let (predictions, _, fallbacks) = classify_fold(report.method, &reps, &train, &test, &labels, config)?;
                report.per_fold_rates.push(accuracy(&predictions, &truth)?);
                report.fallbacks += fallbacks;
                for ((&i, &p), &t) in test.iter().zip(&predictions).zip(&truth) {
                    report.predictions[i] = p;
                    report.confusion[t][p] += 1;
                }
            }
            Ok(())
        };
        run().map_err(|e| e.in_fold(fold))?;
    }
    for report in &mut reports {
        report.average_rate = report.per_fold_rates.iter().sum::<f64>() / report.per_fold_rates.len() as f64;
    }
    Ok(reports)
}

pub fn run_method(dataset: &Dataset, partition: &FoldPartition, method: Method, config: &Config) -> Result<EvalReport> {
    Ok(run_methods(dataset, partition, &[method], config)?.remove(0))
}

/// `93.8%`-style rendering of a rate.
pub fn percent(rate: f64) -> String {
    format!("{:.1}%", rate * 100.0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderedReport {
    /// Aligned table, preceded by `#` lines echoing the configuration.
    pub text: String,
    /// `method,fold,rate` rows with raw rates; `fold` is 1-based or
    /// `average`.
    pub csv: String,
}

/// Renders reports as a table with one row per method in [`Method::ALL`]
/// order.
pub fn render_report(reports: &[EvalReport], config: Option<&Config>) -> Result<RenderedReport> {
    if reports.is_empty() {
        return Err(Error::InvalidInput("no reports to render".into()));
    }
    let mut reports: Vec<&EvalReport> = reports.iter().collect();
    reports.sort_by_key(|r| r.method);
    let n_folds = reports.iter().map(|r| r.per_fold_rates.len()).max().unwrap_or(0);

    let mut text = String::new();
    if let Some(cfg) = config {
        for line in cfg.to_string().lines() {
            writeln!(text, "# {line}").unwrap();
        }
    }
    let name_width = reports
        .iter()
        .map(|r| r.method.name().len())
        .max()
        .unwrap_or(0)
        .max("Method".len());
    let mut header = format!("{:<name_width$}", "Method");
    for f in 1..=n_folds {
        write!(header, " | {:>6}", format!("F{f}")).unwrap();
    }
    write!(header, " | {:>7}", "Average").unwrap();
    writeln!(text, "{header}").unwrap();
    writeln!(text, "{}", "-".repeat(header.chars().count())).unwrap();

    let mut csv = String::from("method,fold,rate\n");
    for r in &reports {
        let mut row = format!("{:<name_width$}", r.method.name());
        for rate in &r.per_fold_rates {
            write!(row, " | {:>6}", percent(*rate)).unwrap();
        }
        for _ in r.per_fold_rates.len()..n_folds {
            write!(row, " | {:>6}", "").unwrap();
        }
        write!(row, " | {:>7}", percent(r.average_rate)).unwrap();
        writeln!(text, "{row}").unwrap();

        for (f, rate) in r.per_fold_rates.iter().enumerate() {
            writeln!(csv, "{},{},{}", r.method.name(), f + 1, rate).unwrap();
        }
        writeln!(csv, "{},average,{}", r.method.name(), r.average_rate).unwrap();
    }
    Ok(RenderedReport { text, csv })
}

/// Confusion matrix as CSV, rows = true class, columns = predicted class.
pub fn confusion_csv(report: &EvalReport) -> String {
    let mut out = String::from("true\\predicted");
    for c in &report.classes {
        write!(out, ",{c}").unwrap();
    }
    out.push('\n');
    for (c, row) in report.classes.iter().zip(&report.confusion) {
        out.push_str(c);
        for n in row {
            write!(out, ",{n}").unwrap();
        }
        out.push('\n');
    }
    out
}
