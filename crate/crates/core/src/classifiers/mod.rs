//! The five classifiers of the evaluation suite: one-vs-one cubic-kernel
//! SVM trained by sequential minimal optimization, k-nearest neighbours,
//! Gaussian naive Bayes, a Gini-impurity decision tree, and nearest-template
//! dynamic time warping.
//!
//! Feature classifiers consume normalized feature rows; the DTW classifier
//! consumes the raw windowed series. Trained models are immutable and all
//! tie-breaking rules are fixed, so predictions are reproducible.

pub mod dtw;
pub mod gnb;
pub mod io;
pub mod knn;
pub mod svm;
pub mod tree;

pub use dtw::{dtw_classify, dtw_distance, fit_medoid_templates, DtwTemplates};
pub use gnb::{train_gnb, GnbModel};
pub use knn::{train_knn, KnnModel};
pub use svm::{train_svm, SvmModel, SvmParams};
pub use tree::{train_tree, TreeModel};

use crate::signal::ActivityLabel;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training set holds a single class; need at least two")]
    SingleClass,
    #[error("class {label} has {rows} training rows; need at least {need}")]
    ClassTooSmall { label: ActivityLabel, rows: usize, need: usize },
    #[error("k = {k} exceeds the {rows} training rows")]
    KTooLarge { k: usize, rows: usize },
    #[error("input has {got} features, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rows and labels disagree: {rows} rows, {labels} labels")]
    RowLabelMismatch { rows: usize, labels: usize },
    #[error("SMO did not converge for pair {pair}: residual {residual} after {updates} updates")]
    NonConvergence { pair: String, residual: f64, updates: usize },
    #[error("no template for class {0}")]
    MissingTemplates(ActivityLabel),
    #[error("empty series")]
    EmptySeries,
    #[error("model file {path}:{line}: {message}")]
    ModelParse { path: String, line: usize, message: String },
    #[error("model i/o: {0}")]
    ModelIo(String),
}

/// Which classifier a pipeline runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassifierKind {
    Svm,
    Knn,
    Gnb,
    Tree,
    Dtw,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::Svm,
        ClassifierKind::Knn,
        ClassifierKind::Gnb,
        ClassifierKind::Tree,
        ClassifierKind::Dtw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Svm => "svm",
            ClassifierKind::Knn => "knn",
            ClassifierKind::Gnb => "gnb",
            ClassifierKind::Tree => "tree",
            ClassifierKind::Dtw => "dtw",
        }
    }

    pub fn parse(name: &str) -> Option<ClassifierKind> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A trained model of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedClassifier {
    Svm(SvmModel),
    Knn(KnnModel),
    Gnb(GnbModel),
    Tree(TreeModel),
    Dtw(DtwTemplates),
}

impl TrainedClassifier {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            TrainedClassifier::Svm(_) => ClassifierKind::Svm,
            TrainedClassifier::Knn(_) => ClassifierKind::Knn,
            TrainedClassifier::Gnb(_) => ClassifierKind::Gnb,
            TrainedClassifier::Tree(_) => ClassifierKind::Tree,
            TrainedClassifier::Dtw(_) => ClassifierKind::Dtw,
        }
    }

    /// Predict from a normalized feature row (`row`) or, for the template
    /// classifier, from the raw windowed series (`window`).
    pub fn predict(&self, row: &[f64], window: &[f64]) -> Result<ActivityLabel, ClassifierError> {
        match self {
            TrainedClassifier::Svm(m) => m.predict(row),
            TrainedClassifier::Knn(m) => m.predict(row),
            TrainedClassifier::Gnb(m) => m.predict(row),
            TrainedClassifier::Tree(m) => Ok(m.predict(row)),
            TrainedClassifier::Dtw(m) => dtw_classify(window, m),
        }
    }
}

/// Distinct labels present, ascending by class code.
pub(crate) fn present_classes(labels: &[ActivityLabel]) -> Vec<ActivityLabel> {
    let mut seen = [false; 6];
    for l in labels {
        seen[l.code()] = true;
    }
    ActivityLabel::ALL.into_iter().filter(|a| seen[a.code()]).collect()
}

pub(crate) fn check_rows_labels(
    rows: &[Vec<f64>],
    labels: &[ActivityLabel],
) -> Result<(), ClassifierError> {
    if rows.is_empty() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    if rows.len() != labels.len() {
        return Err(ClassifierError::RowLabelMismatch { rows: rows.len(), labels: labels.len() });
    }
    Ok(())
}
