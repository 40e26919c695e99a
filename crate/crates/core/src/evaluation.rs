//! Stratified cross-validated evaluation: fold planning, per-fold training
//! with leak-free normalization and template fitting, pooled confusion
//! matrices, the accuracy/precision/recall/F1 metric suite, and the
//! accuracy-versus-window-duration sweep.

use crate::classifiers::{
    fit_medoid_templates, train_gnb, train_knn, train_svm, train_tree, ClassifierError,
    ClassifierKind, SvmParams, TrainedClassifier,
};
use crate::features::{
    build_feature_matrix, FeatureConfig, FeatureError, FeatureMatrix, NormalizationStats,
};
use crate::signal::{ActivityLabel, Dataset, SignalError};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("fold count must be at least 2 (k-1 training folds need data), got {0}")]
    BadFoldCount(usize),
    #[error("class {label} has {rows} rows; cannot stratify into {k} folds")]
    ClassTooSmall { label: ActivityLabel, rows: usize, k: usize },
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("window of {0} s does not fit the recordings")]
    WindowTooLong(f64),
    #[error("fold {fold}: {source}")]
    Training { fold: usize, source: ClassifierError },
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Row-to-fold assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn train_test(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (row, &f) in self.assignments.iter().enumerate() {
            if f == fold {
                test.push(row);
            } else {
                train.push(row);
            }
        }
        (train, test)
    }
}

/// Stratified fold assignment: per class, a seeded shuffle dealt round-robin,
/// so per-class fold counts differ by at most one.
pub fn make_folds(
    labels: &[ActivityLabel],
    k: usize,
    seed: u64,
) -> Result<FoldPlan, EvaluationError> {
    if k < 2 || k > labels.len() {
        return Err(EvaluationError::BadFoldCount(k));
    }
    let mut assignments = vec![0usize; labels.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for class in ActivityLabel::ALL {
        let mut members: Vec<usize> =
            (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(EvaluationError::ClassTooSmall { label: class, rows: members.len(), k });
        }
        members.shuffle(&mut rng);
        for (j, &row) in members.iter().enumerate() {
            assignments[row] = j % k;
        }
    }
    Ok(FoldPlan { k, assignments, seed })
}

/// Fold assignment that keeps every subject's rows in a single fold.
pub fn make_subject_folds(
    subject_ids: &[String],
    k: usize,
    seed: u64,
) -> Result<FoldPlan, EvaluationError> {
    if k < 2 {
        return Err(EvaluationError::BadFoldCount(k));
    }
    let mut subjects: Vec<&String> = Vec::new();
    for id in subject_ids {
        if !subjects.contains(&id) {
            subjects.push(id);
        }
    }
    if subjects.len() < k {
        return Err(EvaluationError::BadFoldCount(k));
    }
    let mut order: Vec<usize> = (0..subjects.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let fold_of = |id: &String| {
        let pos = subjects.iter().position(|s| *s == id).unwrap();
        order.iter().position(|&o| o == pos).unwrap() % k
    };
    let assignments = subject_ids.iter().map(fold_of).collect();
    Ok(FoldPlan { k, assignments, seed })
}

/// 6x6 counts; rows are the true class, columns the predicted class.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 6]; 6],
}

impl ConfusionMatrix {
    pub fn add(&mut self, true_label: ActivityLabel, predicted: ActivityLabel) {
        self.counts[true_label.code()][predicted.code()] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (c, oc) in row.iter_mut().zip(orow) {
                *c += oc;
            }
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..6).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, class: usize) -> usize {
        self.counts[class].iter().sum()
    }

    pub fn col_sum(&self, class: usize) -> usize {
        self.counts.iter().map(|row| row[class]).sum()
    }
}

/// Accuracy plus macro-averaged precision/recall/F1. Classes absent from
/// the test data are left out of the macro averages and listed.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub excluded_classes: Vec<ActivityLabel>,
}

pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<Metrics, EvaluationError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvaluationError::EmptyMatrix);
    }
    let accuracy = cm.trace() as f64 / total as f64;
    let mut excluded = Vec::new();
    let (mut p_sum, mut r_sum, mut f_sum, mut included) = (0.0, 0.0, 0.0, 0usize);
    for class in ActivityLabel::ALL {
        let c = class.code();
        let support = cm.row_sum(c);
        if support == 0 {
            excluded.push(class);
            continue;
        }
        let tp = cm.counts[c][c] as f64;
        let predicted = cm.col_sum(c) as f64;
        let precision = if predicted > 0.0 { tp / predicted } else { 0.0 };
        let recall = tp / support as f64;
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        p_sum += precision;
        r_sum += recall;
        f_sum += f1;
        included += 1;
    }
    Ok(Metrics {
        accuracy,
        macro_precision: p_sum / included as f64,
        macro_recall: r_sum / included as f64,
        macro_f1: f_sum / included as f64,
        excluded_classes: excluded,
    })
}

/// Everything a cross-validated run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub classifier: ClassifierKind,
    pub window_s: f64,
    pub windows_per_recording: usize,
    pub features: FeatureConfig,
    pub folds: usize,
    pub seed: u64,
    pub svm: SvmParams,
    pub knn_k: usize,
    pub tree_max_splits: usize,
    /// Fit min-max on the full matrix before splitting (the global scheme)
    /// instead of per training fold.
    pub global_normalization: bool,
    /// Keep each subject's rows within one fold.
    pub group_by_subject: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            classifier: ClassifierKind::Svm,
            window_s: 4.0,
            windows_per_recording: 2,
            features: FeatureConfig::default(),
            folds: 5,
            seed: 0,
            svm: SvmParams::default(),
            knn_k: 10,
            tree_max_splits: 20,
            global_normalization: false,
            group_by_subject: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub fold: usize,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub classifier: ClassifierKind,
    pub window_s: f64,
    pub use_dwt: bool,
    pub folds: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub mean_fold_accuracy: f64,
    pub per_fold: Vec<FoldOutcome>,
    pub confusion: ConfusionMatrix,
    pub excluded_classes: Vec<ActivityLabel>,
}

/// Train one classifier on the selected training rows only. Normalization
/// statistics and DTW templates see nothing outside `train_idx`; the
/// returned stats scale held-out rows.
pub fn train_fold(
    matrix: &FeatureMatrix,
    train_idx: &[usize],
    config: &PipelineConfig,
) -> Result<(TrainedClassifier, Option<NormalizationStats>), ClassifierError> {
    let stats = if config.global_normalization {
        // Matrix was already scaled globally.
        None
    } else {
        Some(NormalizationStats::fit(&matrix.rows, Some(train_idx)))
    };
    let scale = |i: usize| {
        let mut row = matrix.rows[i].clone();
        if let Some(s) = &stats {
            s.apply_row(&mut row);
        }
        row
    };
    let labels: Vec<ActivityLabel> = train_idx.iter().map(|&i| matrix.labels[i]).collect();
    let model = match config.classifier {
        ClassifierKind::Svm => {
            let rows: Vec<Vec<f64>> = train_idx.iter().map(|&i| scale(i)).collect();
            TrainedClassifier::Svm(train_svm(&rows, &labels, &config.svm)?)
        }
        ClassifierKind::Knn => {
            let rows: Vec<Vec<f64>> = train_idx.iter().map(|&i| scale(i)).collect();
            TrainedClassifier::Knn(train_knn(&rows, &labels, config.knn_k)?)
        }
        ClassifierKind::Gnb => {
            let rows: Vec<Vec<f64>> = train_idx.iter().map(|&i| scale(i)).collect();
            TrainedClassifier::Gnb(train_gnb(&rows, &labels)?)
        }
        ClassifierKind::Tree => {
            let rows: Vec<Vec<f64>> = train_idx.iter().map(|&i| scale(i)).collect();
            TrainedClassifier::Tree(train_tree(&rows, &labels, config.tree_max_splits)?)
        }
        ClassifierKind::Dtw => {
            let windows: Vec<Vec<f64>> =
                train_idx.iter().map(|&i| matrix.windows[i].clone()).collect();
            let classes: Vec<ActivityLabel> = ActivityLabel::ALL
                .into_iter()
                .filter(|a| labels.contains(a))
                .collect();
            TrainedClassifier::Dtw(fit_medoid_templates(&windows, &labels, &classes)?)
        }
    };
    Ok((model, stats))
}

/// k-fold cross-validation: train on k-1 folds, test on the held-out fold,
/// pool the confusion counts, compute the metric suite.
pub fn cross_validate(
    dataset: &Dataset,
    config: &PipelineConfig,
) -> Result<EvaluationReport, EvaluationError> {
    let mut matrix = build_feature_matrix(
        dataset,
        config.window_s,
        config.windows_per_recording,
        &config.features,
    )?;
    if config.global_normalization {
        matrix.normalize_global();
    }
    let plan = if config.group_by_subject {
        make_subject_folds(&matrix.subject_ids, config.folds, config.seed)?
    } else {
        make_folds(&matrix.labels, config.folds, config.seed)?
    };
    evaluate_folds(&matrix, &plan, config)
}

/// Run the fold loop of [`cross_validate`] on a prepared matrix.
pub fn evaluate_folds(
    matrix: &FeatureMatrix,
    plan: &FoldPlan,
    config: &PipelineConfig,
) -> Result<EvaluationReport, EvaluationError> {
    let outcomes: Result<Vec<FoldOutcome>, EvaluationError> = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let (train_idx, test_idx) = plan.train_test(fold);
            let (model, stats) = train_fold(matrix, &train_idx, config)
                .map_err(|source| EvaluationError::Training { fold, source })?;
            let mut confusion = ConfusionMatrix::default();
            for &i in &test_idx {
                let mut row = matrix.rows[i].clone();
                if let Some(s) = &stats {
                    s.apply_row(&mut row);
                }
                let predicted = model
                    .predict(&row, &matrix.windows[i])
                    .map_err(|source| EvaluationError::Training { fold, source })?;
                confusion.add(matrix.labels[i], predicted);
            }
            let accuracy = confusion.trace() as f64 / confusion.total().max(1) as f64;
            Ok(FoldOutcome { fold, accuracy, confusion })
        })
        .collect();
    let outcomes = outcomes?;

    let mut pooled = ConfusionMatrix::default();
    for o in &outcomes {
        pooled.merge(&o.confusion);
    }
    let metrics = compute_metrics(&pooled)?;
    let mean_fold_accuracy =
        outcomes.iter().map(|o| o.accuracy).sum::<f64>() / outcomes.len() as f64;
    Ok(EvaluationReport {
        classifier: config.classifier,
        window_s: config.window_s,
        use_dwt: config.features.use_dwt,
        folds: plan.k,
        seed: config.seed,
        accuracy: metrics.accuracy,
        macro_precision: metrics.macro_precision,
        macro_recall: metrics.macro_recall,
        macro_f1: metrics.macro_f1,
        mean_fold_accuracy,
        per_fold: outcomes,
        confusion: pooled,
        excluded_classes: metrics.excluded_classes,
    })
}

/// One point of the accuracy-versus-window grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub window_s: f64,
    pub use_dwt: bool,
    pub accuracy: f64,
}

/// Cross-validate every (window length, wavelet on/off) pair. Each point
/// takes as many non-overlapping windows per recording as fit, capped at
/// the configured count. Rows come back sorted by (use_dwt, window_s),
/// wavelet-off first.
pub fn window_sweep(
    dataset: &Dataset,
    windows_s: &[f64],
    config: &PipelineConfig,
) -> Result<Vec<SweepPoint>, EvaluationError> {
    let duration = dataset.manifest.duration_s;
    let mut grid = Vec::new();
    for &use_dwt in &[false, true] {
        for &window_s in windows_s {
            let fit = (duration / window_s).floor() as usize;
            if fit == 0 {
                return Err(EvaluationError::WindowTooLong(window_s));
            }
            grid.push((use_dwt, window_s, fit.min(config.windows_per_recording).max(1)));
        }
    }
    let mut points = Vec::with_capacity(grid.len());
    for (use_dwt, window_s, count) in grid {
        let mut point_config = config.clone();
        point_config.window_s = window_s;
        point_config.windows_per_recording = count;
        point_config.features.use_dwt = use_dwt;
        let report = cross_validate(dataset, &point_config)?;
        points.push(SweepPoint { window_s, use_dwt, accuracy: report.accuracy });
    }
    points.sort_by(|a, b| {
        a.use_dwt
            .cmp(&b.use_dwt)
            .then(a.window_s.partial_cmp(&b.window_s).unwrap())
    });
    Ok(points)
}

/// Machine-readable report text: key-value lines, per-fold accuracies, the
/// count matrix, and the row-normalized percentage matrix.
pub fn render_report(report: &EvaluationReport, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "classifier = {}", report.classifier);
    let _ = writeln!(out, "window_s = {}", report.window_s);
    let _ = writeln!(out, "use_dwt = {}", report.use_dwt);
    let _ = writeln!(out, "folds = {}", report.folds);
    let _ = writeln!(out, "seed = {}", report.seed);
    let _ = writeln!(out, "accuracy = {}", report.accuracy);
    let _ = writeln!(out, "macro_precision = {}", report.macro_precision);
    let _ = writeln!(out, "macro_recall = {}", report.macro_recall);
    let _ = writeln!(out, "macro_f1 = {}", report.macro_f1);
    let _ = writeln!(out, "mean_fold_accuracy = {}", report.mean_fold_accuracy);
    for fold in &report.per_fold {
        let _ = writeln!(out, "fold_{}_accuracy = {}", fold.fold, fold.accuracy);
    }
    if !report.excluded_classes.is_empty() {
        let names: Vec<&str> = report.excluded_classes.iter().map(|c| c.name()).collect();
        let _ = writeln!(out, "# warning: excluded from macro averages: {}", names.join(", "));
    }
    let names: Vec<&str> = ActivityLabel::ALL.iter().map(|a| a.name()).collect();
    let _ = writeln!(out, "[confusion_counts]");
    let _ = writeln!(out, "true\\predicted,{}", names.join(","));
    for class in ActivityLabel::ALL {
        let row = report.confusion.counts[class.code()];
        let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "{},{}", class.name(), cells.join(","));
    }
    let _ = writeln!(out, "[confusion_percent]");
    let _ = writeln!(out, "true\\predicted,{}", names.join(","));
    for class in ActivityLabel::ALL {
        let support = report.confusion.row_sum(class.code()).max(1) as f64;
        let row = report.confusion.counts[class.code()];
        let cells: Vec<String> =
            row.iter().map(|&c| format!("{:.1}", 100.0 * c as f64 / support)).collect();
        let _ = writeln!(out, "{},{}", class.name(), cells.join(","));
    }
    out
}

/// One console line per report, aligned, rates as percentages.
pub fn render_summary_table(reports: &[EvaluationReport]) -> String {
    let mut out = String::from(
        "classifier  window_s  dwt  accuracy  precision  recall    f1\n",
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<10}  {:<8}  {:<3}  {:>7.1}%  {:>8.1}%  {:>6.1}%  {:>6.1}%",
            r.classifier.to_string(),
            r.window_s,
            if r.use_dwt { "on" } else { "off" },
            100.0 * r.accuracy,
            100.0 * r.macro_precision,
            100.0 * r.macro_recall,
            100.0 * r.macro_f1,
        );
    }
    out
}

/// Sweep results as a delimited table for external plotting.
pub fn render_sweep(points: &[SweepPoint], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("window_s,use_dwt,accuracy\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.window_s, p.use_dwt, p.accuracy);
    }
    out
}
