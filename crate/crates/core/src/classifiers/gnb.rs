//! Gaussian naive Bayes: per class, a prior plus an independent normal
//! per feature, evaluated in the log domain.

use super::{check_rows_labels, present_classes, ClassifierError};
use crate::signal::ActivityLabel;

#[derive(Debug, Clone, PartialEq)]
pub struct GnbModel {
    pub classes: Vec<ActivityLabel>,
    pub priors: Vec<f64>,
    /// Per class, per feature.
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

/// Relative variance floor: min-max-normalized features can be nearly
/// degenerate within a class.
const VARIANCE_FLOOR_SCALE: f64 = 1e-9;
const VARIANCE_FLOOR_ABS: f64 = 1e-12;

pub fn train_gnb(
    rows: &[Vec<f64>],
    labels: &[ActivityLabel],
) -> Result<GnbModel, ClassifierError> {
    check_rows_labels(rows, labels)?;
    let classes = present_classes(labels);
    if classes.len() < 2 {
        return Err(ClassifierError::SingleClass);
    }
    let dim = rows[0].len();
    let n = rows.len() as f64;

    // Global per-feature variance sets the scale of the floor.
    let mut global_mean = vec![0.0; dim];
    for row in rows {
        for (c, &v) in row.iter().enumerate() {
            global_mean[c] += v;
        }
    }
    global_mean.iter_mut().for_each(|m| *m /= n);
    let mut global_var = vec![0.0; dim];
    for row in rows {
        for (c, &v) in row.iter().enumerate() {
            global_var[c] += (v - global_mean[c]) * (v - global_mean[c]);
        }
    }
    global_var.iter_mut().for_each(|v| *v /= n);

    let mut priors = Vec::with_capacity(classes.len());
    let mut means = Vec::with_capacity(classes.len());
    let mut variances = Vec::with_capacity(classes.len());
    for &class in &classes {
        let members: Vec<&Vec<f64>> = rows
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == class)
            .map(|(r, _)| r)
            .collect();
        if members.len() < 2 {
            return Err(ClassifierError::ClassTooSmall {
                label: class,
                rows: members.len(),
                need: 2,
            });
        }
        let m = members.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in &members {
            for (c, &v) in row.iter().enumerate() {
                mean[c] += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= m);
        let mut var = vec![0.0; dim];
        for row in &members {
            for (c, &v) in row.iter().enumerate() {
                var[c] += (v - mean[c]) * (v - mean[c]);
            }
        }
        for (c, v) in var.iter_mut().enumerate() {
            *v = (*v / m).max(VARIANCE_FLOOR_SCALE * global_var[c]).max(VARIANCE_FLOOR_ABS);
        }
        priors.push(m / n);
        means.push(mean);
        variances.push(var);
    }
    Ok(GnbModel { classes, priors, means, variances })
}

impl GnbModel {
    /// Log of the unnormalized posterior of class index `ci`.
    pub fn log_posterior(&self, ci: usize, row: &[f64]) -> f64 {
        let mut lp = self.priors[ci].ln();
        for (c, &x) in row.iter().enumerate() {
            let var = self.variances[ci][c];
            let d = x - self.means[ci][c];
            lp -= 0.5 * ((2.0 * std::f64::consts::PI * var).ln() + d * d / var);
        }
        lp
    }

    pub fn predict(&self, row: &[f64]) -> Result<ActivityLabel, ClassifierError> {
        let dim = self.means[0].len();
        if row.len() != dim {
            return Err(ClassifierError::DimensionMismatch { expected: dim, got: row.len() });
        }
        // Classes are stored in ascending code order and strict `>` keeps
        // the first of a tie, so posterior ties go to the smallest code.
        let mut best = 0;
        let mut best_lp = self.log_posterior(0, row);
        for ci in 1..self.classes.len() {
            let lp = self.log_posterior(ci, row);
            if lp > best_lp {
                best = ci;
                best_lp = lp;
            }
        }
        Ok(self.classes[best])
    }
}
