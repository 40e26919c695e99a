//! One-vs-one soft-margin SVM with a polynomial kernel, trained by
//! sequential minimal optimization.
//!
//! Each unordered class pair gets its own binary subproblem (15 for six
//! classes). The dual is solved by repeatedly updating the maximal-violating
//! pair of Lagrange multipliers until the KKT gap falls below the tolerance.
//! Prediction is majority vote over the binary machines; vote ties break by
//! the largest summed absolute decision value, then the lowest class code.

use super::{check_rows_labels, present_classes, ClassifierError};
use crate::signal::ActivityLabel;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    /// Box constraint: upper bound on every dual coefficient.
    pub c: f64,
    /// Polynomial kernel degree; 3 gives the cubic kernel.
    pub kernel_degree: u32,
    /// Additive kernel offset: K(u, v) = (u.v + offset)^degree.
    pub kernel_offset: f64,
    /// KKT gap at which a binary subproblem counts as solved.
    pub tolerance: f64,
    /// Hard cap on pair updates per binary subproblem.
    pub max_pair_updates: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            kernel_degree: 3,
            kernel_offset: 1.0,
            tolerance: 1e-3,
            max_pair_updates: 1_000_000,
        }
    }
}

pub fn kernel(u: &[f64], v: &[f64], params: &SvmParams) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    (dot + params.kernel_offset).powi(params.kernel_degree as i32)
}

/// One trained binary subproblem. `dual_signed[i]` is `alpha_i * y_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySvm {
    /// Class that scores positive decision values (the lower class code).
    pub positive: ActivityLabel,
    /// Class that scores negative decision values.
    pub negative: ActivityLabel,
    pub support_vectors: Vec<Vec<f64>>,
    pub dual_signed: Vec<f64>,
    pub bias: f64,
}

impl BinarySvm {
    pub fn decision(&self, row: &[f64], params: &SvmParams) -> f64 {
        let raw: f64 = self
            .support_vectors
            .iter()
            .zip(&self.dual_signed)
            .map(|(sv, coef)| coef * kernel(sv, row, params))
            .sum();
        raw + self.bias
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub params: SvmParams,
    pub classes: Vec<ActivityLabel>,
    pub binaries: Vec<BinarySvm>,
    pub dim: usize,
}

/// Train one binary machine per unordered pair of present classes.
pub fn train_svm(
    rows: &[Vec<f64>],
    labels: &[ActivityLabel],
    params: &SvmParams,
) -> Result<SvmModel, ClassifierError> {
    check_rows_labels(rows, labels)?;
    let classes = present_classes(labels);
    if classes.len() < 2 {
        return Err(ClassifierError::SingleClass);
    }
    let dim = rows[0].len();

    let mut pairs = Vec::new();
    for (i, &a) in classes.iter().enumerate() {
        for &b in &classes[i + 1..] {
            pairs.push((a, b));
        }
    }
    let binaries: Result<Vec<BinarySvm>, ClassifierError> = pairs
        .into_par_iter()
        .map(|(pos, neg)| {
            let mut sub_rows = Vec::new();
            let mut sub_y = Vec::new();
            for (row, &label) in rows.iter().zip(labels) {
                if label == pos {
                    sub_rows.push(row.as_slice());
                    sub_y.push(1.0);
                } else if label == neg {
                    sub_rows.push(row.as_slice());
                    sub_y.push(-1.0);
                }
            }
            solve_binary(&sub_rows, &sub_y, pos, neg, params)
        })
        .collect();
    Ok(SvmModel { params: *params, classes, binaries: binaries?, dim })
}

/// SMO on the dual of one binary problem.
fn solve_binary(
    rows: &[&[f64]],
    y: &[f64],
    positive: ActivityLabel,
    negative: ActivityLabel,
    params: &SvmParams,
) -> Result<BinarySvm, ClassifierError> {
    let n = rows.len();
    let c = params.c;

    // Dense kernel cache; pair subproblems are a few hundred rows.
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel(rows[i], rows[j], params);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }

    // Minimize 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij, 0 <= a <= C, y'a = 0.
    let mut alpha = vec![0.0f64; n];
    let mut grad = vec![-1.0f64; n]; // gradient of the dual objective
    let mut updates = 0usize;
    loop {
        // Maximal-violating pair: i maximizes -y*grad over the "up" set,
        // j minimizes it over the "down" set.
        let mut i_best: Option<usize> = None;
        let mut j_best: Option<usize> = None;
        let (mut up_max, mut low_min) = (f64::NEG_INFINITY, f64::INFINITY);
        for t in 0..n {
            let v = -y[t] * grad[t];
            let movable_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            let movable_down = (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < c);
            if movable_up && v > up_max {
                up_max = v;
                i_best = Some(t);
            }
            if movable_down && v < low_min {
                low_min = v;
                j_best = Some(t);
            }
        }
        let gap = up_max - low_min;
        if gap <= params.tolerance || i_best.is_none() || j_best.is_none() {
            // Free support vectors satisfy b = y_i - f_raw(x_i); the up/down
            // extrema bracket the feasible bias, take the midpoint.
            let bias = (up_max + low_min) / 2.0;
            let mut support_vectors = Vec::new();
            let mut dual_signed = Vec::new();
            for t in 0..n {
                if alpha[t] > 1e-12 {
                    support_vectors.push(rows[t].to_vec());
                    dual_signed.push(alpha[t] * y[t]);
                }
            }
            return Ok(BinarySvm { positive, negative, support_vectors, dual_signed, bias });
        }
        if updates >= params.max_pair_updates {
            return Err(ClassifierError::NonConvergence {
                pair: format!("{positive} vs {negative}"),
                residual: gap,
                updates,
            });
        }
        let (i, j) = (i_best.unwrap(), j_best.unwrap());

        // Optimal step along the equality constraint for the chosen pair.
        let eta = (k[i * n + i] + k[j * n + j] - 2.0 * k[i * n + j]).max(1e-12);
        let mut step = gap / eta;
        // Clip to the box: alpha_i moves by +y_i*step, alpha_j by -y_j*step.
        let room_i = if y[i] > 0.0 { c - alpha[i] } else { alpha[i] };
        let room_j = if y[j] > 0.0 { alpha[j] } else { c - alpha[j] };
        step = step.min(room_i).min(room_j);
        alpha[i] += y[i] * step;
        alpha[j] -= y[j] * step;
        for t in 0..n {
            // Q_ti = y_t y_i K_ti; the alpha deltas are +/- y step.
            grad[t] += y[t] * step * (k[t * n + i] - k[t * n + j]);
        }
        updates += 1;
    }
}

impl SvmModel {
    /// Majority vote across the binary machines.
    pub fn predict(&self, row: &[f64]) -> Result<ActivityLabel, ClassifierError> {
        if row.len() != self.dim {
            return Err(ClassifierError::DimensionMismatch { expected: self.dim, got: row.len() });
        }
        let mut votes = [0usize; 6];
        let mut strength = [0.0f64; 6];
        for binary in &self.binaries {
            let f = binary.decision(row, &self.params);
            let winner = if f > 0.0 { binary.positive } else { binary.negative };
            votes[winner.code()] += 1;
            strength[winner.code()] += f.abs();
        }
        let mut best = self.classes[0];
        for &class in &self.classes[1..] {
            let (cb, cc) = (best.code(), class.code());
            if votes[cc] > votes[cb]
                || (votes[cc] == votes[cb] && strength[cc] > strength[cb])
            {
                best = class;
            }
        }
        Ok(best)
    }

    /// Per-binary KKT violations of the trained duals, for diagnostics and
    /// tests: one value per training row of each subproblem, computed from
    /// the decision value with the stored bias.
    pub fn kkt_residuals(
        &self,
        rows: &[Vec<f64>],
        labels: &[ActivityLabel],
    ) -> Vec<(ActivityLabel, ActivityLabel, f64)> {
        let mut out = Vec::new();
        for binary in &self.binaries {
            let mut worst = 0.0f64;
            for (row, &label) in rows.iter().zip(labels) {
                let y = if label == binary.positive {
                    1.0
                } else if label == binary.negative {
                    -1.0
                } else {
                    continue;
                };
                let margin = y * binary.decision(row, &self.params);
                // Recover this row's alpha from the stored support vectors.
                let alpha = binary
                    .support_vectors
                    .iter()
                    .zip(&binary.dual_signed)
                    .find(|(sv, _)| sv.as_slice() == row.as_slice())
                    .map(|(_, coef)| coef.abs())
                    .unwrap_or(0.0);
                let violation = if alpha <= 1e-12 {
                    (1.0 - margin).max(0.0)
                } else if alpha >= self.params.c - 1e-12 {
                    (margin - 1.0).max(0.0)
                } else {
                    (margin - 1.0).abs()
                };
                worst = worst.max(violation);
            }
            out.push((binary.positive, binary.negative, worst));
        }
        out
    }
}
