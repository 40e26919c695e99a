//! Dynamic time warping distance and nearest-template classification.
//!
//! The cost is the classic unconstrained dynamic program over the full
//! alignment grid with absolute-difference local cost:
//! `DTW(a,b) = |x[a]-y[b]| + min(DTW(a-1,b), DTW(a,b-1), DTW(a-1,b-1))`,
//! first row and column accumulating monotonically. DTW is not a metric
//! (no triangle inequality), but it is symmetric and zero on identical
//! series.

use super::ClassifierError;
use crate::signal::ActivityLabel;
use rayon::prelude::*;

/// Alignment cost between two non-empty series.
pub fn dtw_distance(x: &[f64], y: &[f64]) -> Result<f64, ClassifierError> {
    if x.is_empty() || y.is_empty() {
        return Err(ClassifierError::EmptySeries);
    }
    let m = y.len();
    let mut prev = vec![0.0f64; m];
    let mut cur = vec![0.0f64; m];
    // First row: aligning x[0] against growing prefixes of y.
    prev[0] = (x[0] - y[0]).abs();
    for j in 1..m {
        prev[j] = prev[j - 1] + (x[0] - y[j]).abs();
    }
    for xi in &x[1..] {
        cur[0] = prev[0] + (xi - y[0]).abs();
        for j in 1..m {
            let best = prev[j].min(cur[j - 1]).min(prev[j - 1]);
            cur[j] = (xi - y[j]).abs() + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m - 1])
}

/// Reference series per class. Classification assigns the label of the
/// template at minimal DTW distance.
#[derive(Debug, Clone, PartialEq)]
pub struct DtwTemplates {
    /// (label, series), ordered by class code then insertion.
    pub templates: Vec<(ActivityLabel, Vec<f64>)>,
    pub classes: Vec<ActivityLabel>,
}

impl DtwTemplates {
    /// Build from explicit templates; every expected class needs at least
    /// one reference series.
    pub fn new(
        mut templates: Vec<(ActivityLabel, Vec<f64>)>,
        classes: &[ActivityLabel],
    ) -> Result<DtwTemplates, ClassifierError> {
        for &class in classes {
            if !templates.iter().any(|(l, _)| *l == class) {
                return Err(ClassifierError::MissingTemplates(class));
            }
        }
        if templates.iter().any(|(_, s)| s.is_empty()) {
            return Err(ClassifierError::EmptySeries);
        }
        templates.sort_by_key(|(l, _)| l.code());
        Ok(DtwTemplates { templates, classes: classes.to_vec() })
    }
}

/// Label of the nearest template; distance ties go to the smallest class
/// code (templates are stored in code order and only a strictly smaller
/// distance replaces the best).
pub fn dtw_classify(
    window: &[f64],
    templates: &DtwTemplates,
) -> Result<ActivityLabel, ClassifierError> {
    let mut best: Option<(f64, ActivityLabel)> = None;
    for (label, series) in &templates.templates {
        let d = dtw_distance(window, series)?;
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, *label));
        }
    }
    best.map(|(_, l)| l).ok_or(ClassifierError::MissingTemplates(ActivityLabel::ForwardSwing))
}

/// Pick one template per class: the training window with minimal summed
/// DTW distance to its same-class peers (ties by lowest window index).
pub fn fit_medoid_templates(
    windows: &[Vec<f64>],
    labels: &[ActivityLabel],
    classes: &[ActivityLabel],
) -> Result<DtwTemplates, ClassifierError> {
    if windows.is_empty() || windows.len() != labels.len() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    let medoids: Result<Vec<(ActivityLabel, Vec<f64>)>, ClassifierError> = classes
        .par_iter()
        .map(|&class| {
            let members: Vec<usize> = (0..windows.len())
                .filter(|&i| labels[i] == class)
                .collect();
            if members.is_empty() {
                return Err(ClassifierError::MissingTemplates(class));
            }
            if members.len() == 1 {
                return Ok((class, windows[members[0]].clone()));
            }
            // Summed distances via the symmetric pairwise matrix.
            let m = members.len();
            let pairs: Vec<(usize, usize)> = (0..m)
                .flat_map(|a| ((a + 1)..m).map(move |b| (a, b)))
                .collect();
            let distances: Result<Vec<f64>, ClassifierError> = pairs
                .par_iter()
                .map(|&(a, b)| dtw_distance(&windows[members[a]], &windows[members[b]]))
                .collect();
            let distances = distances?;
            let mut sums = vec![0.0f64; m];
            for (&(a, b), &d) in pairs.iter().zip(&distances) {
                sums[a] += d;
                sums[b] += d;
            }
            let best = (0..m)
                .min_by(|&a, &b| sums[a].partial_cmp(&sums[b]).unwrap().then(a.cmp(&b)))
                .unwrap();
            Ok((class, windows[members[best]].clone()))
        })
        .collect();
    DtwTemplates::new(medoids?, classes)
}
