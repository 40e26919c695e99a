//! k-nearest-neighbour classification: Euclidean metric, equal vote weights.
//!
//! Tie rules are fixed so predictions are reproducible: candidates at equal
//! distance are ordered by training-row index, and vote ties go to the
//! smallest class code.

use super::{check_rows_labels, ClassifierError};
use crate::signal::ActivityLabel;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<ActivityLabel>,
    pub k: usize,
}

pub fn train_knn(
    rows: &[Vec<f64>],
    labels: &[ActivityLabel],
    k: usize,
) -> Result<KnnModel, ClassifierError> {
    check_rows_labels(rows, labels)?;
    if k == 0 || k > rows.len() {
        return Err(ClassifierError::KTooLarge { k, rows: rows.len() });
    }
    Ok(KnnModel { rows: rows.to_vec(), labels: labels.to_vec(), k })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// (distance, row index) with total order, worst-first for the heap.
#[derive(PartialEq)]
struct Candidate(f64, usize);

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap()
            .then(self.1.cmp(&other.1))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl KnnModel {
    pub fn predict(&self, row: &[f64]) -> Result<ActivityLabel, ClassifierError> {
        let dim = self.rows[0].len();
        if row.len() != dim {
            return Err(ClassifierError::DimensionMismatch { expected: dim, got: row.len() });
        }
        // Max-heap of the k best candidates; a newcomer beating the current
        // worst (by distance, then index) replaces it.
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(self.k + 1);
        for (i, train) in self.rows.iter().enumerate() {
            heap.push(Candidate(squared_distance(row, train), i));
            if heap.len() > self.k {
                heap.pop();
            }
        }
        let mut votes = [0usize; 6];
        for Candidate(_, i) in heap {
            votes[self.labels[i].code()] += 1;
        }
        let best = ActivityLabel::ALL
            .into_iter()
            .max_by_key(|a| (votes[a.code()], std::cmp::Reverse(a.code())))
            .unwrap();
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive-scan oracle: stable sort by (distance, index), majority
    /// vote with the same tie rules.
    pub fn brute_force_predict(model: &KnnModel, row: &[f64]) -> ActivityLabel {
        let mut scored: Vec<(f64, usize)> = model
            .rows
            .iter()
            .enumerate()
            .map(|(i, train)| (squared_distance(row, train), i))
            .collect();
        scored.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut votes = [0usize; 6];
        for (_, i) in scored.into_iter().take(model.k) {
            votes[model.labels[i].code()] += 1;
        }
        ActivityLabel::ALL
            .into_iter()
            .max_by_key(|a| (votes[a.code()], std::cmp::Reverse(a.code())))
            .unwrap()
    }

    fn random_training(n: usize, dim: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<ActivityLabel>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> =
            (0..n).map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
        let labels: Vec<ActivityLabel> =
            (0..n).map(|_| ActivityLabel::from_code(rng.gen_range(0..6)).unwrap()).collect();
        (rows, labels)
    }

    #[test]
    fn duplicated_training_row_wins() {
        let mut rows = vec![vec![5.0, 5.0]; 10];
        let mut labels = vec![ActivityLabel::LiftingKnee; 10];
        rows.push(vec![-4.0, 2.0]);
        labels.push(ActivityLabel::Squatting);
        let model = train_knn(&rows, &labels, 10).unwrap();
        assert_eq!(model.predict(&[5.0, 5.0]).unwrap(), ActivityLabel::LiftingKnee);
    }

    #[test]
    fn k_of_one_memorizes_training_data() {
        let (rows, labels) = random_training(60, 4, 1);
        let model = train_knn(&rows, &labels, 1).unwrap();
        for (row, &label) in rows.iter().zip(&labels) {
            assert_eq!(model.predict(row).unwrap(), label);
        }
    }

    #[test]
    fn matches_brute_force_oracle() {
        let (rows, labels) = random_training(300, 6, 2);
        let model = train_knn(&rows, &labels, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let q: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.2..1.2)).collect();
            assert_eq!(model.predict(&q).unwrap(), brute_force_predict(&model, &q));
        }
    }

    #[test]
    fn ties_resolve_by_row_index_then_class_code() {
        // Four equidistant neighbours, k = 2: indices 0 and 1 win.
        let rows = vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        let labels = vec![
            ActivityLabel::SidewaysSwing,
            ActivityLabel::SidewaysSwing,
            ActivityLabel::ForwardSwing,
            ActivityLabel::ForwardSwing,
        ];
        let model = train_knn(&rows, &labels, 2).unwrap();
        assert_eq!(model.predict(&[0.0, 0.0]).unwrap(), ActivityLabel::SidewaysSwing);
        // k = 4 splits the vote 2-2: smallest class code wins.
        let model = train_knn(&rows, &labels, 4).unwrap();
        assert_eq!(model.predict(&[0.0, 0.0]).unwrap(), ActivityLabel::ForwardSwing);
    }

    #[test]
    fn rejects_bad_k_and_empty_input() {
        let (rows, labels) = random_training(5, 2, 4);
        assert_eq!(
            train_knn(&rows, &labels, 6).unwrap_err(),
            ClassifierError::KTooLarge { k: 6, rows: 5 }
        );
        assert_eq!(
            train_knn(&[], &[], 1).unwrap_err(),
            ClassifierError::EmptyTrainingSet
        );
    }
}
