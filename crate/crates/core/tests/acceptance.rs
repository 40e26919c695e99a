//! Acceptance suite: one test per exit criterion, each printing a PASS line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//! Tolerances and thresholds are pinned here, not configurable.

use creepwave::channel::{around_body_profile, decay_factor, BodyGeometry, ChannelParams};
use creepwave::classifiers::{dtw_distance, train_svm, ClassifierKind, SvmParams};
use creepwave::dwt::{decompose, load_wavelet, reconstruct, BoundaryMode};
use creepwave::evaluation::{cross_validate, render_report, PipelineConfig};
use creepwave::features::{build_feature_matrix, extract_features, FeatureConfig};
use creepwave::signal::{synth_dataset, ActivityLabel, SynthConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// The pinned dataset every end-to-end criterion runs on.
fn default_dataset() -> creepwave::signal::Dataset {
    synth_dataset(0, &SynthConfig::default()).unwrap()
}

fn random_signal(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-10.0..10.0)).collect()
}

#[test]
fn criterion_01_dwt_perfect_reconstruction() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let filters: Vec<_> = ["haar", "db4", "dmey"]
        .iter()
        .map(|n| load_wavelet(n).unwrap())
        .collect();
    for _ in 0..100 {
        let len = rng.gen_range(64..=1024);
        let signal = random_signal(&mut rng, len);
        let scale = signal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for filter in &filters {
            let d = decompose(&signal, filter, 5, BoundaryMode::Periodic).unwrap();
            let back = reconstruct(&d, filter).unwrap();
            let err = signal
                .iter()
                .zip(&back)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(
                err / scale < 1e-8,
                "{} len {len}: relative round-trip error {}",
                filter.name,
                err / scale
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 2.0, "round-trip suite took {elapsed:?}");
    println!(
        "criterion 01 (DWT perfect reconstruction < 1e-8, 100 signals x 3 wavelets, {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_02_dwt_parseval() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let filters: Vec<_> = ["haar", "db4", "dmey"]
        .iter()
        .map(|n| load_wavelet(n).unwrap())
        .collect();
    for _ in 0..100 {
        let len = rng.gen_range(64..=1024);
        let signal = random_signal(&mut rng, len);
        let energy: f64 = signal.iter().map(|v| v * v).sum();
        for filter in &filters {
            let d = decompose(&signal, filter, 5, BoundaryMode::Periodic).unwrap();
            let rel = (d.energy() - energy).abs() / energy;
            assert!(rel < 1e-8, "{} len {len}: energy error {rel}", filter.name);
        }
    }
    println!("criterion 02 (DWT energy conservation < 1e-8 on the same suite): PASS");
}

/// Exhaustive enumeration over all monotone warping paths.
fn dtw_all_paths(x: &[f64], y: &[f64], i: usize, j: usize) -> f64 {
    let cost = (x[i] - y[j]).abs();
    if i == 0 && j == 0 {
        return cost;
    }
    let mut best = f64::INFINITY;
    if i > 0 {
        best = best.min(dtw_all_paths(x, y, i - 1, j));
    }
    if j > 0 {
        best = best.min(dtw_all_paths(x, y, i, j - 1));
    }
    if i > 0 && j > 0 {
        best = best.min(dtw_all_paths(x, y, i - 1, j - 1));
    }
    cost + best
}

#[test]
fn criterion_03_dtw_matches_path_enumeration() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for case in 0..500 {
        let n = rng.gen_range(1..=7);
        let m = rng.gen_range(1..=7);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let fast = dtw_distance(&x, &y).unwrap();
        let slow = dtw_all_paths(&x, &y, n - 1, m - 1);
        assert!(
            (fast - slow).abs() < 1e-12,
            "case {case}: dp {fast} vs enumeration {slow}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "oracle suite took {elapsed:?}");
    println!("criterion 03 (DTW equals all-paths enumeration, 500 pairs, {elapsed:?}): PASS");
}

#[test]
fn criterion_04_knn_matches_brute_force() {
    let dataset = default_dataset();
    let mut matrix = build_feature_matrix(&dataset, 4.0, 2, &FeatureConfig::default()).unwrap();
    matrix.normalize_global();
    assert_eq!(matrix.len(), 720);
    let model = creepwave::classifiers::train_knn(&matrix.rows, &matrix.labels, 10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for case in 0..200 {
        let query: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.2..1.2)).collect();
        // Independent oracle: full stable scan sorted by (distance, index).
        let mut scored: Vec<(f64, usize)> = matrix
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                (row.iter().zip(&query).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i)
            })
            .collect();
        scored.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut votes = [0usize; 6];
        for (_, i) in scored.into_iter().take(10) {
            votes[matrix.labels[i].code()] += 1;
        }
        let oracle = ActivityLabel::ALL
            .into_iter()
            .max_by_key(|a| (votes[a.code()], std::cmp::Reverse(a.code())))
            .unwrap();
        assert_eq!(model.predict(&query).unwrap(), oracle, "case {case}");
    }
    println!("criterion 04 (KNN equals brute-force scan, 200 queries over 720 rows): PASS");
}

#[test]
fn criterion_05_svm_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for class in ActivityLabel::ALL {
        let angle = class.code() as f64 / 6.0 * std::f64::consts::TAU;
        for _ in 0..15 {
            rows.push(vec![
                4.0 * angle.cos() + rng.gen_range(-0.5..0.5),
                4.0 * angle.sin() + rng.gen_range(-0.5..0.5),
            ]);
            labels.push(class);
        }
    }
    let model = train_svm(&rows, &labels, &SvmParams::default()).unwrap();
    assert_eq!(model.binaries.len(), 15, "6 classes need 15 binary machines");
    for (row, &label) in rows.iter().zip(&labels) {
        assert_eq!(model.predict(row).unwrap(), label, "training row misclassified");
    }
    let mut worst = 0.0f64;
    for (pos, neg, residual) in model.kkt_residuals(&rows, &labels) {
        assert!(residual < 1e-3, "{pos} vs {neg}: KKT residual {residual}");
        worst = worst.max(residual);
    }
    println!(
        "criterion 05 (SVM: 15 binaries, 100% training accuracy, worst KKT residual {worst:.2e} < 1e-3): PASS"
    );
}

#[test]
fn criterion_06_feature_correctness() {
    // Symmetric fixtures: skewness vanishes.
    for fixture in [
        vec![3.0, -4.0, 3.0, -4.0],
        vec![5.0, -5.0, 2.0, -2.0, 1.0, -1.0],
        (0..64).map(|i| if i % 2 == 0 { 7.5 } else { -7.5 }).collect::<Vec<f64>>(),
    ] {
        let f = extract_features(&fixture).unwrap();
        assert!(f.skewness.abs() < 1e-12, "skewness {}", f.skewness);
    }
    // Monte Carlo oracle: kurtosis of a standard normal sample.
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let normal: Vec<f64> = (0..500_000)
        .flat_map(|_| {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            let t = 2.0 * std::f64::consts::PI * u2;
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    let f = extract_features(&normal).unwrap();
    assert!(
        (f.kurtosis - 3.0).abs() < 0.05,
        "kurtosis of 1e6 normal draws: {}",
        f.kurtosis
    );
    // Hand-computed moments.
    let f = extract_features(&[3.0, -4.0, 3.0, -4.0]).unwrap();
    assert!((f.rms - 12.5f64.sqrt()).abs() < 1e-12);
    assert!((f.mean - -0.5).abs() < 1e-12);
    assert!((f.std - 3.5).abs() < 1e-12);
    assert!((f.peak - 4.0).abs() < 1e-12);
    let f = extract_features(&[1.0, 2.0, 3.0, 2.0]).unwrap();
    assert!((f.mean - 2.0).abs() < 1e-12);
    assert!((f.peak - 3.0).abs() < 1e-12);
    println!("criterion 06 (features: symmetric skewness < 1e-12, normal kurtosis 3 +/- 0.05, hand fixtures at 1e-12): PASS");
}

#[test]
fn criterion_07_table_iii_surrogate() {
    let started = Instant::now();
    let dataset = default_dataset();
    let svm = cross_validate(&dataset, &PipelineConfig::default()).unwrap();
    assert!(
        (0.85..=0.97).contains(&svm.accuracy),
        "SVM+DWT accuracy {} outside [0.85, 0.97]",
        svm.accuracy
    );
    let dtw_config = PipelineConfig { classifier: ClassifierKind::Dtw, ..Default::default() };
    let dtw = cross_validate(&dataset, &dtw_config).unwrap();
    assert!(
        svm.accuracy > dtw.accuracy,
        "SVM {} must beat DTW {}",
        svm.accuracy,
        dtw.accuracy
    );
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 180.0, "end-to-end comparison took {elapsed:?}");
    println!(
        "criterion 07 (4 s window: SVM+DWT {:.4} in [0.85, 0.97], > DTW {:.4}, {elapsed:?}): PASS",
        svm.accuracy, dtw.accuracy
    );
}

#[test]
fn criterion_08_window_and_wavelet_gaps() {
    let dataset = default_dataset();
    let at = |window_s: f64, use_dwt: bool| {
        let mut config = PipelineConfig::default();
        config.window_s = window_s;
        config.features.use_dwt = use_dwt;
        cross_validate(&dataset, &config).unwrap().accuracy
    };
    let dwt_4s = at(4.0, true);
    let dwt_1s = at(1.0, true);
    let raw_4s = at(4.0, false);
    assert!(dwt_4s >= dwt_1s, "4 s {dwt_4s} vs 1 s {dwt_1s}");
    assert!(dwt_4s >= raw_4s, "wavelet {dwt_4s} vs raw {raw_4s}");
    println!(
        "criterion 08 (SVM accuracy: 4 s {dwt_4s:.4} >= 1 s {dwt_1s:.4}; wavelet {dwt_4s:.4} >= raw {raw_4s:.4}): PASS"
    );
}

#[test]
fn criterion_09_channel_model_shape() {
    let geometry = BodyGeometry::new(48.0).unwrap();
    let base = ChannelParams::new(2450.0).unwrap();
    let doubled = ChannelParams::new(4900.0).unwrap();
    let ratio = decay_factor(&doubled, &geometry) / decay_factor(&base, &geometry);
    assert!(
        (ratio - 2.0f64.powf(1.0 / 3.0)).abs() < 1e-12,
        "octave ratio {ratio}"
    );
    for d in [0.5, 3.0, 9.7, 17.0, 23.5] {
        let (m1, _) = creepwave::channel::path_gain(d, &geometry, &base).unwrap();
        let (m2, _) = creepwave::channel::path_gain(48.0 - d, &geometry, &base).unwrap();
        assert!((m1 - m2).abs() < 1e-9, "antipodal asymmetry at {d} cm");
    }
    let profile = around_body_profile(&geometry, &base, 1.0).unwrap();
    for d in 2..19 {
        assert!(
            profile[d - 1].magnitude_db > profile[d].magnitude_db,
            "profile not decreasing at {d} cm"
        );
    }
    println!("criterion 09 (decay octave ratio 2^(1/3) +/- 1e-12, antipodal symmetry 1e-9, monotone 2-19 cm): PASS");
}

#[test]
fn criterion_10_peak_feature_ordering() {
    let dataset = default_dataset();
    let mut matrix = build_feature_matrix(&dataset, 4.0, 2, &FeatureConfig::default()).unwrap();
    matrix.normalize_global();
    let mut mean_peak = [0.0f64; 6];
    let mut counts = [0usize; 6];
    for (row, label) in matrix.rows.iter().zip(&matrix.labels) {
        mean_peak[label.code()] += row[1];
        counts[label.code()] += 1;
    }
    for c in 0..6 {
        mean_peak[c] /= counts[c] as f64;
    }
    let at = |a: ActivityLabel| mean_peak[a.code()];
    let side = at(ActivityLabel::SidewaysSwing);
    let full = at(ActivityLabel::FullSwing);
    let fwd = at(ActivityLabel::ForwardSwing);
    let squat = at(ActivityLabel::Squatting);
    let back = at(ActivityLabel::BackwardSwing);
    let lift = at(ActivityLabel::LiftingKnee);
    assert!(side > full, "sideways {side} vs full {full}");
    assert!(full > fwd, "full {full} vs forward {fwd}");
    assert!(fwd > squat, "forward {fwd} vs squatting {squat}");
    assert!(squat > back, "squatting {squat} vs backward {back}");
    assert!(squat > lift, "squatting {squat} vs lifting {lift}");
    println!(
        "criterion 10 (peak ordering {side:.3} > {full:.3} > {fwd:.3} > {squat:.3} > max({back:.3}, {lift:.3})): PASS"
    );
}

#[test]
fn criterion_11_pipeline_determinism() {
    let run = || {
        let dataset = default_dataset();
        let report = cross_validate(&dataset, &PipelineConfig::default()).unwrap();
        render_report(&report, &["determinism run".into()])
    };
    let first = run();
    let second = run();
    assert_eq!(first, second, "reports differ between identical runs");
    println!("criterion 11 (two identically seeded pipeline runs render byte-identical reports): PASS");
}
