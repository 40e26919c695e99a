//! Labeled synthetic replay of the around-thigh measurement protocol, plus
//! ingestion of externally measured traces.
//!
//! Each recording is a 20 s magnitude/phase pair sampled at 50 Hz: the
//! static around-body gain at the 110-degree antenna separation for the
//! subject's thigh circumference, modulated by a per-activity waveform
//! repeated with a randomized 2-3 s period, with Gaussian noise on the dB
//! magnitude and on the phase. Generation is bit-reproducible: every
//! recording derives its own stream seed from (dataset seed, subject,
//! activity, trial), so thread scheduling cannot change the output.

pub mod io;
mod template;

pub use template::{default_template, ActivityTemplate, WaveformKind};

use crate::channel::{path_gain, BodyGeometry, ChannelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Angular separation between the fixed antennas, in degrees.
pub const ANTENNA_SEPARATION_DEG: f64 = 110.0;

/// Carrier frequency of the on-body link in MHz.
pub const CARRIER_MHZ: f64 = 2450.0;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("invalid generator config: {0}")]
    BadConfig(String),
    #[error("invalid subject: {0}")]
    InvalidSubject(String),
    #[error("window of {window_samples} samples x {count} does not fit a series of {available}")]
    WindowTooLong { window_samples: usize, count: usize, available: usize },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("unknown activity {0:?}; expected one of forward_swing, full_swing, backward_swing, lifting_knee, sideways_swing, squatting")]
    UnknownActivity(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
}

/// The six leg activities, with stable integer codes 0-5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActivityLabel {
    ForwardSwing = 0,
    FullSwing = 1,
    BackwardSwing = 2,
    LiftingKnee = 3,
    SidewaysSwing = 4,
    Squatting = 5,
}

impl ActivityLabel {
    pub const ALL: [ActivityLabel; 6] = [
        ActivityLabel::ForwardSwing,
        ActivityLabel::FullSwing,
        ActivityLabel::BackwardSwing,
        ActivityLabel::LiftingKnee,
        ActivityLabel::SidewaysSwing,
        ActivityLabel::Squatting,
    ];

    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<ActivityLabel> {
        Self::ALL.get(code).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivityLabel::ForwardSwing => "forward_swing",
            ActivityLabel::FullSwing => "full_swing",
            ActivityLabel::BackwardSwing => "backward_swing",
            ActivityLabel::LiftingKnee => "lifting_knee",
            ActivityLabel::SidewaysSwing => "sideways_swing",
            ActivityLabel::Squatting => "squatting",
        }
    }

    pub fn parse(name: &str) -> Result<ActivityLabel, SignalError> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == name)
            .ok_or_else(|| SignalError::UnknownActivity(name.to_string()))
    }
}

impl std::fmt::Display for ActivityLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sex {
    Male,
    Female,
}

/// One study participant.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectSpec {
    pub id: String,
    pub height_cm: f64,
    pub weight_kg: f64,
    pub thigh_circumference_cm: f64,
    pub age_years: u32,
    pub sex: Sex,
}

impl SubjectSpec {
    pub fn new(
        id: &str,
        height_cm: f64,
        weight_kg: f64,
        thigh_circumference_cm: f64,
        age_years: u32,
        sex: Sex,
    ) -> Result<SubjectSpec, SignalError> {
        if !(height_cm > 0.0 && weight_kg > 0.0 && thigh_circumference_cm > 0.0 && age_years > 0) {
            return Err(SignalError::InvalidSubject(format!(
                "all physical fields must be positive for {id:?}"
            )));
        }
        Ok(SubjectSpec {
            id: id.to_string(),
            height_cm,
            weight_kg,
            thigh_circumference_cm,
            age_years,
            sex,
        })
    }
}

/// The six study participants.
pub fn default_subjects() -> Vec<SubjectSpec> {
    [
        ("male1", 172.0, 62.0, 48.0, 27, Sex::Male),
        ("male2", 175.0, 80.0, 54.0, 27, Sex::Male),
        ("male3", 167.0, 59.0, 50.0, 25, Sex::Male),
        ("female1", 162.0, 54.0, 45.0, 23, Sex::Female),
        ("female2", 160.0, 49.0, 41.0, 25, Sex::Female),
        ("female3", 157.0, 43.0, 43.0, 26, Sex::Female),
    ]
    .into_iter()
    .map(|(id, h, w, c, a, s)| SubjectSpec::new(id, h, w, c, a, s).expect("built-in subject"))
    .collect()
}

/// Which series of a recording downstream stages consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignalSource {
    #[default]
    Magnitude,
    Phase,
}

/// A labeled magnitude/phase time series.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityRecording {
    pub subject: SubjectSpec,
    pub activity: ActivityLabel,
    pub trial: u32,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    pub magnitude_db: Vec<f64>,
    pub phase_rad: Vec<f64>,
}

impl ActivityRecording {
    pub fn len(&self) -> usize {
        self.magnitude_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitude_db.is_empty()
    }

    pub fn series(&self, source: SignalSource) -> &[f64] {
        match source {
            SignalSource::Magnitude => &self.magnitude_db,
            SignalSource::Phase => &self.phase_rad,
        }
    }
}

/// Generator settings; the defaults replay the measurement protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    /// Gaussian noise sigma on the dB magnitude series.
    pub noise_mag_db: f64,
    /// Gaussian noise sigma on the phase series, in radians.
    pub noise_phase_rad: f64,
    /// Per-cycle uniform period jitter as a fraction of the drawn period.
    pub period_jitter: f64,
    pub channel: ChannelParams,
    pub templates: [ActivityTemplate; 6],
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            sample_rate_hz: 50.0,
            duration_s: 20.0,
            noise_mag_db: 2.5,
            noise_phase_rad: 0.12,
            period_jitter: 0.10,
            channel: ChannelParams::new(CARRIER_MHZ).expect("default carrier"),
            templates: ActivityLabel::ALL.map(default_template),
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<(), SignalError> {
        if !(self.sample_rate_hz > 0.0) {
            return Err(SignalError::BadConfig(format!(
                "sample rate must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        if !(self.duration_s > 0.0) {
            return Err(SignalError::BadConfig(format!(
                "duration must be positive, got {}",
                self.duration_s
            )));
        }
        if self.noise_mag_db < 0.0 || self.noise_phase_rad < 0.0 || self.period_jitter < 0.0 {
            return Err(SignalError::BadConfig(
                "noise and jitter parameters must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// A generated or ingested collection of recordings.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub recordings: Vec<ActivityRecording>,
    pub manifest: Manifest,
}

/// Provenance carried with a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    /// Generator seed; absent for ingested data.
    pub seed: Option<u64>,
    /// "creepwave <version>" or "ingested".
    pub generator: String,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
}

pub fn generator_id() -> String {
    format!("creepwave {}", env!("CARGO_PKG_VERSION"))
}

/// Derive the per-recording stream seed from the dataset seed and the
/// recording coordinates (SplitMix64 over the packed fields).
fn recording_seed(seed: u64, subject_idx: u64, activity: u64, trial: u64) -> u64 {
    let mut state = seed
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(subject_idx.wrapping_mul(0xbf58476d1ce4e5b9))
        .wrapping_add(activity.wrapping_mul(0x94d049bb133111eb))
        .wrapping_add(trial);
    for _ in 0..2 {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        state = z ^ (z >> 31);
    }
    state
}

/// Standard-normal draws via Box-Muller on the given stream.
struct GaussianSource<'a> {
    rng: &'a mut ChaCha8Rng,
    spare: Option<f64>,
}

impl<'a> GaussianSource<'a> {
    fn new(rng: &'a mut ChaCha8Rng) -> Self {
        GaussianSource { rng, spare: None }
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1: f64 = 1.0 - self.rng.gen::<f64>(); // (0, 1]
        let u2: f64 = self.rng.gen();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

/// Generate one recording. Deterministic in (subject, activity, trial, seed).
pub fn synth_recording(
    subject: &SubjectSpec,
    activity: ActivityLabel,
    trial: u32,
    seed: u64,
    config: &SynthConfig,
) -> Result<ActivityRecording, SignalError> {
    config.validate()?;
    let subject_idx = subject_stream_index(subject);
    let mut rng = ChaCha8Rng::seed_from_u64(recording_seed(
        seed,
        subject_idx,
        activity.code() as u64,
        trial as u64,
    ));

    let geometry = BodyGeometry::new(subject.thigh_circumference_cm)?;
    let arc_cm = subject.thigh_circumference_cm * ANTENNA_SEPARATION_DEG / 360.0;
    let (base_mag_db, base_phase_rad) = path_gain(arc_cm, &geometry, &config.channel)?;

    let template = &config.templates[activity.code()];
    let n = (config.duration_s * config.sample_rate_hz).floor() as usize;

    // Draw order is part of the determinism contract: period first, then one
    // jitter per cycle as cycles are consumed, then magnitude noise for every
    // sample, then phase noise for every sample.
    let (pmin, pmax) = template.period_range_s;
    let period_s = pmin + (pmax - pmin) * rng.gen::<f64>();

    let mut magnitude_db = Vec::with_capacity(n);
    let mut phase_rad = Vec::with_capacity(n);
    let mut cycle_len = 0usize;
    let mut cycle_pos = 0usize;
    for _ in 0..n {
        if cycle_pos == cycle_len {
            let jitter = if config.period_jitter > 0.0 {
                1.0 + config.period_jitter * (2.0 * rng.gen::<f64>() - 1.0)
            } else {
                1.0
            };
            cycle_len = ((period_s * jitter * config.sample_rate_hz).round() as usize).max(2);
            cycle_pos = 0;
        }
        let cycle_phase = cycle_pos as f64 / cycle_len as f64;
        let excursion = template.shape(cycle_phase);
        magnitude_db.push(base_mag_db - template.magnitude_depth_db * excursion);
        phase_rad.push(base_phase_rad - template.phase_depth_rad * excursion);
        cycle_pos += 1;
    }
    if config.noise_mag_db > 0.0 {
        let mut gauss = GaussianSource::new(&mut rng);
        for v in &mut magnitude_db {
            *v += config.noise_mag_db * gauss.next();
        }
    }
    if config.noise_phase_rad > 0.0 {
        let mut gauss = GaussianSource::new(&mut rng);
        for v in &mut phase_rad {
            *v += config.noise_phase_rad * gauss.next();
        }
    }

    Ok(ActivityRecording {
        subject: subject.clone(),
        activity,
        trial,
        sample_rate_hz: config.sample_rate_hz,
        duration_s: config.duration_s,
        magnitude_db,
        phase_rad,
    })
}

/// Stable stream index for a subject: position in the default roster when
/// the id matches, otherwise a hash of the id.
fn subject_stream_index(subject: &SubjectSpec) -> u64 {
    const ROSTER: [&str; 6] = ["male1", "male2", "male3", "female1", "female2", "female3"];
    if let Some(pos) = ROSTER.iter().position(|id| *id == subject.id) {
        return pos as u64;
    }
    subject
        .id
        .bytes()
        .fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

/// Generate the full protocol: every default subject x activity x trial.
pub fn synth_dataset(seed: u64, config: &SynthConfig) -> Result<Dataset, SignalError> {
    synth_dataset_with(seed, config, &default_subjects(), 10)
}

/// Generate `subjects x 6 activities x trials` recordings in protocol order.
pub fn synth_dataset_with(
    seed: u64,
    config: &SynthConfig,
    subjects: &[SubjectSpec],
    trials: u32,
) -> Result<Dataset, SignalError> {
    config.validate()?;
    let mut jobs = Vec::new();
    for subject in subjects {
        for activity in ActivityLabel::ALL {
            for trial in 0..trials {
                jobs.push((subject, activity, trial));
            }
        }
    }
    let recordings: Result<Vec<_>, _> = jobs
        .into_par_iter()
        .map(|(subject, activity, trial)| synth_recording(subject, activity, trial, seed, config))
        .collect();
    Ok(Dataset {
        recordings: recordings?,
        manifest: Manifest {
            seed: Some(seed),
            generator: generator_id(),
            sample_rate_hz: config.sample_rate_hz,
            duration_s: config.duration_s,
        },
    })
}

/// Cut `count` non-overlapping windows of `window_s` seconds from the start
/// of the chosen series.
pub fn segment_source(
    recording: &ActivityRecording,
    source: SignalSource,
    window_s: f64,
    count: usize,
) -> Result<Vec<Vec<f64>>, SignalError> {
    let series = recording.series(source);
    let window_samples = (window_s * recording.sample_rate_hz).floor() as usize;
    if window_samples == 0 || window_samples * count > series.len() {
        return Err(SignalError::WindowTooLong {
            window_samples,
            count,
            available: series.len(),
        });
    }
    Ok((0..count)
        .map(|k| series[k * window_samples..(k + 1) * window_samples].to_vec())
        .collect())
}

/// [`segment_source`] on the magnitude series.
pub fn segment(
    recording: &ActivityRecording,
    window_s: f64,
    count: usize,
) -> Result<Vec<Vec<f64>>, SignalError> {
    segment_source(recording, SignalSource::Magnitude, window_s, count)
}

/// How many whole `window_s` windows fit in a recording, capped at `cap`.
pub fn windows_that_fit(recording: &ActivityRecording, window_s: f64, cap: usize) -> usize {
    let window_samples = (window_s * recording.sample_rate_hz).floor() as usize;
    if window_samples == 0 {
        return 0;
    }
    (recording.len() / window_samples).min(cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_noise_config() -> SynthConfig {
        let mut config = SynthConfig::default();
        config.noise_mag_db = 0.0;
        config.noise_phase_rad = 0.0;
        config.period_jitter = 0.0;
        for t in &mut config.templates {
            t.period_range_s = (2.5, 2.5);
        }
        config
    }

    #[test]
    fn default_subjects_match_roster() {
        let subjects = default_subjects();
        assert_eq!(subjects.len(), 6);
        let male1 = &subjects[0];
        assert_eq!(
            (male1.height_cm, male1.weight_kg, male1.thigh_circumference_cm, male1.age_years),
            (172.0, 62.0, 48.0, 27)
        );
        assert_eq!(male1.sex, Sex::Male);
        let female2 = &subjects[4];
        assert_eq!(
            (female2.height_cm, female2.weight_kg, female2.thigh_circumference_cm, female2.age_years),
            (160.0, 49.0, 41.0, 25)
        );
        assert_eq!(female2.sex, Sex::Female);
    }

    #[test]
    fn subject_constructor_validates() {
        assert!(SubjectSpec::new("x", 0.0, 60.0, 48.0, 25, Sex::Male).is_err());
        assert!(SubjectSpec::new("x", 170.0, 60.0, -1.0, 25, Sex::Male).is_err());
    }

    #[test]
    fn recording_is_deterministic() {
        let config = SynthConfig::default();
        let subject = &default_subjects()[2];
        let a = synth_recording(subject, ActivityLabel::Squatting, 3, 99, &config).unwrap();
        let b = synth_recording(subject, ActivityLabel::Squatting, 3, 99, &config).unwrap();
        assert_eq!(a, b);
        let c = synth_recording(subject, ActivityLabel::Squatting, 3, 100, &config).unwrap();
        assert_ne!(a.magnitude_db, c.magnitude_db);
    }

    #[test]
    fn recording_has_expected_length() {
        let config = SynthConfig::default();
        let subject = &default_subjects()[0];
        let rec = synth_recording(subject, ActivityLabel::ForwardSwing, 0, 1, &config).unwrap();
        assert_eq!(rec.len(), 1000);
        assert_eq!(rec.phase_rad.len(), 1000);
    }

    #[test]
    fn zero_noise_series_is_exactly_periodic() {
        let config = zero_noise_config();
        let subject = &default_subjects()[0];
        let rec = synth_recording(subject, ActivityLabel::SidewaysSwing, 0, 7, &config).unwrap();
        let period_samples = 125; // 2.5 s at 50 Hz
        for t in 0..rec.len() - period_samples {
            assert_eq!(rec.magnitude_db[t], rec.magnitude_db[t + period_samples], "t={t}");
        }
    }

    #[test]
    fn zero_noise_autocorrelation_peaks_at_period() {
        // Forward swing and squatting have one excursion per cycle, so the
        // waveform fundamental equals the activity period. (Full swing is
        // deliberately half-period symmetric and would also peak at half a
        // cycle.)
        let config = zero_noise_config();
        let subject = &default_subjects()[1];
        for activity in [ActivityLabel::ForwardSwing, ActivityLabel::Squatting] {
            let rec = synth_recording(subject, activity, 2, 5, &config).unwrap();
            let x = &rec.magnitude_db;
            let mean = x.iter().sum::<f64>() / x.len() as f64;
            let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
            let n = x.len();
            // Per-overlap normalization so long lags are not penalized.
            let corr = |lag: usize| -> f64 {
                (0..n - lag).map(|t| centered[t] * centered[t + lag]).sum::<f64>()
                    / (n - lag) as f64
            };
            let period = 125;
            let at_period = corr(period);
            for lag in (period / 3)..(period * 3 / 2) {
                if lag != period {
                    assert!(
                        corr(lag) <= at_period + 1e-9,
                        "{activity}: lag {lag} beats the period"
                    );
                }
            }
        }
    }

    #[test]
    fn sideways_swings_wider_than_backward() {
        let config = zero_noise_config();
        let subject = &default_subjects()[0];
        let excursion = |activity| {
            let rec = synth_recording(subject, activity, 0, 3, &config).unwrap();
            let max = rec.magnitude_db.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
            let min = rec.magnitude_db.iter().fold(f64::INFINITY, |m, &v| m.min(v));
            max - min
        };
        assert!(excursion(ActivityLabel::SidewaysSwing) > excursion(ActivityLabel::BackwardSwing));
    }

    #[test]
    fn config_validation() {
        let subject = &default_subjects()[0];
        let mut config = SynthConfig::default();
        config.sample_rate_hz = 0.0;
        assert!(matches!(
            synth_recording(subject, ActivityLabel::Squatting, 0, 0, &config),
            Err(SignalError::BadConfig(_))
        ));
        let mut config = SynthConfig::default();
        config.duration_s = -2.0;
        assert!(matches!(
            synth_recording(subject, ActivityLabel::Squatting, 0, 0, &config),
            Err(SignalError::BadConfig(_))
        ));
    }

    #[test]
    fn dataset_has_protocol_counts() {
        let mut config = SynthConfig::default();
        config.duration_s = 2.0; // keep the test quick
        let dataset = synth_dataset(42, &config).unwrap();
        assert_eq!(dataset.recordings.len(), 360);
        assert_eq!(dataset.manifest.seed, Some(42));
        // Label balance: 60 recordings per activity.
        for activity in ActivityLabel::ALL {
            let count = dataset.recordings.iter().filter(|r| r.activity == activity).count();
            assert_eq!(count, 60);
        }
    }

    #[test]
    fn datasets_differ_across_seeds() {
        let mut config = SynthConfig::default();
        config.duration_s = 1.0;
        let a = synth_dataset_with(1, &config, &default_subjects()[..1], 1).unwrap();
        let b = synth_dataset_with(2, &config, &default_subjects()[..1], 1).unwrap();
        assert_ne!(a.recordings[0].magnitude_db, b.recordings[0].magnitude_db);
    }

    #[test]
    fn dataset_is_reproducible_across_runs() {
        let mut config = SynthConfig::default();
        config.duration_s = 1.0;
        let a = synth_dataset_with(5, &config, &default_subjects(), 2).unwrap();
        let b = synth_dataset_with(5, &config, &default_subjects(), 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn baseline_magnitude_decreases_with_circumference() {
        let config = zero_noise_config();
        let mut subjects = default_subjects();
        subjects.sort_by(|a, b| {
            a.thigh_circumference_cm.partial_cmp(&b.thigh_circumference_cm).unwrap()
        });
        let mut last = f64::INFINITY;
        for subject in &subjects {
            let rec =
                synth_recording(subject, ActivityLabel::ForwardSwing, 0, 11, &config).unwrap();
            let mean = rec.magnitude_db.iter().sum::<f64>() / rec.len() as f64;
            assert!(
                mean < last,
                "baseline not decreasing at circumference {} ({mean} vs {last})",
                subject.thigh_circumference_cm
            );
            last = mean;
        }
    }

    #[test]
    fn segment_counts_and_offsets() {
        let config = SynthConfig::default();
        let subject = &default_subjects()[0];
        let rec = synth_recording(subject, ActivityLabel::LiftingKnee, 0, 1, &config).unwrap();

        let windows = segment(&rec, 4.0, 2).unwrap();
        assert_eq!(windows.len(), 2);
        assert!(windows.iter().all(|w| w.len() == 200));
        assert_eq!(windows[0][..], rec.magnitude_db[..200]);
        assert_eq!(windows[1][..], rec.magnitude_db[200..400]);

        let full = segment(&rec, 20.0, 1).unwrap();
        assert_eq!(full[0], rec.magnitude_db);

        let thirds = segment(&rec, 6.0, 3).unwrap();
        assert_eq!(thirds.len(), 3);
        assert_eq!(thirds[2][..], rec.magnitude_db[600..900]);
    }

    #[test]
    fn segment_rejects_oversized_windows() {
        let config = SynthConfig::default();
        let subject = &default_subjects()[0];
        let rec = synth_recording(subject, ActivityLabel::LiftingKnee, 0, 1, &config).unwrap();
        assert!(matches!(
            segment(&rec, 12.0, 2),
            Err(SignalError::WindowTooLong { .. })
        ));
    }
}
