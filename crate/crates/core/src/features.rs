//! Statistical features of windowed signals (optionally of their wavelet
//! coefficients) and min-max normalized feature matrices.
//!
//! Six statistics per series: mean, peak (max absolute value), RMS,
//! population standard deviation, kurtosis (`m4 / m2^2`, so a normal
//! distribution scores 3) and skewness (`m3 / m2^(3/2)`). In the wavelet
//! path the statistics are taken over all detail bands concatenated
//! shallowest-to-deepest followed by the deepest approximation band; a
//! per-band mode computing the six statistics separately for every band is
//! available for experimentation.

use crate::dwt::{decompose, load_wavelet, BoundaryMode, DwtError};
use crate::signal::{segment_source, ActivityLabel, Dataset, SignalError, SignalSource};
use thiserror::Error;

pub const FEATURE_NAMES: [&str; 6] = ["mean", "peak", "rms", "std", "kurtosis", "skewness"];

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("series of {0} samples is too short for moment features (need at least 4)")]
    TooShort(usize),
    #[error("zero-variance series: kurtosis and skewness are undefined")]
    ZeroVariance,
    #[error("dataset contains no recordings")]
    EmptyDataset,
    #[error(transparent)]
    Dwt(#[from] DwtError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// The six statistics of one series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub mean: f64,
    pub peak: f64,
    pub rms: f64,
    pub std: f64,
    pub kurtosis: f64,
    pub skewness: f64,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; 6] {
        [self.mean, self.peak, self.rms, self.std, self.kurtosis, self.skewness]
    }
}

/// Compute the six statistics. Needs at least 4 samples and nonzero
/// variance (fourth and third standardized moments are undefined otherwise).
pub fn extract_features(series: &[f64]) -> Result<FeatureVector, FeatureError> {
    if series.len() < 4 {
        return Err(FeatureError::TooShort(series.len()));
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let peak = series.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rms = (series.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in series {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return Err(FeatureError::ZeroVariance);
    }
    Ok(FeatureVector {
        mean,
        peak,
        rms,
        std: m2.sqrt(),
        kurtosis: m4 / (m2 * m2),
        skewness: m3 / m2.powf(1.5),
    })
}

/// Whether the six statistics pool all wavelet bands or are computed per band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandAggregation {
    /// One six-feature row over the concatenated coefficient series.
    #[default]
    Pooled,
    /// Six features per band: `6 * (levels + 1)` columns.
    PerBand,
}

/// Feature pipeline settings; the defaults give the 6-column wavelet rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub use_dwt: bool,
    pub wavelet: String,
    pub levels: usize,
    pub boundary: BoundaryMode,
    pub aggregation: BandAggregation,
    pub source: SignalSource,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            use_dwt: true,
            wavelet: "dmey".to_string(),
            levels: 5,
            boundary: BoundaryMode::Periodic,
            aggregation: BandAggregation::Pooled,
            source: SignalSource::Magnitude,
        }
    }
}

/// The series the statistics run over: detail bands 1..levels then the
/// deepest approximation, or the raw window when the wavelet stage is off.
pub fn feature_input(window: &[f64], config: &FeatureConfig) -> Result<Vec<f64>, FeatureError> {
    Ok(feature_bands(window, config)?.concat())
}

/// The bands feeding the statistics, separately.
pub fn feature_bands(window: &[f64], config: &FeatureConfig) -> Result<Vec<Vec<f64>>, FeatureError> {
    if !config.use_dwt {
        return Ok(vec![window.to_vec()]);
    }
    let filter = load_wavelet(&config.wavelet)?;
    let mut d = decompose(window, &filter, config.levels, config.boundary)?;
    let mut bands = std::mem::take(&mut d.details);
    bands.push(std::mem::take(&mut d.approx));
    Ok(bands)
}

/// One feature-matrix row for a window: 6 columns pooled, `6 * bands`
/// in per-band mode.
pub fn feature_row(window: &[f64], config: &FeatureConfig) -> Result<Vec<f64>, FeatureError> {
    match config.aggregation {
        BandAggregation::Pooled => {
            let series = feature_input(window, config)?;
            Ok(extract_features(&series)?.as_array().to_vec())
        }
        BandAggregation::PerBand => {
            let bands = feature_bands(window, config)?;
            let mut row = Vec::with_capacity(6 * bands.len());
            for band in bands {
                row.extend_from_slice(&extract_features(&band)?.as_array());
            }
            Ok(row)
        }
    }
}

/// Per-column min/max fitted on some set of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStats {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl NormalizationStats {
    /// Fit on the rows selected by `subset` (all rows when `None`).
    pub fn fit(rows: &[Vec<f64>], subset: Option<&[usize]>) -> NormalizationStats {
        let dim = rows.first().map_or(0, Vec::len);
        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        let mut visit = |row: &Vec<f64>| {
            for (c, &v) in row.iter().enumerate() {
                mins[c] = mins[c].min(v);
                maxs[c] = maxs[c].max(v);
            }
        };
        match subset {
            Some(idx) => idx.iter().for_each(|&i| visit(&rows[i])),
            None => rows.iter().for_each(&mut visit),
        }
        NormalizationStats { mins, maxs }
    }

    /// Columns where max equals min; they normalize to 0.
    pub fn degenerate_columns(&self) -> Vec<usize> {
        (0..self.mins.len()).filter(|&c| self.maxs[c] == self.mins[c]).collect()
    }

    /// Scale a row in place to [0, 1] by the stored column ranges. Values
    /// outside the fitted range (held-out data) land outside [0, 1].
    pub fn apply_row(&self, row: &mut [f64]) {
        for (c, v) in row.iter_mut().enumerate() {
            let range = self.maxs[c] - self.mins[c];
            *v = if range == 0.0 { 0.0 } else { (*v - self.mins[c]) / range };
        }
    }

    pub fn apply(&self, rows: &mut [Vec<f64>]) {
        for row in rows {
            self.apply_row(row);
        }
    }
}

/// Feature rows for every window of a dataset, with labels, subject ids and
/// the raw windows (template classification runs on those).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<ActivityLabel>,
    pub subject_ids: Vec<String>,
    pub windows: Vec<Vec<f64>>,
    /// Stats the rows were scaled with, when normalization was applied.
    pub normalization: Option<NormalizationStats>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Fit min/max on every row and scale the whole matrix to [0, 1].
    pub fn normalize_global(&mut self) -> &NormalizationStats {
        let stats = NormalizationStats::fit(&self.rows, None);
        stats.apply(&mut self.rows);
        self.normalization = Some(stats);
        self.normalization.as_ref().unwrap()
    }

    /// Delimited text with a header row and a trailing label column.
    pub fn render_delimited(&self) -> String {
        let mut out = String::new();
        let dim = self.dim();
        let names: Vec<String> = if dim == 6 {
            FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
        } else {
            (0..dim)
                .map(|c| format!("band{}_{}", c / 6 + 1, FEATURE_NAMES[c % 6]))
                .collect()
        };
        out.push_str(&names.join(","));
        out.push_str(",label\n");
        for (row, label) in self.rows.iter().zip(&self.labels) {
            for v in row {
                out.push_str(&format!("{v},"));
            }
            out.push_str(label.name());
            out.push('\n');
        }
        out
    }
}

/// Windowed feature rows for every recording, unnormalized: normalization is
/// fitted downstream so held-out folds can be scaled with training statistics.
pub fn build_feature_matrix(
    dataset: &Dataset,
    window_s: f64,
    windows_per_recording: usize,
    config: &FeatureConfig,
) -> Result<FeatureMatrix, FeatureError> {
    if dataset.recordings.is_empty() {
        return Err(FeatureError::EmptyDataset);
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut subject_ids = Vec::new();
    let mut windows = Vec::new();
    for recording in &dataset.recordings {
        for window in segment_source(recording, config.source, window_s, windows_per_recording)? {
            rows.push(feature_row(&window, config)?);
            labels.push(recording.activity);
            subject_ids.push(recording.subject.id.clone());
            windows.push(window);
        }
    }
    Ok(FeatureMatrix { rows, labels, subject_ids, windows, normalization: None })
}
