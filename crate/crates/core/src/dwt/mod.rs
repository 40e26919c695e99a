//! Multi-level discrete wavelet decomposition and reconstruction.
//!
//! The pyramid recursion filters the running approximation with the low- and
//! high-pass taps and keeps every second output; only the approximation
//! branch is decomposed further. Analysis correlates the signal with the
//! decomposition taps at even offsets, `a[i] = sum_k lo[k] x[2i + k]`
//! (equivalently: full convolution with the time-reversed filter, retaining
//! outputs at even signal offsets); synthesis is the transpose, written with
//! the time-reversed reconstruction taps.
//!
//! With the periodic boundary the transform of an even-length signal is an
//! exact orthogonal map, so reconstruction and energy conservation hold at
//! f64 precision. Odd lengths are extended by one sample by splitting the
//! final sample into two of half the energy, which keeps the isometry exact
//! at every pyramid level.

mod filters;

pub use filters::{load_wavelet, WaveletFilter, SUPPORTED_WAVELETS};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DwtError {
    #[error("unknown wavelet {name:?}; supported: {supported}")]
    UnknownWavelet { name: String, supported: String },
    #[error("signal of length {0} is too short to decompose (need at least 2 samples)")]
    SignalTooShort(usize),
    #[error("levels must be at least 1")]
    ZeroLevels,
    #[error("{requested} levels infeasible for signal of length {len}; maximum is {max_feasible}")]
    TooManyLevels { requested: usize, len: usize, max_feasible: usize },
    #[error("decomposition is inconsistent: {0}")]
    InconsistentDecomposition(String),
}

/// How samples beyond the window edges are supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    /// Circular wrap-around; keeps half the coefficients per channel and
    /// the transform orthogonal.
    #[default]
    Periodic,
    /// Half-sample reflection; expansive (keeps `(n + taps)/2` coefficients
    /// per channel) but free of wrap-around artifacts.
    Symmetric,
}

/// Coefficient pyramid produced by [`decompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    /// Approximation coefficients at the deepest level.
    pub approx: Vec<f64>,
    /// Detail coefficients, shallowest (level 1) first.
    pub details: Vec<Vec<f64>>,
    pub levels: usize,
    pub original_length: usize,
    pub boundary_mode: BoundaryMode,
    /// Input length of each analysis step, needed to undo odd-length
    /// extension on the way back up.
    step_input_lengths: Vec<usize>,
}

impl WaveletDecomposition {
    /// Total coefficient count across all bands.
    pub fn coefficient_count(&self) -> usize {
        self.approx.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    /// Sum of squares over every band.
    pub fn energy(&self) -> f64 {
        let e: f64 = self.approx.iter().map(|v| v * v).sum();
        e + self
            .details
            .iter()
            .map(|d| d.iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
    }

    /// All bands concatenated: details shallowest to deepest, then the
    /// deepest approximation.
    pub fn concatenated(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.coefficient_count());
        for d in &self.details {
            out.extend_from_slice(d);
        }
        out.extend_from_slice(&self.approx);
        out
    }
}

/// Output length of one analysis step for `input_len` samples.
pub fn step_output_len(input_len: usize, filter_len: usize, mode: BoundaryMode) -> usize {
    match mode {
        BoundaryMode::Periodic => input_len.div_ceil(2),
        BoundaryMode::Symmetric => (input_len + filter_len - 2) / 2 + 1,
    }
}

/// Largest level count [`decompose`] accepts for a signal of `len` samples:
/// every analysis step must see at least 2 samples.
pub fn max_level(len: usize, filter_len: usize, mode: BoundaryMode) -> usize {
    let mut len = len;
    let mut levels = 0;
    // Symmetric-mode lengths stop shrinking near the filter length.
    let cap = 64;
    while len >= 2 && levels < cap {
        len = step_output_len(len, filter_len, mode);
        levels += 1;
    }
    levels
}

/// One analysis step: split `signal` into approximation and detail
/// coefficients.
pub fn dwt_step(
    signal: &[f64],
    filter: &WaveletFilter,
    mode: BoundaryMode,
) -> Result<(Vec<f64>, Vec<f64>), DwtError> {
    if signal.len() < 2 {
        return Err(DwtError::SignalTooShort(signal.len()));
    }
    Ok(match mode {
        BoundaryMode::Periodic => analysis_periodic(signal, filter),
        BoundaryMode::Symmetric => analysis_symmetric(signal, filter),
    })
}

/// Multi-level pyramid decomposition.
pub fn decompose(
    signal: &[f64],
    filter: &WaveletFilter,
    levels: usize,
    mode: BoundaryMode,
) -> Result<WaveletDecomposition, DwtError> {
    if levels == 0 {
        return Err(DwtError::ZeroLevels);
    }
    if signal.len() < 2 {
        return Err(DwtError::SignalTooShort(signal.len()));
    }
    let feasible = max_level(signal.len(), filter.len(), mode);
    if levels > feasible {
        return Err(DwtError::TooManyLevels {
            requested: levels,
            len: signal.len(),
            max_feasible: feasible,
        });
    }

    let mut approx = signal.to_vec();
    let mut details = Vec::with_capacity(levels);
    let mut step_input_lengths = Vec::with_capacity(levels);
    for _ in 0..levels {
        step_input_lengths.push(approx.len());
        let (a, d) = dwt_step(&approx, filter, mode)?;
        details.push(d);
        approx = a;
    }
    Ok(WaveletDecomposition {
        approx,
        details,
        levels,
        original_length: signal.len(),
        boundary_mode: mode,
        step_input_lengths,
    })
}

/// Invert [`decompose`]: run the synthesis bank from the deepest level back
/// up to a signal of the original length.
pub fn reconstruct(
    decomposition: &WaveletDecomposition,
    filter: &WaveletFilter,
) -> Result<Vec<f64>, DwtError> {
    let d = decomposition;
    if d.details.len() != d.levels || d.step_input_lengths.len() != d.levels {
        return Err(DwtError::InconsistentDecomposition(format!(
            "expected {} detail bands, found {}",
            d.levels,
            d.details.len()
        )));
    }
    let mut approx = d.approx.clone();
    for level in (0..d.levels).rev() {
        let detail = &d.details[level];
        let target_len = d.step_input_lengths[level];
        if detail.len() != approx.len() {
            return Err(DwtError::InconsistentDecomposition(format!(
                "level {}: approximation has {} coefficients but detail has {}",
                level + 1,
                approx.len(),
                detail.len()
            )));
        }
        let expected = step_output_len(target_len, filter.len(), d.boundary_mode);
        if approx.len() != expected {
            return Err(DwtError::InconsistentDecomposition(format!(
                "level {}: {} coefficients cannot come from {} samples",
                level + 1,
                approx.len(),
                target_len
            )));
        }
        approx = match d.boundary_mode {
            BoundaryMode::Periodic => synthesis_periodic(&approx, detail, filter, target_len),
            BoundaryMode::Symmetric => synthesis_symmetric(&approx, detail, filter, target_len),
        };
    }
    Ok(approx)
}

/// Split the final sample of an odd-length signal into two samples carrying
/// half its energy each, so periodic analysis always sees an even length.
fn split_extend(signal: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(signal.len() + 1);
    out.extend_from_slice(&signal[..signal.len() - 1]);
    let half = signal[signal.len() - 1] * std::f64::consts::FRAC_1_SQRT_2;
    out.push(half);
    out.push(half);
    out
}

fn analysis_periodic(signal: &[f64], filter: &WaveletFilter) -> (Vec<f64>, Vec<f64>) {
    let even;
    let x = if signal.len() % 2 == 1 {
        even = split_extend(signal);
        &even[..]
    } else {
        signal
    };
    let n = x.len();
    let taps = filter.len();
    // Pre-extend so the inner loop needs no modulo.
    let mut ext = Vec::with_capacity(n + taps);
    ext.extend_from_slice(x);
    for m in 0..taps {
        ext.push(x[m % n]);
    }
    let half = n / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for i in 0..half {
        let window = &ext[2 * i..2 * i + taps];
        let mut a = 0.0;
        let mut d = 0.0;
        for (k, &v) in window.iter().enumerate() {
            a += filter.dec_low[k] * v;
            d += filter.dec_high[k] * v;
        }
        approx[i] = a;
        detail[i] = d;
    }
    (approx, detail)
}

fn synthesis_periodic(
    approx: &[f64],
    detail: &[f64],
    filter: &WaveletFilter,
    target_len: usize,
) -> Vec<f64> {
    let n = approx.len() * 2;
    let taps = filter.len();
    // The transpose of analysis, written with the reconstruction taps:
    // rec_low[j] = dec_low[taps-1-j], so the scatter index is 2i + taps-1-j.
    let mut buf = vec![0.0; n + taps];
    for i in 0..approx.len() {
        let (a, d) = (approx[i], detail[i]);
        let slot = &mut buf[2 * i..2 * i + taps];
        for (j, s) in slot.iter_mut().enumerate() {
            let k = taps - 1 - j;
            *s += a * filter.rec_low[k] + d * filter.rec_high[k];
        }
    }
    // Fold the wrapped tail back in.
    for m in n..buf.len() {
        let v = buf[m];
        buf[m % n] += v;
    }
    buf.truncate(n);
    if target_len % 2 == 1 {
        // Undo the energy-preserving split of the last sample.
        let merged = (buf[target_len - 1] + buf[target_len]) * std::f64::consts::FRAC_1_SQRT_2;
        buf.truncate(target_len);
        buf[target_len - 1] = merged;
    }
    buf
}

/// Half-sample symmetric extension index: reflect `m` into `[0, n)`.
fn reflect(m: i64, n: i64) -> usize {
    let p = m.rem_euclid(2 * n);
    if p < n {
        p as usize
    } else {
        (2 * n - 1 - p) as usize
    }
}

fn analysis_symmetric(signal: &[f64], filter: &WaveletFilter) -> (Vec<f64>, Vec<f64>) {
    let n = signal.len();
    let taps = filter.len();
    let out_len = step_output_len(n, taps, BoundaryMode::Symmetric);
    // ext[m] = reflected signal at position m - (taps - 1).
    let ext: Vec<f64> = (0..n + 2 * (taps - 1))
        .map(|m| signal[reflect(m as i64 - (taps as i64 - 1), n as i64)])
        .collect();
    let mut approx = vec![0.0; out_len];
    let mut detail = vec![0.0; out_len];
    for i in 0..out_len {
        let window = &ext[2 * i..2 * i + taps];
        let mut a = 0.0;
        let mut d = 0.0;
        for (k, &v) in window.iter().enumerate() {
            a += filter.dec_low[k] * v;
            d += filter.dec_high[k] * v;
        }
        approx[i] = a;
        detail[i] = d;
    }
    (approx, detail)
}

fn synthesis_symmetric(
    approx: &[f64],
    detail: &[f64],
    filter: &WaveletFilter,
    target_len: usize,
) -> Vec<f64> {
    let taps = filter.len();
    // Scatter in extended coordinates, then read off the interior; the
    // contributions that land in the reflected margin belong to the virtual
    // extension and are dropped.
    let mut buf = vec![0.0; 2 * approx.len() + taps];
    for i in 0..approx.len() {
        let (a, d) = (approx[i], detail[i]);
        let slot = &mut buf[2 * i..2 * i + taps];
        for (j, s) in slot.iter_mut().enumerate() {
            let k = taps - 1 - j;
            *s += a * filter.rec_low[k] + d * filter.rec_high[k];
        }
    }
    buf[taps - 1..taps - 1 + target_len].to_vec()
}
