//! Per-activity modulation waveforms.
//!
//! Each activity modulates the static path gain with a periodic excursion
//! shape normalized to peak at 1, so the configured depth is exactly the
//! peak-to-rest excursion in dB. Excursions are tens of dB, like the swings
//! the around-thigh link actually shows, and each depth is divided by how
//! much of a unit excursion of that shape survives five-level smoothing, so
//! the per-activity peak statistic of the wavelet coefficients comes out
//! sideways > full > forward > squatting > {backward, lifting}.

use super::ActivityLabel;

/// Base waveform family of an activity cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveformKind {
    /// One smooth hump occupying a fraction of the cycle.
    SingleLobe,
    /// Two smooth excursions per cycle (out and back), `sin^2(2 pi t)`.
    /// Sample-value distribution matches [`WaveformKind::Sinusoid`] exactly,
    /// so at equal depth the two are raw-moment twins that only the band
    /// split tells apart.
    DoubleLobe,
    /// Ramp up, plateau with two sharp recovery notches, ramp down.
    RampHold,
    /// Full-cycle raised cosine.
    Sinusoid,
}

/// Modulation recipe for one activity.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityTemplate {
    pub waveform_kind: WaveformKind,
    /// Peak magnitude excursion in dB (non-negative; excursions dip the
    /// received magnitude).
    pub magnitude_depth_db: f64,
    /// Peak phase excursion in radians.
    pub phase_depth_rad: f64,
    /// Cycle period is drawn uniformly from this range, in seconds.
    pub period_range_s: (f64, f64),
    /// Relative amplitudes of intra-lobe harmonics riding on the base shape.
    pub harmonic_weights: Vec<f64>,
    /// Fraction of the cycle a single lobe occupies.
    pub lobe_width: f64,
    /// 1 / max of the raw shape, so `shape` peaks at exactly 1.
    norm: f64,
}

impl ActivityTemplate {
    pub fn new(
        waveform_kind: WaveformKind,
        magnitude_depth_db: f64,
        phase_depth_rad: f64,
        period_range_s: (f64, f64),
        harmonic_weights: Vec<f64>,
        lobe_width: f64,
    ) -> ActivityTemplate {
        let mut template = ActivityTemplate {
            waveform_kind,
            magnitude_depth_db,
            phase_depth_rad,
            period_range_s,
            harmonic_weights,
            lobe_width,
            norm: 1.0,
        };
        let max = (0..2048)
            .map(|i| template.raw_shape(i as f64 / 2048.0))
            .fold(0.0f64, f64::max);
        template.norm = if max > 0.0 { 1.0 / max } else { 1.0 };
        template
    }

    /// Excursion at cycle phase `t` in [0, 1); peaks at 1.
    pub fn shape(&self, t: f64) -> f64 {
        self.raw_shape(t) * self.norm
    }

    fn raw_shape(&self, t: f64) -> f64 {
        let base = match self.waveform_kind {
            WaveformKind::SingleLobe => lobe(t, 0.0, self.lobe_width),
            WaveformKind::DoubleLobe => {
                let s = (2.0 * std::f64::consts::PI * t).sin();
                s * s
            }
            WaveformKind::RampHold => ramp_hold(t),
            WaveformKind::Sinusoid => 0.5 - 0.5 * (2.0 * std::f64::consts::PI * t).cos(),
        };
        if self.harmonic_weights.is_empty() {
            return base;
        }
        let ripple: f64 = self
            .harmonic_weights
            .iter()
            .enumerate()
            .map(|(j, w)| w * (2.0 * std::f64::consts::PI * (j + 2) as f64 * t).sin())
            .sum();
        base * (1.0 + ripple)
    }
}

/// Raised-cosine hump starting at `start`, lasting `width` of the cycle.
fn lobe(t: f64, start: f64, width: f64) -> f64 {
    if t < start || t >= start + width {
        return 0.0;
    }
    let u = (t - start) / width;
    (std::f64::consts::PI * u).sin().powi(2)
}

/// Ramp to a plateau, notch it twice with sharp recoveries, ramp back down.
/// The notches are the high-kurtosis signature of a squat cycle.
fn ramp_hold(t: f64) -> f64 {
    let plateau = if t < 0.25 {
        t / 0.25
    } else if t < 0.70 {
        1.0
    } else if t < 0.85 {
        1.0 - (t - 0.70) / 0.15
    } else {
        0.0
    };
    let notch = 0.55 * (spike(t, 0.32, 0.05) + spike(t, 0.60, 0.05));
    (plateau - notch).max(0.0)
}

fn spike(t: f64, start: f64, width: f64) -> f64 {
    if t < start || t >= start + width {
        return 0.0;
    }
    let u = (t - start) / width;
    (std::f64::consts::PI * u).sin().powi(2)
}

/// Calibrated default template for an activity.
pub fn default_template(activity: ActivityLabel) -> ActivityTemplate {
    let period = (2.0, 3.0);
    match activity {
        ActivityLabel::ForwardSwing => ActivityTemplate::new(
            WaveformKind::SingleLobe,
            19.0,
            0.95,
            period,
            vec![0.18],
            0.50,
        ),
        ActivityLabel::FullSwing => ActivityTemplate::new(
            WaveformKind::DoubleLobe,
            27.8,
            1.4,
            period,
            vec![],
            1.0,
        ),
        ActivityLabel::BackwardSwing => ActivityTemplate::new(
            WaveformKind::SingleLobe,
            4.5,
            0.25,
            period,
            vec![0.15],
            0.45,
        ),
        ActivityLabel::LiftingKnee => ActivityTemplate::new(
            WaveformKind::SingleLobe,
            12.9,
            0.65,
            period,
            vec![0.20],
            0.22,
        ),
        ActivityLabel::SidewaysSwing => ActivityTemplate::new(
            WaveformKind::Sinusoid,
            27.8,
            1.4,
            period,
            vec![],
            1.0,
        ),
        ActivityLabel::Squatting => ActivityTemplate::new(
            WaveformKind::RampHold,
            10.7,
            0.55,
            period,
            vec![],
            1.0,
        ),
    }
}
