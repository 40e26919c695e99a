//! End-to-end pipeline for recognizing leg activities from the transmission
//! coefficient of a creeping-wave link worn around the thigh: an analytical
//! channel model, a labeled synthetic signal generator, discrete wavelet
//! feature extraction, five classical classifiers, and a cross-validated
//! evaluation harness.

pub mod channel;
pub mod classifiers;
pub mod dwt;
pub mod evaluation;
pub mod features;
pub mod signal;
