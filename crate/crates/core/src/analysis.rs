//! Detection, confusion counts, metrics and threshold calibration.
//!
//! The detector is a motion-energy threshold: the mean Lucas-Kanade motion
//! score over every adjacent frame pair, compared inclusively against a
//! threshold. Violent is the positive class throughout.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::flow::{FlowError, FlowParams};
use crate::frame::Clip;
use crate::sampling::{transition_scores_lk, SampleError};
use crate::ErrorName;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("detection needs at least 2 frames, clip has {0}")]
    TooFewFrames(usize),
    #[error("threshold must be finite and nonnegative")]
    InvalidThreshold,
    #[error("calibration needs at least one clip of each label")]
    SingleClass,
    #[error("{predictions} predictions but {truths} truths")]
    LengthMismatch { predictions: usize, truths: usize },
    #[error("no items to evaluate")]
    Empty,
    #[error("unknown label {0:?} (expected violent or nonviolent)")]
    UnknownLabel(alloc::string::String),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

impl ErrorName for AnalysisError {
    fn name(&self) -> &'static str {
        match self {
            AnalysisError::TooFewFrames(_) => "TooFewFrames",
            AnalysisError::InvalidThreshold => "InvalidThreshold",
            AnalysisError::SingleClass => "SingleClass",
            AnalysisError::LengthMismatch { .. } => "LengthMismatch",
            AnalysisError::Empty => "Empty",
            AnalysisError::UnknownLabel(_) => "UnknownLabel",
            AnalysisError::Flow(e) => e.name(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Violent,
    Nonviolent,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Violent => "violent",
            Label::Nonviolent => "nonviolent",
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Violent
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "violent" => Ok(Label::Violent),
            "nonviolent" => Ok(Label::Nonviolent),
            other => Err(AnalysisError::UnknownLabel(other.into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detection {
    pub label: Label,
    pub energy: f64,
    pub threshold_used: f64,
}

impl Detection {
    /// Labels `energy` against `threshold`; the boundary counts as violent.
    pub fn classify(energy: f64, threshold: f64) -> Self {
        let label = if energy >= threshold {
            Label::Violent
        } else {
            Label::Nonviolent
        };
        Detection {
            label,
            energy,
            threshold_used: threshold,
        }
    }
}

/// Anything that can label a clip.
pub trait Detector {
    fn detect(&self, clip: &Clip) -> Result<Detection, AnalysisError>;
}

/// Thresholded mean Lucas-Kanade motion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionEnergyDetector {
    pub threshold: f64,
    pub flow: FlowParams,
}

impl Detector for MotionEnergyDetector {
    fn detect(&self, clip: &Clip) -> Result<Detection, AnalysisError> {
        detect(clip, self.threshold, &self.flow)
    }
}

/// Mean motion score over all `n - 1` transitions.
pub fn clip_motion_energy(clip: &Clip, params: &FlowParams) -> Result<f64, AnalysisError> {
    let scores = transition_scores_lk(clip, params).map_err(|e| match e {
        SampleError::Flow(f) => AnalysisError::Flow(f),
        _ => AnalysisError::TooFewFrames(clip.len()),
    })?;
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

pub fn detect(
    clip: &Clip,
    threshold: f64,
    params: &FlowParams,
) -> Result<Detection, AnalysisError> {
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return Err(AnalysisError::InvalidThreshold);
    }
    Ok(Detection::classify(
        clip_motion_energy(clip, params)?,
        threshold,
    ))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn record(&mut self, predicted: Label, truth: Label) {
        match (predicted.is_positive(), truth.is_positive()) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }
}

pub fn confusion(
    predictions: &[Label],
    truths: &[Label],
) -> Result<ConfusionCounts, AnalysisError> {
    if predictions.len() != truths.len() {
        return Err(AnalysisError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    if predictions.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in predictions.iter().zip(truths) {
        c.record(p, t);
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn metrics(c: &ConfusionCounts) -> Result<MetricsReport, AnalysisError> {
    let total = c.total();
    if total == 0 {
        return Err(AnalysisError::Empty);
    }
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    Ok(MetricsReport {
        accuracy: ratio(c.tp + c.tn, total),
        precision,
        recall,
        f1: f1_score(precision, recall),
    })
}

/// Thresholds worth trying for `energies`: zero, every midpoint between
/// consecutive distinct energies, and one past the maximum. Ascending.
pub fn threshold_candidates(energies: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = energies.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut out = Vec::with_capacity(sorted.len() + 1);
    out.push(0.0);
    out.extend(sorted.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    if let Some(&max) = sorted.last() {
        out.push(max + 1.0);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// F1 of thresholding `items` at `threshold`.
pub fn f1_at(items: &[(f64, Label)], threshold: f64) -> f64 {
    let mut c = ConfusionCounts::default();
    for &(energy, truth) in items {
        c.record(Detection::classify(energy, threshold).label, truth);
    }
    metrics(&c).map(|m| m.f1).unwrap_or(0.0)
}

/// The candidate threshold with the highest F1; ties go to the smallest.
pub fn calibrate_threshold(items: &[(f64, Label)]) -> Result<f64, AnalysisError> {
    let has = |l: Label| items.iter().any(|&(_, t)| t == l);
    if !has(Label::Violent) || !has(Label::Nonviolent) {
        return Err(AnalysisError::SingleClass);
    }
    let energies: Vec<f64> = items.iter().map(|&(e, _)| e).collect();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for t in threshold_candidates(&energies) {
        let f1 = f1_at(items, t);
        if f1 > best.0 {
            best = (f1, t);
        }
    }
    Ok(best.1)
}

/// Latency of a timed pipeline run against a per-frame budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchmarkReport {
    pub frames_processed: u64,
    pub total_ms: f64,
    pub ms_per_frame: f64,
    pub budget_ms: f64,
    pub within_budget: bool,
}

impl BenchmarkReport {
    /// Per-frame processing budget on the target edge device.
    pub const DEFAULT_BUDGET_MS: f64 = 2000.0;

    pub fn new(frames_processed: u64, total_ms: f64, budget_ms: f64) -> Self {
        let ms_per_frame = if frames_processed == 0 {
            0.0
        } else {
            total_ms / frames_processed as f64
        };
        BenchmarkReport {
            frames_processed,
            total_ms,
            ms_per_frame,
            budget_ms,
            within_budget: ms_per_frame <= budget_ms,
        }
    }
}
