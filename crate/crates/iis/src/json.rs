//! Wire shapes for CLI output and HTTP bodies. Field order is the key order.

use iis_core::{
    BenchmarkReport, ConfusionCounts, Detection, ErrorName, MetricsReport, SamplerSpec,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionJson {
    pub label: String,
    pub energy: f64,
    pub threshold: f64,
    pub frames: usize,
}

impl DetectionJson {
    pub fn new(d: &Detection, frames: usize) -> Self {
        DetectionJson {
            label: d.label.as_str().to_string(),
            energy: d.energy,
            threshold: d.threshold_used,
            frames,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipResponse {
    pub label: String,
    pub energy: f64,
    pub threshold: f64,
    pub frames: usize,
    pub sampler: String,
    pub k: usize,
    pub processing_ms: f64,
}

impl ClipResponse {
    pub fn new(d: &Detection, frames: usize, spec: &SamplerSpec, processing_ms: f64) -> Self {
        ClipResponse {
            label: d.label.as_str().to_string(),
            energy: d.energy,
            threshold: d.threshold_used,
            frames,
            sampler: spec.kind.as_str().to_string(),
            k: spec.k,
            processing_ms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsJson {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl MetricsJson {
    pub fn new(m: &MetricsReport, c: &ConfusionCounts) -> Self {
        MetricsJson {
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            tn: c.tn,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkJson {
    pub frames_processed: u64,
    pub total_ms: f64,
    pub ms_per_frame: f64,
    pub budget_ms: f64,
    pub within_budget: bool,
}

impl From<&BenchmarkReport> for BenchmarkJson {
    fn from(r: &BenchmarkReport) -> Self {
        BenchmarkJson {
            frames_processed: r.frames_processed,
            total_ms: r.total_ms,
            ms_per_frame: r.ms_per_frame,
            budget_ms: r.budget_ms,
            within_budget: r.within_budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl ErrorBody {
    pub fn new<E: ErrorName + std::fmt::Display>(e: &E) -> Self {
        ErrorBody {
            error: e.name().to_string(),
            message: e.to_string(),
        }
    }
}
