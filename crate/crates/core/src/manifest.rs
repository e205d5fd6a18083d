//! Dataset manifests: one `path,label` entry per line, `#` starts a comment line.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::analysis::Label;
use crate::frame::Clip;
use crate::ErrorName;

pub const MAX_VIDEOS: usize = 500;
pub const MIN_DURATION_MS: u64 = 5_000;
pub const MAX_DURATION_MS: u64 = 10_000;
pub const EXPECTED_DIMS: (usize, usize) = (1280, 720);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ManifestError {
    #[error("line {line}: expected `path,label`")]
    MissingField { line: usize },
    #[error("line {line}: empty path")]
    EmptyPath { line: usize },
    #[error("line {line}: unknown label {label:?}")]
    UnknownLabel { line: usize, label: String },
}

impl ErrorName for ManifestError {
    fn name(&self) -> &'static str {
        match self {
            ManifestError::MissingField { .. } => "MissingField",
            ManifestError::EmptyPath { .. } => "EmptyPath",
            ManifestError::UnknownLabel { .. } => "UnknownLabel",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub label: Label,
}

/// Parses manifest text. Blank lines and lines starting with `#` are skipped;
/// the label is everything after the last comma, so paths may contain commas.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, ManifestError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (path, label) = line
            .rsplit_once(',')
            .ok_or(ManifestError::MissingField { line: line_no })?;
        let path = path.trim();
        if path.is_empty() {
            return Err(ManifestError::EmptyPath { line: line_no });
        }
        let label = label.trim();
        let label = label.parse().map_err(|_| ManifestError::UnknownLabel {
            line: line_no,
            label: label.to_string(),
        })?;
        entries.push(ManifestEntry {
            path: path.to_string(),
            label,
        });
    }
    Ok(entries)
}

/// Dataset lint findings; none of them stop evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ManifestWarning {
    TooManyVideos {
        count: usize,
    },
    Duration {
        path: String,
        duration_ms: u64,
    },
    Dimensions {
        path: String,
        width: usize,
        height: usize,
    },
}

impl fmt::Display for ManifestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifestWarning::TooManyVideos { count } => {
                write!(
                    f,
                    "manifest lists {count} videos, more than the {MAX_VIDEOS} cap"
                )
            }
            ManifestWarning::Duration { path, duration_ms } => write!(
                f,
                "{path}: duration {}.{:03} s is outside 5-10 s",
                duration_ms / 1000,
                duration_ms % 1000
            ),
            ManifestWarning::Dimensions {
                path,
                width,
                height,
            } => write!(
                f,
                "{path}: frames are {width}x{height}, expected {}x{}",
                EXPECTED_DIMS.0, EXPECTED_DIMS.1
            ),
        }
    }
}

/// Checks the video cap, and each clip's duration and frame size. `clips`
/// pairs with `entries` by position; missing clips are skipped.
pub fn validate_manifest(entries: &[ManifestEntry], clips: &[&Clip]) -> Vec<ManifestWarning> {
    let mut warnings = Vec::new();
    if entries.len() > MAX_VIDEOS {
        warnings.push(ManifestWarning::TooManyVideos {
            count: entries.len(),
        });
    }
    for (entry, clip) in entries.iter().zip(clips) {
        // Exact comparison: frames * 1e6 against the bounds scaled by fps_milli.
        let scaled = clip.len() as u64 * 1_000_000;
        let fps = clip.fps_milli() as u64;
        if scaled < MIN_DURATION_MS * fps || scaled > MAX_DURATION_MS * fps {
            warnings.push(ManifestWarning::Duration {
                path: entry.path.clone(),
                duration_ms: clip.duration_ms(),
            });
        }
        if (clip.width(), clip.height()) != EXPECTED_DIMS {
            warnings.push(ManifestWarning::Dimensions {
                path: entry.path.clone(),
                width: clip.width(),
                height: clip.height(),
            });
        }
    }
    warnings
}
