//! The five frame samplers and the score-based selection they share.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::flow::{lk_flow, motion_score, FlowError, FlowParams};
use crate::frame::{luma_milli, to_grayscale, Clip, GrayFrame, LUMA_MILLI_MAX};
use crate::rng::{floyd_sample, SplitMix64};
use crate::ErrorName;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SampleError {
    #[error("k must be at least 1")]
    KZero,
    #[error("k = {k} exceeds the clip length {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("sampler needs at least 2 frames, clip has {0}")]
    TooFewFrames(usize),
    #[error("the random sampler requires a seed")]
    MissingSeed,
    #[error("unknown sampler kind {0:?} (expected uniform, random, continuous, mad or lk)")]
    UnknownKind(alloc::string::String),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

impl ErrorName for SampleError {
    fn name(&self) -> &'static str {
        match self {
            SampleError::KZero => "KZero",
            SampleError::KTooLarge { .. } => "KTooLarge",
            SampleError::TooFewFrames(_) => "TooFewFrames",
            SampleError::MissingSeed => "MissingSeed",
            SampleError::UnknownKind(_) => "UnknownKind",
            SampleError::Flow(e) => e.name(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    Uniform,
    Random,
    Continuous,
    Mad,
    LucasKanade,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 5] = [
        SamplerKind::Uniform,
        SamplerKind::Random,
        SamplerKind::Continuous,
        SamplerKind::Mad,
        SamplerKind::LucasKanade,
    ];

    /// The spelling used on the command line, in config files and in queries.
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerKind::Uniform => "uniform",
            SamplerKind::Random => "random",
            SamplerKind::Continuous => "continuous",
            SamplerKind::Mad => "mad",
            SamplerKind::LucasKanade => "lk",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplerKind {
    type Err = SampleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SamplerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SampleError::UnknownKind(s.into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub k: usize,
    pub seed: Option<u64>,
}

impl SamplerSpec {
    pub fn new(kind: SamplerKind, k: usize) -> Self {
        SamplerSpec {
            kind,
            k,
            seed: None,
        }
    }

    pub fn seeded(k: usize, seed: u64) -> Self {
        SamplerSpec {
            kind: SamplerKind::Random,
            k,
            seed: Some(seed),
        }
    }

    pub fn validate(&self) -> Result<(), SampleError> {
        if self.k == 0 {
            return Err(SampleError::KZero);
        }
        if self.kind == SamplerKind::Random && self.seed.is_none() {
            return Err(SampleError::MissingSeed);
        }
        Ok(())
    }
}

/// Selected frame ordinals (strictly ascending) and, for the score-based
/// samplers, the score of each selected frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleResult {
    pub indices: Vec<usize>,
    pub scores: Option<Vec<f64>>,
}

fn check_k(n: usize, k: usize) -> Result<(), SampleError> {
    if k == 0 {
        Err(SampleError::KZero)
    } else if k > n {
        Err(SampleError::KTooLarge { k, n })
    } else {
        Ok(())
    }
}

/// Stride sampling from frame 0: `i * floor(n / k)`.
pub fn sample_uniform(n: usize, k: usize) -> Result<Vec<usize>, SampleError> {
    check_k(n, k)?;
    let stride = n / k;
    Ok((0..k).map(|i| i * stride).collect())
}

/// Endpoint-inclusive even spread: `round(i * (n - 1) / (k - 1))`, or the
/// midpoint when `k == 1`.
pub fn sample_continuous(n: usize, k: usize) -> Result<Vec<usize>, SampleError> {
    check_k(n, k)?;
    if k == 1 {
        return Ok(alloc::vec![(n - 1) / 2]);
    }
    let (span, den) = ((n - 1) as u128, (k - 1) as u128);
    // Half-up rounding of a nonnegative rational, exact in integers.
    Ok((0..k as u128)
        .map(|i| ((2 * i * span + den) / (2 * den)) as usize)
        .collect())
}

/// `k` distinct frames chosen by Floyd's algorithm over SplitMix64, ascending.
pub fn sample_random(n: usize, k: usize, seed: u64) -> Result<Vec<usize>, SampleError> {
    check_k(n, k)?;
    let mut rng = SplitMix64::new(seed);
    Ok(floyd_sample(n as u64, k as u64, &mut rng)
        .into_iter()
        .map(|v| v as usize)
        .collect())
}

fn gray_frames(clip: &Clip) -> Vec<GrayFrame> {
    clip.frames().iter().map(to_grayscale).collect()
}

/// Per transition, the exact sum over pixels of `|luma(i+1) - luma(i)|` in
/// [`luma_milli`] units.
fn mad_sums(clip: &Clip) -> Result<Vec<u64>, SampleError> {
    if clip.len() < 2 {
        return Err(SampleError::TooFewFrames(clip.len()));
    }
    let luma: Vec<Vec<u32>> = clip
        .frames()
        .iter()
        .map(|f| f.pixels().chunks_exact(3).map(luma_milli).collect())
        .collect();
    Ok(luma
        .windows(2)
        .map(|pair| {
            pair[0]
                .iter()
                .zip(&pair[1])
                .map(|(&a, &b)| a.abs_diff(b) as u64)
                .sum()
        })
        .collect())
}

fn mad_scale(clip: &Clip) -> f64 {
    (clip.width() * clip.height()) as f64 * LUMA_MILLI_MAX as f64
}

/// Mean absolute grayscale difference of each adjacent frame pair.
///
/// Accumulated in exact integer luma, so equal differences give bit-equal
/// scores and the tie-break on frame index is reliable.
pub fn transition_scores_mad(clip: &Clip) -> Result<Vec<f64>, SampleError> {
    let scale = mad_scale(clip);
    Ok(mad_sums(clip)?
        .into_iter()
        .map(|s| s as f64 / scale)
        .collect())
}

/// Lucas-Kanade motion score of each adjacent frame pair.
pub fn transition_scores_lk(clip: &Clip, params: &FlowParams) -> Result<Vec<f64>, SampleError> {
    if clip.len() < 2 {
        return Err(SampleError::TooFewFrames(clip.len()));
    }
    let gray = gray_frames(clip);
    gray.windows(2)
        .map(|pair| Ok(motion_score(&lk_flow(&pair[0], &pair[1], params)?)))
        .collect()
}

/// Per-frame scores from per-transition scores: edge frames take their single
/// transition, interior frames the mean of both neighbours.
pub fn frame_scores_from_transitions(d: &[f64]) -> Vec<f64> {
    let Some((&first, &last)) = d.first().zip(d.last()) else {
        return Vec::new();
    };
    let mut scores = Vec::with_capacity(d.len() + 1);
    scores.push(first);
    scores.extend(d.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    scores.push(last);
    scores
}

/// Indices of the `k` smallest (or largest) scores, ties to the lower index,
/// returned ascending.
pub fn select_by_score(scores: &[f64], k: usize, largest: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let by_score = if largest {
            scores[b].total_cmp(&scores[a])
        } else {
            scores[a].total_cmp(&scores[b])
        };
        by_score.then(a.cmp(&b))
    });
    order.truncate(k);
    order.sort_unstable();
    order
}

fn select_frames(transitions: &[f64], k: usize, largest: bool) -> SampleResult {
    let scores = frame_scores_from_transitions(transitions);
    let indices = select_by_score(&scores, k, largest);
    let picked = indices.iter().map(|&i| scores[i]).collect();
    SampleResult {
        indices,
        scores: Some(picked),
    }
}

fn check_scored(clip: &Clip, k: usize) -> Result<(), SampleError> {
    if k == 0 {
        return Err(SampleError::KZero);
    }
    if clip.len() < 2 {
        return Err(SampleError::TooFewFrames(clip.len()));
    }
    check_k(clip.len(), k)
}

/// The `k` most stable frames (smallest mean absolute difference).
pub fn sample_mad(clip: &Clip, k: usize) -> Result<SampleResult, SampleError> {
    check_scored(clip, k)?;
    let sums = mad_sums(clip)?;
    // Frame scores doubled so edge and interior frames stay integral.
    let mut doubled = Vec::with_capacity(sums.len() + 1);
    doubled.push(2 * sums[0]);
    doubled.extend(sums.windows(2).map(|w| w[0] + w[1]));
    doubled.push(2 * sums[sums.len() - 1]);
    let mut order: Vec<usize> = (0..doubled.len()).collect();
    order.sort_by_key(|&i| (doubled[i], i));
    order.truncate(k);
    order.sort_unstable();
    let scale = 2.0 * mad_scale(clip);
    let scores = order.iter().map(|&i| doubled[i] as f64 / scale).collect();
    Ok(SampleResult {
        indices: order,
        scores: Some(scores),
    })
}

/// The `k` frames with the most Lucas-Kanade motion.
pub fn sample_lucas_kanade(
    clip: &Clip,
    k: usize,
    params: &FlowParams,
) -> Result<SampleResult, SampleError> {
    check_scored(clip, k)?;
    Ok(select_frames(&transition_scores_lk(clip, params)?, k, true))
}

pub fn sample(
    clip: &Clip,
    spec: &SamplerSpec,
    flow: &FlowParams,
) -> Result<SampleResult, SampleError> {
    spec.validate()?;
    let n = clip.len();
    let plain = |indices| {
        Ok(SampleResult {
            indices,
            scores: None,
        })
    };
    match spec.kind {
        SamplerKind::Uniform => plain(sample_uniform(n, spec.k)?),
        SamplerKind::Continuous => plain(sample_continuous(n, spec.k)?),
        SamplerKind::Random => plain(sample_random(
            n,
            spec.k,
            spec.seed.ok_or(SampleError::MissingSeed)?,
        )?),
        SamplerKind::Mad => sample_mad(clip, spec.k),
        SamplerKind::LucasKanade => sample_lucas_kanade(clip, spec.k, flow),
    }
}
