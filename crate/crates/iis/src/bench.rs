//! Wall-clock timing of the full pipeline.

use std::time::Instant;

use iis_core::{build_super_image, detect, BenchmarkReport, Clip, FlowParams, SamplerSpec};

use crate::error::Result;

/// Runs sample, super image and detect `repetitions` times on the calling
/// thread and reports the mean cost per input frame.
pub fn benchmark(
    clip: &Clip,
    spec: &SamplerSpec,
    flow: &FlowParams,
    threshold: f64,
    repetitions: usize,
    budget_ms: f64,
) -> Result<BenchmarkReport> {
    let repetitions = repetitions.max(1);
    let start = Instant::now();
    for _ in 0..repetitions {
        std::hint::black_box(build_super_image(clip, spec, None, flow)?);
        std::hint::black_box(detect(clip, threshold, flow)?);
    }
    let total_ms = start.elapsed().as_secs_f64() * 1000.0;
    Ok(BenchmarkReport::new(
        (clip.len() * repetitions) as u64,
        total_ms,
        budget_ms,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use iis_core::{Frame, Rgb, SamplerKind};

    #[test]
    fn frames_are_counted_per_repetition() {
        let frames = (0..6)
            .map(|_| Frame::filled(16, 16, Rgb(5, 5, 5)).unwrap())
            .collect();
        let clip = Clip::new(frames, 30_000).unwrap();
        let spec = SamplerSpec::new(SamplerKind::Uniform, 3);
        let r = benchmark(&clip, &spec, &FlowParams::default(), 0.5, 3, 1e12).unwrap();
        assert_eq!(r.frames_processed, 18);
        assert!(r.within_budget);
    }
}
