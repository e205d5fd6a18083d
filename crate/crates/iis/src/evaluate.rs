//! Manifest-driven calibration and evaluation.

use std::fs;
use std::path::{Path, PathBuf};

use iis_core::{
    calibrate_threshold, clip_motion_energy, confusion, detect, metrics, parse_manifest,
    validate_manifest, AnalysisError, Clip, ConfusionCounts, Detection, FlowParams, Label,
    ManifestEntry, ManifestWarning, MetricsReport,
};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fsio::read_clip;

/// A manifest with its clips loaded.
#[derive(Debug)]
pub struct Dataset {
    pub entries: Vec<ManifestEntry>,
    pub paths: Vec<PathBuf>,
    pub clips: Vec<Clip>,
}

impl Dataset {
    pub fn warnings(&self) -> Vec<ManifestWarning> {
        let clips: Vec<&Clip> = self.clips.iter().collect();
        validate_manifest(&self.entries, &clips)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.entries.iter().map(|e| e.label).collect()
    }
}

#[derive(Debug)]
pub struct Evaluation {
    pub detections: Vec<Detection>,
    pub counts: ConfusionCounts,
    pub report: MetricsReport,
}

/// Reads a manifest and loads every clip. Relative paths resolve against the
/// manifest's directory. Fails on the first unloadable clip in manifest order.
pub fn load_dataset(manifest: &Path, dir_fps_milli: u32) -> Result<Dataset> {
    let text = fs::read_to_string(manifest).map_err(|e| Error::io(manifest, e))?;
    let entries = parse_manifest(&text).map_err(|e| Error::in_file(manifest, e))?;
    if entries.is_empty() {
        return Err(AnalysisError::Empty.into());
    }
    let base = manifest.parent().unwrap_or(Path::new("."));
    let paths: Vec<PathBuf> = entries.iter().map(|e| base.join(&e.path)).collect();
    let loaded: Vec<Result<Clip>> = paths
        .par_iter()
        .map(|p| read_clip(p, dir_fps_milli))
        .collect();
    let clips = loaded
        .into_iter()
        .zip(&paths)
        .map(|(r, p)| {
            r.map_err(|e| Error::LoadFailure {
                path: p.clone(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        entries,
        paths,
        clips,
    })
}

pub fn motion_energies(clips: &[Clip], flow: &FlowParams) -> Result<Vec<f64>> {
    Ok(clips
        .par_iter()
        .map(|c| clip_motion_energy(c, flow))
        .collect::<std::result::Result<Vec<_>, _>>()?)
}

/// Threshold maximizing F1 over the dataset.
pub fn calibrate(data: &Dataset, flow: &FlowParams) -> Result<f64> {
    let energies = motion_energies(&data.clips, flow)?;
    let items: Vec<(f64, Label)> = energies.into_iter().zip(data.labels()).collect();
    Ok(calibrate_threshold(&items)?)
}

pub fn evaluate(data: &Dataset, threshold: f64, flow: &FlowParams) -> Result<Evaluation> {
    let detections = data
        .clips
        .par_iter()
        .map(|c| detect(c, threshold, flow))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let predicted: Vec<Label> = detections.iter().map(|d| d.label).collect();
    let counts = confusion(&predicted, &data.labels())?;
    let report = metrics(&counts)?;
    Ok(Evaluation {
        detections,
        counts,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsio::{write_iisv_file, DEFAULT_FPS_MILLI};
    use iis_core::{ErrorName, Frame, Rgb};

    fn textured(n: usize, shift: usize) -> Clip {
        let frames = (0..n)
            .map(|t| {
                let mut f = Frame::filled(24, 24, Rgb::BLACK).unwrap();
                for y in 0..24 {
                    for x in 0..24 {
                        let v = (((x + t * shift) * 37 + y * 11) % 97 * 2) as u8;
                        f.set_pixel(x, y, Rgb(v, v, v));
                    }
                }
                f
            })
            .collect();
        Clip::new(frames, 30_000).unwrap()
    }

    #[test]
    fn static_clips_are_true_negatives() {
        let tmp = tempfile::tempdir().unwrap();
        write_iisv_file(&textured(3, 0), &tmp.path().join("a.iisv")).unwrap();
        write_iisv_file(&textured(3, 0), &tmp.path().join("b.iisv")).unwrap();
        let manifest = tmp.path().join("m.csv");
        fs::write(
            &manifest,
            "# static\na.iisv,nonviolent\nb.iisv,nonviolent\n",
        )
        .unwrap();
        let data = load_dataset(&manifest, DEFAULT_FPS_MILLI).unwrap();
        let ev = evaluate(&data, 0.1, &FlowParams::default()).unwrap();
        assert_eq!(ev.counts.tn, 2);
        assert_eq!(ev.report.accuracy, 1.0);
    }

    #[test]
    fn missing_clip_is_load_failure() {
        let tmp = tempfile::tempdir().unwrap();
        let manifest = tmp.path().join("m.csv");
        fs::write(&manifest, "gone.iisv,violent\n").unwrap();
        let err = load_dataset(&manifest, DEFAULT_FPS_MILLI).unwrap_err();
        assert_eq!(err.name(), "LoadFailure");
        assert!(err.to_string().contains("gone.iisv"));
    }
}
