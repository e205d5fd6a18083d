//! Clips on disk: IISV files and directories of P6 PPM frames.

use std::fs;
use std::path::{Path, PathBuf};

use iis_core::{decode_iisv, encode_iisv, read_ppm, write_ppm, Clip};

use crate::error::{Error, Result};

pub const DEFAULT_FPS_MILLI: u32 = 30_000;

/// Frames from every `.ppm` file in `dir`, ordered by the byte order of their
/// file names.
pub fn load_frame_dir(dir: &Path, fps_milli: u32) -> Result<Clip> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "ppm"))
        .collect();
    if paths.is_empty() {
        return Err(Error::EmptyDirectory(dir.to_path_buf()));
    }
    paths.sort_by(|a, b| {
        a.file_name()
            .unwrap()
            .as_encoded_bytes()
            .cmp(b.file_name().unwrap().as_encoded_bytes())
    });
    let frames = paths
        .iter()
        .map(|p| {
            let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
            read_ppm(&bytes).map_err(|e| Error::in_file(p, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let clip = Clip::new(frames, fps_milli)?;
    Ok(clip.with_source_id(dir.display().to_string()))
}

/// Writes `frame_00000.ppm`, `frame_00001.ppm`, ... into `dir`, creating it if needed.
pub fn write_frame_dir(clip: &Clip, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, frame) in clip.frames().iter().enumerate() {
        let path = dir.join(format!("frame_{i:05}.ppm"));
        fs::write(&path, write_ppm(frame)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

pub fn read_iisv_file(path: &Path) -> Result<Clip> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let clip = decode_iisv(&bytes).map_err(|e| Error::in_file(path, e))?;
    Ok(clip.with_source_id(path.display().to_string()))
}

pub fn write_iisv_file(clip: &Clip, path: &Path) -> Result<()> {
    fs::write(path, encode_iisv(clip)).map_err(|e| Error::io(path, e))
}

/// An IISV file, or a directory of PPM frames at `dir_fps_milli`.
pub fn read_clip(path: &Path, dir_fps_milli: u32) -> Result<Clip> {
    if path.is_dir() {
        load_frame_dir(path, dir_fps_milli)
    } else {
        read_iisv_file(path)
    }
}
