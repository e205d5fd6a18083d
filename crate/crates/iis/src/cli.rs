//! Subcommand definitions and their dispatch. Machine-readable results go to
//! `out`, diagnostics to `err`.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use iis_core::{build_super_image, detect, sample, write_ppm, BenchmarkReport, SamplerKind};
use serde::Serialize;

use crate::bench::benchmark;
use crate::config::{ConfigBuilder, ServiceConfig};
use crate::error::{Error, Result};
use crate::evaluate::{calibrate, evaluate, load_dataset};
use crate::fsio::{load_frame_dir, read_clip, read_iisv_file, write_frame_dir, write_iisv_file};
use crate::json::{BenchmarkJson, DetectionJson, MetricsJson};

#[derive(Debug, Parser)]
#[command(name = "iis", version, about = "Super-image video violence screening")]
pub struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Suppress diagnostics on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(flatten)]
    pub flow: FlowArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct FlowArgs {
    #[arg(long, global = true)]
    pub window_radius: Option<usize>,
    #[arg(long, global = true)]
    pub grid_stride: Option<usize>,
    #[arg(long, global = true)]
    pub min_eig: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct SamplerArgs {
    /// uniform, random, continuous, mad or lk.
    #[arg(long)]
    pub sampler: Option<SamplerKind>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// IISV file or directory of PPM frames.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Frame rate assumed for PPM directories.
    #[arg(long, default_value_t = 30.0)]
    pub fps: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert between a PPM frame directory and an IISV file.
    Convert {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print sampled frame indices.
    Sample {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Write a super image as PPM.
    Superimage {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[arg(long)]
        out: PathBuf,
        /// Resize each cell to WIDTHxHEIGHT.
        #[arg(long, value_parser = parse_cell)]
        cell: Option<(usize, usize)>,
        /// Write grid layout JSON here.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Classify one clip.
    Detect {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Print the F1-optimal threshold for a manifest.
    Calibrate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
    },
    /// Score a labelled manifest.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
    },
    /// Time the full pipeline on one clip.
    Benchmark {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        #[arg(long, default_value_t = BenchmarkReport::DEFAULT_BUDGET_MS)]
        budget_ms: f64,
    },
    /// Run the HTTP service until interrupted.
    Serve {
        #[arg(long)]
        listen: Option<String>,
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[arg(long)]
        max_body_bytes: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        queue: Option<usize>,
    },
}

fn parse_cell(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let w = w.parse().map_err(|_| "bad width")?;
    let h = h.parse().map_err(|_| "bad height")?;
    Ok((w, h))
}

fn fps_milli(fps: f64) -> Result<u32> {
    let milli = (fps * 1000.0).round();
    if !(milli >= 1.0 && milli <= u32::MAX as f64) {
        return Err(iis_core::FrameError::ZeroFps.into());
    }
    Ok(milli as u32)
}

#[derive(Serialize)]
struct GridMeta<'a> {
    rows: usize,
    cols: usize,
    pad_cells: usize,
    k: usize,
    indices: &'a [usize],
}

impl Cli {
    /// Layers built-in defaults, `--config`, `env` and this invocation's flags.
    pub fn config(&self, env: &HashMap<String, String>) -> Result<ServiceConfig> {
        let mut b = ConfigBuilder::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            b.apply_file(&text).map_err(|e| Error::in_file(path, e))?;
        }
        b.apply_env(env)?;
        let mut flags = ConfigBuilder {
            window_radius: self.flow.window_radius,
            grid_stride: self.flow.grid_stride,
            min_eig: self.flow.min_eig,
            ..Default::default()
        };
        let mut sampler_flags = |s: &SamplerArgs| {
            flags.sampler_kind = s.sampler;
            flags.sampler_k = s.k;
            flags.sampler_seed = s.seed;
        };
        match &self.command {
            Command::Sample { sampler, .. } | Command::Superimage { sampler, .. } => {
                sampler_flags(sampler)
            }
            Command::Benchmark {
                sampler, threshold, ..
            } => {
                sampler_flags(sampler);
                flags.threshold = *threshold;
            }
            Command::Serve {
                listen,
                threshold,
                sampler,
                max_body_bytes,
                workers,
                queue,
            } => {
                sampler_flags(sampler);
                flags.threshold = *threshold;
                flags.listen_address = listen.clone();
                flags.max_body_bytes = *max_body_bytes;
                flags.workers = *workers;
                flags.queue = *queue;
            }
            Command::Detect { threshold, .. } | Command::Evaluate { threshold, .. } => {
                flags.threshold = *threshold
            }
            Command::Convert { .. } | Command::Calibrate { .. } => {}
        }
        b.merge(&flags);
        Ok(b.build()?)
    }
}

fn load(input: &InputArgs) -> Result<iis_core::Clip> {
    read_clip(&input.input, fps_milli(input.fps)?)
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string(value).expect("plain data serializes");
    writeln!(out, "{text}").map_err(|e| Error::io("stdout", e))
}

fn line(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| Error::io("stdout", e))
}

pub fn run(
    cli: &Cli,
    env: &HashMap<String, String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let config = cli.config(env)?;
    let mut note = |text: String| {
        if !cli.quiet {
            let _ = writeln!(err, "{text}");
        }
    };
    match &cli.command {
        Command::Convert { input, out: target } => {
            if input.input.is_dir() {
                let clip = load_frame_dir(&input.input, fps_milli(input.fps)?)?;
                write_iisv_file(&clip, target)?;
                note(format!(
                    "wrote {} frames to {}",
                    clip.len(),
                    target.display()
                ));
            } else {
                let clip = read_iisv_file(&input.input)?;
                write_frame_dir(&clip, target)?;
                note(format!(
                    "wrote {} frames to {}",
                    clip.len(),
                    target.display()
                ));
            }
        }
        Command::Sample { input, .. } => {
            let clip = load(input)?;
            let picked = sample(&clip, &config.sampler, &config.flow)?;
            let list: Vec<String> = picked.indices.iter().map(usize::to_string).collect();
            line(out, &list.join(","))?;
        }
        Command::Superimage {
            input,
            out: target,
            cell,
            meta,
            ..
        } => {
            let clip = load(input)?;
            let image = build_super_image(&clip, &config.sampler, *cell, &config.flow)?;
            write_bytes(target, &write_ppm(&image.image))?;
            let grid = GridMeta {
                rows: image.layout.rows,
                cols: image.layout.cols,
                pad_cells: image.layout.pad_cells,
                k: image.source_indices.len(),
                indices: &image.source_indices,
            };
            match meta {
                Some(path) => {
                    let text = serde_json::to_string(&grid).expect("plain data serializes");
                    write_bytes(path, format!("{text}\n").as_bytes())?;
                }
                None => {
                    let list: Vec<String> = grid.indices.iter().map(usize::to_string).collect();
                    note(format!(
                        "rows={} cols={} k={} indices={}",
                        grid.rows,
                        grid.cols,
                        grid.k,
                        list.join(",")
                    ));
                }
            }
        }
        Command::Detect { input, .. } => {
            let clip = load(input)?;
            let d = detect(&clip, config.threshold, &config.flow)?;
            print_json(out, &DetectionJson::new(&d, clip.len()))?;
        }
        Command::Calibrate { manifest, fps } => {
            let data = load_dataset(manifest, fps_milli(*fps)?)?;
            for w in data.warnings() {
                note(format!("warning: {w}"));
            }
            line(out, &calibrate(&data, &config.flow)?.to_string())?;
        }
        Command::Evaluate { manifest, fps, .. } => {
            let data = load_dataset(manifest, fps_milli(*fps)?)?;
            for w in data.warnings() {
                note(format!("warning: {w}"));
            }
            let ev = evaluate(&data, config.threshold, &config.flow)?;
            print_json(out, &MetricsJson::new(&ev.report, &ev.counts))?;
        }
        Command::Benchmark {
            input,
            repetitions,
            budget_ms,
            ..
        } => {
            let clip = load(input)?;
            let report = benchmark(
                &clip,
                &config.sampler,
                &config.flow,
                config.threshold,
                *repetitions,
                *budget_ms,
            )?;
            print_json(out, &BenchmarkJson::from(&report))?;
        }
        Command::Serve { .. } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io("runtime", e))?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(&config.listen_address)
                    .await
                    .map_err(|e| Error::io(&config.listen_address, e))?;
                if let Ok(addr) = listener.local_addr() {
                    note(format!("listening on {addr}"));
                }
                crate::service::serve_on(listener, crate::service::AppState::new(config.clone()))
                    .await
            })?;
        }
    }
    Ok(())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
