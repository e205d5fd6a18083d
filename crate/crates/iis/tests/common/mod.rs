#![allow(dead_code)]

use std::f64::consts::PI;

use iis_core::{Clip, Frame, Rgb};

/// Smooth periodic texture translated by `(dx, dy)` pixels per frame.
pub fn moving_clip(w: usize, h: usize, n: usize, dx: f64, dy: f64) -> Clip {
    let frames = (0..n)
        .map(|t| {
            let mut f = Frame::filled(w, h, Rgb::BLACK).unwrap();
            let (sx, sy) = (dx * t as f64, dy * t as f64);
            for y in 0..h {
                for x in 0..w {
                    let (u, v) = (x as f64 - sx, y as f64 - sy);
                    let g =
                        0.5 + 0.2 * (2.0 * PI * u / 16.0).sin() + 0.2 * (2.0 * PI * v / 20.0).cos();
                    let b = (g * 255.0).round() as u8;
                    f.set_pixel(x, y, Rgb(b, b, b));
                }
            }
            f
        })
        .collect();
    Clip::new(frames, 30_000).unwrap()
}

pub fn static_clip(w: usize, h: usize, n: usize) -> Clip {
    moving_clip(w, h, n, 0.0, 0.0)
}

/// 1x1 clip whose frames are the given gray levels.
pub fn gray_clip(levels: &[u8]) -> Clip {
    let frames = levels
        .iter()
        .map(|&v| Frame::filled(1, 1, Rgb(v, v, v)).unwrap())
        .collect();
    Clip::new(frames, 30_000).unwrap()
}
