//! Single-level Lucas-Kanade flow on a regular grid of points.
//!
//! Gradients come from the previous frame only and `It = next - prev`. Each
//! grid point solves one 2x2 system over a square window; points whose
//! structure tensor has a small minimum eigenvalue are marked invalid.

use alloc::vec::Vec;

use crate::frame::GrayFrame;
use crate::ErrorName;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("frames differ in size: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize), (usize, usize)),
    #[error("frame {0}x{1} is too small for the flow grid")]
    FrameTooSmall(usize, usize),
    #[error("invalid flow parameters: {0}")]
    InvalidParams(&'static str),
}

impl ErrorName for FlowError {
    fn name(&self) -> &'static str {
        match self {
            FlowError::DimensionMismatch(..) => "DimensionMismatch",
            FlowError::FrameTooSmall(..) => "FrameTooSmall",
            FlowError::InvalidParams(_) => "InvalidParams",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowParams {
    /// Half-width of the square window; 2 gives a 5x5 window.
    pub window_radius: usize,
    pub grid_stride: usize,
    /// Threshold on the smaller eigenvalue of the windowed structure tensor.
    pub min_eigenvalue: f64,
    /// Distance from the frame edge to the first grid point.
    pub border_margin: usize,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams::new(2, 8, 1e-3)
    }
}

impl FlowParams {
    /// Parameters with the border margin set to `window_radius + 1`.
    pub fn new(window_radius: usize, grid_stride: usize, min_eigenvalue: f64) -> Self {
        FlowParams {
            window_radius,
            grid_stride,
            min_eigenvalue,
            border_margin: window_radius + 1,
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if self.window_radius < 1 {
            return Err(FlowError::InvalidParams("window_radius must be at least 1"));
        }
        if self.grid_stride < 1 {
            return Err(FlowError::InvalidParams("grid_stride must be at least 1"));
        }
        if !(self.min_eigenvalue > 0.0 && self.min_eigenvalue.is_finite()) {
            return Err(FlowError::InvalidParams(
                "min_eigenvalue must be positive and finite",
            ));
        }
        if self.border_margin < self.window_radius {
            return Err(FlowError::InvalidParams(
                "border_margin must cover the window radius",
            ));
        }
        Ok(())
    }

    /// Grid coordinates along one axis of length `len`.
    fn lattice(&self, len: usize) -> impl Iterator<Item = usize> + '_ {
        let end = len.saturating_sub(self.border_margin);
        (self.border_margin..end).step_by(self.grid_stride)
    }
}

/// Central-difference image gradients with replicate-clamped borders.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub width: usize,
    pub height: usize,
    pub ix: Vec<f64>,
    pub iy: Vec<f64>,
}

pub fn spatial_gradients(g: &GrayFrame) -> Result<Gradients, FlowError> {
    let (w, h) = (g.width(), g.height());
    if w < 3 || h < 3 {
        return Err(FlowError::FrameTooSmall(w, h));
    }
    let mut ix = Vec::with_capacity(w * h);
    let mut iy = Vec::with_capacity(w * h);
    for y in 0..h {
        let (up, down) = (y.saturating_sub(1), (y + 1).min(h - 1));
        for x in 0..w {
            let (left, right) = (x.saturating_sub(1), (x + 1).min(w - 1));
            ix.push((g.get(right, y) - g.get(left, y)) / 2.0);
            iy.push((g.get(x, down) - g.get(x, up)) / 2.0);
        }
    }
    Ok(Gradients {
        width: w,
        height: h,
        ix,
        iy,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowField {
    pub points: Vec<(usize, usize)>,
    /// Displacement in pixels per frame; `(0, 0)` for invalid points.
    pub vectors: Vec<(f64, f64)>,
    pub valid: Vec<bool>,
    pub frame_width: usize,
    pub frame_height: usize,
}

impl FlowField {
    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Mean `(dx, dy)` over valid points, `(0, 0)` when there are none.
    pub fn mean_vector(&self) -> (f64, f64) {
        let n = self.valid_count();
        if n == 0 {
            return (0.0, 0.0);
        }
        let (sx, sy) = self
            .vectors
            .iter()
            .zip(&self.valid)
            .filter(|(_, &ok)| ok)
            .fold((0.0, 0.0), |(sx, sy), (v, _)| (sx + v.0, sy + v.1));
        (sx / n as f64, sy / n as f64)
    }
}

pub fn lk_flow(
    prev: &GrayFrame,
    next: &GrayFrame,
    params: &FlowParams,
) -> Result<FlowField, FlowError> {
    params.validate()?;
    let dims = (prev.width(), prev.height());
    if dims != (next.width(), next.height()) {
        return Err(FlowError::DimensionMismatch(
            dims,
            (next.width(), next.height()),
        ));
    }
    let (w, h) = dims;
    let margin = params.border_margin;
    if w < 2 * margin + 1 || h < 2 * margin + 1 {
        return Err(FlowError::FrameTooSmall(w, h));
    }
    let grad = spatial_gradients(prev)?;
    let r = params.window_radius;

    let mut field = FlowField {
        points: Vec::new(),
        vectors: Vec::new(),
        valid: Vec::new(),
        frame_width: w,
        frame_height: h,
    };
    for py in params.lattice(h) {
        for px in params.lattice(w) {
            let (mut gxx, mut gxy, mut gyy, mut bx, mut by) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for y in py - r..=py + r {
                for x in px - r..=px + r {
                    let i = y * w + x;
                    let (gx, gy) = (grad.ix[i], grad.iy[i]);
                    let it = next.values()[i] - prev.values()[i];
                    gxx += gx * gx;
                    gxy += gx * gy;
                    gyy += gy * gy;
                    bx -= gx * it;
                    by -= gy * it;
                }
            }
            let half_trace = (gxx + gyy) / 2.0;
            let half_diff = (gxx - gyy) / 2.0;
            let min_eig = half_trace - libm::sqrt(half_diff * half_diff + gxy * gxy);
            let det = gxx * gyy - gxy * gxy;
            let (vector, ok) = if min_eig >= params.min_eigenvalue && det > 0.0 {
                (
                    ((gyy * bx - gxy * by) / det, (gxx * by - gxy * bx) / det),
                    true,
                )
            } else {
                ((0.0, 0.0), false)
            };
            field.points.push((px, py));
            field.vectors.push(vector);
            field.valid.push(ok);
        }
    }
    if field.points.is_empty() {
        return Err(FlowError::FrameTooSmall(w, h));
    }
    Ok(field)
}

/// Mean flow magnitude over valid points; zero when none are valid.
pub fn motion_score(field: &FlowField) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (&(dx, dy), &ok) in field.vectors.iter().zip(&field.valid) {
        if ok {
            sum += libm::sqrt(dx * dx + dy * dy);
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    /// Smooth two-axis sinusoid with a 16 px period, sampled at `(x - sx, y - sy)`.
    pub(crate) fn sinusoid(w: usize, h: usize, sx: f64, sy: f64) -> GrayFrame {
        GrayFrame::from_fn(w, h, |x, y| {
            let (fx, fy) = (x as f64 - sx, y as f64 - sy);
            0.5 + 0.2 * libm::sin(2.0 * PI * fx / 16.0) + 0.2 * libm::cos(2.0 * PI * fy / 20.0)
        })
        .unwrap()
    }

    fn constant(w: usize, h: usize, v: f64) -> GrayFrame {
        GrayFrame::from_fn(w, h, |_, _| v).unwrap()
    }

    #[test]
    fn gradients_of_constant_are_zero() {
        let g = spatial_gradients(&constant(5, 4, 0.3)).unwrap();
        assert!(g.ix.iter().chain(&g.iy).all(|&v| v == 0.0));
    }

    #[test]
    fn gradients_of_ramp() {
        let w = 9;
        let ramp = GrayFrame::from_fn(w, 4, |x, _| x as f64 / (w - 1) as f64).unwrap();
        let g = spatial_gradients(&ramp).unwrap();
        for y in 0..4 {
            for x in 1..w - 1 {
                assert!((g.ix[y * w + x] - 1.0 / (w - 1) as f64).abs() < 1e-12);
                assert_eq!(g.iy[y * w + x], 0.0);
            }
        }
    }

    #[test]
    fn gradients_transpose() {
        let f = sinusoid(7, 5, 0.3, 0.0);
        let t = GrayFrame::from_fn(5, 7, |x, y| f.get(y, x)).unwrap();
        let (gf, gt) = (
            spatial_gradients(&f).unwrap(),
            spatial_gradients(&t).unwrap(),
        );
        for y in 0..5 {
            for x in 0..7 {
                assert_eq!(gf.ix[y * 7 + x], gt.iy[x * 5 + y]);
                assert_eq!(gf.iy[y * 7 + x], gt.ix[x * 5 + y]);
            }
        }
    }

    #[test]
    fn gradients_need_three_pixels() {
        assert_eq!(
            spatial_gradients(&constant(2, 5, 0.0)),
            Err(FlowError::FrameTooSmall(2, 5))
        );
    }

    #[test]
    fn identical_frames_have_zero_flow() {
        let f = sinusoid(64, 64, 0.0, 0.0);
        let field = lk_flow(&f, &f, &FlowParams::default()).unwrap();
        assert!(field.valid_count() > 0);
        assert!(field.vectors.iter().all(|v| v.0 == 0.0 && v.1 == 0.0));
        assert_eq!(motion_score(&field), 0.0);
    }

    #[test]
    fn constant_frames_have_no_valid_points() {
        let field = lk_flow(
            &constant(32, 32, 0.4),
            &constant(32, 32, 0.6),
            &FlowParams::default(),
        )
        .unwrap();
        assert_eq!(field.valid_count(), 0);
        assert!(field.vectors.iter().all(|&v| v == (0.0, 0.0)));
        assert_eq!(motion_score(&field), 0.0);
    }

    #[test]
    fn recovers_one_pixel_shift() {
        let field = lk_flow(
            &sinusoid(64, 64, 0.0, 0.0),
            &sinusoid(64, 64, 1.0, 0.0),
            &FlowParams::default(),
        )
        .unwrap();
        let (dx, dy) = field.mean_vector();
        assert!((0.85..=1.15).contains(&dx), "dx = {dx}");
        assert!(dy.abs() <= 0.1, "dy = {dy}");
    }

    #[test]
    fn grid_respects_margin() {
        let p = FlowParams::default();
        let field = lk_flow(&sinusoid(40, 30, 0.0, 0.0), &sinusoid(40, 30, 0.0, 0.0), &p).unwrap();
        assert_eq!(field.points.len(), field.vectors.len());
        for &(x, y) in &field.points {
            assert!(x >= p.border_margin && x < 40 - p.border_margin);
            assert!(y >= p.border_margin && y < 30 - p.border_margin);
        }
    }

    #[test]
    fn errors() {
        let p = FlowParams::default();
        let a = constant(16, 16, 0.0);
        let b = constant(17, 16, 0.0);
        assert!(matches!(
            lk_flow(&a, &b, &p),
            Err(FlowError::DimensionMismatch(..))
        ));
        let tiny = constant(6, 6, 0.0);
        assert_eq!(
            lk_flow(&tiny, &tiny, &p),
            Err(FlowError::FrameTooSmall(6, 6))
        );
        let bad = FlowParams {
            min_eigenvalue: 0.0,
            ..p
        };
        assert!(matches!(
            lk_flow(&a, &a, &bad),
            Err(FlowError::InvalidParams(_))
        ));
    }

    #[test]
    fn motion_score_examples() {
        let field = FlowField {
            points: alloc::vec![(0, 0), (1, 0), (2, 0)],
            vectors: alloc::vec![(3.0, 4.0), (0.0, 0.0), (0.0, 0.0)],
            valid: alloc::vec![true, true, false],
            frame_width: 3,
            frame_height: 1,
        };
        assert_eq!(motion_score(&field), 2.5);
        let none = FlowField {
            valid: alloc::vec![false; 3],
            ..field
        };
        assert_eq!(motion_score(&none), 0.0);
    }
}
