//! Frames, grayscale planes and clips, plus the two pixel transforms every
//! later stage depends on: BT.601 grayscale conversion and bilinear resizing.

use alloc::string::String;
use alloc::vec::Vec;

use crate::ErrorName;

/// An 8-bit RGB color.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const BLACK: Rgb = Rgb(0, 0, 0);
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("frame dimensions must be nonzero (got {width}x{height})")]
    ZeroDimension { width: usize, height: usize },
    #[error("frame dimensions {width}x{height} exceed the u32 range")]
    TooLarge { width: usize, height: usize },
    #[error("pixel buffer holds {actual} bytes, expected {expected}")]
    BadLength { expected: usize, actual: usize },
    #[error("clip has no frames")]
    EmptyClip,
    #[error("frame {index} is {width}x{height}, clip is {expected_width}x{expected_height}")]
    MixedDimensions {
        index: usize,
        width: usize,
        height: usize,
        expected_width: usize,
        expected_height: usize,
    },
    #[error("fps_milli must be positive")]
    ZeroFps,
}

impl ErrorName for FrameError {
    fn name(&self) -> &'static str {
        match self {
            FrameError::ZeroDimension { .. } => "ZeroDimension",
            FrameError::TooLarge { .. } => "TooLarge",
            FrameError::BadLength { .. } => "BadLength",
            FrameError::EmptyClip => "EmptyClip",
            FrameError::MixedDimensions { .. } => "MixedDimensions",
            FrameError::ZeroFps => "ZeroFps",
        }
    }
}

/// One decoded RGB8 image, row-major, three bytes per pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
    index: usize,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, FrameError> {
        check_dims(width, height)?;
        let expected = width * height * 3;
        if pixels.len() != expected {
            return Err(FrameError::BadLength {
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Frame {
            width,
            height,
            pixels,
            index: 0,
        })
    }

    /// A frame where every pixel is `color`.
    pub fn filled(width: usize, height: usize, color: Rgb) -> Result<Self, FrameError> {
        check_dims(width, height)?;
        let mut pixels = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            pixels.extend_from_slice(&[color.0, color.1, color.2]);
        }
        Ok(Frame {
            width,
            height,
            pixels,
            index: 0,
        })
    }

    pub fn with_index(mut self, index: usize) -> Self {
        self.index = index;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Ordinal position in the source clip.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        let o = (y * self.width + x) * 3;
        Rgb(self.pixels[o], self.pixels[o + 1], self.pixels[o + 2])
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, color: Rgb) {
        let o = (y * self.width + x) * 3;
        self.pixels[o] = color.0;
        self.pixels[o + 1] = color.1;
        self.pixels[o + 2] = color.2;
    }
}

fn check_dims(width: usize, height: usize) -> Result<(), FrameError> {
    if width == 0 || height == 0 {
        return Err(FrameError::ZeroDimension { width, height });
    }
    if width > u32::MAX as usize || height > u32::MAX as usize {
        return Err(FrameError::TooLarge { width, height });
    }
    Ok(())
}

/// Normalized grayscale intensities in `[0, 1]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayFrame {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl GrayFrame {
    /// Builds a plane from raw values, clamping each into `[0, 1]`.
    pub fn new(width: usize, height: usize, mut values: Vec<f64>) -> Result<Self, FrameError> {
        check_dims(width, height)?;
        if values.len() != width * height {
            return Err(FrameError::BadLength {
                expected: width * height,
                actual: values.len(),
            });
        }
        for v in &mut values {
            *v = clamp_unit(*v);
        }
        Ok(GrayFrame {
            width,
            height,
            values,
        })
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, FrameError> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// An ordered run of equally sized frames with a frame rate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clip {
    frames: Vec<Frame>,
    fps_milli: u32,
    source_id: String,
}

impl Clip {
    /// Validates the frames and renumbers their indices `0..n`.
    pub fn new(frames: Vec<Frame>, fps_milli: u32) -> Result<Self, FrameError> {
        if fps_milli == 0 {
            return Err(FrameError::ZeroFps);
        }
        let Some(first) = frames.first() else {
            return Err(FrameError::EmptyClip);
        };
        let (w, h) = first.dims();
        let mut out = Vec::with_capacity(frames.len());
        for (i, f) in frames.into_iter().enumerate() {
            if f.dims() != (w, h) {
                return Err(FrameError::MixedDimensions {
                    index: i,
                    width: f.width,
                    height: f.height,
                    expected_width: w,
                    expected_height: h,
                });
            }
            out.push(f.with_index(i));
        }
        Ok(Clip {
            frames: out,
            fps_milli,
            source_id: String::new(),
        })
    }

    pub fn with_source_id(mut self, source_id: impl Into<String>) -> Self {
        self.source_id = source_id.into();
        self
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    /// Always false for a constructed clip; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn width(&self) -> usize {
        self.frames[0].width
    }

    pub fn height(&self) -> usize {
        self.frames[0].height
    }

    pub fn fps_milli(&self) -> u32 {
        self.fps_milli
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    /// Clip length in milliseconds, rounded down.
    pub fn duration_ms(&self) -> u64 {
        self.frames.len() as u64 * 1_000_000 / self.fps_milli as u64
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }
}

/// Full-scale value of [`luma_milli`]: white maps to 255 000.
pub const LUMA_MILLI_MAX: u32 = 255_000;

/// BT.601 luma of one RGB8 pixel in exact integer units of 1/1000:
/// `299 R + 587 G + 114 B`.
#[inline]
pub fn luma_milli(p: &[u8]) -> u32 {
    299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32
}

/// BT.601 luma, normalized to `[0, 1]`.
pub fn to_grayscale(frame: &Frame) -> GrayFrame {
    let values = frame
        .pixels
        .chunks_exact(3)
        .map(|p| clamp_unit(luma_milli(p) as f64 / LUMA_MILLI_MAX as f64))
        .collect();
    GrayFrame {
        width: frame.width,
        height: frame.height,
        values,
    }
}

/// Bilinear resampling with half-pixel-center coordinate mapping.
///
/// Sample positions are clamped to the source edge, and each channel is
/// rounded to the nearest integer, so constant images stay constant and no
/// output channel leaves the input's range. The frame index is preserved.
///
/// # Panics
/// If `new_w` or `new_h` is zero.
pub fn resize_bilinear(frame: &Frame, new_w: usize, new_h: usize) -> Frame {
    assert!(
        new_w >= 1 && new_h >= 1,
        "resize target must be at least 1x1"
    );
    let (sw, sh) = frame.dims();
    if (sw, sh) == (new_w, new_h) {
        return frame.clone();
    }
    let xs: Vec<(usize, usize, f64)> = axis_taps(sw, new_w);
    let ys: Vec<(usize, usize, f64)> = axis_taps(sh, new_h);
    let src = &frame.pixels;
    let mut out = Vec::with_capacity(new_w * new_h * 3);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            for c in 0..3 {
                let p = |x: usize, y: usize| src[(y * sw + x) * 3 + c] as f64;
                let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
                let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
                let v = top * (1.0 - fy) + bottom * fy;
                out.push(libm::round(v).clamp(0.0, 255.0) as u8);
            }
        }
    }
    Frame {
        width: new_w,
        height: new_h,
        pixels: out,
        index: frame.index,
    }
}

/// For each destination coordinate: the two source taps and the weight of the second.
fn axis_taps(src_len: usize, dst_len: usize) -> Vec<(usize, usize, f64)> {
    let scale = src_len as f64 / dst_len as f64;
    let max = (src_len - 1) as f64;
    (0..dst_len)
        .map(|d| {
            let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, max);
            let i0 = libm::floor(s) as usize;
            let i1 = (i0 + 1).min(src_len - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn px(c: Rgb) -> Frame {
        Frame::filled(1, 1, c).unwrap()
    }

    #[test]
    fn grayscale_weights() {
        assert!((to_grayscale(&px(Rgb(255, 0, 0))).get(0, 0) - 0.299).abs() < 1e-12);
        assert!((to_grayscale(&px(Rgb(0, 255, 0))).get(0, 0) - 0.587).abs() < 1e-12);
        assert!((to_grayscale(&px(Rgb(255, 255, 255))).get(0, 0) - 1.0).abs() < 1e-12);
        assert_eq!(to_grayscale(&px(Rgb(0, 0, 0))).get(0, 0), 0.0);
    }

    #[test]
    fn frame_rejects_bad_buffers() {
        assert!(matches!(
            Frame::new(0, 1, vec![]),
            Err(FrameError::ZeroDimension { .. })
        ));
        assert!(matches!(
            Frame::new(2, 1, vec![0; 5]),
            Err(FrameError::BadLength { .. })
        ));
    }

    #[test]
    fn clip_checks_dimensions_and_renumbers() {
        let a = px(Rgb::BLACK).with_index(7);
        let b = Frame::filled(2, 2, Rgb::BLACK).unwrap();
        assert!(matches!(
            Clip::new(vec![a.clone(), b], 30_000),
            Err(FrameError::MixedDimensions { index: 1, .. })
        ));
        assert_eq!(Clip::new(vec![], 30_000), Err(FrameError::EmptyClip));
        assert_eq!(Clip::new(vec![a.clone()], 0), Err(FrameError::ZeroFps));
        let clip = Clip::new(vec![a.clone(), a], 30_000).unwrap();
        let idx: Vec<usize> = clip.frames().iter().map(Frame::index).collect();
        assert_eq!(idx, vec![0, 1]);
    }

    #[test]
    fn duration_from_fps() {
        let f = px(Rgb::BLACK);
        let clip = Clip::new(vec![f; 210], 30_000).unwrap();
        assert_eq!(clip.duration_ms(), 7_000);
    }

    #[test]
    fn resize_identity() {
        let mut f = Frame::filled(3, 2, Rgb(1, 2, 3)).unwrap();
        f.set_pixel(1, 1, Rgb(200, 100, 50));
        assert_eq!(resize_bilinear(&f, 3, 2), f);
    }

    #[test]
    fn resize_ramp_is_monotone() {
        let mut f = Frame::filled(2, 1, Rgb::BLACK).unwrap();
        f.set_pixel(1, 0, Rgb(255, 255, 255));
        let r = resize_bilinear(&f, 4, 1);
        let row: Vec<u8> = (0..4).map(|x| r.pixel(x, 0).0).collect();
        assert!(row.windows(2).all(|w| w[0] <= w[1]), "{row:?}");
        assert_eq!(row[0], 0);
        assert_eq!(row[3], 255);
    }

    #[test]
    fn resize_constant() {
        let f = Frame::filled(8, 8, Rgb(17, 130, 250)).unwrap();
        let r = resize_bilinear(&f, 3, 5);
        assert_eq!(r.dims(), (3, 5));
        assert!(r.pixels().chunks(3).all(|p| p == [17, 130, 250]));
    }

    fn arb_frame() -> impl Strategy<Value = Frame> {
        (1usize..=12, 1usize..=12).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<u8>(), w * h * 3)
                .prop_map(move |p| Frame::new(w, h, p).unwrap())
        })
    }

    proptest! {
        #[test]
        fn gray_of_neutral_pixel(v in any::<u8>()) {
            let g = to_grayscale(&px(Rgb(v, v, v))).get(0, 0);
            prop_assert!((g - v as f64 / 255.0).abs() <= 1e-9);
            prop_assert!((0.0..=1.0).contains(&g));
        }

        #[test]
        fn resize_stays_in_channel_range(f in arb_frame(), w in 1usize..=20, h in 1usize..=20) {
            let r = resize_bilinear(&f, w, h);
            prop_assert_eq!(r.dims(), (w, h));
            for c in 0..3 {
                let src = f.pixels().iter().skip(c).step_by(3);
                let lo = *src.clone().min().unwrap();
                let hi = *src.max().unwrap();
                for &v in r.pixels().iter().skip(c).step_by(3) {
                    prop_assert!(lo <= v && v <= hi);
                }
            }
        }

        #[test]
        fn resize_constant_any(c in any::<(u8, u8, u8)>(), w in 1usize..=9, h in 1usize..=9,
                               nw in 1usize..=17, nh in 1usize..=17) {
            let f = Frame::filled(w, h, Rgb(c.0, c.1, c.2)).unwrap();
            let r = resize_bilinear(&f, nw, nh);
            prop_assert!(r.pixels().chunks(3).all(|p| p == [c.0, c.1, c.2]));
        }
    }
}
