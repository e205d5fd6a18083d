//! Grid layout selection and SUPER IMAGE composition.
//!
//! A layout of `rows x cols` cells, each `cell_w x cell_h`, is scored by
//! `|ln((cols * cell_w) / (rows * cell_h))|`, so a composite of aspect 2 and
//! one of aspect 1/2 are equally far from square. Layouts that would leave a
//! whole row empty are never considered.

use alloc::vec::Vec;

use crate::flow::FlowParams;
use crate::frame::{resize_bilinear, Clip, Frame, Rgb};
use crate::sampling::{sample, SampleError, SamplerSpec};
use crate::ErrorName;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SuperImageError {
    #[error("no frames to compose")]
    Empty,
    #[error("layout {rows}x{cols} cannot hold {k} frames")]
    LayoutTooSmall { rows: usize, cols: usize, k: usize },
    #[error("layout {rows}x{cols} with {pad} pad cells does not fit {k} frames")]
    LayoutMismatch {
        rows: usize,
        cols: usize,
        pad: usize,
        k: usize,
    },
    #[error("frame {index} does not match the cell size")]
    MixedDimensions { index: usize },
    #[error("cell dimensions must be nonzero")]
    ZeroCell,
    #[error(transparent)]
    Sample(#[from] SampleError),
}

impl ErrorName for SuperImageError {
    fn name(&self) -> &'static str {
        match self {
            SuperImageError::Empty => "Empty",
            SuperImageError::LayoutTooSmall { .. } => "LayoutTooSmall",
            SuperImageError::LayoutMismatch { .. } => "LayoutMismatch",
            SuperImageError::MixedDimensions { .. } => "MixedDimensions",
            SuperImageError::ZeroCell => "ZeroCell",
            SuperImageError::Sample(e) => e.name(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridLayout {
    pub rows: usize,
    pub cols: usize,
    /// Unused trailing cells; always fewer than `cols`.
    pub pad_cells: usize,
}

impl GridLayout {
    /// A layout for `k` frames, rejecting grids that are too small or that
    /// would leave a full row empty.
    pub fn for_count(rows: usize, cols: usize, k: usize) -> Result<Self, SuperImageError> {
        if k == 0 {
            return Err(SuperImageError::Empty);
        }
        let cells = rows.saturating_mul(cols);
        if rows == 0 || cols == 0 || cells < k {
            return Err(SuperImageError::LayoutTooSmall { rows, cols, k });
        }
        let pad = cells - k;
        if pad >= cols {
            return Err(SuperImageError::LayoutMismatch { rows, cols, pad, k });
        }
        Ok(GridLayout {
            rows,
            cols,
            pad_cells: pad,
        })
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    pub fn frame_count(&self) -> usize {
        self.cells() - self.pad_cells
    }

    /// `|ln(composite width / composite height)|`.
    pub fn aspect_score(&self, cell_w: usize, cell_h: usize) -> f64 {
        let w = (self.cols * cell_w) as f64;
        let h = (self.rows * cell_h) as f64;
        libm::fabs(libm::log(w) - libm::log(h))
    }

    /// Composite aspect folded to `>= 1`, as an exact fraction `(num, den)`.
    fn folded_aspect(&self, cell_w: usize, cell_h: usize) -> (u128, u128) {
        let w = self.cols as u128 * cell_w as u128;
        let h = self.rows as u128 * cell_h as u128;
        (w.max(h), w.min(h))
    }
}

/// The most nearly square feasible layout for `k` cells of `cell_w x cell_h`.
///
/// Every `rows, cols <= k` that holds `k` frames without a whole empty row is
/// a candidate. Ties go to fewer cells, then fewer rows. Comparisons are done
/// on exact integer ratios.
///
/// # Panics
/// If any argument is zero.
pub fn choose_grid(k: usize, cell_w: usize, cell_h: usize) -> GridLayout {
    assert!(
        k >= 1 && cell_w >= 1 && cell_h >= 1,
        "choose_grid needs positive arguments"
    );
    let mut best: Option<GridLayout> = None;
    let candidates = (1..=k).flat_map(|rows| (k.div_ceil(rows)..=k).map(move |cols| (rows, cols)));
    for (rows, cols) in candidates {
        let Ok(candidate) = GridLayout::for_count(rows, cols, k) else {
            continue;
        };
        let better = match best {
            None => true,
            Some(cur) => {
                let (an, ad) = candidate.folded_aspect(cell_w, cell_h);
                let (bn, bd) = cur.folded_aspect(cell_w, cell_h);
                // an/ad vs bn/bd; both sides stay below 2^128 for realistic inputs.
                let lhs = an.saturating_mul(bd);
                let rhs = bn.saturating_mul(ad);
                lhs < rhs
                    || (lhs == rhs && (candidate.cells(), candidate.rows) < (cur.cells(), cur.rows))
            }
        };
        if better {
            best = Some(candidate);
        }
    }
    best.expect("a single column always fits")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperImage {
    pub image: Frame,
    pub layout: GridLayout,
    /// Source ordinals of the placed frames, in placement order.
    pub source_indices: Vec<usize>,
    pub cell_w: usize,
    pub cell_h: usize,
}

/// Tiles `frames` row-major into `layout`; unused cells are `fill`.
pub fn compose(
    frames: &[Frame],
    layout: GridLayout,
    fill: Rgb,
) -> Result<SuperImage, SuperImageError> {
    let first = frames.first().ok_or(SuperImageError::Empty)?;
    let k = frames.len();
    if layout.cells() < k {
        return Err(SuperImageError::LayoutTooSmall {
            rows: layout.rows,
            cols: layout.cols,
            k,
        });
    }
    if layout.frame_count() != k {
        return Err(SuperImageError::LayoutMismatch {
            rows: layout.rows,
            cols: layout.cols,
            pad: layout.pad_cells,
            k,
        });
    }
    let (cell_w, cell_h) = first.dims();
    if let Some(index) = frames.iter().position(|f| f.dims() != (cell_w, cell_h)) {
        return Err(SuperImageError::MixedDimensions { index });
    }

    let width = layout.cols * cell_w;
    let mut image =
        Frame::filled(width, layout.rows * cell_h, fill).expect("nonzero composite dimensions");
    let row_bytes = cell_w * 3;
    let out = image.pixels_mut();
    for (t, frame) in frames.iter().enumerate() {
        let (i, j) = (t / layout.cols, t % layout.cols);
        for y in 0..cell_h {
            let dst = ((i * cell_h + y) * width + j * cell_w) * 3;
            out[dst..dst + row_bytes]
                .copy_from_slice(&frame.pixels()[y * row_bytes..(y + 1) * row_bytes]);
        }
    }
    Ok(SuperImage {
        image,
        layout,
        source_indices: frames.iter().map(Frame::index).collect(),
        cell_w,
        cell_h,
    })
}

/// Sample, optionally rescale each selected frame, lay out and compose on black.
pub fn build_super_image(
    clip: &Clip,
    spec: &SamplerSpec,
    cell_scale: Option<(usize, usize)>,
    flow: &FlowParams,
) -> Result<SuperImage, SuperImageError> {
    if matches!(cell_scale, Some((0, _)) | Some((_, 0))) {
        return Err(SuperImageError::ZeroCell);
    }
    let picked = sample(clip, spec, flow)?;
    let frames: Vec<Frame> = picked
        .indices
        .iter()
        .map(|&i| {
            let f = &clip.frames()[i];
            match cell_scale {
                Some((w, h)) => resize_bilinear(f, w, h),
                None => f.clone(),
            }
        })
        .collect();
    let (cell_w, cell_h) = frames[0].dims();
    let layout = choose_grid(frames.len(), cell_w, cell_h);
    compose(&frames, layout, Rgb::BLACK)
}
