//! Undecimated (stationary) 2D Haar transform, normalized as a Parseval
//! tight frame: the backward transform is the exact adjoint and exact left
//! inverse of the forward transform.
//!
//! Each decomposition level uses the a-trous scheme with filter spacing
//! 2^(level-1) and periodic wrap, so every sub-band stays pixel-aligned with
//! the source image. Sub-band order: (lh, hl, hh) per level from finest to
//! coarsest, then the final approximation band; 3*levels + 1 grids total.

use num_complex::Complex64;

use crate::grid::{ComplexImage, GridError};

/// Stack of per-pixel sub-band coefficient grids.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCoeffs {
    height: usize,
    width: usize,
    levels: usize,
    subbands: Vec<Vec<Complex64>>,
}

impl FrameCoeffs {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn subbands(&self) -> &[Vec<Complex64>] {
        &self.subbands
    }

    pub fn subbands_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.subbands
    }

    /// l2 norm over all sub-bands.
    pub fn norm2(&self) -> f64 {
        self.subbands
            .iter()
            .flatten()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// One full analysis level with filter spacing `d`: the separable column and
/// row passes are fused so each input pixel is read once per role. With
/// a = x[r,c], b = x[r,c+d], p = x[r+d,c], q = x[r+d,c+d] (periodic):
/// ll = (a+b+p+q)/4, lh = (a+b-p-q)/4, hl = (a-b+p-q)/4, hh = (a-b-p+q)/4.
/// Loops split at the wrap point to keep the hot path free of modulo
/// arithmetic.
#[allow(clippy::type_complexity)]
fn analyze_level(
    data: &[Complex64],
    height: usize,
    width: usize,
    d: usize,
) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let n = data.len();
    let mut ll = Vec::with_capacity(n);
    let mut lh = Vec::with_capacity(n);
    let mut hl = Vec::with_capacity(n);
    let mut hh = Vec::with_capacity(n);
    for r in 0..height {
        let r2 = if r + d < height { r + d } else { r + d - height };
        let top = &data[r * width..(r + 1) * width];
        let bot = &data[r2 * width..(r2 + 1) * width];
        let mut emit = |c: usize, cd: usize| {
            let (sab, dab) = (top[c] + top[cd], top[c] - top[cd]);
            let (spq, dpq) = (bot[c] + bot[cd], bot[c] - bot[cd]);
            ll.push(0.25 * (sab + spq));
            lh.push(0.25 * (sab - spq));
            hl.push(0.25 * (dab + dpq));
            hh.push(0.25 * (dab - dpq));
        };
        for c in 0..width - d {
            emit(c, c + d);
        }
        for c in width - d..width {
            emit(c, c + d - width);
        }
    }
    (ll, lh, hl, hh)
}

/// Adjoint of [`analyze_level`]: row synthesis into two scratch rows, then
/// column synthesis, without materializing the intermediate low/high planes.
fn synthesize_level(
    ll: &[Complex64],
    lh: &[Complex64],
    hl: &[Complex64],
    hh: &[Complex64],
    height: usize,
    width: usize,
    d: usize,
) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(ll.len());
    let mut lrow = vec![Complex64::new(0.0, 0.0); width];
    let mut hrow = vec![Complex64::new(0.0, 0.0); width];
    for r in 0..height {
        let rp = if r >= d { r - d } else { r + height - d };
        let (a, b) = (r * width, rp * width);
        for c in 0..width {
            lrow[c] = 0.5 * (ll[a + c] + ll[b + c]) + 0.5 * (lh[a + c] - lh[b + c]);
            hrow[c] = 0.5 * (hl[a + c] + hl[b + c]) + 0.5 * (hh[a + c] - hh[b + c]);
        }
        for c in 0..d {
            let cp = c + width - d;
            out.push(0.5 * (lrow[c] + lrow[cp]) + 0.5 * (hrow[c] - hrow[cp]));
        }
        for c in d..width {
            let cp = c - d;
            out.push(0.5 * (lrow[c] + lrow[cp]) + 0.5 * (hrow[c] - hrow[cp]));
        }
    }
    out
}

/// Forward tight-frame transform (analysis operator P).
pub fn frame_forward(image: &ComplexImage, levels: usize) -> Result<FrameCoeffs, GridError> {
    if levels == 0 {
        return Err(GridError::EmptyDimension);
    }
    let (height, width) = (image.height(), image.width());
    let stride = 1usize << levels;
    if height % stride != 0 || width % stride != 0 {
        return Err(GridError::LengthMismatch {
            height,
            width,
            found: stride,
        });
    }
    let mut subbands = Vec::with_capacity(3 * levels + 1);
    let mut approx = image.data().to_vec();
    for level in 0..levels {
        let d = 1usize << level;
        let (ll, lh, hl, hh) = analyze_level(&approx, height, width, d);
        subbands.push(lh);
        subbands.push(hl);
        subbands.push(hh);
        approx = ll;
    }
    subbands.push(approx);
    Ok(FrameCoeffs {
        height,
        width,
        levels,
        subbands,
    })
}

/// Backward transform (synthesis operator Q = P^H). Exact left inverse of
/// [`frame_forward`].
pub fn frame_backward(coeffs: &FrameCoeffs) -> Result<ComplexImage, GridError> {
    if coeffs.subbands.len() != 3 * coeffs.levels + 1 {
        return Err(GridError::LengthMismatch {
            height: coeffs.height,
            width: coeffs.width,
            found: coeffs.subbands.len(),
        });
    }
    let (height, width) = (coeffs.height, coeffs.width);
    let mut approx = coeffs.subbands[3 * coeffs.levels].clone();
    for level in (0..coeffs.levels).rev() {
        let d = 1usize << level;
        let lh = &coeffs.subbands[3 * level];
        let hl = &coeffs.subbands[3 * level + 1];
        let hh = &coeffs.subbands[3 * level + 2];
        approx = synthesize_level(&approx, lh, hl, hh, height, width, d);
    }
    ComplexImage::new(height, width, approx)
}
