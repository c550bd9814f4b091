//! Centered, orthonormal 2D Fourier operators and the data-consistency step.
//!
//! Both directions scale by 1/sqrt(MN), so the transform is unitary and the
//! zero-frequency sample sits at (height/2, width/2) of the stored grid.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::{ComplexImage, GridError, KSpaceGrid, SamplingMask};

/// Configuration of the data-consistency gradient step.
#[derive(Debug, Clone, Copy)]
pub struct DcConfig {
    /// Step size. 1.0 is the natural choice under the unitary transform.
    pub gamma: f64,
}

impl Default for DcConfig {
    fn default() -> Self {
        Self { gamma: 1.0 }
    }
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap();
    cache
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// index i of the shifted array takes value from index (i + offset) mod n
fn rotate(data: &[Complex64], height: usize, width: usize, roff: usize, coff: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for r in 0..height {
        let src_r = (r + roff) % height;
        for c in 0..width {
            let src_c = (c + coff) % width;
            out[r * width + c] = data[src_r * width + src_c];
        }
    }
    out
}

fn fftshift(data: &[Complex64], height: usize, width: usize) -> Vec<Complex64> {
    // moves index 0 to floor(n/2): shifted[i] = x[(i + ceil(n/2)) mod n]
    rotate(data, height, width, height.div_ceil(2), width.div_ceil(2))
}

fn ifftshift(data: &[Complex64], height: usize, width: usize) -> Vec<Complex64> {
    rotate(data, height, width, height / 2, width / 2)
}

fn fft2_inplace(data: &mut [Complex64], height: usize, width: usize, inverse: bool) {
    let row_fft = plan(width, inverse);
    for row in data.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let col_fft = plan(height, inverse);
    let mut col = vec![Complex64::new(0.0, 0.0); height];
    for c in 0..width {
        for r in 0..height {
            col[r] = data[r * width + c];
        }
        col_fft.process(&mut col);
        for r in 0..height {
            data[r * width + c] = col[r];
        }
    }
}

fn transform(data: &[Complex64], height: usize, width: usize, inverse: bool) -> Vec<Complex64> {
    let mut work = ifftshift(data, height, width);
    fft2_inplace(&mut work, height, width, inverse);
    let scale = 1.0 / ((height * width) as f64).sqrt();
    for v in work.iter_mut() {
        *v *= scale;
    }
    fftshift(&work, height, width)
}

/// Unitary 2D DFT with the zero-frequency sample at the grid center.
pub fn fft2_centered(image: &ComplexImage) -> KSpaceGrid {
    let data = transform(image.data(), image.height(), image.width(), false);
    KSpaceGrid::new(image.height(), image.width(), data).expect("transform preserves shape")
}

/// Exact inverse and adjoint of [`fft2_centered`].
pub fn ifft2_centered(kspace: &KSpaceGrid) -> ComplexImage {
    let data = transform(kspace.data(), kspace.height(), kspace.width(), true);
    ComplexImage::new(kspace.height(), kspace.width(), data).expect("transform preserves shape")
}

fn check_shape(
    ah: usize,
    aw: usize,
    bh: usize,
    bw: usize,
) -> Result<(), GridError> {
    if ah != bh || aw != bw {
        return Err(GridError::LengthMismatch {
            height: ah,
            width: aw,
            found: bh * bw,
        });
    }
    Ok(())
}

/// Element-wise mask application; unsampled locations become exactly zero.
pub fn apply_mask(kspace: &KSpaceGrid, mask: &SamplingMask) -> Result<KSpaceGrid, GridError> {
    check_shape(kspace.height(), kspace.width(), mask.height(), mask.width())?;
    let data = kspace
        .data()
        .iter()
        .zip(mask.cells())
        .map(|(v, &c)| {
            if c == 1 {
                *v
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(KSpaceGrid::new(kspace.height(), kspace.width(), data).expect("shape preserved"))
}

/// One gradient step on the data-consistency term:
/// x + gamma * F^H (M (y - M F x)).
pub fn dc_gradient_step(
    x: &ComplexImage,
    y: &KSpaceGrid,
    mask: &SamplingMask,
    cfg: &DcConfig,
) -> Result<ComplexImage, GridError> {
    check_shape(x.height(), x.width(), y.height(), y.width())?;
    check_shape(x.height(), x.width(), mask.height(), mask.width())?;
    let fx = fft2_centered(x);
    let mut residual = Vec::with_capacity(fx.data().len());
    for ((fv, yv), &c) in fx.data().iter().zip(y.data()).zip(mask.cells()) {
        if c == 1 {
            residual.push(yv - fv);
        } else {
            residual.push(Complex64::new(0.0, 0.0));
        }
    }
    let residual = KSpaceGrid::new(x.height(), x.width(), residual).expect("shape preserved");
    let correction = ifft2_centered(&residual);
    let data = x
        .data()
        .iter()
        .zip(correction.data())
        .map(|(xv, cv)| xv + cfg.gamma * cv)
        .collect();
    Ok(ComplexImage::new(x.height(), x.width(), data).expect("shape preserved"))
}
