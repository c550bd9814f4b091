//! Point-wise soft-thresholding of frame coefficients, either uniform or
//! weighted by a per-pixel edge map.
//!
//! The weighted operator shrinks coefficient i by lambda*gamma / (w_i + eps):
//! points on an edge (w near 1) get a small threshold, smooth regions (w near
//! 0) a large one. Complex coefficients are shrunk in magnitude with phase
//! preserved.

use num_complex::Complex64;

use crate::frame::FrameCoeffs;
use crate::grid::{EdgeWeightMap, GridError};

#[derive(Debug, Clone, Copy)]
pub struct ThresholdConfig {
    pub lambda: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            gamma: 1.0,
            epsilon: 0.1,
        }
    }
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<(), GridError> {
        if self.lambda < 0.0 || self.gamma <= 0.0 || self.epsilon <= 0.0 {
            return Err(GridError::NonFinite(0));
        }
        Ok(())
    }
}

#[inline]
pub fn soft_threshold_scalar(alpha: Complex64, threshold: f64) -> Complex64 {
    let nsq = alpha.norm_sqr();
    if nsq <= threshold * threshold {
        Complex64::new(0.0, 0.0)
    } else {
        let mag = nsq.sqrt();
        alpha * ((mag - threshold) / mag)
    }
}

/// In-place edge-weighted soft-thresholding: threshold lambda*gamma/(w_i + eps)
/// per pixel, shared across sub-bands at the same pixel.
pub fn soft_threshold_weighted_mut(
    coeffs: &mut FrameCoeffs,
    weights: &EdgeWeightMap,
    cfg: &ThresholdConfig,
) -> Result<(), GridError> {
    if weights.height() != coeffs.height() || weights.width() != coeffs.width() {
        return Err(GridError::LengthMismatch {
            height: coeffs.height(),
            width: coeffs.width(),
            found: weights.height() * weights.width(),
        });
    }
    let lg = cfg.lambda * cfg.gamma;
    // per-pixel thresholds are shared across sub-bands; compute them once
    let thresholds: Vec<f64> = weights
        .weights()
        .iter()
        .map(|w| lg / (w + cfg.epsilon))
        .collect();
    for band in coeffs.subbands_mut() {
        for (v, &t) in band.iter_mut().zip(&thresholds) {
            *v = soft_threshold_scalar(*v, t);
        }
    }
    Ok(())
}

/// Copying variant of [`soft_threshold_weighted_mut`].
pub fn soft_threshold_weighted(
    coeffs: &FrameCoeffs,
    weights: &EdgeWeightMap,
    cfg: &ThresholdConfig,
) -> Result<FrameCoeffs, GridError> {
    let mut out = coeffs.clone();
    soft_threshold_weighted_mut(&mut out, weights, cfg)?;
    Ok(out)
}

/// In-place uniform soft-thresholding with threshold lambda*gamma everywhere.
pub fn soft_threshold_uniform_mut(coeffs: &mut FrameCoeffs, cfg: &ThresholdConfig) {
    let lg = cfg.lambda * cfg.gamma;
    for band in coeffs.subbands_mut() {
        for v in band.iter_mut() {
            *v = soft_threshold_scalar(*v, lg);
        }
    }
}

/// Copying variant of [`soft_threshold_uniform_mut`].
pub fn soft_threshold_uniform(coeffs: &FrameCoeffs, cfg: &ThresholdConfig) -> FrameCoeffs {
    let mut out = coeffs.clone();
    soft_threshold_uniform_mut(&mut out, cfg);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::frame_forward;
    use crate::grid::ComplexImage;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn coeffs_from(values: &[Complex64]) -> FrameCoeffs {
        // 2x2 image, one level: 4 sub-bands. Build via forward transform and
        // overwrite the bands with the requested values.
        let img = ComplexImage::zeros(2, 2).unwrap();
        let mut c = frame_forward(&img, 1).unwrap();
        for band in c.subbands_mut() {
            for (v, val) in band.iter_mut().zip(values.iter().cycle()) {
                *v = *val;
            }
        }
        c
    }

    fn cfg(lambda: f64, gamma: f64, epsilon: f64) -> ThresholdConfig {
        ThresholdConfig {
            lambda,
            gamma,
            epsilon,
        }
    }

    #[test]
    fn zero_coefficient_stays_zero() {
        let c = coeffs_from(&[Complex64::new(0.0, 0.0)]);
        let w = EdgeWeightMap::constant(2, 2, 0.0).unwrap();
        let out = soft_threshold_weighted(&c, &w, &cfg(0.11, 1.0, 0.1)).unwrap();
        for band in out.subbands() {
            for v in band {
                assert_eq!(*v, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn edge_point_hand_case() {
        // alpha = 0.5, lambda*gamma = 0.11, w = 1, eps = 0.1:
        // threshold 0.11/1.1 = 0.1, output 0.4
        let c = coeffs_from(&[Complex64::new(0.5, 0.0)]);
        let w = EdgeWeightMap::constant(2, 2, 1.0).unwrap();
        let out = soft_threshold_weighted(&c, &w, &cfg(0.11, 1.0, 0.1)).unwrap();
        for band in out.subbands() {
            for v in band {
                assert!((v.re - 0.4).abs() < 1e-15);
                assert_eq!(v.im, 0.0);
            }
        }
    }

    #[test]
    fn smooth_point_shrunk_to_zero() {
        // w = 0: threshold 0.11/0.1 = 1.1 > |alpha| = 0.5 -> exactly 0
        let c = coeffs_from(&[Complex64::new(0.5, 0.0)]);
        let w = EdgeWeightMap::constant(2, 2, 0.0).unwrap();
        let out = soft_threshold_weighted(&c, &w, &cfg(0.11, 1.0, 0.1)).unwrap();
        for band in out.subbands() {
            for v in band {
                assert_eq!(*v, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn complex_phase_preserved() {
        // alpha = 0.3 + 0.4i (|alpha| = 0.5), w = 1: output 0.24 + 0.32i
        let c = coeffs_from(&[Complex64::new(0.3, 0.4)]);
        let w = EdgeWeightMap::constant(2, 2, 1.0).unwrap();
        let out = soft_threshold_weighted(&c, &w, &cfg(0.11, 1.0, 0.1)).unwrap();
        for band in out.subbands() {
            for v in band {
                assert!((v.re - 0.24).abs() < 1e-15);
                assert!((v.im - 0.32).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn uniform_zero_lambda_is_identity() {
        let c = coeffs_from(&[Complex64::new(0.5, -0.3), Complex64::new(-1.0, 2.0)]);
        let out = soft_threshold_uniform(&c, &cfg(0.0, 1.0, 0.1));
        assert_eq!(out, c);
    }

    #[test]
    fn uniform_magnitude_formula() {
        let c = coeffs_from(&[Complex64::new(0.6, 0.8), Complex64::new(0.05, 0.0)]);
        let out = soft_threshold_uniform(&c, &cfg(0.2, 1.0, 0.1));
        for (band_in, band_out) in c.subbands().iter().zip(out.subbands()) {
            for (a, t) in band_in.iter().zip(band_out) {
                let expect = (a.norm() - 0.2).max(0.0);
                assert!((t.norm() - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn uniform_matches_weighted_constant_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let vals: Vec<Complex64> = (0..4)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let c = coeffs_from(&vals);
        let w0 = 0.4;
        let eps = 0.1;
        let lg = 0.15;
        let w = EdgeWeightMap::constant(2, 2, w0).unwrap();
        let weighted = soft_threshold_weighted(&c, &w, &cfg(lg, 1.0, eps)).unwrap();
        let uniform = soft_threshold_uniform(&c, &cfg(lg / (w0 + eps), 1.0, eps));
        for (a, b) in weighted
            .subbands()
            .iter()
            .flatten()
            .zip(uniform.subbands().iter().flatten())
        {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn contraction_lipschitz_and_weight_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let a = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let b = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let thr = rng.gen_range(0.0..1.0);
            let ta = soft_threshold_scalar(a, thr);
            let tb = soft_threshold_scalar(b, thr);
            assert!(ta.norm() <= a.norm() + 1e-15);
            assert!((ta - tb).norm() <= (a - b).norm() + 1e-12);
            // larger weight -> smaller threshold -> larger output magnitude
            let lg = 0.1;
            let (w1, w2) = (rng.gen_range(0.0..0.5), rng.gen_range(0.5..1.0));
            let o1 = soft_threshold_scalar(a, lg / (w1 + 0.1));
            let o2 = soft_threshold_scalar(a, lg / (w2 + 0.1));
            assert!(o2.norm() >= o1.norm() - 1e-15);
            // phase preserved when nonzero
            if ta.norm() > 0.0 {
                let cross = ta * a.conj();
                assert!(cross.im.abs() <= 1e-12 * cross.re.abs().max(1e-30));
                assert!(cross.re >= 0.0);
            }
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let c = coeffs_from(&[Complex64::new(1.0, 0.0)]);
        let w = EdgeWeightMap::constant(3, 3, 0.5).unwrap();
        assert!(soft_threshold_weighted(&c, &w, &ThresholdConfig::default()).is_err());
    }
}
