//! Reproducible k-space undersampling mask generators.
//!
//! Both generators fully sample a low-frequency center region and fill the
//! remaining budget uniformly at random without replacement, driven by a
//! seeded ChaCha stream so masks are bit-reproducible across platforms.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{GridError, MaskKind, SamplingMask};

#[derive(Debug, Error)]
pub enum MaskError {
    #[error("acceleration factor must be >= 1, got {0}")]
    BadAcceleration(f64),
    #[error("sampling rate must lie in (0, 1], got {0}")]
    BadRate(f64),
    #[error("center fraction must lie in [0, 1), got {0}")]
    BadCenterFraction(f64),
    #[error("sample budget {budget} is smaller than the center block ({center})")]
    BudgetTooSmall { budget: usize, center: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// 1D Cartesian mask: fully sampled phase-encode columns.
///
/// Samples the central ceil(center_fraction * width) columns plus uniformly
/// random others so that exactly round(width / acceleration) columns are
/// sampled in total.
pub fn cartesian_mask(
    height: usize,
    width: usize,
    acceleration: f64,
    center_fraction: f64,
    seed: u64,
) -> Result<SamplingMask, MaskError> {
    if height == 0 || width == 0 {
        return Err(MaskError::Grid(GridError::EmptyDimension));
    }
    if !(acceleration >= 1.0) || !acceleration.is_finite() {
        return Err(MaskError::BadAcceleration(acceleration));
    }
    if !(0.0..1.0).contains(&center_fraction) {
        return Err(MaskError::BadCenterFraction(center_fraction));
    }
    let budget = (width as f64 / acceleration).round() as usize;
    let center = (center_fraction * width as f64).ceil() as usize;
    if budget < center {
        return Err(MaskError::BudgetTooSmall { budget, center });
    }
    let center_start = (width - center) / 2;
    let mut sampled = vec![false; width];
    for col in sampled.iter_mut().skip(center_start).take(center) {
        *col = true;
    }
    let candidates: Vec<usize> = (0..width).filter(|&c| !sampled[c]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &c in candidates.choose_multiple(&mut rng, budget - center) {
        sampled[c] = true;
    }
    let mut cells = vec![0u8; height * width];
    for r in 0..height {
        for c in 0..width {
            if sampled[c] {
                cells[r * width + c] = 1;
            }
        }
    }
    Ok(SamplingMask::new(
        height,
        width,
        cells,
        MaskKind::Cartesian1d,
        seed,
        budget as f64 / width as f64,
    )?)
}

/// 2D random mask: a fully sampled central square of side
/// ceil(center_fraction * min(height, width)) plus uniformly random points,
/// floor(rate * height * width) samples in total.
pub fn random2d_mask(
    height: usize,
    width: usize,
    rate: f64,
    center_fraction: f64,
    seed: u64,
) -> Result<SamplingMask, MaskError> {
    if height == 0 || width == 0 {
        return Err(MaskError::Grid(GridError::EmptyDimension));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(MaskError::BadRate(rate));
    }
    if !(0.0..1.0).contains(&center_fraction) {
        return Err(MaskError::BadCenterFraction(center_fraction));
    }
    let total = height * width;
    let budget = (rate * total as f64).floor() as usize;
    let side = (center_fraction * height.min(width) as f64).ceil() as usize;
    let center_count = side * side;
    if budget < center_count {
        return Err(MaskError::BudgetTooSmall {
            budget,
            center: center_count,
        });
    }
    let r0 = (height - side) / 2;
    let c0 = (width - side) / 2;
    let mut cells = vec![0u8; total];
    for r in r0..r0 + side {
        for c in c0..c0 + side {
            cells[r * width + c] = 1;
        }
    }
    let candidates: Vec<usize> = (0..total).filter(|&i| cells[i] == 0).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &i in candidates.choose_multiple(&mut rng, budget - center_count) {
        cells[i] = 1;
    }
    Ok(SamplingMask::new(
        height,
        width,
        cells,
        MaskKind::Random2d,
        seed,
        rate,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_af8_width256_has_32_columns() {
        let mask = cartesian_mask(256, 256, 8.0, 0.04, 1).unwrap();
        let sampled_cols: Vec<usize> = (0..256).filter(|&c| mask.at(0, c) == 1).collect();
        assert_eq!(sampled_cols.len(), 32);
        assert_eq!(mask.ones(), 32 * 256);
        // central ceil(0.04 * 256) = 11 columns are all present
        let start = (256 - 11) / 2;
        for c in start..start + 11 {
            assert!(sampled_cols.contains(&c));
        }
        // every sampled column is fully sampled along the rows
        for &c in &sampled_cols {
            for r in 0..256 {
                assert_eq!(mask.at(r, c), 1);
            }
        }
    }

    #[test]
    fn cartesian_af1_is_full() {
        let mask = cartesian_mask(32, 32, 1.0, 0.0, 9).unwrap();
        assert_eq!(mask.ones(), 32 * 32);
    }

    #[test]
    fn cartesian_seed_determinism() {
        let a = cartesian_mask(64, 64, 6.0, 0.04, 42).unwrap();
        let b = cartesian_mask(64, 64, 6.0, 0.04, 42).unwrap();
        assert_eq!(a.cells(), b.cells());
        let c = cartesian_mask(64, 64, 6.0, 0.04, 43).unwrap();
        assert_ne!(a.cells(), c.cells());
    }

    #[test]
    fn random2d_exact_cardinality() {
        let mask = random2d_mask(256, 256, 0.18, 0.04, 1).unwrap();
        assert_eq!(mask.ones(), 11796); // floor(0.18 * 65536)
        assert!((mask.rate() - 0.18).abs() <= 1.0 / 65536.0);
    }

    #[test]
    fn random2d_rate1_is_full() {
        let mask = random2d_mask(16, 16, 1.0, 0.1, 5).unwrap();
        assert_eq!(mask.ones(), 256);
    }

    #[test]
    fn random2d_center_contained_and_deterministic() {
        let mask = random2d_mask(64, 48, 0.3, 0.1, 7).unwrap();
        let side = (0.1f64 * 48.0).ceil() as usize;
        let r0 = (64 - side) / 2;
        let c0 = (48 - side) / 2;
        for r in r0..r0 + side {
            for c in c0..c0 + side {
                assert_eq!(mask.at(r, c), 1);
            }
        }
        let again = random2d_mask(64, 48, 0.3, 0.1, 7).unwrap();
        assert_eq!(mask.cells(), again.cells());
    }

    #[test]
    fn budget_smaller_than_center_rejected() {
        assert!(matches!(
            cartesian_mask(64, 64, 32.0, 0.2, 0),
            Err(MaskError::BudgetTooSmall { .. })
        ));
        assert!(matches!(
            random2d_mask(64, 64, 0.001, 0.2, 0),
            Err(MaskError::BudgetTooSmall { .. })
        ));
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(matches!(
            cartesian_mask(8, 8, 0.5, 0.0, 0),
            Err(MaskError::BadAcceleration(_))
        ));
        assert!(matches!(
            random2d_mask(8, 8, 0.0, 0.0, 0),
            Err(MaskError::BadRate(_))
        ));
        assert!(matches!(
            random2d_mask(8, 8, 0.5, 1.0, 0),
            Err(MaskError::BadCenterFraction(_))
        ));
    }

    #[test]
    fn randomized_cardinality_contract() {
        for seed in 0..20u64 {
            let af = 2.0 + (seed % 7) as f64;
            let mask = cartesian_mask(32, 96, af, 0.04, seed).unwrap();
            let expect_cols = (96.0 / af).round() as usize;
            assert_eq!(mask.ones(), expect_cols * 32);

            let rate = 0.05 + 0.04 * (seed % 10) as f64;
            let mask = random2d_mask(48, 40, rate, 0.05, seed).unwrap();
            assert_eq!(mask.ones(), (rate * 48.0 * 40.0).floor() as usize);
        }
    }
}
