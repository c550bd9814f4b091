//! Deterministic synthetic test images with analytically known edges.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{ComplexImage, EdgeWeightMap};

#[derive(Debug, Error)]
pub enum PhantomError {
    #[error("phantom size must be >= 16, got {0}")]
    TooSmall(usize),
    #[error("piecewise phantom needs at least 2 regions, got {0}")]
    TooFewRegions(usize),
}

// (intensity, a, b, x0, y0, phi_degrees) of the modified Shepp-Logan table
const SHEPP_LOGAN: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0),
    (-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0),
    (-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0),
    (0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0),
    (0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0),
    (0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0),
    (0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0),
];

/// Standard 10-ellipse Shepp-Logan phantom (modified intensities), rasterized
/// at size x size with values clipped to [0, 1]. Real-valued and
/// deterministic.
pub fn shepp_logan(size: usize) -> Result<ComplexImage, PhantomError> {
    if size < 16 {
        return Err(PhantomError::TooSmall(size));
    }
    let mut data = vec![Complex64::new(0.0, 0.0); size * size];
    for r in 0..size {
        // y runs top-down in row order; phantom coordinates have +y up
        let y = 1.0 - 2.0 * (r as f64 + 0.5) / size as f64;
        for c in 0..size {
            let x = 2.0 * (c as f64 + 0.5) / size as f64 - 1.0;
            let mut value = 0.0;
            for &(intensity, a, b, x0, y0, phi_deg) in &SHEPP_LOGAN {
                let phi = phi_deg.to_radians();
                let (sin_p, cos_p) = phi.sin_cos();
                let xr = (x - x0) * cos_p + (y - y0) * sin_p;
                let yr = -(x - x0) * sin_p + (y - y0) * cos_p;
                if xr * xr / (a * a) + yr * yr / (b * b) <= 1.0 {
                    value += intensity;
                }
            }
            data[r * size + c] = Complex64::new(value.clamp(0.0, 1.0), 0.0);
        }
    }
    Ok(ComplexImage::new(size, size, data).expect("valid by construction"))
}

#[derive(Clone, Copy)]
enum Shape {
    Rect {
        r0: usize,
        c0: usize,
        r1: usize,
        c1: usize,
    },
    Ellipse {
        rc: f64,
        cc: f64,
        ra: f64,
        ca: f64,
    },
}

impl Shape {
    fn contains(&self, r: usize, c: usize) -> bool {
        match *self {
            Shape::Rect { r0, c0, r1, c1 } => r >= r0 && r <= r1 && c >= c0 && c <= c1,
            Shape::Ellipse { rc, cc, ra, ca } => {
                let dr = (r as f64 - rc) / ra;
                let dc = (c as f64 - cc) / ca;
                dr * dr + dc * dc <= 1.0
            }
        }
    }
}

/// Piecewise-constant phantom of `regions - 1` randomly placed rectangles
/// and ellipses over a zero background, with the exact oracle edge map:
/// 1 on the inner perimeter of each visible region, 0 elsewhere. Later
/// shapes paint over earlier ones. Deterministic in `seed`.
pub fn piecewise_phantom(
    size: usize,
    regions: usize,
    seed: u64,
) -> Result<(ComplexImage, EdgeWeightMap), PhantomError> {
    if size < 16 {
        return Err(PhantomError::TooSmall(size));
    }
    if regions < 2 {
        return Err(PhantomError::TooFewRegions(regions));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = regions - 1;
    // keep shapes away from the image border so periodic wrap sees no seam
    let margin = (size / 16).max(2);

    // label 0 = background, k = shape k (painter's order)
    let mut labels = vec![0usize; size * size];
    for k in 1..=shapes {
        let shape = if rng.gen_bool(0.5) {
            let h = rng.gen_range(size / 8..size / 2);
            let w = rng.gen_range(size / 8..size / 2);
            let r0 = rng.gen_range(margin..size - margin - h);
            let c0 = rng.gen_range(margin..size - margin - w);
            Shape::Rect {
                r0,
                c0,
                r1: r0 + h,
                c1: c0 + w,
            }
        } else {
            let ra = rng.gen_range(size as f64 / 12.0..size as f64 / 5.0);
            let ca = rng.gen_range(size as f64 / 12.0..size as f64 / 5.0);
            let rc = rng.gen_range(margin as f64 + ra..size as f64 - margin as f64 - ra);
            let cc = rng.gen_range(margin as f64 + ca..size as f64 - margin as f64 - ca);
            Shape::Ellipse { rc, cc, ra, ca }
        };
        for r in 0..size {
            for c in 0..size {
                if shape.contains(r, c) {
                    labels[r * size + c] = k;
                }
            }
        }
    }

    // distinct intensities: background 0, shape k at k / shapes
    let mut data = vec![Complex64::new(0.0, 0.0); size * size];
    for (v, &label) in data.iter_mut().zip(&labels) {
        *v = Complex64::new(label as f64 / shapes as f64, 0.0);
    }

    // oracle edges: region pixels whose 4-neighborhood (periodic) leaves the
    // region
    let mut edges = vec![0.0; size * size];
    for r in 0..size {
        for c in 0..size {
            let label = labels[r * size + c];
            if label == 0 {
                continue;
            }
            let neighbors = [
                labels[((r + size - 1) % size) * size + c],
                labels[((r + 1) % size) * size + c],
                labels[r * size + (c + size - 1) % size],
                labels[r * size + (c + 1) % size],
            ];
            if neighbors.iter().any(|&n| n != label) {
                edges[r * size + c] = 1.0;
            }
        }
    }

    Ok((
        ComplexImage::new(size, size, data).expect("valid by construction"),
        EdgeWeightMap::new(size, size, edges).expect("binary map"),
    ))
}

/// Multiply by a smooth linear phase ramp so the image becomes genuinely
/// complex-valued while keeping its magnitude.
pub fn add_phase_ramp(image: &ComplexImage) -> ComplexImage {
    let (h, w) = (image.height(), image.width());
    let data = image
        .data()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (r, c) = (i / w, i % w);
            let phase =
                std::f64::consts::PI * (r as f64 / h as f64 + c as f64 / w as f64) * 0.5;
            v * Complex64::from_polar(1.0, phase)
        })
        .collect();
    ComplexImage::new(h, w, data).expect("unit-modulus factor keeps values finite")
}
