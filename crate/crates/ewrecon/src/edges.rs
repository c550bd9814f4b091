//! Edge detectors producing per-pixel weight maps in [0, 1].
//!
//! All kernels use periodic boundary handling, consistent with the cyclic
//! image model of the Fourier operators. TV and Sobel responses are
//! max-normalized per image; Canny output is binary.

use std::f64::consts::PI;

use crate::grid::{ComplexImage, EdgeWeightMap, GridError, RealGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    Tv,
    Sobel,
    Canny,
}

impl Detector {
    pub fn as_str(self) -> &'static str {
        match self {
            Detector::Tv => "tv",
            Detector::Sobel => "sobel",
            Detector::Canny => "canny",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DetectorConfig {
    pub detector: Detector,
    /// Canny low threshold, as a fraction of the max gradient magnitude.
    pub canny_low: f64,
    /// Canny high threshold, as a fraction of the max gradient magnitude.
    pub canny_high: f64,
    /// Standard deviation of the Canny pre-smoothing Gaussian, in pixels.
    pub gaussian_sigma: f64,
    /// Thicken the detected edges by a radius-1 dilation.
    pub dilate: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            detector: Detector::Tv,
            canny_low: 0.1,
            canny_high: 0.3,
            gaussian_sigma: 1.0,
            dilate: false,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), GridError> {
        if !(0.0..1.0).contains(&self.canny_low)
            || !(self.canny_high > 0.0 && self.canny_high <= 1.0)
            || self.canny_low >= self.canny_high
            || self.gaussian_sigma <= 0.0
        {
            return Err(GridError::WeightOutOfRange {
                value: self.canny_low,
                index: 0,
            });
        }
        Ok(())
    }
}

/// Element-wise complex magnitude.
pub fn magnitude(image: &ComplexImage) -> RealGrid {
    let data = image.data().iter().map(|v| v.norm()).collect();
    RealGrid::new(image.height(), image.width(), data).expect("magnitude of finite values is finite")
}

fn max_normalize(height: usize, width: usize, mut data: Vec<f64>) -> EdgeWeightMap {
    let max = data.iter().fold(0.0f64, |m, &v| m.max(v));
    if max > 0.0 {
        for v in data.iter_mut() {
            *v /= max;
            // guard against rounding pushing a value just above 1
            *v = v.min(1.0);
        }
    }
    EdgeWeightMap::new(height, width, data).expect("normalized values lie in [0, 1]")
}

/// Gradient magnitude from forward differences with periodic wrap.
pub fn detect_tv(mag: &RealGrid) -> EdgeWeightMap {
    let (h, w) = (mag.height(), mag.width());
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        let rn = (r + 1) % h;
        for c in 0..w {
            let cn = (c + 1) % w;
            let dx = mag.at(r, cn) - mag.at(r, c);
            let dy = mag.at(rn, c) - mag.at(r, c);
            out[r * w + c] = dx.hypot(dy);
        }
    }
    max_normalize(h, w, out)
}

/// Raw Sobel responses (gx, gy) with periodic wrap. gx responds to
/// horizontal intensity changes (vertical edges).
fn sobel_gradients(mag: &RealGrid) -> (Vec<f64>, Vec<f64>) {
    let (h, w) = (mag.height(), mag.width());
    let mut gx = vec![0.0; h * w];
    let mut gy = vec![0.0; h * w];
    for r in 0..h {
        let ru = (r + h - 1) % h;
        let rd = (r + 1) % h;
        for c in 0..w {
            let cl = (c + w - 1) % w;
            let cr = (c + 1) % w;
            let (a, b, cc) = (mag.at(ru, cl), mag.at(ru, c), mag.at(ru, cr));
            let (d, f) = (mag.at(r, cl), mag.at(r, cr));
            let (g, hh, i) = (mag.at(rd, cl), mag.at(rd, c), mag.at(rd, cr));
            gx[r * w + c] = (cc + 2.0 * f + i) - (a + 2.0 * d + g);
            gy[r * w + c] = (g + 2.0 * hh + i) - (a + 2.0 * b + cc);
        }
    }
    (gx, gy)
}

/// Sobel gradient magnitude, max-normalized.
pub fn detect_sobel(mag: &RealGrid) -> EdgeWeightMap {
    let (h, w) = (mag.height(), mag.width());
    let (gx, gy) = sobel_gradients(mag);
    let data = gx.iter().zip(&gy).map(|(x, y)| x.hypot(*y)).collect();
    max_normalize(h, w, data)
}

fn gaussian_smooth(mag: &RealGrid, sigma: f64) -> RealGrid {
    let (h, w) = (mag.height(), mag.width());
    let radius = (3.0 * sigma).ceil() as usize;
    let mut kernel: Vec<f64> = (0..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = kernel[0] + 2.0 * kernel[1..].iter().sum::<f64>();
    for k in kernel.iter_mut() {
        *k /= sum;
    }
    // separable, periodic
    let mut rows = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let mut acc = kernel[0] * mag.at(r, c);
            for (i, k) in kernel.iter().enumerate().skip(1) {
                acc += k * (mag.at(r, (c + i) % w) + mag.at(r, (c + w - i % w) % w));
            }
            rows[r * w + c] = acc;
        }
    }
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let mut acc = kernel[0] * rows[r * w + c];
            for (i, k) in kernel.iter().enumerate().skip(1) {
                acc += k * (rows[((r + i) % h) * w + c] + rows[((r + h - i % h) % h) * w + c]);
            }
            out[r * w + c] = acc;
        }
    }
    RealGrid::new(h, w, out).expect("smoothing preserves finiteness")
}

/// Canny detector: Gaussian smoothing, Sobel gradients, non-maximum
/// suppression along the quantized gradient direction, double threshold
/// (fractions of the max gradient) and hysteresis by 8-connectivity.
/// Output values are exactly 0 or 1.
pub fn detect_canny(mag: &RealGrid, cfg: &DetectorConfig) -> Result<EdgeWeightMap, GridError> {
    cfg.validate()?;
    let (h, w) = (mag.height(), mag.width());
    let smoothed = gaussian_smooth(mag, cfg.gaussian_sigma);
    let (gx, gy) = sobel_gradients(&smoothed);
    let g: Vec<f64> = gx.iter().zip(&gy).map(|(x, y)| x.hypot(*y)).collect();
    let gmax = g.iter().fold(0.0f64, |m, &v| m.max(v));
    if gmax == 0.0 {
        return EdgeWeightMap::new(h, w, vec![0.0; h * w]);
    }

    // non-maximum suppression; ties broken toward the higher index so a
    // two-pixel plateau thins to a single pixel
    let mut thinned = vec![0.0; h * w];
    for r in 0..h {
        let ru = (r + h - 1) % h;
        let rd = (r + 1) % h;
        for c in 0..w {
            let cl = (c + w - 1) % w;
            let cr = (c + 1) % w;
            let i = r * w + c;
            let mut angle = gy[i].atan2(gx[i]) * 180.0 / PI;
            if angle < 0.0 {
                angle += 180.0;
            }
            let (before, after) = if !(22.5..157.5).contains(&angle) {
                (g[r * w + cl], g[r * w + cr])
            } else if angle < 67.5 {
                (g[ru * w + cl], g[rd * w + cr])
            } else if angle < 112.5 {
                (g[ru * w + c], g[rd * w + c])
            } else {
                (g[rd * w + cl], g[ru * w + cr])
            };
            if g[i] > 0.0 && g[i] > before && g[i] >= after {
                thinned[i] = g[i];
            }
        }
    }

    let low = cfg.canny_low * gmax;
    let high = cfg.canny_high * gmax;
    let mut out = vec![0.0; h * w];
    let mut stack = Vec::new();
    for i in 0..h * w {
        if thinned[i] >= high && out[i] == 0.0 {
            out[i] = 1.0;
            stack.push(i);
            while let Some(j) = stack.pop() {
                let (r, c) = (j / w, j % w);
                for dr in [h - 1, 0, 1] {
                    for dc in [w - 1, 0, 1] {
                        if dr == 0 && dc == 0 {
                            continue;
                        }
                        let n = ((r + dr) % h) * w + (c + dc) % w;
                        if thinned[n] >= low && out[n] == 0.0 {
                            out[n] = 1.0;
                            stack.push(n);
                        }
                    }
                }
            }
        }
    }
    EdgeWeightMap::new(h, w, out)
}

fn dilate_radius1(map: &EdgeWeightMap) -> EdgeWeightMap {
    let (h, w) = (map.height(), map.width());
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let mut m = 0.0f64;
            for dr in [h - 1, 0, 1] {
                for dc in [w - 1, 0, 1] {
                    m = m.max(map.at((r + dr) % h, (c + dc) % w));
                }
            }
            out[r * w + c] = m;
        }
    }
    EdgeWeightMap::new(h, w, out).expect("dilation preserves range")
}

/// Detect an edge weight map from a complex image: magnitude, then the
/// configured detector, then the optional dilation.
pub fn detect(image: &ComplexImage, cfg: &DetectorConfig) -> Result<EdgeWeightMap, GridError> {
    let mag = magnitude(image);
    let map = match cfg.detector {
        Detector::Tv => detect_tv(&mag),
        Detector::Sobel => detect_sobel(&mag),
        Detector::Canny => detect_canny(&mag, cfg)?,
    };
    Ok(if cfg.dilate { dilate_radius1(&map) } else { map })
}
