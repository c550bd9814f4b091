//! Reconstruction quality metrics and diagnostic loss expressions.

use thiserror::Error;

use crate::grid::{ComplexImage, EdgeWeightMap};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("reference has zero norm")]
    ZeroReference,
    #[error("both label supports are empty")]
    EmptyLabels,
    #[error("empty iterate list")]
    EmptyIterates,
}

fn check_shapes(
    a: (usize, usize),
    b: (usize, usize),
) -> Result<(), MetricError> {
    if a != b {
        return Err(MetricError::ShapeMismatch(a.0, a.1, b.0, b.1));
    }
    Ok(())
}

/// Kahan-compensated sum; the squared norms here feed tight acceptance
/// tolerances, where naive sequential summation loses a few digits.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

fn diff_norm2(reference: &ComplexImage, reconstruction: &ComplexImage) -> f64 {
    compensated_sum(
        reference
            .data()
            .iter()
            .zip(reconstruction.data())
            .map(|(a, b)| (a - b).norm_sqr()),
    )
    .sqrt()
}

/// Relative l2 norm error: ||x - xhat||_2 / ||x||_2.
pub fn rlne(reference: &ComplexImage, reconstruction: &ComplexImage) -> Result<f64, MetricError> {
    check_shapes(
        (reference.height(), reference.width()),
        (reconstruction.height(), reconstruction.width()),
    )?;
    let denom = reference.norm2();
    if denom == 0.0 {
        return Err(MetricError::ZeroReference);
    }
    Ok(diff_norm2(reference, reconstruction) / denom)
}

/// PSNR formula selection. `Standard` is the conventional definition with
/// squared peak and error; `PaperLiteral` uses unsquared norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsnrMode {
    Standard,
    PaperLiteral,
}

/// Peak signal-to-noise ratio in dB, computed over complex magnitudes.
/// Returns +inf when the images are identical.
pub fn psnr(
    reference: &ComplexImage,
    reconstruction: &ComplexImage,
    mode: PsnrMode,
) -> Result<f64, MetricError> {
    check_shapes(
        (reference.height(), reference.width()),
        (reconstruction.height(), reconstruction.width()),
    )?;
    let mn = (reference.height() * reference.width()) as f64;
    let peak = reference
        .data()
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    let err = diff_norm2(reference, reconstruction);
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(match mode {
        PsnrMode::Standard => 10.0 * (mn * peak * peak / (err * err)).log10(),
        PsnrMode::PaperLiteral => 10.0 * (mn * peak / err).log10(),
    })
}

/// Label grid for segmentation overlap measures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelGrid {
    pub height: usize,
    pub width: usize,
    pub labels: Vec<u8>,
}

/// Dice coefficient 2|A n B| / (|A| + |B|) for the given label.
pub fn dice(seg_a: &LabelGrid, seg_b: &LabelGrid, label: u8) -> Result<f64, MetricError> {
    check_shapes((seg_a.height, seg_a.width), (seg_b.height, seg_b.width))?;
    let mut a = 0usize;
    let mut b = 0usize;
    let mut both = 0usize;
    for (&la, &lb) in seg_a.labels.iter().zip(&seg_b.labels) {
        let ia = la == label;
        let ib = lb == label;
        a += ia as usize;
        b += ib as usize;
        both += (ia && ib) as usize;
    }
    if a + b == 0 {
        return Err(MetricError::EmptyLabels);
    }
    Ok(2.0 * both as f64 / (a + b) as f64)
}

/// Sum of squared errors between each iterate and the reference.
pub fn rec_loss(
    iterates: &[ComplexImage],
    reference: &ComplexImage,
) -> Result<f64, MetricError> {
    if iterates.is_empty() {
        return Err(MetricError::EmptyIterates);
    }
    let mut total = 0.0;
    for it in iterates {
        check_shapes(
            (reference.height(), reference.width()),
            (it.height(), it.width()),
        )?;
        let d = diff_norm2(reference, it);
        total += d * d;
    }
    Ok(total)
}

/// Squared error between two edge weight maps.
pub fn edge_loss(w_ref: &EdgeWeightMap, w: &EdgeWeightMap) -> Result<f64, MetricError> {
    check_shapes((w_ref.height(), w_ref.width()), (w.height(), w.width()))?;
    Ok(w_ref
        .weights()
        .iter()
        .zip(w.weights())
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// Combined diagnostic loss: reconstruction plus edge term.
pub fn total_loss(
    iterates: &[ComplexImage],
    reference: &ComplexImage,
    w_ref: &EdgeWeightMap,
    w: &EdgeWeightMap,
) -> Result<f64, MetricError> {
    Ok(rec_loss(iterates, reference)? + edge_loss(w_ref, w)?)
}
