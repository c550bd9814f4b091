//! Shared grid types and the binary grid file format.
//!
//! All grids are dense, row-major, and value-semantic: operations return new
//! grids instead of mutating their inputs. Complex samples are stored as two
//! f64 components.
//!
//! File format (little-endian): magic `EWP1`, u8 kind (0=image, 1=kspace,
//! 2=mask, 3=edgemap), u32 height, u32 width, then the payload. Kinds 0/1
//! store height*width (re, im) f64 pairs, kind 2 one byte per cell (0 or 1),
//! kind 3 one f64 per cell.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"EWP1";

#[derive(Debug, Error)]
pub enum GridError {
    #[error("bad magic bytes (expected \"EWP1\")")]
    BadMagic,
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("dimension overflow: {height} x {width} cells")]
    DimensionOverflow { height: u64, width: u64 },
    #[error("non-binary mask cell {value} at index {index}")]
    NonBinaryMaskCell { value: u8, index: usize },
    #[error("grid dimensions must be positive")]
    EmptyDimension,
    #[error("data length {found} does not match {height} x {width}")]
    LengthMismatch {
        height: usize,
        width: usize,
        found: usize,
    },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("weight {value} at index {index} outside [0, 1]")]
    WeightOutOfRange { value: f64, index: usize },
    #[error("unknown grid kind code {0}")]
    UnknownKind(u8),
    #[error("expected {expected:?} grid, found {found:?}")]
    KindMismatch { expected: GridKind, found: GridKind },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Grid kind code as stored in the file header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Image,
    KSpace,
    Mask,
    EdgeMap,
}

impl GridKind {
    pub fn code(self) -> u8 {
        match self {
            GridKind::Image => 0,
            GridKind::KSpace => 1,
            GridKind::Mask => 2,
            GridKind::EdgeMap => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, GridError> {
        match code {
            0 => Ok(GridKind::Image),
            1 => Ok(GridKind::KSpace),
            2 => Ok(GridKind::Mask),
            3 => Ok(GridKind::EdgeMap),
            other => Err(GridError::UnknownKind(other)),
        }
    }
}

fn check_dims(height: usize, width: usize, len: usize) -> Result<(), GridError> {
    if height == 0 || width == 0 {
        return Err(GridError::EmptyDimension);
    }
    let cells = height
        .checked_mul(width)
        .ok_or(GridError::DimensionOverflow {
            height: height as u64,
            width: width as u64,
        })?;
    if cells != len {
        return Err(GridError::LengthMismatch {
            height,
            width,
            found: len,
        });
    }
    Ok(())
}

/// Dense 2D grid of complex image samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexImage {
    height: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl ComplexImage {
    pub fn new(height: usize, width: usize, data: Vec<Complex64>) -> Result<Self, GridError> {
        check_dims(height, width, data.len())?;
        for (i, v) in data.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(GridError::NonFinite(i));
            }
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Result<Self, GridError> {
        if height == 0 || width == 0 {
            return Err(GridError::EmptyDimension);
        }
        Ok(Self {
            height,
            width,
            data: vec![Complex64::new(0.0, 0.0); height * width],
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.width + col]
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Dense 2D grid of complex Fourier-domain samples, centered layout
/// (zero frequency at the grid center).
#[derive(Debug, Clone, PartialEq)]
pub struct KSpaceGrid {
    height: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl KSpaceGrid {
    pub fn new(height: usize, width: usize, data: Vec<Complex64>) -> Result<Self, GridError> {
        check_dims(height, width, data.len())?;
        for (i, v) in data.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(GridError::NonFinite(i));
            }
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Real-valued 2D grid, the payload of an edgemap-kind file. Used for
/// magnitude images, error maps and anything else that is real per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl RealGrid {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self, GridError> {
        check_dims(height, width, data.len())?;
        for (i, v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(GridError::NonFinite(i));
            }
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }
}

/// Per-pixel edge weights in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeightMap {
    height: usize,
    width: usize,
    weights: Vec<f64>,
}

impl EdgeWeightMap {
    pub fn new(height: usize, width: usize, weights: Vec<f64>) -> Result<Self, GridError> {
        check_dims(height, width, weights.len())?;
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(GridError::NonFinite(i));
            }
            if *w < 0.0 || *w > 1.0 {
                return Err(GridError::WeightOutOfRange {
                    value: *w,
                    index: i,
                });
            }
        }
        Ok(Self {
            height,
            width,
            weights,
        })
    }

    pub fn constant(height: usize, width: usize, value: f64) -> Result<Self, GridError> {
        if height == 0 || width == 0 {
            return Err(GridError::EmptyDimension);
        }
        Self::new(height, width, vec![value; height * width])
    }

    pub fn from_real(grid: &RealGrid) -> Result<Self, GridError> {
        Self::new(grid.height, grid.width, grid.data.clone())
    }

    pub fn to_real(&self) -> RealGrid {
        RealGrid {
            height: self.height,
            width: self.width,
            data: self.weights.clone(),
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.width + col]
    }
}

/// Mask construction family, carried as metadata (not persisted in files).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskKind {
    Cartesian1d,
    Random2d,
    Full,
}

impl MaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MaskKind::Cartesian1d => "cartesian1d",
            MaskKind::Random2d => "random2d",
            MaskKind::Full => "full",
        }
    }
}

/// Binary k-space sampling pattern. Cells are exactly 0 or 1.
///
/// `kind`, `seed` and `nominal_rate` describe how the mask was built; they
/// are metadata only and are not stored in the grid file format, so a mask
/// read back from disk carries `MaskKind::Full`, seed 0 and the achieved
/// rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMask {
    height: usize,
    width: usize,
    cells: Vec<u8>,
    pub kind: MaskKind,
    pub seed: u64,
    pub nominal_rate: f64,
}

impl SamplingMask {
    pub fn new(
        height: usize,
        width: usize,
        cells: Vec<u8>,
        kind: MaskKind,
        seed: u64,
        nominal_rate: f64,
    ) -> Result<Self, GridError> {
        check_dims(height, width, cells.len())?;
        for (i, c) in cells.iter().enumerate() {
            if *c > 1 {
                return Err(GridError::NonBinaryMaskCell {
                    value: *c,
                    index: i,
                });
            }
        }
        Ok(Self {
            height,
            width,
            cells,
            kind,
            seed,
            nominal_rate,
        })
    }

    pub fn full(height: usize, width: usize) -> Result<Self, GridError> {
        if height == 0 || width == 0 {
            return Err(GridError::EmptyDimension);
        }
        Ok(Self {
            height,
            width,
            cells: vec![1; height * width],
            kind: MaskKind::Full,
            seed: 0,
            nominal_rate: 1.0,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn at(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.width + col]
    }

    /// Count of sampled locations.
    pub fn ones(&self) -> usize {
        self.cells.iter().filter(|&&c| c == 1).count()
    }

    /// Achieved sampling rate.
    pub fn rate(&self) -> f64 {
        self.ones() as f64 / (self.height * self.width) as f64
    }

    /// Same cells and dimensions, ignoring construction metadata.
    pub fn same_cells(&self, other: &SamplingMask) -> bool {
        self.height == other.height && self.width == other.width && self.cells == other.cells
    }
}

/// Any grid read back from a file.
#[derive(Debug, Clone)]
pub enum AnyGrid {
    Image(ComplexImage),
    KSpace(KSpaceGrid),
    Mask(SamplingMask),
    EdgeMap(RealGrid),
}

impl AnyGrid {
    pub fn kind(&self) -> GridKind {
        match self {
            AnyGrid::Image(_) => GridKind::Image,
            AnyGrid::KSpace(_) => GridKind::KSpace,
            AnyGrid::Mask(_) => GridKind::Mask,
            AnyGrid::EdgeMap(_) => GridKind::EdgeMap,
        }
    }
}

fn header_bytes(kind: GridKind, height: usize, width: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(13);
    out.extend_from_slice(&MAGIC);
    out.push(kind.code());
    out.extend_from_slice(&(height as u32).to_le_bytes());
    out.extend_from_slice(&(width as u32).to_le_bytes());
    out
}

fn complex_payload(data: &[Complex64], out: &mut Vec<u8>) {
    for v in data {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
}

/// Serialize a grid to its on-disk byte representation.
pub fn grid_bytes(grid: &AnyGrid) -> Vec<u8> {
    match grid {
        AnyGrid::Image(g) => {
            let mut out = header_bytes(GridKind::Image, g.height, g.width);
            complex_payload(&g.data, &mut out);
            out
        }
        AnyGrid::KSpace(g) => {
            let mut out = header_bytes(GridKind::KSpace, g.height, g.width);
            complex_payload(&g.data, &mut out);
            out
        }
        AnyGrid::Mask(g) => {
            let mut out = header_bytes(GridKind::Mask, g.height, g.width);
            out.extend_from_slice(&g.cells);
            out
        }
        AnyGrid::EdgeMap(g) => {
            let mut out = header_bytes(GridKind::EdgeMap, g.height, g.width);
            for v in &g.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
            out
        }
    }
}

pub fn write_grid(grid: &AnyGrid, path: &Path) -> Result<(), GridError> {
    fs::write(path, grid_bytes(grid))?;
    Ok(())
}

pub fn write_image(image: &ComplexImage, path: &Path) -> Result<(), GridError> {
    write_grid(&AnyGrid::Image(image.clone()), path)
}

pub fn write_kspace(kspace: &KSpaceGrid, path: &Path) -> Result<(), GridError> {
    write_grid(&AnyGrid::KSpace(kspace.clone()), path)
}

pub fn write_mask(mask: &SamplingMask, path: &Path) -> Result<(), GridError> {
    write_grid(&AnyGrid::Mask(mask.clone()), path)
}

pub fn write_edgemap(map: &RealGrid, path: &Path) -> Result<(), GridError> {
    write_grid(&AnyGrid::EdgeMap(map.clone()), path)
}

fn read_f64_payload(bytes: &[u8], count: usize) -> Result<Vec<f64>, GridError> {
    let expected = count * 8;
    if bytes.len() != expected {
        return Err(GridError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Parse a grid from its on-disk byte representation.
pub fn parse_grid(bytes: &[u8]) -> Result<AnyGrid, GridError> {
    if bytes.len() < 4 || bytes[..4] != MAGIC {
        return Err(GridError::BadMagic);
    }
    if bytes.len() < 13 {
        return Err(GridError::Truncated {
            expected: 13,
            found: bytes.len(),
        });
    }
    let kind = GridKind::from_code(bytes[4])?;
    let height = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let width = u32::from_le_bytes(bytes[9..13].try_into().unwrap()) as usize;
    if height == 0 || width == 0 {
        return Err(GridError::EmptyDimension);
    }
    let cells = height
        .checked_mul(width)
        .ok_or(GridError::DimensionOverflow {
            height: height as u64,
            width: width as u64,
        })?;
    let payload = &bytes[13..];
    match kind {
        GridKind::Image | GridKind::KSpace => {
            let raw = read_f64_payload(payload, cells * 2)?;
            let data: Vec<Complex64> = raw
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect();
            if kind == GridKind::Image {
                Ok(AnyGrid::Image(ComplexImage::new(height, width, data)?))
            } else {
                Ok(AnyGrid::KSpace(KSpaceGrid::new(height, width, data)?))
            }
        }
        GridKind::Mask => {
            if payload.len() != cells {
                return Err(GridError::Truncated {
                    expected: cells,
                    found: payload.len(),
                });
            }
            let mask = SamplingMask::new(
                height,
                width,
                payload.to_vec(),
                MaskKind::Full,
                0,
                0.0,
            )?;
            let rate = mask.rate();
            Ok(AnyGrid::Mask(SamplingMask {
                nominal_rate: rate,
                ..mask
            }))
        }
        GridKind::EdgeMap => {
            let data = read_f64_payload(payload, cells)?;
            Ok(AnyGrid::EdgeMap(RealGrid::new(height, width, data)?))
        }
    }
}

pub fn read_grid(path: &Path, expected: GridKind) -> Result<AnyGrid, GridError> {
    let bytes = fs::read(path)?;
    let grid = parse_grid(&bytes)?;
    if grid.kind() != expected {
        return Err(GridError::KindMismatch {
            expected,
            found: grid.kind(),
        });
    }
    Ok(grid)
}

pub fn read_image(path: &Path) -> Result<ComplexImage, GridError> {
    match read_grid(path, GridKind::Image)? {
        AnyGrid::Image(g) => Ok(g),
        _ => unreachable!(),
    }
}

pub fn read_kspace(path: &Path) -> Result<KSpaceGrid, GridError> {
    match read_grid(path, GridKind::KSpace)? {
        AnyGrid::KSpace(g) => Ok(g),
        _ => unreachable!(),
    }
}

pub fn read_mask(path: &Path) -> Result<SamplingMask, GridError> {
    match read_grid(path, GridKind::Mask)? {
        AnyGrid::Mask(g) => Ok(g),
        _ => unreachable!(),
    }
}

pub fn read_edgemap(path: &Path) -> Result<RealGrid, GridError> {
    match read_grid(path, GridKind::EdgeMap)? {
        AnyGrid::EdgeMap(g) => Ok(g),
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_roundtrip_identity() {
        let img = ComplexImage::new(4, 4, vec![Complex64::new(1.0, 0.0); 16]).unwrap();
        let bytes = grid_bytes(&AnyGrid::Image(img.clone()));
        match parse_grid(&bytes).unwrap() {
            AnyGrid::Image(back) => assert_eq!(back, img),
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn bad_magic_reported() {
        let mut bytes = grid_bytes(&AnyGrid::EdgeMap(
            RealGrid::new(2, 2, vec![0.0; 4]).unwrap(),
        ));
        bytes[0] = b'X';
        assert!(matches!(parse_grid(&bytes), Err(GridError::BadMagic)));
    }

    #[test]
    fn non_binary_mask_cell_reported() {
        let mask = SamplingMask::full(2, 2).unwrap();
        let mut bytes = grid_bytes(&AnyGrid::Mask(mask));
        bytes[13] = 2;
        assert!(matches!(
            parse_grid(&bytes),
            Err(GridError::NonBinaryMaskCell { value: 2, index: 0 })
        ));
    }

    #[test]
    fn truncated_payload_reported() {
        let img = ComplexImage::zeros(3, 3).unwrap();
        let mut bytes = grid_bytes(&AnyGrid::Image(img));
        bytes.truncate(bytes.len() - 1);
        assert!(matches!(parse_grid(&bytes), Err(GridError::Truncated { .. })));
    }

    #[test]
    fn mask_payload_is_raw_bytes() {
        // 2x2 all-ones mask: header (13 bytes) then exactly 4 bytes of 0x01.
        let mask = SamplingMask::full(2, 2).unwrap();
        let bytes = grid_bytes(&AnyGrid::Mask(mask));
        assert_eq!(bytes.len(), 13 + 4);
        assert_eq!(&bytes[13..], &[1u8, 1, 1, 1]);
    }

    #[test]
    fn write_is_deterministic() {
        let img = ComplexImage::new(2, 3, vec![Complex64::new(0.5, -1.25); 6]).unwrap();
        let a = grid_bytes(&AnyGrid::Image(img.clone()));
        let b = grid_bytes(&AnyGrid::Image(img));
        assert_eq!(a, b);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(
            ComplexImage::new(0, 4, vec![]),
            Err(GridError::EmptyDimension)
        ));
        assert!(matches!(
            SamplingMask::new(4, 0, vec![], MaskKind::Full, 0, 1.0),
            Err(GridError::EmptyDimension)
        ));
    }

    #[test]
    fn nan_rejected() {
        let mut data = vec![Complex64::new(0.0, 0.0); 4];
        data[2] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            ComplexImage::new(2, 2, data),
            Err(GridError::NonFinite(2))
        ));
    }

    #[test]
    fn weight_range_enforced() {
        assert!(EdgeWeightMap::new(1, 2, vec![0.0, 1.0]).is_ok());
        assert!(matches!(
            EdgeWeightMap::new(1, 2, vec![0.0, 1.5]),
            Err(GridError::WeightOutOfRange { .. })
        ));
    }

    #[test]
    fn kind_mismatch_on_read() {
        let dir = std::env::temp_dir().join("ewrecon-grid-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("img.ewp");
        let img = ComplexImage::zeros(2, 2).unwrap();
        write_image(&img, &path).unwrap();
        assert!(matches!(
            read_mask(&path),
            Err(GridError::KindMismatch { .. })
        ));
    }
}
