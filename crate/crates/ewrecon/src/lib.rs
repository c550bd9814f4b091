//! Compressed-sensing MRI reconstruction with edge-weighted soft-thresholding.
//!
//! The toolkit simulates undersampled k-space acquisition, reconstructs with
//! projected FISTA over a stationary Haar tight frame, and optionally weights
//! the per-pixel soft-thresholding by a detected or supplied edge map so that
//! edges are shrunk less than smooth regions.

pub mod edges;
pub mod fourier;
pub mod frame;
pub mod grid;
pub mod masks;
pub mod metrics;
pub mod pgm;
pub mod phantom;
pub mod solver;
pub mod threshold;

pub use grid::{ComplexImage, EdgeWeightMap, KSpaceGrid, RealGrid, SamplingMask};
