//! Property test: parse is the left inverse of serialize for every grid kind.

use num_complex::Complex64;
use proptest::prelude::*;

use ewrecon::grid::{
    grid_bytes, parse_grid, AnyGrid, ComplexImage, KSpaceGrid, MaskKind, RealGrid, SamplingMask,
};

fn finite_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e12..1e12f64,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
    ]
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..12, 1usize..12)
}

proptest! {
    #[test]
    fn image_roundtrip((h, w) in dims(), values in proptest::collection::vec(finite_f64(), 2..400)) {
        let data: Vec<Complex64> = (0..h * w)
            .map(|i| Complex64::new(values[i % values.len()], values[(i * 3 + 1) % values.len()]))
            .collect();
        let image = ComplexImage::new(h, w, data).unwrap();
        let bytes = grid_bytes(&AnyGrid::Image(image.clone()));
        match parse_grid(&bytes).unwrap() {
            AnyGrid::Image(back) => prop_assert_eq!(back, image),
            other => prop_assert!(false, "wrong kind {:?}", other.kind()),
        }
    }

    #[test]
    fn kspace_roundtrip((h, w) in dims(), values in proptest::collection::vec(finite_f64(), 2..400)) {
        let mut data = Vec::with_capacity(h * w);
        for i in 0..h * w {
            let re = values[i % values.len()];
            let im = values[(i * 7 + 1) % values.len()];
            data.push(Complex64::new(re, im));
        }
        let kspace = KSpaceGrid::new(h, w, data).unwrap();
        let bytes = grid_bytes(&AnyGrid::KSpace(kspace.clone()));
        match parse_grid(&bytes).unwrap() {
            AnyGrid::KSpace(back) => prop_assert_eq!(back, kspace),
            other => prop_assert!(false, "wrong kind {:?}", other.kind()),
        }
    }

    #[test]
    fn edgemap_roundtrip((h, w) in dims(), values in proptest::collection::vec(finite_f64(), 2..400)) {
        let data: Vec<f64> = (0..h * w).map(|i| values[i % values.len()]).collect();
        let map = RealGrid::new(h, w, data).unwrap();
        let bytes = grid_bytes(&AnyGrid::EdgeMap(map.clone()));
        match parse_grid(&bytes).unwrap() {
            AnyGrid::EdgeMap(back) => prop_assert_eq!(back, map),
            other => prop_assert!(false, "wrong kind {:?}", other.kind()),
        }
    }

    #[test]
    fn mask_roundtrip((h, w) in dims(), bits in proptest::collection::vec(any::<bool>(), 2..200)) {
        let cells: Vec<u8> = (0..h * w).map(|i| bits[i % bits.len()] as u8).collect();
        let mask = SamplingMask::new(h, w, cells, MaskKind::Random2d, 42, 0.5).unwrap();
        let bytes = grid_bytes(&AnyGrid::Mask(mask.clone()));
        match parse_grid(&bytes).unwrap() {
            // construction metadata is not persisted; cells and dims must be
            AnyGrid::Mask(back) => prop_assert!(back.same_cells(&mask)),
            other => prop_assert!(false, "wrong kind {:?}", other.kind()),
        }
    }

    #[test]
    fn truncated_input_rejected(cut in 0usize..40) {
        let image = ComplexImage::zeros(3, 3).unwrap();
        let bytes = grid_bytes(&AnyGrid::Image(image));
        let cut = cut.min(bytes.len() - 1);
        prop_assert!(parse_grid(&bytes[..cut]).is_err());
    }
}
