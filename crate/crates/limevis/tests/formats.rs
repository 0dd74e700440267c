mod common;

use common::random_image;
use limevis::formats::*;
use limevis_core::RgbImage;
use proptest::prelude::*;

#[test]
fn ppm_round_trip_96() {
    let img = random_image(96, 96, 3);
    assert_eq!(read_ppm(&write_ppm(&img)).unwrap(), img);
}

proptest! {
    #[test]
    fn ppm_round_trip_is_bit_exact(w in 1usize..40, h in 1usize..40, seed in any::<u64>()) {
        let img = random_image(w, h, seed);
        prop_assert_eq!(read_ppm(&write_ppm(&img)).unwrap(), img);
    }

    #[test]
    fn stl10_decode_encode_reproduces_bytes(seed in any::<u64>()) {
        let mut rng = common::seeded_rng(seed);
        let bytes: Vec<u8> = (0..STL10_RECORD).map(|_| rng.next_u64() as u8).collect();
        let img = read_stl10_record(&bytes, 0).unwrap();
        prop_assert_eq!(write_stl10_record(&img).unwrap(), bytes);
    }

    #[test]
    fn truncated_ppm_is_rejected(w in 1usize..10, h in 1usize..10, cut in 1usize..30) {
        let bytes = write_ppm(&RgbImage::filled(w, h, [1, 2, 3]));
        let cut = cut.min(w * h * 3);
        prop_assert!(read_ppm(&bytes[..bytes.len() - cut]).is_err());
    }
}

#[test]
fn stl10_second_record_offset() {
    let mut bytes = vec![0u8; 2 * STL10_RECORD];
    // Record 1, green channel, row 5, column 7.
    bytes[STL10_RECORD + STL10_PLANE + 7 * 96 + 5] = 200;
    let img = read_stl10_record(&bytes, 1).unwrap();
    assert_eq!(img.get(7, 5), [0, 200, 0]);
    assert_eq!(read_stl10_record(&bytes, 0).unwrap().pixels().iter().filter(|p| **p != [0, 0, 0]).count(), 0);
}
