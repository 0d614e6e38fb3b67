//! Frozen container bytes. A change here is a format change.

use std::path::PathBuf;

use mwp::codec::Container;
use mwp::imgio::read_pgm;
use mwp::{compress_to_bytes, decompress_bytes, CodecConfig, PredictorRole};

const VECTORS: [(&str, u8); 5] = [
    ("tiny8x8_l1", 1),
    ("deep12x10_l2", 2),
    ("ramp16_l2", 2),
    ("smooth_noise24_l1", 1),
    ("smooth_noise64_l3", 3),
];

fn load(name: &str, ext: &str) -> Vec<u8> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", &format!("{name}.{ext}")].iter().collect();
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn encoder_reproduces_golden_containers() {
    for (name, levels) in VECTORS {
        let img = read_pgm(&load(name, "pgm")).unwrap();
        let got = compress_to_bytes(&img, &CodecConfig::default().with_levels(levels)).unwrap();
        assert_eq!(got, load(name, "mwp"), "{name}");
    }
}

#[test]
fn decoder_reproduces_golden_images() {
    for (name, _) in VECTORS {
        let img = decompress_bytes(&load(name, "mwp")).unwrap();
        assert_eq!(img, read_pgm(&load(name, "pgm")).unwrap(), "{name}");
    }
}

#[test]
fn tiny_vector_header_fields() {
    let bytes = load("tiny8x8_l1", "mwp");
    assert_eq!(&bytes[..16], b"MWP1\x01\x00\x08\x01\x08\x00\x00\x00\x08\x00\x00\x00");
    // three zero-model masks, then the payload length
    assert_eq!(&bytes[16..22], &[0; 6]);
    let payload_len = u32::from_le_bytes(bytes[22..26].try_into().unwrap()) as usize;
    assert_eq!(bytes.len(), 26 + payload_len + 4);
    let crc = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
    assert_eq!(crc, crc32fast::hash(&bytes[..bytes.len() - 4]));
}

#[test]
fn smooth_noise24_model_records() {
    let c = Container::from_bytes(&load("smooth_noise24_l1", "mwp")).unwrap();
    let m = c.models();
    assert_eq!(m[0].mask().bits(), 1 << PredictorRole::North.index());
    assert_eq!(m[0].coeffs(), [0x7848]);
    assert_eq!(m[1].mask().bits(), 1 << PredictorRole::West.index());
    assert_eq!(m[1].coeffs(), [0x8251]);
    assert!(m[2].is_zero());
}
