mod common;

use acoustir::core::geometry::OCTAVE_BANDS_HZ;
use acoustir::core::{PathMeta, PathSet, Vec3};
use acoustir::synth::SynthError;
use acoustir::{read_wav, synthesize_ir, write_wav, BandConfig};

fn cfg(seed: u64) -> BandConfig {
    BandConfig { seed, ..BandConfig::new(OCTAVE_BANDS_HZ.to_vec()) }
}

#[test]
fn channel_counts_follow_order() {
    let paths = common::single_path(3.43, Vec3::X, 0.01, 8);
    for (order, n) in [(0, 1), (1, 4), (3, 16), (9, 100)] {
        let ir = synthesize_ir(&paths, order, &cfg(0)).unwrap();
        assert_eq!(ir.num_channels(), n);
        assert!(ir.channels.iter().all(|c| c.len() == ir.len()));
    }
    assert!(matches!(synthesize_ir(&paths, 10, &cfg(0)), Err(SynthError::Auralize(_))));
}

#[test]
fn arrival_from_above_feeds_w_and_z_only() {
    let paths = common::single_path(3.43, Vec3::Z, 0.02, 8);
    let ir = synthesize_ir(&paths, 1, &cfg(1)).unwrap();
    assert_eq!(ir.channels[2], ir.channels[0]);
    assert!(ir.channels[1].iter().chain(&ir.channels[3]).all(|&v| v == 0.0));
    assert!(ir.channel_energy(0) > 0.0);
}

#[test]
fn onset_and_length() {
    let paths = common::single_path(343.0, Vec3::Y, 1e-4, 8);
    let ir = synthesize_ir(&paths, 2, &cfg(2)).unwrap();
    assert_eq!(ir.first_nonzero(), Some(48_000));
    assert!(ir.len() > 48_000 + 4_000, "{}", ir.len());
}

#[test]
fn zero_energy_gives_silence() {
    let paths = common::single_path(5.0, Vec3::X, 0.0, 8);
    let ir = synthesize_ir(&paths, 3, &cfg(3)).unwrap();
    assert!(!ir.is_empty() && ir.channels.iter().flatten().all(|&v| v == 0.0));
    let empty = PathSet::new(PathMeta { band_centers: OCTAVE_BANDS_HZ.to_vec(), ..Default::default() });
    let ir = synthesize_ir(&empty, 1, &cfg(3)).unwrap();
    assert!(ir.channels.iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn seeded_noise_is_reproducible() {
    let paths = common::small_trace(1);
    let a = synthesize_ir(&paths, 2, &cfg(5)).unwrap();
    assert_eq!(a, synthesize_ir(&paths, 2, &cfg(5)).unwrap());
    assert_ne!(a, synthesize_ir(&paths, 2, &cfg(6)).unwrap());
}

#[test]
fn band_mismatch_and_sample_rate_are_checked() {
    let paths = common::single_path(3.0, Vec3::X, 0.1, 4);
    assert!(matches!(synthesize_ir(&paths, 1, &cfg(0)), Err(SynthError::Auralize(_))));
    let low = BandConfig { sample_rate: 16_000, ..cfg(0) };
    let eight = common::single_path(3.0, Vec3::X, 0.1, 8);
    assert!(matches!(synthesize_ir(&eight, 1, &low), Err(SynthError::SampleRate { .. })));
}

#[test]
fn wav_roundtrip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let ir = synthesize_ir(&common::small_trace(2), 3, &cfg(7)).unwrap();
    let file = dir.path().join("ir.wav");
    write_wav(&ir, &file).unwrap();
    let back = read_wav(&file).unwrap();
    assert_eq!(back, ir);
    let spec = hound::WavReader::open(&file).unwrap().spec();
    assert_eq!((spec.channels, spec.sample_rate, spec.bits_per_sample), (16, 48_000, 32));
    assert_eq!(spec.sample_format, hound::SampleFormat::Float);
}
