//! 32-bit float multichannel WAV, channel `i` = ACN channel `i`.

use std::path::Path;

use acoustir_core::Normalization;

use crate::synth::AmbisonicIR;

#[derive(Debug, thiserror::Error)]
pub enum WavError {
    #[error(transparent)]
    Hound(#[from] hound::Error),
    #[error("{0} channels exceed the WAV limit of 65535")]
    TooManyChannels(usize),
    #[error("expected 32-bit float samples")]
    Format,
    #[error("{0} channels is not a square Ambisonic channel count")]
    NotAmbisonic(usize),
}

pub fn write_wav(ir: &AmbisonicIR, path: &Path) -> Result<(), WavError> {
    let channels = u16::try_from(ir.num_channels()).map_err(|_| WavError::TooManyChannels(ir.num_channels()))?;
    let spec = hound::WavSpec {
        channels,
        sample_rate: ir.sample_rate,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut w = hound::WavWriter::create(path, spec)?;
    for n in 0..ir.len() {
        for ch in &ir.channels {
            w.write_sample(ch[n])?;
        }
    }
    w.finalize()?;
    Ok(())
}

/// Reads a file written by [`write_wav`]. The order is inferred from the
/// channel count; the normalisation is assumed SN3D.
pub fn read_wav(path: &Path) -> Result<AmbisonicIR, WavError> {
    let mut r = hound::WavReader::open(path)?;
    let spec = r.spec();
    if spec.sample_format != hound::SampleFormat::Float || spec.bits_per_sample != 32 {
        return Err(WavError::Format);
    }
    let nch = spec.channels as usize;
    let order = (nch as f64).sqrt().round() as usize;
    if nch == 0 || (order * order != nch) {
        return Err(WavError::NotAmbisonic(nch));
    }
    let mut channels = vec![Vec::with_capacity(r.duration() as usize); nch];
    for (i, s) in r.samples::<f32>().enumerate() {
        channels[i % nch].push(s?);
    }
    Ok(AmbisonicIR { order: order - 1, sample_rate: spec.sample_rate, normalization: Normalization::SN3D, channels })
}
