//! Noise-gated Ambisonic impulse responses.
//!
//! One Gaussian white-noise sequence is split into bands by zeroing FFT bins
//! outside each band. Band `b` keeps bins from the geometric midpoint below
//! its center to the one above it; the lowest band reaches down to DC and the
//! highest up to Nyquist, so the bands sum back to the original noise. Each
//! band is scaled to unit mean square before gating.

use acoustir_core::auralize::{self, AuralizeError};
use acoustir_core::{Normalization, PathSet, ShBasis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

pub const DEFAULT_SAMPLE_RATE: u32 = 48_000;
pub const DEFAULT_PADDING_S: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("sample rate {fs} Hz must exceed twice the top band edge ({edge:.1} Hz)")]
    SampleRate { fs: u32, edge: f64 },
    #[error("band centers must be positive and strictly increasing")]
    Bands,
    #[error("padding must be finite and non-negative, got {0}")]
    Padding(f64),
    #[error(transparent)]
    Auralize(#[from] AuralizeError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandConfig {
    pub centers: Vec<f64>,
    pub sample_rate: u32,
    pub seed: u64,
    /// Seconds of silence appended after the last arrival.
    pub padding: f64,
}

impl BandConfig {
    pub fn new(centers: Vec<f64>) -> BandConfig {
        BandConfig { centers, sample_rate: DEFAULT_SAMPLE_RATE, seed: 0, padding: DEFAULT_PADDING_S }
    }

    /// Split frequencies between adjacent bands.
    pub fn crossovers(&self) -> Vec<f64> {
        self.centers.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect()
    }

    /// Nominal upper edge of the highest band, half a band-spacing above its
    /// center (an octave spacing when there is only one band).
    pub fn top_edge(&self) -> f64 {
        let c = &self.centers;
        match c.len() {
            0 => 0.0,
            1 => c[0] * std::f64::consts::SQRT_2,
            n => c[n - 1] * (c[n - 1] / c[n - 2]).sqrt(),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let c = &self.centers;
        if c.is_empty() || c.iter().any(|v| !(v.is_finite() && *v > 0.0)) || c.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SynthError::Bands);
        }
        if !(self.padding.is_finite() && self.padding >= 0.0) {
            return Err(SynthError::Padding(self.padding));
        }
        let edge = self.top_edge();
        if self.sample_rate as f64 <= 2.0 * edge {
            return Err(SynthError::SampleRate { fs: self.sample_rate, edge });
        }
        Ok(())
    }
}

/// Multichannel response in ACN channel order.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbisonicIR {
    pub order: usize,
    pub sample_rate: u32,
    pub normalization: Normalization,
    /// `[channel][sample]`.
    pub channels: Vec<Vec<f32>>,
}

impl AmbisonicIR {
    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel_energy(&self, ch: usize) -> f64 {
        self.channels[ch].iter().map(|&v| (v as f64) * (v as f64)).sum()
    }

    /// Index of the first nonzero sample over all channels.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.channels.iter().filter_map(|c| c.iter().position(|&v| v != 0.0)).min()
    }
}

/// `len` samples of seeded Gaussian noise split into unit mean-square bands.
pub fn band_noise(len: usize, config: &BandConfig) -> Vec<Vec<f64>> {
    let bands = config.centers.len();
    if len == 0 {
        return vec![Vec::new(); bands];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut spectrum: Vec<Complex<f64>> =
        (0..len).map(|_| Complex::new(StandardNormal.sample(&mut rng), 0.0)).collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(len).process(&mut spectrum);
    let inverse = planner.plan_fft_inverse(len);

    let crossovers = config.crossovers();
    let fs = config.sample_rate as f64;
    let band_of: Vec<usize> = (0..len)
        .map(|k| {
            let f = k.min(len - k) as f64 * fs / len as f64;
            crossovers.partition_point(|&e| e <= f)
        })
        .collect();

    let mut scratch = vec![Complex::new(0.0, 0.0); len];
    (0..bands)
        .map(|b| {
            for (k, s) in scratch.iter_mut().enumerate() {
                *s = if band_of[k] == b { spectrum[k] } else { Complex::new(0.0, 0.0) };
            }
            inverse.process(&mut scratch);
            let mut x: Vec<f64> = scratch.iter().map(|c| c.re / len as f64).collect();
            let ms = x.iter().map(|v| v * v).sum::<f64>() / len as f64;
            if ms > 0.0 {
                let g = 1.0 / ms.sqrt();
                x.iter_mut().for_each(|v| *v *= g);
            }
            x
        })
        .collect()
}

/// Renders `paths` at Ambisonic `order` with SN3D normalisation.
pub fn synthesize_ir(paths: &PathSet, order: usize, config: &BandConfig) -> Result<AmbisonicIR, SynthError> {
    config.validate()?;
    if config.centers.len() != paths.num_bands() {
        return Err(AuralizeError::BandMismatch { paths: paths.num_bands(), config: config.centers.len() }.into());
    }
    let basis = ShBasis::new(order, Normalization::SN3D).map_err(AuralizeError::from)?;
    let fs = config.sample_rate as f64;
    let len = auralize::ir_length(paths, fs, config.padding);
    let noise = band_noise(len, config);
    let ir = auralize::render(paths, &basis, fs, &noise, len)?;
    Ok(AmbisonicIR {
        order,
        sample_rate: config.sample_rate,
        normalization: Normalization::SN3D,
        channels: ir.into_iter().map(|c| c.into_iter().map(|v| v as f32).collect()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use acoustir_core::geometry::OCTAVE_BANDS_HZ;

    #[test]
    fn bands_reconstruct_noise() {
        let cfg = BandConfig { seed: 3, ..BandConfig::new(OCTAVE_BANDS_HZ.to_vec()) };
        let bands = band_noise(4096, &cfg);
        for b in &bands {
            let ms = b.iter().map(|v| v * v).sum::<f64>() / 4096.0;
            assert!((ms - 1.0).abs() < 1e-12);
        }
        // distinct bands are orthogonal
        let dot: f64 = bands[3].iter().zip(&bands[6]).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-8, "{dot}");
        assert_eq!(band_noise(4096, &cfg), bands);
    }

    #[test]
    fn sample_rate_limit() {
        let mut cfg = BandConfig::new(OCTAVE_BANDS_HZ.to_vec());
        cfg.validate().unwrap();
        cfg.sample_rate = 22_050;
        assert!(matches!(cfg.validate(), Err(SynthError::SampleRate { .. })));
    }

    #[test]
    fn crossovers_are_geometric() {
        let cfg = BandConfig::new(vec![500.0, 1000.0, 2000.0]);
        let x = cfg.crossovers();
        assert!((x[0] - 500.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!((cfg.top_edge() - 2000.0 * 2f64.sqrt()).abs() < 1e-9);
    }
}
