//! Sparse echogram rendering: each path contributes one gated noise sample
//! per Ambisonic channel at its arrival time.
//!
//! For channel `c`, band `b` and path `p` arriving at sample `n_p`, the
//! amplitude train is `S[c][b][n_p] += Y_c(dir_p) * sqrt(E_pb)` and the
//! response is `IR[c][n] = sum_b S[c][b][n] * w_b[n]` for unit-variance band
//! noise `w_b`. Rendering folds the band sum per path so the trains are
//! never materialised.

use alloc::vec;
use alloc::vec::Vec;

use crate::hoa::{ShBasis, ShError};
use crate::math;
use crate::paths::PathSet;
use crate::vec3::Vec3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AuralizeError {
    #[error("path set has {paths} bands but the band configuration has {config}")]
    BandMismatch { paths: usize, config: usize },
    #[error("band signal {band} has {got} samples, need {need}")]
    SignalLength { band: usize, got: usize, need: usize },
    #[error(transparent)]
    Sh(#[from] ShError),
}

/// `round(fs * distance / c)`.
pub fn arrival_sample(distance: f64, speed_of_sound: f64, sample_rate: f64) -> usize {
    math::round(sample_rate * distance / speed_of_sound) as usize
}

fn row_arrival(paths: &PathSet, row: usize, sample_rate: f64) -> usize {
    let c = paths.columns();
    arrival_sample(c.distance[row] as f64, c.speed_of_sound[row] as f64, sample_rate)
}

fn row_direction(paths: &PathSet, row: usize) -> Vec3 {
    Vec3::from_array(paths.columns().listener_direction[row].map(|v| v as f64))
}

/// Latest arrival sample over all paths, if any.
pub fn last_arrival(paths: &PathSet, sample_rate: f64) -> Option<usize> {
    (0..paths.len()).map(|r| row_arrival(paths, r, sample_rate)).max()
}

/// Response length: last arrival plus `padding` seconds (at least one sample).
pub fn ir_length(paths: &PathSet, sample_rate: f64, padding: f64) -> usize {
    let pad = math::round(sample_rate * padding.max(0.0)) as usize;
    last_arrival(paths, sample_rate).map_or(pad.max(1), |n| n + pad + 1)
}

fn check_signals(paths: &PathSet, band_signals: &[Vec<f64>], len: usize) -> Result<(), AuralizeError> {
    if band_signals.len() != paths.num_bands() {
        return Err(AuralizeError::BandMismatch { paths: paths.num_bands(), config: band_signals.len() });
    }
    for (band, s) in band_signals.iter().enumerate() {
        if s.len() < len {
            return Err(AuralizeError::SignalLength { band, got: s.len(), need: len });
        }
    }
    Ok(())
}

/// Renders `[channels][len]` samples. Paths arriving at or after `len` are
/// dropped.
pub fn render(
    paths: &PathSet,
    basis: &ShBasis,
    sample_rate: f64,
    band_signals: &[Vec<f64>],
    len: usize,
) -> Result<Vec<Vec<f64>>, AuralizeError> {
    check_signals(paths, band_signals, len)?;
    let channels = basis.channels();
    let mut ir = vec![vec![0.0; len]; channels];
    let mut y = vec![0.0; channels];
    for row in 0..paths.len() {
        let n = row_arrival(paths, row, sample_rate);
        if n >= len {
            continue;
        }
        let gated: f64 = paths
            .intensities(row)
            .iter()
            .zip(band_signals)
            .map(|(&e, w)| math::sqrt(e as f64) * w[n])
            .sum();
        if gated == 0.0 {
            continue;
        }
        basis.eval_into(row_direction(paths, row), &mut y)?;
        for (ch, coeff) in ir.iter_mut().zip(&y) {
            ch[n] += coeff * gated;
        }
    }
    Ok(ir)
}

/// Per-band amplitude trains `S[b][n]` of one channel, before noise gating.
pub fn amplitude_trains(
    paths: &PathSet,
    basis: &ShBasis,
    channel: usize,
    sample_rate: f64,
    len: usize,
) -> Result<Vec<Vec<f64>>, AuralizeError> {
    let mut trains = vec![vec![0.0; len]; paths.num_bands()];
    let mut y = vec![0.0; basis.channels()];
    for row in 0..paths.len() {
        let n = row_arrival(paths, row, sample_rate);
        if n >= len {
            continue;
        }
        basis.eval_into(row_direction(paths, row), &mut y)?;
        for (train, &e) in trains.iter_mut().zip(paths.intensities(row)) {
            train[n] += y[channel] * math::sqrt(e as f64);
        }
    }
    Ok(trains)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hoa::Normalization;
    use crate::paths::{PathMeta, PathRecord, PathType};

    fn one_path(dir: Vec3, distance: f64, e: f64) -> PathSet {
        let mut p = PathSet::new(PathMeta { band_centers: vec![500.0, 1000.0], ..Default::default() });
        p.push(&PathRecord {
            source_index: 0,
            path_type: PathType::Direct,
            distance,
            listener_direction: dir,
            source_direction: -dir,
            relative_speed: 0.0,
            speed_of_sound: 343.0,
            intensities: vec![e, e],
        })
        .unwrap();
        p
    }

    #[test]
    fn arrival_of_one_second() {
        assert_eq!(arrival_sample(343.0, 343.0, 48_000.0), 48_000);
        let p = one_path(Vec3::Z, 343.0, 1.0);
        assert_eq!(ir_length(&p, 48_000.0, 0.1), 48_000 + 4_800 + 1);
    }

    #[test]
    fn band_mismatch_is_an_error() {
        let p = one_path(Vec3::Z, 1.0, 1.0);
        let basis = ShBasis::new(1, Normalization::SN3D).unwrap();
        let err = render(&p, &basis, 48_000.0, &[vec![1.0; 200]], 200).unwrap_err();
        assert_eq!(err, AuralizeError::BandMismatch { paths: 2, config: 1 });
    }

    #[test]
    fn gated_sample_lands_on_arrival() {
        let p = one_path(Vec3::Z, 343.0 / 480.0, 4.0);
        let basis = ShBasis::new(1, Normalization::SN3D).unwrap();
        let signals = vec![vec![0.5; 200], vec![-0.25; 200]];
        let ir = render(&p, &basis, 48_000.0, &signals, 200).unwrap();
        // sqrt(4) * (0.5 - 0.25) = 0.5 on W and Z, nothing on Y and X.
        assert_eq!(ir[0][100], 0.5);
        assert_eq!(ir[2][100], 0.5);
        assert!(ir[1].iter().chain(&ir[3]).all(|&v| v == 0.0));
        assert_eq!(ir[0].iter().filter(|&&v| v != 0.0).count(), 1);
    }
}
