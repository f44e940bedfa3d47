//! Real spherical harmonics up to order 9, evaluated with Cartesian
//! recurrences (no trigonometric calls).
//!
//! Channels follow ACN (`l * l + l + m`), the basis carries no
//! Condon–Shortley phase, and values are N3D-normalised unless SN3D is
//! requested, in which case each degree is divided by `sqrt(2l + 1)`.
//!
//! For `m >= 0` write `Y_lm = K_lm * P_lm(z) * C_m(x, y)` and
//! `Y_l,-m = K_lm * P_lm(z) * S_m(x, y)` where `C_m + i S_m = (x + i y)^m`
//! and `P_lm` is the associated Legendre function divided by
//! `sin^m(theta)`, a polynomial in `z`:
//!
//! ```text
//! P_mm     = (2m - 1)!!
//! P_m+1,m  = (2m + 1) z P_mm
//! P_lm     = ((2l - 1) z P_l-1,m - (l + m - 1) P_l-2,m) / (l - m)
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::vec3::Vec3;

pub const MAX_ORDER: usize = 9;

/// Directions whose norm is further than this from 1 are rejected.
pub const UNIT_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Normalization {
    N3D,
    SN3D,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShError {
    #[error("order {0} exceeds the maximum of 9")]
    Order(usize),
    #[error("row {row}: direction has norm {norm}, expected 1")]
    NotUnit { row: usize, norm: f64 },
}

pub const fn channel_count(order: usize) -> usize {
    (order + 1) * (order + 1)
}

/// ACN channel index of degree `l`, order `m`.
pub const fn acn(l: usize, m: isize) -> usize {
    ((l * l + l) as isize + m) as usize
}

/// Degree of an ACN channel.
pub fn degree(channel: usize) -> usize {
    let mut l = 0;
    while (l + 1) * (l + 1) <= channel {
        l += 1;
    }
    l
}

/// Precomputed recurrence and normalisation tables for one order.
#[derive(Clone, Debug)]
pub struct ShBasis {
    order: usize,
    norm: Normalization,
    /// `K_lm`, indexed by `acn(l, m)` for `m >= 0`.
    scale: Vec<f64>,
    /// `(2l - 1) / (l - m)` and `(l + m - 1) / (l - m)`, indexed like `scale`.
    rec_a: Vec<f64>,
    rec_b: Vec<f64>,
    /// `(2m - 1)!!` per `m`.
    sectoral: Vec<f64>,
    /// `sqrt(2l + 1)` per `l`, used for SN3D.
    degree_gain: Vec<f64>,
}

impl ShBasis {
    pub fn new(order: usize, norm: Normalization) -> Result<ShBasis, ShError> {
        if order > MAX_ORDER {
            return Err(ShError::Order(order));
        }
        let n = channel_count(order);
        let mut scale = vec![0.0; n];
        let mut rec_a = vec![0.0; n];
        let mut rec_b = vec![0.0; n];
        for l in 0..=order {
            for m in 0..=l {
                // (l - m)! / (l + m)! as a falling product; exact for l <= 9.
                let mut ratio = 1.0;
                for k in (l - m + 1)..=(l + m) {
                    ratio /= k as f64;
                }
                let delta = if m == 0 { 1.0 } else { 2.0 };
                let i = acn(l, m as isize);
                scale[i] = math::sqrt((2 * l + 1) as f64 * delta * ratio);
                if l > m {
                    rec_a[i] = (2 * l - 1) as f64 / (l - m) as f64;
                    rec_b[i] = (l + m - 1) as f64 / (l - m) as f64;
                }
            }
        }
        let mut sectoral = vec![1.0; order + 1];
        for m in 1..=order {
            sectoral[m] = sectoral[m - 1] * (2 * m - 1) as f64;
        }
        let degree_gain = (0..=order).map(|l| math::sqrt((2 * l + 1) as f64)).collect();
        Ok(ShBasis { order, norm, scale, rec_a, rec_b, sectoral, degree_gain })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn normalization(&self) -> Normalization {
        self.norm
    }

    pub fn channels(&self) -> usize {
        channel_count(self.order)
    }

    /// Writes `channels()` coefficients for `dir` into `out`.
    pub fn eval_into(&self, dir: Vec3, out: &mut [f64]) -> Result<(), ShError> {
        self.eval_row(dir, 0, out)
    }

    fn eval_row(&self, dir: Vec3, row: usize, out: &mut [f64]) -> Result<(), ShError> {
        let norm = dir.norm();
        if norm.is_nan() || math::abs(norm - 1.0) >= UNIT_TOLERANCE {
            return Err(ShError::NotUnit { row, norm });
        }
        let Vec3 { x, y, z } = if norm == 1.0 { dir } else { dir / norm };
        let order = self.order;
        let out = &mut out[..self.channels()];

        // (x + iy)^m; order <= 9 so fixed arrays suffice.
        let mut c = [0.0; MAX_ORDER + 1];
        let mut s = [0.0; MAX_ORDER + 1];
        c[0] = 1.0;
        for m in 1..=order {
            c[m] = x * c[m - 1] - y * s[m - 1];
            s[m] = x * s[m - 1] + y * c[m - 1];
        }

        for m in 0..=order {
            let mut p_prev = 0.0;
            let mut p = self.sectoral[m];
            for l in m..=order {
                if l == m + 1 {
                    p_prev = p;
                    p = (2 * m + 1) as f64 * z * p_prev;
                } else if l > m + 1 {
                    let i = acn(l, m as isize);
                    let next = self.rec_a[i] * z * p - self.rec_b[i] * p_prev;
                    p_prev = p;
                    p = next;
                }
                let k = self.scale[acn(l, m as isize)] * p;
                if m == 0 {
                    out[acn(l, 0)] = k;
                } else {
                    out[acn(l, m as isize)] = k * c[m];
                    out[acn(l, -(m as isize))] = k * s[m];
                }
            }
        }

        if self.norm == Normalization::SN3D {
            for l in 1..=order {
                let g = self.degree_gain[l];
                for v in &mut out[l * l..(l + 1) * (l + 1)] {
                    *v /= g;
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, dir: Vec3) -> Result<ShVector, ShError> {
        let mut coeffs = vec![0.0; self.channels()];
        self.eval_into(dir, &mut coeffs)?;
        Ok(ShVector { order: self.order, coeffs })
    }

    /// Row-major `[directions.len(), channels()]` matrix.
    pub fn eval_batch(&self, directions: &[Vec3]) -> Result<ShMatrix, ShError> {
        let cols = self.channels();
        let mut data = vec![0.0; directions.len() * cols];
        for (row, (d, chunk)) in directions.iter().zip(data.chunks_exact_mut(cols)).enumerate() {
            self.eval_row(*d, row, chunk)?;
        }
        Ok(ShMatrix { rows: directions.len(), cols, data })
    }
}

/// Coefficients of one direction in ACN order.
#[derive(Clone, Debug, PartialEq)]
pub struct ShVector {
    pub order: usize,
    pub coeffs: Vec<f64>,
}

/// Contiguous row-major coefficient matrix, one row per direction.
#[derive(Clone, Debug, PartialEq)]
pub struct ShMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl ShMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

pub fn sh_eval(direction: Vec3, order: usize, norm: Normalization) -> Result<ShVector, ShError> {
    ShBasis::new(order, norm)?.eval(direction)
}

pub fn sh_eval_batch(directions: &[Vec3], order: usize, norm: Normalization) -> Result<ShMatrix, ShError> {
    ShBasis::new(order, norm)?.eval_batch(directions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_term() {
        let v = sh_eval(Vec3::new(0.6, 0.0, 0.8), 0, Normalization::SN3D).unwrap();
        assert_eq!(v.coeffs, vec![1.0]);
    }

    #[test]
    fn first_order_axes() {
        let v = sh_eval(Vec3::Z, 1, Normalization::SN3D).unwrap();
        assert_eq!(v.coeffs, vec![1.0, 0.0, 1.0, 0.0]);
        let v = sh_eval(Vec3::X, 1, Normalization::N3D).unwrap();
        assert_eq!(v.coeffs[0], 1.0);
        assert_eq!(v.coeffs[1], 0.0);
        assert_eq!(v.coeffs[2], 0.0);
        assert!((v.coeffs[3] - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(sh_eval(Vec3::Z, 10, Normalization::N3D), Err(ShError::Order(10)));
        assert!(matches!(
            sh_eval(Vec3::new(0.0, 0.0, 1.1), 2, Normalization::N3D),
            Err(ShError::NotUnit { .. })
        ));
        // Small deviations are renormalised.
        let a = sh_eval(Vec3::new(0.0, 0.0, 1.0005), 2, Normalization::N3D).unwrap();
        let b = sh_eval(Vec3::Z, 2, Normalization::N3D).unwrap();
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn batch_reports_row() {
        let dirs = [Vec3::Z, Vec3::new(2.0, 0.0, 0.0)];
        assert_eq!(sh_eval_batch(&dirs, 1, Normalization::N3D).unwrap_err(), ShError::NotUnit { row: 1, norm: 2.0 });
        let empty = sh_eval_batch(&[], 3, Normalization::N3D).unwrap();
        assert_eq!((empty.rows, empty.cols, empty.data.len()), (0, 16, 0));
    }

    #[test]
    fn degree_of_channel() {
        assert_eq!(degree(0), 0);
        assert_eq!(degree(3), 1);
        assert_eq!(degree(4), 2);
        assert_eq!(degree(99), 9);
        assert_eq!(acn(9, 9), 99);
    }
}
