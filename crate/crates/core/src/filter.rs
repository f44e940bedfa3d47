//! Energy ranking, path selection policies and cumulative energy curves.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::math;
use crate::paths::PathSet;

/// Which highest-energy paths to keep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FilterPolicy {
    /// Keep at most this many paths.
    TopCount(usize),
    /// Keep `ceil(p * N)` paths, `0 < p <= 1`.
    TopFraction(f64),
    /// Keep the shortest prefix carrying at least fraction `q` of the energy.
    EnergyCoverage(f64),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilterError {
    #[error("fraction must lie in (0, 1], got {0}")]
    Fraction(f64),
    #[error("no energy to rank")]
    NoEnergy,
    #[error("unrecognised filter policy `{0}`")]
    Parse(String),
}

impl FilterPolicy {
    pub fn validate(&self) -> Result<(), FilterError> {
        match *self {
            FilterPolicy::TopCount(_) => Ok(()),
            FilterPolicy::TopFraction(p) | FilterPolicy::EnergyCoverage(p) => {
                if p > 0.0 && p <= 1.0 {
                    Ok(())
                } else {
                    Err(FilterError::Fraction(p))
                }
            }
        }
    }
}

impl fmt::Display for FilterPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterPolicy::TopCount(n) => write!(f, "top-count:{n}"),
            FilterPolicy::TopFraction(p) => write!(f, "top-fraction:{p}"),
            FilterPolicy::EnergyCoverage(q) => write!(f, "energy-coverage:{q}"),
        }
    }
}

impl FromStr for FilterPolicy {
    type Err = FilterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || FilterError::Parse(s.to_string());
        let (kind, value) = s.split_once(':').ok_or_else(err)?;
        let policy = match kind {
            "top-count" => FilterPolicy::TopCount(value.parse().map_err(|_| err())?),
            "top-fraction" => FilterPolicy::TopFraction(value.parse().map_err(|_| err())?),
            "energy-coverage" => FilterPolicy::EnergyCoverage(value.parse().map_err(|_| err())?),
            _ => return Err(err()),
        };
        policy.validate()?;
        Ok(policy)
    }
}

/// `ceil(p * n)`, treating products within 1e-9 of an integer as that integer.
pub fn fraction_count(p: f64, n: usize) -> usize {
    let x = p * n as f64;
    let r = math::round(x);
    let k = if math::abs(x - r) < 1e-9 { r } else { math::ceil(x) };
    (k as usize).min(n)
}

/// Row indices sorted by descending total energy, ties by ascending index.
pub fn rank_by_energy(paths: &PathSet) -> Vec<usize> {
    let energies = paths.energies();
    let mut order: Vec<usize> = (0..paths.len()).collect();
    order.sort_by(|&a, &b| energies[b].total_cmp(&energies[a]).then(a.cmp(&b)));
    order
}

/// Number of ranked paths `policy` retains, given energies in rank order.
fn retained(policy: FilterPolicy, sorted: &[f64]) -> usize {
    let n = sorted.len();
    match policy {
        FilterPolicy::TopCount(k) => k.min(n),
        FilterPolicy::TopFraction(p) => fraction_count(p, n),
        FilterPolicy::EnergyCoverage(q) => {
            let total: f64 = sorted.iter().sum();
            if total <= 0.0 {
                return 0;
            }
            let target = q * total - 1e-12 * total;
            let mut acc = 0.0;
            for (i, e) in sorted.iter().enumerate() {
                acc += e;
                if acc >= target {
                    return i + 1;
                }
            }
            n
        }
    }
}

/// Sorts by total energy and keeps the prefix chosen by `policy`. The policy
/// is appended to the result's metadata.
pub fn filter_paths(paths: &PathSet, policy: FilterPolicy) -> Result<PathSet, FilterError> {
    policy.validate()?;
    let order = rank_by_energy(paths);
    let energies = paths.energies();
    let sorted: Vec<f64> = order.iter().map(|&i| energies[i]).collect();
    let keep = retained(policy, &sorted);
    let mut out = paths.select(&order[..keep]);
    out.meta_mut().filters.push(policy);
    Ok(out)
}

/// Cumulative fraction of total energy captured by the top-k paths, for
/// k = 1..=N.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyCurve(Vec<f64>);

impl EnergyCurve {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Energy fraction held by the top `ceil(p * N)` paths (zero paths give 0).
    pub fn at_fraction(&self, p: f64) -> f64 {
        match fraction_count(p, self.0.len()) {
            0 => 0.0,
            k => self.0[k - 1],
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.0.windows(2).all(|w| w[1] >= w[0])
    }

    /// Each increment is no larger than the one before it.
    pub fn is_concave(&self) -> bool {
        let mut prev = f64::INFINITY;
        let mut last = 0.0;
        for &v in &self.0 {
            let inc = v - last;
            // Rounding in the running sum can wobble equal increments by an ulp.
            if inc > prev + 1e-15 {
                return false;
            }
            prev = inc;
            last = v;
        }
        true
    }
}

pub fn cumulative_energy_curve(paths: &PathSet) -> Result<EnergyCurve, FilterError> {
    let energies = paths.energies();
    let mut sorted = energies;
    sorted.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = sorted.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(FilterError::NoEnergy);
    }
    let mut acc = 0.0;
    let mut curve: Vec<f64> = sorted
        .iter()
        .map(|e| {
            acc += e;
            (acc / total).min(1.0)
        })
        .collect();
    if let Some(last) = curve.last_mut() {
        *last = 1.0;
    }
    Ok(EnergyCurve(curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{PathMeta, PathRecord, PathType};
    use crate::vec3::Vec3;
    use alloc::vec;

    fn set(energies: &[f64]) -> PathSet {
        let mut p = PathSet::new(PathMeta { band_centers: vec![500.0], ..Default::default() });
        for &e in energies {
            p.push(&PathRecord {
                source_index: 0,
                path_type: PathType::Diffuse,
                distance: 1.0,
                listener_direction: Vec3::X,
                source_direction: Vec3::X,
                relative_speed: 0.0,
                speed_of_sound: 343.0,
                intensities: vec![e],
            })
            .unwrap();
        }
        p
    }

    #[test]
    fn top_count_sorts_and_truncates() {
        let f = filter_paths(&set(&[1.0, 5.0, 1.0, 3.0]), FilterPolicy::TopCount(2)).unwrap();
        assert_eq!(f.energies(), vec![5.0, 3.0]);
        assert_eq!(f.meta().filters, vec![FilterPolicy::TopCount(2)]);
    }

    #[test]
    fn energy_coverage_and_fraction() {
        let p = set(&[5.0, 3.0, 1.0, 1.0]);
        assert_eq!(filter_paths(&p, FilterPolicy::EnergyCoverage(0.8)).unwrap().len(), 2);
        assert_eq!(filter_paths(&p, FilterPolicy::TopFraction(0.5)).unwrap().len(), 2);
        assert_eq!(filter_paths(&p, FilterPolicy::EnergyCoverage(1.0)).unwrap().len(), 4);
        assert_eq!(filter_paths(&p, FilterPolicy::TopCount(0)).unwrap().len(), 0);
    }

    #[test]
    fn ties_break_by_index() {
        let p = set(&[1.0, 2.0, 1.0]);
        let order = rank_by_energy(&p);
        assert_eq!(order, vec![1, 0, 2]);
    }

    #[test]
    fn curve_examples() {
        let c = cumulative_energy_curve(&set(&[5.0, 3.0, 1.0, 1.0])).unwrap();
        assert_eq!(c.values(), &[0.5, 0.8, 0.9, 1.0]);
        assert!(c.is_monotone() && c.is_concave());
        assert_eq!(cumulative_energy_curve(&set(&[2.0])).unwrap().values(), &[1.0]);
        assert_eq!(cumulative_energy_curve(&set(&[0.0, 0.0])), Err(FilterError::NoEnergy));
        assert_eq!(cumulative_energy_curve(&set(&[])), Err(FilterError::NoEnergy));
    }

    #[test]
    fn fraction_count_rounds_near_integers() {
        assert_eq!(fraction_count(0.1, 30), 3);
        assert_eq!(fraction_count(0.5, 4), 2);
        assert_eq!(fraction_count(0.001, 16), 1);
        assert_eq!(fraction_count(1.0, 7), 7);
    }

    #[test]
    fn bad_fractions_are_rejected() {
        let p = set(&[1.0]);
        assert!(filter_paths(&p, FilterPolicy::TopFraction(0.0)).is_err());
        assert!(filter_paths(&p, FilterPolicy::EnergyCoverage(1.5)).is_err());
    }

    #[test]
    fn policy_strings_roundtrip() {
        for p in [FilterPolicy::TopCount(7), FilterPolicy::TopFraction(0.25), FilterPolicy::EnergyCoverage(0.9)] {
            assert_eq!(p.to_string().parse::<FilterPolicy>().unwrap(), p);
        }
        assert!("bogus:1".parse::<FilterPolicy>().is_err());
    }
}
