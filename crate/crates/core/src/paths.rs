//! Per-path records and the column-oriented path set.

use alloc::string::String;
use alloc::vec::Vec;

use crate::filter::FilterPolicy;
use crate::tracer::SimConfig;
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(i8)]
pub enum PathType {
    Direct = 0,
    Specular = 1,
    Diffuse = 2,
    /// Reserved code; never produced by the tracer.
    Diffraction = 3,
}

impl PathType {
    pub const fn code(self) -> i8 {
        self as i8
    }

    pub const fn from_code(code: i8) -> Option<PathType> {
        match code {
            0 => Some(PathType::Direct),
            1 => Some(PathType::Specular),
            2 => Some(PathType::Diffuse),
            3 => Some(PathType::Diffraction),
            _ => None,
        }
    }
}

/// One validated propagation path, in full precision.
#[derive(Clone, Debug, PartialEq)]
pub struct PathRecord {
    pub source_index: u32,
    pub path_type: PathType,
    /// Total propagation length in meters.
    pub distance: f64,
    /// Direction of arrival: from the listener toward the first path segment.
    pub listener_direction: Vec3,
    /// From the source toward its adjacent path segment.
    pub source_direction: Vec3,
    /// Always zero; sources and listeners are stationary.
    pub relative_speed: f64,
    pub speed_of_sound: f64,
    /// Per-band energy relative to unit source emission, per unit receiver area.
    pub intensities: Vec<f64>,
}

impl PathRecord {
    pub fn total_energy(&self) -> f64 {
        self.intensities.iter().sum()
    }
}

/// Provenance carried alongside a path set and persisted as file metadata.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathMeta {
    pub band_centers: Vec<f64>,
    pub scene_hash: String,
    pub seed: u64,
    pub config: Option<SimConfig>,
    /// Filters applied so far, oldest first.
    pub filters: Vec<FilterPolicy>,
    pub source_position: [f64; 3],
    pub listener_position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PathSetError {
    #[error("column `{column}` has {got} rows, expected {expected}")]
    ColumnLength { column: &'static str, got: usize, expected: usize },
    #[error("path set has {got} bands, expected {expected}")]
    BandCount { got: usize, expected: usize },
    #[error("row {row}: invalid path type code {code}")]
    PathTypeCode { row: usize, code: i8 },
    #[error("column `{column}` row {row}: non-finite value")]
    NonFinite { column: &'static str, row: usize },
    #[error("column `{column}` row {row}: negative energy")]
    NegativeEnergy { column: &'static str, row: usize },
}

/// Raw column storage using the persisted element types.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathColumns {
    pub source_index: Vec<i32>,
    pub path_type: Vec<i8>,
    pub distance: Vec<f32>,
    pub listener_direction: Vec<[f32; 3]>,
    pub source_direction: Vec<[f32; 3]>,
    pub relative_speed: Vec<f32>,
    pub speed_of_sound: Vec<f32>,
    /// Row-major `[rows, bands]`.
    pub intensities: Vec<f32>,
}

/// Column-oriented collection of paths. Every column has one row per path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSet {
    meta: PathMeta,
    num_bands: usize,
    cols: PathColumns,
}

impl PathSet {
    /// Empty set whose band count follows `meta.band_centers`.
    pub fn new(meta: PathMeta) -> PathSet {
        let num_bands = meta.band_centers.len();
        PathSet { meta, num_bands, cols: PathColumns::default() }
    }

    pub fn from_columns(meta: PathMeta, cols: PathColumns) -> Result<PathSet, PathSetError> {
        let set = PathSet { num_bands: meta.band_centers.len(), meta, cols };
        set.validate()?;
        Ok(set)
    }

    /// Checks column lengths, path type codes, finiteness and energy signs.
    pub fn validate(&self) -> Result<(), PathSetError> {
        let c = &self.cols;
        let n = c.source_index.len();
        let check = |column: &'static str, got: usize, expected: usize| {
            if got == expected {
                Ok(())
            } else {
                Err(PathSetError::ColumnLength { column, got, expected })
            }
        };
        check("path_type", c.path_type.len(), n)?;
        check("distance", c.distance.len(), n)?;
        check("listener_direction", c.listener_direction.len(), n)?;
        check("source_direction", c.source_direction.len(), n)?;
        check("relative_speed", c.relative_speed.len(), n)?;
        check("speed_of_sound", c.speed_of_sound.len(), n)?;
        check("intensities", c.intensities.len(), n * self.num_bands)?;
        if let Some(row) = c.path_type.iter().position(|&t| PathType::from_code(t).is_none()) {
            return Err(PathSetError::PathTypeCode { row, code: c.path_type[row] });
        }
        let finite = |column: &'static str, v: &[f32], stride: usize| {
            match v.iter().position(|x| !x.is_finite()) {
                Some(i) => Err(PathSetError::NonFinite { column, row: i / stride }),
                None => Ok(()),
            }
        };
        finite("distance", &c.distance, 1)?;
        finite("listener_direction", c.listener_direction.as_flattened(), 3)?;
        finite("source_direction", c.source_direction.as_flattened(), 3)?;
        finite("relative_speed", &c.relative_speed, 1)?;
        finite("speed_of_sound", &c.speed_of_sound, 1)?;
        finite("intensities", &c.intensities, self.num_bands.max(1))?;
        if let Some(i) = c.intensities.iter().position(|&e| e < 0.0) {
            return Err(PathSetError::NegativeEnergy { column: "intensities", row: i / self.num_bands });
        }
        Ok(())
    }

    /// Appends a record, narrowing to the stored precision.
    pub fn push(&mut self, r: &PathRecord) -> Result<(), PathSetError> {
        if r.intensities.len() != self.num_bands {
            return Err(PathSetError::BandCount { got: r.intensities.len(), expected: self.num_bands });
        }
        let row = self.len();
        let vals = [r.distance, r.relative_speed, r.speed_of_sound];
        if !vals.iter().all(|v| v.is_finite())
            || !r.listener_direction.is_finite()
            || !r.source_direction.is_finite()
        {
            return Err(PathSetError::NonFinite { column: "record", row });
        }
        if r.intensities.iter().any(|e| !e.is_finite()) {
            return Err(PathSetError::NonFinite { column: "intensities", row });
        }
        if r.intensities.iter().any(|&e| e < 0.0) {
            return Err(PathSetError::NegativeEnergy { column: "intensities", row });
        }
        let c = &mut self.cols;
        c.source_index.push(r.source_index as i32);
        c.path_type.push(r.path_type.code());
        c.distance.push(r.distance as f32);
        c.listener_direction.push(r.listener_direction.to_array().map(|v| v as f32));
        c.source_direction.push(r.source_direction.to_array().map(|v| v as f32));
        c.relative_speed.push(r.relative_speed as f32);
        c.speed_of_sound.push(r.speed_of_sound as f32);
        c.intensities.extend(r.intensities.iter().map(|&e| e as f32));
        Ok(())
    }

    /// Appends all rows of `other`, which must have the same band count.
    pub fn append(&mut self, other: &PathSet) -> Result<(), PathSetError> {
        if other.num_bands != self.num_bands {
            return Err(PathSetError::BandCount { got: other.num_bands, expected: self.num_bands });
        }
        let (c, o) = (&mut self.cols, &other.cols);
        c.source_index.extend_from_slice(&o.source_index);
        c.path_type.extend_from_slice(&o.path_type);
        c.distance.extend_from_slice(&o.distance);
        c.listener_direction.extend_from_slice(&o.listener_direction);
        c.source_direction.extend_from_slice(&o.source_direction);
        c.relative_speed.extend_from_slice(&o.relative_speed);
        c.speed_of_sound.extend_from_slice(&o.speed_of_sound);
        c.intensities.extend_from_slice(&o.intensities);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.cols.source_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_bands(&self) -> usize {
        self.num_bands
    }

    pub fn meta(&self) -> &PathMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut PathMeta {
        &mut self.meta
    }

    pub fn columns(&self) -> &PathColumns {
        &self.cols
    }

    pub fn into_parts(self) -> (PathMeta, PathColumns) {
        (self.meta, self.cols)
    }

    pub fn path_type(&self, row: usize) -> PathType {
        PathType::from_code(self.cols.path_type[row]).expect("validated path type")
    }

    pub fn intensities(&self, row: usize) -> &[f32] {
        let b = self.num_bands;
        &self.cols.intensities[row * b..(row + 1) * b]
    }

    /// Sum of band energies for one row, accumulated in f64.
    pub fn total_energy(&self, row: usize) -> f64 {
        self.intensities(row).iter().map(|&e| e as f64).sum()
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.total_energy(i)).collect()
    }

    pub fn grand_total_energy(&self) -> f64 {
        self.cols.intensities.iter().map(|&e| e as f64).sum()
    }

    /// Number of rows of each path type, indexed by type code.
    pub fn count_by_type(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for &t in &self.cols.path_type {
            out[t as usize] += 1;
        }
        out
    }

    /// New set holding the given rows in the given order; metadata is cloned.
    pub fn select(&self, rows: &[usize]) -> PathSet {
        let c = &self.cols;
        let b = self.num_bands;
        let mut out = PathColumns {
            source_index: Vec::with_capacity(rows.len()),
            path_type: Vec::with_capacity(rows.len()),
            distance: Vec::with_capacity(rows.len()),
            listener_direction: Vec::with_capacity(rows.len()),
            source_direction: Vec::with_capacity(rows.len()),
            relative_speed: Vec::with_capacity(rows.len()),
            speed_of_sound: Vec::with_capacity(rows.len()),
            intensities: Vec::with_capacity(rows.len() * b),
        };
        for &r in rows {
            out.source_index.push(c.source_index[r]);
            out.path_type.push(c.path_type[r]);
            out.distance.push(c.distance[r]);
            out.listener_direction.push(c.listener_direction[r]);
            out.source_direction.push(c.source_direction[r]);
            out.relative_speed.push(c.relative_speed[r]);
            out.speed_of_sound.push(c.speed_of_sound[r]);
            out.intensities.extend_from_slice(&c.intensities[r * b..(r + 1) * b]);
        }
        PathSet { meta: self.meta.clone(), num_bands: b, cols: out }
    }
}
