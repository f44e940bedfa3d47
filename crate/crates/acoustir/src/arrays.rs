//! Path data as named contiguous arrays.
//!
//! [`PathArrays`] borrows the columns of a [`PathSet`] without copying;
//! [`OwnedPathArrays`] is an editable snapshot that can be turned back into
//! a path set and rendered.

use std::collections::BTreeMap;
use std::path::Path;

use acoustir_core::{Executor, FilterPolicy, PathMeta, PathSet, PathSetError, SimConfig};

use crate::scene_file::{Overrides, SceneDesc, SceneFileError};
use crate::synth::{synthesize_ir, AmbisonicIR, BandConfig, SynthError};

/// Field names in the order they are listed by [`PathArrays::fields`].
pub const FIELDS: [&str; 8] = [
    "source_indices",
    "path_types",
    "distances",
    "listener_directions",
    "source_directions",
    "relative_speeds",
    "speeds_of_sound",
    "intensities",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArrayData<'a> {
    I32(&'a [i32]),
    I8(&'a [i8]),
    F32(&'a [f32]),
}

impl ArrayData<'_> {
    pub fn len(&self) -> usize {
        match self {
            ArrayData::I32(v) => v.len(),
            ArrayData::I8(v) => v.len(),
            ArrayData::F32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A row-major array with its shape.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedArray<'a> {
    pub name: &'static str,
    pub shape: Vec<usize>,
    pub data: ArrayData<'a>,
}

/// Zero-copy view of a path set's columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathArrays<'a> {
    pub source_indices: &'a [i32],
    pub path_types: &'a [i8],
    pub distances: &'a [f32],
    pub listener_directions: &'a [[f32; 3]],
    pub source_directions: &'a [[f32; 3]],
    pub relative_speeds: &'a [f32],
    pub speeds_of_sound: &'a [f32],
    /// Row-major `[len, num_bands]`.
    pub intensities: &'a [f32],
    pub num_bands: usize,
}

impl<'a> PathArrays<'a> {
    pub fn view(paths: &'a PathSet) -> PathArrays<'a> {
        let c = paths.columns();
        PathArrays {
            source_indices: &c.source_index,
            path_types: &c.path_type,
            distances: &c.distance,
            listener_directions: &c.listener_direction,
            source_directions: &c.source_direction,
            relative_speeds: &c.relative_speed,
            speeds_of_sound: &c.speed_of_sound,
            intensities: &c.intensities,
            num_bands: paths.num_bands(),
        }
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, name: &str) -> Option<NamedArray<'a>> {
        let n = self.len();
        let (name, shape, data) = match name {
            "source_indices" => (FIELDS[0], vec![n], ArrayData::I32(self.source_indices)),
            "path_types" => (FIELDS[1], vec![n], ArrayData::I8(self.path_types)),
            "distances" => (FIELDS[2], vec![n], ArrayData::F32(self.distances)),
            "listener_directions" => (FIELDS[3], vec![n, 3], ArrayData::F32(self.listener_directions.as_flattened())),
            "source_directions" => (FIELDS[4], vec![n, 3], ArrayData::F32(self.source_directions.as_flattened())),
            "relative_speeds" => (FIELDS[5], vec![n], ArrayData::F32(self.relative_speeds)),
            "speeds_of_sound" => (FIELDS[6], vec![n], ArrayData::F32(self.speeds_of_sound)),
            "intensities" => (FIELDS[7], vec![n, self.num_bands], ArrayData::F32(self.intensities)),
            _ => return None,
        };
        Some(NamedArray { name, shape, data })
    }

    pub fn fields(&self) -> Vec<NamedArray<'a>> {
        FIELDS.iter().map(|f| self.get(f).expect("known field")).collect()
    }

    pub fn to_owned(&self, band_centers: &[f64]) -> OwnedPathArrays {
        OwnedPathArrays {
            source_indices: self.source_indices.to_vec(),
            path_types: self.path_types.to_vec(),
            distances: self.distances.to_vec(),
            listener_directions: self.listener_directions.to_vec(),
            source_directions: self.source_directions.to_vec(),
            relative_speeds: self.relative_speeds.to_vec(),
            speeds_of_sound: self.speeds_of_sound.to_vec(),
            intensities: self.intensities.to_vec(),
            band_centers: band_centers.to_vec(),
        }
    }
}

/// Editable copy of the path arrays plus the band centers they refer to.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OwnedPathArrays {
    pub source_indices: Vec<i32>,
    pub path_types: Vec<i8>,
    pub distances: Vec<f32>,
    pub listener_directions: Vec<[f32; 3]>,
    pub source_directions: Vec<[f32; 3]>,
    pub relative_speeds: Vec<f32>,
    pub speeds_of_sound: Vec<f32>,
    pub intensities: Vec<f32>,
    pub band_centers: Vec<f64>,
}

impl OwnedPathArrays {
    pub fn from_paths(paths: &PathSet) -> OwnedPathArrays {
        PathArrays::view(paths).to_owned(&paths.meta().band_centers)
    }

    pub fn view(&self) -> PathArrays<'_> {
        PathArrays {
            source_indices: &self.source_indices,
            path_types: &self.path_types,
            distances: &self.distances,
            listener_directions: &self.listener_directions,
            source_directions: &self.source_directions,
            relative_speeds: &self.relative_speeds,
            speeds_of_sound: &self.speeds_of_sound,
            intensities: &self.intensities,
            num_bands: self.band_centers.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Keeps the rows for which `keep(row)` is true.
    pub fn retain_rows(&mut self, mut keep: impl FnMut(usize) -> bool) {
        let b = self.band_centers.len();
        let rows: Vec<usize> = (0..self.len()).filter(|&r| keep(r)).collect();
        fn pick<T: Copy>(v: &[T], rows: &[usize]) -> Vec<T> {
            rows.iter().map(|&r| v[r]).collect()
        }
        self.source_indices = pick(&self.source_indices, &rows);
        self.path_types = pick(&self.path_types, &rows);
        self.distances = pick(&self.distances, &rows);
        self.listener_directions = pick(&self.listener_directions, &rows);
        self.source_directions = pick(&self.source_directions, &rows);
        self.relative_speeds = pick(&self.relative_speeds, &rows);
        self.speeds_of_sound = pick(&self.speeds_of_sound, &rows);
        self.intensities = rows.iter().flat_map(|&r| self.intensities[r * b..(r + 1) * b].iter().copied()).collect();
    }

    /// Validates shapes and values and builds a path set carrying `meta`
    /// (whose band centers are replaced by this snapshot's).
    pub fn into_path_set(self, mut meta: PathMeta) -> Result<PathSet, PathSetError> {
        meta.band_centers = self.band_centers;
        let cols = acoustir_core::PathColumns {
            source_index: self.source_indices,
            path_type: self.path_types,
            distance: self.distances,
            listener_direction: self.listener_directions,
            source_direction: self.source_directions,
            relative_speed: self.relative_speeds,
            speed_of_sound: self.speeds_of_sound,
            intensities: self.intensities,
        };
        PathSet::from_columns(meta, cols)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ArraysError {
    #[error(transparent)]
    Scene(#[from] SceneFileError),
    #[error(transparent)]
    Trace(#[from] acoustir_core::TraceError),
    #[error(transparent)]
    Filter(#[from] acoustir_core::FilterError),
    #[error("malformed arrays: {0}")]
    Shape(#[from] PathSetError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

/// Traces one path set per listener position and optionally filters it.
/// Listener ids are positions in `listeners`; relative mesh paths resolve
/// against `base_dir`.
pub fn trace_listeners<E: Executor>(
    desc: &SceneDesc,
    base_dir: &Path,
    overrides: &Overrides,
    listeners: &[[f64; 3]],
    config: &SimConfig,
    policy: Option<FilterPolicy>,
    exec: &E,
) -> Result<BTreeMap<usize, OwnedPathArrays>, ArraysError> {
    let mut out = BTreeMap::new();
    for (id, &pos) in listeners.iter().enumerate() {
        let o = Overrides { listener: Some(pos), ..overrides.clone() };
        let scene = desc.build(&o, base_dir)?;
        let mut paths = acoustir_core::trace_with(&scene, config, exec)?;
        if let Some(p) = policy {
            paths = acoustir_core::filter_paths(&paths, p)?;
        }
        out.insert(id, OwnedPathArrays::from_paths(&paths));
    }
    Ok(out)
}

/// Renders (possibly edited) arrays exactly as the file pipeline would.
pub fn auralize_arrays(
    arrays: &OwnedPathArrays,
    order: usize,
    sample_rate: u32,
    seed: u64,
) -> Result<AmbisonicIR, ArraysError> {
    let paths = arrays.clone().into_path_set(PathMeta::default())?;
    let config = BandConfig { sample_rate, seed, ..BandConfig::new(arrays.band_centers.clone()) };
    Ok(synthesize_ir(&paths, order, &config)?)
}
