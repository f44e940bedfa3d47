//! JSON scene descriptions and simulation config files.
//!
//! A scene file names either a `shoebox` or a Wavefront OBJ `mesh`, a table
//! of materials and the mapping from walls (or OBJ objects) to materials:
//!
//! ```json
//! {
//!   "shoebox": {"lx": 10, "ly": 4, "lz": 4},
//!   "materials": {"wall": {"absorption": 0.3, "scattering": 0.1}},
//!   "surface_materials": "wall",
//!   "source": {"position": [5, 3, 0.5], "radius": 0.25},
//!   "listener": {"position": [1, 1, 0.5]}
//! }
//! ```
//!
//! `absorption` is either one value for every band or a per-band list.
//! `bands`, `speed_of_sound` and `air_absorption` are optional.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use acoustir_core::geometry::{FaceId, OCTAVE_BANDS_HZ, SHOEBOX_WALLS};
use acoustir_core::{Material, Scene, SceneError, SceneParams, SimConfig, TriangleSpec, Vec3};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SceneFileError {
    #[error("scene not found: {}", .0.display())]
    NotFound(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("scene must give exactly one of `shoebox` or `mesh`")]
    Geometry,
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),
    #[error("no material assigned to `{0}`")]
    Unassigned(String),
    #[error("material `{name}` has {got} absorption values for {bands} bands")]
    AbsorptionBands { name: String, got: usize, bands: usize },
    #[error("mesh {}: {source}", path.display())]
    Mesh { path: PathBuf, source: tobj::LoadError },
    #[error(transparent)]
    Scene(#[from] SceneError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shoebox: Option<ShoeboxDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<PathBuf>,
    pub materials: BTreeMap<String, MaterialDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface_materials: Option<SurfaceMaterials>,
    pub source: SourceDesc,
    pub listener: ListenerDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_of_sound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub air_absorption: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShoeboxDesc {
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialDesc {
    pub absorption: Absorption,
    #[serde(default)]
    pub scattering: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Absorption {
    Uniform(f64),
    PerBand(Vec<f64>),
}

/// One material everywhere, or a map keyed by wall name (shoebox) or object
/// name (mesh). The key `default` catches everything unlisted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SurfaceMaterials {
    All(String),
    Map(BTreeMap<String, String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceDesc {
    pub position: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ListenerDesc {
    pub position: [f64; 3],
}

/// Values applied on top of a scene file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    /// Multiplies geometry and both placements.
    pub scale: Option<f64>,
    pub bands: Option<Vec<f64>>,
    pub source_radius: Option<f64>,
    pub speed_of_sound: Option<f64>,
    /// Replaces the scattering coefficient of every material.
    pub scattering: Option<f64>,
    pub listener: Option<[f64; 3]>,
}

impl SceneDesc {
    /// The 10 x 4 x 4 m room used throughout the benchmarks: uniform
    /// absorption 0.3, scattering 0.1, listener (1, 1, 0.5), source (5, 3, 0.5).
    pub fn benchmark_room() -> SceneDesc {
        SceneDesc {
            shoebox: Some(ShoeboxDesc { lx: 10.0, ly: 4.0, lz: 4.0 }),
            mesh: None,
            materials: BTreeMap::from([(
                "wall".to_string(),
                MaterialDesc { absorption: Absorption::Uniform(0.3), scattering: 0.1 },
            )]),
            surface_materials: Some(SurfaceMaterials::All("wall".to_string())),
            source: SourceDesc { position: [5.0, 3.0, 0.5], radius: None },
            listener: ListenerDesc { position: [1.0, 1.0, 0.5] },
            bands: None,
            speed_of_sound: None,
            air_absorption: None,
        }
    }

    pub fn from_json(text: &str) -> Result<SceneDesc, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Builds the scene. Relative mesh paths resolve against `base_dir`.
    pub fn build(&self, overrides: &Overrides, base_dir: &Path) -> Result<Scene, SceneFileError> {
        let bands = overrides
            .bands
            .clone()
            .or_else(|| self.bands.clone())
            .unwrap_or_else(|| OCTAVE_BANDS_HZ.to_vec());
        let b = bands.len();
        let names: Vec<&String> = self.materials.keys().collect();
        let materials = self
            .materials
            .iter()
            .map(|(name, m)| {
                let absorption = match &m.absorption {
                    Absorption::Uniform(a) => vec![*a; b],
                    Absorption::PerBand(v) if v.len() == b => v.clone(),
                    Absorption::PerBand(v) => {
                        return Err(SceneFileError::AbsorptionBands { name: name.clone(), got: v.len(), bands: b })
                    }
                };
                Ok(Material::new(absorption, overrides.scattering.unwrap_or(m.scattering)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        // First listed key present in the map wins, then `default`.
        let lookup = |keys: &[&str]| -> Result<usize, SceneFileError> {
            let name = match &self.surface_materials {
                Some(SurfaceMaterials::All(n)) => n.as_str(),
                Some(SurfaceMaterials::Map(map)) => {
                    match keys.iter().find_map(|k| map.get(*k)).or_else(|| map.get("default")) {
                        Some(n) => n.as_str(),
                        None if names.len() == 1 => names[0].as_str(),
                        None => return Err(SceneFileError::Unassigned(keys.join("/"))),
                    }
                }
                None if names.len() == 1 => names[0].as_str(),
                None => return Err(SceneFileError::Unassigned(keys.join("/"))),
            };
            names
                .iter()
                .position(|n| n.as_str() == name)
                .ok_or_else(|| SceneFileError::UnknownMaterial(name.to_string()))
        };

        let mut params = SceneParams::new(Vec3::from_array(self.source.position), Vec3::from_array(self.listener.position));
        if let Some(l) = overrides.listener {
            params.listener = Vec3::from_array(l);
        }
        if let Some(r) = overrides.source_radius.or(self.source.radius) {
            params.source_radius = r;
        }
        if let Some(c) = overrides.speed_of_sound.or(self.speed_of_sound) {
            params.speed_of_sound = c;
        }
        params.air_absorption = match &self.air_absorption {
            Some(a) => a.clone(),
            None => vec![0.0; b],
        };
        params.band_centers = bands;

        let scene = match (&self.shoebox, &self.mesh) {
            (Some(d), None) => {
                let mut walls = [0; 6];
                for (slot, wall) in walls.iter_mut().zip(SHOEBOX_WALLS) {
                    *slot = lookup(&[wall])?;
                }
                Scene::shoebox([d.lx, d.ly, d.lz], materials, walls, params)?
            }
            (None, Some(mesh)) => {
                let path = base_dir.join(mesh);
                let tris = load_obj_triangles(&path, &lookup)?;
                Scene::from_triangles(tris, materials, params)?
            }
            _ => return Err(SceneFileError::Geometry),
        };
        match overrides.scale {
            Some(s) if s != 1.0 => Ok(scene.scaled(s)?),
            _ => Ok(scene),
        }
    }
}

/// Every triangle becomes its own reflecting face. Objects are matched to
/// materials by object name first, then by their OBJ material name.
fn load_obj_triangles(
    path: &Path,
    lookup: &dyn Fn(&[&str]) -> Result<usize, SceneFileError>,
) -> Result<Vec<TriangleSpec>, SceneFileError> {
    if !path.exists() {
        return Err(SceneFileError::NotFound(path.to_path_buf()));
    }
    let opts = tobj::LoadOptions { triangulate: true, single_index: true, ..Default::default() };
    let (models, mtl) =
        tobj::load_obj(path, &opts).map_err(|source| SceneFileError::Mesh { path: path.to_path_buf(), source })?;
    let mtl = mtl.unwrap_or_default();
    let mut tris = Vec::new();
    for model in &models {
        let mesh = &model.mesh;
        let material = match mesh.material_id.and_then(|i| mtl.get(i)) {
            Some(mat) => lookup(&[&model.name, &mat.name])?,
            None => lookup(&[&model.name])?,
        };
        let vertex = |i: u32| {
            let i = i as usize * 3;
            Vec3::new(mesh.positions[i] as f64, mesh.positions[i + 1] as f64, mesh.positions[i + 2] as f64)
        };
        for idx in mesh.indices.chunks_exact(3) {
            let face = tris.len() as FaceId;
            tris.push(TriangleSpec { vertices: [vertex(idx[0]), vertex(idx[1]), vertex(idx[2])], material, face });
        }
    }
    Ok(tris)
}

/// Reads and builds a scene file.
pub fn load_scene(path: &Path, overrides: &Overrides) -> Result<Scene, SceneFileError> {
    let desc = read_scene_desc(path)?;
    desc.build(overrides, path.parent().unwrap_or(Path::new(".")))
}

pub fn read_scene_desc(path: &Path) -> Result<SceneDesc, SceneFileError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(SceneFileError::NotFound(path.to_path_buf())),
        Err(source) => return Err(SceneFileError::Io { path: path.to_path_buf(), source }),
    };
    SceneDesc::from_json(&text).map_err(|source| SceneFileError::Parse { path: path.to_path_buf(), source })
}

/// Serialized form of [`SimConfig`]; every field is optional in files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfigDesc {
    pub n_diffuse: usize,
    pub n_specular: usize,
    pub max_specular_depth: u32,
    pub max_diffuse_depth: u32,
    pub seed: u64,
    pub visibility_samples: u32,
    pub eps: f64,
}

impl Default for SimConfigDesc {
    fn default() -> Self {
        SimConfig::default().into()
    }
}

impl From<SimConfig> for SimConfigDesc {
    fn from(c: SimConfig) -> Self {
        SimConfigDesc {
            n_diffuse: c.n_diffuse,
            n_specular: c.n_specular,
            max_specular_depth: c.max_specular_depth,
            max_diffuse_depth: c.max_diffuse_depth,
            seed: c.rng_seed,
            visibility_samples: c.visibility_samples,
            eps: c.eps,
        }
    }
}

impl From<SimConfigDesc> for SimConfig {
    fn from(c: SimConfigDesc) -> Self {
        SimConfig {
            n_diffuse: c.n_diffuse,
            n_specular: c.n_specular,
            max_specular_depth: c.max_specular_depth,
            max_diffuse_depth: c.max_diffuse_depth,
            rng_seed: c.seed,
            visibility_samples: c.visibility_samples,
            eps: c.eps,
        }
    }
}

pub fn load_config(path: &Path) -> Result<SimConfig, SceneFileError> {
    let text = fs::read_to_string(path).map_err(|source| SceneFileError::Io { path: path.to_path_buf(), source })?;
    let desc: SimConfigDesc =
        serde_json::from_str(&text).map_err(|source| SceneFileError::Parse { path: path.to_path_buf(), source })?;
    Ok(desc.into())
}
