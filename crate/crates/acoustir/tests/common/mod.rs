#![allow(dead_code)]

use std::path::{Path, PathBuf};

use acoustir::core::{trace, PathMeta, PathRecord, PathSet, PathType, Scene, SimConfig, Vec3};
use acoustir::{Overrides, SceneDesc};

pub fn reference_room() -> Scene {
    SceneDesc::benchmark_room().build(&Overrides::default(), Path::new(".")).unwrap()
}

pub fn small_config(seed: u64) -> SimConfig {
    SimConfig { n_diffuse: 2000, n_specular: 200, max_specular_depth: 3, rng_seed: seed, ..SimConfig::default() }
}

pub fn small_trace(seed: u64) -> PathSet {
    trace(&reference_room(), &small_config(seed)).unwrap()
}

/// Writes the reference room as a scene file in `dir`.
pub fn scene_file(dir: &Path) -> PathBuf {
    let p = dir.join("room.json");
    std::fs::write(&p, serde_json::to_string_pretty(&SceneDesc::benchmark_room()).unwrap()).unwrap();
    p
}

pub fn single_path(distance: f64, dir: Vec3, energy: f64, bands: usize) -> PathSet {
    let centers: Vec<f64> = acoustir::core::geometry::OCTAVE_BANDS_HZ[..bands].to_vec();
    let mut p = PathSet::new(PathMeta { band_centers: centers, ..Default::default() });
    p.push(&PathRecord {
        source_index: 0,
        path_type: PathType::Direct,
        distance,
        listener_direction: dir,
        source_direction: -dir,
        relative_speed: 0.0,
        speed_of_sound: 343.0,
        intensities: vec![energy; bands],
    })
    .unwrap();
    p
}

/// Runs the command line in-process.
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = acoustir::cli::run(std::iter::once("acoustir").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
