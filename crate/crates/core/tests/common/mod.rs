#![allow(dead_code)]

use acoustir_core::{Material, Scene, SceneParams, TriangleSpec, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn reference_room(absorption: f64, scattering: f64) -> Scene {
    let params = SceneParams::new(Vec3::new(5.0, 3.0, 0.5), Vec3::new(1.0, 1.0, 0.5));
    Scene::shoebox([10.0, 4.0, 4.0], vec![Material::uniform(absorption, scattering, 8)], [0; 6], params).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Shoebox triangles of `scene` plus `extra`, numbered after the walls.
pub fn shoebox_with(scene: &Scene, extra: &[[Vec3; 3]]) -> Scene {
    let mut tris: Vec<TriangleSpec> = scene
        .surfaces()
        .iter()
        .map(|s| TriangleSpec { vertices: s.vertices, material: s.material, face: s.face })
        .collect();
    let first = scene.faces().len() as u32;
    for (i, v) in extra.iter().enumerate() {
        tris.push(TriangleSpec { vertices: *v, material: 0, face: first + i as u32 });
    }
    Scene::from_triangles(tris, scene.materials().to_vec(), scene.params().clone()).unwrap()
}
