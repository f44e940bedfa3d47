mod common;

use acoustir_core::geometry::DEFAULT_EPS;
use acoustir_core::{Material, Scene, SceneParams, TriangleSpec, Vec3};
use common::{reference_room, rng, unit};
use proptest::prelude::*;
use rand::Rng;

fn random_interior<R: Rng>(rng: &mut R, dims: [f64; 3]) -> Vec3 {
    Vec3::new(
        rng.random_range(0.01..dims[0] - 0.01),
        rng.random_range(0.01..dims[1] - 0.01),
        rng.random_range(0.01..dims[2] - 0.01),
    )
}

/// Random triangle soup inside a closed box, so the tree gets several levels.
fn cluttered_scene() -> Scene {
    let base = reference_room(0.3, 0.1);
    let mut rng = rng(11);
    let mut tris: Vec<TriangleSpec> = base
        .surfaces()
        .iter()
        .map(|s| TriangleSpec { vertices: s.vertices, material: 0, face: s.face })
        .collect();
    let mut face = base.faces().len() as u32;
    while tris.len() < 300 {
        let c = random_interior(&mut rng, [10.0, 4.0, 4.0]);
        let v = [c, c + unit(&mut rng) * 0.6, c + unit(&mut rng) * 0.6];
        if (v[1] - v[0]).cross(v[2] - v[0]).norm() < 1e-3 {
            continue;
        }
        tris.push(TriangleSpec { vertices: v, material: 0, face });
        face += 1;
    }
    let params = SceneParams::new(Vec3::new(9.5, 3.5, 3.5), Vec3::new(0.5, 0.5, 0.5));
    Scene::from_triangles(tris, vec![Material::uniform(0.3, 0.1, 8)], params).unwrap()
}

#[test]
fn accelerator_matches_brute_force() {
    for scene in [reference_room(0.3, 0.1), cluttered_scene()] {
        let mut rng = rng(1);
        let mut hits = 0;
        for _ in 0..1000 {
            let o = random_interior(&mut rng, [10.0, 4.0, 4.0]);
            let d = unit(&mut rng);
            let fast = scene.ray_intersect(o, d, DEFAULT_EPS);
            let slow = scene.ray_intersect_brute_force(o, d, DEFAULT_EPS);
            match (fast, slow) {
                (Some(a), Some(b)) => {
                    assert_eq!(a.surface, b.surface);
                    assert!((a.distance - b.distance).abs() <= 1e-9);
                    hits += 1;
                }
                (None, None) => {}
                (a, b) => panic!("accelerator {a:?} vs brute force {b:?}"),
            }
        }
        assert!(hits > 900);
    }
}

#[test]
fn closed_box_is_watertight() {
    let scene = reference_room(0.3, 0.1);
    let mut rng = rng(2);
    for _ in 0..5000 {
        let o = random_interior(&mut rng, [10.0, 4.0, 4.0]);
        let d = unit(&mut rng);
        let hit = scene.ray_intersect(o, d, DEFAULT_EPS).expect("ray escaped a closed box");
        assert!(hit.distance > 0.0);
        let s = scene.surface(hit.surface);
        assert!((hit.point - s.vertices[0]).dot(s.normal).abs() <= 1e-6);
    }
}

#[test]
fn recast_from_offset_hit_never_rehits_nearby() {
    let scene = cluttered_scene();
    let mut rng = rng(3);
    let eps = DEFAULT_EPS;
    for _ in 0..2000 {
        let o = random_interior(&mut rng, [10.0, 4.0, 4.0]);
        let Some(hit) = scene.ray_intersect(o, unit(&mut rng), eps) else { continue };
        let n = if hit.normal.dot(o - hit.point) >= 0.0 { hit.normal } else { -hit.normal };
        let mut d = unit(&mut rng);
        if d.dot(n) < 0.0 {
            d = -d;
        }
        if let Some(again) = scene.ray_intersect(hit.point + n * eps, d, eps) {
            assert!(again.surface != hit.surface || again.distance >= eps);
        }
    }
}

#[test]
fn floor_and_ceiling_distances() {
    let scene = reference_room(0.3, 0.1);
    let l = Vec3::new(1.0, 1.0, 0.5);
    let down = scene.ray_intersect(l, -Vec3::Z, DEFAULT_EPS).unwrap();
    assert!((down.distance - 0.5).abs() < 1e-12);
    assert!(down.point.z.abs() < 1e-12);
    let up = scene.ray_intersect(l, Vec3::Z, DEFAULT_EPS).unwrap();
    assert!((up.distance - 3.5).abs() < 1e-12);
}

#[test]
fn segment_occlusion_contract() {
    let scene = reference_room(0.3, 0.1);
    let (l, s) = (Vec3::new(1.0, 1.0, 0.5), Vec3::new(5.0, 3.0, 0.5));
    assert!(!scene.segment_occluded(l, s, DEFAULT_EPS, &[]));
    // endpoint on the floor, floor ignored
    let on_floor = Vec3::new(3.0, 2.0, 0.0);
    let floor: Vec<u32> = scene.surfaces().iter().filter(|t| t.face == 4).map(|t| t.id).collect();
    assert!(!scene.segment_occluded(l, on_floor, DEFAULT_EPS, &floor));

    let wall = [
        [Vec3::new(5.0, 0.0, 0.0), Vec3::new(5.0, 4.0, 0.0), Vec3::new(5.0, 4.0, 4.0)],
        [Vec3::new(5.0, 0.0, 0.0), Vec3::new(5.0, 4.0, 4.0), Vec3::new(5.0, 0.0, 4.0)],
    ];
    let params = SceneParams::new(Vec3::new(8.0, 3.0, 0.5), l);
    let base = Scene::shoebox([10.0, 4.0, 4.0], vec![Material::uniform(0.3, 0.1, 8)], [0; 6], params).unwrap();
    let blocked = common::shoebox_with(&base, &wall);
    assert!(blocked.segment_occluded(l, Vec3::new(8.0, 3.0, 0.5), DEFAULT_EPS, &[]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hits_lie_on_their_surface(
        ox in 0.01f64..9.99, oy in 0.01f64..3.99, oz in 0.01f64..3.99,
        dx in -1.0f64..1.0, dy in -1.0f64..1.0, dz in -1.0f64..1.0,
    ) {
        let d = Vec3::new(dx, dy, dz);
        prop_assume!(d.norm() > 1e-3);
        let scene = reference_room(0.3, 0.1);
        let hit = scene.ray_intersect(Vec3::new(ox, oy, oz), d.normalized(), DEFAULT_EPS).unwrap();
        let s = scene.surface(hit.surface);
        prop_assert!(hit.distance > DEFAULT_EPS);
        prop_assert!((hit.point - s.vertices[0]).dot(s.normal).abs() <= 1e-6);
        prop_assert!((hit.normal.norm() - 1.0).abs() <= 1e-6);
    }
}
