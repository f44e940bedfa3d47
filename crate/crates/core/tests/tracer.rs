mod common;

use std::f64::consts::PI;
use std::ops::Range;

use acoustir_core::tracer::trace_diffuse_rays;
use acoustir_core::{
    direct_visibility, trace, trace_records, trace_with, Executor, FaceId, Material, PathType, Scene, SceneParams,
    Sequential, SimConfig, Vec3,
};
use common::{reference_room, shoebox_with};
use proptest::prelude::*;

/// Runs the job over `parts` ranges, last range first, then restores order.
struct Chunked(usize);

impl Executor for Chunked {
    fn run<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> T + Sync,
    {
        let step = n.div_ceil(self.0).max(1);
        let ranges: Vec<_> = (0..n).step_by(step).map(|s| s..(s + step).min(n)).collect();
        let mut out: Vec<(usize, T)> = ranges.iter().enumerate().rev().map(|(i, r)| (i, job(r.clone()))).collect();
        out.sort_by_key(|(i, _)| *i);
        out.into_iter().map(|(_, t)| t).collect()
    }
}

/// Image coordinate along one axis after |n| reflections.
fn image_coord(n: i32, src: f64, len: f64) -> f64 {
    let k = 2 * n.div_euclid(2) + if n.rem_euclid(2) == 1 { 2 } else { 0 };
    if n.rem_euclid(2) == 0 {
        k as f64 * len + src
    } else {
        k as f64 * len - src
    }
}

/// Face crossings between listener and image, listener side first.
fn lattice_faces(listener: Vec3, image: Vec3, dims: [f64; 3]) -> Vec<FaceId> {
    let (l, m) = (listener.to_array(), image.to_array());
    let mut hits: Vec<(f64, FaceId)> = Vec::new();
    for axis in 0..3 {
        let (a, b) = (l[axis] / dims[axis], m[axis] / dims[axis]);
        let (lo, hi) = (a.min(b).ceil() as i64, a.max(b).floor() as i64);
        for k in lo..=hi {
            if (k as f64 - a).abs() < 1e-12 {
                continue;
            }
            let t = (k as f64 - a) / (b - a);
            hits.push((t, (2 * axis + k.rem_euclid(2) as usize) as FaceId));
        }
    }
    // a path through an edge meets both faces at once; lower face id first
    hits.sort_by(|x, y| if (x.0 - y.0).abs() < 1e-9 { x.1.cmp(&y.1) } else { x.0.total_cmp(&y.0) });
    hits.into_iter().map(|h| h.1).collect()
}

#[test]
fn shoebox_specular_matches_lattice() {
    let scene = reference_room(0.3, 0.0);
    let dims = [10.0, 4.0, 4.0];
    let cfg = SimConfig { n_diffuse: 0, max_specular_depth: 3, ..SimConfig::default() };
    let out = trace_records(&scene, &cfg, &Sequential).unwrap();
    let (s, l) = (scene.source().to_array(), scene.listener());
    let mut expected = Vec::new();
    for i in -3i32..=3 {
        for j in -3i32..=3 {
            for k in -3i32..=3 {
                let order = i.abs() + j.abs() + k.abs();
                if order == 0 || order > 3 {
                    continue;
                }
                let img = Vec3::new(image_coord(i, s[0], dims[0]), image_coord(j, s[1], dims[1]), image_coord(k, s[2], dims[2]));
                let faces = lattice_faces(l, img, dims);
                assert_eq!(faces.len(), order as usize, "image {i},{j},{k}");
                expected.push((faces, l.distance(img)));
            }
        }
    }
    assert_eq!(expected.len(), 62);
    assert_eq!(out.specular.len(), 62);
    for (faces, d) in expected {
        let p = out.specular.iter().find(|p| p.faces == faces).unwrap_or_else(|| panic!("missing {faces:?}"));
        assert!((p.record.distance - d).abs() < 1e-9, "{faces:?}: {} vs {d}", p.record.distance);
        let e = 0.7f64.powi(faces.len() as i32) / (4.0 * PI * d * d);
        for v in &p.record.intensities {
            assert!((v - e).abs() <= 1e-12 * e, "{faces:?}: {v} vs {e}");
        }
    }
}

fn cube(listener: Vec3, source: Vec3, radius: f64) -> Scene {
    let mut params = SceneParams::new(source, listener);
    params.source_radius = radius;
    Scene::shoebox([10.0; 3], vec![Material::uniform(0.3, 0.2, 8)], [0; 6], params).unwrap()
}

#[test]
fn half_plane_occluder_hides_half_the_source() {
    let base = cube(Vec3::new(2.0, 5.0, 5.0), Vec3::new(8.0, 5.0, 5.0), 1.0);
    let tri = [Vec3::new(5.0, 5.0, 0.5), Vec3::new(5.0, 5.0, 9.5), Vec3::new(5.0, 9.5, 5.0)];
    let scene = shoebox_with(&base, &[tri]);
    let cfg = SimConfig { visibility_samples: 10_000, ..SimConfig::default() };
    let v = direct_visibility(&scene, &cfg);
    assert!((v - 0.5).abs() <= 0.02, "visibility {v}");
    assert_eq!(direct_visibility(&base, &cfg), 1.0);
}

#[test]
fn full_wall_removes_direct_path() {
    let base = cube(Vec3::new(2.0, 5.0, 5.0), Vec3::new(8.0, 5.0, 5.0), 1.0);
    let wall = [
        [Vec3::new(5.0, 0.0, 0.0), Vec3::new(5.0, 10.0, 0.0), Vec3::new(5.0, 10.0, 10.0)],
        [Vec3::new(5.0, 0.0, 0.0), Vec3::new(5.0, 10.0, 10.0), Vec3::new(5.0, 0.0, 10.0)],
    ];
    let scene = shoebox_with(&base, &wall);
    let cfg = SimConfig { n_diffuse: 2000, n_specular: 500, ..SimConfig::default() };
    assert_eq!(direct_visibility(&scene, &cfg), 0.0);
    let out = trace_records(&scene, &cfg, &Sequential).unwrap();
    assert!(out.direct.is_none());
    // nothing leaks through a closed wall
    assert!(out.specular.is_empty() && out.diffuse.is_empty());
}

#[test]
fn chunking_does_not_change_output() {
    let base = reference_room(0.2, 0.4);
    let scene = shoebox_with(&base, &[[Vec3::new(3.0, 0.5, 0.2), Vec3::new(3.0, 3.5, 0.2), Vec3::new(3.0, 2.0, 3.5)]]);
    let cfg = SimConfig { n_diffuse: 3000, n_specular: 1500, max_specular_depth: 4, rng_seed: 11, ..SimConfig::default() };
    let a = trace(&scene, &cfg).unwrap();
    let b = trace_with(&scene, &cfg, &Chunked(7)).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let c = trace(&scene, &SimConfig { rng_seed: 12, ..cfg }).unwrap();
    assert_ne!(a, c);
}

#[test]
fn diffuse_energy_is_stable_across_seeds() {
    let scene = reference_room(0.3, 0.5);
    let totals: Vec<f64> = (0..4)
        .map(|seed| {
            let cfg = SimConfig { n_diffuse: 20_000, rng_seed: seed, ..SimConfig::default() };
            let set = trace_diffuse_rays(&scene, &cfg, 0..cfg.n_diffuse, 1);
            (0..set.len()).map(|r| set.intensities(r)[0] as f64).sum()
        })
        .collect();
    let mean = totals.iter().sum::<f64>() / totals.len() as f64;
    for t in &totals {
        assert!((t / mean - 1.0).abs() < 0.1, "{totals:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn paths_respect_geometry(
        a in 0.05f64..0.9, s in 0.0f64..1.0, seed in any::<u64>(),
        lx in 0.5f64..9.5, ly in 0.5f64..3.5, lz in 0.5f64..3.5,
    ) {
        let mut params = SceneParams::new(Vec3::new(5.0, 3.0, 0.5), Vec3::new(lx, ly, lz));
        params.source_radius = 0.25;
        let scene = Scene::shoebox([10.0, 4.0, 4.0], vec![Material::uniform(a, s, 8)], [0; 6], params).unwrap();
        let cfg = SimConfig { n_diffuse: 300, max_specular_depth: 3, rng_seed: seed, ..SimConfig::default() };
        let paths = trace(&scene, &cfg).unwrap();
        let gap = scene.listener().distance(scene.source());
        for r in 0..paths.len() {
            let rec = paths.columns();
            let d = rec.distance[r] as f64;
            prop_assert!(d.is_finite());
            match paths.path_type(r) {
                PathType::Direct => prop_assert!((d - gap).abs() < 1e-4),
                _ => prop_assert!(d >= gap - 0.25 - 1e-4, "row {} distance {} gap {}", r, d, gap),
            }
            for v in [rec.listener_direction[r], rec.source_direction[r]] {
                let n = v.iter().map(|c| (*c as f64).powi(2)).sum::<f64>().sqrt();
                prop_assert!((n - 1.0).abs() < 1e-5);
            }
            for e in paths.intensities(r) {
                prop_assert!(e.is_finite() && *e >= 0.0);
            }
            if paths.path_type(r) == PathType::Specular {
                let bound = 1.0 / (4.0 * PI * d * d);
                prop_assert!((paths.intensities(r)[0] as f64) <= bound * (1.0 + 1e-5));
            }
        }
    }

    #[test]
    fn more_absorption_never_adds_energy(
        a in 0.0f64..0.8, extra in 0.01f64..0.2, s in 0.0f64..1.0, seed in any::<u64>(),
    ) {
        let cfg = SimConfig { n_diffuse: 400, max_specular_depth: 3, rng_seed: seed, ..SimConfig::default() };
        let lo = trace(&reference_room(a, s), &cfg).unwrap();
        let hi = trace(&reference_room(a + extra, s), &cfg).unwrap();
        prop_assert!(hi.grand_total_energy() <= lo.grand_total_energy() * (1.0 + 1e-9));
    }
}
