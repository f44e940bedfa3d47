//! Scene representation and ray queries.

mod bvh;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use sha2::{Digest, Sha256};

pub use self::bvh::{Aabb, Bvh, MAX_LEAF_SIZE};
use crate::vec3::Vec3;

/// Stable index of one scene triangle.
pub type SurfaceId = u32;

/// Index of a planar reflector: a group of coplanar triangles that reflect as
/// one mirror. Each shoebox wall is one face; mesh triangles are their own face.
pub type FaceId = u32;

/// Default offset used to step off surfaces, in meters.
pub const DEFAULT_EPS: f64 = 1e-4;

/// Octave band centers used when a scene does not specify its own.
pub const OCTAVE_BANDS_HZ: [f64; 8] = [62.5, 125.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0];

/// Shoebox wall names, indexed by face id.
pub const SHOEBOX_WALLS: [&str; 6] = ["x_min", "x_max", "y_min", "y_max", "floor", "ceiling"];

/// Barycentric slack that keeps shared triangle edges watertight.
const EDGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SceneError {
    #[error("degenerate dimension: {axis} = {value}")]
    DegenerateDimension { axis: &'static str, value: f64 },
    #[error("material {material}: absorption {value} outside [0, 1]")]
    Absorption { material: usize, value: f64 },
    #[error("material {material}: scattering {value} outside [0, 1]")]
    Scattering { material: usize, value: f64 },
    #[error("material {material}: {got} absorption bands, scene has {expected}")]
    BandCount { material: usize, got: usize, expected: usize },
    #[error("surface {surface}: unknown material {material}")]
    UnknownMaterial { surface: SurfaceId, material: usize },
    #[error("surface {0}: degenerate triangle")]
    DegenerateTriangle(SurfaceId),
    #[error("surface {0}: non-finite vertex")]
    NonFinite(SurfaceId),
    #[error("face {0}: triangles are not coplanar")]
    NonCoplanarFace(FaceId),
    #[error("face ids must be dense, face {0} has no triangles")]
    EmptyFace(FaceId),
    #[error("{0} lies outside the scene geometry")]
    OutsideGeometry(&'static str),
    #[error("source radius must be positive and finite, got {0}")]
    SourceRadius(f64),
    #[error("speed of sound must be positive and finite, got {0}")]
    SpeedOfSound(f64),
    #[error("band centers must be non-empty, positive and strictly increasing")]
    Bands,
    #[error("air absorption: {got} coefficients for {expected} bands, or a negative/non-finite value")]
    AirAbsorption { got: usize, expected: usize },
    #[error("scale factor must be positive and finite, got {0}")]
    Scale(f64),
}

/// Per-band absorption with a single broadband scattering coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Material {
    pub absorption: Vec<f64>,
    pub scattering: f64,
}

impl Material {
    pub fn new(absorption: Vec<f64>, scattering: f64) -> Self {
        Material { absorption, scattering }
    }

    /// Same absorption in every one of `bands` bands.
    pub fn uniform(absorption: f64, scattering: f64, bands: usize) -> Self {
        Material { absorption: vec![absorption; bands], scattering }
    }

    fn validate(&self, index: usize, bands: usize) -> Result<(), SceneError> {
        if self.absorption.len() != bands {
            return Err(SceneError::BandCount { material: index, got: self.absorption.len(), expected: bands });
        }
        if let Some(&a) = self.absorption.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(SceneError::Absorption { material: index, value: a });
        }
        if !(0.0..=1.0).contains(&self.scattering) {
            return Err(SceneError::Scattering { material: index, value: self.scattering });
        }
        Ok(())
    }
}

/// Input triangle for scene construction.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleSpec {
    pub vertices: [Vec3; 3],
    pub material: usize,
    pub face: FaceId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Surface {
    pub id: SurfaceId,
    pub vertices: [Vec3; 3],
    /// Unit normal from the winding order (v1 - v0) x (v2 - v0).
    pub normal: Vec3,
    pub material: usize,
    pub face: FaceId,
}

impl Surface {
    /// Möller–Trumbore. Returns the ray parameter of the plane crossing when
    /// it falls inside the triangle, regardless of sign.
    #[inline]
    pub fn intersect(&self, origin: Vec3, dir: Vec3) -> Option<f64> {
        let [v0, v1, v2] = self.vertices;
        let e1 = v1 - v0;
        let e2 = v2 - v0;
        let p = dir.cross(e2);
        let det = e1.dot(p);
        if det.abs() <= 1e-14 * e1.norm_squared().max(e2.norm_squared()) {
            return None;
        }
        let inv = 1.0 / det;
        let s = origin - v0;
        let u = s.dot(p) * inv;
        if !(-EDGE_TOL..=1.0 + EDGE_TOL).contains(&u) {
            return None;
        }
        let q = s.cross(e1);
        let v = dir.dot(q) * inv;
        if v < -EDGE_TOL || u + v > 1.0 + EDGE_TOL {
            return None;
        }
        Some(e2.dot(q) * inv)
    }

    /// Whether a point already on the triangle's plane lies inside it.
    pub fn contains_coplanar(&self, p: Vec3, tol: f64) -> bool {
        let [v0, v1, v2] = self.vertices;
        let e1 = v1 - v0;
        let e2 = v2 - v0;
        let w = p - v0;
        let d11 = e1.dot(e1);
        let d12 = e1.dot(e2);
        let d22 = e2.dot(e2);
        let w1 = w.dot(e1);
        let w2 = w.dot(e2);
        let den = d11 * d22 - d12 * d12;
        let v = (d22 * w1 - d12 * w2) / den;
        let u = (d11 * w2 - d12 * w1) / den;
        v >= -tol && u >= -tol && u + v <= 1.0 + tol
    }

    pub fn area(&self) -> f64 {
        let [v0, v1, v2] = self.vertices;
        0.5 * (v1 - v0).cross(v2 - v0).norm()
    }
}

/// A planar reflector made of one or more coplanar triangles.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub id: FaceId,
    pub normal: Vec3,
    pub point: Vec3,
    pub surfaces: Vec<SurfaceId>,
}

impl Face {
    #[inline]
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p - self.point)
    }

    /// Mirror image of `p` across the face plane.
    #[inline]
    pub fn mirror(&self, p: Vec3) -> Vec3 {
        p - self.normal * (2.0 * self.signed_distance(p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub surface: SurfaceId,
    pub point: Vec3,
    pub distance: f64,
    pub normal: Vec3,
}

/// Acoustic placement and propagation parameters shared by every scene kind.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneParams {
    pub source: Vec3,
    pub source_radius: f64,
    pub listener: Vec3,
    pub speed_of_sound: f64,
    pub band_centers: Vec<f64>,
    /// Per-band air attenuation in nepers per meter (energy).
    pub air_absorption: Vec<f64>,
}

impl SceneParams {
    /// Octave bands, 343 m/s, 0.25 m source sphere and no air absorption.
    pub fn new(source: Vec3, listener: Vec3) -> Self {
        SceneParams {
            source,
            source_radius: 0.25,
            listener,
            speed_of_sound: 343.0,
            band_centers: OCTAVE_BANDS_HZ.to_vec(),
            air_absorption: vec![0.0; OCTAVE_BANDS_HZ.len()],
        }
    }

    pub fn num_bands(&self) -> usize {
        self.band_centers.len()
    }

    fn validate(&self) -> Result<(), SceneError> {
        let b = &self.band_centers;
        if b.is_empty() || b.iter().any(|c| !(c.is_finite() && *c > 0.0)) || b.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SceneError::Bands);
        }
        if self.air_absorption.len() != b.len()
            || self.air_absorption.iter().any(|a| !(a.is_finite() && *a >= 0.0))
        {
            return Err(SceneError::AirAbsorption { got: self.air_absorption.len(), expected: b.len() });
        }
        if !(self.source_radius.is_finite() && self.source_radius > 0.0) {
            return Err(SceneError::SourceRadius(self.source_radius));
        }
        if !(self.speed_of_sound.is_finite() && self.speed_of_sound > 0.0) {
            return Err(SceneError::SpeedOfSound(self.speed_of_sound));
        }
        if !self.source.is_finite() {
            return Err(SceneError::OutsideGeometry("source"));
        }
        if !self.listener.is_finite() {
            return Err(SceneError::OutsideGeometry("listener"));
        }
        Ok(())
    }
}

/// Immutable scene: triangles, materials, placements and the accelerator.
#[derive(Clone, Debug)]
pub struct Scene {
    surfaces: Vec<Surface>,
    faces: Vec<Face>,
    materials: Vec<Material>,
    params: SceneParams,
    shoebox: Option<[f64; 3]>,
    bvh: Bvh,
}

impl Scene {
    pub fn from_triangles(
        triangles: Vec<TriangleSpec>,
        materials: Vec<Material>,
        params: SceneParams,
    ) -> Result<Scene, SceneError> {
        Scene::build(triangles, materials, params, None)
    }

    /// Axis-aligned box `[0, lx] x [0, ly] x [0, lz]`, two triangles per
    /// wall, normals facing the interior. `wall_materials` follows
    /// [`SHOEBOX_WALLS`].
    pub fn shoebox(
        dims: [f64; 3],
        materials: Vec<Material>,
        wall_materials: [usize; 6],
        params: SceneParams,
    ) -> Result<Scene, SceneError> {
        for (axis, &v) in ["lx", "ly", "lz"].into_iter().zip(&dims) {
            if !(v.is_finite() && v > 0.0) {
                return Err(SceneError::DegenerateDimension { axis, value: v });
            }
        }
        Scene::build(shoebox_triangles(dims, wall_materials), materials, params, Some(dims))
    }

    fn build(
        triangles: Vec<TriangleSpec>,
        materials: Vec<Material>,
        params: SceneParams,
        shoebox: Option<[f64; 3]>,
    ) -> Result<Scene, SceneError> {
        params.validate()?;
        let bands = params.num_bands();
        for (i, m) in materials.iter().enumerate() {
            m.validate(i, bands)?;
        }
        let mut surfaces = Vec::with_capacity(triangles.len());
        for (i, t) in triangles.into_iter().enumerate() {
            let id = i as SurfaceId;
            if !t.vertices.iter().all(|v| v.is_finite()) {
                return Err(SceneError::NonFinite(id));
            }
            if t.material >= materials.len() {
                return Err(SceneError::UnknownMaterial { surface: id, material: t.material });
            }
            let [v0, v1, v2] = t.vertices;
            let n = (v1 - v0).cross(v2 - v0);
            if 0.5 * n.norm() <= 1e-12 {
                return Err(SceneError::DegenerateTriangle(id));
            }
            surfaces.push(Surface { id, vertices: t.vertices, normal: n.normalized(), material: t.material, face: t.face });
        }
        let faces = collect_faces(&surfaces)?;
        let tris: Vec<[Vec3; 3]> = surfaces.iter().map(|s| s.vertices).collect();
        let bvh = Bvh::build(&tris);
        if !surfaces.is_empty() {
            let mut exact = Aabb::EMPTY;
            surfaces.iter().flat_map(|s| s.vertices).for_each(|v| exact.grow(v));
            if !exact.strictly_contains(params.source) {
                return Err(SceneError::OutsideGeometry("source"));
            }
            if !exact.strictly_contains(params.listener) {
                return Err(SceneError::OutsideGeometry("listener"));
            }
        }
        Ok(Scene { surfaces, faces, materials, params, shoebox, bvh })
    }

    /// Copy with every vertex and both placements multiplied by `factor`.
    /// Materials, source radius and band data are unchanged.
    pub fn scaled(&self, factor: f64) -> Result<Scene, SceneError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(SceneError::Scale(factor));
        }
        let mut params = self.params.clone();
        params.source = params.source * factor;
        params.listener = params.listener * factor;
        let tris = self
            .surfaces
            .iter()
            .map(|s| TriangleSpec { vertices: s.vertices.map(|v| v * factor), material: s.material, face: s.face })
            .collect();
        let shoebox = self.shoebox.map(|d| d.map(|v| v * factor));
        Scene::build(tris, self.materials.clone(), params, shoebox)
    }

    pub fn surfaces(&self) -> &[Surface] {
        &self.surfaces
    }

    pub fn surface(&self, id: SurfaceId) -> &Surface {
        &self.surfaces[id as usize]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn materials(&self) -> &[Material] {
        &self.materials
    }

    pub fn params(&self) -> &SceneParams {
        &self.params
    }

    pub fn source(&self) -> Vec3 {
        self.params.source
    }

    pub fn listener(&self) -> Vec3 {
        self.params.listener
    }

    pub fn num_bands(&self) -> usize {
        self.params.num_bands()
    }

    /// Box dimensions when the scene was built as a shoebox.
    pub fn shoebox_dims(&self) -> Option<[f64; 3]> {
        self.shoebox
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    /// Nearest hit with distance greater than `eps`.
    pub fn ray_intersect(&self, origin: Vec3, dir: Vec3, eps: f64) -> Option<Hit> {
        let (id, t) = self
            .bvh
            .nearest(origin, dir, eps, f64::INFINITY, |i| self.surfaces[i as usize].intersect(origin, dir))?;
        Some(self.make_hit(id, origin, dir, t))
    }

    /// Reference all-triangle version of [`Scene::ray_intersect`].
    pub fn ray_intersect_brute_force(&self, origin: Vec3, dir: Vec3, eps: f64) -> Option<Hit> {
        let mut best: Option<(SurfaceId, f64)> = None;
        for s in &self.surfaces {
            if let Some(t) = s.intersect(origin, dir) {
                if t > eps && best.is_none_or(|(_, bt)| t < bt) {
                    best = Some((s.id, t));
                }
            }
        }
        best.map(|(id, t)| self.make_hit(id, origin, dir, t))
    }

    fn make_hit(&self, id: SurfaceId, origin: Vec3, dir: Vec3, t: f64) -> Hit {
        Hit { surface: id, point: origin + dir * t, distance: t, normal: self.surfaces[id as usize].normal }
    }

    /// Whether any surface outside `ignore` crosses the open segment
    /// `(a + eps d, b - eps d)`.
    pub fn segment_occluded(&self, a: Vec3, b: Vec3, eps: f64, ignore: &[SurfaceId]) -> bool {
        let delta = b - a;
        let len = delta.norm();
        if len <= 2.0 * eps {
            return false;
        }
        let dir = delta / len;
        self.bvh.any(a, dir, eps, len - eps, |i| {
            if ignore.contains(&i) {
                None
            } else {
                self.surfaces[i as usize].intersect(a, dir)
            }
        })
    }

    /// Hex SHA-256 over the scene's geometry, materials and parameters.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        let mut put = |x: f64| h.update(x.to_le_bytes());
        for s in &self.surfaces {
            s.vertices.iter().flat_map(|v| v.to_array()).for_each(&mut put);
            put(s.material as f64);
            put(s.face as f64);
        }
        for m in &self.materials {
            m.absorption.iter().copied().for_each(&mut put);
            put(m.scattering);
        }
        let p = &self.params;
        p.source.to_array().into_iter().for_each(&mut put);
        p.listener.to_array().into_iter().for_each(&mut put);
        put(p.source_radius);
        put(p.speed_of_sound);
        p.band_centers.iter().copied().for_each(&mut put);
        p.air_absorption.iter().copied().for_each(&mut put);
        let digest = h.finalize();
        let mut out = String::with_capacity(64);
        for b in digest.iter() {
            let _ = core::fmt::write(&mut out, format_args!("{b:02x}"));
        }
        out
    }
}

fn collect_faces(surfaces: &[Surface]) -> Result<Vec<Face>, SceneError> {
    let count = surfaces.iter().map(|s| s.face as usize + 1).max().unwrap_or(0);
    let mut faces: Vec<Option<Face>> = vec![None; count];
    for s in surfaces {
        match &mut faces[s.face as usize] {
            slot @ None => {
                *slot = Some(Face { id: s.face, normal: s.normal, point: s.vertices[0], surfaces: vec![s.id] });
            }
            Some(f) => {
                let aligned = f.normal.dot(s.normal) > 1.0 - 1e-9;
                let on_plane = s.vertices.iter().all(|&v| f.signed_distance(v).abs() <= 1e-6);
                if !(aligned && on_plane) {
                    return Err(SceneError::NonCoplanarFace(s.face));
                }
                f.surfaces.push(s.id);
            }
        }
    }
    faces
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.ok_or(SceneError::EmptyFace(i as FaceId)))
        .collect()
}

fn shoebox_triangles(dims: [f64; 3], wall_materials: [usize; 6]) -> Vec<TriangleSpec> {
    let [lx, ly, lz] = dims;
    let center = Vec3::new(lx / 2.0, ly / 2.0, lz / 2.0);
    let p = Vec3::new;
    // Corners of each wall in order around the rectangle.
    let walls: [[Vec3; 4]; 6] = [
        [p(0.0, 0.0, 0.0), p(0.0, ly, 0.0), p(0.0, ly, lz), p(0.0, 0.0, lz)],
        [p(lx, 0.0, 0.0), p(lx, ly, 0.0), p(lx, ly, lz), p(lx, 0.0, lz)],
        [p(0.0, 0.0, 0.0), p(lx, 0.0, 0.0), p(lx, 0.0, lz), p(0.0, 0.0, lz)],
        [p(0.0, ly, 0.0), p(lx, ly, 0.0), p(lx, ly, lz), p(0.0, ly, lz)],
        [p(0.0, 0.0, 0.0), p(lx, 0.0, 0.0), p(lx, ly, 0.0), p(0.0, ly, 0.0)],
        [p(0.0, 0.0, lz), p(lx, 0.0, lz), p(lx, ly, lz), p(0.0, ly, lz)],
    ];
    let mut out = Vec::with_capacity(12);
    for (face, c) in walls.iter().enumerate() {
        for tri in [[c[0], c[1], c[2]], [c[0], c[2], c[3]]] {
            let n = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
            let tri = if n.dot(center - tri[0]) < 0.0 { [tri[0], tri[2], tri[1]] } else { tri };
            out.push(TriangleSpec { vertices: tri, material: wall_materials[face], face: face as FaceId });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn reference_box() -> Scene {
        let params = SceneParams::new(Vec3::new(5.0, 3.0, 0.5), Vec3::new(1.0, 1.0, 0.5));
        Scene::shoebox([10.0, 4.0, 4.0], vec![Material::uniform(0.3, 0.1, 8)], [0; 6], params).unwrap()
    }

    #[test]
    fn shoebox_has_twelve_inward_triangles() {
        let s = reference_box();
        assert_eq!(s.surfaces().len(), 12);
        assert_eq!(s.faces().len(), 6);
        assert_eq!(s.materials().len(), 1);
        let c = Vec3::new(5.0, 2.0, 2.0);
        for surf in s.surfaces() {
            assert!(surf.normal.dot(c - surf.vertices[0]) > 0.0);
            let [v0, v1, v2] = surf.vertices;
            assert!(surf.normal.dot(v1 - v0).abs() < 1e-6);
            assert!(surf.normal.dot(v2 - v0).abs() < 1e-6);
        }
    }

    #[test]
    fn degenerate_width_is_rejected() {
        let params = SceneParams::new(Vec3::new(5.0, 3.0, 0.5), Vec3::new(1.0, 1.0, 0.5));
        let err = Scene::shoebox([10.0, 0.0, 4.0], vec![Material::uniform(0.3, 0.1, 8)], [0; 6], params).unwrap_err();
        assert!(err.to_string().starts_with("degenerate dimension"));
    }

    #[test]
    fn material_ranges_are_checked() {
        let params = SceneParams::new(Vec3::new(5.0, 3.0, 0.5), Vec3::new(1.0, 1.0, 0.5));
        let bad = Material::uniform(1.2, 0.1, 8);
        assert!(matches!(
            Scene::shoebox([10.0, 4.0, 4.0], vec![bad], [0; 6], params.clone()),
            Err(SceneError::Absorption { .. })
        ));
        let bad = Material::uniform(0.3, -0.1, 8);
        assert!(matches!(
            Scene::shoebox([10.0, 4.0, 4.0], vec![bad], [0; 6], params),
            Err(SceneError::Scattering { .. })
        ));
    }

    #[test]
    fn placement_outside_is_rejected() {
        let params = SceneParams::new(Vec3::new(11.0, 3.0, 0.5), Vec3::new(1.0, 1.0, 0.5));
        let err = Scene::shoebox([10.0, 4.0, 4.0], vec![Material::uniform(0.3, 0.1, 8)], [0; 6], params).unwrap_err();
        assert_eq!(err, SceneError::OutsideGeometry("source"));
    }

    #[test]
    fn scale_multiplies_geometry_and_positions() {
        let s = reference_box();
        let t = s.scaled(2.0).unwrap();
        assert_eq!(t.shoebox_dims(), Some([20.0, 8.0, 8.0]));
        assert_eq!(t.listener(), Vec3::new(2.0, 2.0, 1.0));
        assert_eq!(t.source(), Vec3::new(10.0, 6.0, 1.0));
        for (a, b) in s.surfaces().iter().zip(t.surfaces()) {
            for k in 0..3 {
                assert_eq!(a.vertices[k] * 2.0, b.vertices[k]);
            }
        }
        assert_eq!(s.materials(), t.materials());
    }

    #[test]
    fn floor_and_ceiling_hits() {
        let s = reference_box();
        let o = Vec3::new(1.0, 1.0, 0.5);
        let down = s.ray_intersect(o, -Vec3::Z, DEFAULT_EPS).unwrap();
        assert!((down.distance - 0.5).abs() < 1e-12);
        assert_eq!(s.surface(down.surface).face, 4);
        let up = s.ray_intersect(o, Vec3::Z, DEFAULT_EPS).unwrap();
        assert!((up.distance - 3.5).abs() < 1e-12);
        assert_eq!(s.surface(up.surface).face, 5);
    }

    #[test]
    fn tangent_ray_does_not_self_intersect() {
        let s = reference_box();
        let o = Vec3::new(3.0, 2.0, 0.0);
        let hit = s.ray_intersect(o, Vec3::X, DEFAULT_EPS).unwrap();
        assert_ne!(s.surface(hit.surface).face, 4);
        assert!((hit.distance - 7.0).abs() < 1e-9);
    }

    #[test]
    fn occlusion_queries() {
        let s = reference_box();
        assert!(!s.segment_occluded(Vec3::new(1.0, 1.0, 0.5), Vec3::new(5.0, 3.0, 0.5), DEFAULT_EPS, &[]));
        // Segment leaving the room through the x_max wall.
        assert!(s.segment_occluded(Vec3::new(9.0, 2.0, 2.0), Vec3::new(11.0, 2.0, 2.0), DEFAULT_EPS, &[]));
        // Endpoint exactly on the floor, floor triangles ignored.
        let floor: Vec<SurfaceId> = s.faces()[4].surfaces.clone();
        assert!(!s.segment_occluded(Vec3::new(1.0, 1.0, 0.5), Vec3::new(2.0, 2.0, 0.0), DEFAULT_EPS, &floor));
    }

    #[test]
    fn empty_scene_has_no_hits() {
        let params = SceneParams::new(Vec3::new(5.0, 3.0, 0.5), Vec3::new(1.0, 1.0, 0.5));
        let s = Scene::from_triangles(Vec::new(), Vec::new(), params).unwrap();
        assert!(s.ray_intersect(Vec3::ZERO, Vec3::X, DEFAULT_EPS).is_none());
        assert!(!s.segment_occluded(Vec3::ZERO, Vec3::X, DEFAULT_EPS, &[]));
    }

    #[test]
    fn content_hash_is_stable_and_sensitive() {
        let a = reference_box();
        assert_eq!(a.content_hash(), reference_box().content_hash());
        assert_ne!(a.content_hash(), a.scaled(2.0).unwrap().content_hash());
        assert_eq!(a.content_hash().len(), 64);
    }
}
