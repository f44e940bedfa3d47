//! Listener-side ray casting, specular path validation and path energies.
//!
//! Three path populations are produced:
//!
//! * **Direct** – at most one, weighted by the visibility of the source
//!   sphere from the listener.
//! * **Specular** – exact image-source paths. Shoeboxes enumerate every face
//!   sequence up to the depth cap; other scenes discover candidate sequences
//!   with mirror-reflected rays that pass through the source sphere, then
//!   confirm them with [`validate_specular`].
//! * **Diffuse** – stochastic rays that branch diffusely with probability
//!   equal to the surface scattering coefficient and are registered when a
//!   segment enters the source sphere after at least one diffuse bounce.
//!
//! Every ray draws from its own random stream keyed by `(seed, population,
//! ray index)`, so output is independent of how rays are split across
//! workers.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use hashbrown::HashSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{FaceId, Scene, DEFAULT_EPS};
use crate::math;
use crate::paths::{PathMeta, PathRecord, PathSet, PathType};
use crate::vec3::Vec3;

/// Barycentric slack when deciding whether a reflection point lies on a face.
const REFLECTION_TOL: f64 = 1e-9;

/// Plane distance below which a reflection point counts as lying on an edge.
const EDGE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub n_diffuse: usize,
    pub n_specular: usize,
    pub max_specular_depth: u32,
    pub max_diffuse_depth: u32,
    pub rng_seed: u64,
    pub visibility_samples: u32,
    pub eps: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_diffuse: 20_000,
            n_specular: 2_000,
            max_specular_depth: 8,
            max_diffuse_depth: 128,
            rng_seed: 0,
            visibility_samples: 64,
            eps: DEFAULT_EPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error("{0} must be at least 1")]
    ZeroDepth(&'static str),
    #[error("visibility_samples must be at least 1")]
    VisibilitySamples,
    #[error("eps must be positive and finite, got {0}")]
    Eps(f64),
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), TraceError> {
        if self.max_specular_depth == 0 {
            return Err(TraceError::ZeroDepth("max_specular_depth"));
        }
        if self.max_diffuse_depth == 0 {
            return Err(TraceError::ZeroDepth("max_diffuse_depth"));
        }
        if self.visibility_samples == 0 {
            return Err(TraceError::VisibilitySamples);
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(TraceError::Eps(self.eps));
        }
        Ok(())
    }
}

/// Splits `0..n` into consecutive ranges and runs `job` on each.
pub trait Executor {
    /// Outputs must be returned in range order.
    fn run<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> T + Sync;
}

/// Runs everything on the calling thread as one range.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn run<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> T + Sync,
    {
        vec![job(0..n)]
    }
}

#[derive(Clone, Copy)]
#[repr(u64)]
enum Stream {
    Visibility = 1,
    Specular = 2,
    Diffuse = 3,
}

fn ray_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 56) | index);
    rng
}

fn uniform_sphere<R: Rng>(rng: &mut R) -> Vec3 {
    let z = 1.0 - 2.0 * rng.random::<f64>();
    let r = math::sqrt((1.0 - z * z).max(0.0));
    let (s, c) = math::sin_cos(2.0 * PI * rng.random::<f64>());
    Vec3::new(r * c, r * s, z)
}

fn cosine_hemisphere<R: Rng>(rng: &mut R, n: Vec3) -> Vec3 {
    let u: f64 = rng.random();
    let r = math::sqrt(u);
    let (s, c) = math::sin_cos(2.0 * PI * rng.random::<f64>());
    let (t, b) = n.orthonormal_basis();
    (t * (r * c) + b * (r * s) + n * math::sqrt((1.0 - u).max(0.0))).normalized()
}

/// Distance along the ray at which it enters the sphere; zero when the origin
/// is already inside.
pub fn sphere_entry(origin: Vec3, dir: Vec3, center: Vec3, radius: f64) -> Option<f64> {
    let oc = origin - center;
    let c = oc.norm_squared() - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    let b = oc.dot(dir);
    if b >= 0.0 {
        return None;
    }
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    Some(-b - math::sqrt(disc))
}

fn air(scene: &Scene, band: usize, distance: f64) -> f64 {
    math::exp(-scene.params().air_absorption[band] * distance)
}

/// Fraction of sampled rays from the listener into the cone subtended by the
/// source sphere that reach the sphere unoccluded.
pub fn direct_visibility(scene: &Scene, config: &SimConfig) -> f64 {
    let l = scene.listener();
    let s = scene.source();
    let r = scene.params().source_radius;
    let to_source = s - l;
    let d = to_source.norm();
    if d <= r {
        return 1.0;
    }
    let axis = to_source / d;
    let (t, b) = axis.orthonormal_basis();
    let cos_max = math::sqrt(1.0 - (r / d) * (r / d));
    let mut rng = ray_rng(config.rng_seed, Stream::Visibility, 0);
    let n = config.visibility_samples.max(1);
    let mut visible = 0u32;
    for _ in 0..n {
        let cos_t = 1.0 - rng.random::<f64>() * (1.0 - cos_max);
        let sin_t = math::sqrt((1.0 - cos_t * cos_t).max(0.0));
        let (sp, cp) = math::sin_cos(2.0 * PI * rng.random::<f64>());
        let dir = (axis * cos_t + t * (sin_t * cp) + b * (sin_t * sp)).normalized();
        // Grazing samples may miss by rounding; fall back to closest approach.
        let reach = sphere_entry(l, dir, s, r).unwrap_or_else(|| to_source.dot(dir));
        if !scene.segment_occluded(l, l + dir * reach, config.eps, &[]) {
            visible += 1;
        }
    }
    visible as f64 / n as f64
}

fn direct_path(scene: &Scene, config: &SimConfig) -> Option<PathRecord> {
    let v = direct_visibility(scene, config);
    if v <= 0.0 {
        return None;
    }
    let l = scene.listener();
    let s = scene.source();
    let d = l.distance(s);
    // A listener inside the source sphere is treated as sitting on its surface.
    let spread = d.max(scene.params().source_radius);
    let dir = if d > 0.0 { (s - l) / d } else { Vec3::Z };
    let intensities = (0..scene.num_bands())
        .map(|b| v * air(scene, b, d) / (4.0 * PI * spread * spread))
        .collect();
    Some(PathRecord {
        source_index: 0,
        path_type: PathType::Direct,
        distance: d,
        listener_direction: dir,
        source_direction: -dir,
        relative_speed: 0.0,
        speed_of_sound: scene.params().speed_of_sound,
        intensities,
    })
}

/// Builds the exact mirror path for a face sequence ordered from the
/// listener to the source, or `None` when the sequence is not physically
/// realisable.
pub fn validate_specular(scene: &Scene, faces: &[FaceId], eps: f64) -> Option<PathRecord> {
    let all = scene.faces();
    if faces.is_empty() || faces.iter().any(|&f| f as usize >= all.len()) {
        return None;
    }
    if faces.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    let k = faces.len();
    // images[j]: source mirrored across faces[j..].
    let mut images = vec![scene.source(); k + 1];
    for j in (0..k).rev() {
        images[j] = all[faces[j] as usize].mirror(images[j + 1]);
    }
    let bands = scene.num_bands();
    let mut gain = vec![1.0; bands];
    let mut prev = scene.listener();
    let mut before = prev;
    let mut first_point = None;
    for (j, &f) in faces.iter().enumerate() {
        let face = &all[f as usize];
        let target = images[j];
        let d0 = face.signed_distance(prev);
        let d1 = face.signed_distance(target);
        let point = if d0 * d1 < 0.0 {
            prev + (target - prev) * (d0 / (d0 - d1))
        } else if j > 0 && d0.abs() <= EDGE_TOL && faces[j - 1] < f && face.signed_distance(before) * d1 < 0.0 {
            // Hit on the edge shared with the previous face. Only the
            // ascending face order is kept so the path is counted once.
            prev
        } else {
            return None;
        };
        let surface = face
            .surfaces
            .iter()
            .map(|&id| scene.surface(id))
            .find(|s| s.contains_coplanar(point, REFLECTION_TOL))?;
        if scene.segment_occluded(prev, point, eps, &[]) {
            return None;
        }
        let m = &scene.materials()[surface.material];
        for (g, a) in gain.iter_mut().zip(&m.absorption) {
            *g *= (1.0 - a) * (1.0 - m.scattering);
        }
        first_point.get_or_insert(point);
        if point != prev {
            before = prev;
        }
        prev = point;
    }
    let source = scene.source();
    if scene.segment_occluded(prev, source, eps, &[]) {
        return None;
    }
    let distance = scene.listener().distance(images[0]);
    let first = first_point.expect("non-empty sequence");
    let intensities = gain
        .iter()
        .enumerate()
        .map(|(b, g)| g * air(scene, b, distance) / (4.0 * PI * distance * distance))
        .collect();
    Some(PathRecord {
        source_index: 0,
        path_type: PathType::Specular,
        distance,
        listener_direction: (first - scene.listener()).normalized(),
        source_direction: (prev - source).normalized(),
        relative_speed: 0.0,
        speed_of_sound: scene.params().speed_of_sound,
        intensities,
    })
}

/// A validated specular path with the face sequence that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecularPath {
    /// Reflecting faces, listener side first.
    pub faces: Vec<FaceId>,
    pub record: PathRecord,
}

/// Exhaustive image-source enumeration up to `max_depth` reflections.
///
/// Branches are cut when the current image is not strictly in front of the
/// next face, which assumes face normals point toward the propagation
/// space (true for shoeboxes).
pub fn enumerate_image_sources(scene: &Scene, max_depth: u32, eps: f64) -> Vec<SpecularPath> {
    let mut out = Vec::new();
    let mut rev: Vec<FaceId> = Vec::new();
    let mut seq: Vec<FaceId> = Vec::new();
    descend(scene, scene.source(), max_depth, eps, &mut rev, &mut seq, &mut out);
    out
}

fn descend(
    scene: &Scene,
    image: Vec3,
    remaining: u32,
    eps: f64,
    rev: &mut Vec<FaceId>,
    seq: &mut Vec<FaceId>,
    out: &mut Vec<SpecularPath>,
) {
    if remaining == 0 {
        return;
    }
    for face in scene.faces() {
        if rev.last() == Some(&face.id) || face.signed_distance(image) <= 0.0 {
            continue;
        }
        let next = face.mirror(image);
        rev.push(face.id);
        seq.clear();
        seq.extend(rev.iter().rev());
        if let Some(record) = validate_specular(scene, seq, eps) {
            out.push(SpecularPath { faces: seq.clone(), record });
        }
        descend(scene, next, remaining - 1, eps, rev, seq, out);
        rev.pop();
    }
}

/// Face sequences of specular rays that pass through the source sphere,
/// in ray order, for rays in `rays`.
fn specular_candidates(scene: &Scene, config: &SimConfig, rays: Range<usize>) -> Vec<Vec<FaceId>> {
    let src = scene.source();
    let r = scene.params().source_radius;
    let mut out = Vec::new();
    let mut seen: HashSet<Vec<FaceId>> = HashSet::new();
    let mut seq: Vec<FaceId> = Vec::new();
    for i in rays {
        let mut rng = ray_rng(config.rng_seed, Stream::Specular, i as u64);
        let mut origin = scene.listener();
        let mut dir = uniform_sphere(&mut rng);
        seq.clear();
        for bounce in 0..=config.max_specular_depth {
            let hit = scene.ray_intersect(origin, dir, config.eps);
            if !seq.is_empty() {
                let reach = hit.map_or(f64::INFINITY, |h| h.distance);
                if matches!(sphere_entry(origin, dir, src, r), Some(t) if t <= reach) && !seen.contains(&seq) {
                    seen.insert(seq.clone());
                    out.push(seq.clone());
                }
            }
            let Some(hit) = hit else { break };
            if bounce == config.max_specular_depth {
                break;
            }
            let face = scene.surface(hit.surface).face;
            if seq.last() == Some(&face) {
                // Grazing re-hit of the same plane; the sequence cannot validate.
                break;
            }
            seq.push(face);
            let n = if hit.normal.dot(dir) > 0.0 { -hit.normal } else { hit.normal };
            dir = dir.reflect(n).normalized();
            origin = hit.point + n * config.eps;
        }
    }
    out
}

/// Traces diffuse rays `rays` and returns registered sphere hits in ray order.
///
/// A hit is registered only after `min_scatter` diffuse bounces; the full
/// tracer uses 1 (earlier segments belong to the direct and image-source
/// populations), while 0 exposes the raw sphere-hit estimator. The result
/// carries no provenance metadata beyond band centers.
pub fn trace_diffuse_rays(scene: &Scene, config: &SimConfig, rays: Range<usize>, min_scatter: u32) -> PathSet {
    let params = scene.params();
    let src = params.source;
    let r = params.source_radius;
    let bands = scene.num_bands();
    let norm = 1.0 / (PI * r * r);
    let start_weight = if config.n_diffuse > 0 { 1.0 / config.n_diffuse as f64 } else { 0.0 };
    let mut weight = vec![0.0; bands];
    let mut record = PathRecord {
        source_index: 0,
        path_type: PathType::Diffuse,
        distance: 0.0,
        listener_direction: Vec3::Z,
        source_direction: Vec3::Z,
        relative_speed: 0.0,
        speed_of_sound: params.speed_of_sound,
        intensities: vec![0.0; bands],
    };
    let mut out = PathSet::new(PathMeta { band_centers: params.band_centers.clone(), ..Default::default() });
    for i in rays {
        let mut rng = ray_rng(config.rng_seed, Stream::Diffuse, i as u64);
        let mut origin = scene.listener();
        let mut dir = uniform_sphere(&mut rng);
        let first_dir = dir;
        let mut travelled = 0.0;
        let mut scatters = 0u32;
        weight.iter_mut().for_each(|w| *w = start_weight);
        for bounce in 0..=config.max_diffuse_depth {
            let hit = scene.ray_intersect(origin, dir, config.eps);
            if scatters >= min_scatter {
                let reach = hit.map_or(f64::INFINITY, |h| h.distance);
                if let Some(t) = sphere_entry(origin, dir, src, r).filter(|&t| t <= reach) {
                    let d = travelled + t;
                    record.distance = d;
                    record.listener_direction = first_dir;
                    record.source_direction = -dir;
                    for (b, (e, w)) in record.intensities.iter_mut().zip(&weight).enumerate() {
                        *e = w * air(scene, b, d) * norm;
                    }
                    out.push(&record).expect("finite diffuse record");
                }
            }
            let Some(hit) = hit else { break };
            if bounce == config.max_diffuse_depth {
                break;
            }
            travelled += hit.distance;
            let m = &scene.materials()[scene.surface(hit.surface).material];
            let mut alive = false;
            for (w, a) in weight.iter_mut().zip(&m.absorption) {
                *w *= 1.0 - a;
                alive |= *w > 0.0;
            }
            if !alive {
                break;
            }
            let n = if hit.normal.dot(dir) > 0.0 { -hit.normal } else { hit.normal };
            if rng.random::<f64>() < m.scattering {
                dir = cosine_hemisphere(&mut rng, n);
                scatters += 1;
            } else {
                dir = dir.reflect(n).normalized();
            }
            origin = hit.point + n * config.eps;
        }
    }
    out
}

/// All three path populations, before conversion to columns.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceOutput {
    pub direct: Option<PathRecord>,
    pub specular: Vec<SpecularPath>,
    /// Diffuse hits, already in column form (they can number millions).
    pub diffuse: PathSet,
}

impl TraceOutput {
    pub fn len(&self) -> usize {
        self.direct.is_some() as usize + self.specular.len() + self.diffuse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column form: direct first, then specular, then diffuse.
    pub fn into_path_set(self, scene: &Scene, config: &SimConfig) -> PathSet {
        let meta = PathMeta {
            band_centers: scene.params().band_centers.clone(),
            scene_hash: scene.content_hash(),
            seed: config.rng_seed,
            config: Some(*config),
            filters: Vec::new(),
            source_position: scene.source().to_array(),
            listener_position: scene.listener().to_array(),
        };
        let mut set = PathSet::new(meta);
        for r in self.direct.iter().chain(self.specular.iter().map(|s| &s.record)) {
            set.push(r).expect("tracer emits finite, band-consistent records");
        }
        set.append(&self.diffuse).expect("diffuse bands match the scene");
        set
    }
}

pub fn trace_records<E: Executor>(scene: &Scene, config: &SimConfig, exec: &E) -> Result<TraceOutput, TraceError> {
    config.validate()?;
    let direct = direct_path(scene, config);
    let specular = if scene.shoebox_dims().is_some() {
        enumerate_image_sources(scene, config.max_specular_depth, config.eps)
    } else {
        let chunks = exec.run(config.n_specular, |rays| specular_candidates(scene, config, rays));
        let mut seen: HashSet<Vec<FaceId>> = HashSet::new();
        let mut paths = Vec::new();
        for seq in chunks.into_iter().flatten() {
            if seen.contains(&seq) {
                continue;
            }
            if let Some(record) = validate_specular(scene, &seq, config.eps) {
                paths.push(SpecularPath { faces: seq.clone(), record });
            }
            seen.insert(seq);
        }
        paths
    };
    let chunks = exec.run(config.n_diffuse, |rays| trace_diffuse_rays(scene, config, rays, 1));
    let mut diffuse = PathSet::new(PathMeta { band_centers: scene.params().band_centers.clone(), ..Default::default() });
    for c in &chunks {
        diffuse.append(c).expect("diffuse bands match the scene");
    }
    Ok(TraceOutput { direct, specular, diffuse })
}

pub fn trace_with<E: Executor>(scene: &Scene, config: &SimConfig, exec: &E) -> Result<PathSet, TraceError> {
    Ok(trace_records(scene, config, exec)?.into_path_set(scene, config))
}

/// Single-threaded trace.
pub fn trace(scene: &Scene, config: &SimConfig) -> Result<PathSet, TraceError> {
    trace_with(scene, config, &Sequential)
}
