//! Core kernels for listener-side acoustic ray tracing.
//!
//! Everything here is `no_std` (with `alloc`): scene geometry and the BVH,
//! the direct/specular/diffuse path tracer, energy-based path filtering,
//! real spherical harmonics up to order 9 and sparse Ambisonic echogram
//! rendering. File formats, threads and FFT band splitting live in the
//! companion `acoustir` crate.

#![no_std]

extern crate alloc;

pub mod auralize;
pub mod filter;
pub mod geometry;
pub mod hoa;
mod math;
pub mod paths;
pub mod tracer;
mod vec3;

pub use filter::{cumulative_energy_curve, filter_paths, EnergyCurve, FilterError, FilterPolicy};
pub use geometry::{FaceId, Hit, Material, Scene, SceneError, SceneParams, Surface, SurfaceId, TriangleSpec};
pub use hoa::{sh_eval, sh_eval_batch, Normalization, ShBasis, ShError, ShMatrix, ShVector};
pub use paths::{PathColumns, PathMeta, PathRecord, PathSet, PathSetError, PathType};
pub use tracer::{
    direct_visibility, enumerate_image_sources, trace, trace_records, trace_with, validate_specular, Executor,
    Sequential, SimConfig, SpecularPath, TraceError, TraceOutput,
};
pub use vec3::Vec3;
