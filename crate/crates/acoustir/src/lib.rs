//! Std companion to `acoustir-core`: scene files, Parquet path storage,
//! noise-gated Ambisonic rendering, WAV output, a threaded executor,
//! benchmark sweeps and the command line.

pub mod analysis;
pub mod arrays;
pub mod bench;
pub mod cli;
pub mod parallel;
pub mod pathstore;
pub mod scene_file;
pub mod synth;
pub mod wav;

pub use acoustir_core as core;
pub use arrays::{auralize_arrays, trace_listeners, OwnedPathArrays, PathArrays};
pub use parallel::Threads;
pub use pathstore::{read_paths, write_paths, PathStoreError, WriteStats};
pub use scene_file::{load_scene, Overrides, SceneDesc, SceneFileError};
pub use synth::{synthesize_ir, AmbisonicIR, BandConfig};
pub use wav::{read_wav, write_wav};
