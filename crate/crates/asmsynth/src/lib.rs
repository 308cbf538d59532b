//! File formats, data directories, URDF export, the HTTP service and the
//! command line around `asmsynth-core`.

pub mod cli;
pub mod data;
pub mod export;
pub mod formats;
pub mod pipeline;
pub mod server;
pub mod toy_arm;
