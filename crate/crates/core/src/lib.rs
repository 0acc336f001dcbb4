//! Core of the vlnaug instruction compiler.
//!
//! Everything here is pure computation over in-memory data and builds
//! without `std` (an allocator is required). File formats, configuration
//! and the command-line front end live in the `vlnaug` crate.
//!
//! Pipeline overview:
//!
//! 1. [`scene::parse_house`] reads scene metadata (objects with oriented
//!    boxes, regions, panoramas).
//! 2. [`graph::NavGraph`] holds navigable viewpoints; it answers shortest
//!    path queries and samples routes from a splitmix64 stream.
//! 3. [`saliency`] decides which objects are worth mentioning from a
//!    viewpoint, and [`crafter`] turns a route into a templated instruction.
//! 4. [`executor`] parses crafted text back and follows it on the graph,
//!    closing the loop with navigation metrics.
//! 5. [`supervision`] aligns instruction words to route nodes and attaches
//!    per-word object targets; [`loss`] is the word-loss reference that a
//!    trainer consumes them with.
//! 6. [`ablation`] strips parts of speech from instructions.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ablation;
pub mod crafter;
pub mod executor;
pub mod geometry;
pub mod graph;
pub mod loss;
pub mod rng;
pub mod saliency;
pub mod scene;
pub mod supervision;

pub use crafter::{AtomicInstruction, CraftedInstruction, Motion, ObjectRef, Turn};
pub use executor::{ExecutionResult, NavMetrics};
pub use geometry::{FovConfig, Vec3};
pub use graph::{NavGraph, PathSpec, SamplerConfig, Viewpoint};
pub use saliency::{ObservedObject, Relation, SaliencyConfig};
pub use scene::SceneModel;
pub use supervision::{DatasetRecord, WordObjectSupervision};
