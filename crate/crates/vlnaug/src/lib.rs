//! File formats, fixtures, rendering and the command-line front end for
//! [`vlnaug_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod connectivity;
pub mod dataset;
pub mod fixtures;
pub mod json;
pub mod render;
pub mod reports;
pub mod scene_json;

pub use vlnaug_core as core;
