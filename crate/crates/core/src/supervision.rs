//! Word-to-node alignment and per-word object targets for the objects
//! auxiliary task.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

use crate::graph::{GraphError, NavGraph, PathSpec};
use crate::saliency::{candidates_at, SaliencyConfig};
use crate::scene::{head_noun, SceneModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SupervisionError {
    #[error("cannot align {tokens} tokens onto {nodes} nodes")]
    EmptyAlignment { tokens: usize, nodes: usize },
    #[error("instruction has no tokens")]
    NoTokens,
    #[error("objects per word must be at least 1")]
    ZeroObjects,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Characters removed before splitting an instruction into words.
pub const STRIPPED_PUNCTUATION: &[char] = &['.', ',', ';', ':', '!', '?', '"', '\''];

/// Lowercases, strips punctuation and splits on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    let cleaned: String = text
        .chars()
        .filter(|c| !STRIPPED_PUNCTUATION.contains(c))
        .flat_map(char::to_lowercase)
        .collect();
    cleaned.split_whitespace().map(String::from).collect()
}

/// Node index for each of `tokens` words on a path of `nodes` viewpoints:
/// `round_half_up(i · (K−1) / (L−1))`, computed in exact integer arithmetic.
pub fn align_words_to_nodes(tokens: usize, nodes: usize) -> Result<Vec<usize>, SupervisionError> {
    if tokens == 0 || nodes == 0 {
        return Err(SupervisionError::EmptyAlignment { tokens, nodes });
    }
    if tokens == 1 {
        return Ok(alloc::vec![0]);
    }
    let span = (tokens - 1) as u128;
    let k = (nodes - 1) as u128;
    Ok((0..tokens as u128)
        .map(|i| ((2 * i * k + span) / (2 * span)) as usize)
        .collect())
}

/// Head nouns of the `n` largest usable objects around `node`, one per
/// distinct head noun. Ranked by area (descending), then distance, then
/// object index.
pub fn top_n_objects(
    scene: &SceneModel,
    graph: &NavGraph,
    node: &str,
    cfg: &SaliencyConfig,
    n: usize,
) -> Result<Vec<String>, SupervisionError> {
    if n == 0 {
        return Err(SupervisionError::ZeroObjects);
    }
    let pos = graph.position(node)?;
    let mut cands = candidates_at(scene, pos, cfg);
    cands.sort_by(|a, b| {
        b.area
            .partial_cmp(&a.area)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.distance.partial_cmp(&b.distance).unwrap_or(Ordering::Equal))
            .then(a.object_index.cmp(&b.object_index))
    });
    let mut out: Vec<String> = Vec::with_capacity(n);
    for c in cands {
        if out.len() == n {
            break;
        }
        let Ok(noun) = head_noun(&c.category) else {
            continue;
        };
        if !out.contains(&noun) {
            out.push(noun);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordObjectSupervision {
    pub path_id: u64,
    pub tokens: Vec<String>,
    pub node_of_token: Vec<usize>,
    pub objects_of_token: Vec<Vec<String>>,
}

/// One R2R-style dataset entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecord {
    pub path_id: u64,
    pub scan: String,
    pub heading: f64,
    pub path: Vec<String>,
    pub instructions: Vec<String>,
    pub distance: f64,
}

impl DatasetRecord {
    pub fn path_spec(&self) -> PathSpec {
        PathSpec {
            scan: self.scan.clone(),
            path: self.path.clone(),
            heading_0: self.heading,
            geodesic_length: self.distance,
        }
    }
}

pub fn build_supervision(
    scene: &SceneModel,
    graph: &NavGraph,
    path_id: u64,
    path: &PathSpec,
    instruction: &str,
    cfg: &SaliencyConfig,
    n: usize,
) -> Result<WordObjectSupervision, SupervisionError> {
    let tokens = tokenize(instruction);
    if tokens.is_empty() {
        return Err(SupervisionError::NoTokens);
    }
    let node_of_token = align_words_to_nodes(tokens.len(), path.path.len())?;
    let per_node = path
        .path
        .iter()
        .map(|id| top_n_objects(scene, graph, id, cfg, n))
        .collect::<Result<Vec<_>, _>>()?;
    let objects_of_token = node_of_token.iter().map(|&k| per_node[k].clone()).collect();
    Ok(WordObjectSupervision {
        path_id,
        tokens,
        node_of_token,
        objects_of_token,
    })
}
