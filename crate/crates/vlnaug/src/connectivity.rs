//! Connectivity files: a JSON array of per-viewpoint records with a 4×4
//! camera pose and an `unobstructed` row.

use std::collections::BTreeSet;

use serde::Deserialize;
use vlnaug_core::geometry::Vec3;
use vlnaug_core::graph::{GraphError, NavGraph, Viewpoint};

use crate::json::{self, Object};
use crate::scene_json::from_json_str;

#[derive(Debug, thiserror::Error)]
pub enum ConnectivityError {
    #[error("connectivity JSON schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("node {node}: pose has {found} elements, expected 16")]
    PoseLength { node: usize, found: usize },
    #[error("node {node}: unobstructed has {found} entries, expected {expected}")]
    RowLength { node: usize, found: usize, expected: usize },
    #[error("node {node}: duplicate image_id `{id}`")]
    DuplicateId { node: usize, id: String },
    #[error("node {node}: non-finite pose translation")]
    NonFinite { node: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    image_id: String,
    pose: Vec<f64>,
    included: bool,
    unobstructed: Vec<bool>,
    height: f64,
}

pub fn parse_connectivity(text: &str, scan_id: &str) -> Result<NavGraph, ConnectivityError> {
    let docs: Vec<NodeDoc> =
        from_json_str(text).map_err(|(path, message)| ConnectivityError::Schema { path, message })?;
    let n = docs.len();
    let mut seen = BTreeSet::new();
    let mut nodes = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for (i, d) in docs.into_iter().enumerate() {
        if d.pose.len() != 16 {
            return Err(ConnectivityError::PoseLength { node: i, found: d.pose.len() });
        }
        if d.unobstructed.len() != n {
            return Err(ConnectivityError::RowLength {
                node: i,
                found: d.unobstructed.len(),
                expected: n,
            });
        }
        if !seen.insert(d.image_id.clone()) {
            return Err(ConnectivityError::DuplicateId { node: i, id: d.image_id });
        }
        let position = Vec3::new(d.pose[3], d.pose[7], d.pose[11]);
        if !position.is_finite() {
            return Err(ConnectivityError::NonFinite { node: i });
        }
        nodes.push(Viewpoint {
            id: d.image_id,
            position,
            height: d.height,
            included: d.included,
        });
        rows.push(d.unobstructed);
    }
    Ok(NavGraph::from_connectivity(scan_id, nodes, &rows)?)
}

/// One node as written to a connectivity file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityNode {
    pub viewpoint: Viewpoint,
    pub unobstructed: Vec<bool>,
}

/// Writes nodes in the given order with a translation-only pose.
pub fn write_connectivity(nodes: &[ConnectivityNode]) -> String {
    let items: Vec<String> = nodes
        .iter()
        .map(|n| {
            let p = n.viewpoint.position;
            let pose = [
                1.0, 0.0, 0.0, p.x, 0.0, 1.0, 0.0, p.y, 0.0, 0.0, 1.0, p.z, 0.0, 0.0, 0.0, 1.0,
            ];
            let pose: Vec<String> = pose.iter().map(|&v| json::num(v)).collect();
            let flags: Vec<&str> = n.unobstructed.iter().map(|&b| if b { "true" } else { "false" }).collect();
            Object::new()
                .str("image_id", &n.viewpoint.id)
                .raw("pose", format!("[{}]", pose.join(", ")))
                .raw("included", if n.viewpoint.included { "true" } else { "false" })
                .raw("unobstructed", format!("[{}]", flags.join(", ")))
                .num("height", n.viewpoint.height)
                .finish()
        })
        .collect();
    let mut s = json::lines_array(&items, 0);
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: &str, x: f64, included: bool, row: &[bool]) -> ConnectivityNode {
        ConnectivityNode {
            viewpoint: Viewpoint {
                id: id.into(),
                position: Vec3::new(x, 0.0, 1.5),
                height: 1.5,
                included,
            },
            unobstructed: row.to_vec(),
        }
    }

    #[test]
    fn one_way_flag_gives_symmetric_edge() {
        let text = write_connectivity(&[node("a", 0.0, true, &[false, true]), node("b", 2.0, true, &[false, false])]);
        let g = parse_connectivity(&text, "s").unwrap();
        assert_eq!(g.neighbors("a").unwrap(), vec![("b", 2.0)]);
        assert_eq!(g.neighbors("b").unwrap(), vec![("a", 2.0)]);
        assert_eq!(g.position("b").unwrap(), Vec3::new(2.0, 0.0, 1.5));
    }

    #[test]
    fn excluded_node_is_kept_without_edges() {
        let text = write_connectivity(&[node("a", 0.0, true, &[false, true]), node("b", 2.0, false, &[true, false])]);
        let g = parse_connectivity(&text, "s").unwrap();
        assert_eq!(g.viewpoints().len(), 2);
        assert!(g.neighbors("a").unwrap().is_empty());
        assert!(g.neighbors("b").unwrap().is_empty());
    }

    #[test]
    fn identity_pose_is_origin() {
        let text = r#"[{"image_id": "a", "pose": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1], "included": true, "unobstructed": [false], "height": 1.5}]"#;
        let g = parse_connectivity(text, "s").unwrap();
        assert_eq!(g.position("a").unwrap(), Vec3::ZERO);
    }

    #[test]
    fn structural_errors() {
        let short = r#"[{"image_id": "a", "pose": [1,0,0], "included": true, "unobstructed": [false], "height": 1.5}]"#;
        assert!(matches!(parse_connectivity(short, "s"), Err(ConnectivityError::PoseLength { node: 0, found: 3 })));
        let row = r#"[{"image_id": "a", "pose": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1], "included": true, "unobstructed": [], "height": 1.5}]"#;
        assert!(matches!(parse_connectivity(row, "s"), Err(ConnectivityError::RowLength { node: 0, .. })));
        let dup = write_connectivity(&[node("a", 0.0, true, &[false, false]), node("a", 1.0, true, &[false, false])]);
        assert!(matches!(parse_connectivity(&dup, "s"), Err(ConnectivityError::DuplicateId { node: 1, .. })));
        let bad = r#"[{"image_id": 7}]"#;
        let err = parse_connectivity(bad, "s").unwrap_err();
        assert!(err.to_string().contains("[0].image_id"), "{}", err);
    }
}
