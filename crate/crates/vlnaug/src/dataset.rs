//! R2R-style dataset files, word-level supervision files and sampled path
//! lists. Writers sort by `path_id` and are byte-deterministic; readers
//! reject unknown keys and duplicate ids.

use std::collections::BTreeSet;

use serde::Deserialize;
use vlnaug_core::graph::PathSpec;
use vlnaug_core::supervision::{DatasetRecord, WordObjectSupervision};

use crate::json::{self, Object};
use crate::scene_json::from_json_str;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("duplicate path_id {0}")]
    DuplicatePathId(u64),
    #[error("{kind} JSON schema error at `{path}`: {message}")]
    Schema {
        kind: &'static str,
        path: String,
        message: String,
    },
    #[error("path_id {path_id}: {reason}")]
    Invalid { path_id: u64, reason: String },
}

fn check_unique(ids: impl Iterator<Item = u64>) -> Result<(), DatasetError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(DatasetError::DuplicatePathId(id));
        }
    }
    Ok(())
}

fn schema(kind: &'static str) -> impl Fn((String, String)) -> DatasetError {
    move |(path, message)| DatasetError::Schema { kind, path, message }
}

/// A sampled route with its id, before any instruction exists.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub path_id: u64,
    pub spec: PathSpec,
}

pub fn emit_paths_json(records: &[PathRecord]) -> Result<String, DatasetError> {
    check_unique(records.iter().map(|r| r.path_id))?;
    let mut sorted: Vec<&PathRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.path_id);
    let items: Vec<String> = sorted
        .iter()
        .map(|r| {
            Object::new()
                .int("path_id", r.path_id)
                .str("scan", &r.spec.scan)
                .num("heading", r.spec.heading_0)
                .raw("path", json::string_array(&r.spec.path))
                .num("distance", r.spec.geodesic_length)
                .finish()
        })
        .collect();
    Ok(json::lines_array(&items, 0))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PathDoc {
    path_id: u64,
    scan: String,
    heading: f64,
    path: Vec<String>,
    distance: f64,
}

pub fn read_paths_json(text: &str) -> Result<Vec<PathRecord>, DatasetError> {
    let docs: Vec<PathDoc> = from_json_str(text).map_err(schema("paths"))?;
    check_unique(docs.iter().map(|d| d.path_id))?;
    docs.into_iter()
        .map(|d| {
            if d.path.is_empty() {
                return Err(DatasetError::Invalid {
                    path_id: d.path_id,
                    reason: "empty path".into(),
                });
            }
            Ok(PathRecord {
                path_id: d.path_id,
                spec: PathSpec {
                    scan: d.scan,
                    path: d.path,
                    heading_0: d.heading,
                    geodesic_length: d.distance,
                },
            })
        })
        .collect()
}

pub fn emit_r2r_json(records: &[DatasetRecord]) -> Result<String, DatasetError> {
    check_unique(records.iter().map(|r| r.path_id))?;
    let mut sorted: Vec<&DatasetRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.path_id);
    let items: Vec<String> = sorted
        .iter()
        .map(|r| {
            Object::new()
                .int("path_id", r.path_id)
                .str("scan", &r.scan)
                .num("heading", r.heading)
                .raw("path", json::string_array(&r.path))
                .raw("instructions", json::string_array(&r.instructions))
                .num("distance", r.distance)
                .finish()
        })
        .collect();
    Ok(json::lines_array(&items, 0))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordDoc {
    path_id: u64,
    scan: String,
    heading: f64,
    path: Vec<String>,
    instructions: Vec<String>,
    distance: f64,
}

pub fn read_r2r_json(text: &str) -> Result<Vec<DatasetRecord>, DatasetError> {
    let docs: Vec<RecordDoc> = from_json_str(text).map_err(schema("dataset"))?;
    check_unique(docs.iter().map(|d| d.path_id))?;
    docs.into_iter()
        .map(|d| {
            let reason = if d.instructions.is_empty() {
                Some("no instructions")
            } else if d.path.is_empty() {
                Some("empty path")
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(DatasetError::Invalid {
                    path_id: d.path_id,
                    reason: reason.into(),
                });
            }
            Ok(DatasetRecord {
                path_id: d.path_id,
                scan: d.scan,
                heading: d.heading,
                path: d.path,
                instructions: d.instructions,
                distance: d.distance,
            })
        })
        .collect()
}

pub fn emit_supervision_json(sup: &[WordObjectSupervision]) -> Result<String, DatasetError> {
    check_unique(sup.iter().map(|s| s.path_id))?;
    let mut sorted: Vec<&WordObjectSupervision> = sup.iter().collect();
    sorted.sort_by_key(|s| s.path_id);
    let items: Vec<String> = sorted
        .iter()
        .map(|s| {
            let objects: Vec<String> = s.objects_of_token.iter().map(|o| json::string_array(o)).collect();
            Object::new()
                .int("path_id", s.path_id)
                .raw("tokens", json::string_array(&s.tokens))
                .raw("node_of_token", json::int_array(&s.node_of_token))
                .raw("objects_of_token", format!("[{}]", objects.join(", ")))
                .finish()
        })
        .collect();
    Ok(json::lines_array(&items, 0))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SupervisionDoc {
    path_id: u64,
    tokens: Vec<String>,
    node_of_token: Vec<usize>,
    objects_of_token: Vec<Vec<String>>,
}

pub fn read_supervision_json(text: &str) -> Result<Vec<WordObjectSupervision>, DatasetError> {
    let docs: Vec<SupervisionDoc> = from_json_str(text).map_err(schema("supervision"))?;
    check_unique(docs.iter().map(|d| d.path_id))?;
    docs.into_iter()
        .map(|d| {
            if d.node_of_token.len() != d.tokens.len() || d.objects_of_token.len() != d.tokens.len() {
                return Err(DatasetError::Invalid {
                    path_id: d.path_id,
                    reason: "tokens, node_of_token and objects_of_token differ in length".into(),
                });
            }
            Ok(WordObjectSupervision {
                path_id: d.path_id,
                tokens: d.tokens,
                node_of_token: d.node_of_token,
                objects_of_token: d.objects_of_token,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: u64) -> DatasetRecord {
        DatasetRecord {
            path_id: id,
            scan: "s".into(),
            heading: std::f64::consts::FRAC_PI_6,
            path: vec!["a".into(), "b".into()],
            instructions: vec!["Walk straight. Stop there.".into()],
            distance: 2.0,
        }
    }

    #[test]
    fn r2r_format() {
        assert_eq!(emit_r2r_json(&[]).unwrap(), "[]");
        let one = emit_r2r_json(&[record(3)]).unwrap();
        assert_eq!(
            one,
            "[\n  {\"path_id\": 3, \"scan\": \"s\", \"heading\": 0.523599, \"path\": [\"a\", \"b\"], \"instructions\": [\"Walk straight. Stop there.\"], \"distance\": 2.000000}\n]"
        );
        let two = emit_r2r_json(&[record(5), record(1)]).unwrap();
        assert!(two.find("\"path_id\": 1").unwrap() < two.find("\"path_id\": 5").unwrap());
        assert!(matches!(emit_r2r_json(&[record(1), record(1)]), Err(DatasetError::DuplicatePathId(1))));
        let back = read_r2r_json(&two).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(emit_r2r_json(&back).unwrap(), two);
    }

    #[test]
    fn r2r_reader_errors() {
        let text = "[{\"path_id\": 1, \"scan\": \"s\", \"heading\": 0, \"path\": [\"a\"], \"instructions\": [], \"distance\": 0}]";
        assert!(matches!(read_r2r_json(text), Err(DatasetError::Invalid { path_id: 1, .. })));
        let text = "[{\"path_id\": 1, \"scan\": \"s\", \"heading\": 0, \"path\": [\"a\"], \"instructions\": [\"x\"], \"distance\": 0, \"extra\": 1}]";
        let err = read_r2r_json(text).unwrap_err();
        assert!(err.to_string().contains("extra"), "{}", err);
    }

    #[test]
    fn supervision_round_trip() {
        assert_eq!(emit_supervision_json(&[]).unwrap(), "[]");
        let s = WordObjectSupervision {
            path_id: 7,
            tokens: vec!["walk".into(), "straight".into()],
            node_of_token: vec![0, 1],
            objects_of_token: vec![vec!["bed".into(), "closet".into()], vec![]],
        };
        let text = emit_supervision_json(std::slice::from_ref(&s)).unwrap();
        assert!(text.contains("\"objects_of_token\": [[\"bed\", \"closet\"], []]"));
        assert_eq!(read_supervision_json(&text).unwrap(), vec![s]);
    }

    #[test]
    fn paths_round_trip() {
        let p = PathRecord {
            path_id: 0,
            spec: PathSpec {
                scan: "s".into(),
                path: vec!["a".into()],
                heading_0: 0.0,
                geodesic_length: 0.0,
            },
        };
        let text = emit_paths_json(std::slice::from_ref(&p)).unwrap();
        assert_eq!(read_paths_json(&text).unwrap(), vec![p]);
    }
}
