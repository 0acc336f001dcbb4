//! Canonical scene description file.
//!
//! Lists are sorted by index and every float is printed with 6 decimals, so
//! `write(read(write(s)))` is byte-identical to `write(s)`.

use serde::Deserialize;
use vlnaug_core::geometry::Vec3;
use vlnaug_core::scene::{Category, Panorama, Region, SceneError, SceneModel, SceneObject};

use crate::json::{self, Object};

#[derive(Debug, thiserror::Error)]
pub enum SceneJsonError {
    #[error("scene JSON schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("region {index}: label must be a single character, got `{label}`")]
    Label { index: usize, label: String },
    #[error(transparent)]
    Invalid(#[from] SceneError),
}

pub fn write_scene_json(scene: &SceneModel) -> String {
    let mut sorted = scene.clone();
    sorted.sort_by_index();

    let categories: Vec<String> = sorted
        .categories
        .iter()
        .map(|c| {
            Object::new()
                .int("index", c.index)
                .int("mapping_index", c.mapping_index)
                .str("name", &c.name)
                .int("mpcat40_index", c.mpcat40_index)
                .str("mpcat40_name", &c.mpcat40_name)
                .finish()
        })
        .collect();
    let regions: Vec<String> = sorted
        .regions
        .iter()
        .map(|r| {
            Object::new()
                .int("index", r.index)
                .int("level_index", r.level_index)
                .str("label", &r.label.to_string())
                .raw("position", json::vec3(r.position.to_array()))
                .raw("bbox_lo", json::vec3(r.bbox_lo.to_array()))
                .raw("bbox_hi", json::vec3(r.bbox_hi.to_array()))
                .finish()
        })
        .collect();
    let objects: Vec<String> = sorted
        .objects
        .iter()
        .map(|o| {
            Object::new()
                .int("index", o.index)
                .int("region_index", o.region_index)
                .int("category_index", o.category_index)
                .raw("center", json::vec3(o.center.to_array()))
                .raw("axis0", json::vec3(o.axis0.to_array()))
                .raw("axis1", json::vec3(o.axis1.to_array()))
                .raw("radii", json::vec3(o.radii))
                .finish()
        })
        .collect();
    let panoramas: Vec<String> = sorted
        .panoramas
        .iter()
        .map(|p| {
            Object::new()
                .str("name", &p.name)
                .int("index", p.index)
                .int("region_index", p.region_index)
                .raw("position", json::vec3(p.position.to_array()))
                .finish()
        })
        .collect();

    format!(
        "{{\n  \"scan_id\": {},\n  \"categories\": {},\n  \"regions\": {},\n  \"objects\": {},\n  \"panoramas\": {}\n}}\n",
        json::string(&sorted.scan_id),
        json::lines_array(&categories, 2),
        json::lines_array(&regions, 2),
        json::lines_array(&objects, 2),
        json::lines_array(&panoramas, 2),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    scan_id: String,
    categories: Vec<CategoryDoc>,
    regions: Vec<RegionDoc>,
    objects: Vec<ObjectDoc>,
    panoramas: Vec<PanoramaDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryDoc {
    index: usize,
    mapping_index: i64,
    name: String,
    mpcat40_index: i64,
    mpcat40_name: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionDoc {
    index: usize,
    level_index: usize,
    label: String,
    position: [f64; 3],
    bbox_lo: [f64; 3],
    bbox_hi: [f64; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectDoc {
    index: usize,
    region_index: i64,
    category_index: usize,
    center: [f64; 3],
    axis0: [f64; 3],
    axis1: [f64; 3],
    radii: [f64; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PanoramaDoc {
    name: String,
    index: usize,
    region_index: i64,
    position: [f64; 3],
}

pub(crate) fn from_json_str<'de, T: Deserialize<'de>>(text: &'de str) -> Result<T, (String, String)> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| (e.path().to_string(), e.inner().to_string()))
}

pub fn read_scene_json(text: &str) -> Result<SceneModel, SceneJsonError> {
    let doc: SceneDoc =
        from_json_str(text).map_err(|(path, message)| SceneJsonError::Schema { path, message })?;
    let mut regions = Vec::with_capacity(doc.regions.len());
    for r in doc.regions {
        let mut chars = r.label.chars();
        let label = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => {
                return Err(SceneJsonError::Label {
                    index: r.index,
                    label: r.label,
                })
            }
        };
        regions.push(Region {
            index: r.index,
            level_index: r.level_index,
            label,
            position: r.position.into(),
            bbox_lo: r.bbox_lo.into(),
            bbox_hi: r.bbox_hi.into(),
        });
    }
    let mut scene = SceneModel {
        scan_id: doc.scan_id,
        categories: doc
            .categories
            .into_iter()
            .map(|c| Category {
                index: c.index,
                mapping_index: c.mapping_index,
                name: c.name,
                mpcat40_index: c.mpcat40_index,
                mpcat40_name: c.mpcat40_name,
            })
            .collect(),
        regions,
        objects: doc
            .objects
            .into_iter()
            .map(|o| SceneObject {
                index: o.index,
                region_index: o.region_index,
                category_index: o.category_index,
                center: Vec3::from(o.center),
                axis0: Vec3::from(o.axis0),
                axis1: Vec3::from(o.axis1),
                radii: o.radii,
            })
            .collect(),
        panoramas: doc
            .panoramas
            .into_iter()
            .map(|p| Panorama {
                name: p.name,
                index: p.index,
                region_index: p.region_index,
                position: p.position.into(),
            })
            .collect(),
    };
    scene.sort_by_index();
    scene.validate()?;
    Ok(scene)
}
