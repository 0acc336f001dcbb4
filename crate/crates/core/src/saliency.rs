//! Which scene objects are worth mentioning from a viewpoint.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::geometry::{
    elevation_to, heading_to, in_fov, projected_area, relative_bearing, FovConfig, Vec3,
};
use crate::scene::SceneModel;

/// Categories never referenced in instructions: architectural surfaces and
/// unlabeled geometry.
pub const DEFAULT_BLACKLIST: [&str; 8] = [
    "floor",
    "ceiling",
    "wall",
    "column",
    "beam",
    "misc",
    "void",
    "unlabeled",
];

/// An object as seen from one viewpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedObject {
    pub object_index: usize,
    pub category: String,
    pub heading: f64,
    pub elevation: f64,
    pub distance: f64,
    pub area: f64,
    /// The category occurs exactly once among the objects observed together.
    pub unique: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyConfig {
    pub max_distance: f64,
    pub min_area: f64,
    pub blacklist: BTreeSet<String>,
    pub require_unique: bool,
    pub fov: FovConfig,
}

impl Default for SaliencyConfig {
    fn default() -> Self {
        SaliencyConfig {
            max_distance: 3.5,
            min_area: 0.2,
            blacklist: DEFAULT_BLACKLIST.iter().map(|s| s.to_string()).collect(),
            require_unique: true,
            fov: FovConfig::default(),
        }
    }
}

impl SaliencyConfig {
    pub fn is_valid(&self) -> bool {
        self.max_distance > 0.0 && self.min_area >= 0.0 && self.fov.is_valid()
    }
}

/// Every object within `max_distance` (closed) of `node_position`, nearest
/// first, ties by object index.
pub fn observe(scene: &SceneModel, node_position: Vec3, max_distance: f64) -> Vec<ObservedObject> {
    let mut out: Vec<ObservedObject> = scene
        .objects
        .iter()
        .filter_map(|obj| {
            let distance = node_position.distance(obj.center);
            if distance > max_distance {
                return None;
            }
            Some(ObservedObject {
                object_index: obj.index,
                category: scene.category_name(obj.index).unwrap_or_default(),
                heading: heading_to(node_position, obj.center).radians,
                elevation: elevation_to(node_position, obj.center),
                distance,
                area: projected_area(obj.radii),
                unique: false,
            })
        })
        .collect();
    out.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap_or(Ordering::Equal)
            .then(a.object_index.cmp(&b.object_index))
    });
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for o in &out {
        *counts.entry(o.category.as_str()).or_default() += 1;
    }
    let unique: Vec<bool> = out.iter().map(|o| counts[o.category.as_str()] == 1).collect();
    for (o, u) in out.iter_mut().zip(unique) {
        o.unique = u;
    }
    out
}

/// Stable filter by distance, area, usability and (optionally) uniqueness.
pub fn filter_candidates(observed: &[ObservedObject], cfg: &SaliencyConfig) -> Vec<ObservedObject> {
    observed
        .iter()
        .filter(|o| {
            o.distance <= cfg.max_distance
                && o.area >= cfg.min_area
                && !cfg.blacklist.contains(&o.category)
                && (o.unique || !cfg.require_unique)
        })
        .cloned()
        .collect()
}

/// Candidate closest in bearing to `target_heading` among those inside the
/// field of view. Ties go to the larger area, then the nearer object, then
/// the lower object index.
pub fn best_object<'a>(
    candidates: &'a [ObservedObject],
    target_heading: f64,
    fov: &FovConfig,
) -> Option<&'a ObservedObject> {
    candidates
        .iter()
        .filter_map(|o| {
            let b = relative_bearing(target_heading, o.heading);
            in_fov(b, o.elevation, fov).then_some((libm::fabs(b), o))
        })
        .min_by(|(ba, a), (bb, b)| {
            ba.partial_cmp(bb)
                .unwrap_or(Ordering::Equal)
                .then_with(|| b.area.partial_cmp(&a.area).unwrap_or(Ordering::Equal))
                .then_with(|| a.distance.partial_cmp(&b.distance).unwrap_or(Ordering::Equal))
                .then(a.object_index.cmp(&b.object_index))
        })
        .map(|(_, o)| o)
}

/// Side on which the agent passes a referenced object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Left,
    Right,
    Toward,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Left, Relation::Right, Relation::Toward];
}

const TOWARD_HALF_WIDTH: f64 = PI / 12.0;

/// An object to the right of the travel direction is passed on its left,
/// and vice versa; within ±π/12 the agent walks toward it.
pub fn side_of_travel(target_heading: f64, object_heading: f64) -> Relation {
    let d = relative_bearing(target_heading, object_heading);
    if libm::fabs(d) <= TOWARD_HALF_WIDTH {
        Relation::Toward
    } else if d > 0.0 {
        Relation::Left
    } else {
        Relation::Right
    }
}

/// Filtered candidates seen from a position, using the config's distance gate.
pub fn candidates_at(scene: &SceneModel, position: Vec3, cfg: &SaliencyConfig) -> Vec<ObservedObject> {
    filter_candidates(&observe(scene, position, cfg.max_distance), cfg)
}
