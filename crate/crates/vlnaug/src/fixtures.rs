//! Deterministic synthetic houses for tests and demos.
//!
//! A house is two floors of square rooms on a grid, joined by a stairwell on
//! the east side. Each room carries four viewpoints and a handful of
//! furniture drawn from a per-room-type catalog, plus structural elements
//! (floor, ceiling, walls) that the saliency blacklist filters out.

use std::fmt::Write as _;

use vlnaug_core::geometry::Vec3;
use vlnaug_core::graph::Viewpoint;
use vlnaug_core::rng::SplitMix64;
use vlnaug_core::scene::{Category, Panorama, Region, SceneModel, SceneObject};

use crate::connectivity::{write_connectivity, ConnectivityNode};

const ROOM: f64 = 4.0;
const FLOOR_HEIGHT: f64 = 3.0;
const CAMERA_HEIGHT: f64 = 1.5;

/// name, mpcat40 index, mpcat40 name, center height, nominal half-extents
type CatalogEntry = (&'static str, i64, &'static str, f64, [f64; 3]);

const CATALOG: &[CatalogEntry] = &[
    ("floor", 2, "floor", 0.0, [2.0, 2.0, 0.02]),
    ("ceiling", 17, "ceiling", 3.0, [2.0, 2.0, 0.02]),
    ("wall", 1, "wall", 1.5, [2.0, 0.05, 1.5]),
    ("bed", 11, "bed", 0.5, [1.0, 0.8, 0.4]),
    ("closet", 20, "cabinet", 1.1, [0.8, 0.35, 1.0]),
    ("nightstand", 13, "chest_of_drawers", 0.8, [0.3, 0.3, 0.3]),
    ("table_lamp", 28, "lighting", 1.1, [0.2, 0.2, 0.3]),
    ("painting", 6, "picture", 1.6, [0.6, 0.04, 0.45]),
    ("dresser", 13, "chest_of_drawers", 0.9, [0.7, 0.3, 0.5]),
    ("refrigerator", 37, "appliances", 1.0, [0.45, 0.4, 0.9]),
    ("stove", 37, "appliances", 0.8, [0.4, 0.35, 0.45]),
    ("kitchen_counter", 26, "counter", 0.9, [1.0, 0.35, 0.45]),
    ("sink", 15, "sink", 0.9, [0.35, 0.3, 0.1]),
    ("dining_table", 5, "table", 0.8, [0.9, 0.6, 0.38]),
    ("chair", 3, "chair", 0.7, [0.25, 0.25, 0.45]),
    ("sofa", 10, "sofa", 0.6, [1.0, 0.45, 0.4]),
    ("coffee_table", 5, "table", 0.6, [0.5, 0.35, 0.25]),
    ("tv", 22, "tv_monitor", 1.3, [0.6, 0.05, 0.35]),
    ("armchair", 3, "chair", 0.6, [0.45, 0.45, 0.45]),
    ("bookshelf", 31, "shelving", 1.1, [0.5, 0.2, 0.9]),
    ("potted_plant", 14, "plant", 0.8, [0.3, 0.3, 0.5]),
    ("toilet", 18, "toilet", 0.6, [0.25, 0.35, 0.4]),
    ("bathtub", 25, "bathtub", 0.5, [0.8, 0.4, 0.3]),
    ("mirror", 21, "mirror", 1.6, [0.4, 0.03, 0.5]),
    ("towel", 20, "towel", 1.2, [0.3, 0.05, 0.4]),
    ("desk", 5, "table", 0.8, [0.7, 0.4, 0.38]),
    ("office_chair", 3, "chair", 0.7, [0.3, 0.3, 0.5]),
    ("computer", 40, "misc", 1.0, [0.25, 0.2, 0.25]),
    ("file_cabinet", 7, "cabinet", 0.9, [0.3, 0.35, 0.5]),
    ("wardrobe", 7, "cabinet", 1.2, [0.6, 0.35, 1.0]),
    ("piano", 39, "furniture", 1.0, [0.75, 0.3, 0.6]),
    ("fireplace", 27, "fireplace", 1.0, [0.7, 0.2, 0.6]),
    ("stairs", 19, "stairs", 1.5, [0.5, 1.0, 1.5]),
];

/// Room types: region label and the catalog names furniture is drawn from.
const ROOM_TYPES: &[(char, &[&str])] = &[
    ('b', &["bed", "closet", "nightstand", "table_lamp", "painting", "dresser", "wardrobe"]),
    ('k', &["refrigerator", "stove", "kitchen_counter", "sink", "dining_table", "chair", "chair"]),
    ('l', &["sofa", "coffee_table", "tv", "armchair", "bookshelf", "potted_plant", "piano", "fireplace"]),
    ('t', &["toilet", "bathtub", "sink", "mirror", "towel"]),
    ('o', &["desk", "office_chair", "computer", "bookshelf", "file_cabinet", "painting"]),
    ('d', &["dining_table", "chair", "chair", "painting", "potted_plant", "dresser"]),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HouseSpec {
    pub seed: u64,
    /// Room grid of the ground floor (columns, rows).
    pub ground: (usize, usize),
    /// Room grid of the upper floor; it sits above the eastmost columns.
    pub upper: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HouseLevel {
    pub index: usize,
    pub label: String,
    pub position: Vec3,
    pub bbox_lo: Vec3,
    pub bbox_hi: Vec3,
}

#[derive(Debug, Clone)]
pub struct GeneratedHouse {
    pub scene: SceneModel,
    pub levels: Vec<HouseLevel>,
    pub nodes: Vec<ConnectivityNode>,
}

impl GeneratedHouse {
    pub fn house_text(&self) -> String {
        write_house(&self.scene, &self.levels)
    }

    pub fn connectivity_text(&self) -> String {
        write_connectivity(&self.nodes)
    }
}

/// The scenes shipped under `fixtures/`.
pub fn bundled_specs() -> Vec<(&'static str, HouseSpec)> {
    vec![
        ("house_alder", HouseSpec { seed: 11, ground: (3, 2), upper: (2, 2) }),
        ("house_birch", HouseSpec { seed: 23, ground: (2, 3), upper: (1, 2) }),
        ("house_cedar", HouseSpec { seed: 37, ground: (4, 2), upper: (2, 2) }),
    ]
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn uniform(rng: &mut SplitMix64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.next_f64()
}

struct Builder {
    rng: SplitMix64,
    scene: SceneModel,
    viewpoints: Vec<Viewpoint>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn category(&self, name: &str) -> usize {
        CATALOG
            .iter()
            .position(|c| c.0 == name)
            .unwrap_or_else(|| panic!("`{}` missing from catalog", name))
    }

    fn region(&mut self, level: usize, label: char, lo: Vec3, hi: Vec3) -> usize {
        let index = self.scene.regions.len();
        let c = (lo + hi) * 0.5;
        self.scene.regions.push(Region {
            index,
            level_index: level,
            label,
            position: Vec3::new(round3(c.x), round3(c.y), lo.z),
            bbox_lo: lo,
            bbox_hi: hi,
        });
        index
    }

    fn object(&mut self, region: usize, name: &str, center: Vec3, angle: f64, radii: [f64; 3]) {
        let (s, c) = angle.sin_cos();
        let index = self.scene.objects.len();
        let category_index = self.category(name);
        self.scene.objects.push(SceneObject {
            index,
            region_index: region as i64,
            category_index,
            center: Vec3::new(round3(center.x), round3(center.y), round3(center.z)),
            axis0: Vec3::new(round6(c), round6(s), 0.0),
            axis1: Vec3::new(round6(-s), round6(c), 0.0),
            radii: radii.map(round3),
        });
    }

    fn viewpoint(&mut self, region: usize, x: f64, y: f64, floor_z: f64, included: bool) -> usize {
        let index = self.viewpoints.len();
        let id = format!("vp_{:03}", index);
        let position = Vec3::new(round3(x), round3(y), round3(floor_z + CAMERA_HEIGHT));
        self.scene.panoramas.push(Panorama {
            name: id.clone(),
            index,
            region_index: region as i64,
            position,
        });
        self.viewpoints.push(Viewpoint {
            id,
            position,
            height: CAMERA_HEIGHT,
            included,
        });
        index
    }

    fn structure(&mut self, region: usize, lo: Vec3, hi: Vec3) {
        let cx = (lo.x + hi.x) / 2.0;
        let cy = (lo.y + hi.y) / 2.0;
        let hx = (hi.x - lo.x) / 2.0;
        let hy = (hi.y - lo.y) / 2.0;
        self.object(region, "floor", Vec3::new(cx, cy, lo.z), 0.0, [hx, hy, 0.02]);
        self.object(region, "ceiling", Vec3::new(cx, cy, lo.z + FLOOR_HEIGHT), 0.0, [hx, hy, 0.02]);
        self.object(region, "wall", Vec3::new(cx, hi.y, lo.z + 1.5), 0.0, [hx, 0.05, 1.5]);
    }

    /// One furnished room with a 2×2 block of viewpoints; returns their
    /// indices as [sw, se, nw, ne].
    fn room(&mut self, level: usize, col: usize, row: usize) -> [usize; 4] {
        let floor_z = level as f64 * FLOOR_HEIGHT;
        let lo = Vec3::new(col as f64 * ROOM, row as f64 * ROOM, floor_z);
        let hi = Vec3::new(lo.x + ROOM, lo.y + ROOM, floor_z + FLOOR_HEIGHT);
        let kind = self.rng.below(ROOM_TYPES.len() as u64) as usize;
        let (label, furniture) = ROOM_TYPES[kind];
        let region = self.region(level, label, lo, hi);
        self.structure(region, lo, hi);

        let count = 4 + self.rng.below(3) as usize;
        for _ in 0..count {
            let name = furniture[self.rng.below(furniture.len() as u64) as usize];
            let entry = CATALOG[self.category(name)];
            let scale = uniform(&mut self.rng, 0.8, 1.2);
            let radii = entry.4.map(|r| r * scale);
            let x = uniform(&mut self.rng, lo.x + 0.4, hi.x - 0.4);
            let y = uniform(&mut self.rng, lo.y + 0.4, hi.y - 0.4);
            let angle = self.rng.below(8) as f64 * std::f64::consts::FRAC_PI_4;
            self.object(region, name, Vec3::new(x, y, floor_z + entry.3), angle, radii);
        }

        let mut ids = [0usize; 4];
        for (k, (dx, dy)) in [(1.0, 1.0), (3.0, 1.0), (1.0, 3.0), (3.0, 3.0)].into_iter().enumerate() {
            let jx = uniform(&mut self.rng, -0.2, 0.2);
            let jy = uniform(&mut self.rng, -0.2, 0.2);
            ids[k] = self.viewpoint(region, lo.x + dx + jx, lo.y + dy + jy, floor_z, true);
        }
        self.edges.extend([(ids[0], ids[1]), (ids[2], ids[3]), (ids[0], ids[2]), (ids[1], ids[3])]);
        ids
    }

    /// Rooms of one floor; adjacent rooms share a single doorway edge.
    fn floor(&mut self, level: usize, col0: usize, cols: usize, rows: usize) -> Vec<Vec<[usize; 4]>> {
        let mut grid = vec![vec![[0usize; 4]; rows]; cols];
        for (c, column) in grid.iter_mut().enumerate() {
            for (r, cell) in column.iter_mut().enumerate() {
                *cell = self.room(level, col0 + c, r);
            }
        }
        for c in 0..cols {
            for r in 0..rows {
                if c + 1 < cols {
                    let lower = self.rng.below(2) == 0;
                    let (a, b) = if lower { (1, 0) } else { (3, 2) };
                    self.edges.push((grid[c][r][a], grid[c + 1][r][b]));
                }
                if r + 1 < rows {
                    let left = self.rng.below(2) == 0;
                    let (a, b) = if left { (2, 0) } else { (3, 1) };
                    self.edges.push((grid[c][r][a], grid[c][r + 1][b]));
                }
            }
        }
        grid
    }
}

pub fn generate_house(scan_id: &str, spec: &HouseSpec) -> GeneratedHouse {
    let (gc, gr) = spec.ground;
    let (uc, ur) = spec.upper;
    assert!(gc >= 1 && gr >= 2 && uc >= 1 && ur >= 1 && uc <= gc && ur <= gr);
    let mut b = Builder {
        rng: SplitMix64::new(spec.seed),
        scene: SceneModel {
            scan_id: scan_id.to_string(),
            ..Default::default()
        },
        viewpoints: Vec::new(),
        edges: Vec::new(),
    };
    for (i, c) in CATALOG.iter().enumerate() {
        b.scene.categories.push(Category {
            index: i,
            mapping_index: 100 + i as i64,
            name: c.0.replace('_', " "),
            mpcat40_index: c.1,
            mpcat40_name: c.2.to_string(),
        });
    }

    let ground = b.floor(0, 0, gc, gr);
    let upper = b.floor(1, gc - uc, uc, ur);

    // Stairwell east of the ground floor: a hallway landing below, a stair
    // flight, and an upper landing that joins the upper floor.
    let x0 = gc as f64 * ROOM;
    let hall = b.region(0, 'h', Vec3::new(x0, 0.0, 0.0), Vec3::new(x0 + ROOM, ROOM, FLOOR_HEIGHT));
    let flight = b.region(0, 's', Vec3::new(x0, ROOM, 0.0), Vec3::new(x0 + ROOM, 2.0 * ROOM, 2.0 * FLOOR_HEIGHT));
    let landing = b.region(1, 'h', Vec3::new(x0, 2.0 * ROOM, FLOOR_HEIGHT), Vec3::new(x0 + ROOM, 3.0 * ROOM, 2.0 * FLOOR_HEIGHT));
    b.structure(hall, Vec3::new(x0, 0.0, 0.0), Vec3::new(x0 + ROOM, ROOM, FLOOR_HEIGHT));
    b.object(hall, "potted_plant", Vec3::new(x0 + 3.2, 0.6, 0.8), 0.0, [0.3, 0.3, 0.5]);
    b.object(flight, "stairs", Vec3::new(x0 + 2.6, 1.5 * ROOM, 1.5), 0.0, [0.5, 1.8, 1.5]);
    b.object(landing, "painting", Vec3::new(x0 + 3.9, 2.5 * ROOM, FLOOR_HEIGHT + 1.6), std::f64::consts::FRAC_PI_2, [0.5, 0.04, 0.4]);

    let bottom = b.viewpoint(hall, x0 + 1.0, 3.0, 0.0, true);
    let mid = b.viewpoint(flight, x0 + 1.0, 1.5 * ROOM, 0.5 * FLOOR_HEIGHT, true);
    let top = b.viewpoint(landing, x0 + 1.0, 2.0 * ROOM + 1.0, FLOOR_HEIGHT, true);
    b.edges.extend([(bottom, mid), (mid, top)]);
    b.edges.push((ground[gc - 1][0][3], bottom));
    // The upper landing opens onto the nearest upper-floor room.
    let up_row = (ur - 1).min(2);
    b.edges.push((top, upper[uc - 1][up_row][if up_row == 2 { 1 } else { 3 }]));

    // Excluded viewpoints keep their panorama but lose every edge.
    let excluded_room = ground[0][0];
    let ex = b.viewpoint(0, 2.0, 2.0, 0.0, false);
    b.edges.push((excluded_room[0], ex));
    let _ = b.viewpoint(hall, x0 + 3.0, 3.0, 0.0, false);

    let n = b.viewpoints.len();
    let mut rows = vec![vec![false; n]; n];
    let edges = std::mem::take(&mut b.edges);
    for (i, j) in edges {
        match b.rng.below(4) {
            0 => rows[i][j] = true,
            1 => rows[j][i] = true,
            _ => {
                rows[i][j] = true;
                rows[j][i] = true;
            }
        }
    }
    let nodes = b
        .viewpoints
        .into_iter()
        .zip(rows)
        .map(|(viewpoint, unobstructed)| ConnectivityNode { viewpoint, unobstructed })
        .collect();

    let top_z = 2.0 * FLOOR_HEIGHT;
    let width = (gc + 1) as f64 * ROOM;
    let depth = (gr.max(3)) as f64 * ROOM;
    let levels = vec![
        HouseLevel {
            index: 0,
            label: "ground".into(),
            position: Vec3::new(width / 2.0, depth / 2.0, 0.0),
            bbox_lo: Vec3::ZERO,
            bbox_hi: Vec3::new(width, depth, FLOOR_HEIGHT),
        },
        HouseLevel {
            index: 1,
            label: "upper".into(),
            position: Vec3::new(width / 2.0, depth / 2.0, FLOOR_HEIGHT),
            bbox_lo: Vec3::new(0.0, 0.0, FLOOR_HEIGHT),
            bbox_hi: Vec3::new(width, depth, top_z),
        },
    ];
    GeneratedHouse { scene: b.scene, levels, nodes }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{:.6}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn fmt_vec(v: Vec3) -> String {
    format!("{} {} {}", fmt_num(v.x), fmt_num(v.y), fmt_num(v.z))
}

/// Writes the `.house` subset (header, levels, regions, categories,
/// panoramas, objects).
pub fn write_house(scene: &SceneModel, levels: &[HouseLevel]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "H {} house 0 {} 0 0 0 {} {} {} 0 {} 0 0 0 0 0",
        scene.scan_id,
        scene.panoramas.len(),
        scene.objects.len(),
        scene.categories.len(),
        scene.regions.len(),
        levels.len()
    );
    for l in levels {
        let count = scene.regions.iter().filter(|r| r.level_index == l.index).count();
        let _ = writeln!(
            s,
            "L {} {} {} {} {} {} 0 0 0 0 0",
            l.index,
            count,
            l.label,
            fmt_vec(l.position),
            fmt_vec(l.bbox_lo),
            fmt_vec(l.bbox_hi)
        );
    }
    for r in &scene.regions {
        let _ = writeln!(
            s,
            "R {} {} 0 0 {} {} {} {} 0 0 0 0 0",
            r.index,
            r.level_index,
            r.label,
            fmt_vec(r.position),
            fmt_vec(r.bbox_lo),
            fmt_vec(r.bbox_hi)
        );
    }
    for c in &scene.categories {
        let _ = writeln!(
            s,
            "C {} {} {} {} {} 0 0 0 0 0",
            c.index,
            c.mapping_index,
            c.name.replace(' ', "_"),
            c.mpcat40_index,
            c.mpcat40_name
        );
    }
    for p in &scene.panoramas {
        let _ = writeln!(s, "P {} {} {} 0 {} 0 0 0 0 0", p.name, p.index, p.region_index, fmt_vec(p.position));
    }
    for o in &scene.objects {
        let _ = writeln!(
            s,
            "O {} {} {} {} {} {} {} {} {} 0 0 0 0 0 0 0 0",
            o.index,
            o.region_index,
            o.category_index,
            fmt_vec(o.center),
            fmt_vec(o.axis0),
            fmt_vec(o.axis1),
            fmt_num(o.radii[0]),
            fmt_num(o.radii[1]),
            fmt_num(o.radii[2])
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::parse_connectivity;
    use vlnaug_core::scene::parse_house;

    #[test]
    fn generated_house_round_trips_through_files() {
        for (name, spec) in bundled_specs() {
            let h = generate_house(name, &spec);
            let parsed = parse_house(&h.house_text()).unwrap();
            assert_eq!(parsed, h.scene, "{}", name);
            let g = parse_connectivity(&h.connectivity_text(), name).unwrap();
            assert_eq!(g.viewpoints().len(), h.nodes.len());
            for p in &parsed.panoramas {
                assert_eq!(g.position(&p.name).unwrap(), p.position);
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let (name, spec) = bundled_specs()[0];
        assert_eq!(generate_house(name, &spec).house_text(), generate_house(name, &spec).house_text());
    }
}
