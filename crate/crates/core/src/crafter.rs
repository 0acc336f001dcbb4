//! Rule-based instruction crafting: one clause per path edge plus a stop
//! clause, rendered through a closed template grammar.
//!
//! Template table (clause = turn prefix + motion core + object suffix, first
//! letter uppercased):
//!
//! | turn     | prefix           | motion         | core                 |
//! |----------|------------------|----------------|----------------------|
//! | none     | ""               | walk straight  | "walk straight"      |
//! | left     | "Turn left, "    | go up          | "go up the stairs"   |
//! | right    | "Turn right, "   | go down        | "go down the stairs" |
//! | around   | "Turn around, "  |                |                      |
//!
//! Object suffixes: left → " down the left of the <cat>", right →
//! " down the right of the <cat>", toward → " toward the <cat>".
//! Stop clauses: "stop there", "stop right at the left of the <cat>",
//! "stop right at the right of the <cat>", "stop right at the <cat>".

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::geometry::{heading_to, relative_bearing, Vec3};
use crate::graph::{GraphError, NavGraph, PathSpec};
use crate::saliency::{best_object, candidates_at, side_of_travel, Relation, SaliencyConfig};
use crate::scene::SceneModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Turn {
    None,
    Left,
    Right,
    Around,
}

impl Turn {
    pub const ALL: [Turn; 4] = [Turn::None, Turn::Left, Turn::Right, Turn::Around];

    /// Bearing at the center of the class.
    pub fn center(self) -> f64 {
        match self {
            Turn::None => 0.0,
            Turn::Right => PI / 2.0,
            Turn::Left => -PI / 2.0,
            Turn::Around => PI,
        }
    }

    pub(crate) fn prefix(self) -> &'static str {
        match self {
            Turn::None => "",
            Turn::Left => "turn left, ",
            Turn::Right => "turn right, ",
            Turn::Around => "turn around, ",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Motion {
    WalkStraight,
    GoUp,
    GoDown,
    Stop,
}

impl Motion {
    pub const MOVES: [Motion; 3] = [Motion::WalkStraight, Motion::GoUp, Motion::GoDown];

    pub(crate) fn core(self) -> &'static str {
        match self {
            Motion::WalkStraight => "walk straight",
            Motion::GoUp => "go up the stairs",
            Motion::GoDown => "go down the stairs",
            Motion::Stop => "stop",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectRef {
    pub category: String,
    pub relation: Relation,
}

/// One clause of a crafted instruction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomicInstruction {
    pub turn: Turn,
    pub motion: Motion,
    pub object_ref: Option<ObjectRef>,
}

impl AtomicInstruction {
    pub fn new(turn: Turn, motion: Motion, object_ref: Option<ObjectRef>) -> Self {
        AtomicInstruction {
            turn,
            motion,
            object_ref,
        }
    }

    pub fn stop(object_ref: Option<ObjectRef>) -> Self {
        AtomicInstruction::new(Turn::None, Motion::Stop, object_ref)
    }

    pub fn is_stop(&self) -> bool {
        self.motion == Motion::Stop
    }

    /// Rendered clause, without the terminating period.
    pub fn text(&self) -> String {
        let mut s = String::from(self.turn.prefix());
        if self.motion == Motion::Stop {
            match &self.object_ref {
                None => s.push_str("stop there"),
                Some(o) => {
                    s.push_str("stop right at the ");
                    match o.relation {
                        Relation::Left => s.push_str("left of the "),
                        Relation::Right => s.push_str("right of the "),
                        Relation::Toward => {}
                    }
                    s.push_str(&o.category);
                }
            }
        } else {
            s.push_str(self.motion.core());
            if let Some(o) = &self.object_ref {
                s.push_str(match o.relation {
                    Relation::Left => " down the left of the ",
                    Relation::Right => " down the right of the ",
                    Relation::Toward => " toward the ",
                });
                s.push_str(&o.category);
            }
        }
        capitalize(&s)
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Clauses joined by ". " with a terminal period.
pub fn render_instruction(atoms: &[AtomicInstruction]) -> String {
    let mut s = String::new();
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            s.push_str(". ");
        }
        s.push_str(&a.text());
    }
    s.push('.');
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct CraftedInstruction {
    pub atoms: Vec<AtomicInstruction>,
    pub text: String,
    /// Agent heading after each atom.
    pub headings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CraftError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("path is empty")]
    EmptyPath,
}

const TURN_NONE_LIMIT: f64 = PI / 8.0;
const TURN_SIDE_LIMIT: f64 = 5.0 * PI / 8.0;

pub fn classify_turn(bearing: f64) -> Turn {
    if libm::fabs(bearing) < TURN_NONE_LIMIT {
        Turn::None
    } else if (TURN_NONE_LIMIT..TURN_SIDE_LIMIT).contains(&bearing) {
        Turn::Right
    } else if bearing <= -TURN_NONE_LIMIT && bearing > -TURN_SIDE_LIMIT {
        Turn::Left
    } else {
        Turn::Around
    }
}

/// Height change that counts as stairs when it also crosses a region.
pub const STAIRS_RISE: f64 = 0.5;

pub fn classify_vertical(dz: f64, cross_region: bool) -> Motion {
    if dz > STAIRS_RISE && cross_region {
        Motion::GoUp
    } else if dz < -STAIRS_RISE && cross_region {
        Motion::GoDown
    } else {
        Motion::WalkStraight
    }
}

/// Reference to the best object seen from `position` in direction `heading`.
pub fn object_ref_toward(
    scene: &SceneModel,
    position: Vec3,
    heading: f64,
    cfg: &SaliencyConfig,
) -> Option<ObjectRef> {
    let candidates = candidates_at(scene, position, cfg);
    best_object(&candidates, heading, &cfg.fov).map(|o| ObjectRef {
        category: o.category.clone(),
        relation: side_of_travel(heading, o.heading),
    })
}

/// The clause describing the move along edge `cur → next` for an agent
/// currently facing `cur_heading`, and the heading after the move.
pub fn atomic_for_edge(
    scene: &SceneModel,
    graph: &NavGraph,
    cfg: &SaliencyConfig,
    cur: &str,
    next: &str,
    cur_heading: f64,
) -> Result<(AtomicInstruction, f64), CraftError> {
    graph.edge_length(cur, next)?;
    let from = graph.position(cur)?;
    let to = graph.position(next)?;
    let target = heading_to(from, to).radians;
    let turn = classify_turn(relative_bearing(cur_heading, target));
    let cross_region = scene.region_of(cur) != scene.region_of(next);
    let motion = classify_vertical(to.z - from.z, cross_region);
    let object_ref = object_ref_toward(scene, from, target, cfg);
    Ok((AtomicInstruction::new(turn, motion, object_ref), target))
}

/// Final clause at `node`, referencing the best object ahead.
pub fn stop_atom(
    scene: &SceneModel,
    graph: &NavGraph,
    node: &str,
    incoming_heading: f64,
    cfg: &SaliencyConfig,
) -> Result<AtomicInstruction, CraftError> {
    let pos = graph.position(node)?;
    Ok(AtomicInstruction::stop(object_ref_toward(
        scene,
        pos,
        incoming_heading,
        cfg,
    )))
}

pub fn craft_instruction(
    scene: &SceneModel,
    graph: &NavGraph,
    path: &PathSpec,
    cfg: &SaliencyConfig,
) -> Result<CraftedInstruction, CraftError> {
    let last = path.path.last().ok_or(CraftError::EmptyPath)?;
    let mut atoms = Vec::with_capacity(path.path.len());
    let mut headings = Vec::with_capacity(path.path.len());
    let mut heading = path.heading_0;
    for w in path.path.windows(2) {
        let (atom, next_heading) = atomic_for_edge(scene, graph, cfg, &w[0], &w[1], heading)?;
        heading = next_heading;
        atoms.push(atom);
        headings.push(heading);
    }
    atoms.push(stop_atom(scene, graph, last, heading, cfg)?);
    headings.push(heading);
    let text = render_instruction(&atoms);
    Ok(CraftedInstruction {
        atoms,
        text,
        headings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::square;
    use alloc::string::ToString;
    use alloc::vec;
    use core::f64::consts::FRAC_PI_2;
    use proptest::prelude::*;

    fn obj(cat: &str, rel: Relation) -> Option<ObjectRef> {
        Some(ObjectRef {
            category: cat.to_string(),
            relation: rel,
        })
    }

    #[test]
    fn turn_classes() {
        assert_eq!(classify_turn(0.0), Turn::None);
        assert_eq!(classify_turn(FRAC_PI_2), Turn::Right);
        assert_eq!(classify_turn(PI), Turn::Around);
        assert_eq!(classify_turn(PI / 8.0), Turn::Right);
        assert_eq!(classify_turn(-PI / 8.0), Turn::Left);
        assert_eq!(classify_turn(5.0 * PI / 8.0), Turn::Around);
        assert_eq!(classify_turn(-5.0 * PI / 8.0), Turn::Around);
    }

    #[test]
    fn vertical_classes() {
        assert_eq!(classify_vertical(0.0, true), Motion::WalkStraight);
        assert_eq!(classify_vertical(1.4, true), Motion::GoUp);
        assert_eq!(classify_vertical(-1.4, true), Motion::GoDown);
        assert_eq!(classify_vertical(0.8, false), Motion::WalkStraight);
    }

    #[test]
    fn template_rendering() {
        let a = AtomicInstruction::new(Turn::Left, Motion::WalkStraight, obj("painting", Relation::Left));
        assert_eq!(a.text(), "Turn left, walk straight down the left of the painting");
        assert_eq!(
            AtomicInstruction::new(Turn::None, Motion::WalkStraight, None).text(),
            "Walk straight"
        );
        assert_eq!(
            AtomicInstruction::new(Turn::Around, Motion::WalkStraight, obj("table", Relation::Toward)).text(),
            "Turn around, walk straight toward the table"
        );
        assert_eq!(
            AtomicInstruction::new(Turn::None, Motion::GoUp, obj("chest of drawers", Relation::Right)).text(),
            "Go up the stairs down the right of the chest of drawers"
        );
        assert_eq!(AtomicInstruction::stop(obj("table", Relation::Left)).text(), "Stop right at the left of the table");
        assert_eq!(AtomicInstruction::stop(None).text(), "Stop there");
        assert_eq!(AtomicInstruction::stop(obj("toilet", Relation::Toward)).text(), "Stop right at the toilet");
    }

    #[test]
    fn single_node_path() {
        let g = square();
        let p = PathSpec {
            scan: "sq".into(),
            path: vec!["a".into()],
            heading_0: 0.0,
            geodesic_length: 0.0,
        };
        let c = craft_instruction(&SceneModel::default(), &g, &p, &SaliencyConfig::default()).unwrap();
        assert_eq!(c.text, "Stop there.");
        assert_eq!(c.atoms.len(), 1);
    }

    #[test]
    fn two_edge_path_on_square() {
        // b(1,0) -> a(0,0) -> d(0,1), starting toward +Y: west is a left
        // turn, then north is a right turn.
        let g = square();
        let p = PathSpec {
            scan: "sq".into(),
            path: vec!["b".into(), "a".into(), "d".into()],
            heading_0: 0.0,
            geodesic_length: 2.0,
        };
        let c = craft_instruction(&SceneModel::default(), &g, &p, &SaliencyConfig::default()).unwrap();
        assert_eq!(c.text, "Turn left, walk straight. Turn right, walk straight. Stop there.");
        assert_eq!(c.headings, vec![3.0 * FRAC_PI_2, 0.0, 0.0]);
        let again = craft_instruction(&SceneModel::default(), &g, &p, &SaliencyConfig::default()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn non_edge_rejected() {
        let g = square();
        let r = atomic_for_edge(&SceneModel::default(), &g, &SaliencyConfig::default(), "b", "d", 0.0);
        assert!(matches!(r, Err(CraftError::Graph(GraphError::NotAnEdge(..)))));
    }

    proptest! {
        #[test]
        fn turn_classes_mirror(b in (PI / 8.0)..(5.0 * PI / 8.0)) {
            prop_assert_eq!(classify_turn(b), Turn::Right);
            prop_assert_eq!(classify_turn(-b), Turn::Left);
        }
    }
}
