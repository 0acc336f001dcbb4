//! Inverse of the crafter: parse crafted text back into atoms, follow the
//! atoms on the graph, and score the outcome with PL / NE / SR / SPL.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::crafter::{
    atomic_for_edge, object_ref_toward, stop_atom, AtomicInstruction, CraftError, Motion, ObjectRef, Turn,
};
use crate::geometry::{heading_to, relative_bearing};
use crate::graph::{GraphError, NavGraph, PathSpec};
use crate::saliency::{Relation, SaliencyConfig};
use crate::scene::SceneModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("clause {clause}: cannot parse `{fragment}`")]
pub struct ParseError {
    pub clause: usize,
    pub fragment: String,
}

const SUFFIXES: [(&str, Relation); 3] = [
    (" down the left of the ", Relation::Left),
    (" down the right of the ", Relation::Right),
    (" toward the ", Relation::Toward),
];

fn parse_clause(clause: &str) -> Option<AtomicInstruction> {
    let (turn, rest) = [
        ("Turn left, ", Turn::Left),
        ("Turn right, ", Turn::Right),
        ("Turn around, ", Turn::Around),
    ]
    .iter()
    .find_map(|(p, t)| clause.strip_prefix(p).map(|r| (*t, r)))
    .unwrap_or((Turn::None, clause));

    // With no turn prefix the motion core carries the capital letter.
    let core = |lower: &'static str| -> String {
        if turn == Turn::None {
            let mut c = lower.chars();
            let first = c.next().map(|ch| ch.to_ascii_uppercase()).unwrap_or(' ');
            core::iter::once(first).chain(c).collect()
        } else {
            lower.to_string()
        }
    };

    if let Some(after) = rest.strip_prefix(core("stop").as_str()) {
        if after == " there" {
            return Some(AtomicInstruction::new(turn, Motion::Stop, None));
        }
        let target = after.strip_prefix(" right at the ")?;
        let (relation, category) = if let Some(c) = target.strip_prefix("left of the ") {
            (Relation::Left, c)
        } else if let Some(c) = target.strip_prefix("right of the ") {
            (Relation::Right, c)
        } else {
            (Relation::Toward, target)
        };
        if category.is_empty() {
            return None;
        }
        return Some(AtomicInstruction::new(
            turn,
            Motion::Stop,
            Some(ObjectRef {
                category: category.to_string(),
                relation,
            }),
        ));
    }

    for motion in Motion::MOVES {
        let Some(after) = rest.strip_prefix(core(motion.core()).as_str()) else {
            continue;
        };
        if after.is_empty() {
            return Some(AtomicInstruction::new(turn, motion, None));
        }
        for (suffix, relation) in SUFFIXES {
            if let Some(category) = after.strip_prefix(suffix) {
                if category.is_empty() {
                    return None;
                }
                return Some(AtomicInstruction::new(
                    turn,
                    motion,
                    Some(ObjectRef {
                        category: category.to_string(),
                        relation,
                    }),
                ));
            }
        }
        return None;
    }
    None
}

/// Parses text produced by [`crate::crafter::render_instruction`].
pub fn parse_crafted(text: &str) -> Result<Vec<AtomicInstruction>, ParseError> {
    let body = text.strip_suffix('.').ok_or_else(|| ParseError {
        clause: 0,
        fragment: text.to_string(),
    })?;
    body.split(". ")
        .enumerate()
        .map(|(clause, frag)| {
            parse_clause(frag).ok_or_else(|| ParseError {
                clause,
                fragment: frag.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionResult {
    pub path: Vec<String>,
    pub final_heading: f64,
    pub stopped: bool,
    pub failure_reason: Option<String>,
}

/// One neighbor as seen by the executor for a given atom.
struct Move<'g> {
    nbr: &'g str,
    toward: f64,
    score: f64,
    /// The crafter would describe this move with exactly this atom.
    consistent: bool,
}

/// Scores every neighbor of `cur` for `atom`: distance to the expected
/// bearing (the turn class center), minus `π` when the best object toward
/// the neighbor matches the referenced category. Sorted by score, ties by
/// id.
fn moves<'g>(
    graph: &'g NavGraph,
    scene: &SceneModel,
    cfg: &SaliencyConfig,
    cur: &str,
    heading: f64,
    atom: &AtomicInstruction,
) -> Result<Vec<Move<'g>>, GraphError> {
    let from = graph.position(cur)?;
    let expected = heading + atom.turn.center();
    let mut out = Vec::new();
    for (nbr, _) in graph.neighbors(cur)? {
        let toward = heading_to(from, graph.position(nbr)?).radians;
        let mut score = libm::fabs(relative_bearing(expected, toward));
        if let Some(wanted) = &atom.object_ref {
            let seen = object_ref_toward(scene, from, toward, cfg);
            if seen.is_some_and(|o| o.category == wanted.category) {
                score -= PI;
            }
        }
        let consistent = match atomic_for_edge(scene, graph, cfg, cur, nbr, heading) {
            Ok((described, _)) => described == *atom,
            Err(CraftError::Graph(e)) => return Err(e),
            Err(CraftError::EmptyPath) => false,
        };
        out.push(Move {
            nbr,
            toward,
            score,
            consistent,
        });
    }
    // neighbors arrive in id order and the sort is stable
    out.sort_by(|a, b| a.score.partial_cmp(&b.score).unwrap_or(core::cmp::Ordering::Equal));
    Ok(out)
}

/// Upper bound on visited search states before falling back to the greedy
/// walk.
const SEARCH_BUDGET: usize = 20_000;

struct Search<'a> {
    graph: &'a NavGraph,
    scene: &'a SceneModel,
    cfg: &'a SaliencyConfig,
    atoms: &'a [AtomicInstruction],
    visited: usize,
}

impl Search<'_> {
    /// Depth-first search for a route on which the crafter would produce
    /// `atoms[k..]` exactly, trying consistent neighbors best score first.
    fn run(&mut self, k: usize, path: &mut Vec<String>, heading: f64) -> Result<Option<f64>, GraphError> {
        self.visited += 1;
        if self.visited > SEARCH_BUDGET {
            return Ok(None);
        }
        let Some(atom) = self.atoms.get(k) else {
            return Ok(None);
        };
        let cur = path.last().cloned().unwrap_or_default();
        if atom.motion == Motion::Stop {
            let described = stop_atom(self.scene, self.graph, &cur, heading, self.cfg).map_err(|e| match e {
                CraftError::Graph(g) => g,
                CraftError::EmptyPath => GraphError::Empty,
            })?;
            return Ok((described == *atom).then_some(heading));
        }
        for m in moves(self.graph, self.scene, self.cfg, &cur, heading, atom)? {
            if !m.consistent {
                continue;
            }
            path.push(m.nbr.to_string());
            if let Some(h) = self.run(k + 1, path, m.toward)? {
                return Ok(Some(h));
            }
            path.pop();
        }
        Ok(None)
    }
}

/// Follows `atoms` from `start`.
///
/// The executor first looks for a route on which every clause, the stop
/// clause included, is exactly what the crafter would say; among several
/// it prefers, step by step, the neighbor closest to the expected bearing
/// (the turn class center), with a flat `-π` bonus for neighbors whose best
/// object matches the referenced category, ties to the smaller id. When no
/// such route exists (edited text, a different saliency config) it walks
/// greedily by the same score, still preferring neighbors whose clause
/// matches when there are any.
pub fn execute(
    graph: &NavGraph,
    scene: &SceneModel,
    start: &str,
    heading_0: f64,
    atoms: &[AtomicInstruction],
    cfg: &SaliencyConfig,
) -> Result<ExecutionResult, GraphError> {
    graph.viewpoint(start)?;
    let mut search = Search {
        graph,
        scene,
        cfg,
        atoms,
        visited: 0,
    };
    let mut path = vec![start.to_string()];
    if let Some(final_heading) = search.run(0, &mut path, heading_0)? {
        return Ok(ExecutionResult {
            path,
            final_heading,
            stopped: true,
            failure_reason: None,
        });
    }
    execute_greedy(graph, scene, start, heading_0, atoms, cfg)
}

/// Step-by-step execution without lookahead.
pub fn execute_greedy(
    graph: &NavGraph,
    scene: &SceneModel,
    start: &str,
    heading_0: f64,
    atoms: &[AtomicInstruction],
    cfg: &SaliencyConfig,
) -> Result<ExecutionResult, GraphError> {
    graph.viewpoint(start)?;
    let mut path = vec![start.to_string()];
    let mut heading = heading_0;
    for atom in atoms {
        if atom.motion == Motion::Stop {
            return Ok(ExecutionResult {
                path,
                final_heading: heading,
                stopped: true,
                failure_reason: None,
            });
        }
        let cur = path.last().cloned().unwrap_or_default();
        let scored = moves(graph, scene, cfg, &cur, heading, atom)?;
        let any_consistent = scored.iter().any(|m| m.consistent);
        match scored.iter().find(|m| m.consistent || !any_consistent) {
            Some(m) => {
                path.push(m.nbr.to_string());
                heading = m.toward;
            }
            None => {
                return Ok(ExecutionResult {
                    path,
                    final_heading: heading,
                    stopped: false,
                    failure_reason: Some(format!("viewpoint `{}` has no neighbors", cur)),
                });
            }
        }
    }
    Ok(ExecutionResult {
        path,
        final_heading: heading,
        stopped: false,
        failure_reason: Some("instruction ended without a stop clause".to_string()),
    })
}

/// Navigation metrics for one episode, or their mean over a batch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NavMetrics {
    /// Path length actually traversed, meters.
    pub pl: f64,
    /// Geodesic distance from the final position to the goal, meters.
    pub ne: f64,
    pub sr: f64,
    pub spl: f64,
}

impl NavMetrics {
    pub fn mean(items: &[NavMetrics]) -> NavMetrics {
        if items.is_empty() {
            return NavMetrics::default();
        }
        let n = items.len() as f64;
        let mut m = NavMetrics::default();
        for x in items {
            m.pl += x.pl;
            m.ne += x.ne;
            m.sr += x.sr;
            m.spl += x.spl;
        }
        NavMetrics {
            pl: m.pl / n,
            ne: m.ne / n,
            sr: m.sr / n,
            spl: m.spl / n,
        }
    }
}

/// R2R success threshold, meters.
pub const DEFAULT_SUCCESS_RADIUS: f64 = 3.0;

/// Scores an execution against the gold path. An unreachable goal yields an
/// infinite navigation error.
pub fn evaluate(
    graph: &NavGraph,
    gold: &PathSpec,
    result: &ExecutionResult,
    success_radius: f64,
) -> Result<NavMetrics, GraphError> {
    let pl = graph.path_length(&result.path)?;
    let ne = match (result.path.last(), gold.path.last()) {
        (Some(end), Some(goal)) => graph.geodesic(end, goal)?.unwrap_or(f64::INFINITY),
        _ => f64::INFINITY,
    };
    let sr = if result.stopped && ne <= success_radius {
        1.0
    } else {
        0.0
    };
    let denom = pl.max(gold.geodesic_length);
    let spl = if denom > 0.0 {
        sr * gold.geodesic_length / denom
    } else {
        sr
    };
    Ok(NavMetrics { pl, ne, sr, spl })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crafter::{craft_instruction, render_instruction};
    use crate::graph::tests::{square, vp};
    use crate::graph::NavGraph;

    #[test]
    fn parse_examples() {
        assert_eq!(parse_crafted("Stop there.").unwrap(), vec![AtomicInstruction::stop(None)]);
        let atoms =
            parse_crafted("Turn left, walk straight down the left of the painting. Stop there.").unwrap();
        assert_eq!(atoms.len(), 2);
        assert_eq!(atoms[0].turn, Turn::Left);
        assert_eq!(
            atoms[0].object_ref,
            Some(ObjectRef {
                category: "painting".into(),
                relation: Relation::Left
            })
        );
        let err = parse_crafted("Walk sideways.").unwrap_err();
        assert_eq!(err.clause, 0);
        assert_eq!(err.fragment, "Walk sideways");
        let err = parse_crafted("Walk straight. walk straight.").unwrap_err();
        assert_eq!(err.clause, 1);
        assert!(parse_crafted("Stop there").is_err());
        assert!(parse_crafted("Stop right at the .").is_err());
    }

    #[test]
    fn multiword_categories_parse() {
        let atoms = vec![
            AtomicInstruction::new(
                Turn::Right,
                Motion::GoDown,
                Some(ObjectRef {
                    category: "chest of drawers".into(),
                    relation: Relation::Toward,
                }),
            ),
            AtomicInstruction::stop(Some(ObjectRef {
                category: "kitchen counter".into(),
                relation: Relation::Right,
            })),
        ];
        assert_eq!(parse_crafted(&render_instruction(&atoms)).unwrap(), atoms);
    }

    #[test]
    fn stop_only() {
        let g = square();
        let r = execute(&g, &SceneModel::default(), "a", 0.0, &[AtomicInstruction::stop(None)], &SaliencyConfig::default()).unwrap();
        assert_eq!(r.path, vec!["a"]);
        assert!(r.stopped);
    }

    #[test]
    fn turn_right_with_only_neighbor_behind() {
        let g = NavGraph::from_edges("s", vec![vp("a", 0.0, 0.0), vp("b", 0.0, -2.0)], &[("a", "b")]).unwrap();
        let atoms = vec![
            AtomicInstruction::new(Turn::Right, Motion::WalkStraight, None),
            AtomicInstruction::stop(None),
        ];
        let r = execute(&g, &SceneModel::default(), "a", 0.0, &atoms, &SaliencyConfig::default()).unwrap();
        assert_eq!(r.path, vec!["a", "b"]);
        assert!(r.stopped);
    }

    #[test]
    fn later_clauses_disambiguate_an_early_one() {
        // From a facing +Y both b (behind) and c (behind-left) read "turn
        // around"; only the route through c can continue straight.
        let g = NavGraph::from_edges(
            "s",
            vec![vp("a", 0.0, 0.0), vp("b", 0.0, -2.0), vp("c", -2.0, -2.0), vp("d", -4.0, -4.0)],
            &[("a", "b"), ("a", "c"), ("c", "d")],
        )
        .unwrap();
        let scene = SceneModel::default();
        let cfg = SaliencyConfig::default();
        let gold = PathSpec {
            scan: "s".into(),
            path: vec!["a".into(), "c".into(), "d".into()],
            heading_0: 0.0,
            geodesic_length: 0.0,
        };
        let c = craft_instruction(&scene, &g, &gold, &cfg).unwrap();
        assert_eq!(c.text, "Turn around, walk straight. Walk straight. Stop there.");
        let greedy = execute_greedy(&g, &scene, "a", 0.0, &c.atoms, &cfg).unwrap();
        assert_eq!(greedy.path, vec!["a", "b", "a"]);
        let r = execute(&g, &scene, "a", 0.0, &c.atoms, &cfg).unwrap();
        assert_eq!(r.path, gold.path);
        assert!(r.stopped);
    }

    #[test]
    fn dead_end_and_missing_stop() {
        let g = square();
        let walk = AtomicInstruction::new(Turn::None, Motion::WalkStraight, None);
        let r = execute(&g, &SceneModel::default(), "e", 0.0, core::slice::from_ref(&walk), &SaliencyConfig::default()).unwrap();
        assert!(!r.stopped);
        assert!(r.failure_reason.is_some());
        let r = execute(&g, &SceneModel::default(), "a", 0.0, &[walk], &SaliencyConfig::default()).unwrap();
        assert!(!r.stopped);
        assert_eq!(r.path.len(), 2);
    }

    #[test]
    fn craft_execute_round_trip_on_square() {
        let g = square();
        let scene = SceneModel::default();
        let cfg = SaliencyConfig::default();
        let p = g.shortest_path("b", "d").unwrap().unwrap();
        let c = craft_instruction(&scene, &g, &p, &cfg).unwrap();
        let atoms = parse_crafted(&c.text).unwrap();
        assert_eq!(atoms, c.atoms);
        let r = execute(&g, &scene, "b", p.heading_0, &atoms, &cfg).unwrap();
        assert_eq!(r.path, p.path);
    }

    #[test]
    fn metric_identities() {
        let g = square();
        let gold = g.shortest_path("b", "d").unwrap().unwrap();
        let same = ExecutionResult {
            path: gold.path.clone(),
            final_heading: 0.0,
            stopped: true,
            failure_reason: None,
        };
        let m = evaluate(&g, &gold, &same, DEFAULT_SUCCESS_RADIUS).unwrap();
        assert_eq!((m.ne, m.sr, m.spl), (0.0, 1.0, 1.0));
        assert_eq!(m.pl, 2.0);

        // b-a-b-a-d: twice the gold length, same goal
        let long = ExecutionResult {
            path: ["b", "a", "b", "a", "d"].iter().map(|s| s.to_string()).collect(),
            ..same.clone()
        };
        let m = evaluate(&g, &gold, &long, DEFAULT_SUCCESS_RADIUS).unwrap();
        assert_eq!((m.pl, m.sr, m.spl), (4.0, 1.0, 0.5));

        let unstopped = ExecutionResult {
            stopped: false,
            ..same
        };
        let m = evaluate(&g, &gold, &unstopped, DEFAULT_SUCCESS_RADIUS).unwrap();
        assert_eq!((m.ne, m.sr, m.spl), (0.0, 0.0, 0.0));

        let avg = NavMetrics::mean(&[
            NavMetrics { pl: 1.0, ne: 0.0, sr: 1.0, spl: 1.0 },
            NavMetrics { pl: 3.0, ne: 2.0, sr: 0.0, spl: 0.0 },
        ]);
        assert_eq!(avg, NavMetrics { pl: 2.0, ne: 1.0, sr: 0.5, spl: 0.5 });
    }
}
