//! Navigation graph over panorama viewpoints.
//!
//! Viewpoints are kept sorted by id so that internal indices order the same
//! way ids do; every tie-break below relies on that.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::FRAC_PI_6;

use thiserror::Error;

use crate::geometry::{heading_to, Vec3};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub struct Viewpoint {
    pub id: String,
    pub position: Vec3,
    pub height: f64,
    pub included: bool,
}

/// A route through the graph with its initial heading.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub scan: String,
    pub path: Vec<String>,
    pub heading_0: f64,
    pub geodesic_length: f64,
}

impl PathSpec {
    pub fn hops(&self) -> usize {
        self.path.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("duplicate viewpoint id `{0}`")]
    DuplicateId(String),
    #[error("unknown viewpoint `{0}`")]
    UnknownViewpoint(String),
    #[error("viewpoint `{0}` is not included in the navigable graph")]
    Excluded(String),
    #[error("connectivity row {row} has {found} entries, expected {expected}")]
    RowLength {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("edge `{0}`-`{1}` has zero length")]
    ZeroLengthEdge(String, String),
    #[error("`{0}` -> `{1}` is not an edge")]
    NotAnEdge(String, String),
    #[error("graph has no included viewpoints")]
    Empty,
    #[error("min_hops {min} exceeds max_hops {max}")]
    HopRange { min: usize, max: usize },
}

#[derive(Debug, Clone)]
pub struct NavGraph {
    scan_id: String,
    viewpoints: Vec<Viewpoint>,
    by_id: BTreeMap<String, usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl NavGraph {
    /// Builds a graph from nodes in file order and an `unobstructed` matrix
    /// indexed the same way. An edge exists when both endpoints are included
    /// and either direction is unobstructed.
    pub fn from_connectivity(
        scan_id: &str,
        nodes: Vec<Viewpoint>,
        unobstructed: &[Vec<bool>],
    ) -> Result<Self, GraphError> {
        let n = nodes.len();
        for (row, r) in unobstructed.iter().enumerate() {
            if r.len() != n {
                return Err(GraphError::RowLength {
                    row,
                    found: r.len(),
                    expected: n,
                });
            }
        }
        if unobstructed.len() != n {
            return Err(GraphError::RowLength {
                row: unobstructed.len(),
                found: 0,
                expected: n,
            });
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if nodes[i].included
                    && nodes[j].included
                    && (unobstructed[i][j] || unobstructed[j][i])
                {
                    pairs.push((nodes[i].id.clone(), nodes[j].id.clone()));
                }
            }
        }
        let edges: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        Self::from_edges(scan_id, nodes, &edges)
    }

    /// Builds a graph from an explicit undirected edge list. Edges must join
    /// distinct, included viewpoints; duplicates collapse.
    pub fn from_edges(
        scan_id: &str,
        mut viewpoints: Vec<Viewpoint>,
        edges: &[(&str, &str)],
    ) -> Result<Self, GraphError> {
        viewpoints.sort_by(|a, b| a.id.cmp(&b.id));
        let mut by_id = BTreeMap::new();
        for (i, v) in viewpoints.iter().enumerate() {
            if by_id.insert(v.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateId(v.id.clone()));
            }
        }
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); viewpoints.len()];
        for &(a, b) in edges {
            let ia = *by_id
                .get(a)
                .ok_or_else(|| GraphError::UnknownViewpoint(a.to_string()))?;
            let ib = *by_id
                .get(b)
                .ok_or_else(|| GraphError::UnknownViewpoint(b.to_string()))?;
            for &i in &[ia, ib] {
                if !viewpoints[i].included {
                    return Err(GraphError::Excluded(viewpoints[i].id.clone()));
                }
            }
            let len = viewpoints[ia].position.distance(viewpoints[ib].position);
            if !(len > 0.0) {
                return Err(GraphError::ZeroLengthEdge(a.to_string(), b.to_string()));
            }
            if adjacency[ia].iter().any(|&(j, _)| j == ib) {
                continue;
            }
            adjacency[ia].push((ib, len));
            adjacency[ib].push((ia, len));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(j, _)| j);
        }
        Ok(NavGraph {
            scan_id: scan_id.to_string(),
            viewpoints,
            by_id,
            adjacency,
        })
    }

    pub fn scan_id(&self) -> &str {
        &self.scan_id
    }

    /// Viewpoints sorted by id.
    pub fn viewpoints(&self) -> &[Viewpoint] {
        &self.viewpoints
    }

    pub fn viewpoint(&self, id: &str) -> Result<&Viewpoint, GraphError> {
        self.index_of(id).map(|i| &self.viewpoints[i])
    }

    pub fn position(&self, id: &str) -> Result<Vec3, GraphError> {
        self.viewpoint(id).map(|v| v.position)
    }

    fn index_of(&self, id: &str) -> Result<usize, GraphError> {
        self.by_id
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownViewpoint(id.to_string()))
    }

    fn included_index(&self, id: &str) -> Result<usize, GraphError> {
        let i = self.index_of(id)?;
        if !self.viewpoints[i].included {
            return Err(GraphError::Excluded(id.to_string()));
        }
        Ok(i)
    }

    /// Neighbors of a viewpoint with edge lengths, sorted by id.
    pub fn neighbors(&self, id: &str) -> Result<Vec<(&str, f64)>, GraphError> {
        let i = self.index_of(id)?;
        Ok(self.adjacency[i]
            .iter()
            .map(|&(j, len)| (self.viewpoints[j].id.as_str(), len))
            .collect())
    }

    /// Length of the edge between two viewpoints.
    pub fn edge_length(&self, a: &str, b: &str) -> Result<f64, GraphError> {
        let ia = self.index_of(a)?;
        let ib = self.index_of(b)?;
        self.adjacency[ia]
            .iter()
            .find(|&&(j, _)| j == ib)
            .map(|&(_, len)| len)
            .ok_or_else(|| GraphError::NotAnEdge(a.to_string(), b.to_string()))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Sum of edge lengths along a sequence of viewpoints, in order.
    pub fn path_length(&self, path: &[String]) -> Result<f64, GraphError> {
        let mut total = 0.0;
        for w in path.windows(2) {
            total += self.edge_length(&w[0], &w[1])?;
        }
        Ok(total)
    }

    /// Single-source shortest paths. Labels are ordered by (distance, id
    /// sequence); the lexicographically smallest among equal-cost paths wins.
    fn shortest_tree(&self, src: usize) -> Vec<Option<Label>> {
        let n = self.viewpoints.len();
        let mut labels: Vec<Option<Label>> = vec![None; n];
        let mut settled = vec![false; n];
        labels[src] = Some(Label {
            dist: 0.0,
            path: vec![src],
        });
        loop {
            let mut best: Option<usize> = None;
            for i in 0..n {
                if settled[i] {
                    continue;
                }
                if let Some(l) = &labels[i] {
                    let better = match best {
                        None => true,
                        Some(b) => l.cmp_key(labels[b].as_ref().unwrap()) == Ordering::Less,
                    };
                    if better {
                        best = Some(i);
                    }
                }
            }
            let Some(u) = best else { break };
            settled[u] = true;
            let (du, pu) = {
                let l = labels[u].as_ref().unwrap();
                (l.dist, l.path.clone())
            };
            for &(v, w) in &self.adjacency[u] {
                if settled[v] {
                    continue;
                }
                let mut path = pu.clone();
                path.push(v);
                let cand = Label { dist: du + w, path };
                let replace = match &labels[v] {
                    None => true,
                    Some(cur) => cand.cmp_key(cur) == Ordering::Less,
                };
                if replace {
                    labels[v] = Some(cand);
                }
            }
        }
        labels
    }

    fn to_spec(&self, label: &Label, heading_0: f64) -> PathSpec {
        PathSpec {
            scan: self.scan_id.clone(),
            path: label
                .path
                .iter()
                .map(|&i| self.viewpoints[i].id.clone())
                .collect(),
            heading_0,
            geodesic_length: label.dist,
        }
    }

    /// Minimum-length path from `a` to `b`, `None` when `b` is unreachable.
    pub fn shortest_path(&self, a: &str, b: &str) -> Result<Option<PathSpec>, GraphError> {
        let ia = self.included_index(a)?;
        let ib = self.included_index(b)?;
        let labels = self.shortest_tree(ia);
        Ok(labels[ib].as_ref().map(|l| {
            let heading = if l.path.len() > 1 {
                heading_to(
                    self.viewpoints[l.path[0]].position,
                    self.viewpoints[l.path[1]].position,
                )
                .radians
            } else {
                0.0
            };
            self.to_spec(l, heading)
        }))
    }

    /// Geodesic distance between two viewpoints, `None` when unreachable.
    pub fn geodesic(&self, a: &str, b: &str) -> Result<Option<f64>, GraphError> {
        Ok(self.shortest_path(a, b)?.map(|p| p.geodesic_length))
    }

    /// Samples `n` distinct (start, goal) shortest paths satisfying the hop
    /// and distance constraints.
    ///
    /// Eligible ordered pairs are enumerated by (start id, goal id). The
    /// generator then draws, for the k-th path, a pair index
    /// `k + below(m - k)` (partial Fisher-Yates over the `m` eligible pairs)
    /// followed by a heading `below(12) · π/6`.
    pub fn sample_paths(&self, n: usize, seed: u64, cfg: &SamplerConfig) -> Result<SampledPaths, GraphError> {
        if cfg.min_hops > cfg.max_hops {
            return Err(GraphError::HopRange {
                min: cfg.min_hops,
                max: cfg.max_hops,
            });
        }
        if !self.viewpoints.iter().any(|v| v.included) {
            return Err(GraphError::Empty);
        }
        if n == 0 {
            return Ok(SampledPaths::default());
        }
        let mut eligible: Vec<Label> = Vec::new();
        for (src, v) in self.viewpoints.iter().enumerate() {
            if !v.included {
                continue;
            }
            for label in self.shortest_tree(src).into_iter().flatten() {
                let hops = label.path.len() - 1;
                if hops >= 1
                    && hops >= cfg.min_hops
                    && hops <= cfg.max_hops
                    && label.dist >= cfg.min_geodesic
                {
                    eligible.push(label);
                }
            }
        }
        let mut rng = SplitMix64::new(seed);
        let take = n.min(eligible.len());
        let mut paths = Vec::with_capacity(take);
        for k in 0..take {
            let j = k + rng.below((eligible.len() - k) as u64) as usize;
            eligible.swap(k, j);
            let heading = rng.below(12) as f64 * FRAC_PI_6;
            paths.push(self.to_spec(&eligible[k], heading));
        }
        Ok(SampledPaths {
            paths,
            shortfall: n - take,
            eligible_pairs: eligible.len(),
        })
    }
}

#[derive(Debug, Clone)]
struct Label {
    dist: f64,
    path: Vec<usize>,
}

impl Label {
    fn cmp_key(&self, other: &Label) -> Ordering {
        self.dist
            .partial_cmp(&other.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.path.cmp(&other.path))
    }
}

/// Constraints on sampled routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub min_hops: usize,
    pub max_hops: usize,
    pub min_geodesic: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            min_hops: 4,
            max_hops: 7,
            min_geodesic: 5.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampledPaths {
    pub paths: Vec<PathSpec>,
    /// How many requested paths could not be supplied.
    pub shortfall: usize,
    pub eligible_pairs: usize,
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    pub(crate) fn vp(id: &str, x: f64, y: f64) -> Viewpoint {
        Viewpoint {
            id: id.to_string(),
            position: Vec3::new(x, y, 1.5),
            height: 1.5,
            included: true,
        }
    }

    /// Unit square a(0,0) b(1,0) c(1,1) d(0,1) with diagonal a-c, plus an
    /// isolated node e.
    pub(crate) fn square() -> NavGraph {
        let vps = vec![
            vp("a", 0.0, 0.0),
            vp("b", 1.0, 0.0),
            vp("c", 1.0, 1.0),
            vp("d", 0.0, 1.0),
            vp("e", 5.0, 5.0),
        ];
        NavGraph::from_edges(
            "sq",
            vps,
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")],
        )
        .unwrap()
    }

    #[test]
    fn or_symmetrization() {
        let nodes = vec![vp("x", 0.0, 0.0), vp("y", 1.0, 0.0)];
        let g = NavGraph::from_connectivity("s", nodes, &[vec![false, true], vec![false, false]]).unwrap();
        assert_eq!(g.neighbors("x").unwrap(), vec![("y", 1.0)]);
        assert_eq!(g.neighbors("y").unwrap(), vec![("x", 1.0)]);
    }

    #[test]
    fn excluded_nodes_keep_no_edges() {
        let mut n2 = vp("y", 1.0, 0.0);
        n2.included = false;
        let nodes = vec![vp("x", 0.0, 0.0), n2, vp("z", 0.0, 2.0)];
        let all = vec![vec![true; 3]; 3];
        let g = NavGraph::from_connectivity("s", nodes, &all).unwrap();
        assert_eq!(g.viewpoints().len(), 3);
        assert!(g.neighbors("y").unwrap().is_empty());
        assert_eq!(g.neighbors("x").unwrap(), vec![("z", 2.0)]);
    }

    #[test]
    fn connectivity_errors() {
        let nodes = vec![vp("x", 0.0, 0.0), vp("x", 1.0, 0.0)];
        let all = vec![vec![false; 2]; 2];
        assert_eq!(
            NavGraph::from_connectivity("s", nodes, &all).unwrap_err(),
            GraphError::DuplicateId("x".into())
        );
        let nodes = vec![vp("x", 0.0, 0.0), vp("y", 1.0, 0.0)];
        assert!(matches!(
            NavGraph::from_connectivity("s", nodes, &[vec![false; 2], vec![false]]),
            Err(GraphError::RowLength { row: 1, .. })
        ));
    }

    #[test]
    fn shortest_path_examples() {
        let g = square();
        let p = g.shortest_path("a", "a").unwrap().unwrap();
        assert_eq!(p.path, vec!["a"]);
        assert_eq!(p.geodesic_length, 0.0);
        assert_eq!(p.heading_0, 0.0);

        // b and d are opposite corners; both two-edge routes cost 2.0
        let p = g.shortest_path("b", "d").unwrap().unwrap();
        assert_eq!(p.path, vec!["b", "a", "d"]);
        assert_eq!(p.geodesic_length, 2.0);

        let p = g.shortest_path("a", "c").unwrap().unwrap();
        assert_eq!(p.path, vec!["a", "c"]);
        assert_eq!(p.geodesic_length, SQRT_2);

        assert_eq!(g.shortest_path("a", "e").unwrap(), None);
        assert!(g.shortest_path("a", "zz").is_err());
    }

    #[test]
    fn neighbor_listing() {
        let g = square();
        let n: Vec<&str> = g.neighbors("a").unwrap().into_iter().map(|x| x.0).collect();
        assert_eq!(n, vec!["b", "c", "d"]);
        let n: Vec<&str> = g.neighbors("b").unwrap().into_iter().map(|x| x.0).collect();
        assert_eq!(n, vec!["a", "c"]);
        assert!(g.neighbors("e").unwrap().is_empty());
        assert!(g.neighbors("nope").is_err());
    }

    #[test]
    fn single_hop_sampling() {
        let g = square();
        let cfg = SamplerConfig {
            min_hops: 1,
            max_hops: 1,
            min_geodesic: 0.0,
        };
        let s = g.sample_paths(100, 9, &cfg).unwrap();
        // 5 undirected edges, both directions
        assert_eq!(s.paths.len(), 10);
        assert_eq!(s.shortfall, 90);
        assert!(s.paths.iter().all(|p| p.path.len() == 2));
        assert_eq!(g.sample_paths(0, 9, &cfg).unwrap().paths.len(), 0);
        let bad = SamplerConfig {
            min_hops: 3,
            max_hops: 2,
            min_geodesic: 0.0,
        };
        assert!(g.sample_paths(1, 9, &bad).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = square();
        let cfg = SamplerConfig {
            min_hops: 1,
            max_hops: 3,
            min_geodesic: 0.0,
        };
        assert_eq!(g.sample_paths(6, 77, &cfg).unwrap(), g.sample_paths(6, 77, &cfg).unwrap());
    }
}
