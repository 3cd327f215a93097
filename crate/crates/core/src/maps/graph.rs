use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::maps::tree::unordered_code_from_children;

/// A rooted multigraph. Loops and multiple edges are allowed.
///
/// The root edge, when present, is stored oriented away from the root
/// vertex: `edges[root_edge][0] == root_vertex`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct RootedGraph {
    v: usize,
    edges: Vec<[usize; 2]>,
    root_vertex: usize,
    root_edge: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    v: usize,
    edges: Vec<[usize; 2]>,
    root_vertex: usize,
    root_edge: Option<usize>,
}

impl TryFrom<RawGraph> for RootedGraph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        RootedGraph::new(raw.v, raw.edges, raw.root_vertex, raw.root_edge)
    }
}

impl From<RootedGraph> for RawGraph {
    fn from(g: RootedGraph) -> Self {
        RawGraph {
            v: g.v,
            edges: g.edges,
            root_vertex: g.root_vertex,
            root_edge: g.root_edge,
        }
    }
}

impl RootedGraph {
    pub fn new(
        v: usize,
        edges: Vec<[usize; 2]>,
        root_vertex: usize,
        root_edge: Option<usize>,
    ) -> Result<Self> {
        if root_vertex >= v {
            return Err(Error::OutOfRange(format!("root vertex {root_vertex} >= {v}")));
        }
        if let Some(e) = edges.iter().find(|e| e[0] >= v || e[1] >= v) {
            return Err(Error::OutOfRange(format!("edge {e:?} has an endpoint >= {v}")));
        }
        if let Some(re) = root_edge {
            match edges.get(re) {
                Some(e) if e[0] == root_vertex => {}
                Some(e) => {
                    return Err(Error::OutOfRange(format!(
                        "root edge {e:?} does not start at the root vertex {root_vertex}"
                    )))
                }
                None => return Err(Error::OutOfRange(format!("root edge {re} out of range"))),
            }
        }
        Ok(RootedGraph {
            v,
            edges,
            root_vertex,
            root_edge,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.v
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn root_vertex(&self) -> usize {
        self.root_vertex
    }

    pub fn root_edge(&self) -> Option<usize> {
        self.root_edge
    }

    /// Incident edge indices per vertex, in increasing edge order. A loop
    /// appears twice in its vertex's list.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.v];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e[0]].push(i);
            inc[e[1]].push(i);
        }
        inc
    }

    /// Edge endpoints at `u`; loops count twice.
    pub fn degree(&self, u: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e[0] == u) as usize + (e[1] == u) as usize)
            .sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.v];
        for e in &self.edges {
            deg[e[0]] += 1;
            deg[e[1]] += 1;
        }
        deg
    }

    pub fn root_degree(&self) -> usize {
        self.degree(self.root_vertex)
    }

    /// BFS distances from the root (`None` when unreachable) and the order
    /// in which vertices are discovered.
    pub fn bfs(&self) -> (Vec<Option<usize>>, Vec<usize>) {
        self.bfs_within(usize::MAX)
    }

    /// Like [`RootedGraph::bfs`], but does not explore past distance `radius`.
    pub fn bfs_within(&self, radius: usize) -> (Vec<Option<usize>>, Vec<usize>) {
        let inc = self.incidence();
        let mut dist = vec![None; self.v];
        let mut order = vec![self.root_vertex];
        dist[self.root_vertex] = Some(0);
        let mut queue = VecDeque::from([self.root_vertex]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices have a distance");
            if du >= radius {
                continue;
            }
            for &e in &inc[u] {
                let [a, b] = self.edges[e];
                let w = if a == u { b } else { a };
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        (dist, order)
    }

    pub fn is_connected(&self) -> bool {
        self.bfs().1.len() == self.v
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.v && self.is_connected()
    }

    /// The ball of radius `r` around the root vertex.
    ///
    /// Keeps vertices at distance at most `r` and the edges having at least
    /// one endpoint at distance at most `r - 1`; an edge joining two vertices
    /// at distance exactly `r` is dropped. Vertices are relabeled in BFS
    /// discovery order, so the root becomes vertex 0, and kept edges retain
    /// their relative order.
    pub fn ball(&self, r: usize) -> RootedGraph {
        let (dist, order) = self.bfs_within(r);
        let mut relabel = vec![usize::MAX; self.v];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        let mut edges = Vec::new();
        let mut root_edge = None;
        for (i, &[a, b]) in self.edges.iter().enumerate() {
            let near = |x: usize| dist[x].is_some_and(|d| d < r);
            if near(a) || near(b) {
                if Some(i) == self.root_edge {
                    root_edge = Some(edges.len());
                }
                edges.push([relabel[a], relabel[b]]);
            }
        }
        RootedGraph {
            v: order.len(),
            edges,
            root_vertex: 0,
            root_edge,
        }
    }

    /// Children lists of the BFS tree when the graph is a tree, rooted at
    /// the root vertex, children in edge order.
    pub fn tree_children(&self) -> Result<Vec<Vec<usize>>> {
        if !self.is_tree() {
            return Err(Error::NotATree);
        }
        let inc = self.incidence();
        let mut children = vec![Vec::new(); self.v];
        let mut seen = vec![false; self.v];
        seen[self.root_vertex] = true;
        let mut queue = VecDeque::from([self.root_vertex]);
        while let Some(u) = queue.pop_front() {
            for &e in &inc[u] {
                let [a, b] = self.edges[e];
                let w = if a == u { b } else { a };
                if !seen[w] {
                    seen[w] = true;
                    children[u].push(w);
                    queue.push_back(w);
                }
            }
        }
        Ok(children)
    }

    /// Canonical code invariant under rooted-tree isomorphism.
    pub fn unordered_code(&self) -> Result<String> {
        let children = self.tree_children()?;
        Ok(unordered_code_from_children(&children, self.root_vertex))
    }

    /// Unordered code of the radius-`r` ball unfolded at the edge level.
    ///
    /// Vertices at distance below `r` must span a tree through the edges
    /// touching distance at most `r - 2`. Each vertex at distance `r - 1`
    /// then gets one leaf per remaining edge end, so loops, repeated
    /// neighbours and edges between two such vertices all become distinct
    /// leaves. `None` when the inner part has a cycle.
    pub fn unfolded_ball_code(&self, r: usize) -> Option<String> {
        if r == 0 {
            return Some(String::new());
        }
        let (dist, order) = self.bfs_within(r);
        let d = |x: usize| dist[x].unwrap_or(usize::MAX);
        let inner: Vec<usize> = order.iter().copied().filter(|&x| d(x) < r).collect();
        let is_tree_edge = |[a, b]: [usize; 2]| r >= 2 && d(a).min(d(b)) <= r - 2;
        let tree_edges = self.edges.iter().filter(|&&e| is_tree_edge(e)).count();
        if tree_edges + 1 != inner.len() {
            return None;
        }
        let mut index = vec![usize::MAX; self.v];
        for (i, &x) in inner.iter().enumerate() {
            index[x] = i;
        }
        let mut children = vec![Vec::new(); inner.len()];
        let mut leaves = vec![0usize; inner.len()];
        for &e in &self.edges {
            let [a, b] = e;
            if is_tree_edge(e) {
                let (p, c) = if d(a) < d(b) { (a, b) } else { (b, a) };
                children[index[p]].push(index[c]);
            } else {
                for x in [a, b] {
                    if d(x) == r - 1 {
                        leaves[index[x]] += 1;
                    }
                }
            }
        }
        for (i, &x) in inner.iter().enumerate() {
            // the edge to the parent is not a leaf
            let count = leaves[i];
            debug_assert!(x == self.root_vertex || d(x) < r - 1 || count + 1 == self.degree(x));
            for _ in 0..count {
                children.push(Vec::new());
                let leaf = children.len() - 1;
                children[i].push(leaf);
            }
        }
        Some(unordered_code_from_children(&children, 0))
    }
}
