use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::graph::RootedGraph;

/// A rooted map given by a rotation system on `2n` darts.
///
/// Darts `2i` and `2i + 1` are the two halves of edge `i`, so `alpha` is
/// fixed by the numbering. `sigma` sends a dart to the next dart
/// counterclockwise around its origin vertex. Faces are the cycles of
/// `sigma ∘ alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap")]
pub struct RotationMap {
    sigma: Vec<usize>,
    root_dart: usize,
}

#[derive(Serialize, Deserialize)]
struct RawMap {
    n: usize,
    alpha: Vec<usize>,
    sigma: Vec<usize>,
    root_dart: usize,
}

impl TryFrom<RawMap> for RotationMap {
    type Error = Error;

    fn try_from(raw: RawMap) -> Result<Self> {
        if raw.alpha.len() != 2 * raw.n {
            return Err(Error::InvalidMap(format!(
                "alpha has {} darts, expected {}",
                raw.alpha.len(),
                2 * raw.n
            )));
        }
        RotationMap::with_alpha(&raw.alpha, raw.sigma, raw.root_dart)
    }
}

impl From<RotationMap> for RawMap {
    fn from(m: RotationMap) -> Self {
        RawMap {
            n: m.n_edges(),
            alpha: (0..m.sigma.len()).map(|d| d ^ 1).collect(),
            sigma: m.sigma,
            root_dart: m.root_dart,
        }
    }
}

#[inline]
pub fn alpha(d: usize) -> usize {
    d ^ 1
}

impl RotationMap {
    pub fn new(sigma: Vec<usize>, root_dart: usize) -> Result<Self> {
        if sigma.is_empty() || sigma.len() % 2 != 0 {
            return Err(Error::InvalidMap(format!(
                "dart count {} must be positive and even",
                sigma.len()
            )));
        }
        let mut hit = vec![false; sigma.len()];
        for &x in &sigma {
            if x >= sigma.len() || std::mem::replace(&mut hit[x], true) {
                return Err(Error::InvalidMap("sigma is not a permutation".into()));
            }
        }
        if root_dart >= sigma.len() {
            return Err(Error::InvalidMap(format!("root dart {root_dart} out of range")));
        }
        Ok(RotationMap { sigma, root_dart })
    }

    /// Validates an explicit pairing against the `2i <-> 2i + 1` numbering.
    pub fn with_alpha(alpha: &[usize], sigma: Vec<usize>, root_dart: usize) -> Result<Self> {
        if alpha.len() != sigma.len() {
            return Err(Error::InvalidMap(format!(
                "alpha has {} darts but sigma has {}",
                alpha.len(),
                sigma.len()
            )));
        }
        if alpha.iter().enumerate().any(|(d, &a)| a != d ^ 1) {
            return Err(Error::InvalidMap(
                "alpha must pair darts 2i and 2i+1".into(),
            ));
        }
        Self::new(sigma, root_dart)
    }

    pub fn n_darts(&self) -> usize {
        self.sigma.len()
    }

    pub fn n_edges(&self) -> usize {
        self.sigma.len() / 2
    }

    pub fn root_dart(&self) -> usize {
        self.root_dart
    }

    #[inline]
    pub fn sigma(&self, d: usize) -> usize {
        self.sigma[d]
    }

    /// `sigma ∘ alpha`, the face permutation.
    #[inline]
    pub fn phi(&self, d: usize) -> usize {
        self.sigma[alpha(d)]
    }

    fn orbit_labels(&self, step: impl Fn(usize) -> usize, first: usize) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.sigma.len()];
        let mut next = 0;
        let starts = std::iter::once(first).chain(0..self.sigma.len());
        for start in starts {
            if label[start] != usize::MAX {
                continue;
            }
            let mut d = start;
            while label[d] == usize::MAX {
                label[d] = next;
                d = step(d);
            }
            next += 1;
        }
        (label, next)
    }

    /// Origin vertex of every dart. The root vertex is vertex 0.
    pub fn vertex_labels(&self) -> (Vec<usize>, usize) {
        self.orbit_labels(|d| self.sigma[d], self.root_dart)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_labels().1
    }

    pub fn n_faces(&self) -> usize {
        self.orbit_labels(|d| self.phi(d), self.root_dart).1
    }

    pub fn is_connected(&self) -> bool {
        let (vertex, nv) = self.vertex_labels();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut comps = nv;
        for e in 0..self.n_edges() {
            let (a, b) = (find(&mut parent, vertex[2 * e]), find(&mut parent, vertex[2 * e + 1]));
            if a != b {
                parent[a] = b;
                comps -= 1;
            }
        }
        comps == 1
    }

    /// Face count and genus from Euler's formula `v - n + f = 2 - 2g`.
    pub fn faces_and_genus(&self) -> Result<(usize, usize)> {
        if !self.is_connected() {
            return Err(Error::InvalidMap("map is not connected".into()));
        }
        let v = self.n_vertices() as i64;
        let f = self.n_faces() as i64;
        let n = self.n_edges() as i64;
        let two_g = 2 - (v - n + f);
        if two_g < 0 || two_g % 2 != 0 {
            return Err(Error::InvalidMap(format!(
                "Euler characteristic {} is not of the form 2 - 2g",
                v - n + f
            )));
        }
        Ok((f as usize, (two_g / 2) as usize))
    }

    pub fn degree_of_root(&self) -> usize {
        let mut d = self.sigma[self.root_dart];
        let mut deg = 1;
        while d != self.root_dart {
            d = self.sigma[d];
            deg += 1;
        }
        deg
    }

    /// Underlying rooted multigraph. Edge `i` joins the origins of darts `2i`
    /// and `2i + 1`; the root edge is oriented from the root dart's origin.
    pub fn to_rooted_graph(&self) -> RootedGraph {
        let (vertex, nv) = self.vertex_labels();
        let edges = (0..self.n_edges())
            .map(|e| {
                let (a, b) = (2 * e, 2 * e + 1);
                if self.root_dart == b {
                    [vertex[b], vertex[a]]
                } else {
                    [vertex[a], vertex[b]]
                }
            })
            .collect();
        RootedGraph::new(nv, edges, 0, Some(self.root_dart / 2))
            .expect("rotation map induces a valid rooted graph")
    }
}
