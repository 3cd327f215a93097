//! Exhaustive enumeration of rooted unicellular maps as gluings of a
//! `2n`-gon, used as ground truth for the counting formulas, the sampler
//! and the surgery identity.
//!
//! A pairing of the polygon sides determines the map: the polygon contour
//! is the face permutation `phi`, the pairing is `alpha`, and the rotation
//! is `sigma = phi ∘ alpha`. Darts are relabeled in contour order from side
//! 0, which becomes the root dart, so distinct pairings give distinct
//! rooted maps.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::dist::DistTable;
use crate::error::{Error, Result};
use crate::maps::{alpha, PlaneTree, RotationMap};

/// Largest polygon half-size the oracle accepts; `(2n-1)!!` grows fast.
pub const ENUMERATION_CAP: usize = 8;

const UNPAIRED: usize = usize::MAX;

/// All perfect matchings of `0..2n`, optionally with the partner of side 0 fixed.
#[derive(Debug, Clone)]
pub struct Pairings {
    partner: Vec<usize>,
    stack: Vec<(usize, usize)>,
    base: usize,
    first: Option<usize>,
    started: bool,
    finished: bool,
}

impl Pairings {
    pub fn new(n: usize) -> Self {
        Self::build(n, None)
    }

    /// Pairings in which side 0 is glued to side `first`.
    pub fn with_first(n: usize, first: usize) -> Self {
        assert!(first >= 1 && first < 2 * n, "first partner out of range");
        Self::build(n, Some(first))
    }

    fn build(n: usize, first: Option<usize>) -> Self {
        Pairings {
            partner: vec![UNPAIRED; 2 * n],
            stack: Vec::with_capacity(n),
            base: usize::from(first.is_some()),
            first,
            started: false,
            finished: n == 0,
        }
    }

    fn pair(&mut self, i: usize, j: usize) {
        self.partner[i] = j;
        self.partner[j] = i;
        self.stack.push((i, j));
    }

    fn next_free(&self, after: usize) -> Option<usize> {
        (after + 1..self.partner.len()).find(|&x| self.partner[x] == UNPAIRED)
    }

    fn fill(&mut self) {
        while let Some(i) = (0..self.partner.len()).find(|&x| self.partner[x] == UNPAIRED) {
            let j = self.next_free(i).expect("an even number of free sides remains");
            self.pair(i, j);
        }
    }
}

impl Iterator for Pairings {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.finished {
            return None;
        }
        if !self.started {
            self.started = true;
            if let Some(j) = self.first {
                self.pair(0, j);
            }
            self.fill();
            return Some(self.partner.clone());
        }
        while self.stack.len() > self.base {
            let (i, j) = self.stack.pop().expect("stack above base");
            self.partner[i] = UNPAIRED;
            self.partner[j] = UNPAIRED;
            if let Some(k) = self.next_free(j) {
                self.pair(i, k);
                self.fill();
                return Some(self.partner.clone());
            }
        }
        self.finished = true;
        None
    }
}

/// The rooted unicellular map obtained by gluing the sides of a `2n`-gon.
pub fn map_from_pairing(partner: &[usize]) -> RotationMap {
    let len = partner.len();
    let mut label = vec![UNPAIRED; len];
    let mut next_edge = 0;
    for side in 0..len {
        if label[side] == UNPAIRED {
            label[side] = 2 * next_edge;
            label[partner[side]] = 2 * next_edge + 1;
            next_edge += 1;
        }
    }
    let mut sigma = vec![0; len];
    for side in 0..len {
        sigma[label[side]] = label[(partner[side] + 1) % len];
    }
    RotationMap::new(sigma, label[0]).expect("polygon gluing is a valid map")
}

fn check_cap(n: usize) -> Result<()> {
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    if n == 0 {
        return Err(Error::OutOfRange("unicellular maps need n >= 1".into()));
    }
    Ok(())
}

/// Every rooted unicellular map with `n` edges, each exactly once.
pub fn enumerate_unicellular(n: usize) -> Result<impl Iterator<Item = RotationMap>> {
    check_cap(n)?;
    Ok(Pairings::new(n).map(|p| map_from_pairing(&p)))
}

/// Genus of a one-face map with `n` edges and `v` vertices: `(n + 1 - v)/2`.
fn genus(m: &RotationMap) -> usize {
    (m.n_edges() + 1 - m.n_vertices()) / 2
}

/// Splits the enumeration by the partner of side 0 and folds each part in parallel.
fn par_fold<T, F, M>(n: usize, init: impl Fn() -> T + Sync, fold: F, merge: M) -> Result<T>
where
    T: Send,
    F: Fn(&mut T, RotationMap) + Sync,
    M: Fn(T, T) -> T + Sync + Send,
{
    check_cap(n)?;
    let parts: Vec<T> = (1..2 * n)
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            for p in Pairings::with_first(n, first) {
                fold(&mut acc, map_from_pairing(&p));
            }
            acc
        })
        .collect();
    Ok(parts.into_iter().fold(init(), &merge))
}

/// Number of rooted unicellular maps with `n` edges, by genus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GluingCensus {
    pub n: usize,
    pub counts: BTreeMap<usize, u64>,
}

impl GluingCensus {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, g: usize) -> u64 {
        self.counts.get(&g).copied().unwrap_or(0)
    }

    /// `{"n":..,"counts":{"0":..,"1":..}}`
    pub fn to_json(&self) -> serde_json::Value {
        let counts: serde_json::Map<String, serde_json::Value> = self
            .counts
            .iter()
            .map(|(g, c)| (g.to_string(), (*c).into()))
            .collect();
        serde_json::json!({ "n": self.n, "counts": counts })
    }
}

pub fn census(n: usize) -> Result<GluingCensus> {
    let counts = par_fold(
        n,
        BTreeMap::<usize, u64>::new,
        |acc, m| {
            let (faces, g) = m.faces_and_genus().expect("enumerated maps are valid");
            debug_assert_eq!(faces, 1);
            *acc.entry(g).or_default() += 1;
        },
        |mut a, b| {
            for (g, c) in b {
                *a.entry(g).or_default() += c;
            }
            a
        },
    )?;
    Ok(GluingCensus { n, counts })
}

fn dist_over_genus<K, F>(n: usize, g: usize, key: F) -> Result<DistTable<K>>
where
    K: Ord + Clone + Send,
    F: Fn(&RotationMap) -> K + Sync,
{
    let table = par_fold(
        n,
        DistTable::new,
        |acc, m| {
            if genus(&m) == g {
                acc.add(key(&m));
            }
        },
        |mut a, b| {
            a.merge(&b);
            a
        },
    )?;
    if table.total() == 0 {
        return Err(Error::NoMaps { n, g });
    }
    Ok(table)
}

/// Exact root-degree distribution over `U_{g,n}`.
pub fn exact_root_degree_dist(n: usize, g: usize) -> Result<DistTable<usize>> {
    dist_over_genus(n, g, RotationMap::degree_of_root)
}

/// Outcome of a radius-`r` ball: a plane tree or something that is not a tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BallOutcome {
    Tree(String),
    NotTree,
}

impl fmt::Display for BallOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BallOutcome::Tree(code) => write!(f, "{code}"),
            BallOutcome::NotTree => write!(f, "!"),
        }
    }
}

/// Graph distance from the root vertex, per vertex, with the dart-to-vertex labels.
fn root_distances(m: &RotationMap) -> (Vec<usize>, Vec<usize>) {
    let (vertex, nv) = m.vertex_labels();
    let mut adj = vec![Vec::new(); nv];
    for d in 0..m.n_darts() {
        adj[vertex[d]].push(vertex[alpha(d)]);
    }
    let root = vertex[m.root_dart()];
    let mut dist = vec![usize::MAX; nv];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    (vertex, dist)
}

/// Ball of radius `r` around the root vertex, with the rotation known.
///
/// Edges between two vertices at distance exactly `r` are left out. When
/// the ball is a tree its plane code is read from the rotation: children of
/// the root in counterclockwise order from the root dart, children of any
/// other vertex in order after the dart leading back to its parent.
pub fn ball_of_rotation_map(m: &RotationMap, r: usize) -> BallOutcome {
    if r == 0 {
        return BallOutcome::Tree(String::new());
    }
    let (vertex, dist) = root_distances(m);
    let ball_vertices = dist.iter().filter(|&&x| x <= r).count();
    let in_ball = |d: usize| dist[vertex[d]].min(dist[vertex[alpha(d)]]) < r;
    let ball_edges = (0..m.n_edges()).filter(|&e| in_ball(2 * e)).count();
    if ball_edges + 1 != ball_vertices {
        return BallOutcome::NotTree;
    }
    let mut code = String::with_capacity(2 * ball_edges);
    contour(m, |d| in_ball(d).then_some(Step::Down), &mut code);
    BallOutcome::Tree(code)
}

enum Step {
    Down,
    Leaf,
}

/// Contour of the tree spanned from the root dart; `step` classifies each
/// non-parent dart of a visited vertex (`None` skips it).
fn contour(m: &RotationMap, step: impl Fn(usize) -> Option<Step>, code: &mut String) {
    // (dart we arrived by, current dart); the root starts at the root dart itself
    let root = m.root_dart();
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let visit = |d: usize, stack: &mut Vec<(usize, usize)>, code: &mut String| match step(d) {
        Some(Step::Down) => {
            code.push('(');
            let back = alpha(d);
            stack.push((back, back));
        }
        Some(Step::Leaf) => code.push_str("()"),
        None => {}
    };
    visit(root, &mut stack, code);
    stack.insert(0, (root, root));
    while let Some(&(stop, cursor)) = stack.last() {
        let next = m.sigma(cursor);
        if next == stop {
            stack.pop();
            if !stack.is_empty() {
                code.push(')');
            }
            continue;
        }
        stack.last_mut().expect("non-empty").1 = next;
        visit(next, &mut stack, code);
    }
}

/// Dart-level unfolding of the radius-`r` neighbourhood.
///
/// The vertices at distance below `r` must span a tree through the edges
/// that touch distance at most `r - 2`; every other dart at a vertex at
/// distance `r - 1` then becomes its own leaf, even when two such darts
/// share an endpoint or form one edge. `None` when the inner part has a
/// cycle. For tree-like balls this coincides with [`ball_of_rotation_map`].
pub fn unfolded_ball(m: &RotationMap, r: usize) -> Option<String> {
    if r == 0 {
        return Some(String::new());
    }
    let (vertex, dist) = root_distances(m);
    let inner_vertices = dist.iter().filter(|&&x| x < r).count();
    let is_tree_dart = |d: usize| r >= 2 && dist[vertex[d]].min(dist[vertex[alpha(d)]]) <= r - 2;
    let inner_edges = (0..m.n_edges()).filter(|&e| is_tree_dart(2 * e)).count();
    if inner_edges + 1 != inner_vertices {
        return None;
    }
    let mut code = String::new();
    contour(
        m,
        |d| {
            if is_tree_dart(d) {
                Some(Step::Down)
            } else if dist[vertex[d]] == r - 1 {
                Some(Step::Leaf)
            } else {
                None
            }
        },
        &mut code,
    );
    Some(code)
}

/// Exact distribution of the radius-`r` ball over `U_{g,n}`.
pub fn exact_ball_dist(n: usize, g: usize, r: usize) -> Result<DistTable<BallOutcome>> {
    dist_over_genus(n, g, |m| ball_of_rotation_map(m, r))
}

/// Exact distribution of the unfolded radius-`r` ball over `U_{g,n}`, as
/// plane codes ([`BallOutcome::NotTree`] when the inner part has a cycle).
pub fn exact_unfolded_dist(n: usize, g: usize, r: usize) -> Result<DistTable<BallOutcome>> {
    dist_over_genus(n, g, |m| match unfolded_ball(m, r) {
        Some(code) => BallOutcome::Tree(code),
        None => BallOutcome::NotTree,
    })
}

/// Both sides of the surgery identity for one tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurgeryCheck {
    pub n: usize,
    pub g: usize,
    pub tree: String,
    pub k: usize,
    pub d: usize,
    pub r: usize,
    /// Maps in `U_{g,n}` whose unfolded radius-`r` ball is `t`.
    pub lhs: u64,
    /// Maps in `U_{g,n}` whose ball `B_r` is the tree `t`; never above `lhs`.
    pub strict_lhs: u64,
    /// `#{m in U_{g,n-k+d} with root degree d}`
    pub rhs: u64,
    pub equal: bool,
}

pub fn verify_surgery(n: usize, g: usize, t: &PlaneTree) -> Result<SurgeryCheck> {
    check_cap(n)?;
    let r = t.height();
    if r == 0 {
        return Err(Error::OutOfRange("surgery needs a tree of height >= 1".into()));
    }
    let (k, d) = (t.n_edges(), t.top_level_count());
    if n + d < k + 1 {
        return Err(Error::OutOfRange(format!(
            "n - k + d = {} must be at least 1",
            n as i64 - k as i64 + d as i64
        )));
    }
    let code = t.plane_code();
    let target = BallOutcome::Tree(code.clone());
    let (lhs, strict_lhs) = par_fold(
        n,
        || (0u64, 0u64),
        |acc, m| {
            if genus(&m) == g {
                acc.0 += u64::from(unfolded_ball(&m, r).as_deref() == Some(code.as_str()));
                acc.1 += u64::from(ball_of_rotation_map(&m, r) == target);
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    )?;
    let small = n + d - k;
    let rhs = par_fold(
        small,
        || 0u64,
        |acc, m| {
            if genus(&m) == g && m.degree_of_root() == d {
                *acc += 1;
            }
        },
        |a, b| a + b,
    )?;
    Ok(SurgeryCheck {
        n,
        g,
        tree: t.plane_code(),
        k,
        d,
        r,
        lhs,
        strict_lhs,
        rhs,
        equal: lhs == rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::enumerate_plane_trees;
    use num_rational::Ratio;
    use std::collections::HashSet;

    fn double_factorial_odd(n: usize) -> u64 {
        (1..2 * n as u64).step_by(2).product()
    }

    #[test]
    fn pairing_counts() {
        for n in 1..=6 {
            let all: Vec<_> = Pairings::new(n).collect();
            assert_eq!(all.len() as u64, double_factorial_odd(n));
            let distinct: HashSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            let split: usize = (1..2 * n).map(|j| Pairings::with_first(n, j).count()).sum();
            assert_eq!(split, all.len());
        }
    }

    #[test]
    fn small_censuses() {
        let c1 = census(1).unwrap();
        assert_eq!(c1.counts, BTreeMap::from([(0, 1)]));
        let c3 = census(3).unwrap();
        assert_eq!(c3.counts, BTreeMap::from([(0, 5), (1, 10)]));
        let c4 = census(4).unwrap();
        assert_eq!(c4.counts, BTreeMap::from([(0, 14), (1, 70), (2, 21)]));
        assert_eq!(c4.total(), 105);
        assert_eq!(
            c3.to_json().to_string(),
            r#"{"counts":{"0":5,"1":10},"n":3}"#
        );
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(census(9), Err(Error::CapExceeded { n: 9, .. })));
        assert!(enumerate_unicellular(9).is_err());
    }

    #[test]
    fn every_map_has_one_face_and_distinct_rooting() {
        for n in 1..=5 {
            let maps: Vec<_> = enumerate_unicellular(n).unwrap().collect();
            for m in &maps {
                assert_eq!(m.faces_and_genus().unwrap().0, 1);
                assert_eq!(m.root_dart(), 0);
            }
            let distinct: HashSet<_> = maps.iter().collect();
            assert_eq!(distinct.len(), maps.len());
        }
    }

    #[test]
    fn root_degree_examples() {
        let d = exact_root_degree_dist(2, 1).unwrap();
        assert_eq!(d.prob(&4), Some(Ratio::new(1, 1)));
        let d = exact_root_degree_dist(3, 0).unwrap();
        assert_eq!(d.prob(&1), Some(Ratio::new(2, 5)));
        assert_eq!(d.prob(&2), Some(Ratio::new(2, 5)));
        assert_eq!(d.prob(&3), Some(Ratio::new(1, 5)));
        assert!(matches!(exact_root_degree_dist(3, 2), Err(Error::NoMaps { .. })));
    }

    #[test]
    fn genus_zero_maps_are_the_plane_trees() {
        for n in 1..=6 {
            let trees: HashSet<String> = enumerate_plane_trees(n).iter().map(|t| t.plane_code()).collect();
            let dist = exact_ball_dist(n, 0, n).unwrap();
            assert_eq!(dist.counts().len(), trees.len());
            for (outcome, &c) in dist.counts() {
                assert_eq!(c, 1);
                match outcome {
                    BallOutcome::Tree(code) => assert!(trees.contains(code)),
                    BallOutcome::NotTree => panic!("planar map with a cycle"),
                }
            }
        }
    }

    #[test]
    fn loop_ball_is_not_a_tree() {
        let m = enumerate_unicellular(1).unwrap().next().unwrap();
        // n = 1 is the single edge tree
        assert_eq!(ball_of_rotation_map(&m, 1), BallOutcome::Tree("()".into()));
        let torus = RotationMap::new(vec![2, 3, 1, 0], 0).unwrap();
        assert_eq!(ball_of_rotation_map(&torus, 1), BallOutcome::NotTree);
        assert_eq!(ball_of_rotation_map(&torus, 0), BallOutcome::Tree(String::new()));
        let planar_loop = RotationMap::new(vec![1, 0], 0).unwrap();
        assert_eq!(ball_of_rotation_map(&planar_loop, 1), BallOutcome::NotTree);
    }

    #[test]
    fn identity_surgery() {
        let edge = PlaneTree::from_code("()").unwrap();
        for n in 1..=5 {
            let c = verify_surgery(n, 0, &edge).unwrap();
            assert!(c.equal, "{c:?}");
        }
    }

    #[test]
    fn surgery_examples() {
        let path = PlaneTree::from_code("(())").unwrap();
        let c = verify_surgery(4, 1, &path).unwrap();
        assert_eq!((c.k, c.d, c.r), (2, 1, 2));
        let direct = exact_root_degree_dist(3, 1).unwrap().count(&1);
        assert_eq!(c.rhs, direct);
        assert!(c.equal, "{c:?}");
        let cherry = PlaneTree::from_code("()()").unwrap();
        let c = verify_surgery(5, 1, &cherry).unwrap();
        assert_eq!(c.rhs, exact_root_degree_dist(5, 1).unwrap().count(&2));
        assert!(c.equal, "{c:?}");
        // loops and double edges at the root only count in the unfolded ball
        assert_eq!((c.lhs, c.strict_lhs), (70, 49));
        assert!(verify_surgery(1, 0, &PlaneTree::from_code("((()))").unwrap()).is_err());
    }

    #[test]
    fn ball_aggregate_reproduces_surgery_lhs() {
        let path = PlaneTree::from_code("(())").unwrap();
        let dist = exact_ball_dist(4, 1, 2).unwrap();
        let c = verify_surgery(4, 1, &path).unwrap();
        assert_eq!(dist.count(&BallOutcome::Tree("(())".into())), c.strict_lhs);
        assert!(c.strict_lhs <= c.lhs);
    }

    #[test]
    fn surgery_sweep() {
        for k in 1..=3 {
            for t in enumerate_plane_trees(k) {
                let d = t.top_level_count();
                for n in 1..=6 {
                    if n + d < k + 1 {
                        continue;
                    }
                    for g in 0..=(n + d - k) / 2 {
                        let c = verify_surgery(n, g, &t).unwrap();
                        assert!(c.equal, "{c:?}");
                        assert!(c.strict_lhs <= c.lhs);
                    }
                }
            }
        }
    }

    #[test]
    fn unfolded_agrees_with_tree_balls() {
        for n in 1..=6 {
            for m in enumerate_unicellular(n).unwrap() {
                for r in 0..=3 {
                    if let BallOutcome::Tree(code) = ball_of_rotation_map(&m, r) {
                        assert_eq!(unfolded_ball(&m, r), Some(code));
                    }
                }
            }
        }
    }
}
