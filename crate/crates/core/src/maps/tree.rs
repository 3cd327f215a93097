use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A rooted ordered (plane) tree.
///
/// Vertex 0 is the root and vertices are numbered in depth-first preorder,
/// so the first child of the root, when it exists, is vertex 1. The order of
/// each children list is significant. Serializes as its parenthesis code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PlaneTree {
    children: Vec<Vec<usize>>,
}

impl TryFrom<String> for PlaneTree {
    type Error = Error;

    fn try_from(code: String) -> Result<Self> {
        PlaneTree::from_code(&code)
    }
}

impl From<PlaneTree> for String {
    fn from(t: PlaneTree) -> String {
        t.plane_code()
    }
}

impl Default for PlaneTree {
    fn default() -> Self {
        Self::single_vertex()
    }
}

impl PlaneTree {
    pub fn single_vertex() -> Self {
        PlaneTree {
            children: vec![Vec::new()],
        }
    }

    /// Builds a tree from a Dyck word: `true` descends to a new child,
    /// `false` returns to the parent.
    pub fn from_dyck(steps: &[bool]) -> Result<Self> {
        let mut children: Vec<Vec<usize>> = vec![Vec::new()];
        let mut stack = vec![0usize];
        for &up in steps {
            if up {
                let v = children.len();
                children.push(Vec::new());
                let parent = *stack.last().expect("stack holds the root");
                children[parent].push(v);
                stack.push(v);
            } else {
                if stack.len() == 1 {
                    return Err(Error::BadCode("unbalanced: returns above the root".into()));
                }
                stack.pop();
            }
        }
        if stack.len() != 1 {
            return Err(Error::BadCode("unbalanced: unclosed parenthesis".into()));
        }
        Ok(PlaneTree { children })
    }

    /// Parses the balanced-parenthesis contour code produced by [`PlaneTree::plane_code`].
    pub fn from_code(code: &str) -> Result<Self> {
        let steps = code
            .chars()
            .map(|c| match c {
                '(' => Ok(true),
                ')' => Ok(false),
                other => Err(Error::BadCode(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_dyck(&steps)
    }

    /// Builds a tree from children lists. Vertex 0 must be the root; the
    /// result is renumbered in preorder.
    pub fn from_children(children: &[Vec<usize>]) -> Result<Self> {
        if children.is_empty() {
            return Err(Error::NotATree);
        }
        let mut seen = vec![false; children.len()];
        let mut steps = Vec::with_capacity(2 * children.len());
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        seen[0] = true;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&c) = children[v].get(*next) {
                *next += 1;
                if c >= children.len() || seen[c] {
                    return Err(Error::NotATree);
                }
                seen[c] = true;
                steps.push(true);
                stack.push((c, 0));
            } else {
                stack.pop();
                if !stack.is_empty() {
                    steps.push(false);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::NotATree);
        }
        Self::from_dyck(&steps)
    }

    pub fn n_edges(&self) -> usize {
        self.children.len() - 1
    }

    pub fn n_vertices(&self) -> usize {
        self.children.len()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn children_lists(&self) -> &[Vec<usize>] {
        &self.children
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.children.len()];
        for (v, cs) in self.children.iter().enumerate() {
            for &c in cs {
                parent[c] = Some(v);
            }
        }
        parent
    }

    /// Depth of every vertex. Preorder numbering puts parents before children.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.children.len()];
        for v in 0..self.children.len() {
            for &c in &self.children[v] {
                depth[c] = depth[v] + 1;
            }
        }
        depth
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Number of vertices at maximal height.
    pub fn top_level_count(&self) -> usize {
        let depths = self.depths();
        let h = depths.iter().copied().max().unwrap_or(0);
        depths.iter().filter(|&&d| d == h).count()
    }

    /// The subtree made of all vertices at height at most `r`.
    pub fn truncate(&self, r: usize) -> PlaneTree {
        let depths = self.depths();
        let mut steps = Vec::new();
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if depths[v] < r {
                if let Some(&c) = self.children[v].get(*next) {
                    *next += 1;
                    steps.push(true);
                    stack.push((c, 0));
                    continue;
                }
            }
            stack.pop();
            if !stack.is_empty() {
                steps.push(false);
            }
        }
        Self::from_dyck(&steps).expect("truncation of a tree is balanced")
    }

    /// Depth-first contour as a Dyck word.
    pub fn dyck(&self) -> Vec<bool> {
        let mut steps = Vec::with_capacity(2 * self.n_edges());
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&c) = self.children[v].get(*next) {
                *next += 1;
                steps.push(true);
                stack.push((c, 0));
            } else {
                stack.pop();
                if !stack.is_empty() {
                    steps.push(false);
                }
            }
        }
        steps
    }

    /// Balanced-parenthesis encoding of the contour; a bijection on plane trees.
    pub fn plane_code(&self) -> String {
        self.dyck()
            .into_iter()
            .map(|up| if up { '(' } else { ')' })
            .collect()
    }

    /// Canonical code invariant under reordering of children (AHU form).
    pub fn unordered_code(&self) -> String {
        unordered_code_from_children(&self.children, 0)
    }

    /// Number of plane trees sharing this tree's unordered shape.
    pub fn plane_embeddings(&self) -> BigUint {
        let mut codes: Vec<String> = vec![String::new(); self.children.len()];
        let mut total = BigUint::one();
        for v in (0..self.children.len()).rev() {
            let mut kids: Vec<&str> = self.children[v].iter().map(|&c| codes[c].as_str()).collect();
            kids.sort_unstable();
            let mut classes: BTreeMap<&str, usize> = BTreeMap::new();
            for k in &kids {
                *classes.entry(k).or_default() += 1;
            }
            total *= factorial(kids.len());
            for &mult in classes.values() {
                total /= factorial(mult);
            }
            let code: String = kids.iter().map(|k| format!("({k})")).collect();
            codes[v] = code;
        }
        total
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// AHU canonical code of the tree hanging from `root` in the children lists.
///
/// The code of a vertex is the sorted concatenation of `(code(child))` over its
/// children, so a single vertex has the empty code.
pub(crate) fn unordered_code_from_children(children: &[Vec<usize>], root: usize) -> String {
    // Iterative postorder: trees produced by the samplers can be deep.
    let mut order = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend(children[v].iter().copied());
    }
    let mut codes: Vec<Option<String>> = vec![None; children.len()];
    for &v in order.iter().rev() {
        let mut kids: Vec<String> = children[v]
            .iter()
            .map(|&c| codes[c].take().expect("child coded before parent"))
            .collect();
        kids.sort_unstable();
        let mut code = String::with_capacity(kids.iter().map(|k| k.len() + 2).sum());
        for k in kids {
            code.push('(');
            code.push_str(&k);
            code.push(')');
        }
        codes[v] = Some(code);
    }
    codes[root].take().unwrap_or_default()
}

/// Uniform plane tree with `n` edges, by the cycle lemma.
///
/// A uniform arrangement of `n` up-steps and `n + 1` down-steps has exactly
/// one cyclic shift whose partial sums stay nonnegative until the final
/// step; dropping that final step leaves a uniform Dyck word.
pub fn sample_plane_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PlaneTree {
    let len = 2 * n + 1;
    let mut steps = vec![false; len];
    steps[..n].iter_mut().for_each(|s| *s = true);
    steps.shuffle(rng);

    let mut sum = 0i64;
    let mut min = 0i64;
    let mut start = 0usize;
    for (i, &up) in steps.iter().enumerate() {
        sum += if up { 1 } else { -1 };
        if sum < min {
            min = sum;
            start = i + 1;
        }
    }
    let dyck: Vec<bool> = (0..len - 1).map(|j| steps[(start + j) % len]).collect();
    PlaneTree::from_dyck(&dyck).expect("cycle lemma yields a Dyck word")
}

/// All plane trees with `n` edges, in lexicographic order of their codes.
pub fn enumerate_plane_trees(n: usize) -> Vec<PlaneTree> {
    fn rec(open: usize, close: usize, n: usize, word: &mut Vec<bool>, out: &mut Vec<PlaneTree>) {
        if word.len() == 2 * n {
            out.push(PlaneTree::from_dyck(word).expect("generated word is balanced"));
            return;
        }
        if open < n {
            word.push(true);
            rec(open + 1, close, n, word, out);
            word.pop();
        }
        if close < open {
            word.push(false);
            rec(open, close + 1, n, word, out);
            word.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, 0, n, &mut Vec::with_capacity(2 * n), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::catalan;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{HashMap, HashSet};

    #[test]
    fn single_vertex_has_empty_codes() {
        let t = PlaneTree::single_vertex();
        assert_eq!(t.plane_code(), "");
        assert_eq!(t.unordered_code(), "");
        assert_eq!(t.n_edges(), 0);
    }

    #[test]
    fn path_and_cherry_differ() {
        let path = PlaneTree::from_code("(())").unwrap();
        let cherry = PlaneTree::from_code("()()").unwrap();
        assert_ne!(path.plane_code(), cherry.plane_code());
        assert_ne!(path.unordered_code(), cherry.unordered_code());
        assert_eq!(path.height(), 2);
        assert_eq!(cherry.height(), 1);
    }

    #[test]
    fn reordered_children_share_unordered_code() {
        let a = PlaneTree::from_code("(())()").unwrap();
        let b = PlaneTree::from_code("()(())").unwrap();
        assert_ne!(a.plane_code(), b.plane_code());
        assert_eq!(a.unordered_code(), b.unordered_code());
        assert_eq!(a.plane_embeddings(), BigUint::from(2u32));
        // cherry swapped is itself
        let cherry = PlaneTree::from_code("()()").unwrap();
        assert_eq!(cherry.plane_embeddings(), BigUint::one());
    }

    #[test]
    fn rejects_unbalanced_codes() {
        assert!(PlaneTree::from_code("(()").is_err());
        assert!(PlaneTree::from_code("())(").is_err());
        assert!(PlaneTree::from_code("(x)").is_err());
    }

    #[test]
    fn from_children_renumbers_in_preorder() {
        // root 0 -> [2, 1], 2 -> [3]
        let t = PlaneTree::from_children(&[vec![2, 1], vec![], vec![3], vec![]]).unwrap();
        assert_eq!(t.plane_code(), "(())()");
        assert!(PlaneTree::from_children(&[vec![1], vec![0]]).is_err());
    }

    #[test]
    fn truncation_and_top_level() {
        let t = PlaneTree::from_code("((()())())").unwrap();
        assert_eq!(t.truncate(0).plane_code(), "");
        assert_eq!(t.truncate(1).plane_code(), "()");
        assert_eq!(t.truncate(2).plane_code(), "(()())");
        assert_eq!(t.truncate(9), t);
        assert_eq!(t.top_level_count(), 2);
    }

    #[test]
    fn plane_code_is_injective_up_to_eight_edges() {
        for n in 0..=8 {
            let trees = enumerate_plane_trees(n);
            let codes: HashSet<String> = trees.iter().map(|t| t.plane_code()).collect();
            assert_eq!(BigUint::from(codes.len()), catalan(n));
            for t in &trees {
                assert_eq!(&PlaneTree::from_code(&t.plane_code()).unwrap(), t);
            }
        }
    }

    #[test]
    fn embeddings_partition_the_plane_trees() {
        for n in 1..=7 {
            let trees = enumerate_plane_trees(n);
            let mut by_shape: HashMap<String, (usize, BigUint)> = HashMap::new();
            for t in &trees {
                let e = by_shape.entry(t.unordered_code()).or_insert((0, t.plane_embeddings()));
                e.0 += 1;
            }
            for (count, emb) in by_shape.values() {
                assert_eq!(&BigUint::from(*count), emb);
            }
        }
    }

    #[test]
    fn sampler_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_plane_tree(0, &mut rng), PlaneTree::single_vertex());
        let mut seen = HashSet::new();
        for _ in 0..200 {
            let t = sample_plane_tree(2, &mut rng);
            assert_eq!(t.n_edges(), 2);
            seen.insert(t.plane_code());
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn sampler_is_uniform_over_catalan_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 50_000usize;
        let mut counts: HashMap<String, usize> = HashMap::new();
        for _ in 0..draws {
            *counts.entry(sample_plane_tree(3, &mut rng).plane_code()).or_default() += 1;
        }
        assert_eq!(counts.len(), 5);
        let sd = (0.2f64 * 0.8 / draws as f64).sqrt();
        for (code, c) in counts {
            let f = c as f64 / draws as f64;
            assert!((f - 0.2).abs() < 3.0 * sd, "{code}: {f}");
        }
    }
}
