//! Uniform sampling of unicellular maps at the level of the underlying
//! graph, through C-decorated trees: a uniform plane tree with `n` edges,
//! a uniform permutation of its `n + 1` vertices with `n + 1 - 2g` cycles,
//! all odd, and a uniform sign per cycle. Identifying the vertices of each
//! cycle gives the underlying graph of a uniform map of genus `g`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::asympt::solve_beta_n;
use crate::error::{Error, Result};
use crate::exact::SumTable;
use crate::gw::XBetaLaw;
use crate::maps::{sample_plane_tree, Permutation, PlaneTree, RootedGraph};

/// Largest `(s + 1)(g + 1)` table the insertion sampler builds before
/// `Auto` switches to rejection.
pub const INSERTION_TABLE_MAX: usize = 1 << 24;

/// Largest `m` for which the exact size recursion is allowed.
pub const DP_MAX_TOTAL: usize = 2000;

/// How to draw a uniform permutation with odd cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermMethod {
    /// Insertion when its table fits, rejection otherwise.
    Auto,
    /// Grow the permutation one fixed point or one pair of elements at a
    /// time, following `a(m, j) = a(m-1, j-1) + (m-1)(m-2) a(m-2, j)`.
    Insertion,
    /// I.i.d. `X_beta` cycle sizes, accepted when they sum to `m`.
    Rejection,
    /// Cycle sizes drawn one by one from the exact conditioned law.
    Dp,
}

#[derive(Debug, Clone)]
enum Kind {
    Insertion { ln_a: Vec<f64>, width: usize },
    Rejection(XBetaLaw),
    Dp(SumTable),
}

/// Reusable sampler for permutations of `0..m` with `s` cycles, all odd.
#[derive(Debug, Clone)]
pub struct OddCycleSampler {
    m: usize,
    s: usize,
    kind: Kind,
}

fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let hi = a.max(b);
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

impl OddCycleSampler {
    pub fn new(m: usize, s: usize, method: PermMethod, beta_hint: Option<f64>) -> Result<Self> {
        if s > m {
            return Err(Error::OutOfRange(format!("s = {s} exceeds m = {m}")));
        }
        if (m - s) % 2 != 0 {
            return Err(Error::Parity(format!("m = {m} and s = {s} differ in parity")));
        }
        if s == 0 && m > 0 {
            return Err(Error::OutOfRange("a nonempty permutation has a cycle".into()));
        }
        let pairs = (m - s) / 2;
        let method = match method {
            PermMethod::Auto if (s + 1).saturating_mul(pairs + 1) <= INSERTION_TABLE_MAX => {
                PermMethod::Insertion
            }
            PermMethod::Auto => PermMethod::Rejection,
            other => other,
        };
        let beta = || -> Result<f64> {
            match beta_hint {
                Some(b) => Ok(b),
                None if m == 0 => Ok(0.0),
                None => solve_beta_n(m - 1, s),
            }
        };
        let kind = match method {
            PermMethod::Insertion => {
                let width = pairs + 1;
                // ln a(j + 2p, j) at index j * width + p
                let mut ln_a = vec![f64::NEG_INFINITY; (s + 1) * width];
                ln_a[0] = 0.0;
                for j in 0..=s {
                    for p in 0..width {
                        if j == 0 && p == 0 {
                            continue;
                        }
                        let t = (j + 2 * p) as f64;
                        let fix = if j > 0 { ln_a[(j - 1) * width + p] } else { f64::NEG_INFINITY };
                        let pair = if p > 0 {
                            (t - 1.0).ln() + (t - 2.0).ln() + ln_a[j * width + p - 1]
                        } else {
                            f64::NEG_INFINITY
                        };
                        ln_a[j * width + p] = logaddexp(fix, pair);
                    }
                }
                Kind::Insertion { ln_a, width }
            }
            PermMethod::Rejection => Kind::Rejection(XBetaLaw::new(beta()?)?),
            PermMethod::Dp => {
                if m > DP_MAX_TOTAL {
                    return Err(Error::OutOfRange(format!(
                        "exact size recursion needs m <= {DP_MAX_TOTAL}, got {m}"
                    )));
                }
                Kind::Dp(SumTable::new(beta()?, s, m)?)
            }
            PermMethod::Auto => unreachable!("resolved above"),
        };
        Ok(OddCycleSampler { m, s, kind })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        if self.m == self.s {
            return Permutation::identity(self.m);
        }
        match &self.kind {
            Kind::Insertion { ln_a, width } => self.sample_insertion(ln_a, *width, rng),
            Kind::Rejection(law) => {
                let sizes = loop {
                    let mut sizes = Vec::with_capacity(self.s);
                    let mut sum = 0;
                    while sizes.len() < self.s && sum <= self.m {
                        let k = law.sample(rng);
                        sum += k;
                        sizes.push(k);
                    }
                    if sum == self.m && sizes.len() == self.s {
                        break sizes;
                    }
                };
                Self::from_sizes(&sizes, rng)
            }
            Kind::Dp(table) => {
                let mut sizes = Vec::with_capacity(self.s);
                let mut total = self.m;
                for count in (1..=self.s).rev() {
                    let max_k = total - (count - 1);
                    let weights: Vec<(usize, f64)> = (1..=max_k)
                        .step_by(2)
                        .map(|k| (k, table.first_step_weight(count, total, k)))
                        .collect();
                    let sum: f64 = weights.iter().map(|w| w.1).sum();
                    let mut u = rng.random::<f64>() * sum;
                    let mut pick = weights.last().expect("at least one odd size fits").0;
                    for &(k, w) in &weights {
                        if u < w {
                            pick = k;
                            break;
                        }
                        u -= w;
                    }
                    sizes.push(pick);
                    total -= pick;
                }
                Self::from_sizes(&sizes, rng)
            }
        }
    }

    /// Shuffled labels cut into consecutive blocks, each block one cycle.
    fn from_sizes<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Permutation {
        let m: usize = sizes.iter().sum();
        let mut labels: Vec<usize> = (0..m).collect();
        labels.shuffle(rng);
        let mut image = vec![0; m];
        let mut start = 0;
        for &k in sizes {
            let block = &labels[start..start + k];
            for i in 0..k {
                image[block[i]] = block[(i + 1) % k];
            }
            start += k;
        }
        Permutation::new(image).expect("blocks partition the labels")
    }

    fn sample_insertion<R: Rng + ?Sized>(&self, ln_a: &[f64], width: usize, rng: &mut R) -> Permutation {
        // walk down from (m, s), recording whether each step removes a fixed point
        let (mut t, mut j) = (self.m, self.s);
        let mut fixed_steps = Vec::with_capacity(self.m);
        while t > 0 {
            let p = (t - j) / 2;
            let fixed = p == 0
                || (j > 0 && rng.random::<f64>() < (ln_a[(j - 1) * width + p] - ln_a[j * width + p]).exp());
            fixed_steps.push(fixed);
            if fixed {
                t -= 1;
                j -= 1;
            } else {
                t -= 2;
            }
        }
        // rebuild bottom-up: a new pair goes right before a uniform existing element
        let m = self.m;
        let mut next = vec![0; m];
        let mut prev = vec![0; m];
        let mut cur = 0;
        for &fixed in fixed_steps.iter().rev() {
            if fixed {
                next[cur] = cur;
                prev[cur] = cur;
                cur += 1;
            } else {
                let (x, y) = (cur, cur + 1);
                let b = rng.random_range(0..cur);
                let p = prev[b];
                next[p] = x;
                next[x] = y;
                next[y] = b;
                prev[x] = p;
                prev[y] = x;
                prev[b] = y;
                cur += 2;
            }
        }
        let mut relabel: Vec<usize> = (0..m).collect();
        relabel.shuffle(rng);
        let mut image = vec![0; m];
        for i in 0..m {
            image[relabel[i]] = relabel[next[i]];
        }
        Permutation::new(image).expect("relabeled permutation")
    }
}

/// One uniform permutation of `0..m` with `s` cycles, all of odd length.
pub fn sample_odd_cycle_permutation<R: Rng + ?Sized>(
    m: usize,
    s: usize,
    beta_hint: Option<f64>,
    rng: &mut R,
) -> Result<Permutation> {
    Ok(OddCycleSampler::new(m, s, PermMethod::Auto, beta_hint)?.sample(rng))
}

/// A plane tree with a permutation of its vertices whose cycles are all
/// odd, and a sign per cycle (cycles ordered by smallest element).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CDecoratedTree {
    tree: PlaneTree,
    perm: Permutation,
    signs: Vec<i8>,
}

impl CDecoratedTree {
    pub fn new(tree: PlaneTree, perm: Permutation, signs: Vec<i8>) -> Result<Self> {
        if perm.len() != tree.n_vertices() {
            return Err(Error::InvalidPermutation(format!(
                "permutation of {} elements on a tree with {} vertices",
                perm.len(),
                tree.n_vertices()
            )));
        }
        if !perm.all_cycles_odd() {
            return Err(Error::InvalidPermutation("a cycle has even length".into()));
        }
        if signs.len() != perm.num_cycles() || signs.iter().any(|&x| x != 1 && x != -1) {
            return Err(Error::InvalidPermutation("need one sign +1 or -1 per cycle".into()));
        }
        Ok(CDecoratedTree { tree, perm, signs })
    }

    pub fn tree(&self) -> &PlaneTree {
        &self.tree
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn genus(&self) -> usize {
        (self.tree.n_vertices() - self.perm.num_cycles()) / 2
    }

    /// Underlying graph after identifying the vertices of each cycle.
    ///
    /// Edge `i` is the tree edge into preorder vertex `i + 1`, from its
    /// parent's class to its own; the root edge is edge 0, leaving the
    /// class of the tree root.
    pub fn quotient(self) -> UnicellularSample {
        let (class, v) = self.perm.cycle_labels();
        let parents = self.tree.parents();
        let edges: Vec<[usize; 2]> = (1..self.tree.n_vertices())
            .map(|u| [class[parents[u].expect("non-root vertex")], class[u]])
            .collect();
        let root_edge = (!edges.is_empty()).then_some(0);
        let graph = RootedGraph::new(v, edges, class[0], root_edge).expect("quotient of a tree is a valid graph");
        let mut size = vec![0usize; v];
        for &c in &class {
            size[c] += 1;
        }
        UnicellularSample {
            fixed_point_mask: size.iter().map(|&k| k == 1).collect(),
            graph,
            source: self,
        }
    }
}

/// Underlying graph of a uniform unicellular map, with its C-decorated tree.
#[derive(Debug, Clone, Serialize)]
pub struct UnicellularSample {
    pub source: CDecoratedTree,
    pub graph: RootedGraph,
    /// Per graph vertex: whether it comes from a single tree vertex.
    pub fixed_point_mask: Vec<bool>,
}

/// Reusable sampler for `U_{g,n}`.
#[derive(Debug, Clone)]
pub struct UnicellularSampler {
    n: usize,
    perms: OddCycleSampler,
}

impl UnicellularSampler {
    pub fn new(n: usize, g: usize) -> Result<Self> {
        Self::with_method(n, g, PermMethod::Auto)
    }

    pub fn with_method(n: usize, g: usize, method: PermMethod) -> Result<Self> {
        if 2 * g > n {
            return Err(Error::OutOfRange(format!("2g = {} exceeds n = {n}", 2 * g)));
        }
        let perms = OddCycleSampler::new(n + 1, n + 1 - 2 * g, method, None)?;
        Ok(UnicellularSampler { n, perms })
    }

    pub fn sample_cdt<R: Rng + ?Sized>(&self, rng: &mut R) -> CDecoratedTree {
        let tree = sample_plane_tree(self.n, rng);
        let perm = self.perms.sample(rng);
        let signs = (0..perm.num_cycles())
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        CDecoratedTree::new(tree, perm, signs).expect("sampled parts are consistent")
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> UnicellularSample {
        self.sample_cdt(rng).quotient()
    }
}

pub fn sample_unicellular<R: Rng + ?Sized>(n: usize, g: usize, rng: &mut R) -> Result<UnicellularSample> {
    Ok(UnicellularSampler::new(n, g)?.sample(rng))
}

pub fn root_degree(sample: &UnicellularSample) -> usize {
    sample.graph.root_degree()
}

/// What can be said about the radius-`r` ball of a sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallView {
    pub is_tree: bool,
    /// Plane structure, known when every ball vertex is a fixed point.
    pub plane: Option<PlaneTree>,
    pub unordered_code: Option<String>,
    /// A tree ball containing a vertex made of several tree vertices.
    pub merged: bool,
}

pub fn ball_as_tree(sample: &UnicellularSample, r: usize) -> BallView {
    let ball = sample.graph.ball(r);
    let Ok(unordered) = ball.unordered_code() else {
        return BallView {
            is_tree: false,
            plane: None,
            unordered_code: None,
            merged: false,
        };
    };
    let (_, order) = sample.graph.bfs_within(r);
    let merged = order.iter().any(|&u| !sample.fixed_point_mask[u]);
    let plane = (!merged).then(|| sample.source.tree.truncate(r));
    debug_assert!(plane.as_ref().is_none_or(|t| t.unordered_code() == unordered));
    BallView {
        is_tree: true,
        plane,
        unordered_code: Some(unordered),
        merged,
    }
}

/// Largest `m` accepted by [`enumerate_odd_cycle_perms`].
pub const PERM_ENUMERATION_CAP: usize = 9;

/// Every permutation of `0..m` with `s` cycles, all odd, in lexicographic
/// order of the image arrays.
pub fn enumerate_odd_cycle_perms(m: usize, s: usize) -> Result<Vec<Permutation>> {
    if m > PERM_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            n: m,
            cap: PERM_ENUMERATION_CAP,
        });
    }
    fn rec(image: &mut Vec<usize>, used: &mut Vec<bool>, s: usize, out: &mut Vec<Permutation>) {
        let m = used.len();
        if image.len() == m {
            let p = Permutation::new(image.clone()).expect("complete image");
            if p.num_cycles() == s && p.all_cycles_odd() {
                out.push(p);
            }
            return;
        }
        for x in 0..m {
            if !used[x] {
                used[x] = true;
                image.push(x);
                rec(image, used, s, out);
                image.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(m), &mut vec![false; m], s, &mut out);
    Ok(out)
}

/// Quotients of every C-decorated tree with `n` edges and genus `g`, one
/// per (tree, permutation) pair; signs are all `+1` since they never
/// change the graph. Each rooted map corresponds to the same number of
/// entries, so this list carries the exact law of [`sample_unicellular`].
pub fn exact_quotients(n: usize, g: usize) -> Result<Vec<UnicellularSample>> {
    if 2 * g > n {
        return Err(Error::OutOfRange(format!("2g = {} exceeds n = {n}", 2 * g)));
    }
    let perms = enumerate_odd_cycle_perms(n + 1, n + 1 - 2 * g)?;
    let mut out = Vec::new();
    for t in crate::maps::enumerate_plane_trees(n) {
        for p in &perms {
            let signs = vec![1; p.num_cycles()];
            out.push(CDecoratedTree::new(t.clone(), p.clone(), signs)?.quotient());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistTable;
    use crate::oracle::exact_root_degree_dist;
    use num_rational::Ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn odd_cycle_perms(m: usize, s: usize) -> Vec<Permutation> {
        enumerate_odd_cycle_perms(m, s).unwrap()
    }

    fn all_quotients(n: usize, g: usize) -> Vec<UnicellularSample> {
        exact_quotients(n, g).unwrap()
    }

    #[test]
    fn quotient_root_degree_law_is_exact() {
        for n in 1..=5 {
            for g in 0..=n / 2 {
                let quot: DistTable<usize> = all_quotients(n, g).iter().map(root_degree).collect();
                let exact = exact_root_degree_dist(n, g).unwrap();
                for d in 1..=2 * n {
                    assert_eq!(quot.prob(&d), exact.prob(&d), "n={n} g={g} d={d}");
                }
            }
        }
    }

    #[test]
    fn identity_when_m_equals_s() {
        let p = sample_odd_cycle_permutation(7, 7, None, &mut rng(1)).unwrap();
        assert_eq!(p, Permutation::identity(7));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(sample_odd_cycle_permutation(5, 2, None, &mut rng(1)), Err(Error::Parity(_))));
        assert!(sample_odd_cycle_permutation(3, 5, None, &mut rng(1)).is_err());
        assert!(sample_unicellular(3, 2, &mut rng(1)).is_err());
    }

    fn check_uniform(m: usize, s: usize, method: PermMethod, draws: usize, seed: u64) {
        let support = odd_cycle_perms(m, s);
        let sampler = OddCycleSampler::new(m, s, method, None).unwrap();
        let mut r = rng(seed);
        let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
        for _ in 0..draws {
            let p = sampler.sample(&mut r);
            assert!(p.all_cycles_odd() && p.num_cycles() == s);
            *counts.entry(p.image().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), support.len(), "{method:?}");
        let e = draws as f64 / support.len() as f64;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        let dof = (support.len() - 1) as f64;
        // p > 0.001 roughly at chi2 < dof + 4.5 sqrt(2 dof)
        assert!(chi2 < dof + 4.5 * (2.0 * dof).sqrt(), "{method:?}: chi2 = {chi2}, dof = {dof}");
    }

    #[test]
    fn all_methods_uniform_on_small_cases() {
        for method in [PermMethod::Insertion, PermMethod::Rejection, PermMethod::Dp] {
            check_uniform(3, 1, method, 20_000, 3);
            check_uniform(5, 3, method, 40_000, 5);
            check_uniform(7, 3, method, 60_000, 7);
        }
    }

    #[test]
    fn three_cycles_split_evenly() {
        let mut r = rng(11);
        let draws = 100_000;
        let hits = (0..draws)
            .filter(|_| sample_odd_cycle_permutation(3, 1, None, &mut r).unwrap().apply(0) == 1)
            .count() as f64;
        let sd = (draws as f64 * 0.25).sqrt();
        assert!((hits - draws as f64 / 2.0).abs() < 3.0 * sd);
    }

    #[test]
    fn genus_zero_samples_are_the_tree() {
        let mut r = rng(2);
        for _ in 0..50 {
            let s = sample_unicellular(12, 0, &mut r).unwrap();
            assert!(s.graph.is_tree());
            assert!(s.fixed_point_mask.iter().all(|&x| x));
            for radius in 0..4 {
                let view = ball_as_tree(&s, radius);
                assert_eq!(view.plane, Some(s.source.tree().truncate(radius)));
            }
        }
    }

    #[test]
    fn torus_with_two_edges() {
        let s = sample_unicellular(2, 1, &mut rng(4)).unwrap();
        assert_eq!(s.graph.n_vertices(), 1);
        assert_eq!(root_degree(&s), 4);
        assert!(!ball_as_tree(&s, 1).is_tree);
        assert!(ball_as_tree(&s, 0).is_tree);
    }

    #[test]
    fn samples_have_the_right_size() {
        let mut r = rng(8);
        for (n, g) in [(10, 2), (40, 10), (101, 50)] {
            let sampler = UnicellularSampler::new(n, g).unwrap();
            for _ in 0..20 {
                let s = sampler.sample(&mut r);
                assert_eq!(s.graph.n_edges(), n);
                assert_eq!(s.graph.n_vertices(), n + 1 - 2 * g);
                assert!(s.graph.is_connected());
                assert_eq!(s.source.genus(), g);
                assert_eq!(s.source.signs().len(), n + 1 - 2 * g);
            }
        }
    }

    #[test]
    fn insertion_and_rejection_agree_on_cycle_of_zero() {
        // length of the cycle through 0 at moderate size, two routes
        let (m, s) = (61, 31);
        let a = OddCycleSampler::new(m, s, PermMethod::Insertion, None).unwrap();
        let b = OddCycleSampler::new(m, s, PermMethod::Rejection, None).unwrap();
        let mut r = rng(9);
        let draws = 20_000;
        let len0 = |p: &Permutation| p.cycles().into_iter().find(|c| c.contains(&0)).unwrap().len();
        let ta: DistTable<usize> = (0..draws).map(|_| len0(&a.sample(&mut r))).collect();
        let tb: DistTable<usize> = (0..draws).map(|_| len0(&b.sample(&mut r))).collect();
        let (fa, fb) = (ta.to_f64(), tb.to_f64());
        let tv: f64 = fa
            .keys()
            .chain(fb.keys())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|k| (fa.get(k).unwrap_or(&0.0) - fb.get(k).unwrap_or(&0.0)).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.03, "tv = {tv}");
    }

    #[test]
    fn exact_probability_of_fixed_root() {
        // type (3,1,1): 0 is fixed in 8 of the 20
        let support = odd_cycle_perms(5, 3);
        let fixed = support.iter().filter(|p| p.is_fixed_point(0)).count();
        assert_eq!(Ratio::new(fixed, support.len()), Ratio::new(2, 5));
    }
}
