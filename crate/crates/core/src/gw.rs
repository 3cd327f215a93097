//! Limit laws: the odd log-series law, its size-biased version, the
//! limiting root-degree law, and geometric Galton-Watson trees with offspring
//! `Geom(xi) - 1`, unconditioned or conditioned to survive.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Geometric, Poisson};
use statrs::function::factorial::ln_binomial;
use std::collections::VecDeque;

use crate::asympt::solve_beta_theta;
use crate::error::{Error, Result};
use crate::maps::PlaneTree;

/// The law of `X_beta`: `P(X = 2k+1) = beta^{2k+1} / (Z (2k+1))`, `Z = atanh(beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XBetaLaw {
    beta: f64,
    z_beta: f64,
}

impl XBetaLaw {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::OutOfRange(format!("beta = {beta} outside (0, 1)")));
        }
        Ok(XBetaLaw {
            beta,
            z_beta: beta.atanh(),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn z_beta(&self) -> f64 {
        self.z_beta
    }

    /// Zero off the odd integers.
    pub fn pmf(&self, value: usize) -> f64 {
        if value % 2 == 0 {
            return 0.0;
        }
        let v = value as f64;
        (v * self.beta.ln() - self.z_beta.ln() - v.ln()).exp()
    }

    /// Inverse-CDF draw, walking the odd terms with
    /// `p(k+2)/p(k) = beta^2 k/(k+2)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let b2 = self.beta * self.beta;
        let mut k = 1usize;
        let mut p = self.beta / self.z_beta;
        let mut cdf = p;
        while cdf < u {
            p *= b2 * k as f64 / (k + 2) as f64;
            k += 2;
            if p == 0.0 {
                // u sits in the rounding gap at the top of the CDF
                break;
            }
            cdf += p;
        }
        k
    }
}

impl Distribution<usize> for XBetaLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        XBetaLaw::sample(self, rng)
    }
}

pub fn x_beta_pmf(beta: f64, value: usize) -> Result<f64> {
    Ok(XBetaLaw::new(beta)?.pmf(value))
}

/// Size-biased `X_beta`: `P(K = 2k+1) = (1 - beta^2) beta^{2k}`.
pub fn size_biased_cycle_pmf(beta: f64, value: usize) -> f64 {
    if value % 2 == 0 {
        return 0.0;
    }
    (1.0 - beta) * (1.0 + beta) * beta.powi(value as i32 - 1)
}

/// Limiting probability that the root has degree `d` when `g/n -> theta`:
/// `((1 - b^2)/4) ((1+b)^d - (1-b)^d) / (2^d b)` with `b = beta_theta`.
///
/// Evaluated as `(1 - b^2) 2^{-d-1} sum_k b^{2k} C(d, 2k+1)`, which has no
/// cancellation as `b -> 0` and gives `d 2^{-(d+1)}` at `theta = 0`.
pub fn root_degree_limit_pmf(theta: f64, d: usize) -> Result<f64> {
    let beta = solve_beta_theta(theta)?;
    Ok(root_degree_pmf_for_beta(beta, d))
}

pub fn root_degree_pmf_for_beta(beta: f64, d: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    let ln_half = -(std::f64::consts::LN_2) * (d as f64 + 1.0);
    let mut sum = 0.0;
    let mut j = 1u64;
    while j <= d as u64 {
        let ln_term = ln_binomial(d as u64, j) + ln_half;
        let bpow = if j == 1 { 1.0 } else { beta.powi(j as i32 - 1) };
        sum += ln_term.exp() * bpow;
        j += 2;
    }
    (1.0 - beta) * (1.0 + beta) * sum
}

/// The same law as the independent sum `Geom((1+b)/2) + Geom((1-b)/2) - 1`.
pub fn root_degree_convolution_pmf(beta: f64, d: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    let (p, q) = ((1.0 + beta) / 2.0, (1.0 - beta) / 2.0);
    // first geometric takes a in 1..=d, the second d + 1 - a
    (1..=d)
        .map(|a| p * (1.0 - p).powi(a as i32 - 1) * q * (1.0 - q).powi((d - a) as i32))
        .sum()
}

/// Extinction probability of `T_xi`: `xi / (1 - xi)`.
pub fn extinction_prob(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    Ok(xi / (1.0 - xi))
}

fn check_xi(xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi <= 0.5) {
        return Err(Error::OutOfRange(format!("xi = {xi} outside (0, 1/2]")));
    }
    Ok(())
}

/// Geometric Galton-Watson tree with offspring law `P(k) = (1 - xi)^k xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwParams {
    xi: f64,
}

impl GwParams {
    pub fn new(xi: f64) -> Result<Self> {
        check_xi(xi)?;
        Ok(GwParams { xi })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn offspring_pmf(&self, k: usize) -> f64 {
        (1.0 - self.xi).powi(k as i32) * self.xi
    }

    pub fn p_die(&self) -> f64 {
        self.xi / (1.0 - self.xi)
    }

    pub fn is_critical(&self) -> bool {
        self.xi == 0.5
    }

    /// Offspring law of a vertex whose subtree dies out:
    /// `P(k) p_die^k / p_die = (1 - xi) xi^k`.
    pub fn doomed_offspring_pmf(&self, k: usize) -> f64 {
        (1.0 - self.xi) * self.xi.powi(k as i32)
    }

    /// Joint law of (children, surviving children) at a vertex whose subtree
    /// survives: `P(k) C(k, j) (1-q)^j q^{k-j} / (1 - q)` for `j >= 1`, `q = p_die`.
    pub fn surviving_offspring_pmf(&self, k: usize, j: usize) -> f64 {
        if j == 0 || j > k || self.is_critical() {
            return 0.0;
        }
        let q = self.p_die();
        let ln_c = ln_binomial(k as u64, j as u64);
        self.offspring_pmf(k) * ln_c.exp() * (1.0 - q).powi(j as i32) * q.powi((k - j) as i32)
            / (1.0 - q)
    }

    fn offspring<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        Geometric::new(self.xi).expect("xi in (0, 1)").sample(rng) as usize
    }

    fn doomed_offspring<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        Geometric::new(1.0 - self.xi).expect("xi in (0, 1)").sample(rng) as usize
    }

    /// Children of a surviving vertex, flagged surviving or doomed. Draws an
    /// unconditioned litter with i.i.d. survival flags and retries until some
    /// child survives, which is exactly the conditioning on survival.
    fn surviving_litter<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        let q = self.p_die();
        loop {
            let k = self.offspring(rng);
            let flags: Vec<bool> = (0..k).map(|_| rng.random::<f64>() >= q).collect();
            if flags.iter().any(|&f| f) {
                return flags;
            }
        }
    }

    /// Litter of a vertex on the spine of the critical tree conditioned to
    /// survive: size-biased count `P(k) = k 2^{-(k+1)}`, one uniform child
    /// continuing the spine.
    fn spine_litter<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        let k = self.offspring(rng) + self.offspring(rng) + 1;
        let spine = rng.random_range(0..k);
        (0..k).map(|i| i == spine).collect()
    }
}

/// Height-`r` truncation of `T_xi`.
pub fn gw_ball_sample<R: Rng + ?Sized>(xi: f64, r: usize, rng: &mut R) -> Result<PlaneTree> {
    let gw = GwParams::new(xi)?;
    grow(r, rng, |_, rng| {
        let k = gw.offspring(rng);
        vec![false; k]
    })
}

/// Height-`r` ball of `T_xi` conditioned to survive (Kesten's tree at `xi = 1/2`).
///
/// Vertices are marked surviving or doomed. Surviving vertices draw the
/// conditioned litter of [`GwParams::surviving_offspring_pmf`]; doomed
/// vertices draw from [`GwParams::doomed_offspring_pmf`].
pub fn gw_inf_ball_sample<R: Rng + ?Sized>(xi: f64, r: usize, rng: &mut R) -> Result<PlaneTree> {
    let gw = GwParams::new(xi)?;
    grow(r, rng, |marked, rng| match (marked, gw.is_critical()) {
        (true, false) => gw.surviving_litter(rng),
        (true, true) => gw.spine_litter(rng),
        (false, false) => vec![false; gw.doomed_offspring(rng)],
        (false, true) => vec![false; gw.offspring(rng)],
    })
}

/// Breadth-first growth to height `r`; `litter` returns the marks of a
/// vertex's children given its own mark. The root is marked.
fn grow<R: Rng + ?Sized>(
    r: usize,
    rng: &mut R,
    mut litter: impl FnMut(bool, &mut R) -> Vec<bool>,
) -> Result<PlaneTree> {
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([(0usize, 0usize, true)]);
    while let Some((v, depth, marked)) = queue.pop_front() {
        if depth >= r {
            continue;
        }
        for mark in litter(marked, rng) {
            let c = children.len();
            children.push(Vec::new());
            children[v].push(c);
            queue.push_back((c, depth + 1, mark));
        }
    }
    PlaneTree::from_children(&children)
}

/// `P(B_r(T_xi^inf) = t)` for a tree with `k` edges and `d` vertices at its
/// maximal height: `(xi(1-xi))^{k+1-d} ((1-xi)^d - xi^d) / (1 - 2 xi)`.
///
/// Near `xi = 1/2` the last factor is evaluated as `sum_i (1-xi)^i xi^{d-1-i}`,
/// which is continuous through the critical point where it equals `d 2^{1-d}`.
pub fn ball_probability_kd(xi: f64, k: usize, d: usize) -> Result<f64> {
    check_xi(xi)?;
    if d == 0 || d > k {
        return Err(Error::OutOfRange(format!("need 1 <= d <= k, got k = {k}, d = {d}")));
    }
    let gap = 1.0 - 2.0 * xi;
    // log scale throughout: large balls land far below the normal f64 range
    let ln_ratio = if gap > 1e-3 {
        let q = xi / (1.0 - xi);
        d as f64 * (1.0 - xi).ln() + (-q.powi(d as i32)).ln_1p() - gap.ln()
    } else if gap == 0.0 {
        (d as f64).ln() - (d as f64 - 1.0) * std::f64::consts::LN_2
    } else {
        (0..d)
            .map(|i| (1.0 - xi).powi(i as i32) * xi.powi((d - 1 - i) as i32))
            .sum::<f64>()
            .ln()
    };
    Ok(((k + 1 - d) as f64 * (xi * (1.0 - xi)).ln() + ln_ratio).exp())
}

pub fn ball_probability(xi: f64, t: &PlaneTree) -> Result<f64> {
    if t.height() == 0 {
        return Err(Error::OutOfRange("ball probability needs a tree of height >= 1".into()));
    }
    ball_probability_kd(xi, t.n_edges(), t.top_level_count())
}

/// `P(B_r(T_xi) = t) = (1 - xi)^k xi^{k+1-d}` for a tree of height exactly `r`.
pub fn unconditioned_ball_probability(xi: f64, t: &PlaneTree) -> f64 {
    let (k, d) = (t.n_edges(), t.top_level_count());
    if t.height() == 0 {
        return 1.0;
    }
    (1.0 - xi).powi(k as i32) * xi.powi((k + 1 - d) as i32)
}

/// Sum of `count` i.i.d. `Geom(p) - 1` variables: negative binomial, drawn
/// as a gamma-mixed Poisson once the count is large.
fn negative_binomial<R: Rng + ?Sized>(count: u64, p: f64, rng: &mut R) -> u64 {
    if count == 0 {
        return 0;
    }
    if count <= 64 {
        let geo = Geometric::new(p).expect("p in (0, 1]");
        return (0..count).map(|_| geo.sample(rng)).sum();
    }
    let lambda = Gamma::new(count as f64, (1.0 - p) / p)
        .expect("positive shape and scale")
        .sample(rng);
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).expect("positive rate").sample(rng) as u64
}

/// Generation sizes `Z_0..=Z_r` of `T_xi`.
pub fn gw_generation_sizes<R: Rng + ?Sized>(xi: f64, r: usize, rng: &mut R) -> Result<Vec<u64>> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::OutOfRange(format!("xi = {xi} outside (0, 1)")));
    }
    let mut z = vec![1u64];
    for _ in 0..r {
        let last = *z.last().expect("nonempty");
        z.push(negative_binomial(last, xi, rng));
    }
    Ok(z)
}

/// Generation sizes `Z_0..=Z_r` of `T_xi^inf`.
///
/// Supercritical case: an unconditioned draw is accepted with probability
/// `1 - p_die^{Z_r}`, the chance that generation `r` has an infinite line
/// of descent. Critical case: a spine plus unconditioned side trees.
pub fn gw_inf_generation_sizes<R: Rng + ?Sized>(
    xi: f64,
    r: usize,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let gw = GwParams::new(xi)?;
    if gw.is_critical() {
        let mut z = vec![1u64];
        let mut side = 0u64;
        for _ in 0..r {
            let spine_children = gw.spine_litter(rng).len() as u64;
            side = negative_binomial(side, xi, rng) + spine_children - 1;
            z.push(side + 1);
        }
        return Ok(z);
    }
    let q = gw.p_die();
    loop {
        let z = gw_generation_sizes(xi, r, rng)?;
        let top = *z.last().expect("nonempty");
        let survive = 1.0 - q.powf(top as f64);
        if rng.random::<f64>() < survive {
            return Ok(z);
        }
    }
}

/// Mean degree over the vertices at distance `< r` from the root of an
/// infinite tree with generation sizes `z` (`z.len() == r + 1`).
pub fn ball_average_degree(z: &[u64]) -> f64 {
    let r = z.len() - 1;
    let inner: f64 = z[..r].iter().map(|&x| x as f64).sum();
    let children: f64 = z[1..].iter().map(|&x| x as f64).sum();
    let parents = inner - 1.0;
    (children + parents) / inner
}
