//! Seeded, parallel experiments comparing the samplers with the limit laws.
//!
//! Samples are drawn in fixed-size blocks; block `b` uses the ChaCha8
//! stream `b` of the configured seed, so results do not depend on the
//! number of worker threads.

pub mod report;
pub mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::asympt::{f_beta, Regime};
use crate::dist::DistTable;
use crate::error::{Error, Result};
use crate::gw::{
    ball_average_degree, ball_probability, ball_probability_kd, gw_inf_ball_sample, gw_inf_generation_sizes,
    root_degree_limit_pmf,
};
use crate::maps::PlaneTree;
use crate::oracle::{exact_ball_dist, exact_root_degree_dist, exact_unfolded_dist, BallOutcome};
use crate::sampler::{ball_as_tree, exact_quotients, UnicellularSample, UnicellularSampler};
pub use report::{Check, ComparisonReport, DegreeProfile, Format, OutcomeRow, ProfileRow, ReportHeader};
use stats::{tv_distance, z_score};

/// Samples per RNG stream.
pub const BLOCK_SIZE: usize = 256;

/// Outcomes expected at least this many times enter the z-score test.
pub const MIN_EXPECTED: f64 = 50.0;

/// Per-outcome z-score limit.
pub const Z_MAX: f64 = 4.0;

/// Largest `n` for which `run_local_limit` enumerates instead of sampling.
pub const EXACT_MAX_N: usize = 6;

/// TV thresholds for the root-degree comparison.
pub const ROOT_DEGREE_TV_LIMIT: f64 = 0.05;
pub const ROOT_DEGREE_TV_EXACT: f64 = 0.01;

/// Root degrees up to this value get a z-score test.
pub const ROOT_DEGREE_Z_MAX_D: usize = 8;

/// Outcome key for a ball that is not a tree.
pub const NOT_TREE: &str = "!";
/// Outcome key for a tree ball of height below `r`.
pub const SHORT: &str = "<";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub g: usize,
    pub r: usize,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    /// Regime of the limit law; defaults to `g / n`.
    pub limit_theta: Option<f64>,
    pub ball_mode: BallMode,
}

/// Which ball `run_local_limit` tests against the limit law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BallMode {
    /// Edge-level unfolding ([`RootedGraph::unfolded_ball_code`]), the event
    /// counted exactly by the surgery identity.
    ///
    /// [`RootedGraph::unfolded_ball_code`]: crate::maps::RootedGraph::unfolded_ball_code
    #[default]
    Unfolded,
    /// The ball itself, which must be a tree.
    Strict,
}

impl ExperimentConfig {
    pub fn new(n: usize, g: usize) -> Self {
        ExperimentConfig {
            n,
            g,
            r: 1,
            samples: 10_000,
            seed: 1,
            workers: std::thread::available_parallelism().map_or(1, |x| x.get()),
            limit_theta: None,
            ball_mode: BallMode::default(),
        }
    }

    /// `g` is the nearest integer to `theta * n`.
    pub fn from_theta(theta: f64, n: usize) -> Self {
        Self::new(n, (theta * n as f64).round() as usize)
    }

    pub fn r(mut self, r: usize) -> Self {
        self.r = r;
        self
    }

    pub fn samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn limit_theta(mut self, theta: f64) -> Self {
        self.limit_theta = Some(theta);
        self
    }

    pub fn ball_mode(mut self, mode: BallMode) -> Self {
        self.ball_mode = mode;
        self
    }

    pub fn theta(&self) -> f64 {
        self.limit_theta.unwrap_or(self.g as f64 / self.n as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::OutOfRange("n must be at least 1".into()));
        }
        if 2 * self.g > self.n {
            return Err(Error::OutOfRange(format!("2g = {} exceeds n = {}", 2 * self.g, self.n)));
        }
        if self.samples == 0 {
            return Err(Error::OutOfRange("samples must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::OutOfRange("workers must be at least 1".into()));
        }
        let theta = self.theta();
        if !(0.0..0.5).contains(&theta) {
            return Err(Error::OutOfRange(format!("theta = {theta} outside [0, 1/2)")));
        }
        Ok(())
    }

    fn header(&self, experiment: &str) -> Result<ReportHeader> {
        let regime = Regime::new(self.theta())?;
        let mode = match self.ball_mode {
            BallMode::Unfolded => "unfolded",
            BallMode::Strict => "strict",
        };
        Ok(ReportHeader::new(experiment, self.seed, self.samples, &regime)
            .param("n", self.n)
            .param("g", self.g)
            .param("r", self.r)
            .param("ball", mode))
    }
}

/// The generator for block `block` of a run seeded with `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Runs `f(block_len, rng)` over the blocks of `samples` on `workers`
/// threads and returns the results in block order.
pub fn par_blocks<T, F>(samples: usize, seed: u64, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let blocks = samples.div_ceil(BLOCK_SIZE);
    Ok(pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let len = BLOCK_SIZE.min(samples - b * BLOCK_SIZE);
                f(len, &mut block_rng(seed, b as u64))
            })
            .collect()
    }))
}

fn merge_tables<K: Ord + Clone>(parts: Vec<DistTable<K>>) -> DistTable<K> {
    let mut all = DistTable::new();
    for p in &parts {
        all.merge(p);
    }
    all
}

/// Rows comparing `table` with `prob`, for every observed outcome and
/// every outcome of `prob` expected at least once.
fn comparison_rows<K: Ord + Clone + ToString>(
    table: &DistTable<K>,
    prob: &BTreeMap<K, f64>,
    tested: impl Fn(&K, f64) -> bool,
) -> Vec<OutcomeRow> {
    let n = table.total();
    let mut keys: Vec<&K> = table.counts().keys().collect();
    for (k, &p) in prob {
        if p * n as f64 >= 1.0 && table.count(k) == 0 {
            keys.push(k);
        }
    }
    keys.sort();
    keys.into_iter()
        .map(|k| {
            let count = table.count(k);
            let freq = count as f64 / n as f64;
            let p = prob.get(k).copied().unwrap_or(0.0);
            let (se, z) = z_score(freq, p, n);
            OutcomeRow {
                outcome: k.to_string(),
                count,
                freq,
                prob: p,
                se,
                z,
                tested: tested(k, p * n as f64),
            }
        })
        .collect()
}

fn z_check(report: &mut ComparisonReport) {
    let bad: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.tested && r.z.is_none_or(|z| z.abs() > Z_MAX))
        .map(|r| r.outcome.clone())
        .collect();
    let tested = report.rows.iter().filter(|r| r.tested).count();
    report.check(
        "z_scores",
        bad.is_empty(),
        format!("{tested} outcomes tested, |z| <= {Z_MAX}, failing: [{}]", bad.join(" ")),
    );
}

/// Limit probability that the radius-`r` ball is a tree of a given
/// unordered shape of height `r`: the number of plane embeddings of the
/// shape times the common probability of each embedding.
pub fn unordered_ball_probability(xi: f64, unordered_code: &str) -> Result<f64> {
    let t = PlaneTree::from_code(unordered_code)?;
    let ways = crate::exact::ln_biguint(&t.plane_embeddings()).exp();
    Ok(ways * ball_probability_kd(xi, t.n_edges(), t.top_level_count())?)
}

#[derive(Debug, Default)]
struct BallStats {
    table: DistTable<String>,
    strict_not_tree: u64,
    merged: u64,
    any_non_fixed: u64,
    ball_vertices: u64,
}

fn shape_key(code: Option<String>, r: usize) -> Result<String> {
    Ok(match code {
        None => NOT_TREE.to_string(),
        Some(code) if PlaneTree::from_code(&code)?.height() == r => code,
        Some(_) => SHORT.to_string(),
    })
}

fn ball_key(sample: &UnicellularSample, r: usize, mode: BallMode) -> Result<String> {
    match mode {
        BallMode::Unfolded => shape_key(sample.graph.unfolded_ball_code(r), r),
        BallMode::Strict => shape_key(ball_as_tree(sample, r).unordered_code, r),
    }
}

fn ball_stats(sample: &UnicellularSample, cfg: &ExperimentConfig, stats: &mut BallStats) -> Result<()> {
    let view = ball_as_tree(sample, cfg.r);
    stats.table.add(ball_key(sample, cfg.r, cfg.ball_mode)?);
    stats.strict_not_tree += u64::from(!view.is_tree);
    stats.merged += u64::from(view.merged);
    let (_, order) = sample.graph.bfs_within(cfg.r);
    stats.ball_vertices += order.len() as u64;
    stats.any_non_fixed += u64::from(order.iter().any(|&u| !sample.fixed_point_mask[u]));
    Ok(())
}

/// Ball shapes of sampled maps against the limit tree.
///
/// Balls (unfolded or strict, per [`BallMode`]) are keyed by their
/// unordered shape; the reference probability of a shape is
/// [`unordered_ball_probability`]. Strict-ball tree frequencies are always
/// reported in the summary. Outcomes expected at least
/// [`MIN_EXPECTED`] times must have `|z| <= Z_MAX`. For `n <=` [`EXACT_MAX_N`]
/// the sampler law is enumerated and compared exactly with the gluing
/// oracle instead.
pub fn run_local_limit(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    if cfg.n <= EXACT_MAX_N {
        return local_limit_exact(cfg);
    }
    let regime = Regime::new(cfg.theta())?;
    let sampler = UnicellularSampler::new(cfg.n, cfg.g)?;
    let parts = par_blocks(cfg.samples, cfg.seed, cfg.workers, |len, rng| {
        let mut stats = BallStats::default();
        for _ in 0..len {
            ball_stats(&sampler.sample(rng), cfg, &mut stats)?;
        }
        Ok(stats)
    })?;
    let mut all = BallStats::default();
    for p in &parts {
        let p: &BallStats = p.as_ref().map_err(Clone::clone)?;
        all.table.merge(&p.table);
        all.strict_not_tree += p.strict_not_tree;
        all.merged += p.merged;
        all.any_non_fixed += p.any_non_fixed;
        all.ball_vertices += p.ball_vertices;
    }
    let mut prob = BTreeMap::new();
    for key in all.table.counts().keys() {
        if key != NOT_TREE && key != SHORT {
            prob.insert(key.clone(), unordered_ball_probability(regime.xi, key)?);
        }
    }
    let rows = comparison_rows(&all.table, &prob, |k, expected| {
        k != NOT_TREE && k != SHORT && expected >= MIN_EXPECTED
    });
    let tv = tv_distance(&all.table.to_f64(), &prob)?;
    let mut report = ComparisonReport::new(cfg.header("local-limit")?, rows, tv);
    let n = cfg.samples as f64;
    let mean_ball = all.ball_vertices as f64 / n;
    report.summary.insert("non_tree_freq".into(), all.strict_not_tree as f64 / n);
    report.summary.insert("key_not_tree_freq".into(), all.table.count(&NOT_TREE.to_string()) as f64 / n);
    report.summary.insert("short_freq".into(), all.table.count(&SHORT.to_string()) as f64 / n);
    report.summary.insert("merged_freq".into(), all.merged as f64 / n);
    report.summary.insert("ball_has_non_fixed_freq".into(), all.any_non_fixed as f64 / n);
    report.summary.insert("mean_ball_vertices".into(), mean_ball);
    report.summary.insert(
        "non_fixed_union_bound".into(),
        mean_ball * 2.0 * cfg.g as f64 / (cfg.n + 1) as f64,
    );
    z_check(&mut report);
    Ok(report)
}

fn local_limit_exact(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    let r = cfg.r;
    // plane codes are comparable for strict balls in genus 0, unordered shapes otherwise
    let plane = cfg.g == 0 && cfg.ball_mode == BallMode::Strict;
    let mut sampled = DistTable::new();
    for q in exact_quotients(cfg.n, cfg.g)? {
        let key = if plane {
            match ball_as_tree(&q, r).plane {
                Some(t) => t.plane_code(),
                None => NOT_TREE.to_string(),
            }
        } else {
            match cfg.ball_mode {
                BallMode::Unfolded => q.graph.unfolded_ball_code(r),
                BallMode::Strict => ball_as_tree(&q, r).unordered_code,
            }
            .unwrap_or_else(|| NOT_TREE.to_string())
        };
        sampled.add(key);
    }
    let exact = match cfg.ball_mode {
        BallMode::Unfolded => exact_unfolded_dist(cfg.n, cfg.g, r)?,
        BallMode::Strict => exact_ball_dist(cfg.n, cfg.g, r)?,
    };
    let mut oracle = DistTable::new();
    for (outcome, &count) in exact.counts() {
        let key = match outcome {
            BallOutcome::NotTree => NOT_TREE.to_string(),
            BallOutcome::Tree(code) if plane => code.clone(),
            BallOutcome::Tree(code) => PlaneTree::from_code(code)?.unordered_code(),
        };
        oracle.add_count(key, count);
    }
    let prob = oracle.to_f64();
    let rows = comparison_rows(&sampled, &prob, |_, _| false);
    let tv = tv_distance(&sampled.to_f64(), &prob)?;
    let mut header = cfg.header("local-limit-exact")?;
    header.samples = sampled.total() as usize;
    let mut report = ComparisonReport::new(header, rows, tv);
    let exact = sampled.counts().keys().chain(oracle.counts().keys()).all(|k| {
        sampled.count(k) as u128 * oracle.total() as u128 == oracle.count(k) as u128 * sampled.total() as u128
    });
    report.check(
        "exact_match",
        exact,
        format!("{} decorated trees against {} maps", sampled.total(), oracle.total()),
    );
    Ok(report)
}

/// Which law the root degree is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// The large-`n` limit at `theta`.
    Limit,
    /// The exact finite-`n` law from the gluing oracle.
    Exact,
}

/// Root degree of sampled maps against the limit law or the exact law.
pub fn run_root_degree(cfg: &ExperimentConfig, reference: Reference) -> Result<ComparisonReport> {
    cfg.validate()?;
    let sampler = UnicellularSampler::new(cfg.n, cfg.g)?;
    let parts = par_blocks(cfg.samples, cfg.seed, cfg.workers, |len, rng| {
        (0..len).map(|_| sampler.sample(rng).graph.root_degree()).collect::<DistTable<usize>>()
    })?;
    let table = merge_tables(parts);
    let max_d = 2 * cfg.n;
    let (prob, tv_max, name) = match reference {
        Reference::Limit => {
            let theta = cfg.theta();
            let prob = (1..=max_d.max(4000))
                .map(|d| Ok((d, root_degree_limit_pmf(theta, d)?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            (prob, ROOT_DEGREE_TV_LIMIT, "root-degree-limit")
        }
        Reference::Exact => (exact_root_degree_dist(cfg.n, cfg.g)?.to_f64(), ROOT_DEGREE_TV_EXACT, "root-degree-exact"),
    };
    let rows = comparison_rows(&table, &prob, |&d, _| d <= ROOT_DEGREE_Z_MAX_D);
    let tv = tv_distance(&table.to_f64(), &prob)?;
    let mut report = ComparisonReport::new(cfg.header(name)?, rows, tv);
    let mean = table.counts().iter().map(|(&d, &c)| d as f64 * c as f64).sum::<f64>() / table.total() as f64;
    report.summary.insert("mean_root_degree".into(), mean);
    report.check("tv", tv <= tv_max, format!("tv = {tv} against {tv_max}"));
    z_check(&mut report);
    Ok(report)
}

/// Plane balls of `T_xi^inf` sampled directly against their exact law.
pub fn run_gw_check(xi: f64, r: usize, samples: usize, seed: u64, workers: usize) -> Result<ComparisonReport> {
    if !(xi > 0.0 && xi <= 0.5) {
        return Err(Error::OutOfRange(format!("xi = {xi} outside (0, 1/2]")));
    }
    if r == 0 || samples == 0 {
        return Err(Error::OutOfRange("need r >= 1 and samples >= 1".into()));
    }
    let parts = par_blocks(samples, seed, workers, |len, rng| {
        let mut table = DistTable::new();
        for _ in 0..len {
            let t = gw_inf_ball_sample(xi, r, rng).expect("xi checked above");
            table.add(t.plane_code());
        }
        table
    })?;
    let table = merge_tables(parts);
    let mut prob = BTreeMap::new();
    for code in table.counts().keys() {
        let t = PlaneTree::from_code(code)?;
        let p = if t.height() == r { ball_probability(xi, &t)? } else { 0.0 };
        prob.insert(code.clone(), p);
    }
    let rows = comparison_rows(&table, &prob, |_, expected| expected >= MIN_EXPECTED);
    let tv = tv_distance(&table.to_f64(), &prob)?;
    let beta = 1.0 - 2.0 * xi;
    let theta = if beta == 0.0 { 0.0 } else { (1.0 - f_beta(beta)?) / 2.0 };
    let mut regime = Regime::new(theta.max(0.0))?;
    regime.xi = xi;
    regime.beta = beta;
    let header = ReportHeader::new("gw-ball", seed, samples, &regime).param("r", r);
    let mut report = ComparisonReport::new(header, rows, tv);
    z_check(&mut report);
    Ok(report)
}

/// Global mean degree of `U_{g,n}` and mean degree of the radius-`r` balls
/// of the limit tree for `r = 1..=r_max`.
pub fn degree_profile(cfg: &ExperimentConfig, r_max: usize) -> Result<DegreeProfile> {
    cfg.validate()?;
    let regime = Regime::new(cfg.theta())?;
    let v = cfg.n + 1 - 2 * cfg.g;
    let global_mean = 2.0 * cfg.n as f64 / v as f64;
    let divisor = num_integer::gcd(2 * cfg.n, v);
    let global_exact = format!("{}/{}", 2 * cfg.n / divisor, v / divisor);
    let sampler = UnicellularSampler::new(cfg.n, cfg.g)?;
    let map_samples = cfg.samples.min(64);
    let devs = par_blocks(map_samples, cfg.seed, cfg.workers, |len, rng| {
        (0..len)
            .map(|_| {
                let s = sampler.sample(rng);
                (2.0 * s.graph.n_edges() as f64 / s.graph.n_vertices() as f64 - global_mean).abs()
            })
            .fold(0.0, f64::max)
    })?;
    let global_sampled_max_dev = devs.into_iter().fold(0.0, f64::max);
    // degree of the ball means per sample, for each radius
    let sums = par_blocks(cfg.samples, cfg.seed ^ 0x9e37_79b9_7f4a_7c15, cfg.workers, |len, rng| {
        let mut acc = vec![(0.0f64, 0.0f64); r_max + 1];
        for _ in 0..len {
            let z = gw_inf_generation_sizes(regime.xi, r_max, rng).expect("xi in range");
            for (r, slot) in acc.iter_mut().enumerate().skip(1) {
                let x = ball_average_degree(&z[..=r]);
                slot.0 += x;
                slot.1 += x * x;
            }
        }
        acc
    })?;
    let n = cfg.samples as f64;
    let rows = (1..=r_max)
        .map(|r| {
            let (s1, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b[r].0, a.1 + b[r].1));
            let mean = s1 / n;
            let var = (s2 / n - mean * mean).max(0.0);
            ProfileRow {
                r,
                mean,
                se: (var / n).sqrt(),
            }
        })
        .collect();
    Ok(DegreeProfile {
        header: cfg.header("degree-profile")?.param("r_max", r_max),
        global_exact,
        global_mean,
        global_sampled_max_dev,
        global_limit: 2.0 / (1.0 - 2.0 * regime.theta),
        ball_limit: 2.0 / (1.0 - regime.beta),
        rows,
    })
}
