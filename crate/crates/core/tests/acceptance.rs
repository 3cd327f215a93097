//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! if any criterion fails.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use unimap::asympt::{f_beta, log_asymptotic_count, solve_beta_theta, x_moments};
use unimap::exact::{lehman_walsh_count, lehman_walsh_count_by_partitions, ln_biguint};
use unimap::gw::ball_probability_kd;
use unimap::harness::stats::chi_square;
use unimap::harness::{
    degree_profile, run_gw_check, run_local_limit, run_root_degree, ExperimentConfig, Format, Reference,
};
use unimap::maps::{enumerate_plane_trees, Permutation};
use unimap::oracle::{census, verify_surgery};
use unimap::sampler::{enumerate_odd_cycle_perms, OddCycleSampler, PermMethod};

const SEED: u64 = 20_240_611;

type Verdict = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: unimap::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn exact_counts() -> Verdict {
    let mut checked = 0;
    for n in 1..=7 {
        let c = lib(census(n))?;
        for g in 0..=n / 2 {
            let lw = lehman_walsh_count(n, g);
            if lw != BigUint::from(c.get(g)) {
                return Err(format!("n = {n}, g = {g}: {lw} against census {}", c.get(g)));
            }
            checked += 1;
        }
    }
    let spots = [((3, 1), 10u32), ((4, 2), 21), ((2, 1), 1)];
    for ((n, g), want) in spots {
        if lehman_walsh_count(n, g) != BigUint::from(want) {
            return Err(format!("spot value ({n},{g}) != {want}"));
        }
    }
    Ok(format!("{checked} (n,g) pairs with n <= 7 equal the census; spot values hold"))
}

fn counting_routes() -> Verdict {
    for n in 1..=12 {
        for g in 0..=n / 2 {
            let (a, b) = (lehman_walsh_count(n, g), lehman_walsh_count_by_partitions(n, g));
            if a != b {
                return Err(format!("n = {n}, g = {g}: {a} != {b}"));
            }
        }
    }
    for n in 1..=7usize {
        let total: BigUint = (0..=n / 2).map(|g| lehman_walsh_count(n, g)).sum();
        let dfact: BigUint = (1..2 * n).step_by(2).fold(BigUint::one(), |a, k| a * k);
        if total != dfact {
            return Err(format!("n = {n}: sum {total} != (2n-1)!! = {dfact}"));
        }
    }
    Ok("routes agree for n <= 12; genus sums equal (2n-1)!! for n <= 7".into())
}

fn beta_solver() -> Verdict {
    let t0 = Instant::now();
    let (mut worst_f, mut worst_m) = (0.0f64, 0.0f64);
    for i in 1..=50 {
        let theta = 0.49 * i as f64 / 50.0;
        let beta = lib(solve_beta_theta(theta))?;
        worst_f = worst_f.max((lib(f_beta(beta))? - (1.0 - 2.0 * theta)).abs());
        worst_m = worst_m.max((lib(x_moments(beta))?.mean * (1.0 - 2.0 * theta) - 1.0).abs());
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        worst_f < 1e-10 && worst_m < 1e-9 && secs < 1.0,
        format!("50 values of theta: max f error {worst_f:.2e}, max mean error {worst_m:.2e}, {secs:.3}s"),
    )
}

fn asymptotics() -> Verdict {
    let theta = 0.1;
    let ratio = |n: usize| -> Result<f64, String> {
        let g = (theta * n as f64).round() as usize;
        Ok((lib(log_asymptotic_count(n, g))? - ln_biguint(&lehman_walsh_count(n, g))).exp())
    };
    let (r100, r300) = (ratio(100)?, ratio(300)?);
    verdict(
        (0.9..=1.1).contains(&r300) && (r300 - 1.0).abs() < (r100 - 1.0).abs(),
        format!("asymptotic/exact = {r100:.5} at n = 100, {r300:.5} at n = 300"),
    )
}

fn root_degree() -> Verdict {
    let limit = lib(run_root_degree(&ExperimentConfig::new(2000, 500).samples(10_000).seed(SEED), Reference::Limit))?;
    let exact = lib(run_root_degree(&ExperimentConfig::new(4, 1).samples(100_000).seed(SEED), Reference::Exact))?;
    verdict(
        limit.pass && limit.tv <= 0.05 && exact.pass && exact.tv < 0.01,
        format!(
            "(2000,500): tv {:.4}, max |z| {:.2} for d <= 8; (4,1) exact: tv {:.4}",
            limit.tv, limit.max_abs_z, exact.tv
        ),
    )
}

fn gw_balls() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for xi in [0.1, 0.3] {
        for r in [1, 2] {
            let rep = lib(run_gw_check(xi, r, 100_000, SEED, 0))?;
            let tested = rep.rows.iter().filter(|row| row.tested).count();
            ok &= rep.pass && tested > 0;
            parts.push(format!("xi={xi} r={r}: {tested} tested, max |z| {:.2}", rep.max_abs_z));
        }
    }
    let mut worst = 0.0f64;
    for xi in [0.05, 0.1, 0.3, 0.45, 0.5] {
        let total: f64 = (1..=20_000).map(|d| ball_probability_kd(xi, d, d).unwrap()).sum();
        worst = worst.max((total - 1.0).abs());
    }
    ok &= worst < 1e-12;
    parts.push(format!("star normalization error {worst:.1e}"));
    verdict(ok, parts.join("; "))
}

fn local_limit() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for r in [1, 2] {
        let rep = lib(run_local_limit(&ExperimentConfig::new(2000, 500).r(r).samples(10_000).seed(SEED)))?;
        let tested = rep.rows.iter().filter(|row| row.tested).count();
        ok &= rep.pass && tested > 0;
        parts.push(format!(
            "r={r}: {tested} shapes tested, max |z| {:.2}, non-tree {:.4}",
            rep.max_abs_z, rep.summary["non_tree_freq"]
        ));
    }
    let mut trend = Vec::new();
    for n in [1000, 4000] {
        let rep = lib(run_local_limit(&ExperimentConfig::new(n, n / 4).r(2).samples(10_000).seed(SEED)))?;
        trend.push(rep.summary["non_tree_freq"]);
    }
    ok &= trend[1] < trend[0];
    parts.push(format!("non-tree at theta=0.25, r=2: {:.4} (n=1000) -> {:.4} (n=4000)", trend[0], trend[1]));
    verdict(ok, parts.join("; "))
}

fn critical_regime() -> Verdict {
    let rep = lib(run_local_limit(
        &ExperimentConfig::new(2000, 3).r(2).samples(10_000).seed(SEED).limit_theta(0.0),
    ))?;
    let frac = rep.summary["ball_has_non_fixed_freq"];
    let bound = 2.0 * rep.summary["non_fixed_union_bound"];
    verdict(
        rep.pass && frac < bound,
        format!(
            "xi=1/2 law: max |z| {:.2}; balls touching non-fixed cycles {frac:.4} < {bound:.4}",
            rep.max_abs_z
        ),
    )
}

fn surgery() -> Verdict {
    let mut checks = 0;
    for k in 1..=3 {
        for t in enumerate_plane_trees(k) {
            let d = t.top_level_count();
            for n in 1..=6 {
                if n + d < k + 1 {
                    continue;
                }
                for g in 0..=(n + d - k) / 2 {
                    let c = lib(verify_surgery(n, g, &t))?;
                    if !c.equal {
                        return Err(format!("tree {} at (n,g) = ({n},{g}): {} != {}", c.tree, c.lhs, c.rhs));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} (tree, n, g) cases equal"))
}

fn perm_uniformity() -> Verdict {
    let (m, s, draws) = (5, 3, 200_000u64);
    let support = lib(enumerate_odd_cycle_perms(m, s))?;
    let p = 1.0 / support.len() as f64;
    let theory: BTreeMap<Permutation, f64> = support.iter().map(|q| (q.clone(), p)).collect();
    let mut parts = vec![format!("{} permutations", support.len())];
    let mut ok = support.len() == 20;
    for method in [PermMethod::Auto, PermMethod::Rejection, PermMethod::Dp] {
        let sampler = lib(OddCycleSampler::new(m, s, method, None))?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut counts: BTreeMap<Permutation, u64> = BTreeMap::new();
        for _ in 0..draws {
            *counts.entry(sampler.sample(&mut rng)).or_default() += 1;
        }
        let emp = counts.into_iter().map(|(k, c)| (k, c as f64 / draws as f64)).collect();
        let chi = lib(chi_square(&emp, &theory, draws))?;
        ok &= chi.p_value > 1e-3;
        parts.push(format!("{method:?} p = {:.3}", chi.p_value));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for m in [1, 4, 9, 50] {
        let sampler = lib(OddCycleSampler::new(m, m, PermMethod::Auto, None))?;
        ok &= (0..100).all(|_| sampler.sample(&mut rng) == Permutation::identity(m));
    }
    parts.push("m = s gives the identity".into());
    verdict(ok, parts.join("; "))
}

fn degree_paradox() -> Verdict {
    let mut ok = true;
    for (n, g) in [(10, 3), (2000, 500), (999, 0)] {
        let prof = lib(degree_profile(&ExperimentConfig::new(n, g).samples(64).seed(SEED), 1))?;
        let v = n + 1 - 2 * g;
        let want = 2.0 * n as f64 / v as f64;
        ok &= (prof.global_mean - want).abs() < 1e-12 && prof.global_sampled_max_dev < 1e-12;
        let (a, b) = prof.global_exact.split_once('/').unwrap();
        let (a, b): (u64, u64) = (a.parse().unwrap(), b.parse().unwrap());
        ok &= a * v as u64 == b * 2 * n as u64;
    }
    let prof = lib(degree_profile(&ExperimentConfig::from_theta(0.25, 2000).samples(20_000).seed(SEED), 12))?;
    let beta = lib(solve_beta_theta(0.25))?;
    let target = 2.0 / (1.0 - beta);
    let at12 = prof.rows.iter().find(|row| row.r == 12).map(|row| row.mean).unwrap_or(f64::NAN);
    ok &= (at12 / target - 1.0).abs() <= 0.1;
    verdict(
        ok,
        format!("global mean 2n/(n+1-2g) exact in every sample; ball average at r=12 {at12:.4} vs 2/(1-beta) = {target:.4}"),
    )
}

fn determinism() -> Verdict {
    let cfg = ExperimentConfig::new(300, 60).r(2).samples(2_000).seed(SEED);
    let a = lib(run_local_limit(&cfg.clone().workers(1)))?.render(Format::Csv);
    let b = lib(run_local_limit(&cfg.clone().workers(3)))?.render(Format::Csv);
    let c = lib(run_local_limit(&cfg))?.render(Format::Json);
    let d = lib(run_local_limit(&cfg))?.render(Format::Json);
    let mut ok = a == b && c == d;

    let bin = env!("CARGO_BIN_EXE_unimap");
    let invocations: [&[&str]; 3] = [
        &["--seed", "9", "root-degree", "--n", "200", "--g", "40", "--samples", "3000"],
        &["--seed", "9", "--format", "json", "sample", "--n", "40", "--g", "8", "--samples", "20", "--emit-cdt"],
        &["--seed", "9", "gw", "--xi", "0.3", "--r", "2", "--samples", "5000"],
    ];
    for args in invocations {
        let run = || Command::new(bin).args(args).output().map(|o| (o.status.code(), o.stdout));
        let (x, y) = (run().map_err(|e| e.to_string())?, run().map_err(|e| e.to_string())?);
        ok &= x == y && !x.1.is_empty();
    }
    verdict(ok, "library reports (any worker count) and CLI output byte-identical across runs".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("exact counts against the gluing census", exact_counts),
        ("counting routes agree", counting_routes),
        ("beta solver", beta_solver),
        ("count asymptotics", asymptotics),
        ("root degree law", root_degree),
        ("limit-tree balls", gw_balls),
        ("local limit at theta = 1/4", local_limit),
        ("theta = 0 regime", critical_regime),
        ("surgery identity", surgery),
        ("odd-cycle permutation uniformity", perm_uniformity),
        ("degree paradox", degree_paradox),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let v = f();
        let secs = t0.elapsed().as_secs_f64();
        match v {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1)
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
