//! Exact arbitrary-precision counting of unicellular maps and of
//! permutations whose cycles all have odd length.
//!
//! Two independent routes compute the odd-cycle permutation counts: a sum
//! over odd partitions of the cycle-type class sizes, and a recurrence on
//! the cycle through the first element. Both are kept and checked against
//! each other.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::maps::catalan;

/// A partition whose parts are all odd, stored in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OddPartition {
    parts: Vec<usize>,
}

impl OddPartition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p % 2 == 0) {
            return Err(Error::Parity(format!("partition {parts:?} has an even part")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(OddPartition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Multiplicities `(part, m_part)` in increasing part order.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_default() += 1;
        }
        m
    }
}

/// Stream of the partitions of `total` into exactly `s` odd parts.
///
/// Writing each part as `2a + 1` turns these into the partitions of
/// `(total - s) / 2` into at most `s` parts; the stream walks the conjugate
/// partitions (largest part at most `s`) in reverse lexicographic order.
#[derive(Debug, Clone)]
pub struct OddPartitions {
    s: usize,
    feasible: bool,
    current: Option<Vec<usize>>,
}

impl OddPartitions {
    /// False when `total` and `s` have different parity or `total < s`; the
    /// stream is then empty.
    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    fn advance(&mut self) {
        let Some(a) = self.current.as_mut() else { return };
        let Some(i) = a.iter().rposition(|&x| x > 1) else {
            self.current = None;
            return;
        };
        let x = a[i] - 1;
        let mut rem: usize = a[i + 1..].iter().sum::<usize>() + 1;
        a.truncate(i);
        a.push(x);
        while rem > 0 {
            let p = rem.min(x);
            a.push(p);
            rem -= p;
        }
    }
}

impl Iterator for OddPartitions {
    type Item = OddPartition;

    fn next(&mut self) -> Option<OddPartition> {
        let conj = self.current.clone()?;
        self.advance();
        // conjugate: the i-th part counts the entries of conj exceeding i
        let mut parts = vec![1usize; self.s];
        for &c in &conj {
            for p in parts.iter_mut().take(c) {
                *p += 2;
            }
        }
        Some(OddPartition { parts })
    }
}

pub fn odd_partitions(total: usize, s: usize) -> OddPartitions {
    let feasible = total >= s && (total - s) % 2 == 0;
    let current = if !feasible {
        None
    } else if s == 0 {
        (total == 0).then(Vec::new)
    } else {
        let g = (total - s) / 2;
        let mut start = vec![s; g / s];
        if g % s > 0 {
            start.push(g % s);
        }
        Some(start)
    };
    OddPartitions {
        s,
        feasible,
        current,
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Number of permutations of `m` elements with cycle type `lambda`:
/// `m! / prod_i (m_i! i^{m_i})`.
pub fn perm_count_for_type(lambda: &OddPartition, m: usize) -> Result<BigUint> {
    if lambda.total() != m {
        return Err(Error::OutOfRange(format!(
            "partition of {} used on a ground set of size {m}",
            lambda.total()
        )));
    }
    let mut denom = BigUint::one();
    for (part, mult) in lambda.multiplicities() {
        denom *= factorial(mult) * BigUint::from(part).pow(mult as u32);
    }
    let (q, r) = factorial(m).div_rem(&denom);
    debug_assert!(r.is_zero());
    Ok(q)
}

/// Table of `a(m, j)`, the number of permutations of `m` elements with
/// exactly `j` cycles, all of odd length.
#[derive(Debug, Clone)]
pub struct OddCycleTable {
    rows: Vec<Vec<BigUint>>,
}

impl OddCycleTable {
    /// Fills `a(m, j)` for `m <= max_m`, `j <= max_j` with the recurrence on
    /// the cycle containing the first element:
    /// `a(m, j) = sum_{odd k <= m} C(m-1, k-1) (k-1)! a(m-k, j-1)`.
    pub fn new(max_m: usize, max_j: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_m + 1);
        for m in 0..=max_m {
            let mut row = vec![BigUint::zero(); max_j + 1];
            if m == 0 {
                row[0] = BigUint::one();
                rows.push(row);
                continue;
            }
            // falling factorial (m-1)!/(m-k)! for odd k, updated in steps of two
            let mut ways = BigUint::one();
            let mut k = 1;
            while k <= m {
                let rest = &rows[m - k];
                for j in 1..=max_j {
                    // a(m, j) is nonzero only when m ≡ j (mod 2)
                    if (m + j) % 2 == 0 && !rest[j - 1].is_zero() {
                        row[j] += &ways * &rest[j - 1];
                    }
                }
                if k + 2 <= m {
                    ways *= BigUint::from((m - k) * (m - k - 1));
                }
                k += 2;
            }
            rows.push(row);
        }
        OddCycleTable { rows }
    }

    pub fn get(&self, m: usize, j: usize) -> BigUint {
        self.rows
            .get(m)
            .and_then(|r| r.get(j))
            .cloned()
            .unwrap_or_default()
    }
}

pub fn odd_cycle_perm_count(m: usize, j: usize) -> BigUint {
    if j > m || (m + j) % 2 != 0 {
        return BigUint::zero();
    }
    OddCycleTable::new(m, j).get(m, j)
}

/// Sum over odd partitions of `m` into `s` parts of the class sizes; the
/// same quantity as [`odd_cycle_perm_count`] by a different route.
pub fn odd_cycle_perm_count_by_partitions(m: usize, s: usize) -> BigUint {
    odd_partitions(m, s)
        .map(|lambda| perm_count_for_type(&lambda, m).expect("partition sums to m"))
        .sum()
}

fn unicellular_from_perm_count(n: usize, g: usize, perms: BigUint) -> BigUint {
    // Cat(n) 2^{s-n-1} sum = Cat(n) sum / 4^g
    let scaled = catalan(n) * perms;
    let denom = BigUint::one() << (2 * g);
    let (q, r) = scaled.div_rem(&denom);
    assert!(r.is_zero(), "count for (n={n}, g={g}) is not integral");
    q
}

/// Number of rooted unicellular maps with `n` edges and genus `g`, via the
/// odd-cycle recurrence.
pub fn lehman_walsh_count(n: usize, g: usize) -> BigUint {
    if 2 * g > n {
        return BigUint::zero();
    }
    let s = n + 1 - 2 * g;
    unicellular_from_perm_count(n, g, odd_cycle_perm_count(n + 1, s))
}

/// Same count through the explicit sum over odd partitions of `n + 1`.
pub fn lehman_walsh_count_by_partitions(n: usize, g: usize) -> BigUint {
    if 2 * g > n {
        return BigUint::zero();
    }
    let s = n + 1 - 2 * g;
    unicellular_from_perm_count(n, g, odd_cycle_perm_count_by_partitions(n + 1, s))
}

/// Exact counts `#U_{g,n}` for a range of sizes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CountTable {
    counts: BTreeMap<(usize, usize), BigUint>,
}

impl CountTable {
    /// Every `(n, g)` with `n` in `n_min..=n_max` and `2g <= n`. One
    /// recurrence table serves the whole range.
    pub fn compute(n_min: usize, n_max: usize) -> Self {
        let table = OddCycleTable::new(n_max + 1, n_max + 1);
        let mut counts = BTreeMap::new();
        for n in n_min..=n_max {
            for g in 0..=n / 2 {
                let s = n + 1 - 2 * g;
                counts.insert((n, g), unicellular_from_perm_count(n, g, table.get(n + 1, s)));
            }
        }
        CountTable { counts }
    }

    /// `#U_{g,n}`; zero whenever `2g > n`.
    pub fn get(&self, n: usize, g: usize) -> Option<BigUint> {
        if 2 * g > n {
            return Some(BigUint::zero());
        }
        self.counts.get(&(n, g)).cloned()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &BigUint)> {
        self.counts.iter()
    }

    /// CSV with columns `n,g,count`, counts as decimal strings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,g,count\n");
        for ((n, g), c) in &self.counts {
            writeln!(out, "{n},{g},{c}").expect("writing to a String");
        }
        out
    }
}

/// Natural log of a positive big integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn atanh_checked(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::OutOfRange(format!("beta = {beta} must lie in (0, 1)")));
    }
    Ok(beta.atanh())
}

/// `sum over compositions of total into s odd parts of prod 1/k_i`, exactly.
///
/// Equals `s! a(total, s) / total!` since `s!/prod m_i!` counts the orders
/// of a partition's parts.
pub fn odd_composition_weight(s: usize, total: usize) -> BigRational {
    let a = odd_cycle_perm_count(total, s);
    BigRational::new(
        BigInt::from(factorial(s) * a),
        BigInt::from(factorial(total)),
    )
}

/// Totals up to this size use the exact rational route in [`conditioned_sum_pmf`].
pub const EXACT_PMF_MAX_TOTAL: usize = 200;

/// `P(X_1 + .. + X_s = total)` for i.i.d. copies of the odd log-series law
/// with parameter `beta`.
pub fn conditioned_sum_pmf(beta: f64, s: usize, total: usize) -> Result<f64> {
    let z = atanh_checked(beta)?;
    if s == 0 {
        return Err(Error::OutOfRange("s must be at least 1".into()));
    }
    if total < s || (total - s) % 2 != 0 {
        return Ok(0.0);
    }
    if total <= EXACT_PMF_MAX_TOTAL {
        let w = odd_composition_weight(s, total);
        let ln_w = ln_biguint(&w.numer().magnitude().clone()) - ln_biguint(&w.denom().magnitude().clone());
        return Ok((total as f64 * beta.ln() - s as f64 * z.ln() + ln_w).exp());
    }
    let table = SumTable::new(beta, s, total)?;
    Ok(table.ln_prob(s, total).exp())
}

/// Distribution of partial sums `S_j = X_1 + .. + X_j` for `j <= max_count`
/// and values up to `max_total`, by repeated convolution.
///
/// Each row is stored normalized to a maximum of one with its log scale kept
/// separately, so long rows do not underflow.
#[derive(Debug, Clone)]
pub struct SumTable {
    rows: Vec<Vec<f64>>,
    ln_scale: Vec<f64>,
    step_pmf: Vec<f64>,
}

impl SumTable {
    pub fn new(beta: f64, max_count: usize, max_total: usize) -> Result<Self> {
        let z = atanh_checked(beta)?;
        let mut step_pmf = vec![0.0; max_total + 1];
        for k in (1..=max_total).step_by(2) {
            step_pmf[k] = (k as f64 * beta.ln() - z.ln() - (k as f64).ln()).exp();
        }
        let mut rows = Vec::with_capacity(max_count + 1);
        let mut ln_scale = Vec::with_capacity(max_count + 1);
        let mut first = vec![0.0; max_total + 1];
        first[0] = 1.0;
        rows.push(first);
        ln_scale.push(0.0);
        for j in 1..=max_count {
            let prev = &rows[j - 1];
            let mut row = vec![0.0; max_total + 1];
            for t in (j..=max_total).step_by(2) {
                let mut acc = 0.0;
                let mut k = 1;
                while k + (j - 1) <= t {
                    acc += step_pmf[k] * prev[t - k];
                    k += 2;
                }
                row[t] = acc;
            }
            let max = row.iter().copied().fold(0.0, f64::max);
            let scale = if max > 0.0 { max } else { 1.0 };
            row.iter_mut().for_each(|x| *x /= scale);
            ln_scale.push(ln_scale[j - 1] + scale.ln());
            rows.push(row);
        }
        Ok(SumTable {
            rows,
            ln_scale,
            step_pmf,
        })
    }

    pub fn ln_prob(&self, count: usize, total: usize) -> f64 {
        match self.rows.get(count).and_then(|r| r.get(total)) {
            Some(&x) if x > 0.0 => x.ln() + self.ln_scale[count],
            _ => f64::NEG_INFINITY,
        }
    }

    /// Weight of `X_1 = k` given `S_count = total`, up to a common factor:
    /// `P(X = k) P(S_{count-1} = total - k)` in the scaling of row `count - 1`.
    pub fn first_step_weight(&self, count: usize, total: usize, k: usize) -> f64 {
        if k > total || k >= self.step_pmf.len() {
            return 0.0;
        }
        self.step_pmf[k] * self.rows[count - 1][total - k]
    }
}
