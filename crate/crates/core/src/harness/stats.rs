//! Distances and goodness-of-fit tests between finite distributions.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use crate::error::{Error, Result};

fn check_nonnegative<K: Debug>(table: &BTreeMap<K, f64>) -> Result<f64> {
    let mut total = 0.0;
    for (k, &p) in table {
        if p < 0.0 || p.is_nan() {
            return Err(Error::NegativeEntry(format!("{k:?}")));
        }
        total += p;
    }
    Ok(total)
}

/// Total variation distance. Mass missing from either table (total below
/// one) is treated as one extra "other" outcome.
pub fn tv_distance<K: Ord + Debug>(p: &BTreeMap<K, f64>, q: &BTreeMap<K, f64>) -> Result<f64> {
    let other_p = (1.0 - check_nonnegative(p)?).max(0.0);
    let other_q = (1.0 - check_nonnegative(q)?).max(0.0);
    let keys: BTreeSet<&K> = p.keys().chain(q.keys()).collect();
    let sum: f64 = keys
        .into_iter()
        .map(|k| (p.get(k).copied().unwrap_or(0.0) - q.get(k).copied().unwrap_or(0.0)).abs())
        .sum();
    Ok(((sum + (other_p - other_q).abs()) / 2.0).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of empirical frequencies against a theoretical law,
/// `n_samples` draws. Outcomes expected fewer than 10 times, unlisted
/// outcomes and any residual mass are pooled into one "other" cell.
pub fn chi_square<K: Ord + Debug>(
    p_emp: &BTreeMap<K, f64>,
    p_theory: &BTreeMap<K, f64>,
    n_samples: u64,
) -> Result<ChiSquare> {
    check_nonnegative(p_emp)?;
    check_nonnegative(p_theory)?;
    let n = n_samples as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pooled_obs, mut pooled_exp) = (n, n);
    for (k, &pt) in p_theory {
        let expected = pt * n;
        if expected >= 10.0 {
            let observed = p_emp.get(k).copied().unwrap_or(0.0) * n;
            cells.push((observed, expected));
            pooled_obs -= observed;
            pooled_exp -= expected;
        }
    }
    pooled_obs = pooled_obs.max(0.0);
    pooled_exp = pooled_exp.max(0.0);
    if pooled_exp >= 10.0 || pooled_obs > 0.0 {
        cells.push((pooled_obs, pooled_exp));
    }
    let mut statistic = 0.0;
    for &(o, e) in &cells {
        if e > 0.0 {
            statistic += (o - e).powi(2) / e;
        } else if o > 0.0 {
            statistic = f64::INFINITY;
        }
    }
    let dof = cells.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else if statistic.is_infinite() {
        0.0
    } else {
        ChiSquared::new(dof as f64)
            .map_err(|e| Error::Internal(e.to_string()))?
            .sf(statistic)
    };
    Ok(ChiSquare {
        statistic,
        dof,
        p_value,
    })
}

/// Standard error and z-score of a frequency from `n` draws against `p`.
/// The z-score is `None` when `p` is 0 or 1.
pub fn z_score(freq: f64, p: f64, n: u64) -> (f64, Option<f64>) {
    let se = (p * (1.0 - p) / n as f64).sqrt();
    let z = (se > 0.0).then(|| (freq - p) / se);
    (se, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(entries: &[(&'static str, f64)]) -> BTreeMap<&'static str, f64> {
        entries.iter().copied().collect()
    }

    #[test]
    fn tv_examples() {
        let p = table(&[("a", 0.5), ("b", 0.5)]);
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(tv_distance(&table(&[("a", 1.0)]), &table(&[("b", 1.0)])).unwrap(), 1.0);
        assert_eq!(tv_distance(&p, &table(&[("a", 1.0)])).unwrap(), 0.5);
        // residual mass is an outcome of its own
        assert_eq!(tv_distance(&table(&[("a", 0.5)]), &table(&[("a", 0.5)])).unwrap(), 0.0);
        assert!((tv_distance(&table(&[("a", 0.5)]), &table(&[("a", 1.0)])).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn negative_entries_rejected() {
        let bad = table(&[("a", -0.1), ("b", 1.1)]);
        assert!(matches!(tv_distance(&bad, &bad), Err(Error::NegativeEntry(_))));
        assert!(chi_square(&bad, &bad, 10).is_err());
    }

    #[test]
    fn chi_square_of_exact_match() {
        let p = table(&[("a", 0.25), ("b", 0.75)]);
        let c = chi_square(&p, &p, 1000).unwrap();
        assert_eq!(c.statistic, 0.0);
        assert_eq!(c.dof, 1);
        assert!((c.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_known_value() {
        // 60/40 against a fair coin at n=100: statistic 4, p about 0.0455
        let c = chi_square(&table(&[("h", 0.6), ("t", 0.4)]), &table(&[("h", 0.5), ("t", 0.5)]), 100).unwrap();
        assert!((c.statistic - 4.0).abs() < 1e-9);
        assert!((c.p_value - 0.0455).abs() < 1e-3);
    }

    #[test]
    fn rare_cells_pooled() {
        let theory = table(&[("a", 0.5), ("b", 0.49), ("c", 0.005), ("d", 0.005)]);
        let c = chi_square(&theory, &theory, 1000).unwrap();
        // c and d pooled into one cell of expected count 10
        assert_eq!(c.dof, 2);
    }

    #[test]
    fn z_scores() {
        let (se, z) = z_score(0.6, 0.5, 100);
        assert!((se - 0.05).abs() < 1e-15);
        assert!((z.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(z_score(0.1, 0.0, 10).1, None);
    }
}
