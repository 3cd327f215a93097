//! The parameter `beta(theta)`, moments of the odd log-series law and the
//! first-order asymptotics of `#U_{g,n}`.

use serde::Serialize;
use statrs::function::factorial::ln_factorial;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const BISECTION_STEPS: usize = 200;

/// `(1/2)(1/beta - beta) log((1+beta)/(1-beta))`, extended by continuity
/// with `f(0) = 1` and `f(1) = 0`. Strictly decreasing on `[0, 1]`.
pub fn f_beta(beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::OutOfRange(format!("beta = {beta} outside [0, 1]")));
    }
    if beta == 0.0 {
        return Ok(1.0);
    }
    if beta == 1.0 {
        return Ok(0.0);
    }
    Ok((1.0 - beta) * (1.0 + beta) * beta.atanh() / beta)
}

/// Solves `f(beta) = target` for `target` in `(0, 1)`.
fn invert_f(target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f_beta(mid).expect("mid lies in (0, 1)");
        if v > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `beta_theta`, the root of `f(beta) = 1 - 2 theta`. Zero at `theta = 0`.
pub fn solve_beta_theta(theta: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&theta) {
        return Err(Error::OutOfRange(format!("theta = {theta} outside [0, 1/2)")));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    Ok(invert_f(1.0 - 2.0 * theta))
}

/// `beta` with `E[X_beta] = (n + 1)/s` exactly; zero when `s = n + 1`.
pub fn solve_beta_n(n: usize, s: usize) -> Result<f64> {
    if s == 0 || s > n + 1 {
        return Err(Error::OutOfRange(format!("need 1 <= s <= n + 1, got n = {n}, s = {s}")));
    }
    if (n + 1 - s) % 2 != 0 {
        return Err(Error::Parity(format!("s = {s} and n + 1 = {} differ in parity", n + 1)));
    }
    if s == n + 1 {
        return Ok(0.0);
    }
    // E[X_beta] = 1/f(beta)
    Ok(invert_f(s as f64 / (n + 1) as f64))
}

/// Normalizer, mean and variance of `X_beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XMoments {
    pub z_beta: f64,
    pub mean: f64,
    pub variance: f64,
}

pub fn x_moments(beta: f64) -> Result<XMoments> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::OutOfRange(format!("beta = {beta} outside (0, 1)")));
    }
    let z = beta.atanh();
    let one_minus = (1.0 - beta) * (1.0 + beta);
    let mean = beta / (z * one_minus);
    let second = beta * (1.0 + beta * beta) / (z * one_minus * one_minus);
    Ok(XMoments {
        z_beta: z,
        mean,
        variance: second - mean * mean,
    })
}

/// Resolved constants of the regime `g / n -> theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime {
    pub theta: f64,
    pub beta: f64,
    pub xi: f64,
    pub z_beta: f64,
    pub mean_x: f64,
    pub var_x: f64,
    /// Local-limit constant `2 / sqrt(2 pi Var X)`; infinite at `theta = 0`.
    pub a_theta: f64,
}

impl Regime {
    pub fn new(theta: f64) -> Result<Self> {
        let beta = solve_beta_theta(theta)?;
        if beta == 0.0 {
            return Ok(Regime {
                theta,
                beta,
                xi: 0.5,
                z_beta: 0.0,
                mean_x: 1.0,
                var_x: 0.0,
                a_theta: f64::INFINITY,
            });
        }
        let m = x_moments(beta)?;
        Ok(Regime {
            theta,
            beta,
            xi: (1.0 - beta) / 2.0,
            z_beta: m.z_beta,
            mean_x: m.mean,
            var_x: m.variance,
            a_theta: 2.0 / (2.0 * PI * m.variance).sqrt(),
        })
    }

    pub const CSV_HEADER: &'static str = "theta,beta,xi,mean,var,a_theta";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.theta, self.beta, self.xi, self.mean_x, self.var_x, self.a_theta
        )
    }
}

/// Natural log of the first-order asymptotic count
/// `A_theta (2n)!/(n! s! sqrt(s)) Z^s / (4^g beta^{n+1})`, with
/// `beta = solve_beta_n(n, s)` and `theta = g / n` in `A_theta`.
pub fn log_asymptotic_count(n: usize, g: usize) -> Result<f64> {
    if g == 0 {
        return Err(Error::OutOfRange(
            "genus 0 has no log-series regime; use Catalan numbers".into(),
        ));
    }
    if 2 * g > n {
        return Err(Error::OutOfRange(format!("2g = {} exceeds n = {n}", 2 * g)));
    }
    let s = n + 1 - 2 * g;
    let beta = solve_beta_n(n, s)?;
    let z = beta.atanh();
    let a_theta = Regime::new(g as f64 / n as f64)?.a_theta;
    let (n64, s64) = (n as u64, s as u64);
    Ok(a_theta.ln() + ln_factorial(2 * n64)
        - ln_factorial(n64)
        - ln_factorial(s64)
        - 0.5 * (s as f64).ln()
        + s as f64 * z.ln()
        - g as f64 * 4f64.ln()
        - (n + 1) as f64 * beta.ln())
}

/// Limit of `#U_{g,n-k+d} / #U_{g,n}`: `((1 - beta_theta^2)/4)^{k-d}`.
pub fn count_ratio_limit(theta: f64, k: usize, d: usize) -> Result<f64> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::OutOfRange(format!("theta = {theta} outside (0, 1/2)")));
    }
    let beta = solve_beta_theta(theta)?;
    let base = (1.0 - beta) * (1.0 + beta) / 4.0;
    Ok(base.powi(k as i32 - d as i32))
}
