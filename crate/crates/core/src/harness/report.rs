//! Experiment reports and their CSV/JSON rendering.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::asympt::Regime;

/// Build identifier embedded in every report.
pub const BUILD_ID: &str = env!("UNIMAP_BUILD_ID");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Parameters and resolved constants at the top of every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub experiment: String,
    pub build: String,
    pub seed: u64,
    pub samples: usize,
    /// `(name, value)` pairs such as `n`, `g`, `r`, in insertion order.
    pub params: Vec<(String, String)>,
    pub theta: f64,
    pub beta: f64,
    pub xi: f64,
    pub z_beta: f64,
}

impl ReportHeader {
    pub fn new(experiment: &str, seed: u64, samples: usize, regime: &Regime) -> Self {
        ReportHeader {
            experiment: experiment.to_string(),
            build: BUILD_ID.to_string(),
            seed,
            samples,
            params: Vec::new(),
            theta: regime.theta,
            beta: regime.beta,
            xi: regime.xi,
            z_beta: regime.z_beta,
        }
    }

    pub fn param(mut self, name: &str, value: impl ToString) -> Self {
        self.params.push((name.to_string(), value.to_string()));
        self
    }

    fn write_csv_comments(&self, out: &mut String) {
        let _ = writeln!(out, "# experiment={}", self.experiment);
        let _ = writeln!(out, "# build={}", self.build);
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# samples={}", self.samples);
        for (k, v) in &self.params {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "# theta={}", self.theta);
        let _ = writeln!(out, "# beta={}", self.beta);
        let _ = writeln!(out, "# xi={}", self.xi);
        let _ = writeln!(out, "# z_beta={}", self.z_beta);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRow {
    pub outcome: String,
    pub count: u64,
    pub freq: f64,
    pub prob: f64,
    pub se: f64,
    pub z: Option<f64>,
    /// Whether this row takes part in the pass/fail decision.
    pub tested: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Empirical frequencies against a reference law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub header: ReportHeader,
    pub rows: Vec<OutcomeRow>,
    pub tv: f64,
    pub max_abs_z: f64,
    /// Extra scalar results, for instance the non-tree frequency.
    pub summary: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ComparisonReport {
    pub const CSV_COLUMNS: &'static str = "outcome,count,freq,prob,se,z,tested";

    pub fn new(header: ReportHeader, rows: Vec<OutcomeRow>, tv: f64) -> Self {
        let max_abs_z = rows
            .iter()
            .filter(|r| r.tested)
            .filter_map(|r| r.z)
            .map(f64::abs)
            .fold(0.0, f64::max);
        ComparisonReport {
            header,
            rows,
            tv,
            max_abs_z,
            summary: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail,
        });
        self.pass &= pass;
    }

    pub fn row(&self, outcome: &str) -> Option<&OutcomeRow> {
        self.rows.iter().find(|r| r.outcome == outcome)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Csv => self.to_csv(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        self.header.write_csv_comments(&mut out);
        for (k, v) in &self.summary {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "# tv={}", self.tv);
        let _ = writeln!(out, "# max_abs_z={}", self.max_abs_z);
        for c in &self.checks {
            let _ = writeln!(out, "# check {}={} ({})", c.name, if c.pass { "pass" } else { "fail" }, c.detail);
        }
        let _ = writeln!(out, "# pass={}", self.pass);
        let _ = writeln!(out, "{}", Self::CSV_COLUMNS);
        for r in &self.rows {
            let z = r.z.map(|z| z.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.outcome, r.count, r.freq, r.prob, r.se, z, r.tested
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub r: usize,
    pub mean: f64,
    pub se: f64,
}

/// Global mean degree of `U_{g,n}` next to the mean degree of balls in the
/// infinite limit tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeProfile {
    pub header: ReportHeader,
    /// `2n / (n + 1 - 2g)` as `"num/den"`.
    pub global_exact: String,
    pub global_mean: f64,
    /// Largest deviation of any sampled map's mean degree from `global_mean`.
    pub global_sampled_max_dev: f64,
    /// `2 / (1 - 2 theta)`
    pub global_limit: f64,
    /// `2 / (1 - beta)`
    pub ball_limit: f64,
    pub rows: Vec<ProfileRow>,
}

impl DegreeProfile {
    pub const CSV_COLUMNS: &'static str = "r,mean,se";

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("profile serializes") + "\n",
            Format::Csv => {
                let mut out = String::new();
                self.header.write_csv_comments(&mut out);
                let _ = writeln!(out, "# global_exact={}", self.global_exact);
                let _ = writeln!(out, "# global_mean={}", self.global_mean);
                let _ = writeln!(out, "# global_sampled_max_dev={}", self.global_sampled_max_dev);
                let _ = writeln!(out, "# global_limit={}", self.global_limit);
                let _ = writeln!(out, "# ball_limit={}", self.ball_limit);
                let _ = writeln!(out, "{}", Self::CSV_COLUMNS);
                for r in &self.rows {
                    let _ = writeln!(out, "{},{},{}", r.r, r.mean, r.se);
                }
                out
            }
        }
    }
}
