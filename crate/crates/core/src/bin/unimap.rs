use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use unimap::asympt::Regime;
use unimap::exact::CountTable;
use unimap::harness::{
    degree_profile, par_blocks, BallMode, run_gw_check, run_local_limit, run_root_degree, ExperimentConfig, Format,
    Reference,
};
use unimap::maps::PlaneTree;
use unimap::oracle::{census, verify_surgery, SurgeryCheck};
use unimap::sampler::UnicellularSampler;
use unimap::Error;

/// Random unicellular maps of high genus: exact counts, samplers and local-limit checks.
///
/// Exit status: 0 pass, 1 statistical failure, 2 usage error, 3 internal error.
#[derive(Parser, Debug)]
#[command(name = "unimap", version = env!("UNIMAP_BUILD_ID"))]
struct Cli {
    /// Seed of the random streams
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (results do not depend on it)
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
    /// Write the output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Format {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact number of rooted unicellular maps by genus. CSV columns: n,g,count
    Count {
        /// Largest number of edges
        #[arg(long)]
        n: usize,
        /// Smallest number of edges (defaults to n)
        #[arg(long)]
        n_min: Option<usize>,
    },
    /// Limit constants for g/n -> theta. CSV columns: theta,beta,xi,mean,var,a_theta
    Beta {
        #[arg(long, conflicts_with = "grid")]
        theta: Option<f64>,
        /// Evenly spaced theta values in [0, 1/2)
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Sampled root degree against the limit law (or the exact law with --exact).
    /// CSV columns: outcome,count,freq,prob,se,z,tested
    RootDegree {
        #[command(flatten)]
        exp: ExpArgs,
        /// Compare with the exact finite-n law (n <= 8)
        #[arg(long)]
        exact: bool,
    },
    /// Sample maps; one rooted-graph JSON object per line
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        /// Add the decorated tree (tree code, permutation, signs)
        #[arg(long)]
        emit_cdt: bool,
    },
    /// Balls of the infinite limit tree against their exact law.
    /// CSV columns: outcome,count,freq,prob,se,z,tested
    Gw {
        #[arg(long)]
        xi: f64,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Exhaustive polygon-gluing enumeration
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Statistical and exact verifications
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Global mean degree and mean degree of limit-tree balls. CSV columns: r,mean,se
    DegreeProfile {
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, default_value_t = 12)]
        r_max: usize,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Number of maps per genus. JSON: {"n":..,"counts":{"g":count}}
    Census {
        #[arg(long)]
        n: usize,
    },
    /// Both sides of the surgery identity for one tree.
    /// CSV columns: n,g,tree,k,d,r,lhs,strict_lhs,rhs,equal
    Surgery {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: usize,
        /// Plane tree as a parenthesis code, e.g. "(()())"
        #[arg(long)]
        tree: String,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Ball shapes of sampled maps against the limit tree.
    /// CSV columns: outcome,count,freq,prob,se,z,tested
    LocalLimit {
        #[command(flatten)]
        exp: ExpArgs,
    },
    /// Surgery identity for every tree with at most k_max edges and every n <= n_max.
    /// CSV columns: n,g,tree,k,d,r,lhs,strict_lhs,rhs,equal
    Surgery {
        #[arg(long, default_value_t = 3)]
        k_max: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
}

#[derive(Args, Debug)]
struct ExpArgs {
    #[arg(long)]
    n: usize,
    /// Genus (or give --theta)
    #[arg(long, required_unless_present = "theta")]
    g: Option<usize>,
    /// g is set to round(theta * n)
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Compare with the limit at this theta instead of g/n
    #[arg(long)]
    limit_theta: Option<f64>,
    /// Test the ball itself rather than its edge-level unfolding
    #[arg(long)]
    strict: bool,
}

struct Outcome {
    text: String,
    pass: bool,
}

fn config(exp: &ExpArgs, cli: &Cli) -> ExperimentConfig {
    let mut cfg = match (exp.g, exp.theta) {
        (Some(g), _) => ExperimentConfig::new(exp.n, g),
        (None, Some(theta)) => ExperimentConfig::from_theta(theta, exp.n),
        (None, None) => unreachable!("clap requires one of them"),
    };
    cfg = cfg.r(exp.r).samples(exp.samples).seed(cli.seed);
    if let Some(w) = cli.workers {
        cfg = cfg.workers(w);
    }
    if let Some(t) = exp.limit_theta {
        cfg = cfg.limit_theta(t);
    }
    if exp.strict {
        cfg = cfg.ball_mode(BallMode::Strict);
    }
    cfg
}

fn workers(cli: &Cli) -> usize {
    cli.workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |x| x.get()))
}

fn surgery_table(checks: &[SurgeryCheck], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(checks).expect("serializable") + "\n",
        Format::Csv => {
            let mut out = String::from("n,g,tree,k,d,r,lhs,strict_lhs,rhs,equal\n");
            for c in checks {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    c.n, c.g, c.tree, c.k, c.d, c.r, c.lhs, c.strict_lhs, c.rhs, c.equal
                );
            }
            out
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let format: Format = cli.format.into();
    let done = |text: String| Ok(Outcome { text, pass: true });
    match &cli.command {
        Command::Count { n, n_min } => {
            let table = CountTable::compute(n_min.unwrap_or(*n), *n);
            match format {
                Format::Csv => done(table.to_csv()),
                Format::Json => {
                    let rows: Vec<_> = table
                        .iter()
                        .map(|(&(n, g), c)| serde_json::json!({"n": n, "g": g, "count": c.to_string()}))
                        .collect();
                    done(serde_json::to_string_pretty(&rows).expect("serializable") + "\n")
                }
            }
        }
        Command::Beta { theta, grid } => {
            let thetas: Vec<f64> = match (theta, grid) {
                (Some(t), _) => vec![*t],
                (None, Some(k)) => (0..*k).map(|i| 0.5 * i as f64 / *k as f64).collect(),
                (None, None) => return Err(Error::OutOfRange("give --theta or --grid".into())),
            };
            let regimes = thetas.iter().map(|&t| Regime::new(t)).collect::<Result<Vec<_>, _>>()?;
            match format {
                Format::Csv => {
                    let mut out = format!("{}\n", Regime::CSV_HEADER);
                    for r in &regimes {
                        let _ = writeln!(out, "{}", r.csv_row());
                    }
                    done(out)
                }
                Format::Json => done(serde_json::to_string_pretty(&regimes).expect("serializable") + "\n"),
            }
        }
        Command::RootDegree { exp, exact } => {
            let reference = if *exact { Reference::Exact } else { Reference::Limit };
            let report = run_root_degree(&config(exp, cli), reference)?;
            Ok(Outcome {
                text: report.render(format),
                pass: report.pass,
            })
        }
        Command::Sample {
            n,
            g,
            samples,
            emit_cdt,
        } => {
            let sampler = UnicellularSampler::new(*n, *g)?;
            let lines = par_blocks(*samples, cli.seed, workers(cli), |len, rng| {
                let mut out = String::new();
                for _ in 0..len {
                    let s = sampler.sample(rng);
                    let mut value = serde_json::to_value(&s.graph).expect("serializable");
                    if *emit_cdt {
                        value["cdt"] = serde_json::json!({
                            "tree": s.source.tree().plane_code(),
                            "perm": s.source.perm().image(),
                            "signs": s.source.signs(),
                        });
                    }
                    out.push_str(&value.to_string());
                    out.push('\n');
                }
                out
            })?;
            done(lines.concat())
        }
        Command::Gw { xi, r, samples } => {
            let report = run_gw_check(*xi, *r, *samples, cli.seed, workers(cli))?;
            Ok(Outcome {
                text: report.render(format),
                pass: report.pass,
            })
        }
        Command::Oracle { cmd } => match cmd {
            OracleCmd::Census { n } => {
                let c = census(*n)?;
                match format {
                    Format::Json => done(c.to_json().to_string() + "\n"),
                    Format::Csv => {
                        let mut out = String::from("n,g,count\n");
                        for (g, count) in &c.counts {
                            let _ = writeln!(out, "{},{},{}", c.n, g, count);
                        }
                        done(out)
                    }
                }
            }
            OracleCmd::Surgery { n, g, tree } => {
                let t = PlaneTree::from_code(tree)?;
                let c = verify_surgery(*n, *g, &t)?;
                let pass = c.equal;
                Ok(Outcome {
                    text: surgery_table(&[c], format),
                    pass,
                })
            }
        },
        Command::Verify { cmd } => match cmd {
            VerifyCmd::LocalLimit { exp } => {
                let report = run_local_limit(&config(exp, cli))?;
                Ok(Outcome {
                    text: report.render(format),
                    pass: report.pass,
                })
            }
            VerifyCmd::Surgery { k_max, n_max } => {
                let mut checks = Vec::new();
                for k in 1..=*k_max {
                    for t in unimap::maps::enumerate_plane_trees(k) {
                        let d = t.top_level_count();
                        for n in 1..=*n_max {
                            if n + d < k + 1 {
                                continue;
                            }
                            for g in 0..=(n + d - k) / 2 {
                                checks.push(verify_surgery(n, g, &t)?);
                            }
                        }
                    }
                }
                let pass = checks.iter().all(|c| c.equal);
                Ok(Outcome {
                    text: surgery_table(&checks, format),
                    pass,
                })
            }
        },
        Command::DegreeProfile { exp, r_max } => {
            let profile = degree_profile(&config(exp, cli), *r_max)?;
            done(profile.render(format))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &outcome.text),
                None => std::io::stdout().write_all(outcome.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 3 })
        }
    }
}

