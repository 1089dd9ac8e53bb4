//! Command-line front end. Exit codes: 0 = certificate/pass, 1 = the
//! computation succeeded but reports a failure or violation, 2 = input
//! error. All reports echo seed and thread count; with identical inputs,
//! seed, and one thread, JSON output is byte-identical across runs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hypercode::code::{
    code_from_entries, entries_only_code, from_spherical, normalize, prune_antipodal,
    verify_normalized, verify_strict,
};
use hypercode::lattice::{ample_combination, check_family, FamilyOutcome};
use hypercode::lorentz::angle;
use hypercode::search::{
    extremal_config, lemma61_grid, lemma61_max, search_code, SearchParams,
};
use hypercode::tol::Tolerances;
use hypercode::{bounds, io, HcError};

#[derive(Debug, Parser)]
#[command(name = "hypercode", version, about = "Hyperbolic code toolkit")]
struct Cli {
    /// Uniform tolerance for all numeric comparisons.
    #[arg(long, global = true, env = "HYPERCODE_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// RNG seed for every randomized procedure.
    #[arg(long, global = true, env = "HYPERCODE_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel sweeps and restarts.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check strictness of a code file: pairwise right angles + witness.
    Verify { file: PathBuf },
    /// Normalize a strict code around a pivot and re-verify the entries.
    Normalize {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        pivot: usize,
    },
    /// Build a code from other presentations.
    Construct {
        /// Spherical code file: equal radii from the separation angle.
        #[arg(long, value_name = "FILE")]
        from_spherical: PathBuf,
    },
    /// Drop one point of each antipodal pair of a 2phi0-separated code.
    Prune { file: PathBuf },
    /// Simulated-annealing search for a strict code of a given size.
    Search {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Grid sweep of the three-ball angle maximum.
    Lemma61 {
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Integer sandwich for the maximal strict code size in dimension n.
    Bounds {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_name = "FILE")]
        kissing_table: Option<PathBuf>,
    },
    /// Intersection-lattice certificates.
    #[command(subcommand)]
    Lattice(LatticeCommand),
}

#[derive(Debug, Subcommand)]
enum LatticeCommand {
    /// Pairwise dichotomy: certificate or first violating pair.
    Check { file: PathBuf },
    /// Positive combination certificate for one violating pair.
    AmplePair {
        file: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
    },
}

struct Report {
    command: &'static str,
    pass: bool,
    payload: Value,
    table: String,
}

fn run(cli: &Cli) -> Result<Report, HcError> {
    let tol = Tolerances::uniform(cli.tol);
    match &cli.command {
        Command::Verify { file } => {
            let code = io::load_code(file)?;
            let report = verify_strict(&code, &tol)?;
            let mut angles = Vec::new();
            for p in &report.pairs {
                angles.push(
                    angle(&code.vectors[p.i], &code.vectors[p.j], tol.ang)?.angle(),
                );
            }
            let mut table = format!(
                "size {}  strict: {}  witness: {}\n",
                report.size,
                report.strict,
                if report.witness.is_some() { "found" } else { "none" }
            );
            for (p, a) in report.pairs.iter().zip(&angles) {
                table.push_str(&format!(
                    "pair ({}, {}): {:?}  angle {}\n",
                    p.i,
                    p.j,
                    p.verdict,
                    a.map_or("disjoint".into(), |a| format!("{a:.9}")),
                ));
            }
            Ok(Report {
                command: "verify",
                pass: report.strict,
                payload: json!({"report": report, "angles": angles}),
                table,
            })
        }
        Command::Normalize { file, pivot } => {
            let code = io::load_code(file)?;
            let normalized = normalize(&code, *pivot, &tol)?;
            let check = verify_normalized(&normalized.entries, &tol);
            let pass = check.verdict().passes();
            let mut table = format!("pivot {pivot}  entries {}\n", normalized.entries.len());
            for (k, e) in normalized.entries.iter().enumerate() {
                table.push_str(&format!(
                    "entry {k}: z {:?}  d {:.9}  a {:?}  b {:?}\n",
                    e.z, e.d, check.cond_a[k], check.cond_b[k]
                ));
            }
            table.push_str(&format!("verdict: {:?}\n", check.verdict()));
            Ok(Report {
                command: "normalize",
                pass,
                payload: json!({"entries": normalized.entries, "check": check}),
                table,
            })
        }
        Command::Construct { from_spherical } => {
            let sc = io::load_spherical(from_spherical)?;
            let entries = from_spherical_entries(&sc, &tol)?;
            let n = sc.points.first().map_or(0, |p| p.len()) + 1;
            let (code, with_pivot) = match code_from_entries(&entries, n, &tol) {
                Ok(c) if verify_strict(&c, &tol)?.strict => (c, true),
                _ => (entries_only_code(&entries, n, &tol)?, false),
            };
            let report = verify_strict(&code, &tol)?;
            let table = format!(
                "dimension {n}  entries {}  certified size {}  strict: {}\n",
                entries.len(),
                report.size,
                report.strict
            );
            Ok(Report {
                command: "construct",
                pass: report.strict,
                payload: json!({
                    "entries": entries,
                    "with_pivot": with_pivot,
                    "report": report,
                }),
                table,
            })
        }
        Command::Prune { file } => {
            let sc = io::load_spherical(file)?;
            let pruned = prune_antipodal(&sc, &tol)?;
            let (lo, hi) = pruned.observed_angles();
            let table = format!(
                "kept {} of {}  angles in [{lo:.9}, {hi:.9}]\n",
                pruned.points.len(),
                sc.points.len()
            );
            Ok(Report {
                command: "prune",
                pass: true,
                payload: json!({"code": pruned, "observed": [lo, hi]}),
                table,
            })
        }
        Command::Search {
            dim,
            size,
            budget,
            restarts,
        } => {
            let params = SearchParams {
                budget: *budget,
                seed: cli.seed,
                restarts: *restarts,
                ..SearchParams::default()
            };
            let outcome = search_code(*dim, *size, &params, &tol)?;
            let table = match outcome.certified_size {
                Some(m) => format!(
                    "certified size {m} in dimension {dim} (restart {}, violation {:.3e})\n",
                    outcome.state.restart, outcome.state.violation
                ),
                None => format!(
                    "no certificate; best violation {:.3e} (restart {})\n",
                    outcome.state.violation, outcome.state.restart
                ),
            };
            let pass = outcome.certified_size.is_some_and(|m| m >= *size);
            Ok(Report {
                command: "search",
                pass,
                payload: json!({"target": size, "outcome": outcome}),
                table,
            })
        }
        Command::Lemma61 { grid, restarts } => {
            let cells = lemma61_grid(*grid, *restarts, cli.seed)?;
            let best = cells
                .iter()
                .max_by(|a, b| a.max_cos.total_cmp(&b.max_cos))
                .expect("nonempty grid");
            let refined = lemma61_max(best.d1, best.d2, *restarts, cli.seed)?;
            let distance = refined.argmax.distance(&extremal_config());
            let table = format!(
                "max cos theta1 = {:.6} at d1 {:.4}, d2 {:.4}; distance to the \
                 tangent-tangent-orthogonal configuration {:.3e}\n",
                refined.max_cos, best.d1, best.d2, distance
            );
            Ok(Report {
                command: "lemma61",
                pass: true,
                payload: json!({
                    "max_cos": refined.max_cos,
                    "argmax": refined.argmax,
                    "distance_to_extremal": distance,
                    "cells": cells,
                }),
                table,
            })
        }
        Command::Bounds { dim, kissing_table } => {
            let table_rows = kissing_table
                .as_ref()
                .map(|p| io::load_kissing_table(p))
                .transpose()?;
            let report = bounds::r_bounds(*dim, table_rows.as_deref())?;
            let summary = match (report.lower, report.upper) {
                (Some(l), Some(u)) => format!("{l} \u{2264} R_{dim}(\u{03c0}/2) \u{2264} {u}"),
                (Some(l), None) => format!("{l} \u{2264} R_{dim}(\u{03c0}/2)"),
                (None, Some(u)) => format!("R_{dim}(\u{03c0}/2) \u{2264} {u}"),
                (None, None) => format!("R_{dim}(\u{03c0}/2): no finite inputs"),
            };
            let pass = report.lower.is_some() && report.upper.is_some();
            let table = format!(
                "{summary}\nrates: lower {:.12}, upper {:.12}\n{}\n",
                report.lower_rate, report.upper_rate, report.asymptotics
            );
            Ok(Report {
                command: "bounds",
                pass,
                payload: json!({"summary": summary, "report": report}),
                table,
            })
        }
        Command::Lattice(LatticeCommand::Check { file }) => {
            let lat = io::load_lattice(file)?;
            let outcome = check_family(&lat)?;
            let (pass, table) = match &outcome {
                FamilyOutcome::Certificate { pairs, .. } => (
                    true,
                    format!("certificate: all {} pairs satisfied\n", pairs.len()),
                ),
                FamilyOutcome::Violation { pair, combination } => (
                    false,
                    format!(
                        "violating pair ({}, {}): p {} q {}  E^2 {}\n",
                        pair.0, pair.1, combination.p, combination.q, combination.e_squared
                    ),
                ),
            };
            Ok(Report {
                command: "lattice-check",
                pass,
                payload: json!({"outcome": outcome}),
                table,
            })
        }
        Command::Lattice(LatticeCommand::AmplePair { file, i, j }) => {
            let lat = io::load_lattice(file)?;
            let combination = ample_combination(&lat, *i, *j)?;
            let pass = combination.verify();
            let table = format!(
                "pair ({i}, {j}): p {} q {}  pa+qb {}  pb+qg {}  E^2 {}\n",
                combination.p,
                combination.q,
                combination.p_alpha_q_beta,
                combination.p_beta_q_gamma,
                combination.e_squared
            );
            Ok(Report {
                command: "lattice-ample-pair",
                pass,
                payload: json!({"combination": combination}),
                table,
            })
        }
    }
}

fn from_spherical_entries(
    sc: &hypercode::code::SphericalCode,
    tol: &Tolerances,
) -> Result<Vec<hypercode::code::Entry>, HcError> {
    from_spherical(sc, tol)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .expect("thread pool is configured once");
    match run(&cli) {
        Ok(report) => {
            if cli.format == Format::Json {
                let mut doc = json!({
                    "command": report.command,
                    "seed": cli.seed,
                    "threads": cli.threads,
                    "tolerance": cli.tol,
                    "pass": report.pass,
                });
                let map = doc.as_object_mut().expect("object");
                if let Value::Object(payload) = report.payload {
                    map.extend(payload);
                }
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            } else {
                print!("{}", report.table);
                println!("seed {}  threads {}  pass: {}", cli.seed, cli.threads, report.pass);
            }
            ExitCode::from(if report.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
