//! `pickdisc` — analyses of finite interpolation data on the unit disc.
//!
//! Every subcommand reads a JSON problem file (`nodes`, optional
//! `values`, optional `metadata`), runs one analysis, and emits a JSON
//! report (stdout or `--out`), with an optional CSV sidecar for plot
//! data. Exit codes: 0 success, 2 invalid input, 3 mathematical refusal
//! (the report still carries the verdict).

// Validation guards are written `!(x > 0.0)` so NaN parameters fail closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod problem;
mod report;

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use pickdisc::assembly::{audit_f1_properties, necessity_stress, AuditGrid};
use pickdisc::geometry::{carleson_layer_counts, order_check, r_density, CarlesonSquare};
use pickdisc::hyperbolic::{hyp_dist, hyperbolic_lattice, DiscPoint};
use pickdisc::quotients::{
    build_triangle, column_condition_check, epsilon_of, PermutationSweep, QuotientTriangle,
};
use pickdisc::sampling::{make_test_family, report_from_scans, sampling_scan};
use pickdisc::solver::{denjoy_sum, schur_solve, solvability, InitialFn, Solvability};

use problem::{Problem, ProblemFile};
use report::{digest, Csv, ReportFile};

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
    /// Partial results to publish despite the failure (refusals carry
    /// the verdict).
    pub report: Option<serde_json::Value>,
}

impl CliError {
    fn invalid_input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
            report: None,
        }
    }

    fn refusal(message: impl Into<String>, results: serde_json::Value) -> Self {
        Self {
            code: 3,
            message: message.into(),
            report: Some(results),
        }
    }
}

fn map_core(e: pickdisc::Error) -> CliError {
    use pickdisc::Error as E;
    let code = match &e {
        E::NotStrictlySolvable { .. }
        | E::DegenerateBoundary { .. }
        | E::DegenerateFamily
        | E::LimitDivergence { .. }
        | E::PoleAtNode { .. }
        | E::OutsideQuadratureMargin { .. } => 3,
        _ => 2,
    };
    CliError {
        code,
        message: e.to_string(),
        report: None,
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::invalid_input(format!("serialization: {e}")))
}

#[derive(Args, Debug, Clone)]
struct IoArgs {
    /// Problem file (JSON).
    input: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write plot data here (commands that produce it).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(name = "pickdisc", version, about = "Interpolation and sampling analyses on the unit disc")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Difference-quotient triangle plus a compatibility-constant sweep.
    Triangle {
        #[command(flatten)]
        io: IoArgs,
        /// `all` for an exhaustive sweep or a draw count for a sampled one.
        #[arg(long, default_value = "all")]
        permutations: String,
        /// Size of the swept subsets (default: all nodes).
        #[arg(long)]
        subset_size: Option<usize>,
        /// Required when the sweep is sampled.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Construct an interpolant through the Schur recursion.
    Solve {
        #[command(flatten)]
        io: IoArgs,
        /// Initial constant `re,im` for the recursion.
        #[arg(long, default_value = "0,0")]
        g0: String,
    },
    /// Classify the data by the three solvability criteria.
    Solvable {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Partial sums of the infinite-data solvability series.
    Denjoy {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Separation decomposition plus dyadic density fit.
    Analyze {
        #[command(flatten)]
        io: IoArgs,
        /// Number of separated parts the order audit allows.
        #[arg(long, default_value_t = 2)]
        order_target: usize,
        /// Separation constant the parts must satisfy.
        #[arg(long, default_value_t = 0.5)]
        eta_target: f64,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Comma-separated alpha grid inside (0, 1).
        #[arg(long)]
        alpha_grid: Option<String>,
    },
    /// Covering radius of the nodes over a probe lattice.
    Density {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 3.0)]
        grid_radius: f64,
        #[arg(long, default_value_t = 0.1)]
        grid_step: f64,
    },
    /// Sampling-constant estimate over a seeded test-function family.
    Sampling {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        family_size: usize,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, default_value_t = 6.0)]
        grid_radius: f64,
        #[arg(long, default_value_t = 0.25)]
        grid_step: f64,
    },
    /// Stressed values for a cluster plus subset compatibility audit.
    Stress {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.25)]
        c_const: f64,
    },
    /// Solve on the data, then audit the two assembly properties.
    Audit {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 0.5)]
        eta1: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 3.0)]
        grid_radius: f64,
        #[arg(long, default_value_t = 0.1)]
        grid_step: f64,
        #[arg(long, default_value_t = 2048)]
        boundary_nodes: usize,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = Cli::parse();
    let (io, name, seed) = match &cli.command {
        Command::Triangle { io, seed, .. } => (io.clone(), "triangle", *seed),
        Command::Solve { io, .. } => (io.clone(), "solve", None),
        Command::Solvable { io } => (io.clone(), "solvable", None),
        Command::Denjoy { io } => (io.clone(), "denjoy", None),
        Command::Analyze { io, .. } => (io.clone(), "analyze", None),
        Command::Density { io, .. } => (io.clone(), "density", None),
        Command::Sampling { io, seed, .. } => (io.clone(), "sampling", *seed),
        Command::Stress { io, .. } => (io.clone(), "stress", None),
        Command::Audit { io, .. } => (io.clone(), "audit", None),
    };

    let bytes = match std::fs::read(&io.input) {
        Ok(bytes) => bytes,
        Err(e) => {
            eprintln!("pickdisc: cannot read {}: {e}", io.input.display());
            return 2;
        }
    };
    let inputs_digest = digest(&bytes);

    let outcome = ProblemFile::parse(&bytes).and_then(|problem| dispatch(&cli.command, &problem));
    match outcome {
        Ok((results, warnings, csv)) => {
            let report = ReportFile {
                command: name.to_string(),
                inputs_digest,
                seed,
                results,
                warnings,
            };
            if let Err(e) = report.emit(io.out.as_deref()) {
                eprintln!("pickdisc: {}", e.message);
                return 2;
            }
            match (&csv, &io.csv) {
                (Some(csv), Some(path)) => {
                    if let Err(e) = csv.write(path) {
                        eprintln!("pickdisc: {}", e.message);
                        return 2;
                    }
                }
                (None, Some(_)) => {
                    eprintln!("pickdisc: this command produces no csv sidecar");
                }
                _ => {}
            }
            0
        }
        Err(err) => {
            eprintln!("pickdisc: {}", err.message);
            if let Some(results) = err.report {
                let report = ReportFile {
                    command: name.to_string(),
                    inputs_digest,
                    seed,
                    results,
                    warnings: vec![err.message],
                };
                if report.emit(io.out.as_deref()).is_err() {
                    return 2;
                }
            }
            err.code
        }
    }
}

type CommandOutput = (serde_json::Value, Vec<String>, Option<Csv>);

fn dispatch(command: &Command, problem: &Problem) -> Result<CommandOutput, CliError> {
    match command {
        Command::Triangle {
            permutations,
            subset_size,
            seed,
            ..
        } => cmd_triangle(problem, permutations, *subset_size, *seed),
        Command::Solve { g0, .. } => cmd_solve(problem, g0),
        Command::Solvable { .. } => cmd_solvable(problem),
        Command::Denjoy { .. } => cmd_denjoy(problem),
        Command::Analyze {
            order_target,
            eta_target,
            depth,
            alpha_grid,
            ..
        } => cmd_analyze(problem, *order_target, *eta_target, *depth, alpha_grid.as_deref()),
        Command::Density {
            grid_radius,
            grid_step,
            ..
        } => cmd_density(problem, *grid_radius, *grid_step),
        Command::Sampling {
            seed,
            family_size,
            max_degree,
            grid_radius,
            grid_step,
            ..
        } => cmd_sampling(problem, *seed, *family_size, *max_degree, *grid_radius, *grid_step),
        Command::Stress { eps, c_const, .. } => cmd_stress(problem, *eps, *c_const),
        Command::Audit {
            eta1,
            eps,
            grid_radius,
            grid_step,
            boundary_nodes,
            ..
        } => cmd_audit(problem, *eta1, *eps, *grid_radius, *grid_step, *boundary_nodes),
    }
}

fn ignore_values_warning(problem: &Problem, warnings: &mut Vec<String>) {
    if problem.values.is_some() {
        warnings.push("values present in the input are not used by this command".into());
    }
}

fn arrangement_total(n: usize, s: usize) -> Option<usize> {
    let mut total: usize = 1;
    for i in 0..s {
        total = total.checked_mul(n - i)?;
    }
    Some(total)
}

fn cmd_triangle(
    problem: &Problem,
    permutations: &str,
    subset_size: Option<usize>,
    seed: Option<u64>,
) -> Result<CommandOutput, CliError> {
    let values = problem.values_required("triangle")?;
    let nodes = &problem.nodes;
    let triangle = build_triangle(nodes, values).map_err(map_core)?;

    let subset = subset_size.unwrap_or(nodes.len());
    let total = arrangement_total(nodes.len(), subset);
    let mut warnings = Vec::new();
    let (budget, seed_value) = if permutations == "all" {
        match total {
            Some(t) if t <= 10_000_000 => (t, 0),
            _ => {
                return Err(CliError::invalid_input(
                    "exhaustive sweep too large; pass --permutations <N> with --seed",
                ))
            }
        }
    } else {
        let n: usize = permutations.parse().map_err(|_| {
            CliError::invalid_input("--permutations must be `all` or a positive integer")
        })?;
        if n == 0 {
            return Err(CliError::invalid_input("--permutations must be positive"));
        }
        let needs_sampling = total.is_none_or(|t| t > n);
        let seed_value = match (needs_sampling, seed) {
            (true, Some(s)) => s,
            (true, None) => {
                return Err(CliError::invalid_input(
                    "sampled permutation sweep requires --seed",
                ))
            }
            (false, s) => s.unwrap_or(0),
        };
        (n, seed_value)
    };

    let epsilon = epsilon_of(nodes, values, subset, budget, seed_value).map_err(map_core)?;
    if !epsilon.exhaustive {
        warnings.push(format!(
            "sweep sampled {} arrangements; epsilon_min is a lower bound",
            epsilon.permutations_checked
        ));
    }
    if epsilon.saturated_witness.is_some() {
        warnings.push("some swept level contains a saturated entry: the ratio there is infinite".into());
    }

    let mut results = json!({
        "triangle": to_value(&triangle)?,
        "epsilon": to_value(&epsilon)?,
    });
    if permutations == "all" && total.is_some_and(|t| t <= 5040) && subset == nodes.len() {
        let mut perm_triangles = Vec::new();
        let mut arrangement: Vec<usize> = (0..nodes.len()).collect();
        permute_all(&mut arrangement, 0, &mut |arr| {
            let sub_nodes: Vec<DiscPoint> = arr.iter().map(|&i| nodes[i]).collect();
            let sub_values: Vec<Complex64> = arr.iter().map(|&i| values[i]).collect();
            if let Ok(t) = build_triangle(&sub_nodes, &sub_values) {
                perm_triangles.push(json!({
                    "arrangement": arr,
                    "triangle": serde_json::to_value(&t).unwrap(),
                }));
            }
        });
        results["permutation_triangles"] = serde_json::Value::Array(perm_triangles);
    }

    let csv = Csv {
        header: "level,row,re,im,abs,saturated,poisoned",
        rows: triangle_rows(&triangle),
    };
    Ok((results, warnings, Some(csv)))
}

fn permute_all(arr: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == arr.len() {
        f(arr);
        return;
    }
    for i in k..arr.len() {
        arr.swap(k, i);
        permute_all(arr, k + 1, f);
        arr.swap(k, i);
    }
}

fn triangle_rows(triangle: &QuotientTriangle) -> Vec<String> {
    let mut rows = Vec::new();
    for (j, row) in triangle.rows().iter().enumerate() {
        for (k, entry) in row.iter().enumerate() {
            let (re, im, abs, sat, poisoned) = match entry.value() {
                Some(v) => (
                    v.re.to_string(),
                    v.im.to_string(),
                    v.norm().to_string(),
                    entry.is_saturated(),
                    false,
                ),
                None => (String::new(), String::new(), String::new(), false, true),
            };
            rows.push(format!("{k},{j},{re},{im},{abs},{sat},{poisoned}"));
        }
    }
    rows
}

fn parse_g0(text: &str) -> Result<InitialFn, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::invalid_input("--g0 must look like `re,im`"));
    }
    let re: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::invalid_input("--g0 real part is not a number"))?;
    let im: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::invalid_input("--g0 imaginary part is not a number"))?;
    InitialFn::constant(Complex64::new(re, im)).map_err(map_core)
}

fn cmd_solve(problem: &Problem, g0: &str) -> Result<CommandOutput, CliError> {
    let values = problem.values_required("solve")?;
    let initial = parse_g0(g0)?;
    let verdict = solvability(&problem.nodes, values).map_err(map_core)?;
    if verdict.status != Solvability::InfinitelyMany {
        return Err(CliError::refusal(
            format!("refusing to solve: data classified {}", verdict.status.as_str()),
            json!({ "verdict": to_value(&verdict)? }),
        ));
    }
    let chain = schur_solve(&problem.nodes, values, initial).map_err(map_core)?;

    let mut residual = 0.0f64;
    for (z, w) in problem.nodes.iter().zip(values) {
        residual = residual.max((chain.eval(*z) - w).norm());
    }
    let grid = hyperbolic_lattice(6.0, 0.1).map_err(map_core)?;
    let mut sup = 0.0f64;
    for z in &grid {
        sup = sup.max(chain.eval(*z).norm());
    }

    let results = json!({
        "verdict": to_value(&verdict)?,
        "chain": to_value(&chain)?,
        "max_interpolation_residual": residual,
        "grid_sup_modulus": sup,
        "grid_points": grid.len(),
    });
    Ok((results, Vec::new(), None))
}

fn cmd_solvable(problem: &Problem) -> Result<CommandOutput, CliError> {
    let values = problem.values_required("solvable")?;
    let verdict = solvability(&problem.nodes, values).map_err(map_core)?;
    Ok((json!({ "verdict": to_value(&verdict)? }), Vec::new(), None))
}

fn cmd_denjoy(problem: &Problem) -> Result<CommandOutput, CliError> {
    let values = problem.values_required("denjoy")?;
    let report = denjoy_sum(&problem.nodes, values).map_err(map_core)?;
    let rows = report
        .terms
        .iter()
        .zip(&report.partial_sums)
        .enumerate()
        .map(|(i, (term, sum))| format!("{i},{term},{sum}"))
        .collect();
    let csv = Csv {
        header: "index,term,partial_sum",
        rows,
    };
    Ok((json!({ "denjoy": to_value(&report)? }), Vec::new(), Some(csv)))
}

fn parse_alpha_grid(text: Option<&str>) -> Result<Vec<f64>, CliError> {
    match text {
        None => Ok((1..20).map(|i| i as f64 * 0.05).collect()),
        Some(raw) => raw
            .split(',')
            .map(|piece| {
                piece
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::invalid_input(format!("bad alpha value `{piece}`")))
            })
            .collect(),
    }
}

fn cmd_analyze(
    problem: &Problem,
    order_target: usize,
    eta_target: f64,
    depth: usize,
    alpha_grid: Option<&str>,
) -> Result<CommandOutput, CliError> {
    let mut warnings = Vec::new();
    ignore_values_warning(problem, &mut warnings);
    let grid = parse_alpha_grid(alpha_grid)?;
    let report = order_check(&problem.nodes, order_target, eta_target, depth, &grid)
        .map_err(map_core)?;
    if !report.condition_a {
        warnings.push(format!(
            "greedy partition needs {} parts for target {}",
            report.part_count, order_target
        ));
    }

    // Layer-count plot data over the dyadic family.
    let tau = 2.0 * std::f64::consts::PI;
    let mut rows = Vec::new();
    for l in 0..=depth {
        let side = tau * 2f64.powi(-(l as i32));
        for j in 0..(1usize << l) {
            let theta0 = tau * j as f64 / (1 << l) as f64;
            let square = CarlesonSquare::new(theta0, side).map_err(map_core)?;
            let counts = carleson_layer_counts(&problem.nodes, &square, depth);
            for (idx, count) in counts.iter().enumerate() {
                if *count > 0 {
                    rows.push(format!("{l},{j},{theta0},{side},{},{count}", idx + 1));
                }
            }
        }
    }
    let csv = Csv {
        header: "l,j,theta0,side,m,count",
        rows,
    };
    Ok((json!({ "sequence": to_value(&report)? }), warnings, Some(csv)))
}

fn cmd_density(problem: &Problem, grid_radius: f64, grid_step: f64) -> Result<CommandOutput, CliError> {
    let mut warnings = Vec::new();
    ignore_values_warning(problem, &mut warnings);
    let estimate = r_density(&problem.nodes, grid_radius, grid_step).map_err(map_core)?;
    warnings.push(format!(
        "density audited on the hyperbolic disc of radius {grid_radius} only"
    ));

    let probes = hyperbolic_lattice(grid_radius, grid_step).map_err(map_core)?;
    let rows = probes
        .iter()
        .map(|probe| {
            let nearest = problem
                .nodes
                .iter()
                .map(|z| hyp_dist(*probe, *z))
                .fold(f64::INFINITY, f64::min);
            format!("{},{},{nearest}", probe.re(), probe.im())
        })
        .collect();
    let csv = Csv {
        header: "probe_re,probe_im,nearest_beta",
        rows,
    };
    Ok((json!({ "density": to_value(&estimate)? }), warnings, Some(csv)))
}

fn cmd_sampling(
    problem: &Problem,
    seed: Option<u64>,
    family_size: usize,
    max_degree: usize,
    grid_radius: f64,
    grid_step: f64,
) -> Result<CommandOutput, CliError> {
    let seed = seed.ok_or_else(|| CliError::invalid_input("sampling requires --seed"))?;
    let mut warnings = Vec::new();
    ignore_values_warning(problem, &mut warnings);
    if problem.nodes.len() < 2 {
        return Err(CliError::invalid_input("sampling needs at least two nodes"));
    }
    let family = make_test_family(seed, family_size, max_degree);
    let scans = sampling_scan(&problem.nodes, &family, grid_radius, grid_step).map_err(map_core)?;
    let report = report_from_scans(&scans, family.len()).map_err(map_core)?;
    warnings.push(
        "c_estimate bounds the sampling constant over this family only, not over the whole ball"
            .into(),
    );

    let rows = scans
        .iter()
        .enumerate()
        .map(|(i, scan)| {
            let cap = scan.capacity.map(|v| v.to_string()).unwrap_or_default();
            let ratio = scan.sup_ratio.map(|v| v.to_string()).unwrap_or_default();
            let quotient = match (scan.capacity, scan.sup_ratio) {
                (Some(c), Some(r)) if !scan.excluded => (r / c).to_string(),
                _ => String::new(),
            };
            format!("{i},{},{cap},{ratio},{quotient},{}", family[i].degree(), scan.excluded)
        })
        .collect();
    let csv = Csv {
        header: "index,degree,capacity,sup_ratio,quotient,excluded",
        rows,
    };
    let results = json!({
        "sampling": to_value(&report)?,
        "grid_radius_beta": grid_radius,
        "grid_step_beta": grid_step,
        "max_degree": max_degree,
    });
    Ok((results, warnings, Some(csv)))
}

fn cmd_stress(problem: &Problem, eps: f64, c_const: f64) -> Result<CommandOutput, CliError> {
    let mut warnings = Vec::new();
    ignore_values_warning(problem, &mut warnings);
    let cluster = &problem.nodes;
    let stress = necessity_stress(cluster, eps, c_const).map_err(map_core)?;

    // Audit every leave-one-out subproblem against the stressed bound.
    let bound = c_const * eps * (1.0 + 1e-3);
    let mut subsets = Vec::new();
    for drop in 0..cluster.len() {
        let nodes: Vec<DiscPoint> = (0..cluster.len())
            .filter(|&i| i != drop)
            .map(|i| cluster[i])
            .collect();
        let values: Vec<Complex64> = (0..cluster.len())
            .filter(|&i| i != drop)
            .map(|i| stress.values[i])
            .collect();
        if nodes.len() < 2 {
            continue;
        }
        let check = column_condition_check(
            &nodes,
            &values,
            bound,
            PermutationSweep::default_for(nodes.len(), 0),
        )
        .map_err(map_core)?;
        subsets.push(json!({
            "dropped": drop,
            "holds": check.holds,
            "max_modulus": check.max_modulus,
            "permutations_checked": check.permutations_checked,
        }));
    }
    let verdict = solvability(cluster, &stress.values).map_err(map_core)?;

    let rows = stress
        .values
        .iter()
        .enumerate()
        .map(|(i, w)| format!("{i},{},{}", w.re, w.im))
        .collect();
    let csv = Csv {
        header: "index,re,im",
        rows,
    };
    let results = json!({
        "stress": to_value(&stress)?,
        "subset_bound": bound,
        "subsets": subsets,
        "full_verdict": to_value(&verdict)?,
    });
    Ok((results, warnings, Some(csv)))
}

fn cmd_audit(
    problem: &Problem,
    eta1: f64,
    eps: f64,
    grid_radius: f64,
    grid_step: f64,
    boundary_nodes: usize,
) -> Result<CommandOutput, CliError> {
    let values = problem.values_required("audit")?;
    let verdict = solvability(&problem.nodes, values).map_err(map_core)?;
    if verdict.status != Solvability::InfinitelyMany {
        return Err(CliError::refusal(
            format!(
                "cannot build a base interpolant: data classified {}",
                verdict.status.as_str()
            ),
            json!({ "verdict": to_value(&verdict)? }),
        ));
    }
    let chain = schur_solve(&problem.nodes, values, InitialFn::zero()).map_err(map_core)?;
    let grid = AuditGrid {
        radius_beta: grid_radius,
        step_beta: grid_step,
        boundary_nodes,
    };
    let audit = audit_f1_properties(Arc::new(chain.clone()), &problem.nodes, eta1, eps, &grid)
        .map_err(map_core)?;
    let results = json!({
        "verdict": to_value(&verdict)?,
        "f1_chain": to_value(&chain)?,
        "audit": to_value(&audit)?,
        "grid": to_value(&grid)?,
        "eta1": eta1,
        "eps": eps,
    });
    Ok((results, Vec::new(), None))
}
