//! Command-line front end: spectral diagnostics, influence matrices, bound
//! verification, Glauber dynamics, potential certificates, experiment
//! reports, and corpus graph emission.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use specglauber::gibbs::{self, Boundary, GibbsParams};
use specglauber::glauber;
use specglauber::graph::Graph;
use specglauber::influence::{self, BoundId};
use specglauber::io as gio;
use specglauber::recursion;
use specglauber::report::{self, ExperimentSpec};
use specglauber::spectral;
use specglauber::{corpus, labeled::LabeledMatrix};

#[derive(Parser)]
#[command(
    name = "specglauber",
    about = "Spectral diagnostics and Glauber dynamics for two-spin Gibbs distributions on small graphs",
    version
)]
struct Cli {
    /// seed for all randomized sweeps
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// eigensolver tolerance
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// worker threads (default: SPECGLAUBER_THREADS or all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// free-vertex cap for exact enumerations
    #[arg(long, global = true, default_value_t = specglauber::gibbs::DEFAULT_ENUMERATION_CAP)]
    enum_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct GraphArgs {
    /// graph file (text "n m" + edges, or .json)
    #[arg(long, conflicts_with = "selector")]
    graph: Option<String>,
    /// corpus selector like "grid(3,3)" or "petersen"
    #[arg(long)]
    selector: Option<String>,
}

impl GraphArgs {
    fn load(&self) -> Result<Graph, String> {
        match (&self.graph, &self.selector) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
                if path.ends_with(".json") {
                    gio::parse_graph_json(&text).map_err(|e| e.to_string())
                } else {
                    gio::parse_graph_text(&text).map_err(|e| e.to_string())
                }
            }
            (None, Some(sel)) => corpus::corpus(sel).map_err(|e| e.to_string()),
            _ => Err("exactly one of --graph or --selector is required".into()),
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    /// edge weight for ++ edges (ising: the coupling)
    #[arg(long)]
    beta: Option<f64>,
    /// edge weight for -- edges
    #[arg(long)]
    gamma: Option<f64>,
    /// external field / fugacity
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Ising,
    Hardcore,
    General,
}

impl ModelArgs {
    fn params(&self) -> Result<GibbsParams, String> {
        match self.model {
            ModelKind::Ising => {
                let beta = self.beta.ok_or("ising requires --beta")?;
                Ok(GibbsParams::ising(beta))
            }
            ModelKind::Hardcore => {
                let lambda = self.lambda.ok_or("hardcore requires --lambda")?;
                Ok(GibbsParams::hardcore(lambda))
            }
            ModelKind::General => {
                let beta = self.beta.ok_or("general requires --beta")?;
                let gamma = self.gamma.ok_or("general requires --gamma")?;
                let lambda = self.lambda.ok_or("general requires --lambda")?;
                GibbsParams::general(beta, gamma, lambda).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Args)]
struct BoundaryArg {
    /// boundary JSON file: {"pins": {"3": 1, "7": -1}}
    #[arg(long)]
    boundary: Option<String>,
}

impl BoundaryArg {
    fn load(&self) -> Result<Boundary, String> {
        match &self.boundary {
            None => Ok(Boundary::free()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
                gio::parse_boundary_json(&text).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Adjacency and non-backtracking spectra with normality diagnostics
    Spectra {
        #[command(flatten)]
        graph: GraphArgs,
        /// exact walk-symmetry check depth
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        /// planar/genus radius bound to report (Euler genus)
        #[arg(long)]
        genus: Option<usize>,
    },
    /// Pairwise influence matrix by enumeration, walk trees, or both
    Influence {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        boundary: BoundaryArg,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Verify a spectral bound or identity on an instance
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        boundary: BoundaryArg,
        #[arg(long, value_enum)]
        bound: BoundId,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
    },
    /// Glauber dynamics: trajectories, exact gap, mixing time, TV curve
    Glauber {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        boundary: BoundaryArg,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1000)]
        chains: usize,
        #[arg(long, value_enum, default_value_t = ExactMode::Gap)]
        exact: ExactMode,
    },
    /// Hard-core potential certificate at a fugacity
    Potential {
        #[command(flatten)]
        model: ModelArgs,
        /// maximum degree swept in the contraction check
        #[arg(long, default_value_t = 5)]
        delta_max: usize,
        /// grid points per degree
        #[arg(long, default_value_t = 4096)]
        grid: usize,
    },
    /// Run an experiment specification (JSON) and emit the report
    Report {
        /// experiment spec file
        #[arg(long)]
        config: String,
    },
    /// Emit a corpus graph
    Corpus {
        #[arg(long)]
        selector: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Saw,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExactMode {
    Gap,
    Tmix,
    None,
}

fn emit(cli_out: &Option<String>, text: &str) -> Result<(), String> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match cli_out {
        Some(path) => std::fs::write(path, &body).map_err(|e| e.to_string()),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

fn json_to_csv(value: &serde_json::Value) -> String {
    // lossy flat projection for tables
    let mut rows = Vec::new();
    flatten_json("", value, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

fn flatten_json(prefix: &str, value: &serde_json::Value, rows: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_json(&key, v, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_json(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn matrix_output(m: &LabeledMatrix, format: Format) -> String {
    match format {
        Format::Json => m.to_json(),
        Format::Csv => m.to_csv(),
    }
}

fn value_output(v: serde_json::Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&v).expect("serializable"),
        Format::Csv => json_to_csv(&v),
    }
}

fn run_cli(cli: &Cli) -> Result<i32, String> {
    match &cli.command {
        Command::Spectra {
            graph,
            k_max,
            genus,
        } => {
            let g = graph.load()?;
            let a = spectral::adjacency_matrix(&g);
            let rho_a = spectral::perron(&a, cli.tol).map_err(|e| e.to_string())?;
            let irreducible = spectral::hashimoto_irreducible(&g);
            let mut out = serde_json::json!({
                "n": g.vertex_count(),
                "m": g.edge_count(),
                "max_degree": g.max_degree(),
                "connected": g.is_connected(),
                "rho_adjacency": rho_a.radius,
                "adjacency_residual": rho_a.residual,
                "hashimoto_irreducible": irreducible,
                "walk_symmetry_exact": spectral::check_pt_invariance(&g, *k_max),
                "planar_radius_bound": spectral::planar_rho_bound(g.max_degree()),
            });
            if let Some(gen) = genus {
                out["genus_radius_bound"] =
                    serde_json::json!(spectral::genus_rho_bound(g.max_degree(), *gen));
            }
            if irreducible {
                let h = spectral::hashimoto_matrix(&g);
                let rho_h = spectral::perron(&h, cli.tol).map_err(|e| e.to_string())?;
                out["rho_hashimoto"] = serde_json::json!(rho_h.radius);
                out["weak_normality"] = serde_json::json!(
                    spectral::weak_normality(&g, cli.tol).map_err(|e| e.to_string())?
                );
                let rel = spectral::check_eigenvector_relations(&g, cli.tol)
                    .map_err(|e| e.to_string())?;
                out["eigenvector_reversal_violation"] = serde_json::json!(rel.reversal_violation);
                out["eigenvector_sum_violation"] = serde_json::json!(rel.sum_violation);
                let bt = spectral::backtrack_bound(&g, 4 * g.edge_count().max(4))
                    .map_err(|e| e.to_string())?;
                out["backtrack_min_slack"] = serde_json::json!(bt.min_slack);
                out["backtrack_max_return_length"] = serde_json::json!(bt.max_return_length);
            }
            emit(&cli.out, &value_output(out, cli.format))?;
            Ok(0)
        }
        Command::Influence {
            graph,
            model,
            boundary,
            method,
        } => {
            let g = graph.load()?;
            let p = model.params()?;
            let b = boundary.load()?;
            match method {
                Method::Exact => {
                    let m = gibbs::influence_matrix_exact(&g, &p, &b).map_err(|e| e.to_string())?;
                    emit(&cli.out, &matrix_output(&m, cli.format))?;
                }
                Method::Saw => {
                    let m = influence::influence_saw(&g, &p, &b).map_err(|e| e.to_string())?;
                    emit(&cli.out, &matrix_output(&m, cli.format))?;
                }
                Method::Both => {
                    let exact =
                        gibbs::influence_matrix_exact(&g, &p, &b).map_err(|e| e.to_string())?;
                    let saw = influence::influence_saw(&g, &p, &b).map_err(|e| e.to_string())?;
                    let residual = exact.max_abs_diff(&saw);
                    let body = serde_json::json!({
                        "matrix": serde_json::from_str::<serde_json::Value>(&exact.to_json())
                            .expect("valid json"),
                        "residual": residual,
                    });
                    emit(&cli.out, &value_output(body, cli.format))?;
                }
            }
            Ok(0)
        }
        Command::Verify {
            graph,
            model,
            boundary,
            bound,
            eps,
        } => {
            let g = graph.load()?;
            let p = model.params()?;
            let b = boundary.load()?;
            let rep =
                influence::verify_bound(*bound, &g, &p, &b, *eps).map_err(|e| e.to_string())?;
            let code = if rep.is_skip() || rep.pass { 0 } else { 1 };
            let body = serde_json::to_value(&rep).expect("serializable");
            emit(&cli.out, &value_output(body, cli.format))?;
            Ok(code)
        }
        Command::Glauber {
            graph,
            model,
            boundary,
            steps,
            chains,
            exact,
        } => {
            let g = graph.load()?;
            let p = model.params()?;
            let b = boundary.load()?;
            let mut body = serde_json::json!({
                "steps": steps,
                "chains": chains,
                "seed": cli.seed,
            });
            // geometric checkpoints for the TV curve
            let mut ts = vec![0usize];
            let mut t = 1usize;
            while t < *steps {
                ts.push(t);
                t *= 2;
            }
            ts.push(*steps);
            ts.dedup();
            let mut curve = Vec::new();
            for &t in &ts {
                let point = glauber::empirical_tv(&g, &p, &b, t, *chains, cli.seed)
                    .map_err(|e| e.to_string())?;
                curve.push(serde_json::json!({
                    "t": t,
                    "tv": point.tv,
                    "exact_tv": point.exact_tv,
                }));
            }
            body["tv_curve"] = serde_json::json!(curve);
            match exact {
                ExactMode::None => {}
                ExactMode::Gap | ExactMode::Tmix => {
                    let tm = glauber::transition_matrix(&g, &p, &b, glauber::DEFAULT_STATE_CAP)
                        .map_err(|e| e.to_string())?;
                    let (second, gap) = tm.spectral_gap();
                    body["second_eig"] = serde_json::json!(second);
                    body["gap"] = serde_json::json!(gap);
                    body["detailed_balance_error"] = serde_json::json!(tm.detailed_balance_error());
                    if *exact == ExactMode::Tmix {
                        body["tmix"] = serde_json::json!(
                            glauber::mixing_time_exact(&tm, 0.25).map_err(|e| e.to_string())?
                        );
                    }
                }
            }
            emit(&cli.out, &value_output(body, cli.format))?;
            Ok(0)
        }
        Command::Potential {
            model,
            delta_max,
            grid,
        } => {
            let p = model.params()?;
            let pp = recursion::hc_potential_params(p.lambda).map_err(|e| e.to_string())?;
            let spec = recursion::GridSpec {
                max_degree: *delta_max,
                points: *grid,
                ..recursion::GridSpec::default()
            };
            let rep = recursion::verify_potential(&p, &pp, &spec).map_err(|e| e.to_string())?;
            let body = serde_json::json!({
                "s0": rep.s,
                "delta0": rep.delta,
                "c0": rep.c,
                "contraction_slack": rep.contraction_slack,
                "boundedness_slack": rep.boundedness_slack,
                "multivariate_slack": rep.multivariate_slack,
                "pass": rep.pass,
                "witness": rep.witness,
            });
            emit(&cli.out, &value_output(body, cli.format))?;
            Ok(if rep.pass { 0 } else { 1 })
        }
        Command::Report { config } => {
            let text = std::fs::read_to_string(config).map_err(|e| e.to_string())?;
            let mut spec: ExperimentSpec =
                serde_json::from_str(&text).map_err(|e| format!("bad config: {e}"))?;
            if spec.seed == 0 {
                spec.seed = cli.seed;
            }
            let mut rep = report::run(&spec).map_err(|e| e.to_string())?;
            rep.timestamp = Some(format!(
                "{}",
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            ));
            let code = rep.exit_code();
            let body = serde_json::to_value(&rep).expect("serializable");
            emit(&cli.out, &value_output(body, cli.format))?;
            Ok(code)
        }
        Command::Corpus { selector } => {
            let g = corpus::corpus(selector).map_err(|e| e.to_string())?;
            let text = match cli.format {
                Format::Json => gio::format_graph_json(&g),
                Format::Csv => gio::format_graph_text(&g),
            };
            emit(&cli.out, &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("SPECGLAUBER_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        if t > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global();
        }
    }
    specglauber::gibbs::set_enumeration_cap(cli.enum_cap);
    match run_cli(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
