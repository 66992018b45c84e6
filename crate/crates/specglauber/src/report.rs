//! Experiment configuration and report emission: cross products of graphs,
//! model parameters, boundaries, and checks, run in parallel and reduced in
//! a deterministic order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus;
use crate::gibbs::{enumerate, Boundary, GibbsParams, ModelTag};
use crate::graph::Graph;
use crate::influence::{seeded_boundaries, verify_bound, BoundId, BoundReport};
use crate::io;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Where the instance graphs come from: corpus selectors or graph files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    Selector(String),
    File(String),
}

/// Which boundaries to sweep per instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySweep {
    /// free boundary only
    None,
    /// every region of size <= depth with every assignment, plus
    /// `extra_random` seeded larger ones
    ExhaustiveToDepth { depth: usize, extra_random: usize },
    /// seeded random boundaries only
    SeededRandom { count: usize },
}

impl Default for BoundarySweep {
    fn default() -> Self {
        BoundarySweep::ExhaustiveToDepth {
            depth: 2,
            extra_random: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub graphs: Vec<GraphSource>,
    pub models: Vec<GibbsParams>,
    #[serde(default)]
    pub boundaries: BoundarySweep,
    pub checks: Vec<BoundId>,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_eps() -> Vec<f64> {
    vec![0.2]
}

/// Pass/fail thresholds; identities are absolute, inequalities relative.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    pub identity: f64,
    pub inequality_rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: crate::influence::IDENTITY_TOL,
            inequality_rtol: crate::influence::INEQUALITY_RTOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceResult {
    pub graph: String,
    pub params: GibbsParams,
    pub boundary: String,
    pub eps: f64,
    pub report: BoundReport,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: String,
    pub seed: u64,
    pub identity_tolerance: f64,
    pub inequality_rtol: f64,
    /// set by the CLI; excluded from determinism comparisons
    pub timestamp: Option<String>,
    pub results: Vec<InstanceResult>,
    pub summary: Summary,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }
}

fn validate_params(p: &GibbsParams) -> Result<(), RunError> {
    let ok = match p.model {
        ModelTag::Ising => p.beta == p.gamma && p.lambda == 1.0 && p.beta > 0.0,
        ModelTag::Hardcore => p.beta == 0.0 && p.gamma == 1.0 && p.lambda > 0.0,
        ModelTag::General => 0.0 <= p.beta && p.beta <= p.gamma && p.gamma > 0.0 && p.lambda > 0.0,
    };
    if ok {
        Ok(())
    } else {
        Err(RunError::Config(format!("inconsistent parameters: {p:?}")))
    }
}

fn load_graph(source: &GraphSource) -> Result<(String, Graph), RunError> {
    match source {
        GraphSource::Selector(sel) => {
            let g = corpus::corpus(sel).map_err(|e| RunError::Config(e.to_string()))?;
            Ok((sel.clone(), g))
        }
        GraphSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| RunError::Io {
                path: path.clone(),
                source: e,
            })?;
            let g = if path.ends_with(".json") {
                io::parse_graph_json(&text).map_err(|e| RunError::Config(e.to_string()))?
            } else {
                io::parse_graph_text(&text).map_err(|e| RunError::Config(e.to_string()))?
            };
            Ok((path.clone(), g))
        }
    }
}

/// Enumerates the boundary sweep for one (graph, params) pair, skipping
/// empty-support assignments.
pub fn boundaries_for(
    g: &Graph,
    p: &GibbsParams,
    sweep: &BoundarySweep,
    seed: u64,
) -> Vec<Boundary> {
    let mut out = vec![Boundary::free()];
    match sweep {
        BoundarySweep::None => {}
        BoundarySweep::SeededRandom { count } => {
            out.extend(seeded_boundaries(g, p, *count, seed));
        }
        BoundarySweep::ExhaustiveToDepth {
            depth,
            extra_random,
        } => {
            let n = g.vertex_count();
            let depth = (*depth).min(n.saturating_sub(2));
            // all regions of size 1..=depth with all assignments
            let mut regions: Vec<Vec<usize>> = Vec::new();
            let mut frontier: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..depth {
                let mut next = Vec::new();
                for r in &frontier {
                    let start = r.last().map_or(0, |&v| v + 1);
                    for v in start..n {
                        let mut r2 = r.clone();
                        r2.push(v);
                        next.push(r2);
                    }
                }
                regions.extend(next.iter().cloned());
                frontier = next;
            }
            for region in regions.iter() {
                let k = region.len();
                for mask in 0u32..(1 << k) {
                    let mut b = Boundary::free();
                    for (i, &v) in region.iter().enumerate() {
                        b.insert(v, if (mask >> i) & 1 == 1 { 1 } else { -1 });
                    }
                    if enumerate(g, p, &b).is_ok() {
                        out.push(b);
                    }
                }
            }
            out.extend(seeded_boundaries(g, p, *extra_random, seed));
        }
    }
    out
}

/// Executes the cross product of the specification. Results are ordered by
/// (graph, model, boundary, check, eps) regardless of scheduling.
pub fn run(spec: &ExperimentSpec) -> Result<Report, RunError> {
    for p in &spec.models {
        validate_params(p)?;
    }
    if spec.checks.is_empty() {
        return Ok(Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: spec.seed,
            identity_tolerance: spec.tolerances.identity,
            inequality_rtol: spec.tolerances.inequality_rtol,
            timestamp: None,
            results: Vec::new(),
            summary: Summary::default(),
        });
    }
    let graphs: Vec<(String, Graph)> = spec
        .graphs
        .iter()
        .map(load_graph)
        .collect::<Result<_, _>>()?;

    // instance tuples in deterministic order
    let mut jobs: Vec<(String, Graph, GibbsParams, Boundary, BoundId, f64)> = Vec::new();
    for (name, g) in &graphs {
        for p in &spec.models {
            for b in boundaries_for(g, p, &spec.boundaries, spec.seed) {
                for &check in &spec.checks {
                    for &eps in &spec.eps {
                        jobs.push((name.clone(), g.clone(), *p, b.clone(), check, eps));
                    }
                }
            }
        }
    }

    let tol = spec.tolerances;
    let results: Vec<InstanceResult> = jobs
        .par_iter()
        .map(|(name, g, p, b, check, eps)| {
            let mut report = match verify_bound(*check, g, p, b, *eps) {
                Ok(rep) => rep,
                Err(e) => BoundReport {
                    bound_id: *check,
                    lhs: f64::NAN,
                    rhs: f64::NAN,
                    pass: true,
                    skip_reason: Some(format!("EVALUATION_ERROR: {e}")),
                    instance_echo: name.clone(),
                },
            };
            if !report.is_skip() {
                // re-judge against the spec's own thresholds
                report.pass = match check {
                    BoundId::Thm11_2 => report.lhs <= tol.identity,
                    _ => report.lhs <= report.rhs * (1.0 + tol.inequality_rtol),
                };
            }
            InstanceResult {
                graph: name.clone(),
                params: *p,
                boundary: io::format_boundary_json(b),
                eps: *eps,
                report,
            }
        })
        .collect();

    let mut summary = Summary::default();
    for r in &results {
        if r.report.is_skip() {
            summary.skip += 1;
        } else if r.report.pass {
            summary.pass += 1;
        } else {
            summary.fail += 1;
        }
    }
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: spec.seed,
        identity_tolerance: tol.identity,
        inequality_rtol: tol.inequality_rtol,
        timestamp: None,
        results,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pass_instance() {
        let spec = ExperimentSpec {
            graphs: vec![GraphSource::Selector("complete(4)".into())],
            models: vec![GibbsParams::ising(0.72)],
            boundaries: BoundarySweep::None,
            checks: vec![BoundId::Thm5_2],
            eps: vec![0.2],
            seed: 1,
            tolerances: Tolerances::default(),
        };
        let rep = run(&spec).unwrap();
        assert_eq!(rep.summary.pass, 1);
        assert_eq!(rep.summary.fail, 0);
    }

    #[test]
    fn reducible_h_skips() {
        let spec = ExperimentSpec {
            graphs: vec![GraphSource::Selector("cycle(4)".into())],
            models: vec![GibbsParams::ising(0.9)],
            boundaries: BoundarySweep::None,
            checks: vec![BoundId::Thm5_3],
            eps: vec![0.2],
            seed: 1,
            tolerances: Tolerances::default(),
        };
        let rep = run(&spec).unwrap();
        assert_eq!(rep.summary.skip, 1);
        assert!(rep.results[0]
            .report
            .skip_reason
            .as_deref()
            .unwrap()
            .contains("reducible"));
    }

    #[test]
    fn empty_checks_empty_report() {
        let spec = ExperimentSpec {
            graphs: vec![GraphSource::Selector("petersen".into())],
            models: vec![GibbsParams::hardcore(0.5)],
            boundaries: BoundarySweep::None,
            checks: vec![],
            eps: vec![],
            seed: 0,
            tolerances: Tolerances::default(),
        };
        let rep = run(&spec).unwrap();
        assert!(rep.results.is_empty());
        assert_eq!(rep.summary.pass + rep.summary.fail + rep.summary.skip, 0);
    }

    #[test]
    fn reports_deterministic_under_seed() {
        let spec = ExperimentSpec {
            graphs: vec![GraphSource::Selector("complete(4)".into())],
            models: vec![GibbsParams::hardcore(0.4)],
            boundaries: BoundarySweep::SeededRandom { count: 5 },
            checks: vec![BoundId::Thm8_1],
            eps: vec![0.2],
            seed: 42,
            tolerances: Tolerances::default(),
        };
        let a = serde_json::to_string(&run(&spec).unwrap()).unwrap();
        let b = serde_json::to_string(&run(&spec).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_config_is_an_error() {
        let spec = ExperimentSpec {
            graphs: vec![GraphSource::Selector("frobnicate(1)".into())],
            models: vec![GibbsParams::hardcore(0.5)],
            boundaries: BoundarySweep::None,
            checks: vec![BoundId::Thm8_1],
            eps: vec![0.2],
            seed: 0,
            tolerances: Tolerances::default(),
        };
        assert!(matches!(run(&spec), Err(RunError::Config(_))));
    }

    #[test]
    fn exhaustive_boundaries_include_all_small_regions() {
        let g = corpus::path(4);
        let p = GibbsParams::ising(0.8);
        let sweep = BoundarySweep::ExhaustiveToDepth {
            depth: 2,
            extra_random: 0,
        };
        let bs = boundaries_for(&g, &p, &sweep, 0);
        // 1 free + 4*2 singletons + C(4,2)*4 pairs = 33
        assert_eq!(bs.len(), 1 + 8 + 24);
    }

    #[test]
    fn tolerance_overrides_change_the_verdict() {
        // an absurdly strict relative tolerance flips a passing bound
        let mut spec = ExperimentSpec {
            graphs: vec![GraphSource::Selector("complete(4)".into())],
            models: vec![GibbsParams::ising(0.72)],
            boundaries: BoundarySweep::None,
            checks: vec![BoundId::Thm5_2],
            eps: vec![0.2],
            seed: 1,
            tolerances: Tolerances::default(),
        };
        let rep = run(&spec).unwrap();
        assert_eq!(rep.summary.pass, 1);
        // rhs is 5 and lhs ~ 1.1; demanding lhs <= rhs*(1-0.9) fails it
        spec.tolerances.inequality_rtol = -0.9;
        let rep = run(&spec).unwrap();
        assert_eq!(rep.summary.fail, 1);
        assert_eq!(rep.exit_code(), 1);
    }
}
