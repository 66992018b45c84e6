//! Single-site Glauber dynamics with exact mixing diagnostics on small
//! state spaces: trajectories from a counter-based generator, the full
//! transition matrix over the support, worst-start mixing times, spectral
//! gaps, and empirical total-variation estimates.

use serde::Serialize;
use thiserror::Error;

use crate::gibbs::{enumerate_capped, Boundary, GibbsError, GibbsParams, SpinConfig};
use crate::graph::Graph;
use crate::linalg::{jacobi_eigenvalues, DMat};
use crate::rng;

#[derive(Debug, Error)]
pub enum GlauberError {
    #[error(transparent)]
    Gibbs(#[from] GibbsError),
    #[error("support of size {0} exceeds the exact-state cap of {1}")]
    SupportTooLarge(usize, usize),
    #[error("mixing time exceeded the step cap of {0}")]
    MixingCapExceeded(usize),
    #[error("no free vertices to resample")]
    NothingFree,
}

pub const DEFAULT_STATE_CAP: usize = 1 << 16;
const MIXING_STEP_CAP: usize = 1_000_000;

/// Chain state: the full configuration plus the position in the seeded
/// draw stream, so trajectories are reproducible and forkable.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub config: SpinConfig,
    pub step: usize,
    pub seed: u64,
    pub ctr: u64,
}

impl ChainState {
    pub fn new(config: SpinConfig, seed: u64) -> Self {
        ChainState {
            config,
            step: 0,
            seed,
            ctr: 0,
        }
    }
}

/// Deterministic in-support start: all free vertices at -1 (the empty set
/// for hard constraints).
pub fn default_start(g: &Graph, b: &Boundary) -> SpinConfig {
    let mut spins = vec![-1i8; g.vertex_count()];
    for (v, s) in b.pins() {
        spins[*v] = *s;
    }
    SpinConfig::new(spins)
}

/// Conditional probability of spin +1 at `v` given its neighbourhood:
/// lambda beta^k against gamma^(d-k) for k plus-neighbours out of d.
pub fn local_plus_probability(g: &Graph, p: &GibbsParams, spins: &[i8], v: usize) -> f64 {
    let mut plus = 0u32;
    let mut minus = 0u32;
    for &u in g.neighbors(v) {
        if spins[u] == 1 {
            plus += 1;
        } else {
            minus += 1;
        }
    }
    let w_plus = p.lambda * powi0(p.beta, plus);
    let w_minus = powi0(p.gamma, minus);
    w_plus / (w_plus + w_minus)
}

#[inline]
fn powi0(base: f64, e: u32) -> f64 {
    if e == 0 {
        1.0
    } else {
        base.powi(e as i32)
    }
}

/// One Glauber step: resample a uniformly random free vertex from its local
/// conditional. Two counter draws per step.
pub fn glauber_step(
    g: &Graph,
    p: &GibbsParams,
    b: &Boundary,
    state: &ChainState,
) -> Result<ChainState, GlauberError> {
    let free: Vec<usize> = (0..g.vertex_count())
        .filter(|v| b.pin(*v).is_none())
        .collect();
    if free.is_empty() {
        return Err(GlauberError::NothingFree);
    }
    let mut next = state.clone();
    let v = free[rng::below(state.seed, state.ctr, free.len())];
    let u = rng::uniform(state.seed, state.ctr + 1);
    let p_plus = local_plus_probability(g, p, &state.config.spins, v);
    next.config.spins[v] = if u < p_plus { 1 } else { -1 };
    next.ctr += 2;
    next.step += 1;
    Ok(next)
}

/// Runs `steps` Glauber updates from the given state.
pub fn run_chain(
    g: &Graph,
    p: &GibbsParams,
    b: &Boundary,
    start: ChainState,
    steps: usize,
) -> Result<ChainState, GlauberError> {
    let mut state = start;
    for _ in 0..steps {
        state = glauber_step(g, p, b, &state)?;
    }
    Ok(state)
}

/// Exact transition matrix of the dynamics over the enumerated support.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionMatrix {
    /// support configurations, encoded as bitmasks over the free vertices
    /// (ascending); bit i set means free vertex i carries +1
    pub states: Vec<u64>,
    pub free: Vec<usize>,
    pub probs: DMat,
    pub stationary: Vec<f64>,
}

pub fn transition_matrix(
    g: &Graph,
    p: &GibbsParams,
    b: &Boundary,
    cap: usize,
) -> Result<TransitionMatrix, GlauberError> {
    let summary = enumerate_capped(g, p, b, 30)?;
    let free = summary.free.clone();
    let k = free.len();
    let mut spins = vec![-1i8; g.vertex_count()];
    for (v, s) in b.pins() {
        spins[*v] = *s;
    }

    // collect the support and its Gibbs weights
    let mut states: Vec<u64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for mask in 0u64..(1u64 << k) {
        for (i, &v) in free.iter().enumerate() {
            spins[v] = if (mask >> i) & 1 == 1 { 1 } else { -1 };
        }
        let w = crate::gibbs::gibbs_weight(g, p, &SpinConfig::new(spins.clone()));
        if w > 0.0 {
            states.push(mask);
            weights.push(w);
        }
    }
    if states.len() > cap {
        return Err(GlauberError::SupportTooLarge(states.len(), cap));
    }
    let total: f64 = weights.iter().sum();
    let stationary: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let index: std::collections::HashMap<u64, usize> =
        states.iter().enumerate().map(|(i, &m)| (m, i)).collect();

    let s = states.len();
    let mut probs = DMat::zeros(s, s);
    for (si, &mask) in states.iter().enumerate() {
        for (i, &v) in free.iter().enumerate() {
            spins[v] = if (mask >> i) & 1 == 1 { 1 } else { -1 };
        }
        let mut stay = 0.0;
        for (i, &v) in free.iter().enumerate() {
            let p_plus = local_plus_probability(g, p, &spins, v);
            let cur_plus = (mask >> i) & 1 == 1;
            // flip probability at v
            let to_other = if cur_plus { 1.0 - p_plus } else { p_plus };
            let other_mask = mask ^ (1 << i);
            if let Some(&ti) = index.get(&other_mask) {
                probs.set(si, ti, to_other / k as f64);
                stay += (1.0 - to_other) / k as f64;
            } else {
                // flipping v exits the support, so the move never happens
                stay += 1.0 / k as f64;
            }
        }
        probs.set(si, si, stay);
    }
    Ok(TransitionMatrix {
        states,
        free,
        probs,
        stationary,
    })
}

impl TransitionMatrix {
    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.size())
            .map(|r| ((0..self.size()).map(|c| self.probs.get(r, c)).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Max violation of detailed balance pi(i)P(i,j) = pi(j)P(j,i).
    pub fn detailed_balance_error(&self) -> f64 {
        let mut err = 0.0f64;
        for i in 0..self.size() {
            for j in 0..self.size() {
                let a = self.stationary[i] * self.probs.get(i, j);
                let b = self.stationary[j] * self.probs.get(j, i);
                err = err.max((a - b).abs());
            }
        }
        err
    }

    /// All eigenvalues (descending) via the reversible symmetrization
    /// D^{1/2} P D^{-1/2}.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let s = self.size();
        let mut sym = DMat::zeros(s, s);
        for i in 0..s {
            for j in 0..s {
                let scale = (self.stationary[i] / self.stationary[j]).sqrt();
                sym.set(i, j, self.probs.get(i, j) * scale);
            }
        }
        jacobi_eigenvalues(&sym).expect("symmetrized chain eigensolve")
    }

    /// Second-largest eigenvalue and the spectral gap 1 - theta_2.
    pub fn spectral_gap(&self) -> (f64, f64) {
        let eigs = self.eigenvalues();
        let second = if eigs.len() > 1 { eigs[1] } else { 0.0 };
        (second, 1.0 - second)
    }

    /// Distribution after t steps from a point start.
    pub fn distribution_after(&self, start: usize, t: usize) -> Vec<f64> {
        let mut dist = vec![0.0; self.size()];
        dist[start] = 1.0;
        for _ in 0..t {
            dist = self.probs.matvec_t(&dist);
        }
        dist
    }
}

/// Total variation distance between two distributions on the same support.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
}

/// Smallest t at which the worst-start total-variation distance to the
/// stationary distribution drops to the threshold.
pub fn mixing_time_exact(tm: &TransitionMatrix, threshold: f64) -> Result<usize, GlauberError> {
    let s = tm.size();
    let mut power = DMat::identity(s);
    for t in 0..=MIXING_STEP_CAP {
        let worst = (0..s)
            .map(|r| {
                let row: Vec<f64> = (0..s).map(|c| power.get(r, c)).collect();
                total_variation(&row, &tm.stationary)
            })
            .fold(0.0, f64::max);
        if worst <= threshold {
            return Ok(t);
        }
        power = power.matmul(&tm.probs);
    }
    Err(GlauberError::MixingCapExceeded(MIXING_STEP_CAP))
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalTv {
    pub tv: f64,
    /// the exact distance TV(P^t(start,.), pi) for comparison
    pub exact_tv: f64,
    /// additive histogram bias scale: E TV(hat nu, nu) is of this order
    pub histogram_bias: f64,
    pub chains: usize,
    pub steps: usize,
}

/// Runs independent seeded chains and compares the endpoint histogram with
/// the exact stationary distribution.
pub fn empirical_tv(
    g: &Graph,
    p: &GibbsParams,
    b: &Boundary,
    steps: usize,
    chains: usize,
    seed: u64,
) -> Result<EmpiricalTv, GlauberError> {
    let tm = transition_matrix(g, p, b, DEFAULT_STATE_CAP)?;
    let start_cfg = default_start(g, b);
    let start_idx = state_index(&tm, &start_cfg);
    let mut histogram = vec![0.0f64; tm.size()];
    let index: std::collections::HashMap<u64, usize> =
        tm.states.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    for chain in 0..chains {
        let chain_seed = rng::mix(seed, chain as u64);
        let state = run_chain(
            g,
            p,
            b,
            ChainState::new(start_cfg.clone(), chain_seed),
            steps,
        )?;
        let mask = config_mask(&tm.free, &state.config);
        histogram[index[&mask]] += 1.0;
    }
    for h in &mut histogram {
        *h /= chains as f64;
    }
    let tv = total_variation(&histogram, &tm.stationary);
    let after = tm.distribution_after(start_idx, steps);
    let exact_tv = total_variation(&after, &tm.stationary);
    let histogram_bias = 0.5
        * after
            .iter()
            .map(|&q| (q * (1.0 - q) / chains as f64).sqrt())
            .sum::<f64>();
    Ok(EmpiricalTv {
        tv,
        exact_tv,
        histogram_bias,
        chains,
        steps,
    })
}

fn config_mask(free: &[usize], cfg: &SpinConfig) -> u64 {
    let mut mask = 0u64;
    for (i, &v) in free.iter().enumerate() {
        if cfg.spins[v] == 1 {
            mask |= 1 << i;
        }
    }
    mask
}

fn state_index(tm: &TransitionMatrix, cfg: &SpinConfig) -> usize {
    let mask = config_mask(&tm.free, cfg);
    tm.states
        .iter()
        .position(|&m| m == mask)
        .expect("start configuration lies in the support")
}
