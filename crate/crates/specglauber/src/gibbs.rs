//! Exact two-spin Gibbs distributions on small graphs by enumeration:
//! partition functions, marginals, pairwise influence matrices, and the
//! split-vertex extended influence machinery.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{pair_extension, vertex_extension, ExtVertex, Graph, OrientedEdge};
use crate::labeled::{Label, LabeledMatrix};

#[derive(Debug, Error)]
pub enum GibbsError {
    #[error("conditioned distribution has empty support (Z = 0)")]
    EmptySupport,
    #[error("{free} free vertices exceed the enumeration cap of {cap}")]
    TooManyFreeVertices { free: usize, cap: usize },
    #[error("degenerate marginal at vertex {vertex}: mu(+1) = {plus_prob}")]
    DegenerateMarginal { vertex: usize, plus_prob: f64 },
    #[error("boundary pins vertex {0} outside the graph")]
    PinOutOfRange(usize),
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

/// Which model regime a parameter triple belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Ising,
    Hardcore,
    General,
}

/// The triple (beta, gamma, lambda). Edge interactions pay `beta` per ++
/// edge and `gamma` per -- edge; `lambda` is the external field on +1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsParams {
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub model: ModelTag,
}

impl GibbsParams {
    /// Zero-field Ising: beta = gamma, lambda = 1.
    pub fn ising(beta: f64) -> Self {
        GibbsParams {
            beta,
            gamma: beta,
            lambda: 1.0,
            model: ModelTag::Ising,
        }
    }

    /// Hard-core with fugacity lambda: beta = 0, gamma = 1.
    pub fn hardcore(lambda: f64) -> Self {
        GibbsParams {
            beta: 0.0,
            gamma: 1.0,
            lambda,
            model: ModelTag::Hardcore,
        }
    }

    /// General triple in the regime 0 <= beta <= gamma, gamma > 0, lambda > 0.
    pub fn general(beta: f64, gamma: f64, lambda: f64) -> Result<Self, GibbsError> {
        if !(0.0 <= beta && beta <= gamma && gamma > 0.0 && lambda > 0.0) {
            return Err(GibbsError::BadParams(format!(
                "need 0 <= beta <= gamma, gamma > 0, lambda > 0; got ({beta}, {gamma}, {lambda})"
            )));
        }
        Ok(GibbsParams {
            beta,
            gamma,
            lambda,
            model: ModelTag::General,
        })
    }

    pub fn is_antiferromagnetic(&self) -> bool {
        self.beta * self.gamma < 1.0
    }

    pub fn is_ferromagnetic(&self) -> bool {
        self.beta * self.gamma > 1.0
    }

    /// Hard constraints are present exactly when beta = 0.
    pub fn has_hard_constraint(&self) -> bool {
        self.beta == 0.0
    }
}

/// A pinned-spin region: the set Lambda with its assignment tau.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Boundary {
    pins: BTreeMap<usize, i8>,
}

impl Boundary {
    pub fn free() -> Self {
        Boundary::default()
    }

    pub fn from_pins(pins: &[(usize, i8)]) -> Self {
        Boundary {
            pins: pins
                .iter()
                .map(|&(v, s)| (v, if s >= 0 { 1 } else { -1 }))
                .collect(),
        }
    }

    pub fn pin(&self, v: usize) -> Option<i8> {
        self.pins.get(&v).copied()
    }

    pub fn region(&self) -> impl Iterator<Item = usize> + '_ {
        self.pins.keys().copied()
    }

    pub fn pins(&self) -> &BTreeMap<usize, i8> {
        &self.pins
    }

    pub fn len(&self) -> usize {
        self.pins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pins.is_empty()
    }

    pub fn insert(&mut self, v: usize, spin: i8) {
        self.pins.insert(v, if spin >= 0 { 1 } else { -1 });
    }
}

/// Total spin assignment on all vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfig {
    pub spins: Vec<i8>,
}

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Self {
        assert!(spins.iter().all(|&s| s == 1 || s == -1));
        SpinConfig { spins }
    }
}

pub const DEFAULT_ENUMERATION_CAP: usize = 22;

static ENUMERATION_CAP: std::sync::atomic::AtomicUsize =
    std::sync::atomic::AtomicUsize::new(DEFAULT_ENUMERATION_CAP);

/// Process-wide override for the free-vertex enumeration cap (the CLI knob).
pub fn set_enumeration_cap(cap: usize) {
    ENUMERATION_CAP.store(cap.max(1), std::sync::atomic::Ordering::Relaxed);
}

pub fn enumeration_cap() -> usize {
    ENUMERATION_CAP.load(std::sync::atomic::Ordering::Relaxed)
}

/// Weight of a single configuration per the Gibbs specification, with the
/// 0^0 = 1 convention so hard-core weights vanish exactly on non-independent
/// sets.
pub fn gibbs_weight(g: &Graph, p: &GibbsParams, sigma: &SpinConfig) -> f64 {
    assert_eq!(sigma.spins.len(), g.vertex_count());
    let mut plus = 0u32;
    for &s in &sigma.spins {
        if s == 1 {
            plus += 1;
        }
    }
    let mut pp = 0u32;
    let mut mm = 0u32;
    for &(u, v) in g.edges() {
        match (sigma.spins[u], sigma.spins[v]) {
            (1, 1) => pp += 1,
            (-1, -1) => mm += 1,
            _ => {}
        }
    }
    powi0(p.lambda, plus) * powi0(p.beta, pp) * powi0(p.gamma, mm)
}

#[inline]
fn powi0(base: f64, e: u32) -> f64 {
    if e == 0 {
        1.0
    } else {
        base.powi(e as i32)
    }
}

/// One full enumeration pass: rescaled partition sum plus per-vertex and
/// per-pair "+1" mass, enough for marginals and the influence matrix.
#[derive(Debug, Clone)]
pub struct ExactSummary {
    pub free: Vec<usize>,
    /// rescaled partition sum
    pub z: f64,
    /// natural log of the rescale factor, so log Z = log_shift + ln(z)
    pub log_shift: f64,
    /// `single[i]`: mass with free vertex i at +1
    pub single: Vec<f64>,
    /// `pair[i][j]` for i < j: mass with free vertices i and j both +1
    pub pair: Vec<f64>,
}

impl ExactSummary {
    #[inline]
    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        i * self.free.len() + j
    }

    pub fn log_z(&self) -> f64 {
        self.log_shift + self.z.ln()
    }

    /// P(free vertex at position i is +1).
    pub fn marginal_plus(&self, i: usize) -> f64 {
        self.single[i] / self.z
    }

    pub fn pair_plus(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.marginal_plus(i)
        } else {
            let (a, b) = (i.min(j), i.max(j));
            self.pair[self.pair_index(a, b)] / self.z
        }
    }
}

/// Enumerates all completions of the boundary and accumulates the summary.
/// Weights are evaluated in log space and rescaled once per instance so
/// extreme parameters cannot overflow.
pub fn enumerate(g: &Graph, p: &GibbsParams, b: &Boundary) -> Result<ExactSummary, GibbsError> {
    enumerate_capped(g, p, b, enumeration_cap())
}

pub fn enumerate_capped(
    g: &Graph,
    p: &GibbsParams,
    b: &Boundary,
    cap: usize,
) -> Result<ExactSummary, GibbsError> {
    let n = g.vertex_count();
    for v in b.region() {
        if v >= n {
            return Err(GibbsError::PinOutOfRange(v));
        }
    }
    let free: Vec<usize> = (0..n).filter(|v| b.pin(*v).is_none()).collect();
    let k = free.len();
    if k > cap {
        return Err(GibbsError::TooManyFreeVertices { free: k, cap });
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in free.iter().enumerate() {
        pos[v] = i;
    }

    // single analytic rescale bound: |log w| <= n|log lambda| + m*max|log beta/gamma|
    let log_beta = if p.beta > 0.0 { p.beta.ln().abs() } else { 0.0 };
    let log_gamma = p.gamma.ln().abs();
    let shift = n as f64 * p.lambda.ln().abs() + g.edge_count() as f64 * log_beta.max(log_gamma);

    let mut z = 0.0f64;
    let mut single = vec![0.0f64; k];
    let mut pair = vec![0.0f64; k * k];
    let mut spins = vec![-1i8; n];
    for (v, s) in b.pins() {
        spins[*v] = *s;
    }
    let mut plus_list: Vec<usize> = Vec::with_capacity(k);

    for mask in 0u64..(1u64 << k) {
        for (i, &v) in free.iter().enumerate() {
            spins[v] = if (mask >> i) & 1 == 1 { 1 } else { -1 };
        }
        // log weight; hard constraints short-circuit to zero weight
        let mut logw = 0.0f64;
        let mut dead = false;
        let mut plus = 0u32;
        for &s in &spins {
            if s == 1 {
                plus += 1;
            }
        }
        logw += plus as f64 * p.lambda.ln();
        for &(u, v) in g.edges() {
            match (spins[u], spins[v]) {
                (1, 1) => {
                    if p.beta == 0.0 {
                        dead = true;
                        break;
                    }
                    logw += p.beta.ln();
                }
                (-1, -1) => logw += p.gamma.ln(),
                _ => {}
            }
        }
        if dead {
            continue;
        }
        let w = (logw - shift).exp();
        z += w;
        plus_list.clear();
        for (i, &v) in free.iter().enumerate() {
            if spins[v] == 1 {
                plus_list.push(i);
                single[i] += w;
            }
        }
        for (a, &i) in plus_list.iter().enumerate() {
            for &j in &plus_list[a + 1..] {
                pair[i * k + j] += w;
            }
        }
    }
    if z <= 0.0 {
        return Err(GibbsError::EmptySupport);
    }
    Ok(ExactSummary {
        free,
        z,
        log_shift: shift,
        single,
        pair,
    })
}

/// Partition function (as log) and per-vertex +1 marginals for the
/// conditioned distribution.
#[derive(Debug, Clone, Serialize)]
pub struct Marginals {
    pub log_z: f64,
    pub z: f64,
    pub marginals: BTreeMap<usize, f64>,
}

pub fn partition_and_marginals(
    g: &Graph,
    p: &GibbsParams,
    b: &Boundary,
) -> Result<Marginals, GibbsError> {
    let s = enumerate(g, p, b)?;
    let marginals = s
        .free
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, s.marginal_plus(i)))
        .collect();
    Ok(Marginals {
        log_z: s.log_z(),
        z: s.log_z().exp(),
        marginals,
    })
}

/// Tolerance below which a conditioning event is treated as impossible.
const DEGENERATE_EPS: f64 = 1e-13;

/// The pairwise influence matrix by direct enumeration.
///
/// Entry (w,u) is the difference of u's +1 marginal under pinning w to +1
/// versus -1; the diagonal is 1 by convention, and entries whose
/// conditioning event has probability zero are set to 0.
pub fn influence_matrix_exact(
    g: &Graph,
    p: &GibbsParams,
    b: &Boundary,
) -> Result<LabeledMatrix, GibbsError> {
    let s = enumerate(g, p, b)?;
    let k = s.free.len();
    let labels: Vec<Label> = s.free.iter().map(|&v| Label::Vertex(v)).collect();
    let mut m = LabeledMatrix::zeros(labels.clone(), labels);
    for wi in 0..k {
        for ui in 0..k {
            if wi == ui {
                m.set_idx(wi, ui, 1.0);
                continue;
            }
            let pw = s.single[wi];
            let pw_minus = s.z - s.single[wi];
            if pw <= DEGENERATE_EPS * s.z || pw_minus <= DEGENERATE_EPS * s.z {
                m.set_idx(wi, ui, 0.0);
                continue;
            }
            let joint = s.pair_plus(wi, ui) * s.z;
            let cond_plus = joint / pw;
            let cond_minus = (s.single[ui] - joint) / pw_minus;
            m.set_idx(wi, ui, cond_plus - cond_minus);
        }
    }
    Ok(m)
}

/// Vertices of V \ Lambda whose marginal is degenerate (0 or 1) under the
/// boundary; these are the zero rows/columns of the influence matrix.
pub fn degenerate_vertices(s: &ExactSummary) -> Vec<usize> {
    s.free
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let mp = s.marginal_plus(*i);
            mp <= DEGENERATE_EPS || mp >= 1.0 - DEGENERATE_EPS
        })
        .map(|(_, &v)| v)
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetrizeReport {
    pub max_asymmetry: f64,
    pub spectral_radius: f64,
    pub degenerate: Vec<usize>,
}

/// Conjugates the influence matrix by the diagonal of sqrt(mu_v(+) mu_v(-))
/// and reports the residual asymmetry together with the spectral radius
/// read off the symmetrised form.
///
/// Degenerate vertices make the scaling singular; they are split off first
/// (their rows and columns of the influence matrix vanish off-diagonal, so
/// they contribute eigenvalue 1 exactly) and reported.
pub fn symmetrize_check(
    g: &Graph,
    p: &GibbsParams,
    b: &Boundary,
) -> Result<SymmetrizeReport, GibbsError> {
    let s = enumerate(g, p, b)?;
    let inf = influence_matrix_exact(g, p, b)?;
    symmetrize_from_parts(&s, &inf)
}

pub(crate) fn symmetrize_from_parts(
    s: &ExactSummary,
    inf: &LabeledMatrix,
) -> Result<SymmetrizeReport, GibbsError> {
    let degenerate = degenerate_vertices(s);
    let keep: Vec<usize> = (0..s.free.len())
        .filter(|i| !degenerate.contains(&s.free[*i]))
        .collect();
    let kn = keep.len();
    // conjugate so that the covariance identity
    // var(w) I(w,u) = var(u) I(u,w) lands on a symmetric matrix:
    // entry (w,u) becomes I(w,u) sqrt(var(w)/var(u)) = cov(w,u)/sqrt(var(w) var(u))
    let mut x = crate::linalg::DMat::zeros(kn, kn);
    for (r, &i) in keep.iter().enumerate() {
        let mi = (s.marginal_plus(i) * (1.0 - s.marginal_plus(i))).sqrt();
        for (c, &j) in keep.iter().enumerate() {
            let mj = (s.marginal_plus(j) * (1.0 - s.marginal_plus(j))).sqrt();
            x.set(r, c, inf.get_idx(i, j) * mi / mj);
        }
    }
    let mut asym = 0.0f64;
    for r in 0..kn {
        for c in (r + 1)..kn {
            asym = asym.max((x.get(r, c) - x.get(c, r)).abs());
        }
    }
    let eigs = crate::linalg::jacobi_eigenvalues(&x).map_err(|e| {
        GibbsError::BadParams(format!("eigensolve failed on symmetrized influence: {e}"))
    })?;
    let mut rho = eigs.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if !degenerate.is_empty() {
        rho = rho.max(1.0);
    }
    Ok(SymmetrizeReport {
        max_asymmetry: asym,
        spectral_radius: rho,
        degenerate,
    })
}

/// The largest b such that every conditional marginal in the support is at
/// least b, swept over boundaries. Exhaustive up to `exhaustive_cap`
/// vertices; above that, a seeded sample of boundaries.
pub fn marginal_boundedness(g: &Graph, p: &GibbsParams) -> f64 {
    marginal_boundedness_with(g, p, 10, 1000, 0x5bd1e995)
}

pub fn marginal_boundedness_with(
    g: &Graph,
    p: &GibbsParams,
    exhaustive_cap: usize,
    samples: usize,
    seed: u64,
) -> f64 {
    let n = g.vertex_count();
    let mut best = f64::INFINITY;
    let mut consider = |b: &Boundary| {
        if let Ok(s) = enumerate(g, p, b) {
            for i in 0..s.free.len() {
                let mp = s.marginal_plus(i);
                if mp > DEGENERATE_EPS {
                    best = best.min(mp);
                }
                let mm = 1.0 - mp;
                if mm > DEGENERATE_EPS {
                    best = best.min(mm);
                }
            }
        }
    };
    if n <= exhaustive_cap {
        // trit sweep: 0 free, 1 pinned +, 2 pinned -
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut b = Boundary::free();
            let mut free_count = 0;
            for v in 0..n {
                match c % 3 {
                    0 => free_count += 1,
                    1 => b.insert(v, 1),
                    _ => b.insert(v, -1),
                }
                c /= 3;
            }
            if free_count == 0 {
                continue;
            }
            consider(&b);
        }
    } else {
        let mut ctr = 0u64;
        for _ in 0..samples {
            let mut b = Boundary::free();
            for v in 0..n {
                let r = crate::rng::mix(seed, ctr);
                ctr += 1;
                match r % 3 {
                    0 => {}
                    1 => b.insert(v, 1),
                    _ => b.insert(v, -1),
                }
            }
            if b.len() == n {
                continue;
            }
            consider(&b);
        }
    }
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

/// Checks total connectivity: for every nonempty boundary region the
/// support of the conditioned distribution is connected under single-spin
/// flips. Exhaustive sweep, capped.
pub fn total_connectivity_check(g: &Graph, p: &GibbsParams, cap: usize) -> bool {
    let n = g.vertex_count();
    if n > cap {
        return soft_constraint(p);
    }
    if soft_constraint(p) {
        return true;
    }
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut b = Boundary::free();
        for v in 0..n {
            match c % 3 {
                0 => {}
                1 => b.insert(v, 1),
                _ => b.insert(v, -1),
            }
            c /= 3;
        }
        if b.is_empty() || b.len() == n {
            continue;
        }
        if !support_connected(g, p, &b) {
            return false;
        }
    }
    true
}

fn soft_constraint(p: &GibbsParams) -> bool {
    p.beta > 0.0 && p.gamma > 0.0
}

fn support_connected(g: &Graph, p: &GibbsParams, b: &Boundary) -> bool {
    let n = g.vertex_count();
    let free: Vec<usize> = (0..n).filter(|v| b.pin(*v).is_none()).collect();
    let k = free.len();
    let mut spins = vec![-1i8; n];
    for (v, s) in b.pins() {
        spins[*v] = *s;
    }
    let mut in_support = vec![false; 1 << k];
    let mut support: Vec<usize> = Vec::new();
    for mask in 0usize..(1 << k) {
        for (i, &v) in free.iter().enumerate() {
            spins[v] = if (mask >> i) & 1 == 1 { 1 } else { -1 };
        }
        if gibbs_weight(g, p, &SpinConfig::new(spins.clone())) > 0.0 {
            in_support[mask] = true;
            support.push(mask);
        }
    }
    let Some(&start) = support.first() else {
        return true; // empty support is vacuously connected
    };
    let mut seen = vec![false; 1 << k];
    let mut stack = vec![start];
    seen[start] = true;
    let mut reached = 1;
    while let Some(mask) = stack.pop() {
        for i in 0..k {
            let next = mask ^ (1 << i);
            if in_support[next] && !seen[next] {
                seen[next] = true;
                reached += 1;
                stack.push(next);
            }
        }
    }
    reached == support.len()
}

/// Conditioned measure with hard constraints eliminated first: a pinned
/// occupied vertex deletes itself and its neighbours, a pinned empty vertex
/// deletes itself, and the remaining graph is enumerated free of pins.
///
/// For hard-core parameters this reproduces the conditional distribution on
/// every component separately, which keeps marginals well-defined even when
/// order-pins in remote components of a split graph contradict each other.
struct ReducedMeasure {
    summary: ExactSummary,
    /// original id -> free index in the summary, for surviving vertices
    pos: BTreeMap<usize, usize>,
    /// original id -> deterministic spin for pinned or eliminated vertices
    forced: BTreeMap<usize, i8>,
}

impl ReducedMeasure {
    fn build(g: &Graph, p: &GibbsParams, b: &Boundary) -> Result<ReducedMeasure, GibbsError> {
        if p.beta == 0.0 && p.gamma == 1.0 && !b.is_empty() {
            let mut forced: BTreeMap<usize, i8> = BTreeMap::new();
            for (v, s) in b.pins() {
                forced.insert(*v, *s);
                if *s == 1 {
                    for &u in g.neighbors(*v) {
                        forced.entry(u).or_insert(-1);
                    }
                }
            }
            let keep: Vec<usize> = (0..g.vertex_count())
                .filter(|v| !forced.contains_key(v))
                .collect();
            let (gr, ids) = g.induced_subgraph(&keep);
            let summary = enumerate(&gr, p, &Boundary::free())?;
            let pos = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            Ok(ReducedMeasure {
                summary,
                pos,
                forced,
            })
        } else {
            let summary = enumerate(g, p, b)?;
            let pos = summary
                .free
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, i))
                .collect();
            let forced = b.pins().clone();
            Ok(ReducedMeasure {
                summary,
                pos,
                forced,
            })
        }
    }

    fn marginal_plus(&self, v: usize) -> f64 {
        match self.forced.get(&v) {
            Some(1) => 1.0,
            Some(_) => 0.0,
            None => self.summary.marginal_plus(self.pos[&v]),
        }
    }

    fn conditionals(&self, src: usize, dst: usize) -> Option<(f64, f64)> {
        if self.forced.contains_key(&src) || self.forced.contains_key(&dst) {
            return None;
        }
        let s = &self.summary;
        let wi = self.pos[&src];
        let ui = self.pos[&dst];
        let pw = s.single[wi];
        let pw_minus = s.z - s.single[wi];
        if pw <= DEGENERATE_EPS * s.z || pw_minus <= DEGENERATE_EPS * s.z {
            return None;
        }
        let joint = s.pair_plus(wi, ui) * s.z;
        Some((joint / pw, (s.single[ui] - joint) / pw_minus))
    }
}

/// Which subtraction the extended influence entry uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtendedInfluenceForm {
    /// nu(+1 | ws=+1) - nu(+1 | ws=-1), matching the plain influence matrix.
    #[default]
    PlusPlus,
    /// nu(+1 | ws=+1) - nu(-1 | ws=-1).
    PlusMinus,
}

/// Split-vertex index set S_Lambda: oriented edges whose tail is free.
pub fn split_labels(g: &Graph, b: &Boundary) -> Vec<OrientedEdge> {
    g.oriented_edges()
        .into_iter()
        .filter(|e| b.pin(e.tail).is_none())
        .collect()
}

/// Boundary on the ws-extension graph: Lambda's pins plus every other split
/// vertex of w pinned by the vertex ordering.
///
/// A split vertex of w facing x stands for the walks that leave w through s
/// and come back through x, so it receives the spin the walk-tree
/// construction assigns to that cycle-closing leaf: +1 exactly when the
/// returning neighbour x beats the exit neighbour s in the vertex order.
/// (Comparisons are between original vertex ids.)
fn extension_boundary(
    ext: &crate::graph::ExtendedGraph,
    base_boundary: &Boundary,
    splits: &[(usize, OrientedEdge)],
) -> Boundary {
    let mut b = Boundary::free();
    for (v, s) in base_boundary.pins() {
        if let Some(id) = ext.id_of(ExtVertex::Original(*v)) {
            b.insert(id, *s);
        }
    }
    for &(w, keep_free) in splits {
        for (toward, id) in ext.split_map(w) {
            let label = OrientedEdge::new(w, toward);
            if label == keep_free {
                continue;
            }
            b.insert(id, if toward > keep_free.head { 1 } else { -1 });
        }
    }
    b
}

/// Extended influence matrix on S_Lambda x S_Lambda: entry (ws, uz) is the
/// influence of split vertex ws on split vertex uz in the doubly split
/// graph, under the order-pinned split boundary. Entries with equal split
/// sources are zero.
pub fn extended_influence_exact(
    g: &Graph,
    p: &GibbsParams,
    b: &Boundary,
    form: ExtendedInfluenceForm,
) -> Result<LabeledMatrix, GibbsError> {
    let labels_e = split_labels(g, b);
    let labels: Vec<Label> = labels_e.iter().map(|&e| Label::Edge(e)).collect();
    let mut m = LabeledMatrix::zeros(labels.clone(), labels);
    for (ri, &ws) in labels_e.iter().enumerate() {
        for (ci, &uz) in labels_e.iter().enumerate() {
            if ws.tail == uz.tail {
                continue;
            }
            let v = extended_entry(g, p, b, ws, uz, form)?;
            m.set_idx(ri, ci, v);
        }
    }
    Ok(m)
}

fn extended_entry(
    g: &Graph,
    p: &GibbsParams,
    b: &Boundary,
    ws: OrientedEdge,
    uz: OrientedEdge,
    form: ExtendedInfluenceForm,
) -> Result<f64, GibbsError> {
    let (w, u) = (ws.tail, uz.tail);
    let ext = pair_extension(g, u, w).map_err(|e| GibbsError::BadParams(e.to_string()))?;
    let bnd = extension_boundary(&ext, b, &[(w, ws), (u, uz)]);
    let ws_id = ext
        .id_of(ExtVertex::Split {
            of: w,
            toward: ws.head,
        })
        .expect("split vertex exists");
    let uz_id = ext
        .id_of(ExtVertex::Split {
            of: u,
            toward: uz.head,
        })
        .expect("split vertex exists");
    let m = ReducedMeasure::build(&ext.graph, p, &bnd)?;
    let Some((plus_given_plus, plus_given_minus)) = m.conditionals(ws_id, uz_id) else {
        return Ok(0.0);
    };
    Ok(match form {
        ExtendedInfluenceForm::PlusPlus => plus_given_plus - plus_given_minus,
        ExtendedInfluenceForm::PlusMinus => plus_given_plus - (1.0 - plus_given_minus),
    })
}

/// The coefficient matrix paired with the extended influences plus the list
/// of degenerate entries.
#[derive(Debug, Clone)]
pub struct NMatrixOutput {
    pub matrix: LabeledMatrix,
    /// entries (ws, uz) where a denominator marginal was deterministic; the
    /// coefficient is set to 0 there, which is exact because the companion
    /// extended-influence entry vanishes at every such pair
    pub degenerate_entries: Vec<(OrientedEdge, OrientedEdge)>,
}

/// Coefficient matrix pairing with the extended influences: products of
/// split-vertex marginal variances from the single and double extensions.
pub fn n_matrix(g: &Graph, p: &GibbsParams, b: &Boundary) -> Result<NMatrixOutput, GibbsError> {
    let labels_e = split_labels(g, b);
    let labels: Vec<Label> = labels_e.iter().map(|&e| Label::Edge(e)).collect();
    let mut m = LabeledMatrix::zeros(labels.clone(), labels);
    let mut degenerate = Vec::new();

    // zeta marginals from the single ws-extension, one enumeration per row
    for (ri, &ws) in labels_e.iter().enumerate() {
        let w = ws.tail;
        let ext1 = vertex_extension(g, w).map_err(|e| GibbsError::BadParams(e.to_string()))?;
        let bnd1 = extension_boundary(&ext1, b, &[(w, ws)]);
        let m1 = ReducedMeasure::build(&ext1.graph, p, &bnd1)?;
        let ws_id = ext1
            .id_of(ExtVertex::Split {
                of: w,
                toward: ws.head,
            })
            .unwrap();
        let zeta_ws = m1.marginal_plus(ws_id);
        let zeta_ws_var = zeta_ws * (1.0 - zeta_ws);

        for (ci, &uz) in labels_e.iter().enumerate() {
            let u = uz.tail;
            if u == w {
                continue;
            }
            if zeta_ws_var <= DEGENERATE_EPS {
                degenerate.push((ws, uz));
                continue;
            }
            let u_id = ext1.id_of(ExtVertex::Original(u)).unwrap();
            let zeta_u = m1.marginal_plus(u_id);
            let zeta_u_var = zeta_u * (1.0 - zeta_u);

            // nu marginals from the double extension
            let ext2 = pair_extension(g, u, w).map_err(|e| GibbsError::BadParams(e.to_string()))?;
            let bnd2 = extension_boundary(&ext2, b, &[(w, ws), (u, uz)]);
            let m2 = ReducedMeasure::build(&ext2.graph, p, &bnd2)?;
            let ws2 = ext2
                .id_of(ExtVertex::Split {
                    of: w,
                    toward: ws.head,
                })
                .unwrap();
            let uz2 = ext2
                .id_of(ExtVertex::Split {
                    of: u,
                    toward: uz.head,
                })
                .unwrap();
            let nu_ws = m2.marginal_plus(ws2);
            let nu_uz = m2.marginal_plus(uz2);
            let nu_ws_var = nu_ws * (1.0 - nu_ws);
            let nu_uz_var = nu_uz * (1.0 - nu_uz);
            if nu_uz_var <= DEGENERATE_EPS {
                degenerate.push((ws, uz));
                continue;
            }
            let value = (zeta_u_var / zeta_ws_var) * (nu_ws_var / nu_uz_var);
            m.set_idx(ri, ci, value);
        }
    }
    Ok(NMatrixOutput {
        matrix: m,
        degenerate_entries: degenerate,
    })
}
