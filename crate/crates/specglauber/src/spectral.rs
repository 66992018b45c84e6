//! Adjacency and non-backtracking matrices, Perron eigen-data, weak
//! normality diagnostics, and closed-form spectral-radius bounds for planar
//! and bounded-genus graphs.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, OrientedEdge};
use crate::labeled::{Label, LabeledMatrix};
use crate::linalg::{self, IMat, LinalgError};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("non-backtracking matrix is reducible for this graph")]
    ReducibleHashimoto,
    #[error("matrix is not square")]
    NotSquare,
}

/// Perron radius with positive left/right eigenvectors (unit 1-norm) and
/// convergence metadata.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub radius: f64,
    pub right_vec: Vec<f64>,
    pub left_vec: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// 0/1 vertex adjacency matrix.
pub fn adjacency_matrix(g: &Graph) -> LabeledMatrix {
    let n = g.vertex_count();
    let labels: Vec<Label> = (0..n).map(Label::Vertex).collect();
    let mut m = LabeledMatrix::zeros(labels.clone(), labels);
    for &(u, v) in g.edges() {
        m.set_idx(u, v, 1.0);
        m.set_idx(v, u, 1.0);
    }
    m
}

/// 0/1 non-backtracking matrix on oriented edges: H(e,f) = 1 iff f continues
/// e without reversing it.
pub fn hashimoto_matrix(g: &Graph) -> LabeledMatrix {
    let edges = g.oriented_edges();
    let labels: Vec<Label> = edges.iter().map(|&e| Label::Edge(e)).collect();
    let mut m = LabeledMatrix::zeros(labels.clone(), labels);
    for (i, e) in edges.iter().enumerate() {
        for (j, f) in edges.iter().enumerate() {
            if e.head == f.tail && e.tail != f.head {
                m.set_idx(i, j, 1.0);
            }
        }
    }
    m
}

/// Perron root and eigenvectors of a non-negative irreducible matrix by
/// shifted power iteration. The +shift*I keeps bipartite-type spectra from
/// oscillating; the left vector comes from transpose iteration.
pub fn perron(m: &LabeledMatrix, tol: f64) -> Result<SpectralResult, SpectralError> {
    let d = m.to_dmat();
    if !d.is_square() {
        return Err(SpectralError::NotSquare);
    }
    let shift = d.max_row_sum().max(1.0);
    let p = linalg::perron_power(&d, shift, tol, DEFAULT_MAX_ITER)?;
    Ok(SpectralResult {
        radius: p.radius,
        right_vec: p.right,
        left_vec: p.left,
        residual: p.residual,
        iterations: p.iterations,
    })
}

/// True iff the support digraph of H_G on oriented edges is strongly
/// connected.
pub fn hashimoto_irreducible(g: &Graph) -> bool {
    let h = hashimoto_matrix(g);
    if h.rows() == 0 {
        return false;
    }
    linalg::is_irreducible(&h.to_dmat())
}

/// Weak-normality constant: the maximum over oriented edges of
/// psi_1(e)/kappa_1(e) with both principal eigenvectors at unit 1-norm.
pub fn weak_normality(g: &Graph, tol: f64) -> Result<f64, SpectralError> {
    if !hashimoto_irreducible(g) {
        return Err(SpectralError::ReducibleHashimoto);
    }
    let h = hashimoto_matrix(g);
    let p = perron(&h, tol)?;
    let mut c_hat = 0.0f64;
    for i in 0..h.rows() {
        c_hat = c_hat.max(p.left_vec[i] / p.right_vec[i]);
    }
    Ok(c_hat)
}

/// Exact integer check of H^k(e,f) = H^k(f^{-1},e^{-1}) for 1 <= k <= k_max.
pub fn check_pt_invariance(g: &Graph, k_max: usize) -> bool {
    let edges = g.oriented_edges();
    let n = edges.len();
    let mut h = IMat::zeros(n);
    for (i, e) in edges.iter().enumerate() {
        for (j, f) in edges.iter().enumerate() {
            if e.head == f.tail && e.tail != f.head {
                h.set(i, j, 1);
            }
        }
    }
    let rev: Vec<usize> = edges
        .iter()
        .map(|e| edges.iter().position(|f| *f == e.reverse()).unwrap())
        .collect();
    let mut power = h.clone();
    for _ in 0..k_max {
        for i in 0..n {
            for j in 0..n {
                if power.get(i, j) != power.get(rev[j], rev[i]) {
                    return false;
                }
            }
        }
        power = power.matmul(&h);
    }
    true
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenvectorRelationReport {
    /// max |kappa_1(e) - psi_1(e^{-1})|
    pub reversal_violation: f64,
    /// max violation of the outgoing-sum eigen-equations for kappa and psi
    pub sum_violation: f64,
}

/// Checks kappa_1(e) = psi_1(e^{-1}) and the oriented-edge eigen-equations
/// sum_{v!=w} kappa_1(uv) = theta kappa_1(wu), sum_{v!=w} psi_1(vu) = theta psi_1(uw).
pub fn check_eigenvector_relations(
    g: &Graph,
    tol: f64,
) -> Result<EigenvectorRelationReport, SpectralError> {
    if !hashimoto_irreducible(g) {
        return Err(SpectralError::ReducibleHashimoto);
    }
    let h = hashimoto_matrix(g);
    let p = perron(&h, tol)?;
    let edges = g.oriented_edges();
    let pos = |e: OrientedEdge| edges.iter().position(|&f| f == e).unwrap();

    let mut reversal = 0.0f64;
    for (i, e) in edges.iter().enumerate() {
        let ri = pos(e.reverse());
        reversal = reversal.max((p.right_vec[i] - p.left_vec[ri]).abs());
    }

    let theta = p.radius;
    let mut sums = 0.0f64;
    for u in 0..g.vertex_count() {
        for &w in g.neighbors(u) {
            let mut kappa_sum = 0.0;
            let mut psi_sum = 0.0;
            for &v in g.neighbors(u) {
                if v == w {
                    continue;
                }
                kappa_sum += p.right_vec[pos(OrientedEdge::new(u, v))];
                psi_sum += p.left_vec[pos(OrientedEdge::new(v, u))];
            }
            sums = sums.max((kappa_sum - theta * p.right_vec[pos(OrientedEdge::new(w, u))]).abs());
            sums = sums.max((psi_sum - theta * p.left_vec[pos(OrientedEdge::new(u, w))]).abs());
        }
    }
    Ok(EigenvectorRelationReport {
        reversal_violation: reversal,
        sum_violation: sums,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BacktrackEdgeReport {
    pub edge: OrientedEdge,
    /// number of oriented edges on the shortest non-backtracking sequence
    /// e_1, ..., e_l with e_1 = e and e_l = e^{-1} (so H^{l-1}(e,e^{-1}) > 0),
    /// if one exists within the cap
    pub return_length: Option<usize>,
    /// theta^{l-1} kappa_1(e) - kappa_1(e^{-1}); non-negative when the bound holds
    pub slack: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BacktrackReport {
    pub per_edge: Vec<BacktrackEdgeReport>,
    pub min_slack: Option<f64>,
    pub max_return_length: Option<usize>,
}

/// For each oriented edge finds the least l <= cap with a non-backtracking
/// return path to its reverse and checks kappa_1(e^{-1}) <= theta^{l-1} kappa_1(e).
pub fn backtrack_bound(g: &Graph, cap: usize) -> Result<BacktrackReport, SpectralError> {
    if !hashimoto_irreducible(g) {
        return Err(SpectralError::ReducibleHashimoto);
    }
    let h = hashimoto_matrix(g);
    let p = perron(&h, DEFAULT_TOL)?;
    let edges = g.oriented_edges();
    let n = edges.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| h.get_idx(i, j) > 0.0).collect())
        .collect();
    let rev: Vec<usize> = edges
        .iter()
        .map(|e| edges.iter().position(|f| *f == e.reverse()).unwrap())
        .collect();

    let mut per_edge = Vec::with_capacity(n);
    let mut min_slack: Option<f64> = None;
    let mut max_len: Option<usize> = None;
    for i in 0..n {
        // BFS over the support digraph
        let mut dist = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[i] = 0;
        queue.push_back(i);
        while let Some(x) = queue.pop_front() {
            if dist[x] >= cap {
                continue;
            }
            for &y in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        // dist counts transitions; the edge sequence has dist+1 edges
        let return_length = if dist[rev[i]] == usize::MAX || dist[rev[i]] + 1 > cap {
            None
        } else {
            Some(dist[rev[i]] + 1)
        };
        let slack = return_length
            .map(|l| p.radius.powi((l as i32) - 1) * p.right_vec[i] - p.right_vec[rev[i]]);
        if let Some(s) = slack {
            min_slack = Some(min_slack.map_or(s, |m: f64| m.min(s)));
        }
        if let Some(l) = return_length {
            max_len = Some(max_len.map_or(l, |m: usize| m.max(l)));
        }
        per_edge.push(BacktrackEdgeReport {
            edge: edges[i],
            return_length,
            slack,
        });
    }
    Ok(BacktrackReport {
        per_edge,
        min_slack,
        max_return_length: max_len,
    })
}

/// Spectral-radius bound for planar graphs of maximum degree delta.
pub fn planar_rho_bound(delta: usize) -> f64 {
    let d = delta as f64;
    if delta <= 5 {
        d
    } else if delta <= 36 {
        (12.0 * d - 36.0).sqrt()
    } else {
        (8.0 * d - 16.0).sqrt() + 2.0 * 3.0f64.sqrt()
    }
}

/// Spectral-radius bound for graphs embeddable in a surface of Euler genus
/// `genus`; `None` when the hypothesis delta >= d(g)+2 fails.
pub fn genus_rho_bound(delta: usize, genus: usize) -> Option<f64> {
    let dg = match genus {
        0 | 1 => 10,
        2 | 3 => 12,
        4 | 5 => 2 * genus + 6,
        _ => 2 * genus + 4,
    };
    if delta < dg + 2 {
        return None;
    }
    Some((8.0 * (delta - dg) as f64).sqrt() + dg as f64)
}

/// Exact count of length-l walks between two vertices, for cross-checking
/// powers of the adjacency matrix.
pub fn brute_force_walk_count(g: &Graph, from: usize, to: usize, len: usize) -> u64 {
    fn recurse(g: &Graph, at: usize, to: usize, left: usize) -> u64 {
        if left == 0 {
            return u64::from(at == to);
        }
        g.neighbors(at)
            .iter()
            .map(|&x| recurse(g, x, to, left - 1))
            .sum()
    }
    recurse(g, from, to, len)
}

/// Integer power of the adjacency matrix.
pub fn adjacency_power(g: &Graph, len: usize) -> IMat {
    let n = g.vertex_count();
    let mut a = IMat::zeros(n);
    for &(u, v) in g.edges() {
        a.set(u, v, 1);
        a.set(v, u, 1);
    }
    let mut out = IMat::identity(n);
    for _ in 0..len {
        out = out.matmul(&a);
    }
    out
}

/// Spectral radius of the underlying dense matrix via the symmetric Jacobi
/// eigensolver; an oracle path for symmetric input.
pub fn symmetric_radius_oracle(m: &LabeledMatrix) -> Result<f64, SpectralError> {
    let eigs = linalg::jacobi_eigenvalues(&m.to_dmat())?;
    Ok(eigs.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())))
}

/// Growth-rate oracle for non-symmetric non-negative matrices.
pub fn growth_radius_oracle(m: &LabeledMatrix, steps: usize) -> f64 {
    linalg::dominant_modulus_growth(&m.to_dmat(), steps)
}
