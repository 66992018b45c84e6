//! Small dense linear algebra kit: matrices, a cyclic Jacobi eigensolver for
//! symmetric input, shifted power iteration with Collatz-Wielandt bounds for
//! Perron data, and Tarjan's strongly-connected-components pass used to gate
//! Perron calls on irreducibility.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has a negative entry at ({row},{col}): {value}")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error(
        "matrix is reducible: support digraph has {component_count} strongly connected components"
    )]
    Reducible {
        component_count: usize,
        components: Vec<Vec<usize>>,
    },
    #[error(
        "power iteration did not converge within {iterations} iterations (residual {residual:.3e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
    #[error(
        "jacobi eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off:.3e})"
    )]
    JacobiNoConvergence { sweeps: usize, off: f64 },
}

/// Dense row-major f64 matrix.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DMat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<f64>,
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat {
            rows,
            cols,
            a: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DMat::zeros(n, n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * self.cols + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> DMat {
        let mut t = DMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.a[c * self.rows + r] = self.a[r * self.cols + c];
            }
        }
        t
    }

    pub fn matmul(&self, other: &DMat) -> DMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = DMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let v = self.a[r * self.cols + k];
                if v == 0.0 {
                    continue;
                }
                let row_k = &other.a[k * other.cols..(k + 1) * other.cols];
                let row_out = &mut out.a[r * other.cols..(r + 1) * other.cols];
                for (o, &x) in row_out.iter_mut().zip(row_k.iter()) {
                    *o += v * x;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        let mut y = vec![0.0; self.rows];
        for r in 0..self.rows {
            let row = &self.a[r * self.cols..(r + 1) * self.cols];
            y[r] = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        }
        y
    }

    /// y = A^T x without materialising the transpose.
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len());
        let mut y = vec![0.0; self.cols];
        for r in 0..self.rows {
            let v = x[r];
            if v == 0.0 {
                continue;
            }
            let row = &self.a[r * self.cols..(r + 1) * self.cols];
            for (o, &a) in y.iter_mut().zip(row.iter()) {
                *o += v * a;
            }
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    pub fn max_row_sum(&self) -> f64 {
        (0..self.rows)
            .map(|r| {
                self.a[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0f64, f64::max)
    }

    pub fn add_scaled_identity(&mut self, s: f64) {
        assert!(self.is_square());
        for i in 0..self.rows {
            self.a[i * self.cols + i] += s;
        }
    }

    pub fn scaled(&self, s: f64) -> DMat {
        DMat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &DMat) -> DMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DMat {
            rows: self.rows,
            cols: self.cols,
            a: self
                .a
                .iter()
                .zip(other.a.iter())
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    /// Largest singular value, computed as sqrt of the top eigenvalue of A^T A.
    pub fn spectral_norm(&self) -> f64 {
        let gram = self.transpose().matmul(self);
        let eigs = jacobi_eigenvalues(&gram).expect("gram matrix jacobi");
        eigs.iter().fold(0.0f64, |m, &v| m.max(v.max(0.0))).sqrt()
    }
}

/// Dense integer matrix for exact walk counting.
#[derive(Debug, Clone, PartialEq)]
pub struct IMat {
    pub n: usize,
    pub a: Vec<u64>,
}

impl IMat {
    pub fn zeros(n: usize) -> Self {
        IMat {
            n,
            a: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.a[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.a[r * self.n + c] = v;
    }

    pub fn matmul(&self, other: &IMat) -> IMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = IMat::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let v = self.a[r * n + k];
                if v == 0 {
                    continue;
                }
                for c in 0..n {
                    out.a[r * n + c] += v * other.a[k * n + c];
                }
            }
        }
        out
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input is symmetrised as (A + A^T)/2 to absorb round-off asymmetry;
/// callers checking symmetry must do so separately.
pub fn jacobi_eigenvalues(m: &DMat) -> Result<Vec<f64>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(vec![]);
    }
    let mut a = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            a[r * n + c] = 0.5 * (m.get(r, c) + m.get(c, r));
        }
    }
    let scale = a.iter().fold(0.0f64, |s, &v| s.max(v.abs())).max(1.0);
    let tol = 1e-15 * scale;
    let max_sweeps = 100;
    for sweep in 0..max_sweeps {
        let mut off = 0.0f64;
        for r in 0..n {
            for c in (r + 1)..n {
                off = off.max(a[r * n + c].abs());
            }
        }
        if off <= tol {
            let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
            return Ok(eigs);
        }
        let _ = sweep;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut off = 0.0f64;
    for r in 0..n {
        for c in (r + 1)..n {
            off = off.max(a[r * n + c].abs());
        }
    }
    Err(LinalgError::JacobiNoConvergence {
        sweeps: max_sweeps,
        off,
    })
}

/// Strongly connected components of the support digraph of a square
/// non-negative matrix (arc r -> c whenever entry (r,c) > 0).
/// Iterative Tarjan; components are returned in discovery order.
pub fn strongly_connected_components(m: &DMat) -> Vec<Vec<usize>> {
    assert!(m.is_square());
    let n = m.rows;
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|r| (0..n).filter(|&c| m.get(r, c) > 0.0).collect())
        .collect();
    tarjan(&adj)
}

pub fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![usize::MAX; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();

    // explicit DFS stack: (vertex, next child position)
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        while let Some(&mut (v, ref mut ci)) = call.last_mut() {
            if *ci == 0 {
                index[v] = next_index;
                lowlink[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *ci < adj[v].len() {
                let w = adj[v][*ci];
                *ci += 1;
                if index[w] == usize::MAX {
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    components
}

/// True iff the support digraph of `m` is strongly connected and non-trivial.
pub fn is_irreducible(m: &DMat) -> bool {
    if !m.is_square() || m.rows == 0 {
        return false;
    }
    if m.rows == 1 {
        return m.get(0, 0) > 0.0;
    }
    strongly_connected_components(m).len() == 1
}

/// Perron data from power iteration.
#[derive(Debug, Clone)]
pub struct PerronData {
    pub radius: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Perron root and positive left/right eigenvectors of an irreducible
/// non-negative matrix.
///
/// Iterates on `m + shift*I`, which is primitive for any shift > 0, so the
/// iteration cannot oscillate on periodic (e.g. bipartite) support. The
/// Collatz-Wielandt ratio bounds give the stopping rule, and the residual is
/// reported against the unshifted matrix. Vectors are normalised to unit
/// 1-norm.
pub fn perron_power(
    m: &DMat,
    shift: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PerronData, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    for r in 0..m.rows {
        for c in 0..m.cols {
            let v = m.get(r, c);
            if v < 0.0 {
                return Err(LinalgError::NegativeEntry {
                    row: r,
                    col: c,
                    value: v,
                });
            }
        }
    }
    let comps = strongly_connected_components(m);
    if comps.len() != 1 {
        return Err(LinalgError::Reducible {
            component_count: comps.len(),
            components: comps,
        });
    }
    let n = m.rows;
    let mut shifted = m.clone();
    shifted.add_scaled_identity(shift);

    let run = |mat_vec: &dyn Fn(&[f64]) -> Vec<f64>| -> (Vec<f64>, f64, usize, f64) {
        let mut x = vec![1.0 / n as f64; n];
        let mut radius_est = 0.0;
        let mut gap = f64::INFINITY;
        let mut iters = 0;
        for it in 0..max_iter {
            iters = it + 1;
            let y = mat_vec(&x);
            let norm: f64 = y.iter().map(|v| v.abs()).sum();
            let ynorm: Vec<f64> = y.iter().map(|v| v / norm).collect();
            // Collatz-Wielandt bounds on the shifted matrix
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for i in 0..n {
                if x[i] > 0.0 {
                    let r = y[i] / x[i];
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
            }
            radius_est = 0.5 * (lo + hi);
            gap = hi - lo;
            x = ynorm;
            if gap <= tol * radius_est.max(1.0) && it > 2 {
                break;
            }
        }
        (x, radius_est, iters, gap)
    };

    let sh = shifted.clone();
    let (right, rad_r, it_r, gap_r) = run(&|v: &[f64]| sh.matvec(v));
    let (left, rad_l, it_l, gap_l) = run(&|v: &[f64]| sh.matvec_t(v));

    let radius = 0.5 * (rad_r + rad_l) - shift;
    let iterations = it_r.max(it_l);

    // residual against the unshifted matrix
    let res_r = {
        let mv = m.matvec(&right);
        mv.iter()
            .zip(right.iter())
            .map(|(a, b)| (a - radius * b).abs())
            .fold(0.0f64, f64::max)
    };
    let res_l = {
        let mv = m.matvec_t(&left);
        mv.iter()
            .zip(left.iter())
            .map(|(a, b)| (a - radius * b).abs())
            .fold(0.0f64, f64::max)
    };
    let residual = res_r.max(res_l);
    if gap_r > tol * (radius + shift).max(1.0) * 4.0
        || gap_l > tol * (radius + shift).max(1.0) * 4.0
    {
        return Err(LinalgError::NoConvergence {
            iterations,
            residual,
        });
    }
    Ok(PerronData {
        radius,
        right,
        left,
        residual,
        iterations,
    })
}

/// Independent estimate of the dominant eigenvalue modulus via the growth
/// rate of `‖M^k v‖`. Slow but free of any shared state with `perron_power`'s
/// ratio bookkeeping; used as a cross-check oracle for non-symmetric input.
pub fn dominant_modulus_growth(m: &DMat, steps: usize) -> f64 {
    assert!(m.is_square());
    let n = m.rows;
    if n == 0 {
        return 0.0;
    }
    let mut x = vec![1.0; n];
    let mut log_acc = 0.0f64;
    let burn = steps / 2;
    let mut measured = 0.0f64;
    let mut count = 0usize;
    for k in 0..steps {
        let y = m.matvec(&x);
        let norm: f64 = y.iter().map(|v| v.abs()).sum();
        if norm == 0.0 {
            return 0.0;
        }
        if k >= burn {
            measured += norm.ln();
            count += 1;
        }
        log_acc += norm.ln();
        let _ = log_acc;
        x = y.iter().map(|v| v / norm).collect();
    }
    if count == 0 {
        return 0.0;
    }
    (measured / count as f64).exp()
}
