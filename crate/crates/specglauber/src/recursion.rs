//! Scalar tree-recursion machinery for two-spin systems: the ratio map and
//! its log form, the gradient bound, log-ratio intervals, critical
//! thresholds, and the hard-core potential-function verification.

use serde::Serialize;
use thiserror::Error;

use crate::gibbs::{GibbsParams, ModelTag};

#[derive(Debug, Error)]
pub enum RecursionError {
    #[error("lambda_c requires k > 1, got {0}")]
    BadBranchingFactor(f64),
    #[error("delta_c: lambda {0} outside the invertible range")]
    FugacityOutOfRange(f64),
    #[error("delta_c bisection failed to converge")]
    NoConvergence,
    #[error("{0}")]
    BadInput(String),
}

/// One multiplicative factor of the ratio recursion, (beta x + 1)/(x + gamma),
/// evaluated stably over [0, +inf].
fn ratio_factor(x: f64, p: &GibbsParams) -> f64 {
    if x <= 1.0 {
        (p.beta * x + 1.0) / (x + p.gamma)
    } else {
        let inv = 1.0 / x;
        (p.beta + inv) / (1.0 + p.gamma * inv)
    }
}

/// The ratio recursion F_d: product over children ratios.
pub fn f_d(xs: &[f64], p: &GibbsParams) -> f64 {
    let mut out = p.lambda;
    for &x in xs {
        out *= ratio_factor(x, p);
    }
    out
}

/// Log of one factor, with the limit branches at +-inf.
fn log_ratio_factor(y: f64, p: &GibbsParams) -> f64 {
    if y <= 0.0 {
        let e = y.exp();
        (p.beta * e + 1.0).ln() - (e + p.gamma).ln()
    } else {
        let e = (-y).exp();
        (p.beta + e).ln() - (1.0 + p.gamma * e).ln()
    }
}

/// The log-ratio recursion H_d = log . F_d . exp.
pub fn h_d(ys: &[f64], p: &GibbsParams) -> f64 {
    let mut out = p.lambda.ln();
    for &y in ys {
        out += log_ratio_factor(y, p);
    }
    out
}

/// The per-coordinate derivative of H_d. Always in [-1, 1]; zero at -inf,
/// and for hard constraints it tends to -1 at +inf.
pub fn h_deriv(x: f64, p: &GibbsParams) -> f64 {
    if p.beta == 0.0 {
        -1.0 / (1.0 + p.gamma * (-x).exp())
    } else {
        let a = p.beta * x.exp() + 1.0;
        let b = 1.0 + p.gamma * (-x).exp();
        -(1.0 - p.beta * p.gamma) / (a * b)
    }
}

/// Closed interval of attainable log-ratios; lo/hi may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogRatioInterval {
    pub lo: f64,
    pub hi: f64,
}

/// Log-ratio interval for a vertex with d children.
pub fn log_ratio_interval(d: usize, p: &GibbsParams) -> LogRatioInterval {
    let ll = p.lambda.ln();
    let bg = p.beta * p.gamma;
    let a = ll + d as f64 * p.beta.ln(); // beta = 0 gives -inf
    let b = ll - d as f64 * p.gamma.ln();
    if bg < 1.0 {
        LogRatioInterval { lo: a, hi: b }
    } else if bg > 1.0 {
        LogRatioInterval { lo: b, hi: a }
    } else {
        LogRatioInterval { lo: ll, hi: ll }
    }
}

/// Union over d in 1..=max_degree.
pub fn log_ratio_union(max_degree: usize, p: &GibbsParams) -> LogRatioInterval {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for d in 1..=max_degree.max(1) {
        let j = log_ratio_interval(d, p);
        lo = lo.min(j.lo);
        hi = hi.max(j.hi);
    }
    LogRatioInterval { lo, hi }
}

/// Supremum of |h| over the attainable log-ratios.
///
/// Ising and hard-core get their closed forms; general parameters fall back
/// to a dense grid over the real line plus the endpoint limits, which upper
/// bounds every attainable ratio regardless of degree.
pub fn delta_contraction_sup(p: &GibbsParams) -> f64 {
    match p.model {
        ModelTag::Ising => (p.beta - 1.0).abs() / (p.beta + 1.0),
        ModelTag::Hardcore => p.lambda / (1.0 + p.lambda),
        ModelTag::General => {
            let mut sup: f64 = h_deriv(f64::NEG_INFINITY, p)
                .abs()
                .max(h_deriv(f64::INFINITY, p).abs());
            let n = 8192;
            for i in 0..=n {
                let x = -60.0 + 120.0 * i as f64 / n as f64;
                sup = sup.max(h_deriv(x, p).abs());
            }
            sup
        }
    }
}

/// Hard-core uniqueness threshold on the k-ary tree.
pub fn lambda_c(k: f64) -> Result<f64, RecursionError> {
    if !(k > 1.0) {
        return Err(RecursionError::BadBranchingFactor(k));
    }
    Ok((k * k.ln() - (k + 1.0) * (k - 1.0).ln()).exp())
}

/// Inverse of `lambda_c`: the branching factor at which `lam` is critical.
/// Bisection on the (strictly decreasing) log threshold.
pub fn delta_c(lam: f64) -> Result<f64, RecursionError> {
    if !(lam > 0.0) {
        return Err(RecursionError::FugacityOutOfRange(lam));
    }
    let log_target = lam.ln();
    let f = |z: f64| z * z.ln() - (z + 1.0) * (z - 1.0).ln(); // log lambda_c(z)
    let mut lo = 1.0 + 1e-9;
    let mut hi = 1e6;
    if f(lo) < log_target || f(hi) > log_target {
        return Err(RecursionError::FugacityOutOfRange(lam));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > log_target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The Ising uniqueness-style interval around 1 for effective branching d
/// and margin delta; endpoints are reciprocal.
pub fn u_ising(d: f64, delta: f64) -> (f64, f64) {
    let lo = (d - 1.0 + delta) / (d + 1.0 - delta);
    (lo, 1.0 / lo)
}

/// chi = Psi' for the hard-core potential: sqrt(e^y / (1+e^y)).
pub fn hc_potential_chi(y: f64) -> f64 {
    (1.0 / (1.0 + (-y).exp())).sqrt()
}

/// psi(y) = (1/2) sqrt(1/(y(1+y))) on ratios y > 0.
pub fn hc_potential_psi(y: f64) -> f64 {
    0.5 * (1.0 / (y * (1.0 + y))).sqrt()
}

/// Symmetric hard-core recursion F_{d,sym}(x) = lambda/(1+x)^d; real d.
pub fn f_sym(d: f64, x: f64, lam: f64) -> f64 {
    lam / (1.0 + x).powf(d)
}

/// Unique fixpoint of the symmetric recursion in [0, max(1, lambda)].
pub fn f_sym_fixpoint(d: f64, lam: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = lam.max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f_sym(d, mid, lam) > mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The symmetric contraction functional
/// Xi(s,d,x) = (1/d) (psi(F_{d,sym}(x))/psi(x) |F'_{d,sym}(x)|)^s.
pub fn xi(s: f64, d: f64, x: f64, lam: f64) -> f64 {
    let fx = f_sym(d, x, lam);
    let fprime = d * lam / (1.0 + x).powf(d + 1.0); // |d/dx F_{d,sym}|
    let ratio = hc_potential_psi(fx) / hc_potential_psi(x) * fprime;
    ratio.powf(s) / d
}

/// Parameters of a potential-function certificate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PotentialParams {
    /// norm index; may be +inf
    pub s: f64,
    pub delta: f64,
    pub c: f64,
}

/// The hard-core potential parameters at fugacity `lam`: s from the
/// branching factor, delta = 1/Delta_c, c = lambda/(1+lambda).
pub fn hc_potential_params(lam: f64) -> Result<PotentialParams, RecursionError> {
    let dc = delta_c(lam)?;
    let s_inv = 1.0 - (dc - 1.0) / 2.0 * (1.0 + 1.0 / (dc - 1.0)).ln();
    if !(s_inv > 0.0) {
        return Err(RecursionError::BadInput(format!(
            "potential norm index degenerate at lambda = {lam}"
        )));
    }
    Ok(PotentialParams {
        s: 1.0 / s_inv,
        delta: 1.0 / dc,
        c: lam / (1.0 + lam),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub max_degree: usize,
    pub points: usize,
    /// seeded random tuples for the multivariate spot check
    pub spot_checks: usize,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            max_degree: 5,
            points: 4096,
            spot_checks: 10_000,
            seed: 0x9e3779b9,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialReport {
    pub s: f64,
    pub delta: f64,
    pub c: f64,
    /// min over the grid of delta - Xi; negative means a violation
    pub contraction_slack: f64,
    /// c - analytic boundedness value
    pub boundedness_slack: f64,
    /// min over random tuples of rhs - lhs for the multivariate condition
    pub multivariate_slack: f64,
    pub pass: bool,
    /// witness of the worst grid point (d, x, Xi value)
    pub witness: Option<(usize, f64, f64)>,
}

const SLACK_TOL: f64 = 1e-12;

/// Verifies that the hard-core potential certificate holds at the given
/// parameters: exact boundedness, a dense grid check of the symmetric
/// contraction functional over (0, lambda] for every degree, and a seeded
/// random spot check of the full multivariate contraction condition.
pub fn verify_potential(
    p: &GibbsParams,
    pp: &PotentialParams,
    grid: &GridSpec,
) -> Result<PotentialReport, RecursionError> {
    if p.model != ModelTag::Hardcore {
        return Err(RecursionError::BadInput(
            "potential verification is implemented for hard-core parameters".into(),
        ));
    }
    let lam = p.lambda;

    // boundedness: max over J of chi(z1) |h(z2)|/chi(z2) = lambda/(1+lambda)
    let boundedness_value = lam / (1.0 + lam);
    let boundedness_slack = pp.c - boundedness_value;

    // contraction on the symmetric functional
    let mut slack = f64::INFINITY;
    let mut witness = None;
    let check_point =
        |d: usize, x: f64, slack: &mut f64, witness: &mut Option<(usize, f64, f64)>| {
            if x <= 0.0 {
                return;
            }
            let v = xi(pp.s, d as f64, x, lam);
            let s = pp.delta - v;
            if s < *slack {
                *slack = s;
                *witness = Some((d, x, v));
            }
        };
    let lo = (lam * 1e-9).max(1e-300);
    let ratio = (lam / lo).ln();
    for d in 1..=grid.max_degree {
        for i in 0..=grid.points {
            let x = lo * (ratio * i as f64 / grid.points as f64).exp();
            check_point(d, x, &mut slack, &mut witness);
        }
        check_point(d, f_sym_fixpoint(d as f64, lam), &mut slack, &mut witness);
        check_point(d, lam, &mut slack, &mut witness);
    }
    // densify around near-violations before declaring failure
    if slack < 1e-6 {
        if let Some((d, x0, _)) = witness {
            let span = x0 * 0.1;
            let fine = grid.points * 4;
            for i in 0..=fine {
                let x = (x0 - span) + 2.0 * span * i as f64 / fine as f64;
                check_point(d, x, &mut slack, &mut witness);
            }
        }
    }

    // multivariate spot check of the contraction condition
    let mut multivariate_slack = f64::INFINITY;
    let mut stream = crate::rng::Stream::new(grid.seed);
    for _ in 0..grid.spot_checks {
        let d = 1 + stream.below(grid.max_degree);
        let mut ys = Vec::with_capacity(d);
        let mut ms = Vec::with_capacity(d);
        for _ in 0..d {
            // y in J: log of a ratio drawn log-uniformly from (0, lambda]
            let t = stream.next_f64();
            ys.push((lam * (1e-9f64).powf(1.0 - t)).ln());
            ms.push(stream.next_f64());
        }
        let hd = h_d(&ys, p);
        let lhs: f64 = hc_potential_chi(hd)
            * ys.iter()
                .zip(ms.iter())
                .map(|(&y, &m)| h_deriv(y, p).abs() / hc_potential_chi(y) * m)
                .sum::<f64>();
        let rhs = if pp.s.is_infinite() {
            ms.iter().fold(0.0f64, |a, &b| a.max(b))
        } else {
            pp.delta.powf(1.0 / pp.s)
                * ms.iter()
                    .map(|m| m.powf(pp.s))
                    .sum::<f64>()
                    .powf(1.0 / pp.s)
        };
        multivariate_slack = multivariate_slack.min(rhs - lhs);
    }

    let pass =
        slack >= -SLACK_TOL && boundedness_slack >= -SLACK_TOL && multivariate_slack >= -1e-9;
    Ok(PotentialReport {
        s: pp.s,
        delta: pp.delta,
        c: pp.c,
        contraction_slack: slack,
        boundedness_slack,
        multivariate_slack,
        pass,
        witness: if slack < -SLACK_TOL { witness } else { None },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub delta_c: f64,
    /// largest z in (0,1) with (1-z)/L >= 1/Delta_c, if positive
    pub z: f64,
    pub z_exists: bool,
    pub e3_bound_holds: bool,
}

/// Checks the below-threshold regime consequences: the contraction margin z
/// and the e^3/L bound on lambda/(1+lambda).
pub fn claim_15_2_check(eps: f64, big_l: f64, lam: f64) -> Result<RegimeReport, RecursionError> {
    if !(0.0 < eps && eps < 1.0) || big_l < 2.0 {
        return Err(RecursionError::BadInput(format!(
            "need eps in (0,1) and L >= 2, got eps={eps}, L={big_l}"
        )));
    }
    let cap = (1.0 - eps) * lambda_c(big_l)?;
    if !(lam > 0.0 && lam <= cap) {
        return Err(RecursionError::BadInput(format!(
            "lambda {lam} outside (0, (1-eps) lambda_c(L)] = (0, {cap}]"
        )));
    }
    let dc = delta_c(lam)?;
    let z = 1.0 - big_l / dc;
    let e3 = (3.0f64).exp();
    Ok(RegimeReport {
        delta_c: dc,
        z,
        z_exists: z > 0.0,
        e3_bound_holds: lam / (1.0 + lam) < e3 / big_l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_d_examples() {
        let hc1 = GibbsParams::hardcore(1.0);
        assert_eq!(f_d(&[0.0, 0.0], &hc1), 1.0);
        let hc2 = GibbsParams::hardcore(2.0);
        assert_eq!(f_d(&[1.0], &hc2), 1.0);
        let is = GibbsParams::ising(0.5);
        assert!((f_d(&[1.0], &is) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn h_d_examples() {
        let hc1 = GibbsParams::hardcore(1.0);
        assert!((h_d(&[0.0], &hc1) - 0.5f64.ln()).abs() < 1e-15);
        let is1 = GibbsParams::ising(1.0);
        assert_eq!(h_d(&[0.3, -2.0, 7.0], &is1), 0.0);
        let hc4 = GibbsParams::hardcore(4.0);
        assert!((h_d(&[], &hc4) - 4.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn h_deriv_examples() {
        let hc = GibbsParams::hardcore(1.0);
        assert!((h_deriv(0.0, &hc) + 0.5).abs() < 1e-15);
        let is = GibbsParams::ising(0.5);
        assert!((h_deriv(0.0, &is) + 1.0 / 3.0).abs() < 1e-15);
        let unit = GibbsParams::ising(1.0);
        for x in [-5.0, 0.0, 5.0, f64::INFINITY, f64::NEG_INFINITY] {
            assert_eq!(h_deriv(x, &unit), 0.0);
        }
        assert_eq!(h_deriv(f64::NEG_INFINITY, &hc), 0.0);
        assert_eq!(h_deriv(f64::INFINITY, &hc), -1.0);
    }

    #[test]
    fn h_d_consistent_with_f_d() {
        let mut stream = crate::rng::Stream::new(11);
        let params = [
            GibbsParams::hardcore(0.7),
            GibbsParams::ising(0.6),
            GibbsParams::ising(1.4),
            GibbsParams::general(0.3, 1.2, 2.0).unwrap(),
        ];
        for p in &params {
            for _ in 0..2500 {
                let d = 1 + stream.below(5);
                let ys: Vec<f64> = (0..d).map(|_| 8.0 * (stream.next_f64() - 0.5)).collect();
                let xs: Vec<f64> = ys.iter().map(|y| y.exp()).collect();
                let a = h_d(&ys, p);
                let b = f_d(&xs, p).ln();
                assert!((a - b).abs() < 1e-12, "{a} vs {b} at {ys:?} {p:?}");
            }
        }
    }

    #[test]
    fn h_deriv_matches_finite_differences() {
        let mut stream = crate::rng::Stream::new(12);
        let params = [
            GibbsParams::hardcore(0.7),
            GibbsParams::ising(0.6),
            GibbsParams::general(0.3, 1.2, 2.0).unwrap(),
        ];
        let step = 1e-5;
        for p in &params {
            for _ in 0..2000 {
                let d = 1 + stream.below(4);
                let i = stream.below(d);
                let ys: Vec<f64> = (0..d).map(|_| 6.0 * (stream.next_f64() - 0.5)).collect();
                let mut hi = ys.clone();
                hi[i] += step;
                let mut lo = ys.clone();
                lo[i] -= step;
                let fd = (h_d(&hi, p) - h_d(&lo, p)) / (2.0 * step);
                assert!(
                    (fd - h_deriv(ys[i], p)).abs() < 1e-6,
                    "fd {fd} deriv {} at {ys:?}",
                    h_deriv(ys[i], p)
                );
            }
        }
    }

    #[test]
    fn intervals() {
        let hc = GibbsParams::hardcore(1.0);
        let j = log_ratio_interval(2, &hc);
        assert_eq!(j.lo, f64::NEG_INFINITY);
        assert_eq!(j.hi, 0.0);

        let anti = GibbsParams::ising(0.5);
        let j3 = log_ratio_interval(3, &anti);
        assert!((j3.lo - 3.0 * 0.5f64.ln()).abs() < 1e-15);
        assert!((j3.hi + 3.0 * 0.5f64.ln()).abs() < 1e-15);

        let ferro = GibbsParams::ising(2.0);
        let j1 = log_ratio_interval(1, &ferro);
        assert!((j1.lo - 0.5f64.ln()).abs() < 1e-15);
        assert!((j1.hi - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn interval_union_spans_degrees() {
        let anti = GibbsParams::ising(0.5);
        let j = log_ratio_union(3, &anti);
        assert!((j.lo - 3.0 * 0.5f64.ln()).abs() < 1e-15);
        assert!((j.hi + 3.0 * 0.5f64.ln()).abs() < 1e-15);
        let hc = GibbsParams::hardcore(2.0);
        let jh = log_ratio_union(4, &hc);
        assert_eq!(jh.lo, f64::NEG_INFINITY);
        assert!((jh.hi - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn contraction_sups() {
        assert!((delta_contraction_sup(&GibbsParams::ising(0.5)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((delta_contraction_sup(&GibbsParams::hardcore(1.0)) - 0.5).abs() < 1e-15);
        assert_eq!(delta_contraction_sup(&GibbsParams::ising(1.0)), 0.0);
    }

    #[test]
    fn ising_grid_sup_below_closed_form() {
        for beta in [0.4, 0.6, 0.9, 1.3, 2.5] {
            let p = GibbsParams::ising(beta);
            let bound = (beta - 1.0f64).abs() / (beta + 1.0);
            let mut sup = 0.0f64;
            let n = 6000;
            for i in 0..=n {
                let x = -30.0 + 60.0 * i as f64 / n as f64;
                sup = sup.max(h_deriv(x, &p).abs());
            }
            assert!(sup <= bound + 1e-12, "beta={beta}: {sup} vs {bound}");
        }
    }

    #[test]
    fn hardcore_h_bounded_on_j() {
        for lam in [0.3, 1.0, 2.5] {
            let p = GibbsParams::hardcore(lam);
            let bound = lam / (1.0 + lam);
            let n = 4096;
            for i in 0..=n {
                let y = lam.ln() - 40.0 * i as f64 / n as f64;
                assert!(h_deriv(y, &p).abs() <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn lambda_c_values() {
        assert!((lambda_c(2.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((lambda_c(3.0).unwrap() - 27.0 / 16.0).abs() < 1e-12);
        // 1.5^1.5 / 0.5^2.5 = 6 sqrt(3)
        assert!((lambda_c(1.5).unwrap() - 6.0 * 3.0f64.sqrt()).abs() < 1e-10);
        assert!(lambda_c(1.0).is_err());
    }

    #[test]
    fn lambda_c_monotone_decreasing() {
        let mut prev = f64::INFINITY;
        for k in [1.2, 1.5, 2.0, 3.0, 5.0, 10.0] {
            let v = lambda_c(k).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn delta_c_roundtrip() {
        assert!((delta_c(4.0).unwrap() - 2.0).abs() < 1e-10);
        assert!((delta_c(27.0 / 16.0).unwrap() - 3.0).abs() < 1e-10);
        for lam in [0.1, 1.0, 4.0, 10.0] {
            let z = delta_c(lam).unwrap();
            assert!((lambda_c(z).unwrap() - lam).abs() < 1e-10, "lam={lam}");
        }
        let mut prev = f64::INFINITY;
        for lam in [0.5, 1.0, 2.0, 4.0] {
            let z = delta_c(lam).unwrap();
            assert!(z < prev);
            prev = z;
        }
    }

    #[test]
    fn u_ising_examples() {
        let (lo, hi) = u_ising(3.0, 0.5);
        assert!((lo - 2.5 / 3.5).abs() < 1e-15);
        assert!((hi - 3.5 / 2.5).abs() < 1e-15);
        for (d, del) in [(2.0, 0.3), (5.0, 0.9), (1.5, 0.1)] {
            let (lo, hi) = u_ising(d, del);
            assert!((lo * hi - 1.0).abs() < 1e-14);
            assert!(lo < 1.0 && hi > 1.0);
        }
        let (lo, hi) = u_ising(2.0, 1e-12);
        assert!((lo - 1.0 / 3.0).abs() < 1e-10);
        assert!((hi - 3.0).abs() < 1e-10);
    }

    #[test]
    fn potential_scalars() {
        assert!((hc_potential_chi(0.0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((hc_potential_psi(1.0) - 1.0 / (2.0 * 2.0f64.sqrt())).abs() < 1e-15);
        assert!(hc_potential_chi(3.0) > 0.0 && hc_potential_chi(-30.0) > 0.0);
    }

    #[test]
    fn xi_fixpoint_identity() {
        for lam in [4.0, 27.0 / 16.0, 1.0] {
            let dc = delta_c(lam).unwrap();
            let pp = hc_potential_params(lam).unwrap();
            let x = f_sym_fixpoint(dc, lam);
            assert!((f_sym(dc, x, lam) - x).abs() < 1e-12);
            let v = xi(pp.s, dc, x, lam);
            assert!(
                (v - 1.0 / dc).abs() < 1e-9,
                "lam={lam}: {v} vs {}",
                1.0 / dc
            );
        }
    }

    #[test]
    fn xi_matches_simplified_form() {
        let mut stream = crate::rng::Stream::new(3);
        for _ in 0..2000 {
            let lam = 0.1 + 4.0 * stream.next_f64();
            let d = 1.0 + 4.0 * stream.next_f64();
            let s = 1.0 + 2.0 * stream.next_f64();
            let x = 1e-3 + lam * stream.next_f64();
            let f = f_sym(d, x, lam);
            let simplified =
                d.powf(s - 1.0) * (f / (1.0 + f)).powf(s / 2.0) * (x / (1.0 + x)).powf(s / 2.0);
            let direct = xi(s, d, x, lam);
            assert!(
                ((simplified - direct) / direct.max(1e-300)).abs() < 1e-10,
                "{simplified} vs {direct}"
            );
        }
    }

    #[test]
    fn potential_params_values() {
        let pp = hc_potential_params(4.0).unwrap();
        assert!((1.0 / pp.s - (1.0 - 0.5 * 2.0f64.ln())).abs() < 1e-12);
        assert!((pp.s - 1.53039).abs() < 1e-4);
        assert!((pp.delta - 0.5).abs() < 1e-10);
        assert!((pp.c - 0.8).abs() < 1e-12);

        let pp3 = hc_potential_params(27.0 / 16.0).unwrap();
        assert!((1.0 / pp3.s - (1.0 - 1.5f64.ln())).abs() < 1e-10);

        for lam in [0.3, 1.0, 5.0] {
            let pp = hc_potential_params(lam).unwrap();
            let dc = delta_c(lam).unwrap();
            assert!((pp.delta * dc - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn verify_potential_below_threshold_passes() {
        for k in [2.0, 3.0, 5.0] {
            let lam = 0.8 * lambda_c(k).unwrap();
            let p = GibbsParams::hardcore(lam);
            let pp = hc_potential_params(lam).unwrap();
            let grid = GridSpec {
                max_degree: k as usize + 1,
                ..GridSpec::default()
            };
            let rep = verify_potential(&p, &pp, &grid).unwrap();
            assert!(rep.pass, "k={k}: {rep:?}");
            assert!(rep.contraction_slack >= -1e-12);
            assert!(rep.boundedness_slack >= -1e-12);
        }
    }

    #[test]
    fn verify_potential_above_threshold_fails_with_witness() {
        let lam = 1.2 * lambda_c(3.0).unwrap();
        let p = GibbsParams::hardcore(lam);
        let pp = hc_potential_params(lam).unwrap();
        // force the contraction budget a theorem premise would demand at
        // rho = 3, eps = 0.2; above threshold this is unattainable
        let forced = PotentialParams {
            s: pp.s,
            delta: (1.0 - 0.2) / 3.0,
            c: pp.c,
        };
        let rep = verify_potential(&p, &forced, &GridSpec::default()).unwrap();
        assert!(!rep.pass);
        assert!(rep.contraction_slack < -1e-12);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn claim_15_2() {
        let rep = claim_15_2_check(0.5, 2.0, 2.0).unwrap();
        assert!(rep.z_exists);
        assert!(rep.e3_bound_holds);
        assert!(2.0 / 3.0 < (3.0f64).exp() / 2.0);

        // z grows as eps -> 1 (lambda pushed further below threshold)
        let mut prev = -1.0;
        for (eps, lam) in [(0.2, 3.0), (0.5, 1.9), (0.8, 0.7), (0.95, 0.19)] {
            let rep = claim_15_2_check(eps, 2.0, lam).unwrap();
            assert!(rep.z > prev);
            prev = rep.z;
        }

        assert!(claim_15_2_check(0.5, 2.0, 3.9).is_err());
    }
}
