//! Pareto stationarity gap via the min-norm point of the gradient hull.
//!
//! The gap at `x` is `min over lambda in the simplex of |sum_i lambda_i grad f_i(x)|`.
//! It is zero exactly when no direction decreases every objective at once,
//! and a positive gap comes with such a direction: `-d / |d|`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, LabError, Result};
use crate::instances::{MooLiftedInstance, Point};
use crate::vector::{dot, norm, norm_sq, sub};

/// Stationarity threshold used when nothing else is configured.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_ITERS: usize = 10_000;
/// Affine weights at or below this are treated as leaving the active face.
const WEIGHT_EPS: f64 = 1e-12;
/// Relative slack in the optimality test `<x, g_j> >= |x|^2`.
const STOP_EPS: f64 = 1e-12;

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexWeights(Vec<f64>);

impl TryFrom<Vec<f64>> for SimplexWeights {
    type Error = LabError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        SimplexWeights::new(v)
    }
}

impl From<SimplexWeights> for Vec<f64> {
    fn from(w: SimplexWeights) -> Self {
        w.0
    }
}

impl SimplexWeights {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        ensure_finite(&lambda, "simplex weights")?;
        if lambda.is_empty() {
            return Err(LabError::InvalidParameter("simplex weights must be nonempty".into()));
        }
        if lambda.iter().any(|&l| l < 0.0) {
            return Err(LabError::InvalidParameter("simplex weights must be nonnegative".into()));
        }
        let s: f64 = lambda.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(LabError::InvalidParameter(format!("simplex weights sum to {s}, not 1")));
        }
        Ok(Self(lambda))
    }

    /// The vertex `e_i` of the `m`-simplex.
    pub fn vertex(i: usize, m: usize) -> Result<Self> {
        if i >= m {
            return Err(LabError::IndexOutOfRange { index: i, m });
        }
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        Ok(Self(v))
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(LabError::InvalidParameter("simplex weights must be nonempty".into()));
        }
        Ok(Self(vec![1.0 / m as f64; m]))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Clip round-off negatives and renormalize.
    fn cleaned(mut raw: Vec<f64>) -> Self {
        for l in raw.iter_mut() {
            if *l < 0.0 {
                *l = 0.0;
            }
        }
        let s: f64 = raw.iter().sum();
        for l in raw.iter_mut() {
            *l /= s;
        }
        Self(raw)
    }
}

/// Result of a min-norm-point solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapCertificate {
    pub gap: f64,
    #[serde(rename = "lambda")]
    pub weights: SimplexWeights,
    /// The convex combination `d = sum_i lambda_i g_i`.
    #[serde(rename = "d")]
    pub min_point: Vec<f64>,
    /// `-d / |d|` when the gap exceeds the tolerance.
    #[serde(rename = "v")]
    pub descent_dir: Option<Vec<f64>>,
}

impl GapCertificate {
    pub fn is_stationary(&self, tol: f64) -> bool {
        self.gap <= tol
    }
}

fn combine(points: &[Vec<f64>], idx: &[usize], w: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; points[0].len()];
    for (&i, &wi) in idx.iter().zip(w) {
        for (xk, pk) in x.iter_mut().zip(&points[i]) {
            *xk += wi * pk;
        }
    }
    x
}

/// Lowest index attaining `min_i <x, p_i>`.
fn argmin_inner(points: &[Vec<f64>], x: &[f64]) -> (usize, f64) {
    let mut best = (0, dot(&points[0], x));
    for (i, p) in points.iter().enumerate().skip(1) {
        let v = dot(p, x);
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// Minimum-norm point of the affine hull of `points[idx]`, as affine weights.
/// `None` when the active points are affinely dependent.
fn affine_minimizer(points: &[Vec<f64>], idx: &[usize]) -> Option<Vec<f64>> {
    let s = idx.len();
    if s == 1 {
        return Some(vec![1.0]);
    }
    let p0 = &points[idx[0]];
    let n = p0.len();
    let d = DMatrix::from_fn(n, s - 1, |r, c| points[idx[c + 1]][r] - p0[r]);
    let rhs = DVector::from_iterator(n, p0.iter().map(|v| -v));
    let svd = d.svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax > 0.0) {
        return None;
    }
    let eps = smax * 1e-12;
    if svd.rank(eps) < s - 1 {
        return None;
    }
    let c = svd.solve(&rhs, eps).ok()?;
    let mut mu = Vec::with_capacity(s);
    mu.push(1.0 - c.iter().sum::<f64>());
    mu.extend(c.iter());
    Some(mu)
}

enum Wolfe {
    Done { idx: Vec<usize>, w: Vec<f64> },
    Stuck { idx: Vec<usize>, w: Vec<f64>, iters: usize },
}

fn wolfe(points: &[Vec<f64>], scale_sq: f64) -> Wolfe {
    let norms: Vec<f64> = points.iter().map(|p| norm_sq(p)).collect();
    let mut start = 0;
    for (i, &v) in norms.iter().enumerate() {
        if v < norms[start] {
            start = i;
        }
    }
    let mut idx = vec![start];
    let mut w = vec![1.0];
    let mut x = points[start].clone();
    let mut iters = 0;
    loop {
        iters += 1;
        if iters > MAX_ITERS {
            return Wolfe::Stuck { idx, w, iters };
        }
        let xx = norm_sq(&x);
        let (j, xj) = argmin_inner(points, &x);
        if xj >= xx - STOP_EPS * scale_sq || idx.contains(&j) {
            return Wolfe::Done { idx, w };
        }
        idx.push(j);
        w.push(0.0);
        // Minor cycle: move toward the affine minimizer until it lies inside the face.
        loop {
            iters += 1;
            if iters > MAX_ITERS {
                return Wolfe::Stuck { idx, w, iters };
            }
            let Some(mu) = affine_minimizer(points, &idx) else {
                return Wolfe::Stuck { idx, w, iters };
            };
            if mu.iter().all(|&m| m > WEIGHT_EPS) {
                w = mu;
                break;
            }
            let mut theta = 1.0_f64;
            for (&wk, &mk) in w.iter().zip(&mu) {
                if mk <= WEIGHT_EPS && wk - mk > 0.0 {
                    theta = theta.min(wk / (wk - mk));
                }
            }
            let mut next: Vec<(usize, f64)> = Vec::with_capacity(idx.len());
            for ((&i, &wk), &mk) in idx.iter().zip(&w).zip(&mu) {
                let v = theta * mk + (1.0 - theta) * wk;
                if v > WEIGHT_EPS {
                    next.push((i, v));
                }
            }
            if next.is_empty() || next.len() == idx.len() {
                return Wolfe::Stuck { idx, w, iters };
            }
            let total: f64 = next.iter().map(|p| p.1).sum();
            idx = next.iter().map(|p| p.0).collect();
            w = next.iter().map(|p| p.1 / total).collect();
        }
        x = combine(points, &idx, &w);
    }
}

/// Away-step Frank-Wolfe over the simplex with exact line search.
fn frank_wolfe(points: &[Vec<f64>], mut lambda: Vec<f64>, scale_sq: f64, budget: usize) -> Result<Vec<f64>> {
    let m = points.len();
    let all: Vec<usize> = (0..m).collect();
    for _ in 0..budget {
        let x = combine(points, &all, &lambda);
        let xx = norm_sq(&x);
        let (j, xj) = argmin_inner(points, &x);
        let fw_gap = xx - xj;
        if fw_gap <= STOP_EPS * scale_sq {
            return Ok(lambda);
        }
        // Away vertex: largest <x, p_i> among the support.
        let mut away = None;
        let mut away_val = f64::NEG_INFINITY;
        for i in 0..m {
            if lambda[i] > 0.0 {
                let v = dot(&points[i], &x);
                if v > away_val {
                    away_val = v;
                    away = Some(i);
                }
            }
        }
        let away = away.unwrap_or(j);
        let (dir, max_step) = if fw_gap >= away_val - xx || lambda[away] >= 1.0 {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            (sub(&e, &lambda), 1.0)
        } else {
            let mut e = vec![0.0; m];
            e[away] = 1.0;
            let a = lambda[away];
            (sub(&lambda, &e), a / (1.0 - a))
        };
        let dx = combine(points, &all, &dir);
        let dd = norm_sq(&dx);
        if dd == 0.0 {
            return Ok(lambda);
        }
        let step = (-dot(&x, &dx) / dd).clamp(0.0, max_step);
        for (l, d) in lambda.iter_mut().zip(&dir) {
            *l = (*l + step * d).max(0.0);
        }
        let s: f64 = lambda.iter().sum();
        lambda.iter_mut().for_each(|l| *l /= s);
    }
    Err(LabError::Convergence(format!(
        "min-norm point did not reach optimality within {MAX_ITERS} iterations"
    )))
}

/// Minimum-norm point of `conv{gradients}` with its simplex weights.
///
/// Ties go to the lowest index. An all-zero input yields gap 0 with full
/// weight on the first zero gradient.
pub fn min_norm_point(gradients: &[Vec<f64>], tol: f64) -> Result<GapCertificate> {
    if gradients.is_empty() {
        return Err(LabError::InvalidParameter("need at least one gradient".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(LabError::InvalidParameter(format!("tolerance must be finite and > 0, got {tol}")));
    }
    let n = gradients[0].len();
    for g in gradients {
        if g.len() != n {
            return Err(LabError::DimensionMismatch { what: "gradient", expected: n, got: g.len() });
        }
        ensure_finite(g, "gradient")?;
    }
    let m = gradients.len();
    let scale_sq = gradients.iter().map(|g| norm_sq(g)).fold(0.0, f64::max);

    let lambda = if scale_sq == 0.0 {
        SimplexWeights::vertex(0, m)?.0
    } else {
        match wolfe(gradients, scale_sq) {
            Wolfe::Done { idx, w } => {
                let mut full = vec![0.0; m];
                for (i, wi) in idx.into_iter().zip(w) {
                    full[i] = wi;
                }
                full
            }
            Wolfe::Stuck { idx, w, iters } => {
                let mut full = vec![0.0; m];
                for (i, wi) in idx.into_iter().zip(w) {
                    full[i] = wi.max(0.0);
                }
                let s: f64 = full.iter().sum();
                full.iter_mut().for_each(|l| *l /= s);
                frank_wolfe(gradients, full, scale_sq, MAX_ITERS.saturating_sub(iters).max(1))?
            }
        }
    };
    let weights = SimplexWeights::cleaned(lambda);
    let all: Vec<usize> = (0..m).collect();
    let d = combine(gradients, &all, weights.as_slice());
    let gap = norm(&d);
    let descent_dir = (gap > tol).then(|| d.iter().map(|v| -v / gap).collect());
    Ok(GapCertificate { gap, weights, min_point: d, descent_dir })
}

/// Gap of a lifted instance at `x`, from its `m` gradients.
pub fn pareto_gap(inst: &MooLiftedInstance, x: &Point, tol: f64) -> Result<GapCertificate> {
    let grads = inst.gradients(x)?;
    min_norm_point(&grads, tol)
}

/// `sqrt(|grad g(x_V)|^2 + gamma^2 dist(x_W, conv{a_i})^2)`, which equals the
/// gap on lifted instances because the `V` block is shared by every objective.
pub fn lifted_gap_closed_form(inst: &MooLiftedInstance, x: &Point) -> Result<f64> {
    inst.check_point(x)?;
    let gv = inst.g().grad(&x.v);
    let dw = dist_to_hull(&x.w, inst.anchors(), DEFAULT_TOL)?;
    let gw = inst.gamma() * dw;
    Ok((norm_sq(&gv) + gw * gw).sqrt())
}

/// A unit direction strictly decreasing every linearization, or `None` when
/// the gap is within `tol`.
pub fn common_descent_direction(gradients: &[Vec<f64>], tol: f64) -> Result<Option<Vec<f64>>> {
    Ok(min_norm_point(gradients, tol)?.descent_dir)
}

/// Euclidean distance from `point` to `conv{anchors}`.
pub fn dist_to_hull(point: &[f64], anchors: &[Vec<f64>], tol: f64) -> Result<f64> {
    if anchors.is_empty() {
        return Err(LabError::InvalidParameter("hull needs at least one anchor".into()));
    }
    let shifted: Vec<Vec<f64>> = anchors
        .iter()
        .map(|a| {
            if a.len() != point.len() {
                Err(LabError::DimensionMismatch { what: "anchor", expected: point.len(), got: a.len() })
            } else {
                Ok(sub(a, point))
            }
        })
        .collect::<Result<_>>()?;
    Ok(min_norm_point(&shifted, tol)?.gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() <= eps
    }

    #[test]
    fn single_gradient() {
        let c = min_norm_point(&[vec![3.0, 4.0]], DEFAULT_TOL).unwrap();
        assert_eq!(c.gap, 5.0);
        assert_eq!(c.weights.as_slice(), &[1.0]);
    }

    #[test]
    fn symmetric_cancellation() {
        let c = min_norm_point(&[vec![1.0, 0.0], vec![-1.0, 0.0]], DEFAULT_TOL).unwrap();
        assert!(c.gap <= 1e-15);
        assert!(c.descent_dir.is_none());
        let l = c.weights.as_slice();
        assert!(close(l[0], 0.5, 1e-12) && close(l[1], 0.5, 1e-12));
    }

    #[test]
    fn orthogonal_pair_matches_grid_search() {
        let g = [vec![1.0, 0.0], vec![0.0, 1.0]];
        let c = min_norm_point(&g, DEFAULT_TOL).unwrap();
        let brute = (0..=100_000)
            .map(|k| {
                let t = k as f64 * 1e-5;
                (t * t + (1.0 - t) * (1.0 - t)).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(close(c.gap, brute, 1e-10));
        assert!(close(c.gap, 0.5f64.sqrt(), 1e-14));
        assert!(close(c.min_point[0], 0.5, 1e-14) && close(c.min_point[1], 0.5, 1e-14));
    }

    #[test]
    fn zero_gradient_takes_first() {
        let c = min_norm_point(&[vec![1.0, 2.0], vec![0.0, 0.0], vec![0.0, 0.0]], DEFAULT_TOL).unwrap();
        assert_eq!(c.gap, 0.0);
        assert_eq!(c.weights.as_slice(), &[0.0, 1.0, 0.0]);
        let c = min_norm_point(&[vec![0.0], vec![0.0]], DEFAULT_TOL).unwrap();
        assert_eq!(c.weights.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(min_norm_point(&[], DEFAULT_TOL).is_err());
        assert!(min_norm_point(&[vec![1.0], vec![1.0, 2.0]], DEFAULT_TOL).is_err());
        assert!(matches!(
            min_norm_point(&[vec![f64::NAN]], DEFAULT_TOL),
            Err(LabError::NonFinite(_))
        ));
        assert!(min_norm_point(&[vec![1.0]], 0.0).is_err());
    }

    #[test]
    fn descent_direction_examples() {
        let v = common_descent_direction(&[vec![1.0, 0.0], vec![0.0, 1.0]], DEFAULT_TOL)
            .unwrap()
            .unwrap();
        let s = 0.5f64.sqrt();
        assert!(close(v[0], -s, 1e-14) && close(v[1], -s, 1e-14));
        assert!(common_descent_direction(&[vec![1.0, 0.0], vec![-1.0, 0.0]], DEFAULT_TOL)
            .unwrap()
            .is_none());
        let v = common_descent_direction(&[vec![1.0, 1.0]], DEFAULT_TOL).unwrap().unwrap();
        assert!(close(dot(&v, &[1.0, 1.0]), -(2f64.sqrt()), 1e-14));
    }

    #[test]
    fn hull_distance_examples() {
        let a = vec![vec![-1.0], vec![1.0]];
        assert_eq!(dist_to_hull(&[-1.0], &a, DEFAULT_TOL).unwrap(), 0.0);
        assert!(close(dist_to_hull(&[2.0], &a, DEFAULT_TOL).unwrap(), 1.0, 1e-15));
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(close(dist_to_hull(&[1.0, 1.0], &tri, DEFAULT_TOL).unwrap(), 0.5f64.sqrt(), 1e-14));
    }

    #[test]
    fn weights_validation() {
        assert!(SimplexWeights::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexWeights::new(vec![0.6, 0.5]).is_err());
        assert!(SimplexWeights::new(vec![-0.1, 1.1]).is_err());
        let json = serde_json::to_string(&SimplexWeights::uniform(4).unwrap()).unwrap();
        assert_eq!(json, "[0.25,0.25,0.25,0.25]");
    }

    #[test]
    fn certificate_json_keys() {
        let c = min_norm_point(&[vec![1.0, 0.0], vec![0.0, 1.0]], DEFAULT_TOL).unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        for k in ["gap", "lambda", "d", "v"] {
            assert!(v.get(k).is_some(), "missing {k}");
        }
    }
}
