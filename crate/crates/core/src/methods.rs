//! First-order methods run against the instance oracles.
//!
//! Every runner returns an [`IterateTrace`] holding `T + 1` iterates
//! (`x0` included) with the objective suboptimality and gradient norm at each.
//! `T = 0` is allowed and yields the starting point only.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, LabError, Result};
use crate::instances::{MooLiftedInstance, Point, SpectralQuadratic};
use crate::stationarity::{min_norm_point, pareto_gap, SimplexWeights};
use crate::vector::{all_finite, axpy, norm, norm_sq, sub};

/// Pre-scheduled step sizes, each in `[0, 1/L]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    alphas: Vec<f64>,
    cap: f64,
}

fn check_l(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(LabError::InvalidParameter(format!("L must be finite and > 0, got {l}")))
    }
}

impl StepSchedule {
    pub fn new(alphas: Vec<f64>, l: f64) -> Result<Self> {
        check_l(l)?;
        ensure_finite(&alphas, "step schedule")?;
        let s = Self { alphas, cap: 1.0 / l };
        s.check_cap(s.cap)?;
        Ok(s)
    }

    pub fn constant(alpha: f64, len: usize, l: f64) -> Result<Self> {
        Self::new(vec![alpha; len], l)
    }

    /// `len` steps drawn uniformly from `[0, 1/L]`.
    pub fn random<R: Rng + ?Sized>(len: usize, l: f64, rng: &mut R) -> Result<Self> {
        check_l(l)?;
        let cap = 1.0 / l;
        let alphas = (0..len).map(|_| rng.gen_range(0.0..=cap)).collect();
        Ok(Self { alphas, cap })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// First `t` steps.
    pub fn prefix(&self, t: usize) -> Self {
        Self { alphas: self.alphas[..t.min(self.len())].to_vec(), cap: self.cap }
    }

    /// Fails on the first step outside `[0, cap]`.
    pub fn check_cap(&self, cap: f64) -> Result<()> {
        for (k, &alpha) in self.alphas.iter().enumerate() {
            if !(alpha >= 0.0 && alpha <= cap) {
                return Err(LabError::StepCap { k, alpha, cap });
            }
        }
        Ok(())
    }
}

/// A smooth convex objective with known optimal value.
pub trait GradientOracle {
    fn dim(&self) -> usize;
    /// Smoothness constant `L` of the gradient.
    fn smoothness(&self) -> f64;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// `f(x) - f*`, computed without cancellation where possible.
    fn suboptimality(&self, x: &[f64]) -> f64;
}

impl GradientOracle for SpectralQuadratic {
    fn dim(&self) -> usize {
        SpectralQuadratic::dim(self)
    }

    fn smoothness(&self) -> f64 {
        self.l()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.grad(x)
    }

    fn suboptimality(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }
}

/// The weighted sum `f_lambda = sum_i lambda_i f_i` of a lifted instance,
/// acting on flat points `[x_V, x_W]`.
#[derive(Debug, Clone)]
pub struct Scalarization<'a> {
    inst: &'a MooLiftedInstance,
    weights: SimplexWeights,
    center: Vec<f64>,
}

pub fn scalarize<'a>(inst: &'a MooLiftedInstance, weights: SimplexWeights) -> Result<Scalarization<'a>> {
    if weights.len() != inst.m() {
        return Err(LabError::DimensionMismatch { what: "weights", expected: inst.m(), got: weights.len() });
    }
    let mut center = vec![0.0; inst.dim_w()];
    for (a, &l) in inst.anchors().iter().zip(weights.as_slice()) {
        axpy(l, a, &mut center);
    }
    Ok(Scalarization { inst, weights, center })
}

impl<'a> Scalarization<'a> {
    pub fn weights(&self) -> &SimplexWeights {
        &self.weights
    }

    /// `sum_i lambda_i a_i`, the `W` block of the minimizer.
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// `(0, sum_i lambda_i a_i)`.
    pub fn minimizer(&self) -> Point {
        Point::new(vec![0.0; self.inst.dim_v()], self.center.clone())
    }

    /// Distance `R_lambda` from `x0` to the minimizer.
    pub fn radius_from(&self, x0: &Point) -> f64 {
        (norm_sq(&x0.v) + norm_sq(&sub(&x0.w, &self.center))).sqrt()
    }

    fn split<'b>(&self, x: &'b [f64]) -> (&'b [f64], &'b [f64]) {
        x.split_at(self.inst.dim_v())
    }
}

impl GradientOracle for Scalarization<'_> {
    fn dim(&self) -> usize {
        self.inst.dim()
    }

    fn smoothness(&self) -> f64 {
        self.inst.smoothness()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (v, w) = self.split(x);
        let spread: f64 = self
            .inst
            .anchors()
            .iter()
            .zip(self.weights.as_slice())
            .map(|(a, l)| l * norm_sq(&sub(w, a)))
            .sum();
        self.inst.g().eval(v) + 0.5 * self.inst.gamma() * spread
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (v, w) = self.split(x);
        let gamma = self.inst.gamma();
        let mut out = self.inst.g().grad(v);
        out.extend(w.iter().zip(&self.center).map(|(wi, ci)| gamma * (wi - ci)));
        out
    }

    fn suboptimality(&self, x: &[f64]) -> f64 {
        let (v, w) = self.split(x);
        self.inst.g().eval(v) + 0.5 * self.inst.gamma() * norm_sq(&sub(w, &self.center))
    }
}

/// Iterates of one run with per-iterate diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateTrace {
    pub method_tag: String,
    pub points: Vec<Vec<f64>>,
    pub fvals: Vec<f64>,
    pub f_gaps: Vec<f64>,
    pub grad_norms: Vec<f64>,
    /// Pareto gaps, filled for multiobjective runs.
    pub gaps: Option<Vec<f64>>,
}

impl IterateTrace {
    fn new(method_tag: &str) -> Self {
        Self {
            method_tag: method_tag.to_string(),
            points: Vec::new(),
            fvals: Vec::new(),
            f_gaps: Vec::new(),
            grad_norms: Vec::new(),
            gaps: None,
        }
    }

    fn record<O: GradientOracle + ?Sized>(&mut self, oracle: &O, x: &[f64]) -> Result<()> {
        if !all_finite(x) {
            return Err(LabError::Divergence { method: self.method_tag.clone(), step: self.points.len() });
        }
        self.fvals.push(oracle.value(x));
        self.f_gaps.push(oracle.suboptimality(x));
        self.grad_norms.push(norm(&oracle.gradient(x)));
        self.points.push(x.to_vec());
        Ok(())
    }

    /// Number of steps `T`.
    pub fn steps(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn last_point(&self) -> &[f64] {
        self.points.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Fill `gaps` with the Pareto gap of every iterate on `inst`.
    pub fn with_pareto_gaps(mut self, inst: &MooLiftedInstance, tol: f64) -> Result<Self> {
        let gaps = self
            .points
            .iter()
            .map(|p| pareto_gap(inst, &Point::from_flat(p, inst.dim_v()), tol).map(|c| c.gap))
            .collect::<Result<Vec<_>>>()?;
        self.gaps = Some(gaps);
        Ok(self)
    }

    /// Largest violation ratio of `|grad f|^2 <= 2 L (f - f*)` over the trace,
    /// as `|grad f|^2 / (2 L (f - f*))`; zero-gradient iterates count as 0.
    pub fn descent_lemma_ratio(&self, l: f64) -> f64 {
        self.grad_norms
            .iter()
            .zip(&self.f_gaps)
            .map(|(g, f)| {
                let lhs = g * g;
                if lhs == 0.0 {
                    0.0
                } else {
                    lhs / (2.0 * l * f)
                }
            })
            .fold(0.0, f64::max)
    }
}

fn check_start<O: GradientOracle + ?Sized>(oracle: &O, x0: &[f64]) -> Result<()> {
    if x0.len() != oracle.dim() {
        return Err(LabError::DimensionMismatch { what: "x0", expected: oracle.dim(), got: x0.len() });
    }
    ensure_finite(x0, "x0")
}

fn check_smoothness<O: GradientOracle + ?Sized>(oracle: &O, l: f64) -> Result<()> {
    check_l(l)?;
    if l < oracle.smoothness() {
        return Err(LabError::InvalidParameter(format!(
            "L={l} is below the oracle smoothness {}",
            oracle.smoothness()
        )));
    }
    Ok(())
}

/// `x_{t+1} = x_t - alpha_t grad f(x_t)` for `t < T`.
pub fn run_oblivious_gd<O: GradientOracle + ?Sized>(
    oracle: &O,
    schedule: &StepSchedule,
    x0: &[f64],
    t_max: usize,
) -> Result<IterateTrace> {
    check_start(oracle, x0)?;
    if schedule.len() < t_max {
        return Err(LabError::InvalidParameter(format!(
            "schedule has {} steps, {t_max} requested",
            schedule.len()
        )));
    }
    schedule.check_cap(1.0 / oracle.smoothness())?;
    let mut trace = IterateTrace::new("gd");
    let mut x = x0.to_vec();
    trace.record(oracle, &x)?;
    for &alpha in &schedule.alphas()[..t_max] {
        let g = oracle.gradient(&x);
        axpy(-alpha, &g, &mut x);
        trace.record(oracle, &x)?;
    }
    Ok(trace)
}

/// Momentum rule of an accelerated run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Momentum {
    /// `t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2`, weight `(t_k - 1) / t_{k+1}`.
    Convex { t_k: f64 },
    /// Constant weight `beta = (1 - q) / (1 + q)` with `q = sqrt(mu / L)`.
    Constant { q: f64, beta: f64 },
}

/// Iterate, extrapolation point and momentum of an accelerated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgdState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub momentum: Momentum,
}

impl AgdState {
    pub fn convex(x0: &[f64]) -> Self {
        Self { x: x0.to_vec(), y: x0.to_vec(), momentum: Momentum::Convex { t_k: 1.0 } }
    }

    pub fn strongly_convex(x0: &[f64], l: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu <= l && l.is_finite()) {
            return Err(LabError::InvalidParameter(format!("need L >= mu > 0, got L={l}, mu={mu}")));
        }
        let q = (mu / l).sqrt();
        let beta = (1.0 - q) / (1.0 + q);
        Ok(Self { x: x0.to_vec(), y: x0.to_vec(), momentum: Momentum::Constant { q, beta } })
    }

    /// One gradient step from `y` followed by extrapolation.
    pub fn advance<O: GradientOracle + ?Sized>(&mut self, oracle: &O, l: f64) {
        let g = oracle.gradient(&self.y);
        let mut next = self.y.clone();
        axpy(-1.0 / l, &g, &mut next);
        let weight = match &mut self.momentum {
            Momentum::Convex { t_k } => {
                let t_next = next_momentum(*t_k);
                let w = (*t_k - 1.0) / t_next;
                *t_k = t_next;
                w
            }
            Momentum::Constant { beta, .. } => *beta,
        };
        let diff = sub(&next, &self.x);
        self.y = next.clone();
        axpy(weight, &diff, &mut self.y);
        self.x = next;
    }
}

/// `(1 + sqrt(1 + 4 t^2)) / 2`.
pub fn next_momentum(t: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt())
}

fn run_agd<O: GradientOracle + ?Sized>(
    oracle: &O,
    l: f64,
    mut state: AgdState,
    t_max: usize,
    tag: &str,
) -> Result<IterateTrace> {
    let mut trace = IterateTrace::new(tag);
    trace.record(oracle, &state.x)?;
    for _ in 0..t_max {
        state.advance(oracle, l);
        trace.record(oracle, &state.x)?;
    }
    Ok(trace)
}

/// Accelerated gradient for smooth convex objectives.
pub fn run_agd_convex<O: GradientOracle + ?Sized>(
    oracle: &O,
    l: f64,
    x0: &[f64],
    t_max: usize,
) -> Result<IterateTrace> {
    check_start(oracle, x0)?;
    check_smoothness(oracle, l)?;
    run_agd(oracle, l, AgdState::convex(x0), t_max, "agd")
}

/// Accelerated gradient with constant momentum for strongly convex objectives.
pub fn run_agd_strongly_convex<O: GradientOracle + ?Sized>(
    oracle: &O,
    l: f64,
    mu: f64,
    x0: &[f64],
    t_max: usize,
) -> Result<IterateTrace> {
    check_start(oracle, x0)?;
    check_smoothness(oracle, l)?;
    let state = AgdState::strongly_convex(x0, l, mu)?;
    run_agd(oracle, l, state, t_max, "agd-sc")
}

/// Chebyshev semi-iteration on `[mu, L]`.
///
/// On a quadratic with spectrum in `[mu, L]` the error after `t` steps is
/// `T_t(xi(H)) / T_t(xi0)` applied to the initial error. When `mu = L` the
/// interval is a point and the method is gradient descent with step `1/L`.
pub fn run_chebyshev_iteration<O: GradientOracle + ?Sized>(
    oracle: &O,
    mu: f64,
    l: f64,
    x0: &[f64],
    t_max: usize,
) -> Result<IterateTrace> {
    check_start(oracle, x0)?;
    ensure_finite(&[mu, l], "Chebyshev interval")?;
    if !(mu > 0.0) {
        return Err(LabError::InvalidParameter(format!(
            "Chebyshev iteration needs mu > 0, got {mu}"
        )));
    }
    check_smoothness(oracle, l)?;
    if mu > l {
        return Err(LabError::InvalidParameter(format!("need mu <= L, got mu={mu}, L={l}")));
    }
    let theta = 0.5 * (l + mu);
    let delta = 0.5 * (l - mu);
    let mut trace = IterateTrace::new("chebyshev");
    let mut x = x0.to_vec();
    trace.record(oracle, &x)?;
    if t_max == 0 {
        return Ok(trace);
    }
    let residual = |x: &[f64]| -> Vec<f64> { oracle.gradient(x).into_iter().map(|g| -g).collect() };
    let mut d: Vec<f64> = residual(&x).into_iter().map(|r| r / theta).collect();
    let sigma = if delta > 0.0 { theta / delta } else { f64::INFINITY };
    let mut rho = 1.0 / sigma;
    for k in 0..t_max {
        axpy(1.0, &d, &mut x);
        trace.record(oracle, &x)?;
        if k + 1 == t_max {
            break;
        }
        let r = residual(&x);
        if delta > 0.0 {
            let rho_next = 1.0 / (2.0 * sigma - rho);
            let keep = rho_next * rho;
            let push = 2.0 * rho_next / delta;
            for (di, ri) in d.iter_mut().zip(&r) {
                *di = keep * *di + push * ri;
            }
            rho = rho_next;
        } else {
            d = r.into_iter().map(|ri| ri / theta).collect();
        }
    }
    Ok(trace)
}

/// Multiple-gradient descent: `x <- x - step * d` with `d` the min-norm point
/// of the objective gradients. Stops once the gap is within `tol`.
///
/// `f_gaps` hold the suboptimality of the scalarization weighted by the
/// current min-norm weights, and `grad_norms` its gradient norm (the gap).
pub fn run_mgda(
    inst: &MooLiftedInstance,
    x0: &Point,
    step: f64,
    t_max: usize,
    tol: f64,
) -> Result<IterateTrace> {
    inst.check_point(x0)?;
    ensure_finite(&x0.flat(), "x0")?;
    let l = inst.smoothness();
    if !(step > 0.0 && step <= 1.0 / l) {
        return Err(LabError::InvalidParameter(format!("MGDA step must lie in (0, 1/L], got {step}")));
    }
    let mut trace = IterateTrace::new("mgda");
    let mut gaps = Vec::new();
    let mut x = x0.flat();
    for t in 0..=t_max {
        if !all_finite(&x) {
            return Err(LabError::Divergence { method: trace.method_tag.clone(), step: t });
        }
        let p = Point::from_flat(&x, inst.dim_v());
        let cert = min_norm_point(&inst.gradients(&p)?, tol)?;
        let scal = scalarize(inst, cert.weights.clone())?;
        trace.points.push(x.clone());
        trace.fvals.push(scal.value(&x));
        trace.f_gaps.push(scal.suboptimality(&x));
        trace.grad_norms.push(cert.gap);
        gaps.push(cert.gap);
        if cert.gap <= tol || t == t_max {
            break;
        }
        axpy(-step, &cert.min_point, &mut x);
    }
    trace.gaps = Some(gaps);
    Ok(trace)
}

/// `min_{s <= t} values[s]` for each `t`.
pub fn running_min(values: &[f64]) -> Vec<f64> {
    let mut best = f64::INFINITY;
    values
        .iter()
        .map(|&v| {
            best = best.min(v);
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{lift_to_moo, make_strongly_convex_hard};
    use crate::stationarity::DEFAULT_TOL;

    fn scalar(eig: f64) -> SpectralQuadratic {
        SpectralQuadratic::new(vec![eig], vec![1.0], 0.0, eig).unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(StepSchedule::new(vec![0.5, 1.0], 1.0).is_ok());
        assert!(matches!(
            StepSchedule::new(vec![0.5, 1.5], 1.0),
            Err(LabError::StepCap { k: 1, .. })
        ));
        assert!(StepSchedule::new(vec![-0.1], 1.0).is_err());
        assert!(StepSchedule::new(vec![0.1], 0.0).is_err());
    }

    #[test]
    fn gd_examples() {
        let g = scalar(1.0);
        let s = StepSchedule::constant(1.0, 3, 1.0).unwrap();
        let tr = run_oblivious_gd(&g, &s, &[1.0], 1).unwrap();
        assert_eq!(tr.points[1], vec![0.0]);

        let s = StepSchedule::constant(0.5, 2, 1.0).unwrap();
        let tr = run_oblivious_gd(&g, &s, &[1.0], 2).unwrap();
        let xs: Vec<f64> = tr.points.iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![1.0, 0.5, 0.25]);

        assert!(run_oblivious_gd(&g, &s, &[1.0], 3).is_err());
        let too_big = StepSchedule::constant(0.9, 2, 1.0).unwrap();
        let g2 = SpectralQuadratic::new(vec![2.0], vec![1.0], 0.0, 2.0).unwrap();
        assert!(matches!(run_oblivious_gd(&g2, &too_big, &[1.0], 2), Err(LabError::StepCap { .. })));
    }

    #[test]
    fn gd_zero_steps_keeps_start() {
        let g = scalar(1.0);
        let s = StepSchedule::new(vec![], 1.0).unwrap();
        let tr = run_oblivious_gd(&g, &s, &[0.7], 0).unwrap();
        assert_eq!(tr.points, vec![vec![0.7]]);
        assert_eq!(tr.steps(), 0);
    }

    #[test]
    fn agd_examples() {
        let g = scalar(1.0);
        let tr = run_agd_convex(&g, 1.0, &[1.0], 4).unwrap();
        assert!(tr.points[1..].iter().all(|p| p[0] == 0.0));
        assert!((next_momentum(1.0) - 1.618_033_988_749_895).abs() < 1e-15);

        let st = AgdState::strongly_convex(&[1.0], 4.0, 1.0).unwrap();
        match st.momentum {
            Momentum::Constant { q, beta } => {
                assert_eq!(q, 0.5);
                assert!((beta - 1.0 / 3.0).abs() < 1e-16);
            }
            _ => unreachable!(),
        }
        let g = SpectralQuadratic::new(vec![3.0], vec![1.0], 3.0, 3.0).unwrap();
        let tr = run_agd_strongly_convex(&g, 3.0, 3.0, &[1.0], 3).unwrap();
        assert_eq!(tr.points[1], vec![0.0]);
        assert!(run_agd_strongly_convex(&g, 3.0, 0.0, &[1.0], 3).is_err());
    }

    #[test]
    fn chebyshev_examples() {
        // On the two-node spectrum {1, 9} a single step applies 1 - zeta / 5.
        let g = SpectralQuadratic::new(vec![1.0, 9.0], vec![1.0, 1.0], 1.0, 9.0).unwrap();
        let tr = run_chebyshev_iteration(&g, 1.0, 9.0, &[1.0, 1.0], 1).unwrap();
        assert!((tr.points[1][0] - 0.8).abs() < 1e-15);
        assert!((tr.points[1][1] + 0.8).abs() < 1e-15);

        let g = SpectralQuadratic::new(vec![2.0], vec![1.0], 2.0, 2.0).unwrap();
        let tr = run_chebyshev_iteration(&g, 2.0, 2.0, &[1.0], 2).unwrap();
        assert_eq!(tr.points[1], vec![0.0]);

        let g = scalar(1.0);
        assert!(run_chebyshev_iteration(&g, 0.0, 1.0, &[1.0], 2).is_err());
    }

    #[test]
    fn scalarization_examples() {
        let g = SpectralQuadratic::new(vec![1.0], vec![1.0], 0.0, 1.0).unwrap();
        let inst = lift_to_moo(g, vec![vec![-1.0], vec![1.0]], false).unwrap();
        let half = scalarize(&inst, SimplexWeights::uniform(2).unwrap()).unwrap();
        let gr = half.gradient(&[0.3, 0.7]);
        assert_eq!(gr, vec![0.3, 0.7]);
        assert_eq!(half.minimizer(), Point::new(vec![0.0], vec![0.0]));

        let e1 = scalarize(&inst, SimplexWeights::vertex(0, 2).unwrap()).unwrap();
        let x = Point::new(vec![0.4], vec![0.2]);
        let (v, gr) = inst.oracle_eval(0, &x).unwrap();
        assert_eq!(e1.value(&x.flat()), v);
        assert_eq!(e1.gradient(&x.flat()), gr);
        assert!((e1.suboptimality(&x.flat()) - v).abs() < 1e-16);
    }

    #[test]
    fn mgda_examples() {
        let g = SpectralQuadratic::new(vec![1.0], vec![1.0], 0.0, 1.0).unwrap();
        let inst = lift_to_moo(g, vec![vec![-1.0], vec![1.0]], false).unwrap();
        let stationary = Point::new(vec![0.0], vec![0.5]);
        let tr = run_mgda(&inst, &stationary, 1.0, 10, DEFAULT_TOL).unwrap();
        assert_eq!(tr.steps(), 0);
        assert!(tr.gaps.as_ref().unwrap()[0] <= DEFAULT_TOL);

        let tr = run_mgda(&inst, &Point::new(vec![2.0], vec![3.0]), 1.0, 20, DEFAULT_TOL).unwrap();
        let gaps = tr.gaps.unwrap();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        assert!(run_mgda(&inst, &stationary, 1.5, 10, DEFAULT_TOL).is_err());
    }

    #[test]
    fn pareto_gaps_attach() {
        let g = make_strongly_convex_hard(4.0, 1.0, 2, 1.0).unwrap();
        let inst = lift_to_moo(g, vec![vec![0.0], vec![1.0]], true).unwrap();
        let oracle = scalarize(&inst, SimplexWeights::vertex(0, 2).unwrap()).unwrap();
        let x0 = inst.initial_point().flat();
        let tr = run_chebyshev_iteration(&oracle, 1.0, 4.0, &x0, 2).unwrap().with_pareto_gaps(&inst, DEFAULT_TOL).unwrap();
        assert_eq!(tr.gaps.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn running_min_is_monotone() {
        assert_eq!(running_min(&[3.0, 1.0, 2.0, 0.5]), vec![3.0, 1.0, 1.0, 0.5]);
    }
}
