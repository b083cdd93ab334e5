//! Hard quadratic instances and their non-degenerate multiobjective lifting.
//!
//! A [`SpectralQuadratic`] is written in its eigenbasis with the minimizer at
//! the origin, so a point is its own error vector and the gradient is
//! `zeta_i * x_i` componentwise. [`MooLiftedInstance`] adds a coupling block
//! `W` holding `m` affinely independent anchors:
//! `f_i(x) = g(x_V) + (gamma / 2) |x_W - a_i|^2`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, LabError, Result};
use crate::methods::StepSchedule;
use crate::polynomials::product_extremal;
use crate::stationarity::{dist_to_hull, DEFAULT_TOL};
use crate::vector::{norm_sq, sub};

/// Largest eigenvalue count accepted for an instance.
pub const MAX_EIGS: usize = 10_000;

/// A convex quadratic `g(x) = 1/2 sum_i zeta_i x_i^2` in its eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectralDoc", into = "SpectralDoc")]
pub struct SpectralQuadratic {
    eigs: Vec<f64>,
    e0: Vec<f64>,
    mu: f64,
    l: f64,
}

#[derive(Serialize, Deserialize)]
struct SpectralDoc {
    eigs: Vec<f64>,
    e0: Vec<f64>,
    mu: f64,
    #[serde(rename = "L")]
    l: f64,
}

impl TryFrom<SpectralDoc> for SpectralQuadratic {
    type Error = LabError;
    fn try_from(d: SpectralDoc) -> Result<Self> {
        SpectralQuadratic::new(d.eigs, d.e0, d.mu, d.l)
    }
}

impl From<SpectralQuadratic> for SpectralDoc {
    fn from(g: SpectralQuadratic) -> Self {
        SpectralDoc { eigs: g.eigs, e0: g.e0, mu: g.mu, l: g.l }
    }
}

impl SpectralQuadratic {
    /// Validate and build. Every eigenvalue must lie in `[mu, L]`.
    pub fn new(eigs: Vec<f64>, e0: Vec<f64>, mu: f64, l: f64) -> Result<Self> {
        ensure_finite(&eigs, "eigenvalues")?;
        ensure_finite(&e0, "initial error")?;
        ensure_finite(&[mu, l], "spectrum bounds")?;
        if eigs.is_empty() {
            return Err(LabError::InvalidParameter("instance needs at least one eigenvalue".into()));
        }
        if eigs.len() > MAX_EIGS {
            return Err(LabError::InvalidParameter(format!(
                "{} eigenvalues exceed the cap {MAX_EIGS}",
                eigs.len()
            )));
        }
        if e0.len() != eigs.len() {
            return Err(LabError::DimensionMismatch { what: "e0", expected: eigs.len(), got: e0.len() });
        }
        if !(mu >= 0.0 && l > 0.0 && mu <= l) {
            return Err(LabError::InvalidParameter(format!(
                "spectrum bounds need 0 <= mu <= L, L > 0; got mu={mu}, L={l}"
            )));
        }
        if let Some(z) = eigs.iter().find(|&&z| z < mu || z > l) {
            return Err(LabError::InvalidParameter(format!(
                "eigenvalue {z} outside the declared spectrum [{mu}, {l}]"
            )));
        }
        Ok(Self { eigs, e0, mu, l })
    }

    pub fn eigs(&self) -> &[f64] {
        &self.eigs
    }

    pub fn e0(&self) -> &[f64] {
        &self.e0
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.eigs.len()
    }

    /// Initialization radius `|e0|`.
    pub fn radius(&self) -> f64 {
        norm_sq(&self.e0).sqrt()
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.mu > 0.0
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        0.5 * self.eigs.iter().zip(x).map(|(z, v)| z * v * v).sum::<f64>()
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        self.eigs.iter().zip(x).map(|(z, v)| z * v).collect()
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(LabError::InvalidParameter(format!("radius must be finite and > 0, got {r}")))
    }
}

/// The `T + 1` Chebyshev alternation nodes of `[mu, L]` as the spectrum,
/// with equal initial mass on each.
pub fn make_strongly_convex_hard(l: f64, mu: f64, t: usize, r: f64) -> Result<SpectralQuadratic> {
    ensure_finite(&[l, mu, r], "strongly convex instance parameters")?;
    if !(mu > 0.0) {
        return Err(LabError::InvalidParameter(format!("strong convexity needs mu > 0, got {mu}")));
    }
    if l < mu {
        return Err(LabError::InvalidParameter(format!("need L >= mu, got L={l}, mu={mu}")));
    }
    if t < 1 {
        return Err(LabError::InvalidParameter("iteration count must be >= 1".into()));
    }
    check_radius(r)?;
    if t + 1 > MAX_EIGS {
        return Err(LabError::InvalidParameter(format!("T={t} exceeds the eigenvalue cap")));
    }
    let mid = 0.5 * (l + mu);
    let half = 0.5 * (l - mu);
    let mut eigs: Vec<f64> = (0..=t)
        .map(|j| {
            let z = mid - half * (j as f64 * std::f64::consts::PI / t as f64).cos();
            z.clamp(mu, l)
        })
        .collect();
    eigs[0] = mu;
    eigs[t] = l;
    let e0 = vec![r / ((t + 1) as f64).sqrt(); t + 1];
    SpectralQuadratic::new(eigs, e0, mu, l)
}

/// One-dimensional convex instance with its eigenvalue at the maximizer of
/// `zeta * prod_k (1 - alpha_k zeta)` on `[0, L]`.
pub fn make_convex_hard_for_schedule(
    l: f64,
    schedule: &StepSchedule,
    r: f64,
) -> Result<SpectralQuadratic> {
    ensure_finite(&[l, r], "convex instance parameters")?;
    check_radius(r)?;
    let ext = product_extremal(schedule, l)?;
    SpectralQuadratic::new(vec![ext.zeta_star.clamp(0.0, l)], vec![r], 0.0, l)
}

/// Uniform spectrum `{L/n, 2L/n, ..., L}` with equal initial mass.
pub fn make_markov_grid_instance(l: f64, t: usize, r: f64, n_nodes: usize) -> Result<SpectralQuadratic> {
    ensure_finite(&[l, r], "Markov instance parameters")?;
    if !(l > 0.0) {
        return Err(LabError::InvalidParameter(format!("L must be > 0, got {l}")));
    }
    check_radius(r)?;
    let floor = 4 * (t + 1) * (t + 1);
    if n_nodes < floor {
        return Err(LabError::InvalidParameter(format!(
            "grid of {n_nodes} nodes is below the floor 4(T+1)^2 = {floor}"
        )));
    }
    let eigs: Vec<f64> = (1..=n_nodes)
        .map(|j| if j == n_nodes { l } else { l * j as f64 / n_nodes as f64 })
        .collect();
    let e0 = vec![r / (n_nodes as f64).sqrt(); n_nodes];
    SpectralQuadratic::new(eigs, e0, 0.0, l)
}

/// `m` anchors in `R^{m-1}`: the origin and `scale` times each unit vector.
pub fn standard_simplex_anchors(m: usize, scale: f64) -> Vec<Vec<f64>> {
    let w = m.saturating_sub(1).max(1);
    (0..m)
        .map(|i| {
            let mut a = vec![0.0; w];
            if i > 0 {
                a[i - 1] = scale;
            }
            a
        })
        .collect()
}

/// A point split into its `V` (eigenbasis) and `W` (anchor space) blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

impl Point {
    pub fn new(v: Vec<f64>, w: Vec<f64>) -> Self {
        Self { v, w }
    }

    /// `[v, w]` concatenated.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.v.len() + self.w.len());
        out.extend_from_slice(&self.v);
        out.extend_from_slice(&self.w);
        out
    }

    pub fn from_flat(x: &[f64], dim_v: usize) -> Self {
        Self { v: x[..dim_v].to_vec(), w: x[dim_v..].to_vec() }
    }
}

/// `f_i(x) = g(x_V) + (gamma / 2) |x_W - a_i|^2`, `i = 0..m`.
///
/// Objectives are indexed from zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceDoc", into = "InstanceDoc")]
pub struct MooLiftedInstance {
    g: SpectralQuadratic,
    anchors: Vec<Vec<f64>>,
    gamma: f64,
}

/// JSON layout of a lifted instance.
#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    eigs: Vec<f64>,
    e0: Vec<f64>,
    mu: f64,
    #[serde(rename = "L")]
    l: f64,
    anchors: Vec<Vec<f64>>,
    gamma: f64,
}

impl TryFrom<InstanceDoc> for MooLiftedInstance {
    type Error = LabError;
    fn try_from(d: InstanceDoc) -> Result<Self> {
        let g = SpectralQuadratic::new(d.eigs, d.e0, d.mu, d.l)?;
        let sc = g.is_strongly_convex();
        let inst = lift_to_moo(g, d.anchors, sc)?;
        if inst.gamma != d.gamma {
            return Err(LabError::InvalidParameter(format!(
                "gamma {} does not match the coupling {} implied by mu and L",
                d.gamma, inst.gamma
            )));
        }
        Ok(inst)
    }
}

impl From<MooLiftedInstance> for InstanceDoc {
    fn from(inst: MooLiftedInstance) -> Self {
        InstanceDoc {
            eigs: inst.g.eigs,
            e0: inst.g.e0,
            mu: inst.g.mu,
            l: inst.g.l,
            anchors: inst.anchors,
            gamma: inst.gamma,
        }
    }
}

/// Rank of the difference set `{a_i - a_0}`.
fn affine_rank(anchors: &[Vec<f64>]) -> usize {
    let m = anchors.len();
    if m < 2 {
        return 0;
    }
    let w = anchors[0].len();
    let diffs = DMatrix::from_fn(m - 1, w, |i, j| anchors[i + 1][j] - anchors[0][j]);
    let scale = diffs.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    diffs.svd(false, false).rank(1e-10 * scale)
}

/// Lift a scalar hard instance to `m = anchors.len()` objectives.
///
/// `gamma` is `mu` for the strongly convex lifting and `L` otherwise, so every
/// objective keeps the smoothness and curvature class of `g`.
pub fn lift_to_moo(
    g: SpectralQuadratic,
    anchors: Vec<Vec<f64>>,
    strongly_convex: bool,
) -> Result<MooLiftedInstance> {
    let m = anchors.len();
    if m < 2 {
        return Err(LabError::InvalidParameter(format!("need at least 2 objectives, got {m}")));
    }
    let w = anchors[0].len();
    if w == 0 {
        return Err(LabError::InvalidParameter("anchors must have positive dimension".into()));
    }
    for a in &anchors {
        if a.len() != w {
            return Err(LabError::DimensionMismatch { what: "anchor", expected: w, got: a.len() });
        }
        ensure_finite(a, "anchor")?;
    }
    if strongly_convex != g.is_strongly_convex() {
        return Err(LabError::InvalidParameter(format!(
            "strongly_convex={strongly_convex} is inconsistent with mu={}",
            g.mu
        )));
    }
    let rank = affine_rank(&anchors);
    if rank != m - 1 {
        return Err(LabError::AffinelyDependent { rank, needed: m - 1 });
    }
    let gamma = if strongly_convex { g.mu } else { g.l };
    Ok(MooLiftedInstance { g, anchors, gamma })
}

impl MooLiftedInstance {
    pub fn g(&self) -> &SpectralQuadratic {
        &self.g
    }

    pub fn anchors(&self) -> &[Vec<f64>] {
        &self.anchors
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn m(&self) -> usize {
        self.anchors.len()
    }

    pub fn dim_v(&self) -> usize {
        self.g.dim()
    }

    pub fn dim_w(&self) -> usize {
        self.anchors[0].len()
    }

    pub fn dim(&self) -> usize {
        self.dim_v() + self.dim_w()
    }

    /// Common smoothness constant of every objective.
    pub fn smoothness(&self) -> f64 {
        self.g.l.max(self.gamma)
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.g.is_strongly_convex()
    }

    /// `(e0, a_0)`: at distance `R = |e0|` from the Pareto set.
    pub fn initial_point(&self) -> Point {
        Point::new(self.g.e0.clone(), self.anchors[0].clone())
    }

    pub(crate) fn check_point(&self, x: &Point) -> Result<()> {
        if x.v.len() != self.dim_v() {
            return Err(LabError::DimensionMismatch { what: "x_V", expected: self.dim_v(), got: x.v.len() });
        }
        if x.w.len() != self.dim_w() {
            return Err(LabError::DimensionMismatch { what: "x_W", expected: self.dim_w(), got: x.w.len() });
        }
        Ok(())
    }

    /// Value and flat gradient `[grad g(x_V), gamma (x_W - a_i)]` of objective `i`.
    pub fn oracle_eval(&self, i: usize, x: &Point) -> Result<(f64, Vec<f64>)> {
        if i >= self.m() {
            return Err(LabError::IndexOutOfRange { index: i, m: self.m() });
        }
        self.check_point(x)?;
        let dw = sub(&x.w, &self.anchors[i]);
        let value = self.g.eval(&x.v) + 0.5 * self.gamma * norm_sq(&dw);
        let mut grad = self.g.grad(&x.v);
        grad.extend(dw.iter().map(|d| self.gamma * d));
        Ok((value, grad))
    }

    /// All `m` gradients at `x`.
    pub fn gradients(&self, x: &Point) -> Result<Vec<Vec<f64>>> {
        (0..self.m()).map(|i| self.oracle_eval(i, x).map(|(_, g)| g)).collect()
    }

    /// `dist(x, P)` with `P = {0} x conv{a_i}`.
    pub fn dist_to_pareto(&self, x: &Point) -> Result<f64> {
        self.check_point(x)?;
        let dw = dist_to_hull(&x.w, &self.anchors, DEFAULT_TOL)?;
        Ok((norm_sq(&x.v) + dw * dw).sqrt())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
