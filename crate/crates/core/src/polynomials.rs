//! Extremal polynomial quantities behind the lower and upper bounds.
//!
//! Every polynomial here is a residual polynomial: `p(0) = 1`, so that on a
//! quadratic the error after `t` span steps is `p_t(H) e0`. Internally the
//! coefficients are kept in the Chebyshev basis of `[0, scale]`, which keeps
//! evaluation and least-squares fitting well conditioned up to the degree cap;
//! [`ResidualPolynomial::monomial_coeffs`] gives the monomial view used for
//! serialization.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure_finite, LabError, Result};
use crate::methods::StepSchedule;

/// Largest polynomial degree handled anywhere in the crate.
pub const DEGREE_CAP: usize = 200;

/// Coarse grid used to bracket the maximizer of the product form.
pub const PRODUCT_GRID_POINTS: usize = 2048;

const P0_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Chebyshev polynomials of the first kind
// ---------------------------------------------------------------------------

/// `T_t(x)` by the three-term recurrence.
pub fn chebyshev_t(t: usize, x: f64) -> f64 {
    match t {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..t {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `T_t(x)` in closed form: `cos(t arccos x)` on `[-1, 1]`, and
/// `sign(x)^t (rho^t + rho^-t) / 2` with `rho = |x| + sqrt(x^2 - 1)` outside.
pub fn chebyshev_t_closed_form(t: usize, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        return (t as f64 * x.acos()).cos();
    }
    let a = x.abs();
    let rho = a + (a * a - 1.0).sqrt();
    let tf = t as f64;
    let mag = 0.5 * (rho.powf(tf) + rho.powf(-tf));
    if x < 0.0 && t % 2 == 1 {
        -mag
    } else {
        mag
    }
}

/// The affine frame that maps `[mu, L]` onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevFrame {
    pub mu: f64,
    #[serde(rename = "L")]
    pub l: f64,
    /// Image of `zeta = 0`, always below `-1`.
    pub xi0: f64,
    /// `(sqrt(kappa) + 1) / (sqrt(kappa) - 1)`.
    pub rho: f64,
    pub kappa: f64,
}

impl ChebyshevFrame {
    pub fn new(mu: f64, l: f64) -> Result<Self> {
        ensure_finite(&[mu, l], "Chebyshev frame")?;
        if !(mu > 0.0 && l > mu) {
            return Err(LabError::InvalidParameter(format!(
                "Chebyshev frame needs 0 < mu < L, got mu={mu}, L={l}"
            )));
        }
        let kappa = l / mu;
        let sk = kappa.sqrt();
        Ok(Self {
            mu,
            l,
            xi0: -(l + mu) / (l - mu),
            rho: (sk + 1.0) / (sk - 1.0),
            kappa,
        })
    }

    pub fn xi(&self, zeta: f64) -> f64 {
        (2.0 * zeta - (self.l + self.mu)) / (self.l - self.mu)
    }

    /// `rho` recomputed from the normalization point as `|xi0| + sqrt(xi0^2 - 1)`.
    pub fn rho_from_xi0(&self) -> f64 {
        let a = self.xi0.abs();
        a + (a * a - 1.0).sqrt()
    }

    /// Minimax value `2 / (rho^t + rho^-t)` over `[mu, L]`.
    pub fn extremal_value(&self, t: usize) -> f64 {
        let tf = t as f64;
        2.0 / (self.rho.powf(tf) + self.rho.powf(-tf))
    }

    /// The optimal residual `T_t(xi(zeta)) / T_t(xi0)`.
    pub fn optimal_residual(&self, t: usize) -> Result<ResidualPolynomial> {
        if t > DEGREE_CAP {
            return Err(LabError::DegreeCap { degree: t, cap: DEGREE_CAP });
        }
        // xi(zeta) = c0 + c1 * zeta
        let c1 = 2.0 / (self.l - self.mu);
        let c0 = -(self.l + self.mu) / (self.l - self.mu);
        let mut prev = ChebSeries::constant(1.0, self.l);
        let mut cur = ChebSeries::constant(1.0, self.l);
        if t >= 1 {
            cur = prev.mul_linear(c0, c1);
            for _ in 1..t {
                let next = cur.mul_linear(2.0 * c0, 2.0 * c1).sub(&prev);
                prev = cur;
                cur = next;
            }
        }
        let norm = chebyshev_t(t, self.xi0);
        Ok(ResidualPolynomial::from_series_unchecked(cur.scaled(1.0 / norm)))
    }
}

/// Minimax value `min_{deg p <= T, p(0)=1} max_{[mu,L]} |p|` as a function of
/// the condition number: `2 / (rho^T + rho^-T)`.
///
/// `kappa = 1` is rejected: `rho` is undefined there.
pub fn strong_convex_extremal_value(kappa: f64, t: usize) -> Result<f64> {
    if !kappa.is_finite() || kappa <= 1.0 {
        return Err(LabError::InvalidParameter(format!(
            "extremal value needs kappa > 1, got {kappa}"
        )));
    }
    let frame = ChebyshevFrame::new(1.0, kappa)?;
    let value = frame.extremal_value(t);
    debug_assert!(value >= frame.rho.powf(-(t as f64)) * (1.0 - 1e-12));
    Ok(value)
}

// ---------------------------------------------------------------------------
// Chebyshev-basis series on [0, scale]
// ---------------------------------------------------------------------------

/// `sum_k coeffs[k] T_k(2 zeta / scale - 1)`.
#[derive(Debug, Clone, PartialEq)]
struct ChebSeries {
    coeffs: Vec<f64>,
    scale: f64,
}

impl ChebSeries {
    fn constant(c: f64, scale: f64) -> Self {
        Self { coeffs: vec![c], scale }
    }

    fn eval(&self, zeta: f64) -> f64 {
        clenshaw(&self.coeffs, 2.0 * zeta / self.scale - 1.0)
    }

    /// `(c0 + c1 zeta) * self`, degree grows by one.
    fn mul_linear(&self, c0: f64, c1: f64) -> Self {
        let n = self.coeffs.len();
        // x * p in the Chebyshev basis
        let mut xp = vec![0.0; n + 1];
        for (k, &a) in self.coeffs.iter().enumerate() {
            if k == 0 {
                xp[1] += a;
            } else {
                xp[k + 1] += 0.5 * a;
                xp[k - 1] += 0.5 * a;
            }
        }
        // zeta = (scale / 2)(1 + x)
        let half = 0.5 * self.scale * c1;
        let mut out = vec![0.0; n + 1];
        for k in 0..=n {
            let pk = if k < n { self.coeffs[k] } else { 0.0 };
            out[k] = c0 * pk + half * (pk + xp[k]);
        }
        Self { coeffs: out, scale: self.scale }
    }

    fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(0.0)
                    - other.coeffs.get(k).copied().unwrap_or(0.0)
            })
            .collect();
        Self { coeffs, scale: self.scale }
    }

    fn scaled(mut self, s: f64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
        self
    }

    fn monomial(&self) -> Vec<f64> {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        // x = -1 + (2 / scale) zeta as a monomial in zeta
        let u = [-1.0, 2.0 / self.scale];
        let mut prev = vec![1.0];
        let mut cur = u.to_vec();
        for (k, &a) in self.coeffs.iter().enumerate() {
            let tk: &[f64] = if k == 0 { &prev } else { &cur };
            for (o, t) in out.iter_mut().zip(tk) {
                *o += a * t;
            }
            if k >= 1 {
                let mut next = vec![0.0; cur.len() + 1];
                for (j, &c) in cur.iter().enumerate() {
                    next[j] += 2.0 * u[0] * c;
                    next[j + 1] += 2.0 * u[1] * c;
                }
                for (j, &c) in prev.iter().enumerate() {
                    next[j] -= c;
                }
                prev = std::mem::replace(&mut cur, next);
            }
        }
        out
    }
}

fn clenshaw(a: &[f64], x: f64) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ak in a[1..].iter().rev() {
        let b0 = ak + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    a[0] + x * b1 - b2
}

/// Chebyshev basis values `T_0(x) ..= T_n(x)`.
fn chebyshev_row(n: usize, x: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(n + 1);
    row.push(1.0);
    if n >= 1 {
        row.push(x);
    }
    for k in 2..=n {
        let v = 2.0 * x * row[k - 1] - row[k - 2];
        row.push(v);
    }
    row
}

/// Values of the basis `phi_j = T_j(x) - T_j(-1)`, `j = 1..=n`, which spans
/// the polynomials of degree `<= n` vanishing at `zeta = 0`.
fn residual_basis_row(n: usize, x: f64) -> Vec<f64> {
    let row = chebyshev_row(n, x);
    (1..=n)
        .map(|j| row[j] - if j % 2 == 0 { 1.0 } else { -1.0 })
        .collect()
}

fn series_from_residual_coeffs(c: &[f64], scale: f64) -> ChebSeries {
    let mut coeffs = Vec::with_capacity(c.len() + 1);
    let c0 = 1.0
        - c.iter()
            .enumerate()
            .map(|(i, &cj)| if (i + 1) % 2 == 0 { cj } else { -cj })
            .sum::<f64>();
    coeffs.push(c0);
    coeffs.extend_from_slice(c);
    ChebSeries { coeffs, scale }
}

// ---------------------------------------------------------------------------
// Residual polynomials
// ---------------------------------------------------------------------------

/// A polynomial with `p(0) = 1` and a declared degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPolynomial {
    series: ChebSeries,
}

impl ResidualPolynomial {
    /// `p == 1` with declared degree zero.
    pub fn one() -> Self {
        Self::from_series_unchecked(ChebSeries::constant(1.0, 1.0))
    }

    fn from_series_unchecked(series: ChebSeries) -> Self {
        Self { series }
    }

    /// From monomial coefficients `c_0..c_t` (lowest degree first).
    ///
    /// `scale` is the right end of the interval the polynomial lives on; it
    /// only affects internal conditioning.
    pub fn from_monomial(coeffs: &[f64], scale: f64) -> Result<Self> {
        ensure_finite(coeffs, "monomial coefficients")?;
        if coeffs.is_empty() {
            return Err(LabError::InvalidParameter("empty coefficient list".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(LabError::InvalidParameter(format!("scale must be > 0, got {scale}")));
        }
        if (coeffs[0] - 1.0).abs() > P0_TOL {
            return Err(LabError::InvalidParameter(format!(
                "residual polynomial needs c0 = 1, got {}",
                coeffs[0]
            )));
        }
        if coeffs.len() - 1 > DEGREE_CAP {
            return Err(LabError::DegreeCap { degree: coeffs.len() - 1, cap: DEGREE_CAP });
        }
        let n = coeffs.len();
        let mut s = ChebSeries::constant(coeffs[n - 1], scale);
        for &c in coeffs[..n - 1].iter().rev() {
            s = s.mul_linear(0.0, 1.0);
            s.coeffs[0] += c;
        }
        Ok(Self { series: s })
    }

    /// `prod_i (1 - zeta / r_i)`; every root must be nonzero.
    pub fn from_roots(roots: &[f64], scale: f64) -> Result<Self> {
        ensure_finite(roots, "roots")?;
        if roots.contains(&0.0) {
            return Err(LabError::InvalidParameter("a residual polynomial cannot vanish at 0".into()));
        }
        if roots.len() > DEGREE_CAP {
            return Err(LabError::DegreeCap { degree: roots.len(), cap: DEGREE_CAP });
        }
        let mut s = ChebSeries::constant(1.0, scale);
        for &r in roots {
            s = s.mul_linear(1.0, -1.0 / r);
        }
        Ok(Self { series: s })
    }

    pub fn degree(&self) -> usize {
        self.series.coeffs.len() - 1
    }

    pub fn scale(&self) -> f64 {
        self.series.scale
    }

    pub fn chebyshev_coeffs(&self) -> &[f64] {
        &self.series.coeffs
    }

    pub fn eval(&self, zeta: f64) -> f64 {
        self.series.eval(zeta)
    }

    /// Monomial coefficients in `zeta`, lowest degree first. Exact for small
    /// degrees; the monomial basis loses accuracy past degree ~20.
    pub fn monomial_coeffs(&self) -> Vec<f64> {
        let mut m = self.series.monomial();
        m[0] = 1.0;
        m
    }

    /// Multiply by `(1 - alpha zeta)`.
    pub fn mul_step(&self, alpha: f64) -> Self {
        Self { series: self.series.mul_linear(1.0, -alpha) }
    }

    /// Raise the declared degree without changing the polynomial.
    pub fn padded_to(mut self, degree: usize) -> Self {
        if self.series.coeffs.len() < degree + 1 {
            self.series.coeffs.resize(degree + 1, 0.0);
        }
        self
    }
}

impl Serialize for ResidualPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.monomial_coeffs().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ResidualPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coeffs = Vec::<f64>::deserialize(deserializer)?;
        ResidualPolynomial::from_monomial(&coeffs, 1.0).map_err(serde::de::Error::custom)
    }
}

/// Expand `prod_k (1 - alpha_k zeta)`.
pub fn residual_from_schedule(schedule: &StepSchedule) -> Result<ResidualPolynomial> {
    if schedule.len() > DEGREE_CAP {
        return Err(LabError::DegreeCap { degree: schedule.len(), cap: DEGREE_CAP });
    }
    let scale = 1.0 / schedule.cap();
    let mut s = ChebSeries::constant(1.0, scale);
    for &a in schedule.alphas() {
        s = s.mul_linear(1.0, -a);
    }
    Ok(ResidualPolynomial { series: s })
}

// ---------------------------------------------------------------------------
// Minimax on a finite node set
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct MinimaxSolution {
    /// `max_nodes |p(zeta)|` for the returned polynomial.
    pub value: f64,
    pub poly: ResidualPolynomial,
    /// Fewer distinct nodes than `degree + 1`: the optimum interpolates zero.
    pub degenerate: bool,
    /// Final alternation reference (ascending).
    pub reference: Vec<f64>,
    pub exchanges: usize,
}

/// Discrete minimax `min_{deg p <= degree, p(0)=1} max_i |p(node_i)|`.
///
/// Solved by single-point Remez exchange. The polynomials of degree `<= n`
/// vanishing at zero form a Haar space on `(0, inf)`, so the optimum
/// equioscillates on `degree + 1` nodes and the exchange terminates.
pub fn minimax_on_nodes(nodes: &[f64], degree: usize) -> Result<MinimaxSolution> {
    ensure_finite(nodes, "minimax nodes")?;
    if nodes.is_empty() {
        return Err(LabError::InvalidParameter("minimax needs at least one node".into()));
    }
    if nodes.iter().any(|&z| z <= 0.0) {
        return Err(LabError::InvalidParameter("minimax nodes must be positive".into()));
    }
    if degree > DEGREE_CAP {
        return Err(LabError::DegreeCap { degree, cap: DEGREE_CAP });
    }
    let mut pts = nodes.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let scale = *pts.last().unwrap();

    if degree == 0 {
        return Ok(MinimaxSolution {
            value: 1.0,
            poly: ResidualPolynomial::one(),
            degenerate: false,
            reference: vec![pts[0]],
            exchanges: 0,
        });
    }
    if pts.len() <= degree {
        let poly = ResidualPolynomial::from_roots(&pts, scale)?.padded_to(degree);
        let value = pts.iter().map(|&z| poly.eval(z).abs()).fold(0.0, f64::max);
        return Ok(MinimaxSolution {
            value,
            poly,
            degenerate: true,
            reference: pts,
            exchanges: 0,
        });
    }

    let n = pts.len();
    let xs: Vec<f64> = pts.iter().map(|&z| 2.0 * z / scale - 1.0).collect();
    let basis: Vec<Vec<f64>> = xs.iter().map(|&x| residual_basis_row(degree, x)).collect();

    // initial reference: evenly spread indices
    let mut reference: Vec<usize> = (0..=degree)
        .map(|j| ((j as f64) * ((n - 1) as f64) / (degree as f64)).round() as usize)
        .collect();
    reference.dedup();
    debug_assert_eq!(reference.len(), degree + 1);

    let max_exchanges = 100 * n + 100;
    for exchanges in 0..max_exchanges {
        let k = degree + 1;
        let a = DMatrix::from_fn(k, k, |i, j| {
            if j < degree {
                basis[reference[i]][j]
            } else if i % 2 == 0 {
                -1.0
            } else {
                1.0
            }
        });
        let b = DVector::from_element(k, -1.0);
        let sol = a.lu().solve(&b).ok_or_else(|| {
            LabError::Convergence("singular levelled system in Remez exchange".into())
        })?;
        let c: Vec<f64> = sol.iter().take(degree).copied().collect();
        let h = sol[degree];
        let err: Vec<f64> = basis
            .iter()
            .map(|row| 1.0 + row.iter().zip(&c).map(|(p, q)| p * q).sum::<f64>())
            .collect();
        let (kstar, emax) = err
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |(bi, bv), (i, &e)| if e.abs() > bv { (i, e.abs()) } else { (bi, bv) });

        if emax <= h.abs() * (1.0 + 1e-12) + 1e-300 || reference.contains(&kstar) {
            let poly = ResidualPolynomial::from_series_unchecked(series_from_residual_coeffs(&c, scale));
            return Ok(MinimaxSolution {
                value: emax,
                poly,
                degenerate: false,
                reference: reference.iter().map(|&i| pts[i]).collect(),
                exchanges,
            });
        }

        let sigma = err[kstar].signum();
        let sign_at = |i: usize| err[reference[i]].signum();
        let last = degree;
        if kstar < reference[0] {
            if sign_at(0) == sigma {
                reference[0] = kstar;
            } else {
                reference.pop();
                reference.insert(0, kstar);
            }
        } else if kstar > reference[last] {
            if sign_at(last) == sigma {
                reference[last] = kstar;
            } else {
                reference.remove(0);
                reference.push(kstar);
            }
        } else {
            let pos = reference.partition_point(|&r| r < kstar);
            // reference[pos - 1] < kstar < reference[pos]
            if sign_at(pos - 1) == sigma {
                reference[pos - 1] = kstar;
            } else {
                reference[pos] = kstar;
            }
        }
    }
    Err(LabError::Convergence(format!(
        "Remez exchange did not settle within {max_exchanges} exchanges"
    )))
}

// ---------------------------------------------------------------------------
// Product-form extremal under capped steps
// ---------------------------------------------------------------------------

/// `zeta * prod_k (1 - alpha_k zeta)`.
pub fn product_form(alphas: &[f64], zeta: f64) -> f64 {
    alphas.iter().fold(zeta, |acc, &a| acc * (1.0 - a * zeta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductExtremal {
    pub zeta_star: f64,
    pub value: f64,
}

/// Maximize `zeta * prod (1 - alpha_k zeta)` over `[0, L]`: a 2048-point
/// grid brackets the maximizer, golden-section search refines it.
pub fn product_extremal(schedule: &StepSchedule, l: f64) -> Result<ProductExtremal> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(LabError::InvalidParameter(format!("L must be > 0, got {l}")));
    }
    schedule.check_cap(1.0 / l)?;
    let alphas = schedule.alphas();
    let phi = |z: f64| product_form(alphas, z);

    let n = PRODUCT_GRID_POINTS;
    let grid = |i: usize| if i == n - 1 { l } else { l * i as f64 / (n - 1) as f64 };
    let (mut best_i, mut best_v) = (0, f64::NEG_INFINITY);
    for i in 0..n {
        let v = phi(grid(i));
        if v > best_v {
            best_i = i;
            best_v = v;
        }
    }
    if !best_v.is_finite() || best_v <= 0.0 {
        return Err(LabError::ExtremalSearch(format!(
            "grid maximum of the product form is {best_v}; no interior maximum bracketed"
        )));
    }

    let lo = grid(best_i.saturating_sub(1));
    let hi = grid((best_i + 1).min(n - 1));
    let (z_gs, v_gs) = golden_section_max(&phi, lo, hi);
    let (zeta_star, value) = if v_gs > best_v { (z_gs, v_gs) } else { (grid(best_i), best_v) };
    Ok(ProductExtremal { zeta_star, value })
}

fn golden_section_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * b.abs().max(1e-300) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

// ---------------------------------------------------------------------------
// Markov floor
// ---------------------------------------------------------------------------

/// `L / (2 (t + 1)^2)`: no residual polynomial of degree `t` keeps
/// `|zeta p(zeta)|` below this on `[0, L]`.
pub fn markov_floor(l: f64, t: usize) -> f64 {
    let tp = (t + 1) as f64;
    l / (2.0 * tp * tp)
}

/// Maximum of `|zeta p(zeta)|` over a uniform grid of `[0, L]` with
/// `intervals + 1` points. Returns `(argmax, max)`.
pub fn grid_max_abs_zeta_p(poly: &ResidualPolynomial, l: f64, intervals: usize) -> (f64, f64) {
    let n = intervals.max(1);
    (0..=n)
        .map(|i| {
            let z = if i == n { l } else { l * i as f64 / n as f64 };
            (z, (z * poly.eval(z)).abs())
        })
        .fold((0.0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc })
}

// ---------------------------------------------------------------------------
// Fitting residual polynomials from traces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ResidualFit {
    pub poly: ResidualPolynomial,
    /// `max_i |p(zeta_i) - eT_i / e0_i|` over the eigenvalues used.
    pub fit_residual: f64,
    /// Eigenvalue indices skipped because `e0` vanishes there.
    pub excluded: Vec<usize>,
    pub rank: usize,
    /// The data do not determine a unique polynomial of the requested degree.
    pub rank_deficient: bool,
}

/// Least-squares fit of a degree-`degree` residual polynomial to the ratios
/// `eT_i / e0_i` observed at the eigenvalues, with `p(0) = 1` imposed exactly.
pub fn fit_residual_from_trace(
    eigs: &[f64],
    e0: &[f64],
    e_t: &[f64],
    degree: usize,
) -> Result<ResidualFit> {
    if e0.len() != eigs.len() {
        return Err(LabError::DimensionMismatch { what: "e0", expected: eigs.len(), got: e0.len() });
    }
    if e_t.len() != eigs.len() {
        return Err(LabError::DimensionMismatch { what: "eT", expected: eigs.len(), got: e_t.len() });
    }
    if eigs.is_empty() {
        return Err(LabError::InvalidParameter("fit needs at least one eigenvalue".into()));
    }
    ensure_finite(eigs, "eigenvalues")?;
    ensure_finite(e0, "e0")?;
    ensure_finite(e_t, "eT")?;
    if degree > DEGREE_CAP {
        return Err(LabError::DegreeCap { degree, cap: DEGREE_CAP });
    }

    let e0_max = e0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    for (i, &v) in e0.iter().enumerate() {
        if v.abs() <= 1e-14 * e0_max || v == 0.0 {
            excluded.push(i);
        } else {
            used.push(i);
        }
    }
    if used.is_empty() {
        return Err(LabError::InvalidParameter("every e0 component is zero".into()));
    }
    let ratios: Vec<f64> = used.iter().map(|&i| e_t[i] / e0[i]).collect();
    let zetas: Vec<f64> = used.iter().map(|&i| eigs[i]).collect();
    let zmax = zetas.iter().fold(0.0_f64, |m, &z| m.max(z.abs()));
    let scale = if zmax > 0.0 { zmax } else { 1.0 };

    let (poly, rank, rank_deficient) = if degree == 0 {
        (ResidualPolynomial::one(), 0, false)
    } else {
        let rows: Vec<Vec<f64>> = zetas
            .iter()
            .map(|&z| residual_basis_row(degree, 2.0 * z / scale - 1.0))
            .collect();
        let a = DMatrix::from_fn(rows.len(), degree, |i, j| rows[i][j]);
        let b = DVector::from_iterator(ratios.len(), ratios.iter().map(|r| r - 1.0));
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        let eps = smax * 1e-12 * (rows.len().max(degree) as f64);
        let rank = svd.rank(eps);
        let c = svd
            .solve(&b, eps)
            .map_err(|e| LabError::Convergence(format!("least-squares fit failed: {e}")))?;
        let c: Vec<f64> = c.iter().copied().collect();
        let poly = ResidualPolynomial::from_series_unchecked(series_from_residual_coeffs(&c, scale));
        (poly, rank, rank < degree)
    };
    let fit_residual = zetas
        .iter()
        .zip(&ratios)
        .map(|(&z, &r)| (poly.eval(z) - r).abs())
        .fold(0.0, f64::max);
    Ok(ResidualFit { poly, fit_residual, excluded, rank, rank_deficient })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn chebyshev_small_cases() {
        assert_eq!(chebyshev_t(0, 0.3), 1.0);
        assert_eq!(chebyshev_t(1, 0.3), 0.3);
        assert_eq!(chebyshev_t(3, 2.0), 26.0);
        assert!(close(chebyshev_t_closed_form(3, 2.0), 26.0, 1e-13));
        assert!(close(chebyshev_t_closed_form(3, -2.0), -26.0, 1e-13));
        assert!(close(chebyshev_t_closed_form(4, 0.3), chebyshev_t(4, 0.3), 1e-13));
    }

    #[test]
    fn extremal_value_examples() {
        assert!(close(strong_convex_extremal_value(4.0, 1).unwrap(), 0.6, 1e-14));
        assert_eq!(strong_convex_extremal_value(7.0, 0).unwrap(), 1.0);
        assert!(close(strong_convex_extremal_value(9.0, 2).unwrap(), 8.0 / 17.0, 1e-14));
        assert!(strong_convex_extremal_value(1.0, 3).is_err());
        assert!(strong_convex_extremal_value(0.5, 3).is_err());
        assert!(strong_convex_extremal_value(f64::NAN, 3).is_err());
    }

    #[test]
    fn rho_identity() {
        for kappa in [1.5, 4.0, 9.0, 100.0, 1000.0] {
            let f = ChebyshevFrame::new(1.0, kappa).unwrap();
            assert!(close(f.rho_from_xi0(), f.rho, 1e-12), "kappa {kappa}");
            assert!(f.xi0 < -1.0 && f.rho > 1.0);
            assert!(close(f.xi(1.0), -1.0, 1e-15) && close(f.xi(kappa), 1.0, 1e-15));
        }
    }

    #[test]
    fn optimal_residual_matches_value() {
        let f = ChebyshevFrame::new(1.0, 9.0).unwrap();
        let p = f.optimal_residual(2).unwrap();
        assert!(close(p.eval(0.0), 1.0, 1e-14));
        for z in [1.0, 5.0, 9.0] {
            assert!(close(p.eval(z).abs(), 8.0 / 17.0, 1e-13));
        }
        let p1 = ChebyshevFrame::new(1.0, 9.0).unwrap().optimal_residual(1).unwrap();
        let m = p1.monomial_coeffs();
        assert!(close(m[1], -0.2, 1e-14));
    }

    #[test]
    fn monomial_round_trip() {
        let p = ResidualPolynomial::from_monomial(&[1.0, -0.75, 0.125], 2.0).unwrap();
        let m = p.monomial_coeffs();
        assert!(close(m[1], -0.75, 1e-14) && close(m[2], 0.125, 1e-14));
        assert!(close(p.eval(2.0), 1.0 - 1.5 + 0.5, 1e-14));
        assert!(ResidualPolynomial::from_monomial(&[0.5, 1.0], 1.0).is_err());
    }

    #[test]
    fn schedule_expansion_examples() {
        let s = StepSchedule::new(vec![0.5, 0.25], 2.0).unwrap();
        let m = residual_from_schedule(&s).unwrap().monomial_coeffs();
        assert_eq!(m.len(), 3);
        assert!(close(m[0], 1.0, 0.0) && close(m[1], -0.75, 1e-14) && close(m[2], 0.125, 1e-14));

        let empty = StepSchedule::new(vec![], 1.0).unwrap();
        assert_eq!(residual_from_schedule(&empty).unwrap().monomial_coeffs(), vec![1.0]);

        let zero = StepSchedule::new(vec![0.0], 1.0).unwrap();
        let p = residual_from_schedule(&zero).unwrap();
        assert_eq!(p.degree(), 1);
        let m = p.monomial_coeffs();
        assert_eq!(m[0], 1.0);
        assert!(m[1].abs() < 1e-15);

        let long = StepSchedule::constant(1.0, 201, 1.0).unwrap();
        assert!(matches!(residual_from_schedule(&long), Err(LabError::DegreeCap { .. })));
    }

    #[test]
    fn minimax_examples() {
        let s = minimax_on_nodes(&[1.0, 9.0], 1).unwrap();
        assert!(close(s.value, 0.8, 1e-12));
        assert!(close(s.poly.monomial_coeffs()[1], -0.2, 1e-12));

        let s = minimax_on_nodes(&[3.0], 2).unwrap();
        assert!(s.degenerate);
        assert!(s.value < 1e-15);

        let s = minimax_on_nodes(&[1.0, 5.0, 9.0], 2).unwrap();
        assert!(close(s.value, 8.0 / 17.0, 1e-12));

        assert!(minimax_on_nodes(&[0.0, 1.0], 1).is_err());
        assert!(minimax_on_nodes(&[], 1).is_err());
    }

    #[test]
    fn minimax_on_dense_nodes_approaches_interval_value() {
        // On a fine grid of [1, 4] the discrete optimum sits just below the
        // interval optimum.
        let nodes: Vec<f64> = (0..=400).map(|i| 1.0 + 3.0 * i as f64 / 400.0).collect();
        for t in 1..6 {
            let s = minimax_on_nodes(&nodes, t).unwrap();
            let v = strong_convex_extremal_value(4.0, t).unwrap();
            assert!(s.value <= v * (1.0 + 1e-9));
            assert!(s.value >= v * (1.0 - 1e-3), "t={t}: {} vs {v}", s.value);
        }
    }

    #[test]
    fn product_extremal_examples() {
        let one = StepSchedule::constant(1.0, 1, 1.0).unwrap();
        let r = product_extremal(&one, 1.0).unwrap();
        assert!(close(r.zeta_star, 0.5, 1e-7) && close(r.value, 0.25, 1e-13));

        let empty = StepSchedule::new(vec![], 1.0).unwrap();
        let r = product_extremal(&empty, 1.0).unwrap();
        assert_eq!((r.zeta_star, r.value), (1.0, 1.0));

        let two = StepSchedule::constant(1.0, 2, 1.0).unwrap();
        let r = product_extremal(&two, 1.0).unwrap();
        assert!(close(r.zeta_star, 1.0 / 3.0, 1e-7) && close(r.value, 4.0 / 27.0, 1e-13));

        let bad = StepSchedule::constant(1.0, 2, 1.0).unwrap();
        assert!(matches!(product_extremal(&bad, 2.0), Err(LabError::StepCap { .. })));
    }

    #[test]
    fn markov_floor_examples() {
        assert_eq!(markov_floor(1.0, 0), 0.5);
        assert_eq!(markov_floor(2.0, 1), 0.25);
        assert_eq!(markov_floor(1.0, 3), 1.0 / 32.0);
        // degree 0 forces p == 1, and max zeta on [0, 1] is 1
        let (_, m) = grid_max_abs_zeta_p(&ResidualPolynomial::one(), 1.0, 64);
        assert_eq!(m, 1.0);
    }

    #[test]
    fn fit_recovers_product_form() {
        let eigs = [0.25, 0.5, 0.75, 1.0];
        let e0 = [1.0, -2.0, 0.5, 1.0];
        let t = 3;
        let e_t: Vec<f64> = eigs.iter().zip(&e0).map(|(z, e)| (1.0_f64 - z).powi(t) * e).collect();
        let fit = fit_residual_from_trace(&eigs, &e0, &e_t, t as usize).unwrap();
        assert!(fit.fit_residual <= 1e-10);
        let m = fit.poly.monomial_coeffs();
        let expect = [1.0, -3.0, 3.0, -1.0];
        for (a, b) in m.iter().zip(expect) {
            assert!(close(*a, b, 1e-9), "{m:?}");
        }
    }

    #[test]
    fn fit_degree_zero_and_exclusions() {
        let fit = fit_residual_from_trace(&[1.0, 2.0], &[1.0, 1.0], &[1.0, 1.0], 0).unwrap();
        assert_eq!(fit.fit_residual, 0.0);
        assert_eq!(fit.poly.degree(), 0);

        let fit = fit_residual_from_trace(&[1.0, 2.0, 3.0], &[1.0, 0.0, 1.0], &[0.5, 0.0, -0.5], 1).unwrap();
        assert_eq!(fit.excluded, vec![1]);
        assert!(fit.fit_residual < 1e-12);

        let fit = fit_residual_from_trace(&[2.0], &[1.0], &[0.0], 3).unwrap();
        assert!(fit.rank_deficient);
        assert!(fit.fit_residual < 1e-12);

        assert!(fit_residual_from_trace(&[1.0], &[0.0], &[0.0], 1).is_err());
    }
}
