//! Python bindings for the paretolab core.

use paretolab::harness::{self, ExperimentConfig};
use paretolab::methods::IterateTrace;
use paretolab::{
    self as core, GradientOracle, LabError, MooLiftedInstance, Point, SimplexWeights, StepSchedule,
};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: LabError) -> PyErr {
    if e.is_solver_failure() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Diagonal quadratic `g(x) = 1/2 sum lambda_i x_i^2` started at `e0`.
#[pyclass(name = "SpectralQuadratic", module = "paretolab_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpectralQuadratic(core::SpectralQuadratic);

impl PySpectralQuadratic {
    fn check_dim(&self, x: &[f64]) -> PyResult<()> {
        if x.len() == self.0.dim() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("expected {} coordinates, got {}", self.0.dim(), x.len())))
        }
    }
}

#[pymethods]
impl PySpectralQuadratic {
    #[new]
    #[pyo3(signature = (eigs, e0, mu, l))]
    fn new(eigs: Vec<f64>, e0: Vec<f64>, mu: f64, l: f64) -> PyResult<Self> {
        core::SpectralQuadratic::new(eigs, e0, mu, l).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn strongly_convex_hard(l: f64, mu: f64, t: usize, r: f64) -> PyResult<Self> {
        core::make_strongly_convex_hard(l, mu, t, r).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn convex_hard_for_schedule(l: f64, alphas: Vec<f64>, r: f64) -> PyResult<Self> {
        let s = StepSchedule::new(alphas, l).map_err(to_py)?;
        core::make_convex_hard_for_schedule(l, &s, r).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn markov_grid(l: f64, t: usize, r: f64, n_nodes: usize) -> PyResult<Self> {
        core::make_markov_grid_instance(l, t, r, n_nodes).map(Self).map_err(to_py)
    }

    #[getter]
    fn eigs(&self) -> Vec<f64> {
        self.0.eigs().to_vec()
    }

    #[getter]
    fn e0(&self) -> Vec<f64> {
        self.0.e0().to_vec()
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu()
    }

    #[getter(L)]
    fn l(&self) -> f64 {
        self.0.l()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.0.radius()
    }

    fn value(&self, x: Vec<f64>) -> PyResult<f64> {
        self.check_dim(&x)?;
        Ok(self.0.value(&x))
    }

    fn gradient(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_dim(&x)?;
        Ok(self.0.gradient(&x))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("SpectralQuadratic(n={}, mu={}, L={})", self.0.dim(), self.0.mu(), self.0.l())
    }
}

/// One method run: iterates and their per-step measurements.
#[pyclass(name = "Trace", module = "paretolab_py", frozen, get_all)]
struct PyTrace {
    method: String,
    points: Vec<Vec<f64>>,
    f_gaps: Vec<f64>,
    grad_norms: Vec<f64>,
    pareto_gaps: Option<Vec<f64>>,
}

impl From<IterateTrace> for PyTrace {
    fn from(t: IterateTrace) -> Self {
        Self { method: t.method_tag, points: t.points, f_gaps: t.f_gaps, grad_norms: t.grad_norms, pareto_gaps: t.gaps }
    }
}

#[pymethods]
impl PyTrace {
    fn __len__(&self) -> usize {
        self.points.len()
    }

    fn __repr__(&self) -> String {
        format!("Trace(method={:?}, steps={})", self.method, self.points.len().saturating_sub(1))
    }
}

/// Non-degenerate multiobjective lifting of a spectral quadratic.
#[pyclass(name = "LiftedInstance", module = "paretolab_py", frozen)]
struct PyLiftedInstance(MooLiftedInstance);

fn point(inst: &MooLiftedInstance, v: Vec<f64>, w: Vec<f64>) -> PyResult<Point> {
    if v.len() != inst.dim_v() || w.len() != inst.dim_w() {
        return Err(PyValueError::new_err(format!(
            "point must have {} + {} coordinates",
            inst.dim_v(),
            inst.dim_w()
        )));
    }
    Ok(Point::new(v, w))
}

#[pymethods]
impl PyLiftedInstance {
    /// Lift `g` with `m` standard-simplex anchors, or explicit `anchors`.
    #[new]
    #[pyo3(signature = (g, m=2, anchors=None, scale=1.0))]
    fn new(g: &PySpectralQuadratic, m: usize, anchors: Option<Vec<Vec<f64>>>, scale: f64) -> PyResult<Self> {
        let a = anchors.unwrap_or_else(|| core::standard_simplex_anchors(m, scale));
        let sc = g.0.is_strongly_convex();
        core::lift_to_moo(g.0.clone(), a, sc).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        MooLiftedInstance::from_json(s).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(to_py)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    #[getter]
    fn g(&self) -> PySpectralQuadratic {
        PySpectralQuadratic(self.0.g().clone())
    }

    #[getter]
    fn anchors(&self) -> Vec<Vec<f64>> {
        self.0.anchors().to_vec()
    }

    /// `(v, w)` parts of the starting point.
    fn initial_point(&self) -> (Vec<f64>, Vec<f64>) {
        let p = self.0.initial_point();
        (p.v, p.w)
    }

    /// Value and gradient of objective `i` at `(v, w)`.
    fn oracle(&self, i: usize, v: Vec<f64>, w: Vec<f64>) -> PyResult<(f64, Vec<f64>)> {
        let p = point(&self.0, v, w)?;
        self.0.oracle_eval(i, &p).map_err(to_py)
    }

    fn dist_to_pareto(&self, v: Vec<f64>, w: Vec<f64>) -> PyResult<f64> {
        let p = point(&self.0, v, w)?;
        self.0.dist_to_pareto(&p).map_err(to_py)
    }

    /// Pareto gap certificate as a dict with keys gap, lambda, d, v.
    #[pyo3(signature = (v, w, tol=core::DEFAULT_TOL))]
    fn pareto_gap<'py>(&self, py: Python<'py>, v: Vec<f64>, w: Vec<f64>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let p = point(&self.0, v, w)?;
        let c = core::pareto_gap(&self.0, &p, tol).map_err(to_py)?;
        certificate_dict(py, c)
    }

    /// Run `method` for `t` steps on the scalarization with `weights`
    /// (default: first vertex) from the initial point.
    ///
    /// Methods: `gd` (`steps` default to `1/L`), `agd`, `agd-sc`, `chebyshev`, `mgda`.
    #[pyo3(signature = (method, t, weights=None, steps=None, tol=core::DEFAULT_TOL))]
    fn run(
        &self,
        method: &str,
        t: usize,
        weights: Option<Vec<f64>>,
        steps: Option<Vec<f64>>,
        tol: f64,
    ) -> PyResult<PyTrace> {
        let inst = &self.0;
        let l = inst.smoothness();
        let x0 = inst.initial_point();
        if method == "mgda" {
            return core::run_mgda(inst, &x0, 1.0 / l, t, tol).map(PyTrace::from).map_err(to_py);
        }
        let w = match weights {
            Some(w) => SimplexWeights::new(w).map_err(to_py)?,
            None => SimplexWeights::vertex(0, inst.m()).map_err(to_py)?,
        };
        let f = core::scalarize(inst, w).map_err(to_py)?;
        let flat = x0.flat();
        let mu = inst.g().mu().min(inst.gamma());
        let tr = match method {
            "gd" => {
                let alphas = steps.unwrap_or_else(|| vec![1.0 / l; t]);
                let s = StepSchedule::new(alphas, l).map_err(to_py)?;
                core::run_oblivious_gd(&f, &s, &flat, t)
            }
            "agd" => core::run_agd_convex(&f, l, &flat, t),
            "agd-sc" => core::run_agd_strongly_convex(&f, l, mu, &flat, t),
            "chebyshev" => core::run_chebyshev_iteration(&f, mu, l, &flat, t),
            other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
        };
        let tr = tr.and_then(|tr| tr.with_pareto_gaps(inst, tol)).map_err(to_py)?;
        Ok(tr.into())
    }

    fn __repr__(&self) -> String {
        format!("LiftedInstance(m={}, dim={}, gamma={})", self.0.m(), self.0.dim(), self.0.gamma())
    }
}

fn certificate_dict(py: Python<'_>, c: core::GapCertificate) -> PyResult<Bound<'_, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("gap", c.gap)?;
    d.set_item("lambda", c.weights.as_slice().to_vec())?;
    d.set_item("d", c.min_point)?;
    d.set_item("v", c.descent_dir)?;
    Ok(d)
}

/// Minimum-norm point of the convex hull of `gradients`.
#[pyfunction]
#[pyo3(signature = (gradients, tol=core::DEFAULT_TOL))]
fn min_norm_point(py: Python<'_>, gradients: Vec<Vec<f64>>, tol: f64) -> PyResult<Bound<'_, PyDict>> {
    let c = core::min_norm_point(&gradients, tol).map_err(to_py)?;
    certificate_dict(py, c)
}

#[pyfunction]
fn chebyshev_t(t: usize, x: f64) -> f64 {
    core::chebyshev_t(t, x)
}

/// Extremal value `2 / (rho^T + rho^-T)` for condition number `kappa`.
#[pyfunction]
fn strong_convex_extremal_value(kappa: f64, t: usize) -> PyResult<f64> {
    core::strong_convex_extremal_value(kappa, t).map_err(to_py)
}

/// Minimax value of a degree-`degree` residual polynomial on `nodes`.
#[pyfunction]
fn minimax_on_nodes(nodes: Vec<f64>, degree: usize) -> PyResult<f64> {
    core::minimax_on_nodes(&nodes, degree).map(|s| s.value).map_err(to_py)
}

/// `(zeta_star, value)` maximizing `zeta prod (1 - alpha_t zeta)` on `[0, L]`.
#[pyfunction]
fn product_extremal(alphas: Vec<f64>, l: f64) -> PyResult<(f64, f64)> {
    let s = StepSchedule::new(alphas, l).map_err(to_py)?;
    core::product_extremal(&s, l).map(|e| (e.zeta_star, e.value)).map_err(to_py)
}

#[pyfunction]
fn markov_floor(l: f64, t: usize) -> f64 {
    core::markov_floor(l, t)
}

/// Run an experiment from a JSON config. Returns a dict with `passed`,
/// `metrics` and `violations`; writes the report when `out_dir` is given.
#[pyfunction]
#[pyo3(signature = (config_json, out_dir=None))]
fn run_experiment<'py>(py: Python<'py>, config_json: &str, out_dir: Option<&str>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(to_py)?;
    let rep = harness::run_experiment(&cfg).map_err(to_py)?;
    if let Some(dir) = out_dir {
        harness::write_report(&rep, std::path::Path::new(dir)).map_err(to_py)?;
    }
    let d = PyDict::new(py);
    d.set_item("passed", rep.passed())?;
    d.set_item("exit_code", harness::exit_code(&Ok(rep.clone())))?;
    let metrics = PyDict::new(py);
    for (k, v) in &rep.metrics {
        metrics.set_item(k, v)?;
    }
    d.set_item("metrics", metrics)?;
    let violations: Vec<(String, String, Option<usize>, String, f64, f64)> = rep
        .violations
        .iter()
        .map(|v| (v.check.clone(), v.method.clone(), v.t, v.tag.clone(), v.bound, v.measured))
        .collect();
    d.set_item("violations", violations)?;
    Ok(d)
}

#[pymodule]
fn paretolab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectralQuadratic>()?;
    m.add_class::<PyLiftedInstance>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(min_norm_point, m)?)?;
    m.add_function(wrap_pyfunction!(chebyshev_t, m)?)?;
    m.add_function(wrap_pyfunction!(strong_convex_extremal_value, m)?)?;
    m.add_function(wrap_pyfunction!(minimax_on_nodes, m)?)?;
    m.add_function(wrap_pyfunction!(product_extremal, m)?)?;
    m.add_function(wrap_pyfunction!(markov_floor, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
