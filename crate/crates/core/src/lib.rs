//! Numerical laboratory for the oracle complexity of Pareto stationarity.
//!
//! The crate builds resisting-oracle quadratic instances and their
//! non-degenerate multiobjective lifting, runs the first-order methods whose
//! worst-case behaviour is under study, measures the Pareto stationarity gap
//! with an exact min-norm-point solver, and checks the resulting traces
//! against the extremal-polynomial floors and the accelerated ceilings.
//!
//! Module map:
//! - [`instances`]: hard spectral quadratics, the lifted MOO instance, oracles.
//! - [`stationarity`]: min-norm point, Pareto gap, Gordan alternative.
//! - [`methods`]: oblivious GD, AGD, Chebyshev semi-iteration, MGDA.
//! - [`polynomials`]: Chebyshev values, minimax on nodes, product extremal,
//!   Markov floor, residual-polynomial fitting.
//! - [`harness`]: experiment configs, bound curves, reports, appendix checks.

pub mod error;
pub mod harness;
pub mod instances;
pub mod methods;
pub mod polynomials;
pub mod stationarity;
mod vector;

pub use error::{LabError, Result};
pub use instances::{
    lift_to_moo, make_convex_hard_for_schedule, make_markov_grid_instance,
    make_strongly_convex_hard, standard_simplex_anchors, MooLiftedInstance, Point,
    SpectralQuadratic,
};
pub use methods::{
    run_agd_convex, run_agd_strongly_convex, run_chebyshev_iteration, run_mgda,
    run_oblivious_gd, scalarize, GradientOracle, IterateTrace, Scalarization, StepSchedule,
};
pub use polynomials::{
    chebyshev_t, fit_residual_from_trace, markov_floor, minimax_on_nodes, product_extremal,
    residual_from_schedule, strong_convex_extremal_value, ChebyshevFrame, ResidualPolynomial,
};
pub use stationarity::{
    common_descent_direction, dist_to_hull, lifted_gap_closed_form, min_norm_point, pareto_gap,
    GapCertificate, SimplexWeights, DEFAULT_TOL,
};
