//! Variational inequality machinery: projections, projection-type solvers,
//! Tikhonov regularisation, monotonicity estimates and P-matrix checks.

mod contraction;
mod monotone;
mod pmatrix;
mod sets;
mod solver;

pub use contraction::{contraction_factor, ContractionParams};
pub use monotone::estimate_monotonicity;
pub use pmatrix::{check_p_matrix, PClass};
pub use sets::{project_box, project_firm_polyhedron, BoxSet, ConvexSet, FirmPolyhedron, ProductSet};
pub use solver::{
    natural_residual, projection_iteration, solve_regularized_vi, solve_vi_projection, SolveReport, SolverConfig,
};
