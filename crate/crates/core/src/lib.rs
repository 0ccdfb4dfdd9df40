//! Closest convex mixture of quantum states.
//!
//! Given a target density matrix and a finite set of admissible states,
//! `qmix-core` finds the mixture of set members nearest to the target in
//! Hilbert-Schmidt distance `D = ||r_o - sum_i p_i r_i||^2 / 2`, where the
//! `r` are real coefficient vectors in an orthonormal Hermitian basis.
//!
//! The optimum is computed from the stationarity system on candidate
//! supports ([`kkt`]), the supports are chosen by [`search`], and every
//! answer can be checked against the simplex-constrained solvers in
//! [`oracle`].
//!
//! ```
//! use qmix_core::{fixtures, solve, CoefficientVector};
//!
//! let paulis = fixtures::fixture("example-ii").unwrap().set;
//! let mixed = CoefficientVector::maximally_mixed(2).unwrap();
//! let sol = solve(&mixed, &paulis).unwrap();
//! assert!(sol.distance < 1e-12);
//! assert_eq!(sol.minimal_n, 2);
//! ```

pub mod basis;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod kkt;
pub mod oracle;
pub mod search;
pub mod state;

pub use basis::{build_basis, devectorize, vectorize, CMatrix, HermitianBasis, C64};
pub use error::{Error, Result};
pub use kkt::{
    build_system, closed_k2, closed_k3, solve_support, PseudoProbability, SupportOutcome,
    SupportSystem,
};
pub use oracle::{
    grid_bruteforce, project_simplex, projected_gradient, OracleMethod, OracleResult,
};
pub use search::{
    caratheodory_reduce, minimal_support_profile, optimality_gap, solve, solve_with, uniform_grid,
    ApproxSolution, CaseTrace, SearchOptions, Strategy, SweepRecord, TraceEntry,
};
pub use state::{
    hs_distance, interpolate, random_density, random_state_set, validate_state, CoefficientVector,
    StateSet, TargetFamily, ValidationReport,
};
