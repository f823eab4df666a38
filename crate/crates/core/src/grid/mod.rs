//! Method-of-lines integration on a uniform cell-centred grid of `[0, 1]`.

mod field;
mod init;
mod solver;
mod tridiag;

pub use field::{Grid1D, StateField};
pub use init::{make_initial, InitKind, InitialBounds, InitialCondition, RNG_NAME};
pub use solver::{
    integrate, integrate_tracked, laplacian_neumann, step_explicit, step_imex, write_diagnostics_csv,
    write_snapshots_csv, Scheme, SolverConfig, StepRecord, Trajectory,
};
pub use tridiag::solve_neumann_implicit;
