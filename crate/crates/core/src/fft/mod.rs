//! FFT-based full-field homogenization on periodic voxel grids.

pub mod fft3;
pub mod green;
pub mod solver;

pub use green::{green_apply, Reference};
pub use solver::{
    default_reference, homogenized_stiffness_fft, solve_load_case, FftHomogenization, Field, LoadCaseResult,
    LoadCaseSummary, PhaseMaterials, Scheme, SolverSettings, MAX_ASYMMETRY,
};
