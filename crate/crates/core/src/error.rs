use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid isotropic material: E = {young}, nu = {poisson} (need E > 0 and -1 < nu < 0.5)")]
    InvalidMaterial { young: f64, poisson: f64 },

    #[error("matrix is not a rotation: |m^T m - I| = {deviation:e}")]
    NotOrthogonal { deviation: f64 },

    #[error("singular rank-4 tensor (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("acoustic tensor singular at direction {direction:?}; reference stiffness is not positive definite")]
    SingularAcousticTensor { direction: [f64; 3] },

    #[error("zero total weight in tensor average")]
    EmptyAverage,

    #[error("invalid RVE specification: {0}")]
    InvalidSpec(String),

    #[error("RSA jammed after {rejections} consecutive rejections: placed {placed}/{requested} inclusions, achieved fraction {achieved_fraction:.4}")]
    Jamming {
        placed: usize,
        requested: usize,
        rejections: usize,
        achieved_fraction: f64,
    },

    #[error("overlap relaxation did not converge after {sweeps} sweeps ({overlaps} overlapping pairs remain)")]
    RelaxationNonConvergence { sweeps: usize, overlaps: usize },

    #[error("FFT solver did not converge{} after {iterations} iterations (residual {residual:e})", load_case.map(|c| format!(" for load case {c}")).unwrap_or_default())]
    SolverNonConvergence {
        load_case: Option<usize>,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("self-consistent iteration did not converge after {iterations} iterations (relative change {change:e})")]
    MeanFieldNonConvergence { iterations: usize, change: f64 },

    #[error("phase id {0} has no registered material")]
    UnknownPhase(u8),

    #[error("baseline {0} modulus is zero")]
    ZeroBaseline(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
