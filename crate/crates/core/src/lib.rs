//! Periodic particle-reinforced composites: microstructure generation,
//! FFT-based full-field homogenization and mean-field estimates.

pub mod error;
pub mod fft;
pub mod material;
pub mod meanfield;
pub mod moduli;
pub mod rotation;
pub mod rve;
pub mod study;
pub mod tensor;
pub mod voxel;

pub use error::{Error, Result};
pub use material::IsotropicMaterial;
pub use rotation::{bunge_matrix, EulerAngles};
pub use tensor::{StiffnessTensor, Tensor4};
