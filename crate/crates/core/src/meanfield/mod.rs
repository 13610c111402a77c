//! Mean-field homogenization: Morris/Eshelby tensors and localization models.

pub mod models;
pub mod morris;
pub mod quadrature;

pub use morris::{eshelby_tensor, morris_tensor};
pub use quadrature::SphereQuadrature;
pub use models::{
    families_from_realization, homogenize, homogenize_lielens, homogenize_mt, homogenize_nsc, lielens_factor,
    matrix_fraction, reuss_average, voigt_average, InclusionFamily, MeanFieldEstimate, MeanFieldSettings, Model,
};
