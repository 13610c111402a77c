//! Localization-tensor models: Mori-Tanaka, Lielens and normalized self-consistent.
//!
//! Every model produces per-family strain-localization tensors `A_i` in the
//! RVE frame, normalizes them so that `f_m A_m + sum f_i A_i = I`, and
//! assembles `C = C_m + sum f_i (C_i - C_m) : A_i`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::morris::{morris_tensor, DEFAULT_ORDER};
use super::quadrature::SphereQuadrature;
use crate::error::{Error, Result};
use crate::material::IsotropicMaterial;
use crate::rotation::EulerAngles;
use crate::rve::{RveRealization, Shape};
use crate::tensor::Tensor4;

/// Inclusions sharing shape, size, material and orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct InclusionFamily {
    pub shape: Shape,
    pub fraction: f64,
    pub material: IsotropicMaterial,
    /// Semi-axes in the inclusion frame, long axis first.
    pub semi_axes: [f64; 3],
    /// Inclusion frame to RVE frame.
    pub rotation: Matrix3<f64>,
}

impl InclusionFamily {
    pub fn new(
        shape: Shape,
        fraction: f64,
        material: IsotropicMaterial,
        semi_axes: [f64; 3],
        orientation: EulerAngles,
    ) -> Self {
        Self { shape, fraction, material, semi_axes, rotation: orientation.matrix() }
    }

    pub fn sphere(fraction: f64, material: IsotropicMaterial) -> Self {
        Self::new(Shape::Sphere, fraction, material, [1.0; 3], EulerAngles::ZERO)
    }

    /// Same family, rotated rigidly by `m` in the RVE frame.
    pub fn rotated(&self, m: &Matrix3<f64>) -> Self {
        Self { rotation: m * self.rotation, ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "mt")]
    MoriTanaka,
    #[serde(rename = "lielens")]
    Lielens,
    #[serde(rename = "nsc")]
    NormalizedSelfConsistent,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::MoriTanaka, Model::Lielens, Model::NormalizedSelfConsistent];

    /// Label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            Model::MoriTanaka => "MT",
            Model::Lielens => "Lielens",
            Model::NormalizedSelfConsistent => "NSC",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mt" | "mori-tanaka" => Ok(Model::MoriTanaka),
            "lielens" => Ok(Model::Lielens),
            "nsc" => Ok(Model::NormalizedSelfConsistent),
            other => Err(Error::InvalidConfig(format!("unknown mean-field model '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeanFieldSettings {
    pub quadrature_order: usize,
    pub nsc_tolerance: f64,
    pub nsc_max_iterations: usize,
}

impl Default for MeanFieldSettings {
    fn default() -> Self {
        Self { quadrature_order: DEFAULT_ORDER, nsc_tolerance: 1e-8, nsc_max_iterations: 500 }
    }
}

#[derive(Clone, Debug)]
pub struct MeanFieldEstimate {
    pub model: Model,
    /// Homogenized stiffness (major-symmetric part of the assembly).
    pub stiffness: Tensor4,
    /// `|C - C^T| / |C|` of the assembled tensor before symmetrization.
    pub raw_asymmetry: f64,
    /// Normalized matrix localization tensor, RVE frame.
    pub matrix_localization: Tensor4,
    /// Normalized localization tensor per family, RVE frame.
    pub localizations: Vec<Tensor4>,
    pub iterations: usize,
}

impl MeanFieldEstimate {
    /// `f_m A_m + sum f_i A_i`.
    pub fn localization_average(&self, families: &[InclusionFamily]) -> Tensor4 {
        let fm = matrix_fraction(families);
        families
            .iter()
            .zip(&self.localizations)
            .fold(self.matrix_localization * fm, |acc, (f, a)| acc + *a * f.fraction)
    }
}

pub fn matrix_fraction(families: &[InclusionFamily]) -> f64 {
    1.0 - families.iter().map(|f| f.fraction).sum::<f64>()
}

fn validate(families: &[InclusionFamily]) -> Result<()> {
    let total: f64 = families.iter().map(|f| f.fraction).sum();
    if families.iter().any(|f| !(f.fraction >= 0.0)) || !(total < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "inclusion fractions must be non-negative and sum below 1 (sum {total})"
        )));
    }
    Ok(())
}

/// Morris tensors for isotropic references depend only on (axes, material);
/// orientation families of one shape share them.
struct MorrisCache<'q> {
    quad: &'q SphereQuadrature,
    entries: Vec<(([u64; 3], [u64; 2]), Tensor4)>,
}

impl<'q> MorrisCache<'q> {
    fn new(quad: &'q SphereQuadrature) -> Self {
        Self { quad, entries: Vec::new() }
    }

    fn get(&mut self, material: &IsotropicMaterial, semi_axes: [f64; 3]) -> Result<Tensor4> {
        let key = (
            semi_axes.map(f64::to_bits),
            [material.young().to_bits(), material.poisson().to_bits()],
        );
        if let Some((_, t)) = self.entries.iter().find(|(k, _)| *k == key) {
            return Ok(*t);
        }
        let t = morris_tensor(&material.stiffness(), semi_axes, self.quad)?;
        self.entries.push((key, t));
        Ok(t)
    }
}

/// Normalizes raw localizations by their RVE average and assembles the stiffness.
fn assemble(
    model: Model,
    families: &[InclusionFamily],
    matrix: &IsotropicMaterial,
    raw_matrix: Tensor4,
    raw: Vec<Tensor4>,
    iterations: usize,
) -> Result<MeanFieldEstimate> {
    let fm = matrix_fraction(families);
    let avg = families
        .iter()
        .zip(&raw)
        .fold(raw_matrix * fm, |acc, (f, a)| acc + *a * f.fraction);
    let avg_inv = avg.inverse()?;
    let localizations: Vec<Tensor4> = raw.iter().map(|a| a.contract(&avg_inv)).collect();
    let matrix_localization = raw_matrix.contract(&avg_inv);
    let cm = matrix.stiffness();
    let assembled = families.iter().zip(&localizations).fold(cm, |acc, (f, a)| {
        acc + (f.material.stiffness() - cm).contract(a) * f.fraction
    });
    Ok(MeanFieldEstimate {
        model,
        stiffness: assembled.symmetric_part(),
        raw_asymmetry: assembled.major_asymmetry(),
        matrix_localization,
        localizations,
        iterations,
    })
}

/// Dilute localization `[I + E_m : (C_i - C_m)]^{-1}` of each family, RVE frame.
fn dilute_localizations(
    families: &[InclusionFamily],
    matrix: &IsotropicMaterial,
    cache: &mut MorrisCache<'_>,
) -> Result<Vec<Tensor4>> {
    let cm = matrix.stiffness();
    families
        .iter()
        .map(|f| {
            let e = cache.get(matrix, f.semi_axes)?;
            let local = (Tensor4::identity() + e.contract(&(f.material.stiffness() - cm))).inverse()?;
            local.rotate(&f.rotation)
        })
        .collect()
}

/// Mori-Tanaka: dilute localizations (matrix as infinite medium) normalized by their RVE average.
pub fn homogenize_mt(
    families: &[InclusionFamily],
    matrix: &IsotropicMaterial,
    settings: &MeanFieldSettings,
) -> Result<MeanFieldEstimate> {
    validate(families)?;
    let quad = SphereQuadrature::new(settings.quadrature_order);
    let mut cache = MorrisCache::new(&quad);
    let raw = dilute_localizations(families, matrix, &mut cache)?;
    assemble(Model::MoriTanaka, families, matrix, Tensor4::identity(), raw, 0)
}

/// Lielens interpolation factor `f = f_shape (1 + f_shape) / 2`.
pub fn lielens_factor(shape_fraction: f64) -> f64 {
    0.5 * shape_fraction * (1.0 + shape_fraction)
}

/// Lielens: inverse localizations interpolated between Mori-Tanaka (matrix as
/// infinite medium) and inverse Mori-Tanaka (inclusion as infinite medium),
/// with one interpolation factor per inclusion shape.
pub fn homogenize_lielens(
    families: &[InclusionFamily],
    matrix: &IsotropicMaterial,
    settings: &MeanFieldSettings,
) -> Result<MeanFieldEstimate> {
    validate(families)?;
    let quad = SphereQuadrature::new(settings.quadrature_order);
    let mut cache = MorrisCache::new(&quad);
    let mut shape_fraction: BTreeMap<Shape, f64> = BTreeMap::new();
    for f in families {
        *shape_fraction.entry(f.shape).or_default() += f.fraction;
    }
    let cm = matrix.stiffness();
    let raw = families
        .iter()
        .map(|f| {
            let interp = lielens_factor(shape_fraction[&f.shape]);
            let ci = f.material.stiffness();
            let e_m = cache.get(matrix, f.semi_axes)?;
            let e_i = cache.get(&f.material, f.semi_axes)?;
            let lower_inv = Tensor4::identity() + e_m.contract(&(ci - cm));
            let upper_inv = Tensor4::identity() + e_i.contract(&(cm - ci));
            let local = (lower_inv * (1.0 - interp) + upper_inv * interp).inverse()?;
            local.rotate(&f.rotation)
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(Model::Lielens, families, matrix, Tensor4::identity(), raw, 0)
}

/// Voigt average `f_m C_m + sum f_i C_i`.
pub fn voigt_average(families: &[InclusionFamily], matrix: &IsotropicMaterial) -> Tensor4 {
    families.iter().fold(matrix.stiffness() * matrix_fraction(families), |acc, f| {
        acc + f.material.stiffness() * f.fraction
    })
}

/// Reuss average `(f_m C_m^{-1} + sum f_i C_i^{-1})^{-1}`.
pub fn reuss_average(families: &[InclusionFamily], matrix: &IsotropicMaterial) -> Result<Tensor4> {
    let mut s = matrix.stiffness().inverse()? * matrix_fraction(families);
    for f in families {
        s = s + f.material.stiffness().inverse()? * f.fraction;
    }
    s.inverse()
}

/// Normalized self-consistent: each family and the matrix (as spheres) are
/// embedded in the unknown effective medium; the self-consistent localizations
/// are normalized by their RVE average and the stiffness is iterated to a fixed point.
pub fn homogenize_nsc(
    families: &[InclusionFamily],
    matrix: &IsotropicMaterial,
    settings: &MeanFieldSettings,
) -> Result<MeanFieldEstimate> {
    validate(families)?;
    let quad = SphereQuadrature::new(settings.quadrature_order);
    let cm = matrix.stiffness();
    let mut current = voigt_average(families, matrix);
    let mut change = f64::INFINITY;
    for iteration in 1..=settings.nsc_max_iterations {
        let raw = families
            .par_iter()
            .map(|f| {
                let local_ref = current.rotate_unchecked(&f.rotation.transpose());
                let local_ci = f.material.stiffness().rotate_unchecked(&f.rotation.transpose());
                let e = morris_tensor(&local_ref, f.semi_axes, &quad)?;
                let a = (Tensor4::identity() + e.contract(&(local_ci - local_ref))).inverse()?;
                Ok(a.rotate_unchecked(&f.rotation))
            })
            .collect::<Result<Vec<_>>>()?;
        let e_matrix = morris_tensor(&current, [1.0; 3], &quad)?;
        let raw_matrix = (Tensor4::identity() + e_matrix.contract(&(cm - current))).inverse()?;
        let estimate = assemble(
            Model::NormalizedSelfConsistent,
            families,
            matrix,
            raw_matrix,
            raw,
            iteration,
        )?;
        change = estimate.stiffness.relative_distance(&current);
        current = estimate.stiffness;
        if change <= settings.nsc_tolerance {
            return Ok(estimate);
        }
    }
    Err(Error::MeanFieldNonConvergence { iterations: settings.nsc_max_iterations, change })
}

pub fn homogenize(
    model: Model,
    families: &[InclusionFamily],
    matrix: &IsotropicMaterial,
    settings: &MeanFieldSettings,
) -> Result<MeanFieldEstimate> {
    match model {
        Model::MoriTanaka => homogenize_mt(families, matrix, settings),
        Model::Lielens => homogenize_lielens(families, matrix, settings),
        Model::NormalizedSelfConsistent => homogenize_nsc(families, matrix, settings),
    }
}

/// Groups the inclusions of a realization into families of identical shape,
/// size and orientation. Spheres ignore orientation.
pub fn families_from_realization(
    realization: &RveRealization,
    inclusion_material: &IsotropicMaterial,
) -> Vec<InclusionFamily> {
    let cell_volume = realization.cell_edge.powi(3);
    let mut families: Vec<InclusionFamily> = Vec::new();
    let mut keys: Vec<(Shape, [u64; 3], [u64; 3])> = Vec::new();
    for inc in &realization.inclusions {
        let orientation = match inc.shape {
            Shape::Sphere => EulerAngles::ZERO,
            Shape::Ellipsoid => inc.euler,
        };
        let key = (
            inc.shape,
            inc.semi_axes.map(f64::to_bits),
            <[f64; 3]>::from(orientation).map(f64::to_bits),
        );
        let fraction = inc.volume() / cell_volume;
        match keys.iter().position(|k| *k == key) {
            Some(idx) => families[idx].fraction += fraction,
            None => {
                keys.push(key);
                families.push(InclusionFamily::new(
                    inc.shape,
                    fraction,
                    *inclusion_material,
                    inc.semi_axes,
                    orientation,
                ));
            }
        }
    }
    families
}
