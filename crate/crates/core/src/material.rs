use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor4;

/// Linear isotropic elastic phase described by Young's modulus and Poisson ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMaterial", into = "RawMaterial")]
pub struct IsotropicMaterial {
    young: f64,
    poisson: f64,
}

#[derive(Serialize, Deserialize)]
struct RawMaterial {
    young: f64,
    poisson: f64,
}

impl TryFrom<RawMaterial> for IsotropicMaterial {
    type Error = Error;
    fn try_from(r: RawMaterial) -> Result<Self> {
        IsotropicMaterial::new(r.young, r.poisson)
    }
}

impl From<IsotropicMaterial> for RawMaterial {
    fn from(m: IsotropicMaterial) -> Self {
        RawMaterial { young: m.young, poisson: m.poisson }
    }
}

impl IsotropicMaterial {
    pub fn new(young: f64, poisson: f64) -> Result<Self> {
        let valid = young.is_finite() && young > 0.0 && poisson > -1.0 && poisson < 0.5;
        if !valid {
            return Err(Error::InvalidMaterial { young, poisson });
        }
        Ok(Self { young, poisson })
    }

    pub fn from_bulk_shear(bulk: f64, shear: f64) -> Result<Self> {
        let young = 9.0 * bulk * shear / (3.0 * bulk + shear);
        let poisson = (3.0 * bulk - 2.0 * shear) / (2.0 * (3.0 * bulk + shear));
        Self::new(young, poisson)
    }

    pub fn young(&self) -> f64 {
        self.young
    }

    pub fn poisson(&self) -> f64 {
        self.poisson
    }

    /// Lamé's first parameter.
    pub fn lambda(&self) -> f64 {
        self.young * self.poisson / ((1.0 + self.poisson) * (1.0 - 2.0 * self.poisson))
    }

    pub fn shear(&self) -> f64 {
        self.young / (2.0 * (1.0 + self.poisson))
    }

    pub fn bulk(&self) -> f64 {
        self.young / (3.0 * (1.0 - 2.0 * self.poisson))
    }

    /// Same Poisson ratio, Young's modulus multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.young * factor, self.poisson)
    }

    /// `C_ijkl = lambda d_ij d_kl + mu (d_ik d_jl + d_il d_jk)`.
    pub fn stiffness(&self) -> Tensor4 {
        let lambda = self.lambda();
        let mu = self.shear();
        let mut c = [[[[0.0; 3]; 3]; 3]; 3];
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for (i, ci) in c.iter_mut().enumerate() {
            for (j, cij) in ci.iter_mut().enumerate() {
                for (k, cijk) in cij.iter_mut().enumerate() {
                    for (l, v) in cijk.iter_mut().enumerate() {
                        *v = lambda * d(i, j) * d(k, l) + mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k));
                    }
                }
            }
        }
        Tensor4::from_components(&c)
    }
}

/// Shorthand for [`IsotropicMaterial::stiffness`].
pub fn iso_stiffness(mat: &IsotropicMaterial) -> Tensor4 {
    mat.stiffness()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lame_constants_at_one_third() {
        let m = IsotropicMaterial::new(1.0, 1.0 / 3.0).unwrap();
        assert!((m.lambda() - 0.75).abs() < 1e-15);
        assert!((m.shear() - 0.375).abs() < 1e-15);
        assert!((m.bulk() - 1.0).abs() < 1e-15);
        let c = m.stiffness();
        assert!((c.component(0, 0, 0, 0) - 1.5).abs() < 1e-15);
        assert!((c.component(0, 0, 1, 1) - 0.75).abs() < 1e-15);
        assert!((c.component(0, 1, 0, 1) - 0.375).abs() < 1e-15);
        assert!(c.major_asymmetry() == 0.0);
        assert!(c.kelvin_eigenvalues()[0] > 0.0);
    }

    #[test]
    fn zero_poisson_has_no_lambda() {
        let m = IsotropicMaterial::new(1.0, 0.0).unwrap();
        assert_eq!(m.lambda(), 0.0);
        assert!((m.shear() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn stiffness_is_linear_in_young() {
        let a = IsotropicMaterial::new(1.0, 1.0 / 3.0).unwrap().stiffness();
        let b = IsotropicMaterial::new(100.0, 1.0 / 3.0).unwrap().stiffness();
        assert!(b.relative_distance(&(a * 100.0)) < 1e-15);
    }

    #[test]
    fn agrees_with_projector_construction() {
        let m = IsotropicMaterial::new(2.5, 0.2).unwrap();
        assert!(m.stiffness().relative_distance(&Tensor4::isotropic(m.bulk(), m.shear())) < 1e-14);
    }

    #[test]
    fn rejects_invalid_poisson() {
        for nu in [0.5, -1.0, 0.7, f64::NAN] {
            assert!(IsotropicMaterial::new(1.0, nu).is_err());
        }
        assert!(IsotropicMaterial::new(0.0, 0.3).is_err());
        assert!(serde_json::from_str::<IsotropicMaterial>(r#"{"young":1.0,"poisson":0.5}"#).is_err());
    }
}
