//! Minor-symmetric rank-4 tensors and their orthonormal (Mandel) 6×6 view.
//!
//! Storage is the Mandel matrix `M_IJ = w_I w_J C_ijkl` with `w = 1` for the
//! normal pairs (11, 22, 33) and `w = √2` for the shear pairs (23, 13, 12).
//! In this basis the double contraction `A:B` is the matrix product and the
//! inverse on symmetric second-order tensors is the matrix inverse.

use std::f64::consts::SQRT_2;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix6, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index pairs of the Mandel/Voigt ordering: 11, 22, 33, 23, 13, 12.
pub const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

/// Mandel weights of the six pairs.
pub const WEIGHTS: [f64; 6] = [1.0, 1.0, 1.0, SQRT_2, SQRT_2, SQRT_2];

/// Condition number above which [`Tensor4::inverse`] refuses to invert.
pub const MAX_CONDITION: f64 = 1e12;

/// Tolerance on `|m^T m - I|` for accepting a rotation matrix.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

pub type Components = [[[[f64; 3]; 3]; 3]; 3];

/// Mandel index of the symmetric pair `(i, j)`.
#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) => 3,
        (0, 2) => 4,
        (0, 1) => 5,
        _ => unreachable!("index out of range"),
    }
}

/// Rank-4 tensor with the minor symmetries `T_ijkl = T_jikl = T_ijlk`.
///
/// Used for stiffnesses as well as localization and interaction tensors;
/// major symmetry is not assumed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[f64; 6]; 6]", into = "[[f64; 6]; 6]")]
pub struct Tensor4 {
    mandel: Matrix6<f64>,
}

/// Stiffness tensors are plain minor-symmetric rank-4 tensors.
pub type StiffnessTensor = Tensor4;

impl Tensor4 {
    pub fn zeros() -> Self {
        Self { mandel: Matrix6::zeros() }
    }

    /// Fourth-order identity on symmetric second-order tensors.
    pub fn identity() -> Self {
        Self { mandel: Matrix6::identity() }
    }

    pub fn from_mandel(mandel: Matrix6<f64>) -> Self {
        Self { mandel }
    }

    pub fn mandel(&self) -> &Matrix6<f64> {
        &self.mandel
    }

    pub fn to_mandel_array(&self) -> [[f64; 6]; 6] {
        let mut out = [[0.0; 6]; 6];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.mandel[(r, c)];
            }
        }
        out
    }

    pub fn from_mandel_array(a: &[[f64; 6]; 6]) -> Self {
        Self { mandel: Matrix6::from_fn(|r, c| a[r][c]) }
    }

    /// Isotropic tensor `3k J + 2mu K` built from the spherical and deviatoric projectors.
    pub fn isotropic(bulk: f64, shear: f64) -> Self {
        let mut m = Matrix6::zeros();
        for r in 0..3 {
            for c in 0..3 {
                m[(r, c)] = bulk - 2.0 * shear / 3.0;
            }
            m[(r, r)] += 2.0 * shear;
        }
        for r in 3..6 {
            m[(r, r)] = 2.0 * shear;
        }
        Self { mandel: m }
    }

    /// Unweighted component `T_ijkl`.
    #[inline]
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let r = pair_index(i, j);
        let c = pair_index(k, l);
        self.mandel[(r, c)] / (WEIGHTS[r] * WEIGHTS[c])
    }

    pub fn to_components(&self) -> Components {
        let mut out = [[[[0.0; 3]; 3]; 3]; 3];
        for (i, a) in out.iter_mut().enumerate() {
            for (j, b) in a.iter_mut().enumerate() {
                for (k, c) in b.iter_mut().enumerate() {
                    for (l, v) in c.iter_mut().enumerate() {
                        *v = self.component(i, j, k, l);
                    }
                }
            }
        }
        out
    }

    /// Builds a tensor from a full component array, averaging over the
    /// minor-symmetric partners so the result is minor-symmetric exactly.
    pub fn from_components(t: &Components) -> Self {
        let mut m = Matrix6::zeros();
        for (r, &(i, j)) in PAIRS.iter().enumerate() {
            for (c, &(k, l)) in PAIRS.iter().enumerate() {
                let v = 0.25 * (t[i][j][k][l] + t[j][i][k][l] + t[i][j][l][k] + t[j][i][l][k]);
                m[(r, c)] = WEIGHTS[r] * WEIGHTS[c] * v;
            }
        }
        Self { mandel: m }
    }

    /// Unweighted Voigt matrix `C_IJ` (engineering-shear convention).
    pub fn voigt(&self) -> Matrix6<f64> {
        Matrix6::from_fn(|r, c| self.mandel[(r, c)] / (WEIGHTS[r] * WEIGHTS[c]))
    }

    pub fn from_voigt(v: &Matrix6<f64>) -> Self {
        Self { mandel: Matrix6::from_fn(|r, c| v[(r, c)] * WEIGHTS[r] * WEIGHTS[c]) }
    }

    /// Double contraction `self : other`.
    pub fn contract(&self, other: &Tensor4) -> Tensor4 {
        Tensor4 { mandel: self.mandel * other.mandel }
    }

    /// Double contraction with a symmetric second-order tensor in Mandel form.
    pub fn apply(&self, v: &[f64; 6]) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..6).map(|c| self.mandel[(r, c)] * v[c]).sum();
        }
        out
    }

    /// Condition number of the Mandel view (ratio of extreme singular values).
    pub fn condition_number(&self) -> f64 {
        let sv = self.mandel.singular_values();
        let max = sv.max();
        let min = sv.min();
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Inverse on symmetric second-order tensors.
    pub fn inverse(&self) -> Result<Tensor4> {
        let condition = self.condition_number();
        if !condition.is_finite() || condition > MAX_CONDITION {
            return Err(Error::Singular { condition });
        }
        self.mandel
            .try_inverse()
            .map(|mandel| Tensor4 { mandel })
            .ok_or(Error::Singular { condition })
    }

    /// Major transpose `T_klij`.
    pub fn transpose(&self) -> Tensor4 {
        Tensor4 { mandel: self.mandel.transpose() }
    }

    pub fn symmetric_part(&self) -> Tensor4 {
        Tensor4 { mandel: (self.mandel + self.mandel.transpose()) * 0.5 }
    }

    /// Frobenius norm; equal for the component and Mandel views.
    pub fn norm(&self) -> f64 {
        self.mandel.norm()
    }

    /// `|T - T^T| / |T|`.
    pub fn major_asymmetry(&self) -> f64 {
        let n = self.norm();
        if n == 0.0 {
            0.0
        } else {
            (self.mandel - self.mandel.transpose()).norm() / n
        }
    }

    pub fn relative_distance(&self, other: &Tensor4) -> f64 {
        (self.mandel - other.mandel).norm() / other.norm().max(f64::MIN_POSITIVE)
    }

    /// Eigenvalues of the symmetric part of the Mandel matrix, ascending.
    pub fn kelvin_eigenvalues(&self) -> [f64; 6] {
        let eig = SymmetricEigen::new(self.symmetric_part().mandel);
        let mut ev = [0.0; 6];
        ev.copy_from_slice(eig.eigenvalues.as_slice());
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Bulk and shear moduli of the closest isotropic tensor (orthogonal projection).
    pub fn isotropic_projection(&self) -> (f64, f64) {
        let m = &self.mandel;
        let mut normal_sum = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                normal_sum += m[(r, c)];
            }
        }
        let bulk = normal_sum / 9.0;
        let shear = (3.0 * m.trace() - normal_sum) / 30.0;
        (bulk, shear)
    }

    /// Relative distance to the isotropic projection.
    pub fn anisotropy(&self) -> f64 {
        let (k, mu) = self.isotropic_projection();
        (self.mandel - Tensor4::isotropic(k, mu).mandel).norm() / self.norm()
    }

    /// Rotates the tensor with `T'_ijkl = m_im m_jn m_ko m_lp T_mnop`.
    pub fn rotate(&self, m: &Matrix3<f64>) -> Result<Tensor4> {
        let deviation = orthogonality_defect(m);
        if deviation > ORTHOGONALITY_TOL {
            return Err(Error::NotOrthogonal { deviation });
        }
        Ok(self.rotate_unchecked(m))
    }

    /// [`Tensor4::rotate`] without the orthogonality check.
    pub fn rotate_unchecked(&self, m: &Matrix3<f64>) -> Tensor4 {
        let t = self.to_components();
        let mut a = [[[[0.0; 3]; 3]; 3]; 3];
        let mut b = [[[[0.0; 3]; 3]; 3]; 3];
        // Contract one index at a time.
        for i in 0..3 {
            for n in 0..3 {
                for o in 0..3 {
                    for p in 0..3 {
                        a[i][n][o][p] = (0..3).map(|q| m[(i, q)] * t[q][n][o][p]).sum();
                    }
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                for o in 0..3 {
                    for p in 0..3 {
                        b[i][j][o][p] = (0..3).map(|q| m[(j, q)] * a[i][q][o][p]).sum();
                    }
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for p in 0..3 {
                        a[i][j][k][p] = (0..3).map(|q| m[(k, q)] * b[i][j][q][p]).sum();
                    }
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        b[i][j][k][l] = (0..3).map(|q| m[(l, q)] * a[i][j][k][q]).sum();
                    }
                }
            }
        }
        Tensor4::from_components(&b)
    }
}

impl From<[[f64; 6]; 6]> for Tensor4 {
    fn from(a: [[f64; 6]; 6]) -> Self {
        Tensor4::from_mandel_array(&a)
    }
}

impl From<Tensor4> for [[f64; 6]; 6] {
    fn from(t: Tensor4) -> Self {
        t.to_mandel_array()
    }
}

impl Add for Tensor4 {
    type Output = Tensor4;
    fn add(self, rhs: Tensor4) -> Tensor4 {
        Tensor4 { mandel: self.mandel + rhs.mandel }
    }
}

impl Sub for Tensor4 {
    type Output = Tensor4;
    fn sub(self, rhs: Tensor4) -> Tensor4 {
        Tensor4 { mandel: self.mandel - rhs.mandel }
    }
}

impl Neg for Tensor4 {
    type Output = Tensor4;
    fn neg(self) -> Tensor4 {
        Tensor4 { mandel: -self.mandel }
    }
}

impl Mul<f64> for Tensor4 {
    type Output = Tensor4;
    fn mul(self, s: f64) -> Tensor4 {
        Tensor4 { mandel: self.mandel * s }
    }
}

impl Mul<Tensor4> for f64 {
    type Output = Tensor4;
    fn mul(self, t: Tensor4) -> Tensor4 {
        t * self
    }
}

/// Weight-normalized sum `sum(w_i T_i) / sum(w_i)`.
pub fn average(items: &[(f64, Tensor4)]) -> Result<Tensor4> {
    let total: f64 = items.iter().map(|(w, _)| w).sum();
    if total == 0.0 || !total.is_finite() {
        return Err(Error::EmptyAverage);
    }
    let sum = items
        .iter()
        .fold(Tensor4::zeros(), |acc, (w, t)| acc + *t * *w);
    Ok(sum * (1.0 / total))
}

/// `|m^T m - I|` in the Frobenius norm.
pub fn orthogonality_defect(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).norm()
}

/// Converts a symmetric 3×3 tensor to Mandel form.
pub fn to_mandel_vector(t: &Matrix3<f64>) -> [f64; 6] {
    let mut v = [0.0; 6];
    for (r, &(i, j)) in PAIRS.iter().enumerate() {
        v[r] = WEIGHTS[r] * 0.5 * (t[(i, j)] + t[(j, i)]);
    }
    v
}

pub fn from_mandel_vector(v: &[f64; 6]) -> Matrix3<f64> {
    let mut t = Matrix3::zeros();
    for (r, &(i, j)) in PAIRS.iter().enumerate() {
        t[(i, j)] = v[r] / WEIGHTS[r];
        t[(j, i)] = v[r] / WEIGHTS[r];
    }
    t
}
