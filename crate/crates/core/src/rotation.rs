//! Bunge-convention Euler angles.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix3;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Euler angles `(phi1, Phi, phi2)` in radians, Bunge convention.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct EulerAngles {
    pub phi1: f64,
    pub big_phi: f64,
    pub phi2: f64,
}

impl EulerAngles {
    pub const ZERO: EulerAngles = EulerAngles { phi1: 0.0, big_phi: 0.0, phi2: 0.0 };

    pub fn new(phi1: f64, big_phi: f64, phi2: f64) -> Self {
        Self { phi1, big_phi, phi2 }
    }

    /// Equivalent angles with `phi1, phi2 in [0, 2pi)` and `Phi in [0, pi]`.
    pub fn canonical(self) -> Self {
        let mut phi1 = self.phi1;
        let mut big_phi = self.big_phi.rem_euclid(TAU);
        let mut phi2 = self.phi2;
        if big_phi > PI {
            big_phi = TAU - big_phi;
            phi1 += PI;
            phi2 += PI;
        }
        Self {
            phi1: wrap_angle(phi1),
            big_phi,
            phi2: wrap_angle(phi2),
        }
    }

    /// Uniform on SO(3): `phi1, phi2` uniform on `[0, 2pi)`, `cos Phi` uniform on `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let phi1 = rng.random_range(0.0..TAU);
        let cos_phi: f64 = rng.random_range(-1.0..=1.0);
        let phi2 = rng.random_range(0.0..TAU);
        Self { phi1, big_phi: cos_phi.clamp(-1.0, 1.0).acos(), phi2 }
    }

    /// Recovers canonical angles from a rotation matrix produced by [`bunge_matrix`].
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let big_phi = m[(2, 2)].clamp(-1.0, 1.0).acos();
        let (phi1, phi2) = if big_phi.sin().abs() > 1e-12 {
            (m[(0, 2)].atan2(-m[(1, 2)]), m[(2, 0)].atan2(m[(2, 1)]))
        } else {
            // Gimbal lock: only phi1 +/- phi2 is defined, put it all in phi1.
            (m[(1, 0)].atan2(m[(0, 0)]), 0.0)
        };
        Self { phi1, big_phi, phi2 }.canonical()
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        bunge_matrix(*self)
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

impl From<[f64; 3]> for EulerAngles {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<EulerAngles> for [f64; 3] {
    fn from(e: EulerAngles) -> Self {
        [e.phi1, e.big_phi, e.phi2]
    }
}

/// Transformation matrix `m(phi1, Phi, phi2)` taking inclusion-frame
/// components to RVE-frame components: `x_global = m x_local`.
pub fn bunge_matrix(angles: EulerAngles) -> Matrix3<f64> {
    let (s1, c1) = angles.phi1.sin_cos();
    let (s, c) = angles.big_phi.sin_cos();
    let (s2, c2) = angles.phi2.sin_cos();
    Matrix3::new(
        c1 * c2 - s1 * s2 * c,
        -c1 * s2 - s1 * c2 * c,
        s1 * s,
        s1 * c2 + c1 * s2 * c,
        -s1 * s2 + c1 * c2 * c,
        -c1 * s,
        s2 * s,
        c2 * s,
        c,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_angles_give_identity() {
        assert_eq!(bunge_matrix(EulerAngles::ZERO), Matrix3::identity());
    }

    #[test]
    fn quarter_turn_about_axis_three() {
        let m = bunge_matrix(EulerAngles::new(PI / 2.0, 0.0, 0.0));
        let expected = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!((m - expected).norm() < 1e-15);
    }

    #[test]
    fn random_matrices_are_proper_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let m = bunge_matrix(EulerAngles::random(&mut rng));
            assert!((m.transpose() * m - Matrix3::identity()).norm() < 1e-14);
            assert!((m.determinant() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn canonical_ranges_preserve_matrix() {
        let raw = EulerAngles::new(-7.0, 4.5, 13.0);
        let c = raw.canonical();
        assert!((0.0..TAU).contains(&c.phi1));
        assert!((0.0..TAU).contains(&c.phi2));
        assert!((0.0..=PI).contains(&c.big_phi));
        assert!((bunge_matrix(raw) - bunge_matrix(c)).norm() < 1e-13);
    }

    #[test]
    fn matrix_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let e = EulerAngles::random(&mut rng);
            let back = EulerAngles::from_matrix(&bunge_matrix(e));
            assert!((bunge_matrix(back) - bunge_matrix(e)).norm() < 1e-10);
        }
        let m = bunge_matrix(EulerAngles::new(0.4, 0.0, 0.3));
        assert!((bunge_matrix(EulerAngles::from_matrix(&m)) - m).norm() < 1e-12);
        let m = bunge_matrix(EulerAngles::new(0.4, PI, 0.3));
        assert!((bunge_matrix(EulerAngles::from_matrix(&m)) - m).norm() < 1e-12);
    }
}
