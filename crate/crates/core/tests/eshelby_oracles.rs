//! Quadratured Eshelby tensors against classical closed forms.

use homog::meanfield::{eshelby_tensor, SphereQuadrature};
use homog::{IsotropicMaterial, Tensor4};

const NU: f64 = 1.0 / 3.0;

fn matrix() -> Tensor4 {
    IsotropicMaterial::new(1.0, NU).unwrap().stiffness()
}

/// Prolate spheroid (axis 1 long, aspect ratio `alpha`) in an isotropic matrix.
/// Returns (S1111, S2222, S2233, S2211, S1122, S2323, S1212).
fn prolate_closed_form(alpha: f64, nu: f64) -> [f64; 7] {
    let a2 = alpha * alpha;
    let d = a2 - 1.0;
    let g = alpha / d.powf(1.5) * (alpha * d.sqrt() - alpha.acosh());
    let q = 1.0 - nu;
    let s1111 = (1.0 - 2.0 * nu + (3.0 * a2 - 1.0) / d - (1.0 - 2.0 * nu + 3.0 * a2 / d) * g) / (2.0 * q);
    let s2222 = 3.0 * a2 / (8.0 * q * d) + (1.0 - 2.0 * nu - 9.0 / (4.0 * d)) * g / (4.0 * q);
    let s2233 = (a2 / (2.0 * d) - (1.0 - 2.0 * nu + 3.0 / (4.0 * d)) * g) / (4.0 * q);
    let s2211 = -a2 / (2.0 * q * d) + (3.0 * a2 / d - (1.0 - 2.0 * nu)) * g / (4.0 * q);
    let s1122 = -(1.0 - 2.0 * nu + 1.0 / d) / (2.0 * q) + (1.0 - 2.0 * nu + 3.0 / (2.0 * d)) * g / (2.0 * q);
    let s2323 = (a2 / (2.0 * d) + (1.0 - 2.0 * nu - 3.0 / (4.0 * d)) * g) / (4.0 * q);
    let s1212 = (1.0 - 2.0 * nu - (a2 + 1.0) / d - 0.5 * (1.0 - 2.0 * nu - 3.0 * (a2 + 1.0) / d) * g) / (4.0 * q);
    [s1111, s2222, s2233, s2211, s1122, s2323, s1212]
}

fn quadratured(s: &Tensor4) -> [f64; 7] {
    [
        s.component(0, 0, 0, 0),
        s.component(1, 1, 1, 1),
        s.component(1, 1, 2, 2),
        s.component(1, 1, 0, 0),
        s.component(0, 0, 1, 1),
        s.component(1, 2, 1, 2),
        s.component(0, 1, 0, 1),
    ]
}

#[test]
fn prolate_spheroids_match_closed_form() {
    let quad = SphereQuadrature::new(64);
    for alpha in [1.5, 2.0, 5.0, 10.0] {
        let s = eshelby_tensor(&matrix(), [alpha, 1.0, 1.0], &quad).unwrap();
        let exact = prolate_closed_form(alpha, NU);
        for (got, want) in quadratured(&s).iter().zip(exact.iter()) {
            assert!((got - want).abs() < 1e-9, "alpha {alpha}: {got} vs {want}");
        }
        // Axisymmetry about the long axis.
        assert!((s.component(2, 2, 2, 2) - s.component(1, 1, 1, 1)).abs() < 1e-12);
    }
}

#[test]
fn needle_limit_approaches_cylinder() {
    // Circular cylinder along axis 1.
    let q = 1.0 - NU;
    let transverse = (5.0 - 4.0 * NU) / (8.0 * q);
    let cross = (4.0 * NU - 1.0) / (8.0 * q);
    let to_axial = NU / (2.0 * q);
    let shear_t = (3.0 - 4.0 * NU) / (8.0 * q);
    let s = eshelby_tensor(&matrix(), [1000.0, 1.0, 1.0], &SphereQuadrature::new(64)).unwrap();
    let checks = [
        (s.component(1, 1, 1, 1), transverse),
        (s.component(2, 2, 2, 2), transverse),
        (s.component(1, 1, 2, 2), cross),
        (s.component(1, 1, 0, 0), to_axial),
        (s.component(1, 2, 1, 2), shear_t),
        (s.component(0, 1, 0, 1), 0.25),
        (s.component(0, 0, 0, 0), 0.0),
        (s.component(0, 0, 1, 1), 0.0),
    ];
    for (got, want) in checks {
        assert!((got - want).abs() <= 0.01 * want.abs().max(0.25), "{got} vs {want}");
    }
}

#[test]
fn degraded_order_misses_sphere_oracle() {
    let s = eshelby_tensor(&matrix(), [1.0; 3], &SphereQuadrature::new(4)).unwrap();
    assert!((s.component(0, 0, 0, 0) - 8.0 / 15.0).abs() > 1e-6);
}

#[test]
fn sphere_eshelby_is_major_symmetric_in_mandel_form() {
    let s = eshelby_tensor(&matrix(), [0.3; 3], &SphereQuadrature::new(64)).unwrap();
    assert!(s.major_asymmetry() < 1e-12);
    assert!((s.component(0, 0, 0, 0) - 8.0 / 15.0).abs() < 1e-6);
    assert!((s.component(0, 0, 1, 1) - 1.0 / 15.0).abs() < 1e-6);
}
