use homog::meanfield::{
    families_from_realization, homogenize, homogenize_lielens, homogenize_mt, homogenize_nsc, lielens_factor,
    reuss_average, voigt_average, InclusionFamily, MeanFieldSettings, Model,
};
use homog::rve::{generate, preset, Shape};
use homog::{EulerAngles, IsotropicMaterial, Tensor4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NU: f64 = 1.0 / 3.0;

fn matrix() -> IsotropicMaterial {
    IsotropicMaterial::new(1.0, NU).unwrap()
}

fn inclusion(contrast: f64) -> IsotropicMaterial {
    IsotropicMaterial::new(contrast, NU).unwrap()
}

fn settings() -> MeanFieldSettings {
    MeanFieldSettings::default()
}

/// Hashin-Shtrikman lower bound for stiff spheres in a softer matrix.
fn hs_lower(km: f64, mum: f64, ki: f64, mui: f64, fi: f64) -> (f64, f64) {
    let fm = 1.0 - fi;
    let k = km + fi / (1.0 / (ki - km) + 3.0 * fm / (3.0 * km + 4.0 * mum));
    let mu = mum + fi / (1.0 / (mui - mum) + 6.0 * fm * (km + 2.0 * mum) / (5.0 * mum * (3.0 * km + 4.0 * mum)));
    (k, mu)
}

/// Classical self-consistent estimate for a two-phase sphere composite,
/// solved by fixed-point iteration on the implicit equations.
fn self_consistent_spheres(m: &IsotropicMaterial, i: &IsotropicMaterial, fi: f64) -> (f64, f64) {
    let phases = [(1.0 - fi, m.bulk(), m.shear()), (fi, i.bulk(), i.shear())];
    let (mut k, mut mu) = (
        phases.iter().map(|p| p.0 * p.1).sum::<f64>(),
        phases.iter().map(|p| p.0 * p.2).sum::<f64>(),
    );
    for _ in 0..10_000 {
        let mu_star = mu * (9.0 * k + 8.0 * mu) / (6.0 * (k + 2.0 * mu));
        let wk: Vec<f64> = phases.iter().map(|p| p.0 / (3.0 * p.1 + 4.0 * mu)).collect();
        let wm: Vec<f64> = phases.iter().map(|p| p.0 / (p.2 + mu_star)).collect();
        let k_new = phases.iter().zip(&wk).map(|(p, w)| w * p.1).sum::<f64>() / wk.iter().sum::<f64>();
        let mu_new = phases.iter().zip(&wm).map(|(p, w)| w * p.2).sum::<f64>() / wm.iter().sum::<f64>();
        let done = (k_new - k).abs() < 1e-15 * k && (mu_new - mu).abs() < 1e-15 * mu;
        k = k_new;
        mu = mu_new;
        if done {
            break;
        }
    }
    (k, mu)
}

fn ellipsoid_family(fraction: f64, contrast: f64, aspect: f64, euler: EulerAngles) -> InclusionFamily {
    InclusionFamily::new(Shape::Ellipsoid, fraction, inclusion(contrast), [aspect, 1.0, 1.0], euler)
}

fn mixed_families(contrast: f64) -> Vec<InclusionFamily> {
    let r = generate(&preset("rve1").unwrap(), 3).unwrap();
    families_from_realization(&r, &inclusion(contrast))
}

#[test]
fn mori_tanaka_spheres_hit_hashin_shtrikman_lower_bound() {
    let m = matrix();
    for fi in [0.05, 0.3, 0.5] {
        for contrast in [10.0, 100.0] {
            let i = inclusion(contrast);
            let c = homogenize_mt(&[InclusionFamily::sphere(fi, i)], &m, &settings()).unwrap().stiffness;
            let (k, mu) = c.isotropic_projection();
            let (k_hs, mu_hs) = hs_lower(m.bulk(), m.shear(), i.bulk(), i.shear(), fi);
            assert!((k - k_hs).abs() / m.bulk() <= 1e-6, "f {fi} contrast {contrast}: K {k} vs {k_hs}");
            assert!((mu - mu_hs).abs() / m.shear() <= 1e-6, "f {fi} contrast {contrast}: mu {mu} vs {mu_hs}");
            assert!(c.anisotropy() < 1e-10);
        }
    }
}

#[test]
fn nsc_spheres_match_classical_self_consistent() {
    let m = matrix();
    for (fi, contrast) in [(0.2, 10.0), (0.5, 50.0)] {
        let i = inclusion(contrast);
        let est = homogenize_nsc(&[InclusionFamily::sphere(fi, i)], &m, &settings()).unwrap();
        let (k, mu) = est.stiffness.isotropic_projection();
        let (k_sc, mu_sc) = self_consistent_spheres(&m, &i, fi);
        assert!((k - k_sc).abs() / k_sc < 1e-6, "K {k} vs {k_sc}");
        assert!((mu - mu_sc).abs() / mu_sc < 1e-6, "mu {mu} vs {mu_sc}");
        assert!(est.iterations > 1);
    }
}

#[test]
fn lielens_reduces_to_mori_tanaka_at_vanishing_fraction() {
    let m = matrix();
    let fams = vec![ellipsoid_family(1e-6, 20.0, 5.0, EulerAngles::new(0.4, 1.0, 2.0))];
    let mt = homogenize_mt(&fams, &m, &settings()).unwrap().stiffness;
    let li = homogenize_lielens(&fams, &m, &settings()).unwrap().stiffness;
    assert!(li.relative_distance(&mt) <= 1e-10);
    assert_eq!(lielens_factor(0.0), 0.0);
    assert_eq!(lielens_factor(1.0), 1.0);
    assert!((lielens_factor(0.3) - 0.195).abs() < 1e-15);
}

#[test]
fn lielens_lies_between_the_hashin_shtrikman_bounds() {
    // Lower branch is HS lower, upper branch is HS upper for spheres.
    let m = matrix();
    let i = inclusion(20.0);
    let fi = 0.4;
    let c = homogenize_lielens(&[InclusionFamily::sphere(fi, i)], &m, &settings()).unwrap().stiffness;
    let (k, mu) = c.isotropic_projection();
    let (k_lo, mu_lo) = hs_lower(m.bulk(), m.shear(), i.bulk(), i.shear(), fi);
    let (k_hi, mu_hi) = hs_lower(i.bulk(), i.shear(), m.bulk(), m.shear(), 1.0 - fi);
    assert!(k_lo < k && k < k_hi);
    assert!(mu_lo < mu && mu < mu_hi);
}

#[test]
fn contrast_one_and_zero_fraction_return_the_matrix() {
    let m = matrix();
    let cm = m.stiffness();
    for model in Model::ALL {
        let c = homogenize(model, &mixed_families(1.0), &m, &settings()).unwrap().stiffness;
        assert!(c.relative_distance(&cm) <= 1e-12, "{model} contrast 1");
        let fams = vec![ellipsoid_family(0.0, 50.0, 10.0, EulerAngles::new(1.0, 0.5, 0.1)), InclusionFamily::sphere(0.0, inclusion(50.0))];
        let c = homogenize(model, &fams, &m, &settings()).unwrap().stiffness;
        assert!(c.relative_distance(&cm) <= 1e-12, "{model} zero fraction");
        let c = homogenize(model, &[], &m, &settings()).unwrap().stiffness;
        assert!(c.relative_distance(&cm) <= 1e-14);
    }
}

#[test]
fn normalized_localizations_average_to_identity() {
    let m = matrix();
    let fams = mixed_families(100.0);
    assert_eq!(fams.len(), 11);
    for model in Model::ALL {
        let est = homogenize(model, &fams, &m, &settings()).unwrap();
        let avg = est.localization_average(&fams);
        let err = (*avg.mandel() - *Tensor4::identity().mandel()).abs().max();
        assert!(err <= 1e-10, "{model}: {err:e}");
    }
}

#[test]
fn returned_stiffness_is_major_symmetric() {
    let m = matrix();
    let fams = mixed_families(100.0);
    for model in Model::ALL {
        let est = homogenize(model, &fams, &m, &settings()).unwrap();
        assert!(est.stiffness.major_asymmetry() <= 1e-8);
        eprintln!("{model}: raw asymmetry {:.3e}", est.raw_asymmetry);
    }
    // A single orientation family is symmetric before symmetrization.
    let single = vec![ellipsoid_family(0.2, 30.0, 5.0, EulerAngles::new(0.3, 0.9, 1.7))];
    for model in Model::ALL {
        assert!(homogenize(model, &single, &m, &settings()).unwrap().raw_asymmetry <= 1e-10, "{model}");
    }
}

#[test]
fn homogenization_commutes_with_rotation() {
    let m = matrix();
    let fam = ellipsoid_family(0.15, 20.0, 5.0, EulerAngles::new(0.2, 0.7, 1.3));
    let rot = EulerAngles::new(1.1, 0.4, 2.5).matrix();
    for model in Model::ALL {
        let base = homogenize(model, std::slice::from_ref(&fam), &m, &settings()).unwrap().stiffness;
        let turned = homogenize(model, &[fam.rotated(&rot)], &m, &settings()).unwrap().stiffness;
        let want = base.rotate(&rot).unwrap();
        assert!(turned.relative_distance(&want) <= 1e-8, "{model}: {}", turned.relative_distance(&want));
    }
}

#[test]
fn random_orientations_give_isotropic_mori_tanaka() {
    let m = matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 500;
    let fams: Vec<_> = (0..n).map(|_| ellipsoid_family(0.2 / n as f64, 20.0, 10.0, EulerAngles::random(&mut rng))).collect();
    let c = homogenize_mt(&fams, &m, &settings()).unwrap().stiffness;
    assert!(c.anisotropy() <= 0.02, "anisotropy {}", c.anisotropy());
    // Kelvin spectrum close to the isotropic pattern (2mu x5, 3K), relative to its largest value.
    let (k, mu) = c.isotropic_projection();
    let ev = c.kelvin_eigenvalues();
    for (got, want) in ev.iter().zip([2.0 * mu, 2.0 * mu, 2.0 * mu, 2.0 * mu, 2.0 * mu, 3.0 * k]) {
        assert!((got - want).abs() / ev[5] <= 0.02, "{ev:?}");
    }
}

#[test]
fn estimates_lie_between_voigt_and_reuss() {
    let m = matrix();
    let cases = vec![
        mixed_families(100.0),
        vec![InclusionFamily::sphere(0.5, inclusion(10.0))],
        vec![ellipsoid_family(0.3, 400.0, 5.0, EulerAngles::new(0.1, 0.2, 0.3))],
    ];
    for fams in cases {
        let voigt = voigt_average(&fams, &m);
        let reuss = reuss_average(&fams, &m).unwrap();
        for model in Model::ALL {
            let c = homogenize(model, &fams, &m, &settings()).unwrap().stiffness;
            let scale = voigt.norm();
            let above = (voigt - c).kelvin_eigenvalues()[0];
            let below = (c - reuss).kelvin_eigenvalues()[0];
            assert!(above >= -1e-10 * scale, "{model} exceeds Voigt: {above}");
            assert!(below >= -1e-10 * scale, "{model} below Reuss: {below}");
        }
    }
}

#[test]
fn families_group_by_shape_and_orientation() {
    let r = generate(&preset("rve1").unwrap(), 3).unwrap();
    let fams = families_from_realization(&r, &inclusion(10.0));
    let spheres: Vec<_> = fams.iter().filter(|f| f.shape == Shape::Sphere).collect();
    assert_eq!(spheres.len(), 1);
    assert!((spheres[0].fraction - 0.05).abs() < 1e-12);
    let ell: f64 = fams.iter().filter(|f| f.shape == Shape::Ellipsoid).map(|f| f.fraction).sum();
    assert!((ell - 0.067).abs() < 1e-12);
}

#[test]
fn stiff_inclusions_stiffen_monotonically() {
    let m = matrix();
    for model in Model::ALL {
        let mut last = 0.0;
        for contrast in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
            let (k, _) = homogenize(model, &mixed_families(contrast), &m, &settings()).unwrap().stiffness.isotropic_projection();
            assert!(k >= last);
            last = k;
        }
    }
}
