//! Named microstructures: the five reference cells and the ellipsoid fraction series.

use super::{GeneratorKind, OrientationPolicy, PhaseSpec, RveSpec, Shape};

pub const PRESET_NAMES: [&str; 11] = [
    "rve1",
    "rve2",
    "rve3",
    "rve4",
    "rve5",
    "ellipsoids-4",
    "ellipsoids-8",
    "ellipsoids-12",
    "ellipsoids-16",
    "ellipsoids-20",
    "ellipsoids-30",
];

fn spheres(count: usize, fraction: f64) -> PhaseSpec {
    PhaseSpec { shape: Shape::Sphere, count, fraction, aspect_ratio: 1.0, orientation: OrientationPolicy::Random }
}

fn ellipsoids(count: usize, aspect_ratio: f64, fraction: f64) -> PhaseSpec {
    PhaseSpec { shape: Shape::Ellipsoid, count, fraction, aspect_ratio, orientation: OrientationPolicy::Random }
}

/// Spec of a named preset (case-insensitive), or `None`.
pub fn preset(name: &str) -> Option<RveSpec> {
    let name = name.to_ascii_lowercase();
    let spec = match name.as_str() {
        "rve1" => RveSpec::new(vec![spheres(10, 0.05), ellipsoids(10, 10.0, 0.067)], GeneratorKind::Rsa),
        "rve2" => RveSpec::new(vec![ellipsoids(10, 10.0, 0.098)], GeneratorKind::Rsa),
        "rve3" => RveSpec::new(vec![ellipsoids(10, 5.0, 0.30)], GeneratorKind::Md),
        "rve4" => RveSpec::new(vec![spheres(2, 0.05), ellipsoids(2, 5.0, 0.067)], GeneratorKind::Rsa),
        "rve5" => RveSpec::new(vec![spheres(10, 0.50)], GeneratorKind::Md),
        "empty" => RveSpec::new(Vec::new(), GeneratorKind::Rsa),
        other => {
            let percent: u32 = other.strip_prefix("ellipsoids-")?.parse().ok()?;
            if !(1..=60).contains(&percent) {
                return None;
            }
            let generator = if percent <= 20 { GeneratorKind::Rsa } else { GeneratorKind::Md };
            RveSpec::new(vec![ellipsoids(10, 5.0, percent as f64 / 100.0)], generator)
        }
    };
    Some(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in PRESET_NAMES {
            assert!(preset(name).unwrap().validate().is_ok(), "{name}");
        }
        assert!(preset("RVE3").is_some());
        assert!(preset("ellipsoids-x").is_none());
        assert!(preset("nothing").is_none());
        assert_eq!(preset("empty").unwrap().total_fraction(), 0.0);
    }

    #[test]
    fn densest_series_member() {
        let s = preset("ellipsoids-30").unwrap();
        assert_eq!(s.generator, GeneratorKind::Md);
        assert_eq!(s.phases[0].count, 10);
        assert_eq!(s.phases[0].aspect_ratio, 5.0);
        assert!((s.total_fraction() - 0.30).abs() < 1e-15);
    }
}
