//! Random sequential adsorption: inclusions are placed one after the other at
//! uniformly random positions, rejecting any trial that intersects an already
//! placed inclusion or its own periodic image.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{intersects, intersects_own_image, templates, OrientationPolicy, RveRealization, RveSpec, Shape};
use crate::error::{Error, Result};
use crate::rotation::EulerAngles;

/// Largest total volume fraction accepted by [`rsa_generate`].
pub const MAX_RSA_FRACTION: f64 = 0.35;

/// Consecutive rejected trials for one inclusion before giving up.
pub const MAX_REJECTIONS: usize = 100_000;

pub fn rsa_generate(spec: &RveSpec, seed: u64) -> Result<RveRealization> {
    rsa_generate_with_budget(spec, seed, MAX_REJECTIONS)
}

/// [`rsa_generate`] with a custom consecutive-rejection budget.
pub fn rsa_generate_with_budget(spec: &RveSpec, seed: u64, max_rejections: usize) -> Result<RveRealization> {
    spec.validate()?;
    let total = spec.total_fraction();
    if total > MAX_RSA_FRACTION {
        return Err(Error::InvalidSpec(format!(
            "RSA accepts total fractions up to {MAX_RSA_FRACTION}, got {total}"
        )));
    }
    let l = spec.cell_edge;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pending = templates(spec, &mut rng)?;
    let random_orientation = random_orientation_mask(spec);
    // Largest first; the sort is stable so equal volumes keep spec order.
    let mut order: Vec<usize> = (0..pending.len()).collect();
    order.sort_by(|&a, &b| pending[b].volume().total_cmp(&pending[a].volume()));

    let mut out = RveRealization::empty(l, seed);
    out.target_fractions = spec.target_fractions();
    let requested = pending.len();
    for idx in order {
        let inc = &mut pending[idx];
        let mut rejections = 0;
        loop {
            inc.center = [rng.random::<f64>() * l, rng.random::<f64>() * l, rng.random::<f64>() * l];
            if inc.shape == Shape::Ellipsoid && random_orientation[idx] {
                inc.euler = EulerAngles::random(&mut rng);
                if intersects_own_image(inc, l) {
                    rejections += 1;
                    if rejections >= max_rejections {
                        return Err(jammed(&out, requested, rejections));
                    }
                    continue;
                }
            }
            if !out.inclusions.iter().any(|p| intersects(p, inc, l)) {
                break;
            }
            rejections += 1;
            if rejections >= max_rejections {
                return Err(jammed(&out, requested, rejections));
            }
        }
        log::debug!("placed inclusion {} after {rejections} rejections", out.inclusions.len());
        out.inclusions.push(inc.clone());
    }
    Ok(out)
}

/// Per-template flag: orientation is redrawn on every trial.
fn random_orientation_mask(spec: &RveSpec) -> Vec<bool> {
    let mut out = Vec::new();
    for p in &spec.phases {
        if p.count == 0 || p.fraction == 0.0 {
            continue;
        }
        let random = matches!(p.orientation, OrientationPolicy::Random);
        out.extend(std::iter::repeat_n(random, p.count));
    }
    out
}

fn jammed(out: &RveRealization, requested: usize, rejections: usize) -> Error {
    Error::Jamming {
        placed: out.inclusions.len(),
        requested,
        rejections,
        achieved_fraction: out.total_fraction(),
    }
}
