//! Overlap relaxation: all inclusions are dropped into the cell at once and
//! pushed apart by synchronous pairwise displacements until no pair overlaps.
//!
//! Each overlapping pair moves both centers apart along the center line by
//! `step * depth / 2`, where `depth` is the center displacement bringing the
//! (slightly inflated) pair to contact. The metric `U = sum depth^2` must not
//! grow: a trial step that increases it is halved, and when halving fails the
//! configuration is jittered by up to `1e-3 L` per coordinate.

use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::geometry::contacts;
use super::{templates, wrap, Inclusion, RveRealization, RveSpec};
use crate::error::{Error, Result};

/// Largest total volume fraction accepted by [`md_generate`].
pub const MAX_MD_FRACTION: f64 = 0.60;

pub const DEFAULT_MAX_SWEEPS: usize = 10_000;

const STEP: f64 = 0.5;
const HALVINGS: usize = 6;
const JITTER: f64 = 1e-3;
/// Contacts are resolved for inclusions scaled by this factor, leaving a small gap.
const INFLATION: f64 = 1.0 + 1e-3;

#[derive(Clone, Debug, Default, Serialize)]
pub struct RelaxationReport {
    pub sweeps: usize,
    /// Overlap metric before the first sweep and after every sweep.
    pub history: Vec<f64>,
    /// Sweeps (1-based, indexing `history`) that ended with a random jitter.
    pub jitter_sweeps: Vec<usize>,
}

pub fn md_generate(spec: &RveSpec, seed: u64) -> Result<RveRealization> {
    md_generate_with_report(spec, seed, DEFAULT_MAX_SWEEPS).map(|(r, _)| r)
}

pub fn md_generate_with_report(spec: &RveSpec, seed: u64, max_sweeps: usize) -> Result<(RveRealization, RelaxationReport)> {
    spec.validate()?;
    let total = spec.total_fraction();
    if total > MAX_MD_FRACTION {
        return Err(Error::InvalidSpec(format!(
            "MD relaxation accepts total fractions up to {MAX_MD_FRACTION}, got {total}"
        )));
    }
    let l = spec.cell_edge;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut incs = templates(spec, &mut rng)?;
    for inc in &mut incs {
        inc.center = [rng.random::<f64>() * l, rng.random::<f64>() * l, rng.random::<f64>() * l];
    }
    let mut out = RveRealization::empty(l, seed);
    out.target_fractions = spec.target_fractions();

    let mut report = RelaxationReport::default();
    let (mut energy, mut moves) = metric(&incs, l);
    report.history.push(energy);
    loop {
        out.inclusions = incs.clone();
        let overlaps = out.overlapping_pairs().len();
        if overlaps == 0 {
            break;
        }
        if report.sweeps == max_sweeps {
            return Err(Error::RelaxationNonConvergence { sweeps: report.sweeps, overlaps });
        }
        report.sweeps += 1;

        let mut accepted = None;
        let mut step = STEP;
        for _ in 0..=HALVINGS {
            let trial = displaced(&incs, &moves, step, l);
            let (e, m) = metric(&trial, l);
            if e <= energy {
                accepted = Some((trial, e, m));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, e, m)) => {
                incs = trial;
                energy = e;
                moves = m;
            }
            None => {
                for inc in &mut incs {
                    for c in &mut inc.center {
                        *c = wrap(*c + JITTER * l * rng.random_range(-1.0..=1.0), l);
                    }
                }
                (energy, moves) = metric(&incs, l);
                report.jitter_sweeps.push(report.sweeps);
            }
        }
        report.history.push(energy);
    }
    log::debug!("relaxation finished after {} sweeps ({} jitters)", report.sweeps, report.jitter_sweeps.len());
    Ok((out, report))
}

/// Overlap metric and the per-inclusion displacement at unit step.
fn metric(incs: &[Inclusion], l: f64) -> (f64, Vec<Vector3<f64>>) {
    let mut energy = 0.0;
    let mut moves = vec![Vector3::zeros(); incs.len()];
    for i in 0..incs.len() {
        for j in i + 1..incs.len() {
            for c in contacts(&incs[i], &incs[j], l, INFLATION) {
                energy += c.depth * c.depth;
                let push = c.direction * (0.5 * c.depth);
                moves[i] -= push;
                moves[j] += push;
            }
        }
    }
    (energy, moves)
}

fn displaced(incs: &[Inclusion], moves: &[Vector3<f64>], step: f64, l: f64) -> Vec<Inclusion> {
    incs.iter()
        .zip(moves)
        .map(|(inc, d)| {
            let mut inc = inc.clone();
            for (k, c) in inc.center.iter_mut().enumerate() {
                *c = wrap(*c + step * d[k], l);
            }
            inc
        })
        .collect()
}
