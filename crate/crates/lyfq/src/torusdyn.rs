//! Layer parameterization of the torus zero set, Monte-Carlo sampling of the
//! transversal measures, and ergodic-average consistency checks.
//!
//! The zero set is the union of total-degree many layers `phi_j(y) = (y, 0) +
//! theta_j(y, 0) * 1 mod 2pi`. The transversal measure in direction `ell` has
//! density `-<grad theta_j, ell>` against `dy` on each layer; for `ell = 1`
//! the density is exactly 1.

use rand::Rng;

use crate::error::{Error, Result};
use crate::polycore::MultiPoly;
use crate::uniroots::{circular_dist, cluster_angles};
use crate::zeroline::{self, TrackOpts};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Central-difference step for gradients of the phase functions.
pub const GRAD_FD_STEP: f64 = 1e-5;
/// Samples whose phase cluster sits closer than this to a neighboring
/// cluster are marked non-regular and excluded from weighted sums.
pub const REGULAR_SEPARATION: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct LayerSample {
    /// Base point in `(0, 2pi]^{n-1}`.
    pub y: Vec<f64>,
    /// Layer index, 1-based.
    pub layer: usize,
    /// The torus point `phi_layer(y)`.
    pub point: Vec<f64>,
    /// Transversal density at the sample (1 exactly for `ell = 1`).
    pub weight: f64,
    /// Phase-cluster size at the sampled point.
    pub mult: u32,
    pub regular: bool,
}

/// Expanded (multiplicity-repeated) sorted phases at `(y, 0)`.
fn phases_at(p: &MultiPoly, y: &[f64]) -> Result<Vec<f64>> {
    let mut point = y.to_vec();
    point.push(0.0);
    Ok(zeroline::phase_spectrum(p, &point)?.expanded())
}

/// The point `phi_j(y) = (y, 0) + theta_j(y, 0) * (1, ..., 1) mod 2pi` on the
/// j-th layer (1-based, ties ordered by cluster).
pub fn layer_point(p: &MultiPoly, j: usize, y: &[f64]) -> Result<Vec<f64>> {
    let total = p.total_degree();
    if j == 0 || j > total {
        return Err(Error::Invalid(format!(
            "layer index {j} out of range 1..={total}"
        )));
    }
    if y.len() + 1 != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n() - 1,
            got: y.len(),
        });
    }
    let phases = phases_at(p, y)?;
    let theta = phases[j - 1];
    let mut point: Vec<f64> = y.iter().map(|&v| (v + theta).rem_euclid(TAU)).collect();
    point.push(theta.rem_euclid(TAU));
    Ok(point)
}

/// Gradient data for one sampled layer: `d theta_j / d y_i` by central
/// differences, with the displaced phase matched by circular proximity.
fn layer_gradient(p: &MultiPoly, j: usize, y: &[f64], theta: f64) -> Result<Vec<f64>> {
    let n1 = y.len();
    let mut grad = Vec::with_capacity(n1);
    for i in 0..n1 {
        let mut yp = y.to_vec();
        yp[i] += GRAD_FD_STEP;
        let mut ym = y.to_vec();
        ym[i] -= GRAD_FD_STEP;
        let tp = nearest_phase(&phases_at(p, &yp)?, theta);
        let tm = nearest_phase(&phases_at(p, &ym)?, theta);
        grad.push(signed_diff(tp, tm) / (2.0 * GRAD_FD_STEP));
    }
    let _ = j;
    Ok(grad)
}

fn nearest_phase(phases: &[f64], target: f64) -> f64 {
    let mut best = phases[0];
    let mut best_d = circular_dist(best, target);
    for &ph in phases.iter().skip(1) {
        let d = circular_dist(ph, target);
        if d < best_d {
            best_d = d;
            best = ph;
        }
    }
    best
}

// difference of two angles near each other, unwrapped to (-pi, pi]
fn signed_diff(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(TAU);
    if d > std::f64::consts::PI {
        d -= TAU;
    }
    d
}

fn is_unit_direction(ell: &[f64]) -> bool {
    ell.iter().all(|&l| (l - 1.0).abs() < 1e-15)
}

/// Draw `count` samples of the transversal measure: `y` uniform on
/// `(0, 2pi]^{n-1}`, layer index uniform, weight `-<grad theta_j, ell>`
/// (exactly 1 when `ell = 1`).
pub fn sample_m(
    p: &MultiPoly,
    ell: &[f64],
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<LayerSample>> {
    if ell.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: ell.len(),
        });
    }
    let n1 = p.n() - 1;
    let total = p.total_degree();
    let unit = is_unit_direction(ell);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let y: Vec<f64> = (0..n1).map(|_| rng.random_range(0.0..TAU)).collect();
        let j = rng.random_range(1..=total);
        let phases = phases_at(p, &y)?;
        let theta = phases[j - 1];
        let mut point: Vec<f64> = y.iter().map(|&v| (v + theta).rem_euclid(TAU)).collect();
        point.push(theta.rem_euclid(TAU));

        // cluster structure at the sample
        let spectrum = cluster_angles(&phases, 1e-7);
        let mult = spectrum.multiplicity_at(theta.rem_euclid(TAU), 1e-6).max(1);
        let regular = spectrum.min_cluster_separation() >= REGULAR_SEPARATION;

        let weight = if unit {
            1.0
        } else if regular {
            // -<grad theta, ell> with the diagonal identity
            // <grad theta, 1> = -1 closing the last coordinate
            let g = layer_gradient(p, j, &y, theta)?;
            let ln = ell[n1];
            let mut w = ln;
            for (i, &gi) in g.iter().enumerate() {
                w -= gi * (ell[i] - ln);
            }
            w
        } else {
            0.0
        };
        out.push(LayerSample {
            y,
            layer: j,
            point,
            weight,
            mult,
            regular,
        });
    }
    Ok(out)
}

/// Monte-Carlo estimate of the total mass `integral mult d m_ell =
/// (2pi)^{n-1} <d, ell>` from a batch of samples.
pub fn total_mass_estimate(p: &MultiPoly, samples: &[LayerSample]) -> f64 {
    let n1 = p.n() - 1;
    let total = p.total_degree() as f64;
    let regulars: Vec<&LayerSample> = samples.iter().filter(|s| s.regular).collect();
    if regulars.is_empty() {
        return 0.0;
    }
    let mean_w: f64 = regulars.iter().map(|s| s.weight).sum::<f64>() / regulars.len() as f64;
    TAU.powi(n1 as i32) * total * mean_w
}

/// Average of `h` over the first `n` zeros (with multiplicity) along the
/// direction-`ell` line through `x0`.
pub fn ergodic_orbit_average(
    p: &MultiPoly,
    ell: &[f64],
    h: impl Fn(&[f64]) -> f64,
    n: usize,
    x0: &[f64],
    opts: &TrackOpts,
) -> Result<f64> {
    let drift: f64 = p
        .degree()
        .iter()
        .zip(ell)
        .map(|(&d, &l)| d as f64 * l)
        .sum();
    let mut horizon = (n as f64 + 8.0) * TAU / drift * 1.1;
    loop {
        let zs = zeroline::find_zeros_anchored(p, x0, ell, 1e-9, horizon, opts)?;
        let expanded = zs.expanded();
        if expanded.len() >= n {
            let mut acc = 0.0;
            for &x in expanded.iter().take(n) {
                acc += h(&zs.torus_point(x));
            }
            return Ok(acc / n as f64);
        }
        horizon *= 1.5;
    }
}

#[derive(Clone, Debug)]
pub struct SpaceAverage {
    pub value: f64,
    pub mc_stderr: f64,
    pub regular_fraction: f64,
}

/// Monte-Carlo of `1/((2pi)^{n-1} <d,ell>) * integral mult(x) h(x) dm_ell`,
/// the space side of the ergodic theorem. The layer-index sum counts
/// multiplicity, so samples enter with plain weight `w * h`.
pub fn ergodic_space_average(
    p: &MultiPoly,
    ell: &[f64],
    h: impl Fn(&[f64]) -> f64,
    count: usize,
    rng: &mut impl Rng,
) -> Result<SpaceAverage> {
    let samples = sample_m(p, ell, count, rng)?;
    let drift: f64 = p
        .degree()
        .iter()
        .zip(ell)
        .map(|(&d, &l)| d as f64 * l)
        .sum();
    let total = p.total_degree() as f64;
    let factor = total / drift;
    let vals: Vec<f64> = samples
        .iter()
        .filter(|s| s.regular)
        .map(|s| factor * s.weight * h(&s.point))
        .collect();
    if vals.is_empty() {
        return Err(Error::Invalid("no regular samples drawn".into()));
    }
    let m = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / m;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m.max(2.0);
    Ok(SpaceAverage {
        value: mean,
        mc_stderr: (var / m).sqrt(),
        regular_fraction: m / samples.len() as f64,
    })
}
