//! Probabilistic verification battery for the Lee-Yang property. The battery
//! samples necessary conditions (self-inversiveness, unimodular roots of
//! rational-direction slices); a pass is evidence, never a proof, while a
//! failure carries a concrete witness.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycore::{MultiPoly, UnivariatePoly, PROPORTIONALITY_REL_TOL};
use crate::uniroots;

type C64 = Complex64;

pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_MAX_K: u32 = 3;
pub const DEFAULT_DEGREE_CAP: usize = 200;
pub const DEFAULT_CIRCLE_TOL: f64 = 1e-8;

/// A slice trial that put a root off the unit circle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub x0: Vec<f64>,
    pub k: Vec<u32>,
    pub root_re: f64,
    pub root_im: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LYReport {
    pub self_inversive: bool,
    /// Recovered unimodular factor with `p^dagger = c p`, as (re, im).
    pub factor: Option<(f64, f64)>,
    pub slice_trials: usize,
    pub worst_circle_deviation: f64,
    pub circle_tol: f64,
    pub witnesses: Vec<Witness>,
    pub verdict: bool,
}

/// Necessary condition: every Lee-Yang polynomial is self-inversive up to a
/// unimodular factor. A failure here is a definitive non-Lee-Yang
/// certificate.
pub fn verify_self_inversive(p: &MultiPoly) -> (bool, Option<C64>) {
    match p.self_inversive_factor(PROPORTIONALITY_REL_TOL) {
        Some(c) => (true, Some(c)),
        None => (false, None),
    }
}

/// Builds the univariate polynomial `w -> p(e^{i x0_1} w^{k_1}, ...,
/// e^{i x0_n} w^{k_n})` of degree `<d, k>` and returns the worst distance of
/// its roots from the unit circle. Zero (up to root-finding accuracy) for
/// Lee-Yang `p`.
pub fn slice_test(p: &MultiPoly, x0: &[f64], k: &[u32], degree_cap: usize) -> Result<f64> {
    if x0.len() != p.n() || k.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: x0.len().min(k.len()),
        });
    }
    if k.contains(&0) {
        return Err(Error::Invalid("slice direction must be >= 1".into()));
    }
    let deg: usize = p
        .degree()
        .iter()
        .zip(k)
        .map(|(&d, &ki)| d as usize * ki as usize)
        .sum();
    if deg > degree_cap {
        return Err(Error::DegreeCapExceeded {
            degree: deg,
            cap: degree_cap,
        });
    }
    let q = slice_polynomial(p, x0, k, deg);
    let cc = uniroots::circle_clusters(&q, uniroots::CLUSTER_RADIUS)?;
    Ok(cc.worst_deviation)
}

fn slice_polynomial(p: &MultiPoly, x0: &[f64], k: &[u32], deg: usize) -> UnivariatePoly {
    let mut coeffs = vec![C64::new(0.0, 0.0); deg + 1];
    for (alpha, a) in p.terms() {
        let mut phase = 0.0;
        let mut pow = 0usize;
        for ((&e, &ki), &x) in alpha.iter().zip(k).zip(x0) {
            phase += x * e as f64;
            pow += e as usize * ki as usize;
        }
        coeffs[pow] += a * C64::cis(phase);
    }
    UnivariatePoly::new_untrimmed(coeffs)
}

/// Runs the self-inversive check and `trials` random slice tests with
/// `x0` uniform in `[0, 2pi)^n` and `k` uniform in `{1..max_k}^n` subject to
/// the degree cap.
pub fn verify(
    p: &MultiPoly,
    trials: usize,
    degree_cap: usize,
    circle_tol: f64,
    rng: &mut impl Rng,
) -> Result<LYReport> {
    let (self_inversive, factor) = verify_self_inversive(p);
    let tau = 2.0 * std::f64::consts::PI;
    let n = p.n();
    let mut worst = 0.0f64;
    let mut witnesses = Vec::new();
    let mut done = 0usize;
    while done < trials {
        let x0: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..tau)).collect();
        let k: Vec<u32> = (0..n)
            .map(|_| rng.random_range(1..=DEFAULT_MAX_K))
            .collect();
        let deg: usize = p
            .degree()
            .iter()
            .zip(&k)
            .map(|(&d, &ki)| d as usize * ki as usize)
            .sum();
        let k = if deg > degree_cap { vec![1; n] } else { k };
        match slice_test(p, &x0, &k, degree_cap) {
            Ok(dev) => {
                if dev > worst {
                    worst = dev;
                }
                if dev > circle_tol && witnesses.len() < 8 {
                    // re-run to fetch the offending root for the witness
                    if let Some(root) = worst_root(p, &x0, &k, degree_cap)? {
                        witnesses.push(Witness {
                            x0: x0.clone(),
                            k: k.clone(),
                            root_re: root.re,
                            root_im: root.im,
                            deviation: dev,
                        });
                    }
                }
            }
            Err(Error::RootsNonConvergence { residual }) => {
                // treat as a failed trial with a synthetic deviation
                worst = worst.max(residual.max(1.0));
                witnesses.push(Witness {
                    x0: x0.clone(),
                    k: k.clone(),
                    root_re: f64::NAN,
                    root_im: f64::NAN,
                    deviation: residual,
                });
            }
            Err(e) => return Err(e),
        }
        done += 1;
    }
    let verdict = self_inversive && worst <= circle_tol;
    Ok(LYReport {
        self_inversive,
        factor: factor.map(|c| (c.re, c.im)),
        slice_trials: trials,
        worst_circle_deviation: worst,
        circle_tol,
        witnesses,
        verdict,
    })
}

fn worst_root(p: &MultiPoly, x0: &[f64], k: &[u32], cap: usize) -> Result<Option<C64>> {
    let deg: usize = p
        .degree()
        .iter()
        .zip(k)
        .map(|(&d, &ki)| d as usize * ki as usize)
        .sum();
    if deg > cap {
        return Ok(None);
    }
    let q = slice_polynomial(p, x0, k, deg);
    let cc = uniroots::circle_clusters(&q, uniroots::CLUSTER_RADIUS)?;
    Ok(Some(cc.worst_centroid))
}
