//! Gap distributions: empirical gaps along a line, torus Monte-Carlo of the
//! unit-direction limit, rational-direction substitution, comparison
//! metrics, atom detection, and the Poisson / random-unitary references.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::polycore::MultiPoly;
use crate::randutil::haar_unitary;
use crate::zeroline::{self, ZeroSet};

type C64 = Complex64;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Weighted gap samples with optional detected atoms. Weights are normalized
/// to total mass one at construction; samples are kept sorted by gap value.
#[derive(Clone, Debug)]
pub struct GapDistribution {
    samples: Vec<(f64, f64)>,
    atoms: Vec<(f64, f64)>,
    meta: String,
}

impl GapDistribution {
    pub fn from_samples(
        mut samples: Vec<(f64, f64)>,
        meta: impl Into<String>,
    ) -> Result<GapDistribution> {
        samples.retain(|&(_, w)| w > 0.0);
        if samples.is_empty() {
            return Err(Error::Invalid("no gap samples".into()));
        }
        if samples.iter().any(|&(g, _)| !g.is_finite() || g < 0.0) {
            return Err(Error::Invalid("gap values must be finite and >= 0".into()));
        }
        let total: f64 = samples.iter().map(|&(_, w)| w).sum();
        for s in &mut samples {
            s.1 /= total;
        }
        samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(GapDistribution {
            samples,
            atoms: Vec::new(),
            meta: meta.into(),
        })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn meta(&self) -> &str {
        &self.meta
    }

    pub fn total_weight(&self) -> f64 {
        self.samples.iter().map(|&(_, w)| w).sum()
    }

    pub fn max_gap(&self) -> f64 {
        self.samples.last().map(|&(g, _)| g).unwrap_or(0.0)
    }

    /// Weighted mean gap.
    pub fn mean(&self) -> f64 {
        self.samples.iter().map(|&(g, w)| g * w).sum()
    }

    /// CDF value `P(gap <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &(g, w) in &self.samples {
            if g <= x {
                acc += w;
            } else {
                break;
            }
        }
        acc
    }

    /// Mass assigned to the open interval `(lo, hi)`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        self.samples
            .iter()
            .filter(|&&(g, _)| g > lo && g < hi)
            .map(|&(_, w)| w)
            .sum()
    }

    /// Greedy atom scan: repeatedly collapse the heaviest window of width
    /// `window` holding mass at least `mass_threshold` into an atom at the
    /// mass-weighted center. Stores and returns the detected atoms; the
    /// sample list itself is left untouched (it is the full distribution).
    pub fn detect_atoms(&mut self, window: f64, mass_threshold: f64) -> Vec<(f64, f64)> {
        let mut remaining: Vec<(f64, f64)> = self.samples.clone();
        let mut atoms = Vec::new();
        loop {
            // two-pointer max-mass window over the sorted remainder
            let mut best: Option<(usize, usize, f64)> = None;
            let mut lo = 0usize;
            let mut acc = 0.0f64;
            for hi in 0..remaining.len() {
                acc += remaining[hi].1;
                while remaining[hi].0 - remaining[lo].0 > window {
                    acc -= remaining[lo].1;
                    lo += 1;
                }
                if best.as_ref().map(|&(_, _, m)| acc > m).unwrap_or(true) {
                    best = Some((lo, hi, acc));
                }
            }
            match best {
                Some((lo, hi, mass)) if mass >= mass_threshold => {
                    let slice = &remaining[lo..=hi];
                    let center: f64 =
                        slice.iter().map(|&(g, w)| g * w).sum::<f64>() / mass;
                    atoms.push((center, mass));
                    remaining.drain(lo..=hi);
                }
                _ => break,
            }
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        self.atoms = atoms.clone();
        atoms
    }

    /// Scale all gap values by `factor` (used by the rational-direction
    /// reduction).
    fn scaled(mut self, factor: f64) -> GapDistribution {
        for s in &mut self.samples {
            s.0 *= factor;
        }
        self
    }
}

/// Consecutive differences of the multiplicity-expanded zero list: a zero of
/// multiplicity m contributes m - 1 zero-gaps, reproducing the atom at zero
/// of the limiting distribution by plain counting.
pub fn empirical_gaps(zs: &ZeroSet) -> Result<GapDistribution> {
    let xs = zs.expanded();
    if xs.len() < 2 {
        return Err(Error::Invalid("need at least two zeros".into()));
    }
    let samples: Vec<(f64, f64)> = xs.windows(2).map(|w| (w[1] - w[0], 1.0)).collect();
    GapDistribution::from_samples(
        samples,
        format!("empirical ell={:?} interval={:?}", zs.ell(), zs.interval()),
    )
}

/// The unit-direction gap distribution by torus Monte-Carlo: for each of
/// `count` uniform points the cyclic gaps of the restriction's root angles,
/// each with weight `1/|d|`.
pub fn nu_one(p: &MultiPoly, count: usize, rng: &mut impl Rng) -> Result<GapDistribution> {
    if count == 0 {
        return Err(Error::Invalid("need at least one sample".into()));
    }
    let total = p.total_degree();
    let w = 1.0 / total as f64;
    let mut samples = Vec::with_capacity(count * total);
    for _ in 0..count {
        let x: Vec<f64> = (0..p.n()).map(|_| rng.random_range(0.0..TAU)).collect();
        let angles = zeroline::phase_spectrum(p, &x)?.expanded();
        for j in 0..angles.len() {
            let next = if j + 1 == angles.len() {
                angles[0] + TAU
            } else {
                angles[j + 1]
            };
            samples.push((next - angles[j], w));
        }
    }
    GapDistribution::from_samples(samples, format!("nu1 count={count}"))
}

/// Gap distribution for the rational direction `k / m`: substitute
/// `z_j -> z_j^{k_j}`, take the unit-direction distribution, and rescale
/// gaps by `m` (the zeros of `p(exp(i x k / m))` are the zeros of the
/// substituted polynomial along the unit direction stretched by `m`; the
/// binomial case pins the scaling direction).
pub fn nu_rational(
    p: &MultiPoly,
    k: &[u32],
    m: u32,
    count: usize,
    rng: &mut impl Rng,
) -> Result<GapDistribution> {
    if m == 0 {
        return Err(Error::Invalid("denominator must be positive".into()));
    }
    let substituted = p.power_substitute(k)?;
    let base = nu_one(&substituted, count, rng)?;
    Ok(base.scaled(m as f64))
}

/// Weighted mean gap; equals `2 pi / <d, ell>` for empirical runs.
pub fn mean_gap(g: &GapDistribution) -> f64 {
    g.mean()
}

/// Sup-norm distance of the weighted empirical CDFs.
pub fn ks_distance(g1: &GapDistribution, g2: &GapDistribution) -> f64 {
    let mut i = 0usize;
    let mut j = 0usize;
    let a = g1.samples();
    let b = g2.samples();
    let mut f1 = 0.0f64;
    let mut f2 = 0.0f64;
    let mut worst = 0.0f64;
    while i < a.len() || j < b.len() {
        let xa = a.get(i).map(|&(g, _)| g).unwrap_or(f64::INFINITY);
        let xb = b.get(j).map(|&(g, _)| g).unwrap_or(f64::INFINITY);
        let x = xa.min(xb);
        while i < a.len() && a[i].0 == x {
            f1 += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == x {
            f2 += b[j].1;
            j += 1;
        }
        worst = worst.max((f1 - f2).abs());
    }
    worst
}

/// Sup distance between the empirical CDF and an analytic CDF, evaluated on
/// both sides of every jump.
pub fn ks_to_cdf(g: &GapDistribution, cdf: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0f64;
    let mut worst = 0.0f64;
    for &(x, w) in g.samples() {
        let target = cdf(x);
        worst = worst.max((acc - target).abs());
        acc += w;
        worst = worst.max((acc - target).abs());
    }
    worst
}

/// L1 distance between the CDFs (1-Wasserstein distance for distributions on
/// the line).
pub fn wasserstein1(g1: &GapDistribution, g2: &GapDistribution) -> f64 {
    let mut points: Vec<f64> = g1
        .samples()
        .iter()
        .chain(g2.samples())
        .map(|&(g, _)| g)
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    let mut acc = 0.0f64;
    for w in points.windows(2) {
        let x = w[0];
        acc += (g1.cdf(x) - g2.cdf(x)).abs() * (w[1] - w[0]);
    }
    acc
}

/// Gaps of `n` uniform, independent points on the circle, `count` rounds,
/// each gap weighted `1/n`.
pub fn poisson_reference(n: usize, count: usize, rng: &mut impl Rng) -> Result<GapDistribution> {
    if n == 0 || count == 0 {
        return Err(Error::Invalid("need n >= 1 and count >= 1".into()));
    }
    let w = 1.0 / n as f64;
    let mut samples = Vec::with_capacity(n * count);
    for _ in 0..count {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for j in 0..n {
            let next = if j + 1 == n {
                angles[0] + TAU
            } else {
                angles[j + 1]
            };
            samples.push((next - angles[j], w));
        }
    }
    GapDistribution::from_samples(samples, format!("poisson n={n} count={count}"))
}

/// Eigenangle gaps of `diag(e^{ix}) U` for Haar `U` and uniform `x`,
/// `count` draws. This is the sampled random-unitary reference for the
/// unit-direction limit of determinantal polynomials.
pub fn cue_reference(n: usize, count: usize, rng: &mut impl Rng) -> Result<GapDistribution> {
    if n == 0 || count == 0 {
        return Err(Error::Invalid("need n >= 1 and count >= 1".into()));
    }
    let w = 1.0 / n as f64;
    let mut samples = Vec::with_capacity(n * count);
    for _ in 0..count {
        let u = haar_unitary(n, rng);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
        let gaps = unitary_eigenangle_gaps(&u, &x)?;
        for g in gaps {
            samples.push((g, w));
        }
    }
    GapDistribution::from_samples(samples, format!("cue n={n} count={count}"))
}

/// Cyclic eigenangle gaps of `diag(e^{ix}) U`, ascending.
pub fn unitary_eigenangle_gaps(u: &CMat, x: &[f64]) -> Result<Vec<f64>> {
    let n = u.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let v = CMat::from_fn(n, |i, j| C64::cis(x[i]) * u[(i, j)]);
    let eigs = linalg::eigenvalues(&v)?;
    let mut angles: Vec<f64> = eigs.iter().map(|e| e.arg().rem_euclid(TAU)).collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut gaps = Vec::with_capacity(n);
    for j in 0..n {
        let next = if j + 1 == n {
            angles[0] + TAU
        } else {
            angles[j + 1]
        };
        gaps.push(next - angles[j]);
    }
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(gaps)
}

/// Per-sample oracle for the random-unitary reference: the eigenangle gap
/// multiset of `diag(e^{ix}) U` must coincide with the cyclic gap multiset of
/// the restriction angles of `det(I - diag(z) U)` at `x` (the angle sets are
/// reflections of each other, which leaves gaps unchanged). Returns the
/// worst per-sample sup-distance of sorted gap multisets.
pub fn cue_oracle_check(n: usize, count: usize, rng: &mut impl Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..count {
        let u = haar_unitary(n, rng);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
        let eig_gaps = unitary_eigenangle_gaps(&u, &x)?;
        let p = MultiPoly::determinantal(&u, 1e-10)?;
        let angles = zeroline::phase_spectrum(&p, &x)?.expanded();
        let mut poly_gaps = Vec::with_capacity(n);
        for j in 0..angles.len() {
            let next = if j + 1 == angles.len() {
                angles[0] + TAU
            } else {
                angles[j + 1]
            };
            poly_gaps.push(next - angles[j]);
        }
        poly_gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in eig_gaps.iter().zip(&poly_gaps) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}
