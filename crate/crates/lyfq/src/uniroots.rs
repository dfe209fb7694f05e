//! Univariate complex root extraction (balanced companion matrix followed by
//! simultaneous Newton polishing) and unit-circle angle spectra with
//! multiplicity clustering.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::polycore::UnivariatePoly;

type C64 = Complex64;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Default allowed distance of roots from the unit circle.
pub const CIRCLE_TOL: f64 = 1e-8;
/// Default clustering radius for merging nearby angles into one root of
/// higher multiplicity; one order above the root-polishing residual so
/// clusters are stable.
pub const CLUSTER_RADIUS: f64 = 1e-7;
/// Residual contract for [`roots`]: `|q(r)| <= RESIDUAL_REL * ||q|| * max(1,|r|)^D`.
pub const RESIDUAL_REL: f64 = 1e-10;

/// All `deg(q)` roots with multiplicity (near-multiple roots appear as
/// clusters of nearly equal values).
pub fn roots(q: &UnivariatePoly) -> Result<Vec<C64>> {
    let d = q.degree();
    if d == 0 {
        return Err(Error::Invalid("roots of a constant polynomial".into()));
    }
    let c = q.coeffs();
    let lead = q.leading();
    if lead.norm() == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    let mut rts = match d {
        1 => vec![-c[0] / c[1]],
        2 => quadratic_roots(c[0], c[1], c[2]),
        _ => {
            let mut comp = CMat::zeros(d);
            for i in 1..d {
                comp[(i, i - 1)] = C64::new(1.0, 0.0);
            }
            for i in 0..d {
                comp[(i, d - 1)] = -c[i] / lead;
            }
            linalg::balance(&mut comp);
            linalg::hessenberg_eigenvalues(comp)?
        }
    };
    aberth_polish(q, &mut rts);
    // residual contract
    let scale = q.coeff_scale();
    let mut worst = 0.0f64;
    for &r in &rts {
        let denom = scale * r.norm().max(1.0).powi(d as i32);
        let res = q.eval(r).norm() / denom;
        worst = worst.max(res);
    }
    if worst > RESIDUAL_REL {
        return Err(Error::RootsNonConvergence { residual: worst });
    }
    Ok(rts)
}

fn quadratic_roots(c0: C64, c1: C64, c2: C64) -> Vec<C64> {
    // stable form: avoid cancellation in -b +- sqrt(disc)
    let disc = (c1 * c1 - c2 * c0 * 4.0).sqrt();
    let q = if (c1 + disc).norm() >= (c1 - disc).norm() {
        -(c1 + disc) * 0.5
    } else {
        -(c1 - disc) * 0.5
    };
    if q.norm() == 0.0 {
        return vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    }
    vec![q / c2, c0 / q]
}

/// Simultaneous Newton (Aberth-Ehrlich) correction from good initial guesses.
fn aberth_polish(q: &UnivariatePoly, rts: &mut [C64]) {
    let dq = q.derivative();
    let d = rts.len();
    for _ in 0..60 {
        let mut max_step = 0.0f64;
        for k in 0..d {
            let zk = rts[k];
            let pv = q.eval(zk);
            if pv.norm() == 0.0 {
                continue;
            }
            let dv = dq.eval(zk);
            if dv.norm() == 0.0 {
                continue;
            }
            let newton = pv / dv;
            let mut rep = C64::new(0.0, 0.0);
            for (j, &zj) in rts.iter().enumerate() {
                if j != k {
                    let diff = zk - zj;
                    if diff.norm() > 1e-300 {
                        rep += C64::new(1.0, 0.0) / diff;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * rep;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            rts[k] = zk - step;
            max_step = max_step.max(step.norm() / zk.norm().max(1.0));
        }
        if max_step < 1e-14 {
            break;
        }
    }
}

/// Sorted unit-circle root angles with multiplicity clusters.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleSpectrum {
    angles: Vec<f64>,
    mults: Vec<u32>,
    total: u32,
}

impl AngleSpectrum {
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn mults(&self) -> &[u32] {
        &self.mults
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn num_clusters(&self) -> usize {
        self.angles.len()
    }

    /// Angles repeated by multiplicity, ascending in `[0, 2pi)`.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total as usize);
        for (&a, &m) in self.angles.iter().zip(&self.mults) {
            for _ in 0..m {
                out.push(a);
            }
        }
        out
    }

    /// Multiplicity of the cluster containing `angle`, or 0 if no cluster is
    /// within `radius` (circularly).
    pub fn multiplicity_at(&self, angle: f64, radius: f64) -> u32 {
        for (&a, &m) in self.angles.iter().zip(&self.mults) {
            if circular_dist(a, angle) <= radius {
                return m;
            }
        }
        0
    }

    /// Smallest circular distance between distinct clusters; `2pi` when there
    /// is a single cluster.
    pub fn min_cluster_separation(&self) -> f64 {
        let k = self.angles.len();
        if k <= 1 {
            return TAU;
        }
        let mut min = f64::INFINITY;
        for i in 0..k {
            let next = self.angles[(i + 1) % k];
            let gap = if i + 1 == k {
                next + TAU - self.angles[i]
            } else {
                next - self.angles[i]
            };
            min = min.min(gap);
        }
        min
    }
}

pub fn circular_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Roots grouped into multiplicity clusters. An m-fold root is computed as a
/// constellation of m values scattered by roughly `eps^(1/m)`; the Newton
/// length `|q(r)/q'(r)|` measures that scatter independently of its
/// direction, so the merge radius between neighboring roots adapts to it.
/// Cluster centroids cancel the scatter to first order and are the values
/// checked against the unit circle.
#[derive(Clone, Debug)]
pub struct CircleClusters {
    pub centroids: Vec<C64>,
    pub sizes: Vec<u32>,
    pub worst_deviation: f64,
    pub worst_centroid: C64,
}

// Inclusion radii larger than this are clipped; multiplicities whose
// constellation scatter exceeds it are indistinguishable from distinct
// roots in binary64 anyway.
const INCLUSION_CAP: f64 = 2e-3;

// Running error bound for Horner evaluation at |s| = rabs; the floor below
// which a computed |q(r)| is pure roundoff.
fn eval_error_bound(q: &UnivariatePoly, rabs: f64) -> f64 {
    let mut acc = 0.0;
    let mut p = 1.0;
    for c in q.coeffs() {
        acc += c.norm() * p;
        p *= rabs;
    }
    acc * f64::EPSILON * q.coeffs().len() as f64
}

pub fn circle_clusters(q: &UnivariatePoly, base_radius: f64) -> Result<CircleClusters> {
    let rts = roots(q)?;
    let dq = q.derivative();
    let deg = rts.len() as f64;
    // (centroid accumulator, member count, max inclusion radius)
    let mut clusters: Vec<(C64, u32, f64)> = rts
        .iter()
        .map(|&r| {
            let qv = q.eval(r).norm().max(eval_error_bound(q, r.norm()));
            let dv = dq.eval(r).norm();
            let dfloor = eval_error_bound(&dq, r.norm());
            let nl = if dv > dfloor {
                (deg * qv / dv).min(INCLUSION_CAP)
            } else {
                INCLUSION_CAP
            };
            (r, 1u32, nl)
        })
        .collect();
    clusters.sort_by(|a, b| {
        arg_tau(a.0).partial_cmp(&arg_tau(b.0)).unwrap()
    });
    // repeated sweeps of circular neighbor merging until stable
    loop {
        let k = clusters.len();
        if k <= 1 {
            break;
        }
        let mut merged_any = false;
        let mut out: Vec<(C64, u32, f64)> = Vec::with_capacity(k);
        for cl in clusters.drain(..) {
            match out.last_mut() {
                Some(prev) if mergeable(prev, &cl, base_radius, deg) => {
                    *prev = merge(*prev, cl);
                    merged_any = true;
                }
                _ => out.push(cl),
            }
        }
        // wrap around
        if out.len() > 1 {
            let first = out[0];
            let last = *out.last().unwrap();
            if mergeable(&last, &first, base_radius, deg) {
                let joined = merge(last, first);
                out.pop();
                out[0] = joined;
                merged_any = true;
            }
        }
        clusters = out;
        if !merged_any {
            break;
        }
    }
    clusters.sort_by(|a, b| arg_tau(centroid(a)).partial_cmp(&arg_tau(centroid(b))).unwrap());
    let mut worst_dev = 0.0f64;
    let mut worst = C64::new(1.0, 0.0);
    let mut centroids = Vec::with_capacity(clusters.len());
    let mut sizes = Vec::with_capacity(clusters.len());
    for cl in &clusters {
        let mut c = centroid(cl);
        if cl.1 >= 2 {
            c = polish_multiple_root(q, c, cl.1);
        }
        // deviation in excess of what the cluster's own conditioning
        // (inclusion radius) can explain; near-collision pairs are granted
        // their positional uncertainty, a genuine off-circle root is not
        let dev = ((c.norm() - 1.0).abs() - 4.0 * cl.2).max(0.0);
        if dev > worst_dev {
            worst_dev = dev;
            worst = c;
        }
        centroids.push(c);
        sizes.push(cl.1);
    }
    Ok(CircleClusters {
        centroids,
        sizes,
        worst_deviation: worst_dev,
        worst_centroid: worst,
    })
}

fn arg_tau(z: C64) -> f64 {
    z.arg().rem_euclid(TAU)
}

// An m-fold root of q is a simple root of the (m-1)-th derivative; a few
// Newton steps there recover it to machine accuracy from the noisy cluster
// centroid.
fn polish_multiple_root(q: &UnivariatePoly, start: C64, m: u32) -> C64 {
    let mut dq = q.clone();
    for _ in 0..m - 1 {
        dq = dq.derivative();
    }
    let ddq = dq.derivative();
    let mut c = start;
    for _ in 0..4 {
        let dv = ddq.eval(c);
        if dv.norm() == 0.0 {
            break;
        }
        let step = dq.eval(c) / dv;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        c -= step;
        if (c - start).norm() > 10.0 * INCLUSION_CAP {
            return start; // cluster was not a genuine multiple root
        }
    }
    c
}

fn centroid(cl: &(C64, u32, f64)) -> C64 {
    cl.0 / cl.1 as f64
}

fn mergeable(a: &(C64, u32, f64), b: &(C64, u32, f64), base: f64, deg: f64) -> bool {
    let _ = deg;
    let radius = (base + 3.0 * (a.2 + b.2)).min(4.0 * INCLUSION_CAP);
    circular_dist(arg_tau(centroid(a)), arg_tau(centroid(b))) <= radius
}

fn merge(a: (C64, u32, f64), b: (C64, u32, f64)) -> (C64, u32, f64) {
    (a.0 + b.0, a.1 + b.1, a.2.max(b.2))
}

/// Root angles of `q` mapped to `[0, 2pi)`, sorted, merged into multiplicity
/// clusters (representative is the cluster centroid). Errors with the
/// offending cluster centroid if it is farther than `circle_tol` from the
/// unit circle.
pub fn angle_spectrum(
    q: &UnivariatePoly,
    circle_tol: f64,
    cluster_radius: f64,
) -> Result<AngleSpectrum> {
    let cc = circle_clusters(q, cluster_radius)?;
    if cc.worst_deviation > circle_tol {
        return Err(Error::OffCircleRoot {
            root: cc.worst_centroid,
            deviation: cc.worst_deviation,
            tol: circle_tol,
        });
    }
    let mut pairs: Vec<(f64, u32)> = cc
        .centroids
        .iter()
        .zip(&cc.sizes)
        .map(|(&c, &m)| (arg_tau(c), m))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let total = pairs.iter().map(|&(_, m)| m).sum();
    Ok(AngleSpectrum {
        angles: pairs.iter().map(|&(a, _)| a).collect(),
        mults: pairs.iter().map(|&(_, m)| m).collect(),
        total,
    })
}

/// Greedy linear clustering of sorted angles with a circular wrap merge.
pub fn cluster_angles(sorted: &[f64], radius: f64) -> AngleSpectrum {
    let total = sorted.len() as u32;
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for &a in sorted {
        match groups.last_mut() {
            Some(g) if a - g[0] <= radius => g.push(a),
            _ => groups.push(vec![a]),
        }
    }
    // wrap: the last cluster may continue into the first one
    if groups.len() > 1 {
        let first_lo = groups[0][0];
        let last = groups.last().unwrap();
        let span = first_lo + TAU - last[0];
        if span <= radius {
            let mut tail = groups.pop().unwrap();
            for v in &mut tail {
                *v -= TAU;
            }
            tail.extend_from_slice(&groups[0]);
            groups[0] = tail;
        }
    }
    let mut angles = Vec::with_capacity(groups.len());
    let mut mults = Vec::with_capacity(groups.len());
    for g in &groups {
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        angles.push(mean.rem_euclid(TAU));
        mults.push(g.len() as u32);
    }
    // keep representatives sorted after the wrap merge
    let mut idx: Vec<usize> = (0..angles.len()).collect();
    idx.sort_by(|&i, &j| angles[i].partial_cmp(&angles[j]).unwrap());
    let angles: Vec<f64> = idx.iter().map(|&i| angles[i]).collect();
    let mults: Vec<u32> = idx.iter().map(|&i| mults[i]).collect();
    AngleSpectrum {
        angles,
        mults,
        total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::MultiPoly;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted_by_arg(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
        v
    }

    #[test]
    fn roots_of_s2_plus_1() {
        let q = UnivariatePoly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = sorted_by_arg(roots(&q).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_of_running_example_restriction() {
        let q = MultiPoly::running_example()
            .diag_restrict(&[0.0, 0.0])
            .unwrap();
        let mut r = roots(&q).unwrap();
        r.sort_by(|a, b| a.arg().rem_euclid(TAU).partial_cmp(&b.arg().rem_euclid(TAU)).unwrap());
        // {1, 1, e^{2 pi i/3}, e^{-2 pi i/3}}
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-7);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-7);
        let w = C64::cis(2.0 * PI / 3.0);
        assert!((r[2] - w).norm() < 1e-9);
        assert!((r[3] - w.conj()).norm() < 1e-9);
    }

    #[test]
    fn roots_real_pair() {
        let q = UnivariatePoly::new(vec![c(1.0, 0.0), c(-2.5, 0.0), c(1.0, 0.0)]);
        let mut r = roots(&q).unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn appending_a_linear_factor_appends_a_root() {
        let q = UnivariatePoly::new(vec![c(3.0, 0.0), c(0.5, -1.0), c(0.0, 2.0), c(1.0, 0.0)]);
        let psi = 0.43;
        let extra = C64::cis(psi);
        let q2 = q.mul_linear(extra);
        let r1 = roots(&q).unwrap();
        let r2 = roots(&q2).unwrap();
        for root in &r1 {
            assert!(
                r2.iter().any(|s| (s - root).norm() < 1e-8),
                "missing root {root}"
            );
        }
        assert!(r2.iter().any(|s| (s - extra).norm() < 1e-8));
    }

    #[test]
    fn angle_spectrum_triple_root() {
        // (1 - s)^3
        let q = UnivariatePoly::new(vec![
            c(1.0, 0.0),
            c(-3.0, 0.0),
            c(3.0, 0.0),
            c(-1.0, 0.0),
        ]);
        let sp = angle_spectrum(&q, 1e-4, 1e-3).unwrap();
        assert_eq!(sp.num_clusters(), 1);
        assert_eq!(sp.mults(), &[3]);
        assert!(circular_dist(sp.angles()[0], 0.0) < 1e-4);
        assert_eq!(sp.total(), 3);
    }

    #[test]
    fn angle_spectrum_running_example() {
        let q = MultiPoly::running_example()
            .diag_restrict(&[0.0, 0.0])
            .unwrap();
        let sp = angle_spectrum(&q, CIRCLE_TOL, CLUSTER_RADIUS).unwrap();
        assert_eq!(sp.mults(), &[2, 1, 1]);
        assert!(circular_dist(sp.angles()[0], 0.0) < 1e-7);
        assert!((sp.angles()[1] - 2.0 * PI / 3.0).abs() < 1e-9);
        assert!((sp.angles()[2] - 4.0 * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn angle_spectrum_rejects_off_circle() {
        let q = UnivariatePoly::new(vec![c(2.0, 0.0), c(-1.0, 0.0)]);
        match angle_spectrum(&q, CIRCLE_TOL, CLUSTER_RADIUS) {
            Err(Error::OffCircleRoot { root, .. }) => {
                assert!((root - c(2.0, 0.0)).norm() < 1e-12)
            }
            other => panic!("expected OffCircleRoot, got {other:?}"),
        }
    }

    #[test]
    fn angle_spectrum_scalar_invariance() {
        let q = MultiPoly::running_example()
            .diag_restrict(&[0.4, 1.7])
            .unwrap();
        let scaled = UnivariatePoly::new(q.coeffs().iter().map(|&a| a * c(0.0, -2.5)).collect());
        let s1 = angle_spectrum(&q, CIRCLE_TOL, CLUSTER_RADIUS).unwrap();
        let s2 = angle_spectrum(&scaled, CIRCLE_TOL, CLUSTER_RADIUS).unwrap();
        assert_eq!(s1.mults(), s2.mults());
        for (a, b) in s1.angles().iter().zip(s2.angles()) {
            assert!(circular_dist(*a, *b) < 1e-9);
        }
    }

    #[test]
    fn mult_sum_equals_degree() {
        for x in [[0.0, 0.0], [1.1, 0.3], [2.9, 5.5]] {
            let q = MultiPoly::running_example().diag_restrict(&x).unwrap();
            let sp = angle_spectrum(&q, CIRCLE_TOL, CLUSTER_RADIUS).unwrap();
            assert_eq!(sp.total(), 4);
            assert_eq!(sp.mults().iter().sum::<u32>(), 4);
        }
    }

    #[test]
    fn wrap_cluster_merges_across_zero() {
        let sp = cluster_angles(&[1e-9, TAU - 1e-9], 1e-7);
        assert_eq!(sp.num_clusters(), 1);
        assert_eq!(sp.mults(), &[2]);
        assert!(circular_dist(sp.angles()[0], 0.0) < 1e-8);
    }
}
